//! Sieve-built radical and totient tables with binary persistence.
//!
//! Both tables cover a contiguous range `1..=limit` and are immutable after
//! construction, so they can be shared read-only across any number of
//! worker threads. Entries are 64-bit; at 8 bytes per entry a table at the
//! `MAX_TABLE_LIMIT` cap of 10^8 takes ~800 MB.

use std::convert::TryInto;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

/// Hard cap on table size: 10^8 entries (~800 MB per table). Larger ranges
/// would need a segmented sieve, which is out of scope.
pub const MAX_TABLE_LIMIT: u64 = 100_000_000;

const MAGIC: [u8; 4] = *b"ABCT";
const FORMAT_VERSION: u16 = 1;

/// Discriminates table records inside the binary file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Radical = 0x01,
    Totient = 0x02,
}

impl TableKind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(TableKind::Radical),
            0x02 => Some(TableKind::Totient),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            TableKind::Radical => "radical",
            TableKind::Totient => "totient",
        }
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("limit must be at least 1")]
    ZeroLimit,
    #[error("limit {limit} exceeds the table cap of {cap} entries")]
    LimitExceedsCap { limit: u64, cap: u64 },
    #[error("n = {n} is outside the table range 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad table file: {0}")]
    Format(#[from] TableFormatError),
}

/// Precise decode failures; each variant names the offending field.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableFormatError {
    #[error("magic: expected \"ABCT\", found {found:?}")]
    Magic { found: [u8; 4] },
    #[error("version: expected {expected}, found {found}")]
    Version { expected: u16, found: u16 },
    #[error("kind: unknown table kind byte {found:#04x}")]
    Kind { found: u8 },
    #[error("kind: file holds a {found} table, expected {expected}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("kind: duplicate {kind} record in table file")]
    DuplicateKind { kind: &'static str },
    #[error("reserved: expected 0x00, found {found:#04x}")]
    Reserved { found: u8 },
    #[error("limit: {found} is outside 1..={cap}")]
    Limit { found: u64, cap: u64 },
    #[error("length: {section} section truncated")]
    Truncated { section: &'static str },
    #[error("checksum: stored {stored:#018x} != computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("length: trailing data after final record")]
    TrailingData,
}

fn check_limit(limit: u64) -> Result<(), TableError> {
    if limit == 0 {
        return Err(TableError::ZeroLimit);
    }
    if limit > MAX_TABLE_LIMIT {
        return Err(TableError::LimitExceedsCap {
            limit,
            cap: MAX_TABLE_LIMIT,
        });
    }
    Ok(())
}

/// Per-integer radicals `R(n)` for `1 <= n <= limit`.
///
/// `R(n)` is the product of the distinct primes dividing `n`, with
/// `R(1) = 1`. Guaranteed by construction: `R(n)` divides `n`, is
/// squarefree, equals `p` at primes, and is multiplicative over coprime
/// arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalTable {
    // values[0] is an unused sentinel; values[n] = R(n) for n in 1..=limit.
    values: Vec<u64>,
}

/// Per-integer Euler totients `phi(n)` for `1 <= n <= limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotientTable {
    values: Vec<u64>,
}

macro_rules! table_common {
    ($ty:ident, $kind:expr) => {
        impl $ty {
            /// Highest index stored, inclusive.
            pub fn limit(&self) -> u64 {
                self.values.len() as u64 - 1
            }

            /// Checked lookup; `n` outside `1..=limit` is an error rather
            /// than a silent recompute.
            pub fn get(&self, n: u64) -> Result<u64, TableError> {
                if n == 0 || n > self.limit() {
                    return Err(TableError::OutOfRange {
                        n,
                        limit: self.limit(),
                    });
                }
                Ok(self.values[n as usize])
            }

            /// Raw entries, indexable directly by `n` (slot 0 is a sentinel).
            pub fn values(&self) -> &[u64] {
                &self.values
            }

            /// Write this table as a single-record binary file.
            pub fn save(&self, path: &Path) -> Result<(), TableError> {
                let mut w = BufWriter::new(File::create(path)?);
                write_record(&mut w, $kind, &self.values)?;
                w.flush()?;
                Ok(())
            }

            /// Read back a single-record binary file of the matching kind.
            pub fn load(path: &Path) -> Result<Self, TableError> {
                let mut r = BufReader::new(File::open(path)?);
                let (kind, values) = match read_record(&mut r)? {
                    Some(rec) => rec,
                    None => {
                        return Err(TableFormatError::Truncated { section: "header" }.into())
                    }
                };
                if kind != $kind {
                    return Err(TableFormatError::KindMismatch {
                        expected: $kind.name(),
                        found: kind.name(),
                    }
                    .into());
                }
                expect_eof(&mut r)?;
                Ok($ty { values })
            }
        }
    };
}

table_common!(RadicalTable, TableKind::Radical);
table_common!(TotientTable, TableKind::Totient);

/// Build the radical table by multiplicative accumulation: every entry
/// starts at 1; scanning upward, an entry still equal to 1 at `n` means no
/// smaller prime divides `n`, so `n` is prime and multiplies every multiple.
/// One pass, `O(limit · log log limit)` multiplications.
pub fn build_radical_table(limit: u64) -> Result<RadicalTable, TableError> {
    check_limit(limit)?;
    let n = limit as usize;
    let mut values = vec![1u64; n + 1];
    values[0] = 0;
    for i in 2..=n {
        if values[i] == 1 {
            let mut k = i;
            while k <= n {
                values[k] *= i as u64;
                k += i;
            }
        }
    }
    Ok(RadicalTable { values })
}

/// Build the totient table in one sieve pass: entries start at `n`; when an
/// untouched entry reveals a prime `p`, every multiple loses a `1/p`
/// fraction.
pub fn build_totient_table(limit: u64) -> Result<TotientTable, TableError> {
    check_limit(limit)?;
    let n = limit as usize;
    let mut values: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if values[i] == i as u64 {
            let mut k = i;
            while k <= n {
                values[k] -= values[k] / i as u64;
                k += i;
            }
        }
    }
    Ok(TotientTable { values })
}

/// Radical by trial division up to sqrt(n) — the table-independent oracle.
pub fn radical_by_factorization(n: u64) -> u64 {
    assert!(n >= 1, "radical is defined for n >= 1");
    let mut rest = n;
    let mut rad = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            rad *= p;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        rad *= rest;
    }
    rad
}

/// Euler totient by trial-division factorization — oracle, no tables.
pub fn totient_by_factorization(n: u64) -> u64 {
    assert!(n >= 1, "totient is defined for n >= 1");
    let mut rest = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            phi -= phi / p;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        phi -= phi / rest;
    }
    phi
}

/// One or both tables decoded from a multi-record file.
#[derive(Debug)]
pub struct TableSet {
    pub radicals: Option<RadicalTable>,
    pub totients: Option<TotientTable>,
}

/// Write the radical record immediately followed by the totient record.
pub fn write_table_set<W: Write>(
    w: &mut W,
    radicals: &RadicalTable,
    totients: &TotientTable,
) -> Result<(), TableError> {
    write_record(w, TableKind::Radical, &radicals.values)?;
    write_record(w, TableKind::Totient, &totients.values)?;
    Ok(())
}

/// Read every record in the stream; a file may hold one or both kinds.
pub fn read_table_set<R: Read>(r: &mut R) -> Result<TableSet, TableError> {
    let mut set = TableSet {
        radicals: None,
        totients: None,
    };
    while let Some((kind, values)) = read_record(r)? {
        match kind {
            TableKind::Radical => {
                if set.radicals.is_some() {
                    return Err(TableFormatError::DuplicateKind { kind: kind.name() }.into());
                }
                set.radicals = Some(RadicalTable { values });
            }
            TableKind::Totient => {
                if set.totients.is_some() {
                    return Err(TableFormatError::DuplicateKind { kind: kind.name() }.into());
                }
                set.totients = Some(TotientTable { values });
            }
        }
    }
    if set.radicals.is_none() && set.totients.is_none() {
        return Err(TableFormatError::Truncated { section: "header" }.into());
    }
    Ok(set)
}

/// Open and decode a table file from disk.
pub fn load_table_set(path: &Path) -> Result<TableSet, TableError> {
    let mut r = BufReader::new(File::open(path)?);
    read_table_set(&mut r)
}

// Record layout: "ABCT" | version u16 LE | kind u8 | reserved 0x00 |
// limit u64 LE | limit values u64 LE (indices 1..=limit) |
// checksum u64 LE (wrapping sum of the values).
fn write_record<W: Write>(w: &mut W, kind: TableKind, values: &[u64]) -> io::Result<()> {
    let limit = values.len() as u64 - 1;
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[kind as u8, 0x00])?;
    w.write_all(&limit.to_le_bytes())?;
    let mut sum = 0u64;
    for &v in &values[1..] {
        w.write_all(&v.to_le_bytes())?;
        sum = sum.wrapping_add(v);
    }
    w.write_all(&sum.to_le_bytes())?;
    Ok(())
}

/// Read one record, or `None` on clean EOF at a record boundary.
fn read_record<R: Read>(r: &mut R) -> Result<Option<(TableKind, Vec<u64>)>, TableError> {
    let mut magic = [0u8; 4];
    match read_full(r, &mut magic)? {
        0 => return Ok(None),
        4 => {}
        _ => return Err(TableFormatError::Truncated { section: "header" }.into()),
    }
    if magic != MAGIC {
        return Err(TableFormatError::Magic { found: magic }.into());
    }

    let mut header = [0u8; 12]; // version u16, kind, reserved, limit u64
    if read_full(r, &mut header)? < header.len() {
        return Err(TableFormatError::Truncated { section: "header" }.into());
    }
    let version = u16::from_le_bytes(header[0..2].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(TableFormatError::Version {
            expected: FORMAT_VERSION,
            found: version,
        }
        .into());
    }
    let kind = TableKind::from_byte(header[2])
        .ok_or(TableFormatError::Kind { found: header[2] })?;
    if header[3] != 0x00 {
        return Err(TableFormatError::Reserved { found: header[3] }.into());
    }
    let limit = u64::from_le_bytes(header[4..12].try_into().unwrap());
    if limit == 0 || limit > MAX_TABLE_LIMIT {
        return Err(TableFormatError::Limit {
            found: limit,
            cap: MAX_TABLE_LIMIT,
        }
        .into());
    }

    let mut values = Vec::with_capacity(limit as usize + 1);
    values.push(0u64);
    let mut sum = 0u64;
    let mut chunk = vec![0u8; 64 * 1024];
    let mut remaining = limit as usize * 8;
    while remaining > 0 {
        let take = chunk.len().min(remaining);
        if read_full(r, &mut chunk[..take])? < take {
            return Err(TableFormatError::Truncated { section: "values" }.into());
        }
        for bytes in chunk[..take].chunks_exact(8) {
            let v = u64::from_le_bytes(bytes.try_into().unwrap());
            sum = sum.wrapping_add(v);
            values.push(v);
        }
        remaining -= take;
    }

    let mut stored = [0u8; 8];
    if read_full(r, &mut stored)? < 8 {
        return Err(TableFormatError::Truncated { section: "checksum" }.into());
    }
    let stored = u64::from_le_bytes(stored);
    if stored != sum {
        return Err(TableFormatError::Checksum {
            stored,
            computed: sum,
        }
        .into());
    }
    Ok(Some((kind, values)))
}

/// Read until `buf` is full or EOF; returns the number of bytes read.
fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

fn expect_eof<R: Read>(r: &mut R) -> Result<(), TableError> {
    let mut probe = [0u8; 1];
    if read_full(r, &mut probe)? != 0 {
        return Err(TableFormatError::TrailingData.into());
    }
    Ok(())
}
