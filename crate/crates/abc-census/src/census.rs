//! Per-`c` aggregation and deterministic range scans.
//!
//! A `CensusRow` folds the full split stream of one `c`: the exact counts
//! `N(c)` and `N₁(c)`, their densities against `phi(c)/2`, the geometric
//! mean `G(c)` of `R(a·b·c)` over all splits (a log-sum, never an exact
//! product), and the ratio `G(c) / (R(c)^(1-ε) · c²)` whose range minimum
//! is the empirical κ_ε envelope.
//!
//! Range scans split `[c_min, c_max]` into fixed-size blocks folded by a
//! small worker pool; a bounded sequencer reorders block results so rows
//! are always emitted in ascending `c`, bit-identical for any worker count.

use std::collections::{BTreeMap, VecDeque};
use std::io;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;
use std::thread;

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{enumerate_decompositions, Decomposition, DomainError};
use crate::inequality::{
    exact_thm1, exact_thm2, filter_thm1_from_logs, filter_thm2_from_logs, Epsilon,
    FilterVerdict,
};
use crate::tables::{
    build_radical_table, build_totient_table, RadicalTable, TableError, TotientTable,
};

/// Window width for rolling density means.
pub const ROLLING_WINDOW: usize = 100;

/// Fixed block width of the parallel scan; constant so that output is
/// independent of the worker count.
const BLOCK: u64 = 64;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("empty range: c_min {c_min} > c_max {c_max}")]
    EmptyRange { c_min: u64, c_max: u64 },
    #[error("radical table limit {radical_limit} != totient table limit {totient_limit}")]
    LimitMismatch {
        radical_limit: u64,
        totient_limit: u64,
    },
    #[error("quality threshold must be at least 1, got {0}")]
    ThresholdTooLow(f64),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

/// Radical and totient tables over the same range, plus the precomputed
/// `ln R(n)` array the scan hot path reads instead of calling `ln` per
/// split. Roughly 24 bytes per index all told.
pub struct CensusTables {
    radicals: RadicalTable,
    totients: TotientTable,
    ln_rad: Vec<f64>,
}

impl CensusTables {
    /// Sieve both tables up to `limit`.
    pub fn build(limit: u64) -> Result<Self, TableError> {
        let radicals = build_radical_table(limit)?;
        let totients = build_totient_table(limit)?;
        Ok(Self::assemble(radicals, totients))
    }

    /// Wrap existing tables; their limits must agree.
    pub fn from_tables(
        radicals: RadicalTable,
        totients: TotientTable,
    ) -> Result<Self, CensusError> {
        if radicals.limit() != totients.limit() {
            return Err(CensusError::LimitMismatch {
                radical_limit: radicals.limit(),
                totient_limit: totients.limit(),
            });
        }
        Ok(Self::assemble(radicals, totients))
    }

    fn assemble(radicals: RadicalTable, totients: TotientTable) -> Self {
        let mut ln_rad = Vec::with_capacity(radicals.values().len());
        ln_rad.push(0.0);
        ln_rad.extend(radicals.values()[1..].iter().map(|&r| (r as f64).ln()));
        CensusTables {
            radicals,
            totients,
            ln_rad,
        }
    }

    pub fn limit(&self) -> u64 {
        self.radicals.limit()
    }

    pub fn radicals(&self) -> &RadicalTable {
        &self.radicals
    }

    pub fn totients(&self) -> &TotientTable {
        &self.totients
    }
}

/// Aggregate over every split of one `c`.
///
/// Field order is the CSV column order. `n_thm1` may be zero: small `c`
/// with large ε can fail the first inequality on every split, and such
/// rows are reported rather than suppressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusRow {
    pub c: u64,
    pub phi: u64,
    pub pairs: u64,
    pub n_thm1: u64,
    pub n_thm2: u64,
    pub density1: f64,
    pub density2: f64,
    pub geo_mean: f64,
    pub eq1_ratio: f64,
}

/// Empirical envelope for the constant κ_ε over a scanned range: the
/// inequality `κ · R(c)^(1-ε) · c² < G(c)` holds across the range for
/// every `κ < min_ratio` and fails at `argmin_c` for any larger κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaEstimate {
    pub eps: Epsilon,
    pub c_min: u64,
    pub c_max: u64,
    pub min_ratio: f64,
    pub argmin_c: u64,
}

/// A split whose quality exceeds a reporting threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hit {
    pub quality: f64,
    #[serde(flatten)]
    pub decomposition: Decomposition,
}

/// One sample of the rolling-mean density curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub c: u64,
    pub mean_density1: f64,
}

fn check_range(c_min: u64, c_max: u64, tables: &CensusTables) -> Result<(), CensusError> {
    if c_min < 3 {
        return Err(DomainError::CTooSmall(c_min).into());
    }
    if c_min > c_max {
        return Err(CensusError::EmptyRange { c_min, c_max });
    }
    if c_max > tables.limit() {
        return Err(DomainError::TableTooSmall {
            c: c_max,
            limit: tables.limit(),
        }
        .into());
    }
    Ok(())
}

/// Fold the full split stream of `c` into a row. Exact counts; log-sum
/// statistics.
pub fn census_row(c: u64, eps: Epsilon, tables: &CensusTables) -> Result<CensusRow, CensusError> {
    check_range(c, c, tables)?;
    Ok(census_row_unchecked(c, eps, tables))
}

fn census_row_unchecked(c: u64, eps: Epsilon, tables: &CensusTables) -> CensusRow {
    let ln = &tables.ln_rad;
    let ln_c = (c as f64).ln();
    let ln_rc = ln[c as usize];
    let phi = tables.totients.values()[c as usize];
    let pairs = phi / 2;

    let mut n_thm1 = 0u64;
    let mut n_thm2 = 0u64;
    // Neumaier-compensated sum of ln R(a·b·c) over the splits.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;

    for d in enumerate_decompositions(c, &tables.radicals).expect("range checked") {
        let ln_rab = ln[d.a as usize] + ln[d.b as usize];
        let ln_rabc = ln_rab + ln_rc;
        debug_assert!(
            d.rad_abc() < d.rad_c as u128 * c as u128 * c as u128,
            "radical product bound violated at ({}, {}, {c})",
            d.a,
            d.b
        );

        let t1 = match filter_thm1_from_logs(ln_c, ln_rc, ln_rab, eps) {
            FilterVerdict::Holds => true,
            FilterVerdict::Fails => false,
            FilterVerdict::Ambiguous => exact_thm1(&d, eps),
        };
        if t1 {
            n_thm1 += 1;
        }
        let t2 = match filter_thm2_from_logs(ln_c, ln_rabc, eps) {
            FilterVerdict::Holds => true,
            FilterVerdict::Fails => false,
            FilterVerdict::Ambiguous => exact_thm2(&d, eps),
        };
        if t2 {
            n_thm2 += 1;
        }
        debug_assert!(!t1 || t2, "first inequality must imply the abc bound");

        let t = sum + ln_rabc;
        comp += if sum.abs() >= ln_rabc.abs() {
            (sum - t) + ln_rabc
        } else {
            (ln_rabc - t) + sum
        };
        sum = t;
    }
    let log_sum = sum + comp;

    let geo_mean = (log_sum * (2.0 / phi as f64)).exp();
    let denom = ((1.0 - eps.as_f64()) * ln_rc + 2.0 * ln_c).exp();
    CensusRow {
        c,
        phi,
        pairs,
        n_thm1,
        n_thm2,
        density1: (2 * n_thm1) as f64 / phi as f64,
        density2: (2 * n_thm2) as f64 / phi as f64,
        geo_mean,
        eq1_ratio: geo_mean / denom,
    }
}

/// Parallel block engine: `per_c` runs on a pool, `sink` sees results in
/// ascending `c` regardless of scheduling. In-flight blocks are bounded by
/// the channel capacity, so memory stays proportional to the worker count.
fn par_scan<T, P, S>(
    c_min: u64,
    c_max: u64,
    workers: usize,
    per_c: P,
    mut sink: S,
) -> io::Result<()>
where
    T: Send,
    P: Fn(u64) -> T + Sync,
    S: FnMut(T) -> io::Result<()>,
{
    let n_blocks = (c_max - c_min) / BLOCK + 1;
    let next_block = AtomicU64::new(0);
    let per_c = &per_c;
    let next_block = &next_block;

    thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<(u64, Vec<T>)>(workers * 4);
        for _ in 0..workers {
            let tx = tx.clone();
            scope.spawn(move || loop {
                let b = next_block.fetch_add(1, Ordering::Relaxed);
                if b >= n_blocks {
                    return;
                }
                let start = c_min + b * BLOCK;
                let end = (start + (BLOCK - 1)).min(c_max);
                let items: Vec<T> = (start..=end).map(per_c).collect();
                if tx.send((b, items)).is_err() {
                    // Consumer bailed; unblock and exit.
                    return;
                }
            });
        }
        drop(tx);

        let mut pending: BTreeMap<u64, Vec<T>> = BTreeMap::new();
        let mut next_emit = 0u64;
        for (b, items) in rx {
            pending.insert(b, items);
            while let Some(items) = pending.remove(&next_emit) {
                for item in items {
                    sink(item)?;
                }
                next_emit += 1;
            }
        }
        debug_assert!(pending.is_empty());
        Ok(())
    })
}

/// Stream one row per `c` over `[c_min, c_max]` in ascending order.
/// Output is identical across runs and worker counts.
pub fn scan_range<F>(
    c_min: u64,
    c_max: u64,
    eps: Epsilon,
    tables: &CensusTables,
    workers: usize,
    mut sink: F,
) -> Result<(), CensusError>
where
    F: FnMut(&CensusRow) -> io::Result<()>,
{
    check_range(c_min, c_max, tables)?;
    if workers <= 1 {
        for c in c_min..=c_max {
            sink(&census_row_unchecked(c, eps, tables))?;
        }
        return Ok(());
    }
    par_scan(
        c_min,
        c_max,
        workers,
        |c| census_row_unchecked(c, eps, tables),
        |row| sink(&row),
    )?;
    Ok(())
}

/// Collect a scan into memory; convenience for small ranges.
pub fn collect_range(
    c_min: u64,
    c_max: u64,
    eps: Epsilon,
    tables: &CensusTables,
    workers: usize,
) -> Result<Vec<CensusRow>, CensusError> {
    let mut rows = Vec::with_capacity((c_max.saturating_sub(c_min) + 1) as usize);
    scan_range(c_min, c_max, eps, tables, workers, |row| {
        rows.push(*row);
        Ok(())
    })?;
    Ok(rows)
}

/// Minimum of `eq1_ratio` over the range and where it is attained. Ties go
/// to the smallest `c`.
pub fn estimate_kappa(
    c_min: u64,
    c_max: u64,
    eps: Epsilon,
    tables: &CensusTables,
    workers: usize,
) -> Result<KappaEstimate, CensusError> {
    let mut min_ratio = f64::INFINITY;
    let mut argmin_c = 0u64;
    scan_range(c_min, c_max, eps, tables, workers, |row| {
        if row.eq1_ratio < min_ratio {
            min_ratio = row.eq1_ratio;
            argmin_c = row.c;
        }
        Ok(())
    })?;
    Ok(KappaEstimate {
        eps,
        c_min,
        c_max,
        min_ratio,
        argmin_c,
    })
}

/// Every split in the range with `log c / log R(abc) > threshold`, sorted
/// by quality descending, then `c`, then `a`.
pub fn find_hits(
    c_min: u64,
    c_max: u64,
    threshold: f64,
    tables: &CensusTables,
    workers: usize,
) -> Result<Vec<Hit>, CensusError> {
    if threshold.is_nan() || threshold < 1.0 {
        return Err(CensusError::ThresholdTooLow(threshold));
    }
    check_range(c_min, c_max, tables)?;

    let ln = &tables.ln_rad;
    let per_c = |c: u64| -> Vec<Hit> {
        let ln_c = (c as f64).ln();
        let ln_rc = ln[c as usize];
        let mut found = Vec::new();
        for d in enumerate_decompositions(c, &tables.radicals).expect("range checked") {
            let quality = ln_c / ((ln[d.a as usize] + ln[d.b as usize]) + ln_rc);
            if quality > threshold {
                found.push(Hit {
                    quality,
                    decomposition: d,
                });
            }
        }
        found
    };

    let mut hits = Vec::new();
    if workers <= 1 {
        for c in c_min..=c_max {
            hits.extend(per_c(c));
        }
    } else {
        par_scan(c_min, c_max, workers, per_c, |batch| {
            hits.extend(batch);
            Ok(())
        })?;
    }

    hits.sort_by(|x, y| {
        y.quality
            .total_cmp(&x.quality)
            .then(x.decomposition.c.cmp(&y.decomposition.c))
            .then(x.decomposition.a.cmp(&y.decomposition.a))
    });
    Ok(hits)
}

/// Rolling mean of `density1` over trailing windows of `ROLLING_WINDOW`
/// consecutive `c`; one point per scanned `c`. Raw trend data — no
/// convergence claim is attached.
pub fn density1_rolling_mean(
    c_min: u64,
    c_max: u64,
    eps: Epsilon,
    tables: &CensusTables,
    workers: usize,
) -> Result<Vec<DensityPoint>, CensusError> {
    let mut points = Vec::with_capacity((c_max.saturating_sub(c_min) + 1) as usize);
    let mut window: VecDeque<f64> = VecDeque::with_capacity(ROLLING_WINDOW);
    scan_range(c_min, c_max, eps, tables, workers, |row| {
        if window.len() == ROLLING_WINDOW {
            window.pop_front();
        }
        window.push_back(row.density1);
        let mean = window.iter().sum::<f64>() / window.len() as f64;
        points.push(DensityPoint {
            c: row.c,
            mean_density1: mean,
        });
        Ok(())
    })?;
    Ok(points)
}
