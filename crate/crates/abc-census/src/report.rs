//! Fixed wire formats for census output.
//!
//! CSV carries reals at 12 significant digits in scientific notation so a
//! re-run with identical flags is byte-identical; JSON mirrors the same
//! field names as row objects.

use std::io::{self, Write};

use serde::Serialize;

use crate::census::{CensusRow, Hit};

pub const CENSUS_CSV_HEADER: &str =
    "c,phi,pairs,n_thm1,n_thm2,density1,density2,geo_mean,eq1_ratio";

pub const HITS_CSV_HEADER: &str = "quality,c,a,b,rad_abc";

/// 12 significant digits: one leading digit plus 11 after the point.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn census_csv_line(row: &CensusRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.c,
        row.phi,
        row.pairs,
        row.n_thm1,
        row.n_thm2,
        fmt_real(row.density1),
        fmt_real(row.density2),
        fmt_real(row.geo_mean),
        fmt_real(row.eq1_ratio)
    )
}

pub fn hit_csv_line(hit: &Hit) -> String {
    let d = &hit.decomposition;
    format!(
        "{},{},{},{},{}",
        fmt_real(hit.quality),
        d.c,
        d.a,
        d.b,
        d.rad_abc()
    )
}

pub fn write_census_csv<W: Write>(w: &mut W, rows: &[CensusRow]) -> io::Result<()> {
    writeln!(w, "{CENSUS_CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", census_csv_line(row))?;
    }
    Ok(())
}

pub fn write_hits_csv<W: Write>(w: &mut W, hits: &[Hit]) -> io::Result<()> {
    writeln!(w, "{HITS_CSV_HEADER}")?;
    for hit in hits {
        writeln!(w, "{}", hit_csv_line(hit))?;
    }
    Ok(())
}

/// Streaming `[elem, elem, ...]` writer; elements are serialized as they
/// arrive so a scan never has to buffer its rows.
pub struct JsonArrayWriter<W: Write> {
    w: W,
    any: bool,
}

impl<W: Write> JsonArrayWriter<W> {
    pub fn new(mut w: W) -> io::Result<Self> {
        w.write_all(b"[")?;
        Ok(JsonArrayWriter { w, any: false })
    }

    pub fn push<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        if self.any {
            self.w.write_all(b",")?;
        }
        self.any = true;
        serde_json::to_writer(&mut self.w, value)?;
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.w.write_all(b"]\n")?;
        Ok(self.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{census_row, CensusTables};
    use crate::inequality::Epsilon;

    fn sample_row() -> CensusRow {
        let tables = CensusTables::build(64).unwrap();
        census_row(10, Epsilon::new(1, 2).unwrap(), &tables).unwrap()
    }

    #[test]
    fn real_formatting_is_twelve_significant_digits() {
        assert_eq!(fmt_real(0.5), "5.00000000000e-1");
        assert_eq!(fmt_real(1.0), "1.00000000000e0");
        let x = 79.37253933193772;
        let s = fmt_real(x);
        let back: f64 = s.parse().unwrap();
        assert!((back - x).abs() / x < 1e-11, "{s}");
    }

    #[test]
    fn census_csv_shape() {
        let row = sample_row();
        let line = census_csv_line(&row);
        assert!(line.starts_with("10,4,2,1,2,"));
        assert_eq!(line.split(',').count(), 9);

        let mut buf = Vec::new();
        write_census_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CENSUS_CSV_HEADER);
        assert_eq!(lines.next().unwrap(), line);
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn json_array_layout() {
        let row = sample_row();
        let mut w = JsonArrayWriter::new(Vec::new()).unwrap();
        w.push(&row).unwrap();
        w.push(&row).unwrap();
        let buf = w.finish().unwrap();

        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        let obj = arr[0].as_object().unwrap();
        for field in CENSUS_CSV_HEADER.split(',') {
            assert!(obj.contains_key(field), "missing {field}");
        }
        assert_eq!(obj["c"], 10);
        assert_eq!(obj["n_thm2"], 2);
    }

    #[test]
    fn empty_json_array() {
        let w = JsonArrayWriter::new(Vec::new()).unwrap();
        let buf = w.finish().unwrap();
        assert_eq!(buf, b"[]\n");
    }
}
