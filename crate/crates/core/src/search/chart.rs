use std::io::Write;

use serde::Serialize;

use super::SearchRecord;
use crate::error::{Error, Result};

/// One line of the exponent chart; also the CSV schema for search output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartRow {
    pub field: String,
    pub p: u32,
    pub n: u32,
    pub m: usize,
    pub method: String,
    pub seed: u64,
    pub best_value: u64,
    #[serde(rename = "K_num")]
    pub k_num: String,
    #[serde(rename = "K_den")]
    pub k_den: String,
    pub exponent: Option<f64>,
    /// `m^{12/11} / (log2 m)^{5/11}` for `m >= 2`.
    pub benchmark_12_11: Option<f64>,
    pub admissible: bool,
    pub evaluations: u64,
}

pub fn benchmark_12_11(m: usize) -> Option<f64> {
    (m >= 2).then(|| {
        let x = m as f64;
        x.powf(12.0 / 11.0) / x.log2().powf(5.0 / 11.0)
    })
}

impl From<&SearchRecord> for ChartRow {
    fn from(r: &SearchRecord) -> ChartRow {
        ChartRow {
            field: r.field.to_string(),
            p: r.field.p(),
            n: r.field.n(),
            m: r.m,
            method: r.method.as_str().to_string(),
            seed: r.seed,
            best_value: r.best_value,
            k_num: r.k.numer().to_string(),
            k_den: r.k.denom().to_string(),
            exponent: r.exponent,
            benchmark_12_11: benchmark_12_11(r.m),
            admissible: r.admissible,
            evaluations: r.evaluations,
        }
    }
}

/// Rows sorted by field order and then `m`; remaining ties keep input order.
pub fn exponent_chart(records: &[SearchRecord]) -> Result<Vec<ChartRow>> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let mut keyed: Vec<(u32, usize, ChartRow)> = records.iter().map(|r| (r.field.order(), r.m, r.into())).collect();
    keyed.sort_by_key(|(order, m, _)| (*order, *m));
    Ok(keyed.into_iter().map(|(_, _, row)| row).collect())
}

pub fn write_csv<W: Write>(rows: &[ChartRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::search::{exhaustive_min, DEFAULT_BUDGET};

    #[test]
    fn f7_row() {
        let f7 = Field::prime(7).unwrap();
        let r = exhaustive_min(&f7, 3, false, DEFAULT_BUDGET).unwrap();
        let rows = exponent_chart(&[r]).unwrap();
        let row = &rows[0];
        assert!((row.exponent.unwrap() - 5f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((row.benchmark_12_11.unwrap() - 2.69).abs() < 0.01);
        assert_eq!((row.k_num.as_str(), row.k_den.as_str()), ("5", "3"));
        assert_eq!(benchmark_12_11(2), Some(2f64.powf(12.0 / 11.0)));
    }

    #[test]
    fn sorted_by_order_then_size() {
        let f7 = Field::prime(7).unwrap();
        let f5 = Field::prime(5).unwrap();
        let recs = vec![
            exhaustive_min(&f7, 3, false, DEFAULT_BUDGET).unwrap(),
            exhaustive_min(&f7, 2, false, DEFAULT_BUDGET).unwrap(),
            exhaustive_min(&f5, 2, false, DEFAULT_BUDGET).unwrap(),
        ];
        let rows = exponent_chart(&recs).unwrap();
        let keys: Vec<(u32, usize)> = rows.iter().map(|r| (r.p, r.m)).collect();
        assert_eq!(keys, vec![(5, 2), (7, 2), (7, 3)]);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "field,p,n,m,method,seed,best_value,K_num,K_den,exponent,benchmark_12_11,admissible,evaluations\n"
        ));
        assert_eq!(exponent_chart(&[]).unwrap_err(), Error::Empty);
    }
}
