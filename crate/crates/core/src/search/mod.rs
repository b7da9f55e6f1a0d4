//! Searches for sets of a given size minimizing `max{|A+A|, |A·A|}`.

mod anneal;
mod chart;
mod exhaustive;

use serde::Serialize;

pub use anneal::{anneal_min, AnnealOptions, CHECKPOINT_INTERVAL};
pub use chart::{exponent_chart, write_csv, ChartRow};
pub use exhaustive::{binomial, exhaustive_min, DEFAULT_BUDGET};

use crate::exact::{self, serde_rational, Rational};
use crate::field::{Elem, Field};
use crate::setalg::FSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    Exhaustive,
    Anneal,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::Anneal => "anneal",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRecord {
    pub field: Field,
    pub m: usize,
    pub best_set: FSet,
    /// `max{|A+A|, |A·A|}`.
    pub best_value: u64,
    /// `best_value / m`.
    #[serde(with = "serde_rational")]
    pub k: Rational,
    /// `log(best_value) / log(m)`, for `m >= 2`.
    pub exponent: Option<f64>,
    /// Whether `best_set` passes the admissibility check.
    pub admissible: bool,
    /// Whether the search was restricted to admissible sets.
    pub admissible_only: bool,
    pub method: SearchMethod,
    pub seed: u64,
    pub evaluations: u64,
}

impl SearchRecord {
    pub(crate) fn new(
        best_set: FSet,
        best_value: u64,
        admissible_only: bool,
        method: SearchMethod,
        seed: u64,
        evaluations: u64,
    ) -> SearchRecord {
        let m = best_set.len();
        let admissible = crate::field::admissibility_check(&best_set).map(|r| r.passed).unwrap_or(false);
        SearchRecord {
            field: best_set.field().clone(),
            m,
            k: exact::ratio(best_value, m as u64),
            exponent: (m >= 2).then(|| (best_value as f64).ln() / (m as f64).ln()),
            best_set,
            best_value,
            admissible,
            admissible_only,
            method,
            seed,
            evaluations,
        }
    }
}

/// Counts distinct sums and products with reusable stamp buffers.
pub(crate) struct Evaluator {
    field: Field,
    sums: Vec<u32>,
    products: Vec<u32>,
    stamp: u32,
}

impl Evaluator {
    pub(crate) fn new(field: &Field) -> Evaluator {
        let q = field.order() as usize;
        Evaluator {
            field: field.clone(),
            sums: vec![0; q],
            products: vec![0; q],
            stamp: 0,
        }
    }

    /// `max{|A+A|, |A·A|}`.
    pub(crate) fn value(&mut self, elems: &[Elem]) -> u64 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.sums.fill(0);
            self.products.fill(0);
            self.stamp = 1;
        }
        let (mut s, mut p) = (0u64, 0u64);
        for (i, &a) in elems.iter().enumerate() {
            for &b in &elems[i..] {
                let sum = self.field.add(a, b).0 as usize;
                if self.sums[sum] != self.stamp {
                    self.sums[sum] = self.stamp;
                    s += 1;
                }
                let prod = self.field.mul(a, b).0 as usize;
                if self.products[prod] != self.stamp {
                    self.products[prod] = self.stamp;
                    p += 1;
                }
            }
        }
        s.max(p)
    }
}
