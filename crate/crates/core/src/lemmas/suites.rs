//! Exhaustive checks of the lemma oracles over every small subset of a field.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    cover_greedy, cover_min_oracle, generated_subfield, pluennecke_check, pluennecke_refine,
    rudnev_select, COVER_ORACLE_LIMIT,
};
use crate::error::{Error, Result};
use crate::exact;
use crate::field::Field;
use crate::setalg::{sumset, FSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pluennecke,
    Refine,
    Cover,
    Rudnev,
    Subfield,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Pluennecke, Suite::Refine, Suite::Cover, Suite::Rudnev, Suite::Subfield];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pluennecke => "pluennecke",
            Suite::Refine => "refine",
            Suite::Cover => "cover",
            Suite::Rudnev => "rudnev",
            Suite::Subfield => "subfield",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub field: String,
    pub max_size: usize,
    pub cases: u64,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Upper bound on the number of checked instances in a single suite.
pub const SUITE_CASE_LIMIT: u64 = 5_000_000;

/// All nonempty subsets of `field` with at most `max_size` elements, by size
/// and then lexicographically.
pub fn small_subsets(field: &Field, max_size: usize) -> Vec<FSet> {
    let q = field.order() as usize;
    let mut out = Vec::new();
    for size in 1..=max_size.min(q) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(FSet::from_indices(field, idx.iter().map(|&i| i as u64)).expect("in range"));
            // advance to the next combination
            let Some(pos) = (0..size).rev().find(|&i| idx[i] < q - size + i) else {
                break;
            };
            idx[pos] += 1;
            for k in pos + 1..size {
                idx[k] = idx[k - 1] + 1;
            }
        }
    }
    out
}

fn guard(cases: u64) -> Result<()> {
    if cases > SUITE_CASE_LIMIT {
        return Err(Error::TooLarge(format!("{cases} suite cases exceed {SUITE_CASE_LIMIT}")));
    }
    Ok(())
}

fn collect(suite: Suite, field: &Field, max_size: usize, cases: u64, violations: Vec<Vec<String>>) -> SuiteReport {
    let violations: Vec<String> = violations.into_iter().flatten().collect();
    SuiteReport {
        suite,
        field: field.to_string(),
        max_size,
        cases,
        passed: violations.is_empty(),
        violations,
    }
}

pub fn run_suite(suite: Suite, field: &Field, max_size: usize) -> Result<SuiteReport> {
    let sets = small_subsets(field, max_size);
    let c = sets.len() as u64;
    match suite {
        Suite::Pluennecke => {
            guard(c * c + c * c * c)?;
            let v = sets
                .par_iter()
                .map(|x| {
                    let mut bad = Vec::new();
                    for b1 in &sets {
                        let r = pluennecke_check(x, std::slice::from_ref(b1)).expect("valid input");
                        if !r.holds {
                            bad.push(format!("X={x} B={b1}: {} > {}", r.lhs, r.rhs));
                        }
                        for b2 in &sets {
                            let bs = [b1.clone(), b2.clone()];
                            let r = pluennecke_check(x, &bs).expect("valid input");
                            if !r.holds {
                                bad.push(format!("X={x} B={b1},{b2}: {} > {}", r.lhs, r.rhs));
                            }
                        }
                    }
                    bad
                })
                .collect();
            Ok(collect(suite, field, max_size, c * c + c * c * c, v))
        }
        Suite::Refine => {
            let eps = [exact::ratio(1, 10), exact::ratio(1, 3), exact::ratio(1, 2)];
            guard(c * c * eps.len() as u64)?;
            let v = sets
                .par_iter()
                .map(|x| {
                    let mut bad = Vec::new();
                    for b in &sets {
                        let full = sumset(x, b).expect("nonempty").len();
                        for e in &eps {
                            let r = pluennecke_refine(x, std::slice::from_ref(b), e).expect("valid input");
                            let floor = exact::ceil_usize(&((exact::int(1) - e) * exact::int(x.len() as u64)));
                            if !r.subset.is_subset(x) || r.subset.len() < floor || r.sum_size > full {
                                bad.push(format!("X={x} B={b} eps={e}: X'={} |X'+B|={}", r.subset, r.sum_size));
                            }
                        }
                    }
                    bad
                })
                .collect();
            Ok(collect(suite, field, max_size, c * c * eps.len() as u64, v))
        }
        Suite::Cover => {
            if max_size > COVER_ORACLE_LIMIT {
                return Err(Error::TooLarge(format!("cover suite needs max size <= {COVER_ORACLE_LIMIT}")));
            }
            let eps = [exact::ratio(1, 10), exact::ratio(1, 2)];
            guard(c * c * eps.len() as u64)?;
            let v = sets
                .par_iter()
                .map(|x| {
                    let mut bad = Vec::new();
                    for y in &sets {
                        for e in &eps {
                            let g = cover_greedy(x, y, e).expect("valid input");
                            let best = cover_min_oracle(x, y, e).expect("small input");
                            let floor = (exact::int(1) - e) * exact::int(x.len() as u64);
                            let covered = exact::int(g.covered.len() as u64);
                            if g.translate_count < best || covered < floor || g.measured_c <= exact::int(0) {
                                bad.push(format!("X={x} Y={y} eps={e}: greedy {} oracle {best}", g.translate_count));
                            }
                        }
                    }
                    bad
                })
                .collect();
            Ok(collect(suite, field, max_size, c * c * eps.len() as u64, v))
        }
        Suite::Rudnev => {
            let sets: Vec<&FSet> = sets.iter().filter(|s| s.len() >= 2).collect();
            let v = sets
                .par_iter()
                .map(|b| {
                    let mut bad = Vec::new();
                    let s = rudnev_select(b).expect("|B| >= 2");
                    if !s.sum_identity_holds {
                        bad.push(format!("B={b}: {} > {}", s.sum_identity_lhs, s.sum_identity_rhs));
                    }
                    if !s.below_candidate_average {
                        bad.push(format!("B={b}: E(B, r B) = {} above average {}", s.energy, s.candidate_average));
                    }
                    let chk = s.check_subset(b, b).expect("B is its own subset");
                    if !chk.holds {
                        bad.push(format!("B={b}: |B|^4/E = {} > |B + rB| = {}", chk.lhs, chk.rhs));
                    }
                    bad
                })
                .collect();
            Ok(collect(suite, field, max_size, sets.len() as u64, v))
        }
        Suite::Subfield => {
            let sets: Vec<&FSet> = sets.iter().filter(|s| s.iter().any(|e| !e.is_zero())).collect();
            let v = sets
                .par_iter()
                .map(|b| {
                    let mut bad = Vec::new();
                    let w = generated_subfield(b).expect("nonzero generator");
                    if w.generated != w.minimal_subfield(field).elements {
                        bad.push(format!("B={b}: closure {} is not the minimal subfield", w.generated));
                    }
                    match w.replay(field) {
                        Ok(r) if r == w.generated => {}
                        _ => bad.push(format!("B={b}: replay does not reproduce the closure")),
                    }
                    let again = generated_subfield(&w.generated).expect("nonzero generator");
                    if again.generated != w.generated {
                        bad.push(format!("B={b}: closure is not idempotent"));
                    }
                    bad
                })
                .collect();
            Ok(collect(suite, field, max_size, sets.len() as u64, v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration_counts() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(small_subsets(&f7, 3).len(), 7 + 21 + 35);
        assert_eq!(small_subsets(&f7, 10).len(), 127);
        let s = small_subsets(&f7, 2);
        assert_eq!(s[0].indices(), vec![0]);
        assert_eq!(s[7].indices(), vec![0, 1]);
        assert_eq!(s.last().unwrap().indices(), vec![5, 6]);
    }

    #[test]
    fn all_suites_pass_on_f7() {
        let f7 = Field::prime(7).unwrap();
        for suite in Suite::ALL {
            let r = run_suite(suite, &f7, 3).unwrap();
            assert!(r.passed, "{}: {:?}", suite.name(), r.violations);
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn subfield_suite_on_f16() {
        let f16 = Field::new(2, 4, None).unwrap();
        let r = run_suite(Suite::Subfield, &f16, 2).unwrap();
        assert!(r.passed);
        assert_eq!(r.cases, 16 + 120 - 1);
    }
}
