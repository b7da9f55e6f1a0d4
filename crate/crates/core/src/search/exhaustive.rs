use rayon::prelude::*;

use super::{Evaluator, SearchMethod, SearchRecord};
use crate::error::{Error, Result};
use crate::field::{AdmissibilityTable, Elem, Field};
use crate::setalg::FSet;

/// Default cap on candidate evaluations.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        loop {
            let rest = binomial((n - next - 1) as u64, (k - slot - 1) as u64);
            if rank < rest {
                break;
            }
            rank -= rest;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advances to the next `k`-subset of `0..n`; false after the last one.
fn advance(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[pos] += 1;
    for i in pos + 1..k {
        idx[i] = idx[i - 1] + 1;
    }
    true
}

/// Exact minimum of `max{|A+A|, |A·A|}` over `m`-subsets of `F*`.
///
/// Both cardinalities are unchanged by `A -> cA`, and so is admissibility,
/// so only sets containing 1 are enumerated. The lexicographically first
/// minimizer over all of `F*` has smallest element 1, so it is among them.
pub fn exhaustive_min(field: &Field, m: usize, admissible_only: bool, budget: u128) -> Result<SearchRecord> {
    let units = field.order() as usize - 1;
    if m == 0 || m > units {
        return Err(Error::InvalidArgument(format!("m must lie in 1..={units}, got {m}")));
    }
    // the remaining m-1 elements come from F* \ {1}, indices 2..q
    let pool: Vec<Elem> = field.nonzero().filter(|&e| e != Elem::ONE).collect();
    let choose = m - 1;
    let total = binomial(pool.len() as u64, choose as u64);
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    let table = admissible_only.then(|| AdmissibilityTable::new(field));
    let shards = (rayon::current_num_threads() as u128 * 8).min(total).max(1);
    let per_shard = total.div_ceil(shards);
    let best = (0..shards)
        .into_par_iter()
        .map_init(
            || Evaluator::new(field),
            |eval, shard| {
                let start = shard * per_shard;
                let end = (start + per_shard).min(total);
                let mut best: Option<(u64, Vec<Elem>)> = None;
                let mut evaluated = 0u64;
                if start >= end {
                    return (best, evaluated);
                }
                let mut idx = unrank(start, pool.len(), choose);
                let mut elems = vec![Elem::ONE; m];
                for _ in start..end {
                    for (slot, &i) in idx.iter().enumerate() {
                        elems[slot + 1] = pool[i];
                    }
                    let allowed = table.as_ref().is_none_or(|t| t.admits(&elems));
                    if allowed {
                        evaluated += 1;
                        let v = eval.value(&elems);
                        // elements ascend, so comparing index vectors is lexicographic
                        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                            best = Some((v, elems.clone()));
                        }
                    }
                    advance(&mut idx, pool.len());
                }
                (best, evaluated)
            },
        )
        .reduce(
            || (None, 0),
            |(a, ea), (b, eb)| {
                let best = match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some(x), Some(y)) => Some(if (y.0, &y.1) < (x.0, &x.1) { y } else { x }),
                };
                (best, ea + eb)
            },
        );
    let (best, evaluations) = best;
    let Some((value, elems)) = best else {
        return Err(Error::NoAdmissibleSet(m));
    };
    Ok(SearchRecord::new(
        FSet::from_elems(field, elems),
        value,
        admissible_only,
        SearchMethod::Exhaustive,
        0,
        evaluations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unrank_matches_iteration() {
        let (n, k) = (7, 3);
        let mut idx: Vec<usize> = (0..k).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank(rank, n, k), idx);
            rank += 1;
            if !advance(&mut idx, n) {
                break;
            }
        }
        assert_eq!(rank, binomial(7, 3));
    }

    #[test]
    fn f7_triples() {
        let f7 = Field::prime(7).unwrap();
        let r = exhaustive_min(&f7, 3, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.best_value, 5);
        assert_eq!(r.best_set.indices(), vec![1, 2, 3]);
        assert_eq!(r.evaluations, 10);
    }

    #[test]
    fn singletons() {
        let f = Field::prime(11).unwrap();
        let r = exhaustive_min(&f, 1, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.best_value, 1);
        assert_eq!(r.best_set.indices(), vec![1]);
        assert_eq!(r.exponent, None);
    }

    #[test]
    fn admissible_filter_in_f16() {
        let f16 = Field::new(2, 4, None).unwrap();
        let free = exhaustive_min(&f16, 3, false, DEFAULT_BUDGET).unwrap();
        let adm = exhaustive_min(&f16, 3, true, DEFAULT_BUDGET).unwrap();
        assert!(adm.admissible);
        // in characteristic 2 every 3-set has |A+A| = 4, reached by F_4*
        assert_eq!(free.best_value, 4);
        assert!(adm.best_value > free.best_value);
        let f4 = &f16.subfields()[1].elements;
        assert!(!adm.best_set.is_subset(f4));
    }

    #[test]
    fn budget_is_enforced() {
        let f = Field::prime(31).unwrap();
        assert!(matches!(exhaustive_min(&f, 10, false, 1000), Err(Error::BudgetExceeded { .. })));
        assert!(exhaustive_min(&f, 31, false, 1000).is_err());
    }
}
