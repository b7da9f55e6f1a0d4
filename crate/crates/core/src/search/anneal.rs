use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, SearchMethod, SearchRecord};
use crate::error::{Error, Result};
use crate::field::{AdmissibilityTable, Elem, Field};
use crate::setalg::FSet;

/// Steps between full recomputations of the incremental counts.
pub const CHECKPOINT_INTERVAL: u64 = 1 << 10;

/// Attempts at drawing an admissible starting set.
const START_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct AnnealOptions {
    pub iters: u64,
    pub seed: u64,
    pub admissible_only: bool,
    pub start_temperature: f64,
    pub end_temperature: f64,
}

impl AnnealOptions {
    pub fn new(iters: u64, seed: u64, admissible_only: bool) -> AnnealOptions {
        AnnealOptions {
            iters,
            seed,
            admissible_only,
            start_temperature: 2.0,
            end_temperature: 0.05,
        }
    }
}

/// Representation counts of every sum and product over ordered pairs of
/// the current set, updated in `O(m)` per swap.
struct Counts {
    field: Field,
    sums: Vec<u32>,
    products: Vec<u32>,
    distinct_sums: u64,
    distinct_products: u64,
}

impl Counts {
    fn new(field: &Field, elems: &[Elem]) -> Counts {
        let q = field.order() as usize;
        let mut c = Counts {
            field: field.clone(),
            sums: vec![0; q],
            products: vec![0; q],
            distinct_sums: 0,
            distinct_products: 0,
        };
        for &a in elems {
            for &b in elems {
                c.bump(a, b, true);
            }
        }
        c
    }

    fn bump(&mut self, a: Elem, b: Elem, up: bool) {
        let s = self.field.add(a, b).0 as usize;
        let p = self.field.mul(a, b).0 as usize;
        for (slot, distinct) in [(&mut self.sums[s], &mut self.distinct_sums), (&mut self.products[p], &mut self.distinct_products)] {
            if up {
                *slot += 1;
                if *slot == 1 {
                    *distinct += 1;
                }
            } else {
                *slot -= 1;
                if *slot == 0 {
                    *distinct -= 1;
                }
            }
        }
    }

    /// Replaces `out` by `inp`; `rest` is the set without `out`.
    fn swap(&mut self, rest: &[Elem], out: Elem, inp: Elem) {
        for &a in rest {
            self.bump(out, a, false);
            self.bump(a, out, false);
        }
        self.bump(out, out, false);
        for &a in rest {
            self.bump(inp, a, true);
            self.bump(a, inp, true);
        }
        self.bump(inp, inp, true);
    }

    fn value(&self) -> u64 {
        self.distinct_sums.max(self.distinct_products)
    }
}

/// Simulated annealing over `m`-subsets of `F*` with single-element swaps
/// and geometric cooling. Deterministic for a given seed. Every iteration
/// proposes one swap; proposals rejected by the admissibility filter are
/// not evaluated, so `evaluations` is `iters + 1` without the filter.
pub fn anneal_min(field: &Field, m: usize, options: &AnnealOptions) -> Result<SearchRecord> {
    let units: Vec<Elem> = field.nonzero().collect();
    if m == 0 || m > units.len() {
        return Err(Error::InvalidArgument(format!("m must lie in 1..={}, got {m}", units.len())));
    }
    if options.iters == 0 {
        return Err(Error::InvalidArgument("iters must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let table = options.admissible_only.then(|| AdmissibilityTable::new(field));
    let admits = |elems: &[Elem]| table.as_ref().is_none_or(|t| t.admits(elems));

    let mut current: Vec<Elem> = Vec::new();
    for _ in 0..START_ATTEMPTS {
        current = units.choose_multiple(&mut rng, m).copied().collect();
        if admits(&current) {
            break;
        }
        current.clear();
    }
    if current.is_empty() {
        return Err(Error::NoAdmissibleSet(m));
    }
    let mut member = vec![false; field.order() as usize];
    for e in &current {
        member[e.0 as usize] = true;
    }
    let mut counts = Counts::new(field, &current);
    let mut value = counts.value();
    let mut evaluations = 1u64;
    let mut best = (value, sorted(&current));
    let mut checker = Evaluator::new(field);

    let outside = units.len() - m;
    let cooling = (options.end_temperature / options.start_temperature).powf(1.0 / options.iters as f64);
    let mut temperature = options.start_temperature;
    for step in 1..=options.iters {
        if outside > 0 {
            let slot = rng.gen_range(0..m);
            let inp = loop {
                let e = units[rng.gen_range(0..units.len())];
                if !member[e.0 as usize] {
                    break e;
                }
            };
            let out = current[slot];
            current[slot] = inp;
            if admits(&current) {
                let rest: Vec<Elem> = current.iter().copied().filter(|&e| e != inp).collect();
                counts.swap(&rest, out, inp);
                let proposed = counts.value();
                evaluations += 1;
                let delta = proposed as f64 - value as f64;
                let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
                if accept {
                    member[out.0 as usize] = false;
                    member[inp.0 as usize] = true;
                    value = proposed;
                    let candidate = sorted(&current);
                    if (value, &candidate) < (best.0, &best.1) {
                        best = (value, candidate);
                    }
                } else {
                    counts.swap(&rest, inp, out);
                    current[slot] = out;
                }
            } else {
                current[slot] = out;
            }
        } else {
            // m = |F*|: the only candidate is F* itself
            evaluations += 1;
        }
        if step % CHECKPOINT_INTERVAL == 0 {
            let fresh = Counts::new(field, &current);
            assert_eq!(fresh.sums, counts.sums, "incremental sum counts drifted");
            assert_eq!(fresh.products, counts.products, "incremental product counts drifted");
            assert_eq!(checker.value(&current), value);
            counts = fresh;
        }
        temperature *= cooling;
    }
    Ok(SearchRecord::new(
        FSet::from_elems(field, best.1),
        best.0,
        options.admissible_only,
        SearchMethod::Anneal,
        options.seed,
        evaluations,
    ))
}

fn sorted(elems: &[Elem]) -> Vec<Elem> {
    let mut v = elems.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::exhaustive_min;

    #[test]
    fn matches_exhaustive_on_f7() {
        let f7 = Field::prime(7).unwrap();
        for seed in 0..5 {
            let r = anneal_min(&f7, 3, &AnnealOptions::new(1000, seed, false)).unwrap();
            assert_eq!(r.best_value, 5);
            assert_eq!(r.evaluations, 1001);
        }
    }

    #[test]
    fn reproducible() {
        let f = Field::new(2, 6, None).unwrap();
        let opts = AnnealOptions::new(3000, 7, false);
        let a = anneal_min(&f, 8, &opts).unwrap();
        let b = anneal_min(&f, 8, &opts).unwrap();
        assert_eq!(a.best_set, b.best_set);
        assert_eq!(a.evaluations, 3001);
        assert_eq!(a.method, SearchMethod::Anneal);
    }

    #[test]
    fn never_beats_the_exact_minimum() {
        let f = Field::prime(13).unwrap();
        let exact = exhaustive_min(&f, 4, false, u128::MAX).unwrap();
        for seed in 0..3 {
            let r = anneal_min(&f, 4, &AnnealOptions::new(500, seed, false)).unwrap();
            assert!(r.best_value >= exact.best_value);
        }
    }

    #[test]
    fn whole_group() {
        let f5 = Field::prime(5).unwrap();
        let r = anneal_min(&f5, 4, &AnnealOptions::new(3, 0, false)).unwrap();
        assert_eq!(r.best_set, FSet::units(&f5));
        assert_eq!(r.evaluations, 4);
    }
}
