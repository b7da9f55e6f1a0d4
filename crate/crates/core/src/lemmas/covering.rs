use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, Rational};
use crate::field::Elem;
use crate::setalg::{difference_set, sumset, FSet};

#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    /// Number of elements of `X` that must be covered: `ceil((1-ε)|X|)`.
    pub required: usize,
    #[serde(with = "serde_rational")]
    pub covered_fraction: Rational,
    pub translate_count: usize,
    pub translates: Vec<Elem>,
    /// The covered part of `X`.
    pub covered: FSet,
    /// `min{|X+Y|, |X-Y|} / |Y|`.
    #[serde(with = "serde_rational")]
    pub benchmark: Rational,
    /// `translate_count / benchmark`.
    #[serde(with = "serde_rational")]
    pub measured_c: Rational,
}

fn validate(x: &FSet, y: &FSet, epsilon: &Rational) -> Result<usize> {
    x.same_field(y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyOperand);
    }
    if !exact::is_open_unit(epsilon) {
        return Err(Error::BadEpsilon(epsilon.to_string()));
    }
    Ok(exact::ceil_usize(&((exact::int(1) - epsilon) * exact::int(x.len() as u64))))
}

/// For each candidate shift `t ∈ X - Y` (ascending), the positions in `X`
/// covered by `t + Y`.
fn candidate_covers(x: &FSet, y: &FSet) -> Vec<(Elem, Vec<usize>)> {
    let f = x.field();
    let xs = x.elems();
    let shifts = difference_set(x, y).expect("nonempty operands");
    shifts
        .iter()
        .map(|t| {
            let hits = xs
                .iter()
                .enumerate()
                .filter(|(_, &e)| y.contains(f.sub(e, t)))
                .map(|(i, _)| i)
                .collect();
            (t, hits)
        })
        .collect()
}

/// Greedily picks translates `t + Y` covering the most uncovered elements
/// of `X` until at least `(1-ε)|X|` are covered.
pub fn cover_greedy(x: &FSet, y: &FSet, epsilon: &Rational) -> Result<CoveringReport> {
    let required = validate(x, y, epsilon)?;
    let xs = x.elems();
    let candidates = candidate_covers(x, y);
    let mut covered_flags = vec![false; xs.len()];
    let mut covered_count = 0;
    let mut translates = Vec::new();
    while covered_count < required {
        let (best, gain) = candidates
            .iter()
            .enumerate()
            .map(|(i, (_, hits))| (i, hits.iter().filter(|&&h| !covered_flags[h]).count()))
            // max gain, first (smallest shift) on ties
            .fold((usize::MAX, 0), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        debug_assert!(gain > 0, "every element of X lies in some translate");
        for &h in &candidates[best].1 {
            if !covered_flags[h] {
                covered_flags[h] = true;
                covered_count += 1;
            }
        }
        translates.push(candidates[best].0);
    }
    let covered = FSet::from_elems(
        x.field(),
        xs.iter().zip(&covered_flags).filter(|(_, &c)| c).map(|(&e, _)| e),
    );
    let plus = sumset(x, y)?.len();
    let minus = difference_set(x, y)?.len();
    let benchmark = exact::ratio(plus.min(minus) as u64, y.len() as u64);
    let measured_c = exact::int(translates.len() as u64) / &benchmark;
    Ok(CoveringReport {
        epsilon: epsilon.clone(),
        required,
        covered_fraction: exact::ratio(covered_count as u64, xs.len() as u64),
        translate_count: translates.len(),
        translates,
        covered,
        benchmark,
        measured_c,
    })
}

/// Largest `|X|` accepted by [`cover_min_oracle`].
pub const COVER_ORACLE_LIMIT: usize = 16;

/// Minimum number of translates of `Y` covering at least `(1-ε)|X|`
/// elements of `X`, by breadth-first search over coverage masks.
pub fn cover_min_oracle(x: &FSet, y: &FSet, epsilon: &Rational) -> Result<usize> {
    if x.len() > COVER_ORACLE_LIMIT {
        return Err(Error::TooLarge(format!(
            "|X| = {} exceeds {COVER_ORACLE_LIMIT}",
            x.len()
        )));
    }
    let required = validate(x, y, epsilon)? as u32;
    let mut masks: Vec<u32> = candidate_covers(x, y)
        .into_iter()
        .map(|(_, hits)| hits.iter().fold(0u32, |m, &h| m | 1 << h))
        .collect();
    masks.sort_unstable();
    masks.dedup();
    // drop masks contained in another mask
    let maximal: Vec<u32> = masks
        .iter()
        .copied()
        .filter(|&m| !masks.iter().any(|&o| o != m && o & m == m))
        .collect();
    let mut seen = vec![false; 1usize << x.len()];
    let mut frontier = vec![0u32];
    seen[0] = true;
    for depth in 1.. {
        let mut next = Vec::new();
        for &state in &frontier {
            for &m in &maximal {
                let s = state | m;
                if s.count_ones() >= required {
                    return Ok(depth);
                }
                if !seen[s as usize] {
                    seen[s as usize] = true;
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    unreachable!("the translates jointly cover X")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn set(f: &Field, s: &str) -> FSet {
        FSet::parse(f, s).unwrap()
    }

    #[test]
    fn greedy_interval_example() {
        let f7 = Field::prime(7).unwrap();
        let x = set(&f7, "[0,1,2,3]");
        let y = set(&f7, "[0,1]");
        let r = cover_greedy(&x, &y, &exact::ratio(1, 10)).unwrap();
        assert_eq!(r.translates, vec![Elem(0), Elem(2)]);
        assert_eq!(r.benchmark, exact::ratio(5, 2));
        assert_eq!(r.measured_c, exact::ratio(4, 5));
        assert_eq!(r.covered, x);
        assert_eq!(cover_min_oracle(&x, &y, &exact::ratio(1, 10)).unwrap(), 2);
    }

    #[test]
    fn self_cover_and_singletons() {
        let f7 = Field::prime(7).unwrap();
        let x = set(&f7, "[1,2,4]");
        let r = cover_greedy(&x, &x, &exact::ratio(1, 10)).unwrap();
        assert_eq!(r.translates, vec![Elem(0)]);
        assert!(r.measured_c <= exact::int(1));
        assert_eq!(cover_min_oracle(&x, &x, &exact::ratio(1, 10)).unwrap(), 1);

        let f5 = Field::prime(5).unwrap();
        let full = FSet::full(&f5);
        let zero = set(&f5, "[0]");
        for (eps, want) in [(exact::ratio(1, 10), 5), (exact::ratio(1, 2), 3), (exact::ratio(9, 10), 1)] {
            let r = cover_greedy(&full, &zero, &eps).unwrap();
            assert_eq!(r.translate_count, want);
            assert_eq!(cover_min_oracle(&full, &zero, &eps).unwrap(), want);
        }
    }

    #[test]
    fn oracle_on_spread_set() {
        // no two elements of {0,2,4} differ by ±1 mod 7, so every translate
        // of {0,1} covers at most one of them
        let f7 = Field::prime(7).unwrap();
        let x = set(&f7, "[0,2,4]");
        let y = set(&f7, "[0,1]");
        assert_eq!(cover_min_oracle(&x, &y, &exact::ratio(1, 100)).unwrap(), 3);
    }

    #[test]
    fn errors() {
        let f = Field::prime(37).unwrap();
        let big = FSet::from_indices(&f, 0..17).unwrap();
        let y = set(&f, "[0]");
        assert!(matches!(cover_min_oracle(&big, &y, &exact::ratio(1, 2)), Err(Error::TooLarge(_))));
        assert!(matches!(cover_greedy(&y, &y, &exact::int(1)), Err(Error::BadEpsilon(_))));
        assert_eq!(
            cover_greedy(&set(&f, "[]"), &y, &exact::ratio(1, 2)).unwrap_err(),
            Error::EmptyOperand
        );
    }
}
