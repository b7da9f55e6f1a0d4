use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::dyadic::PointSet;
use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, Rational};
use crate::field::Elem;
use crate::setalg::FSet;

/// A popular column `x0` and row `y0` of the point set, with the large
/// subset `Ã ⊆ A_{x0}` whose slope fibers meet `B_{y0}` heavily.
///
/// Every set is stored after dividing by `x0`, so that `x0` becomes 1 and
/// `A_{x0}` becomes a set of slopes. `x0` and `y0` keep their original
/// values; `scale` is `1/x0`.
#[derive(Debug, Clone, Serialize)]
pub struct PopularPair {
    pub x0: Elem,
    pub y0: Elem,
    pub scale: Elem,
    /// `y0/x0`.
    pub y0_normalized: Elem,
    pub column: FSet,
    pub row: FSet,
    pub a_tilde: FSet,
    /// `z -> P_{z} ∩ B_{y0}` for `z ∈ Ã`.
    pub a_tilde_fibers: BTreeMap<Elem, FSet>,
    /// `min(|A_{x0}|, |B_{y0}|) |A| / (LN)`.
    #[serde(with = "serde_rational")]
    pub measured_c1: Rational,
    /// `|Ã| |A|^3 / (LM)`.
    #[serde(with = "serde_rational")]
    pub measured_c2: Rational,
    /// `min_z |Ã_z| |A|^4 / (LMN)`.
    #[serde(with = "serde_rational")]
    pub measured_c3: Rational,
    /// Set when `LN/(2|A|) < 1` and the popularity floor was relaxed to 1.
    pub degenerate_scale: bool,
}

/// The sizes the pair constants are measured against.
#[derive(Debug, Clone, Copy)]
pub struct Scale {
    pub set_size: u64,
    pub lines: u64,
    pub floor: u64,
    pub mass: u64,
}

struct Candidate {
    score: Rational,
    key: (u32, Vec<u32>, Vec<u32>, u32),
    pair: PopularPair,
}

/// Sorted indices of `s / x`.
fn normalized_indices(s: &FSet, inv: Elem) -> Vec<u32> {
    let f = s.field();
    let mut v: Vec<u32> = s.iter().map(|e| f.mul(e, inv).0).collect();
    v.sort_unstable();
    v
}

/// Searches every `(x0, y0)` whose column and row clear `LN/(2|A|)`. For
/// each, `Ã(t) = {z ∈ A_{x0} : |P_{z/x0} ∩ B_{y0}| >= t}` is scored by
/// `min(c2, c3)` over thresholds `t`, and the best pair wins. Ties go to
/// the smallest dilation-invariant key, so `trace(cA)` picks the dilated
/// pair. Pairs with `|Ã| < 2` or `|B_{y0}| < 2` are skipped since the case
/// analysis needs both quotient sets.
pub fn popular_pair(points: &PointSet, reference: &FSet, scale: Scale) -> Result<PopularPair> {
    if points.is_empty() {
        return Err(Error::NoPopularPair);
    }
    let f = reference.field();
    let Scale { set_size, lines, floor, mass } = scale;
    let popularity = exact::ratio(lines * floor, 2 * set_size);
    let degenerate = popularity < exact::int(1);
    let threshold = if degenerate { exact::int(1) } else { popularity };
    let abscissae: Vec<Elem> = {
        let mut v: Vec<Elem> = points.points.iter().map(|p| p.0).collect();
        v.dedup();
        v
    };
    let ordinates = FSet::from_elems(f, points.points.iter().map(|p| p.1));
    let c1_den = exact::int(lines * floor);
    let c2_den = exact::int(lines * mass);
    let c3_den = exact::int(lines * mass * floor);
    let n3 = exact::int(set_size.pow(3));
    let n4 = exact::int(set_size.pow(4));

    let best = abscissae
        .par_iter()
        .flat_map_iter(|&x0| {
            let column = points.column(x0);
            let inv = f.inv(x0).expect("points avoid zero");
            let scaled_ref = normalized_indices(reference, inv);
            let mut found = Vec::new();
            if exact::int(column.len() as u64) < threshold {
                return found;
            }
            for y0 in ordinates.iter() {
                let row = points.row(y0);
                if exact::int(row.len() as u64) < threshold || row.len() < 2 {
                    continue;
                }
                let fibers: Vec<(Elem, FSet)> = column
                    .iter()
                    .map(|z| {
                        let slope = f.mul(z, inv);
                        let fiber = points.fibers.get(&slope).expect("z/x0 is a selected slope");
                        (z, fiber.intersection(&row))
                    })
                    .collect();
                let mut levels: Vec<usize> = fibers.iter().map(|(_, s)| s.len()).filter(|&l| l > 0).collect();
                levels.sort_unstable();
                levels.dedup();
                for &t in &levels {
                    let chosen: Vec<&(Elem, FSet)> = fibers.iter().filter(|(_, s)| s.len() >= t).collect();
                    if chosen.len() < 2 {
                        continue;
                    }
                    let a_tilde = FSet::from_elems(f, chosen.iter().map(|(z, _)| *z));
                    let c2 = exact::int(a_tilde.len() as u64) * &n3 / &c2_den;
                    let c3 = exact::int(t as u64) * &n4 / &c3_den;
                    let c1 = exact::int(column.len().min(row.len()) as u64) * exact::int(set_size) / &c1_den;
                    let score = c2.clone().min(c3.clone());
                    let key = (f.mul(y0, inv).0, normalized_indices(&a_tilde, inv), scaled_ref.clone(), x0.0);
                    let scale_set = |s: &FSet| s.map(|e| f.mul(e, inv));
                    let pair = PopularPair {
                        x0,
                        y0,
                        scale: inv,
                        y0_normalized: f.mul(y0, inv),
                        column: scale_set(&column),
                        row: scale_set(&row),
                        a_tilde: scale_set(&a_tilde),
                        a_tilde_fibers: chosen.iter().map(|(z, s)| (f.mul(*z, inv), scale_set(s))).collect(),
                        measured_c1: c1,
                        measured_c2: c2,
                        measured_c3: c3,
                        degenerate_scale: degenerate,
                    };
                    found.push(Candidate { score, key, pair });
                }
            }
            found
        })
        .reduce_with(|a, b| {
            // higher score, then smaller key
            if b.score > a.score || (b.score == a.score && b.key < a.key) {
                b
            } else {
                a
            }
        });
    best.map(|c| c.pair).ok_or_else(|| {
        Error::TooSmall("no popular pair has |Ã| >= 2 and |B_y0| >= 2".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::tracer::dyadic::dyadic_select;

    fn scale_of(a: &FSet) -> (PointSet, Scale) {
        let (d, p) = dyadic_select(a).unwrap();
        let s = Scale { set_size: a.len() as u64, lines: d.lines, floor: d.floor, mass: d.mass };
        (p, s)
    }

    #[test]
    fn subgroup_pair_in_f7() {
        let f7 = Field::prime(7).unwrap();
        let a = FSet::parse(&f7, "[1,2,4]").unwrap();
        let (p, s) = scale_of(&a);
        let pair = popular_pair(&p, &a, s).unwrap();
        assert_eq!(pair.x0, Elem(1));
        assert_eq!(pair.y0, Elem(1));
        assert_eq!(pair.a_tilde, a);
        assert!(pair.a_tilde.is_subset(&pair.column));
        assert!(pair.column.is_subset(&p.slopes));
        for fiber in pair.a_tilde_fibers.values() {
            assert!(fiber.is_subset(&pair.row));
        }
        assert!(!pair.degenerate_scale);
    }

    #[test]
    fn single_line_is_too_small() {
        let f5 = Field::prime(5).unwrap();
        let a = FSet::parse(&f5, "[1,2]").unwrap();
        let (p, s) = scale_of(&a);
        assert!(matches!(popular_pair(&p, &a, s), Err(Error::TooSmall(_))));
    }

    #[test]
    fn dilated_input_gives_the_same_normalized_pair() {
        let f = Field::prime(13).unwrap();
        let a = FSet::parse(&f, "[1,2,3,4,6]").unwrap();
        let (p, s) = scale_of(&a);
        let base = popular_pair(&p, &a, s).unwrap();
        for c in f.nonzero() {
            let ca = crate::setalg::dilate(c, &a).unwrap();
            let (pc, sc) = scale_of(&ca);
            let other = popular_pair(&pc, &ca, sc).unwrap();
            assert_eq!(other.a_tilde, base.a_tilde);
            assert_eq!(other.row, base.row);
            assert_eq!(other.y0_normalized, base.y0_normalized);
            assert_eq!(other.measured_c2, base.measured_c2);
        }
    }
}
