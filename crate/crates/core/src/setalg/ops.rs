use serde::{Deserialize, Serialize};

use super::FSet;
use crate::error::{Error, Result};
use crate::field::Elem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineKind {
    Sum,
    Difference,
    Product,
    Ratio,
}

/// `A + B`, `A - B`, `A·B` or `A:B`. Zero denominators are skipped for the
/// ratio set.
pub fn combine(kind: CombineKind, a: &FSet, b: &FSet) -> Result<FSet> {
    a.same_field(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let f = a.field();
    let mut out = FSet::empty(f);
    let bs = b.elems();
    match kind {
        CombineKind::Sum => pairwise(a, &bs, &mut out, |x, y| Some(f.add(x, y))),
        CombineKind::Difference => pairwise(a, &bs, &mut out, |x, y| Some(f.sub(x, y))),
        CombineKind::Product => pairwise(a, &bs, &mut out, |x, y| Some(f.mul(x, y))),
        CombineKind::Ratio => {
            let invs: Vec<Elem> = bs.iter().filter_map(|&y| f.inv(y).ok()).collect();
            pairwise(a, &invs, &mut out, |x, y| Some(f.mul(x, y)))
        }
    }
    Ok(out)
}

fn pairwise(a: &FSet, bs: &[Elem], out: &mut FSet, op: impl Fn(Elem, Elem) -> Option<Elem>) {
    for x in a.iter() {
        for &y in bs {
            if let Some(z) = op(x, y) {
                out.insert(z);
            }
        }
    }
}

pub fn sumset(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(CombineKind::Sum, a, b)
}

pub fn difference_set(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(CombineKind::Difference, a, b)
}

pub fn productset(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(CombineKind::Product, a, b)
}

pub fn ratio_set(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(CombineKind::Ratio, a, b)
}

/// `cA`.
pub fn dilate(c: Elem, a: &FSet) -> Result<FSet> {
    if c.is_zero() {
        return Err(Error::ZeroDilation);
    }
    let f = a.field();
    Ok(a.map(|x| f.mul(c, x)))
}

/// `t + A`.
pub fn translate(t: Elem, a: &FSet) -> FSet {
    let f = a.field();
    a.map(|x| f.add(t, x))
}

/// `B_1 + ... + B_k`.
pub fn kfold_sum(sets: &[FSet]) -> Result<FSet> {
    let (first, rest) = sets.split_first().ok_or(Error::EmptyOperand)?;
    let mut acc = first.clone();
    for s in rest {
        acc = sumset(&acc, s)?;
    }
    if acc.is_empty() {
        return Err(Error::EmptyOperand);
    }
    Ok(acc)
}

/// `R(B) = {(b1 - b2)/(b3 - b4) : b_i in B, b3 != b4}`.
pub fn quotient_set(b: &FSet) -> Result<FSet> {
    if b.len() < 2 {
        return Err(Error::TooSmall(format!(
            "quotient set needs at least 2 elements, got {}",
            b.len()
        )));
    }
    let diffs = difference_set(b, b)?;
    let f = b.field();
    let mut out = FSet::empty(f);
    let inv_diffs: Vec<Elem> = diffs.iter().filter_map(|d| f.inv(d).ok()).collect();
    for num in diffs.iter() {
        for &den_inv in &inv_diffs {
            out.insert(f.mul(num, den_inv));
        }
    }
    Ok(out)
}

/// Lexicographically first `(b1, b2, b3, b4) ∈ B^4` with `b3 != b4` and
/// `(b1 - b2)/(b3 - b4) = r`.
pub fn quotient_witness(b: &FSet, r: Elem) -> Option<[Elem; 4]> {
    let f = b.field();
    let elems = b.elems();
    for &b1 in &elems {
        for &b2 in &elems {
            let num = f.sub(b1, b2);
            for &b3 in &elems {
                // b4 = b3 - num/r, or any b4 != b3 when both num and r vanish
                let b4 = if r.is_zero() {
                    if !num.is_zero() {
                        continue;
                    }
                    match elems.iter().find(|&&e| e != b3) {
                        Some(&e) => e,
                        None => continue,
                    }
                } else {
                    f.sub(b3, f.div(num, r).expect("r != 0"))
                };
                if b4 != b3 && b.contains(b4) {
                    return Some([b1, b2, b3, b4]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn set(f: &Field, s: &str) -> FSet {
        FSet::parse(f, s).unwrap()
    }

    #[test]
    fn f7_sum_and_product() {
        let f = Field::prime(7).unwrap();
        let a = set(&f, "[1,2,3]");
        assert_eq!(sumset(&a, &a).unwrap(), set(&f, "[2,3,4,5,6]"));
        assert_eq!(productset(&a, &a).unwrap(), set(&f, "[1,2,3,4,6]"));
        assert_eq!(sumset(&a, &set(&f, "[0]")).unwrap(), a);
    }

    #[test]
    fn f5_ratio_skips_zero() {
        let f = Field::prime(5).unwrap();
        let a = set(&f, "[1,2]");
        assert_eq!(ratio_set(&a, &a).unwrap(), set(&f, "[1,2,3]"));
        assert_eq!(ratio_set(&a, &set(&f, "[0,1]")).unwrap(), a);
        assert!(ratio_set(&a, &set(&f, "[0]")).unwrap().is_empty());
    }

    #[test]
    fn combine_errors() {
        let f7 = Field::prime(7).unwrap();
        let f5 = Field::prime(5).unwrap();
        assert_eq!(
            sumset(&set(&f7, "[1]"), &set(&f5, "[1]")),
            Err(Error::FieldMismatch)
        );
        assert_eq!(sumset(&set(&f7, "[1]"), &set(&f7, "[]")), Err(Error::EmptyOperand));
    }

    #[test]
    fn dilate_translate() {
        let f7 = Field::prime(7).unwrap();
        let a = set(&f7, "[1,2,4]");
        assert_eq!(dilate(Elem(2), &a).unwrap(), a);
        assert_eq!(dilate(Elem(1), &a).unwrap(), a);
        assert_eq!(dilate(Elem(0), &a), Err(Error::ZeroDilation));
        let f5 = Field::prime(5).unwrap();
        assert_eq!(translate(Elem(3), &set(&f5, "[0,1]")), set(&f5, "[3,4]"));
    }

    #[test]
    fn kfold_examples() {
        let f = Field::prime(7).unwrap();
        let s = set(&f, "[0,1]");
        assert_eq!(kfold_sum(&[s.clone(), s.clone(), s.clone()]).unwrap(), set(&f, "[0,1,2,3]"));
        assert_eq!(kfold_sum(&[s.clone()]).unwrap(), s);
        let singles = [set(&f, "[1]"), set(&f, "[2]"), set(&f, "[3]")];
        assert_eq!(kfold_sum(&singles).unwrap(), set(&f, "[6]"));
        assert_eq!(kfold_sum(&[]), Err(Error::EmptyOperand));
    }

    #[test]
    fn quotient_set_examples() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(quotient_set(&set(&f5, "[0,1]")).unwrap(), set(&f5, "[0,1,4]"));
        let f3 = Field::prime(3).unwrap();
        assert_eq!(quotient_set(&FSet::full(&f3)).unwrap(), FSet::full(&f3));
        assert!(matches!(quotient_set(&set(&f5, "[2]")), Err(Error::TooSmall(_))));
        let f9 = Field::parse("3^2/[1,0,1]").unwrap();
        let r = quotient_set(&set(&f9, "[2,7]")).unwrap();
        for e in [0, 1, 2] {
            assert!(r.contains(Elem(e)));
        }
    }

    #[test]
    fn quotient_witnesses_match_quotient_set() {
        let f7 = Field::prime(7).unwrap();
        let b = set(&f7, "[0,1,3]");
        let r = quotient_set(&b).unwrap();
        for e in f7.elements() {
            let w = quotient_witness(&b, e);
            assert_eq!(w.is_some(), r.contains(e));
            if let Some([b1, b2, b3, b4]) = w {
                assert_eq!(f7.div(f7.sub(b1, b2), f7.sub(b3, b4)).unwrap(), e);
            }
        }
        assert_eq!(quotient_witness(&b, Elem(0)), Some([Elem(0), Elem(0), Elem(0), Elem(1)]));
    }
}
