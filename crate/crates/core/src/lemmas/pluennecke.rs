use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, Rational};
use crate::field::Elem;
use crate::setalg::{kfold_sum, sumset, FSet};

/// An exactly evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs <= rhs;
        InequalityCheck { lhs, rhs, holds }
    }
}

fn require_sets(x: &FSet, bs: &[FSet]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyX);
    }
    if bs.is_empty() {
        return Err(Error::InvalidArgument("at least one summand B_i is required".into()));
    }
    for b in bs {
        x.same_field(b)?;
        if b.is_empty() {
            return Err(Error::EmptyOperand);
        }
    }
    Ok(())
}

/// `Π |X + B_i| / |X|^{k-1}`.
fn pluennecke_bound(x: &FSet, bs: &[FSet]) -> Result<Rational> {
    let mut num = exact::int(1);
    for b in bs {
        num *= exact::int(sumset(x, b)?.len() as u64);
    }
    Ok(num / exact::pow(&exact::int(x.len() as u64), bs.len() as u32 - 1))
}

/// `|B_1 + ... + B_k|` against `|X + B_1| ... |X + B_k| / |X|^{k-1}`.
pub fn pluennecke_check(x: &FSet, bs: &[FSet]) -> Result<InequalityCheck> {
    require_sets(x, bs)?;
    let lhs = exact::int(kfold_sum(bs)?.len() as u64);
    Ok(InequalityCheck::new(lhs, pluennecke_bound(x, bs)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RefineMethod {
    Exhaustive,
    Greedy,
}

/// How ties between equally good subsets are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Smallest increasing index sequence.
    Lexicographic,
    /// Smallest `min_{a∈X} X'/a`, which is unchanged when `X` and `X'` are
    /// dilated together; falls back to lexicographic.
    DilationInvariant,
}

#[derive(Debug, Clone, Serialize)]
pub struct Refinement {
    pub subset: FSet,
    pub min_size: usize,
    /// `|X' + B_1 + ... + B_k|`.
    pub sum_size: usize,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    /// `|X' + ΣB_i| |X|^{k-1} / Π|X + B_i|`.
    #[serde(with = "serde_rational")]
    pub measured_c: Rational,
    pub method: RefineMethod,
}

/// Largest `|X|` searched exhaustively.
pub const REFINE_EXHAUSTIVE_LIMIT: usize = 12;

/// Finds `X' ⊆ X` with `|X'| >= (1-ε)|X|` minimizing `|X' + B_1 + ... + B_k|`.
pub fn pluennecke_refine(x: &FSet, bs: &[FSet], epsilon: &Rational) -> Result<Refinement> {
    pluennecke_refine_with(x, bs, epsilon, TieBreak::Lexicographic)
}

pub fn pluennecke_refine_with(
    x: &FSet,
    bs: &[FSet],
    epsilon: &Rational,
    tie: TieBreak,
) -> Result<Refinement> {
    require_sets(x, bs)?;
    if !exact::is_open_unit(epsilon) {
        return Err(Error::BadEpsilon(epsilon.to_string()));
    }
    let total = kfold_sum(bs)?;
    let min_size = exact::ceil_usize(&((exact::int(1) - epsilon) * exact::int(x.len() as u64)));
    let elems = x.elems();
    let (subset, method) = if elems.len() <= REFINE_EXHAUSTIVE_LIMIT {
        (exhaustive(x, &elems, &total, min_size, tie), RefineMethod::Exhaustive)
    } else {
        (greedy(x, &total, min_size, tie), RefineMethod::Greedy)
    };
    let sum_size = sumset(&subset, &total)?.len();
    let bound = pluennecke_bound(x, bs)?;
    let measured_c = exact::int(sum_size as u64) / &bound;
    Ok(Refinement {
        subset,
        min_size,
        sum_size,
        bound,
        measured_c,
        method,
    })
}

fn better(candidate: &FSet, incumbent: &FSet, reference: &FSet, tie: TieBreak) -> bool {
    if tie == TieBreak::DilationInvariant {
        match dilation_key(candidate, reference).cmp(&dilation_key(incumbent, reference)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    candidate.cmp_lex(incumbent).is_lt()
}

fn dilation_key(subset: &FSet, reference: &FSet) -> Vec<u32> {
    let f = subset.field();
    reference
        .iter()
        .filter(|a| !a.is_zero())
        .map(|a| {
            let inv = f.inv(a).expect("nonzero");
            let mut v: Vec<u32> = subset.iter().map(|s| f.mul(s, inv).0).collect();
            v.sort_unstable();
            v
        })
        .min()
        .unwrap_or_else(|| subset.indices())
}

fn exhaustive(x: &FSet, elems: &[Elem], total: &FSet, min_size: usize, tie: TieBreak) -> FSet {
    let f = x.field();
    let mut best: Option<(usize, FSet)> = None;
    for mask in 0u32..(1 << elems.len()) {
        if (mask.count_ones() as usize) < min_size || mask == 0 {
            continue;
        }
        let sub = FSet::from_elems(
            f,
            elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e),
        );
        let value = sumset(&sub, total).expect("nonempty").len();
        let replace = match &best {
            None => true,
            Some((bv, bs)) => value < *bv || (value == *bv && better(&sub, bs, x, tie)),
        };
        if replace {
            best = Some((value, sub));
        }
    }
    best.expect("X is nonempty").1
}

fn greedy(x: &FSet, total: &FSet, min_size: usize, tie: TieBreak) -> FSet {
    let mut current = x.clone();
    while current.len() > min_size.max(1) {
        let mut best: Option<(usize, FSet)> = None;
        for e in current.iter() {
            let mut trial = current.clone();
            trial.remove(e);
            let value = sumset(&trial, total).expect("nonempty").len();
            let replace = match &best {
                None => true,
                Some((bv, bs)) => value < *bv || (value == *bv && better(&trial, bs, x, tie)),
            };
            if replace {
                best = Some((value, trial));
            }
        }
        current = best.expect("current is nonempty").1;
    }
    current
}
