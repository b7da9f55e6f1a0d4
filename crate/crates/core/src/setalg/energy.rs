use std::collections::BTreeMap;

use serde::Serialize;

use super::FSet;
use crate::error::{Error, Result};
use crate::field::Elem;

/// Largest `|X||Y|` (resp. `|A|^2`) accepted by the quadruple-loop oracles.
pub const QUADRUPLE_ORACLE_LIMIT: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyReport {
    pub kind: EnergyKind,
    pub value: u64,
    /// Additive: sum `s` to `r_{X,Y}(s)`. Multiplicative: slope to `|P_ξ|`.
    pub fibers: BTreeMap<u32, u64>,
}

/// `E⊕(X,Y) = Σ_s r_{X,Y}(s)^2`, counted from the sum fibers.
pub fn additive_energy(x: &FSet, y: &FSet) -> Result<EnergyReport> {
    x.same_field(y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let f = x.field();
    let ys = y.elems();
    let mut sums: Vec<u32> = Vec::with_capacity(x.len() * ys.len());
    for a in x.iter() {
        sums.extend(ys.iter().map(|&b| f.add(a, b).0));
    }
    sums.sort_unstable();
    let mut fibers = BTreeMap::new();
    let mut value = 0u64;
    for run in sums.chunk_by(|a, b| a == b) {
        let r = run.len() as u64;
        value += r * r;
        fibers.insert(run[0], r);
    }
    Ok(EnergyReport {
        kind: EnergyKind::Additive,
        value,
        fibers,
    })
}

/// Direct count of `x1 + y1 = x2 + y2` over `X x Y x X x Y`.
pub fn additive_energy_quadruples(x: &FSet, y: &FSet) -> Result<u64> {
    x.same_field(y)?;
    if x.len() * y.len() > QUADRUPLE_ORACLE_LIMIT {
        return Err(Error::TooLarge(format!(
            "|X||Y| = {} exceeds {}",
            x.len() * y.len(),
            QUADRUPLE_ORACLE_LIMIT
        )));
    }
    let f = x.field();
    let xs = x.elems();
    let ys = y.elems();
    let mut count = 0;
    for &x1 in &xs {
        for &y1 in &ys {
            let s = f.add(x1, y1);
            for &x2 in &xs {
                for &y2 in &ys {
                    if f.add(x2, y2) == s {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Lines through the origin meeting `A x A`, keyed by slope: `P_ξ` is the set
/// of abscissae `a` with `ξa ∈ A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeDecomposition {
    pub slopes: BTreeMap<Elem, FSet>,
    pub point_count: usize,
}

impl SlopeDecomposition {
    /// `Σ_ξ |P_ξ|^2`.
    pub fn energy(&self) -> u64 {
        self.slopes.values().map(|p| (p.len() as u64).pow(2)).sum()
    }

    pub fn fiber(&self, slope: Elem) -> Option<&FSet> {
        self.slopes.get(&slope)
    }
}

pub fn slope_decomposition(a: &FSet) -> Result<SlopeDecomposition> {
    if a.contains(Elem::ZERO) {
        return Err(Error::ContainsZero);
    }
    let f = a.field();
    let elems = a.elems();
    let mut slopes: BTreeMap<Elem, FSet> = BTreeMap::new();
    for &x in &elems {
        let inv = f.inv(x)?;
        for &y in &elems {
            slopes
                .entry(f.mul(y, inv))
                .or_insert_with(|| FSet::empty(f))
                .insert(x);
        }
    }
    Ok(SlopeDecomposition {
        slopes,
        point_count: elems.len() * elems.len(),
    })
}

/// `E(A) = Σ_ξ |P_ξ|^2`, the number of solutions of `a1/a2 = a3/a4`.
pub fn multiplicative_energy(a: &FSet) -> Result<EnergyReport> {
    if a.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let decomposition = slope_decomposition(a)?;
    Ok(EnergyReport {
        kind: EnergyKind::Multiplicative,
        value: decomposition.energy(),
        fibers: decomposition
            .slopes
            .iter()
            .map(|(s, p)| (s.0, p.len() as u64))
            .collect(),
    })
}

/// Direct count of `a1 a4 = a3 a2` over `A^4`.
pub fn multiplicative_energy_quadruples(a: &FSet) -> Result<u64> {
    if a.contains(Elem::ZERO) {
        return Err(Error::ContainsZero);
    }
    if a.len() * a.len() > QUADRUPLE_ORACLE_LIMIT {
        return Err(Error::TooLarge(format!("|A|^2 = {} exceeds {}", a.len() * a.len(), QUADRUPLE_ORACLE_LIMIT)));
    }
    let f = a.field();
    let xs = a.elems();
    let mut count = 0;
    for &a1 in &xs {
        for &a2 in &xs {
            for &a3 in &xs {
                let lhs = f.mul(a1, a2);
                for &a4 in &xs {
                    // a1/a3 = a4/a2  <=>  a1 a2 = a3 a4
                    if f.mul(a3, a4) == lhs {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}
