use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::InequalityCheck;
use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, Rational};
use crate::field::Elem;
use crate::setalg::{additive_energy, dilate, quotient_set, quotient_witness, sumset, FSet};

/// The element `r̂ = (a-b)/(c-d)` of `R(B)` with the smallest additive energy
/// `E⊕(B, r̂B)`, together with the exact counting bound over all of `R(B)`.
#[derive(Debug, Clone, Serialize)]
pub struct RudnevSelection {
    pub witnesses: [Elem; 4],
    pub r_hat: Elem,
    pub energy: u64,
    pub quotient_size: usize,
    /// `E⊕(B, rB)` for every `r ∈ R(B)`, including `r = 0` where `rB = {0}`.
    pub energies: BTreeMap<u32, u64>,
    /// `Σ_{r∈R(B)} E⊕(B, rB)`.
    pub sum_identity_lhs: u64,
    /// `|B|^2 |R(B)| + |B|^4`.
    pub sum_identity_rhs: u64,
    pub sum_identity_holds: bool,
    /// Mean of `E⊕(B, rB)` over the candidates `R(B) \ {0}`.
    #[serde(with = "serde_rational")]
    pub candidate_average: Rational,
    pub below_candidate_average: bool,
    /// `energy <= sum_identity_lhs / |R(B)|`, averaging over all of `R(B)`.
    pub below_full_average: bool,
}

pub fn rudnev_select(b: &FSet) -> Result<RudnevSelection> {
    let r_set = quotient_set(b)?;
    let f = b.field();
    let rs = r_set.elems();
    let zero = FSet::from_elems(f, [Elem::ZERO]);
    let energies: Vec<(Elem, u64)> = rs
        .par_iter()
        .map(|&r| {
            let rb = if r.is_zero() { zero.clone() } else { dilate(r, b).expect("r != 0") };
            (r, additive_energy(b, &rb).expect("nonempty").value)
        })
        .collect();
    let lhs: u64 = energies.iter().map(|(_, e)| e).sum();
    let n = b.len() as u64;
    let rhs = n * n * rs.len() as u64 + n.pow(4);
    let (r_hat, energy) = energies
        .iter()
        .filter(|(r, _)| !r.is_zero())
        .min_by_key(|(r, e)| (*e, *r))
        .copied()
        .expect("R(B) contains 1");
    let candidates = energies.iter().filter(|(r, _)| !r.is_zero());
    let (count, total) = candidates.fold((0u64, 0u64), |(c, t), (_, e)| (c + 1, t + e));
    let candidate_average = exact::ratio(total, count);
    let witnesses = quotient_witness(b, r_hat).expect("r_hat lies in R(B)");
    Ok(RudnevSelection {
        witnesses,
        r_hat,
        energy,
        quotient_size: rs.len(),
        energies: energies.iter().map(|(r, e)| (r.0, *e)).collect(),
        sum_identity_lhs: lhs,
        sum_identity_rhs: rhs,
        sum_identity_holds: lhs <= rhs,
        below_candidate_average: exact::int(energy) <= candidate_average,
        candidate_average,
        below_full_average: energy as u128 * rs.len() as u128 <= lhs as u128,
    })
}

impl RudnevSelection {
    /// `|B' + r̂B'| >= |B'|^4 / E⊕(B', r̂B')` for `B' ⊆ B` with
    /// `|B'| >= ceil(|B|/2)`. Returned as `|B'|^4/E⊕ <= |B' + r̂B'|`.
    pub fn check_subset(&self, b: &FSet, sub: &FSet) -> Result<InequalityCheck> {
        if !sub.is_subset(b) || sub.len() < b.len().div_ceil(2) {
            return Err(Error::InvalidArgument(format!(
                "B' must be a subset of B with at least {} elements",
                b.len().div_ceil(2)
            )));
        }
        let scaled = dilate(self.r_hat, sub)?;
        let energy = additive_energy(sub, &scaled)?.value;
        let size = sumset(sub, &scaled)?.len();
        let n = sub.len() as u64;
        Ok(InequalityCheck::new(exact::ratio(n.pow(4), energy), exact::int(size as u64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn set(f: &Field, s: &str) -> FSet {
        FSet::parse(f, s).unwrap()
    }

    #[test]
    fn two_point_set_in_f5() {
        let f5 = Field::prime(5).unwrap();
        let b = set(&f5, "[0,1]");
        let s = rudnev_select(&b).unwrap();
        assert_eq!(s.energies, BTreeMap::from([(0, 2), (1, 6), (4, 6)]));
        assert_eq!(s.sum_identity_lhs, 14);
        assert_eq!(s.sum_identity_rhs, 28);
        assert!(s.sum_identity_holds);
        assert_eq!(s.r_hat, Elem(1));
        assert_eq!(s.energy, 6);
        assert!(s.below_candidate_average);
        // the r = 0 term pulls the full average below every candidate
        assert!(!s.below_full_average);
        let [a, bb, c, d] = s.witnesses;
        assert_eq!(f5.div(f5.sub(a, bb), f5.sub(c, d)).unwrap(), s.r_hat);
    }

    #[test]
    fn full_f3() {
        let f3 = Field::prime(3).unwrap();
        let b = FSet::full(&f3);
        let s = rudnev_select(&b).unwrap();
        assert_eq!(s.quotient_size, 3);
        assert!(s.sum_identity_holds);
        let check = s.check_subset(&b, &b).unwrap();
        assert!(check.holds);
        let sub = set(&f3, "[0,1]");
        assert!(s.check_subset(&b, &sub).unwrap().holds);
        assert!(s.check_subset(&b, &set(&f3, "[0]")).is_err());
    }

    #[test]
    fn too_small() {
        let f3 = Field::prime(3).unwrap();
        assert!(matches!(rudnev_select(&set(&f3, "[1]")), Err(Error::TooSmall(_))));
    }
}
