use std::collections::BTreeMap;

use serde::Serialize;

use super::{poly, Elem, Field};
use crate::error::{Error, Result};
use crate::setalg::FSet;

/// The subfield of order `p^degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subfield {
    pub degree: u32,
    pub order: u32,
    pub elements: FSet,
}

pub(crate) fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// One subfield per divisor `d` of `n`, each computed as the fixed points of
/// `z -> z^(p^d)`. The map is F_p-linear, so the fixed points are the kernel
/// of `Frob^d - I` on the power basis.
pub(crate) fn subfields(field: &Field) -> Vec<Subfield> {
    let n = field.n() as usize;
    let p = field.p() as u64;
    divisors(field.n())
        .into_iter()
        .map(|d| {
            // column i holds the coordinates of Frob^d(x^i)
            let mut mat = vec![vec![0u64; n]; n];
            for i in 0..n {
                let basis = Elem(field.p().pow(i as u32));
                let mut img = basis;
                for _ in 0..d {
                    img = field.frobenius(img);
                }
                for (row, c) in field.coeffs(img).into_iter().enumerate() {
                    mat[row][i] = c as u64;
                }
                mat[i][i] = (mat[i][i] + p - 1) % p;
            }
            let kernel = poly::kernel_mod_p(mat, p);
            let mut elements = FSet::empty(field);
            let combos = p.pow(kernel.len() as u32);
            for v in 0..combos {
                let mut coords = vec![0u64; n];
                let mut x = v;
                for b in &kernel {
                    let k = x % p;
                    x /= p;
                    for (c, bc) in coords.iter_mut().zip(b) {
                        *c = (*c + k * bc) % p;
                    }
                }
                let coeffs: Vec<u32> = coords.iter().map(|&c| c as u32).collect();
                elements.insert(field.from_coeffs(&coeffs).expect("kernel vector in range"));
            }
            Subfield {
                degree: d,
                order: field.p().pow(d),
                elements,
            }
        })
        .collect()
}

/// Outcome of checking `|A ∩ cG| <= |G|^{1/2}` for every subfield `G` and
/// every `c` in F*.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    /// Every subfield including `G = F`.
    pub passed: bool,
    /// Proper subfields only (`G != F`).
    pub passed_proper_only: bool,
    pub worst_subfield: u32,
    pub worst_subfield_order: u32,
    pub worst_coset_rep: Elem,
    pub worst_intersection: usize,
    /// `floor(|G|^{1/2})` for the worst subfield.
    pub threshold: u32,
}

pub(crate) fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Coset key of a nonzero `a` with respect to `G*`: `a^{|G|-1}`. Two units
/// share a key exactly when they lie in the same coset of `G*`.
fn coset_key(field: &Field, a: Elem, sub_order: u32) -> u32 {
    field.pow(a, sub_order as u64 - 1).0
}

pub fn admissibility_check(a: &FSet) -> Result<AdmissibilityReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let field = a.field();
    let has_zero = a.contains(Elem::ZERO);
    let mut passed = true;
    let mut passed_proper = true;
    // (count, order, degree, rep)
    let mut worst: Option<(usize, u32, u32, Elem)> = None;
    for g in field.subfields() {
        let mut cosets: BTreeMap<u32, (usize, Elem)> = BTreeMap::new();
        for e in a.iter().filter(|e| !e.is_zero()) {
            let entry = cosets.entry(coset_key(field, e, g.order)).or_insert((0, e));
            entry.0 += 1;
        }
        if cosets.is_empty() {
            // A = {0}: every cG meets A exactly at 0
            cosets.insert(1, (0, Elem::ONE));
        }
        for (count, rep) in cosets.into_values() {
            let count = count + has_zero as usize;
            let ok = (count as u64).pow(2) <= g.order as u64;
            if !ok {
                passed = false;
                if g.degree < field.n() {
                    passed_proper = false;
                }
            }
            let worse = match worst {
                None => true,
                // count^2/order > best^2/best_order
                Some((bc, bo, _, _)) => {
                    (count as u128).pow(2) * bo as u128 > (bc as u128).pow(2) * g.order as u128
                }
            };
            if worse {
                worst = Some((count, g.order, g.degree, rep));
            }
        }
    }
    let (count, order, degree, rep) = worst.expect("every field has at least one subfield");
    Ok(AdmissibilityReport {
        passed,
        passed_proper_only: passed_proper,
        worst_subfield: degree,
        worst_subfield_order: order,
        worst_coset_rep: rep,
        worst_intersection: count,
        threshold: isqrt(order as u64) as u32,
    })
}

/// Precomputed coset keys for fast admissibility filtering of many
/// candidate sets in one field.
#[derive(Debug, Clone)]
pub struct AdmissibilityTable {
    layers: Vec<(u32, Vec<u32>)>,
}

impl AdmissibilityTable {
    pub fn new(field: &Field) -> AdmissibilityTable {
        let layers = divisors(field.n())
            .into_iter()
            .map(|d| {
                let order = field.p().pow(d);
                let keys = field.elements().map(|e| if e.is_zero() { 0 } else { coset_key(field, e, order) }).collect();
                (order, keys)
            })
            .collect();
        AdmissibilityTable { layers }
    }

    pub fn admits(&self, elems: &[Elem]) -> bool {
        let has_zero = elems.iter().any(|e| e.is_zero()) as usize;
        let mut keys: Vec<u32> = Vec::with_capacity(elems.len());
        for (order, table) in &self.layers {
            keys.clear();
            keys.extend(elems.iter().filter(|e| !e.is_zero()).map(|e| table[e.0 as usize]));
            keys.sort_unstable();
            let mut i = 0;
            while i < keys.len() {
                let mut j = i;
                while j < keys.len() && keys[j] == keys[i] {
                    j += 1;
                }
                let count = (j - i + has_zero) as u64;
                if count * count > *order as u64 {
                    return false;
                }
                i = j;
            }
        }
        true
    }
}
