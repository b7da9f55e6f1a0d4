use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::lemmas::generated_subfield;
use crate::setalg::{difference_set, productset, quotient_set, quotient_witness, ratio_set, sumset, translate, FSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseLabel {
    /// Some `r ∈ R(Ã)` lies outside `R(B)`.
    DistinctQuotientsLeft,
    /// Some `r ∈ R(B)` lies outside `R(Ã)`.
    DistinctQuotientsRight,
    /// `1 + R(Ã) ⊄ R(Ã)`.
    NotTranslationClosed,
    /// `Ã ⊄ R(Ã)`.
    NotContained,
    /// `Ã R(Ã) ⊄ R(Ã)`.
    NotDilationClosed,
    /// None of the above: `R(Ã)` is the subfield generated by `Ã`.
    Subfield,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 6] = [
        CaseLabel::DistinctQuotientsLeft,
        CaseLabel::DistinctQuotientsRight,
        CaseLabel::NotTranslationClosed,
        CaseLabel::NotContained,
        CaseLabel::NotDilationClosed,
        CaseLabel::Subfield,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::DistinctQuotientsLeft => "1.1",
            CaseLabel::DistinctQuotientsRight => "1.2",
            CaseLabel::NotTranslationClosed => "2",
            CaseLabel::NotContained => "3",
            CaseLabel::NotDilationClosed => "4",
            CaseLabel::Subfield => "5",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// The case and its witness.
///
/// `witness` is the offending element: `r` in cases 1.1 and 1.2, `1 + r`
/// in case 2, `z` in case 3 and `a(b-c)/(d-e)` in case 4. `representation`
/// lists the elements that realize it: `(a1,a2,a3,a4)` with
/// `r = (a1-a2)/(a3-a4)` in cases 1.1, 1.2 and 2, `(z)` in case 3 and
/// `(a,b,c,d,e)` in case 4.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: CaseLabel,
    pub witness: Option<Elem>,
    pub representation: Vec<Elem>,
    pub quotient_tilde: FSet,
    pub quotient_row: FSet,
}

/// Raw truth values of the four case conditions, in order. Case 2 onward
/// are stated for `R(Ã)`; they only define a case once the earlier ones
/// fail.
pub fn case_predicates(a_tilde: &FSet, row: &FSet) -> Result<[bool; 4]> {
    let ra = quotient_set(a_tilde)?;
    let rb = quotient_set(row)?;
    let one_plus = translate(Elem::ONE, &ra);
    let dilated = productset(a_tilde, &ra)?;
    Ok([ra != rb, !one_plus.is_subset(&ra), !a_tilde.is_subset(&ra), !dilated.is_subset(&ra)])
}

pub fn classify_case(a_tilde: &FSet, row: &FSet) -> Result<Classification> {
    a_tilde.same_field(row)?;
    if a_tilde.len() < 2 || row.len() < 2 {
        return Err(Error::TooSmall(format!(
            "classification needs |Ã|, |B_y0| >= 2, got {} and {}",
            a_tilde.len(),
            row.len()
        )));
    }
    let f = a_tilde.field();
    let ra = quotient_set(a_tilde)?;
    let rb = quotient_set(row)?;
    let done = |label, witness: Option<Elem>, representation: Vec<Elem>| Classification {
        label,
        witness,
        representation,
        quotient_tilde: ra.clone(),
        quotient_row: rb.clone(),
    };
    if let Some(r) = ra.difference(&rb).first() {
        let rep = quotient_witness(a_tilde, r).expect("r ∈ R(Ã)");
        return Ok(done(CaseLabel::DistinctQuotientsLeft, Some(r), rep.to_vec()));
    }
    if let Some(r) = rb.difference(&ra).first() {
        let rep = quotient_witness(row, r).expect("r ∈ R(B)");
        return Ok(done(CaseLabel::DistinctQuotientsRight, Some(r), rep.to_vec()));
    }
    if let Some(r) = ra.iter().find(|&r| !ra.contains(f.add(Elem::ONE, r))) {
        let rep = quotient_witness(a_tilde, r).expect("r ∈ R(Ã)");
        return Ok(done(CaseLabel::NotTranslationClosed, Some(f.add(Elem::ONE, r)), rep.to_vec()));
    }
    if let Some(z) = a_tilde.iter().find(|&z| !ra.contains(z)) {
        return Ok(done(CaseLabel::NotContained, Some(z), vec![z]));
    }
    for a in a_tilde.iter() {
        if let Some(r) = ra.iter().find(|&r| !ra.contains(f.mul(a, r))) {
            let [b, c, d, e] = quotient_witness(a_tilde, r).expect("r ∈ R(Ã)");
            return Ok(done(CaseLabel::NotDilationClosed, Some(f.mul(a, r)), vec![a, b, c, d, e]));
        }
    }
    Ok(done(CaseLabel::Subfield, None, Vec::new()))
}

/// Each link of the argument that `R(Ã)` is a subfield once cases 1-4 fail,
/// evaluated as a literal set comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureChain {
    pub tilde_in_quotient: bool,
    pub one_plus_quotient_in_quotient: bool,
    pub tilde_times_quotient_in_quotient: bool,
    pub tilde_times_quotient_equals_quotient: bool,
    pub quotient_over_tilde_equals_quotient: bool,
    pub tilde_plus_quotient_equals_quotient: bool,
    pub quotient_minus_tilde_equals_quotient: bool,
    pub quotient_equals_generated_subfield: bool,
    pub generated_subfield_order: usize,
}

impl ClosureChain {
    pub fn verify(a_tilde: &FSet) -> Result<ClosureChain> {
        let r = quotient_set(a_tilde)?;
        let one_plus = translate(Elem::ONE, &r);
        let prod = productset(a_tilde, &r)?;
        let generated = generated_subfield(a_tilde)?.generated;
        Ok(ClosureChain {
            tilde_in_quotient: a_tilde.is_subset(&r),
            one_plus_quotient_in_quotient: one_plus.is_subset(&r),
            tilde_times_quotient_in_quotient: prod.is_subset(&r),
            tilde_times_quotient_equals_quotient: prod == r,
            quotient_over_tilde_equals_quotient: ratio_set(&r, a_tilde)? == r,
            tilde_plus_quotient_equals_quotient: sumset(a_tilde, &r)? == r,
            quotient_minus_tilde_equals_quotient: difference_set(&r, a_tilde)? == r,
            quotient_equals_generated_subfield: r == generated,
            generated_subfield_order: generated.len(),
        })
    }

    pub fn holds(&self) -> bool {
        self.tilde_in_quotient
            && self.one_plus_quotient_in_quotient
            && self.tilde_times_quotient_in_quotient
            && self.tilde_times_quotient_equals_quotient
            && self.quotient_over_tilde_equals_quotient
            && self.tilde_plus_quotient_equals_quotient
            && self.quotient_minus_tilde_equals_quotient
            && self.quotient_equals_generated_subfield
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn translation_case_in_f5() {
        let f5 = Field::prime(5).unwrap();
        let s = FSet::parse(&f5, "[1,2]").unwrap();
        let c = classify_case(&s, &s).unwrap();
        assert_eq!(c.label, CaseLabel::NotTranslationClosed);
        assert_eq!(c.witness, Some(Elem(2)));
        assert_eq!(c.quotient_tilde.indices(), vec![0, 1, 4]);
    }

    #[test]
    fn subfield_units_reach_case_five() {
        let f16 = Field::new(2, 4, None).unwrap();
        let f4 = f16.subfields()[1].elements.clone();
        let units = FSet::from_elems(&f16, f4.iter().filter(|e| !e.is_zero()));
        let c = classify_case(&units, &units).unwrap();
        assert_eq!(c.label, CaseLabel::Subfield);
        assert_eq!(c.quotient_tilde, f4);
        let chain = ClosureChain::verify(&units).unwrap();
        assert!(chain.holds());
        assert_eq!(chain.generated_subfield_order, 4);
    }

    #[test]
    fn containment_case() {
        // x·F_4* has the same quotient set F_4 as F_4* but leaves F_4
        let f16 = Field::new(2, 4, None).unwrap();
        let f4 = f16.subfields()[1].elements.clone();
        let units = FSet::from_elems(&f16, f4.iter().filter(|e| !e.is_zero()));
        let moved = crate::setalg::dilate(f16.generator_x(), &units).unwrap();
        let c = classify_case(&moved, &units).unwrap();
        assert_eq!(c.label, CaseLabel::NotContained);
        assert!(!f4.contains(c.witness.unwrap()));
        assert_eq!(case_predicates(&moved, &units).unwrap(), [false, false, true, true]);
    }

    #[test]
    fn distinct_quotients() {
        let f7 = Field::prime(7).unwrap();
        let a = FSet::parse(&f7, "[0,1,3]").unwrap();
        let b = FSet::parse(&f7, "[0,1]").unwrap();
        let c = classify_case(&a, &b).unwrap();
        assert_eq!(c.label, CaseLabel::DistinctQuotientsLeft);
        let [a1, a2, a3, a4] = c.representation[..] else { panic!() };
        assert_eq!(f7.div(f7.sub(a1, a2), f7.sub(a3, a4)).unwrap(), c.witness.unwrap());
        let c = classify_case(&b, &a).unwrap();
        assert_eq!(c.label, CaseLabel::DistinctQuotientsRight);
    }

    #[test]
    fn too_small() {
        let f7 = Field::prime(7).unwrap();
        let a = FSet::parse(&f7, "[1]").unwrap();
        let b = FSet::parse(&f7, "[0,1]").unwrap();
        assert!(matches!(classify_case(&a, &b), Err(Error::TooSmall(_))));
    }
}
