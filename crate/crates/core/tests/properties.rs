//! Property tests for the algebraic invariants, checked against brute-force
//! counts written independently of the library.

use std::collections::BTreeSet;

use proptest::prelude::*;
use sumprod::exact::{self, Rational};
use sumprod::field::Elem;
use sumprod::lemmas::{
    cover_greedy, cover_min_oracle, generated_subfield, pluennecke_check, rudnev_select, COVER_ORACLE_LIMIT,
};
use sumprod::search::{anneal_min, exhaustive_min, AnnealOptions};
use sumprod::setalg::{
    additive_energy, multiplicative_energy, productset, quotient_set, slope_decomposition, sumset,
};
use sumprod::tracer::{case_predicates, classify_case, dyadic_select, trace, CaseLabel};
use sumprod::{FSet, Field};

const SPECS: &[&str] = &["2", "3", "5", "7", "11", "13", "2^2", "2^3", "2^4", "2^5", "3^2", "3^3", "5^2", "7^2", "3^4"];

fn field() -> impl Strategy<Value = Field> {
    prop::sample::select(SPECS).prop_map(|s| Field::parse(s).unwrap())
}

fn subset(f: &Field, max: usize, nonzero: bool) -> impl Strategy<Value = FSet> {
    let f = f.clone();
    let lo = nonzero as u32;
    let q = f.order();
    let max = max.min((q - lo) as usize).max(1);
    prop::collection::btree_set(lo..q, 1..=max)
        .prop_map(move |s| FSet::from_indices(&f, s.into_iter().map(u64::from)).unwrap())
}

fn elem(f: &Field, nonzero: bool) -> impl Strategy<Value = Elem> {
    (nonzero as u32..f.order()).prop_map(Elem)
}

fn brute_sums(a: &FSet, b: &FSet) -> BTreeSet<Elem> {
    let f = a.field();
    a.iter().flat_map(|x| b.iter().map(move |y| f.add(x, y))).collect()
}

fn brute_products(a: &FSet, b: &FSet) -> BTreeSet<Elem> {
    let f = a.field();
    a.iter().flat_map(|x| b.iter().map(move |y| f.mul(x, y))).collect()
}

fn brute_quotients(b: &FSet) -> BTreeSet<Elem> {
    let f = b.field();
    let e = b.elems();
    let mut out = BTreeSet::new();
    for &b1 in &e {
        for &b2 in &e {
            for &b3 in &e {
                for &b4 in &e {
                    if b3 != b4 {
                        out.insert(f.div(f.sub(b1, b2), f.sub(b3, b4)).unwrap());
                    }
                }
            }
        }
    }
    out
}

fn brute_add_energy(x: &FSet, y: &FSet) -> u64 {
    let f = x.field();
    let mut n = 0;
    for x1 in x.iter() {
        for y1 in y.iter() {
            for x2 in x.iter() {
                for y2 in y.iter() {
                    n += (f.add(x1, y1) == f.add(x2, y2)) as u64;
                }
            }
        }
    }
    n
}

fn brute_mul_energy(a: &FSet) -> u64 {
    let f = a.field();
    let mut n = 0;
    for a1 in a.iter() {
        for a2 in a.iter() {
            for a3 in a.iter() {
                for a4 in a.iter() {
                    n += (f.div(a1, a2).unwrap() == f.div(a3, a4).unwrap()) as u64;
                }
            }
        }
    }
    n
}

fn set_of(f: &Field, s: BTreeSet<Elem>) -> FSet {
    FSet::from_elems(f, s)
}

fn field_and<T: std::fmt::Debug>(
    make: impl Fn(&Field) -> BoxedStrategy<T> + 'static,
) -> impl Strategy<Value = (Field, T)> {
    field().prop_flat_map(move |f| (Just(f.clone()), make(&f)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms((f, (a, b, c)) in field_and(|f| (elem(f, false), elem(f, false), elem(f, false)).boxed())) {
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        let p = f.p() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.pow(f.mul(a, b), p), f.mul(f.pow(a, p), f.pow(b, p)));
    }

    #[test]
    fn subfields_are_closed_and_nested(f in field()) {
        let subs = f.subfields();
        for s in &subs {
            prop_assert_eq!(s.elements.len() as u32, f.p().pow(s.degree));
            for a in s.elements.iter() {
                for b in s.elements.iter() {
                    prop_assert!(s.elements.contains(f.add(a, b)));
                    prop_assert!(s.elements.contains(f.mul(a, b)));
                }
            }
            for t in &subs {
                if t.degree % s.degree == 0 {
                    prop_assert!(s.elements.is_subset(&t.elements));
                }
            }
        }
    }

    #[test]
    fn sumsets_match_brute_force((f, (a, b)) in field_and(|f| (subset(f, 8, false), subset(f, 8, false)).boxed())) {
        prop_assert_eq!(sumset(&a, &b).unwrap(), set_of(&f, brute_sums(&a, &b)));
        prop_assert_eq!(sumset(&a, &b).unwrap(), sumset(&b, &a).unwrap());
        prop_assert_eq!(productset(&a, &b).unwrap(), set_of(&f, brute_products(&a, &b)));
        prop_assert_eq!(productset(&a, &b).unwrap(), productset(&b, &a).unwrap());
    }

    #[test]
    fn dilation_equivariance(
        (f, (a, b, c, d)) in field_and(|f| (subset(f, 6, false), subset(f, 6, false), elem(f, true), elem(f, true)).boxed())
    ) {
        let dil = |k: Elem, s: &FSet| s.map(|e| f.mul(k, e));
        prop_assert_eq!(sumset(&dil(c, &a), &dil(c, &b)).unwrap(), dil(c, &sumset(&a, &b).unwrap()));
        prop_assert_eq!(
            productset(&dil(c, &a), &dil(d, &b)).unwrap(),
            dil(f.mul(c, d), &productset(&a, &b).unwrap())
        );
    }

    #[test]
    fn energies_and_cauchy_schwarz(
        (f, (x, y, a)) in field_and(|f| (subset(f, 6, false), subset(f, 6, false), subset(f, 6, true)).boxed())
    ) {
        let e = additive_energy(&x, &y).unwrap().value;
        prop_assert_eq!(e, brute_add_energy(&x, &y));
        let xs = x.len() as u64;
        let ys = y.len() as u64;
        let sum = sumset(&x, &y).unwrap().len() as u64;
        prop_assert!(e * sum >= xs * xs * ys * ys);

        let m = multiplicative_energy(&a).unwrap().value;
        prop_assert_eq!(m, brute_mul_energy(&a));
        prop_assert_eq!(slope_decomposition(&a).unwrap().energy(), m);
        let n = a.len() as u64;
        prop_assert!(m * productset(&a, &a).unwrap().len() as u64 >= n.pow(4));
        let _ = f;
    }

    #[test]
    fn quotient_set_structure((f, b) in field_and(|f| subset(f, 5, false).boxed())) {
        prop_assume!(b.len() >= 2);
        let r = quotient_set(&b).unwrap();
        prop_assert_eq!(r.clone(), set_of(&f, brute_quotients(&b)));
        prop_assert!(r.contains(Elem::ZERO));
        prop_assert!(r.contains(Elem::ONE));
        prop_assert!(r.contains(f.neg(Elem::ONE)));
        for x in r.iter() {
            prop_assert!(r.contains(f.neg(x)));
            if !x.is_zero() {
                prop_assert!(r.contains(f.inv(x).unwrap()));
            }
        }
    }

    #[test]
    fn pluennecke_never_fails(
        (_f, (x, bs)) in field_and(|f| (subset(f, 4, false), prop::collection::vec(subset(f, 4, false), 1..=3)).boxed())
    ) {
        let c = pluennecke_check(&x, &bs).unwrap();
        prop_assert!(c.holds, "{} > {}", c.lhs, c.rhs);
    }

    #[test]
    fn greedy_cover_against_oracle(
        (_f, (x, y, eps)) in field_and(|f| (
            subset(f, COVER_ORACLE_LIMIT, false),
            subset(f, 5, false),
            prop::sample::select(vec![(1u32, 10u32), (1, 3), (1, 2), (9, 10)]),
        ).boxed())
    ) {
        let eps: Rational = exact::ratio(eps.0, eps.1);
        let r = cover_greedy(&x, &y, &eps).unwrap();
        let best = cover_min_oracle(&x, &y, &eps).unwrap();
        prop_assert!(r.translate_count >= best);
        // recount the coverage from the translates
        let f = x.field();
        let covered = x.iter().filter(|&e| r.translates.iter().any(|&t| y.contains(f.sub(e, t)))).count();
        prop_assert_eq!(covered, r.covered.len());
        prop_assert!(exact::int(covered as u64) >= (exact::int(1) - &eps) * exact::int(x.len() as u64));
    }

    #[test]
    fn rudnev_counting_bound((f, b) in field_and(|f| subset(f, 4, false).boxed())) {
        prop_assume!(b.len() >= 2);
        let s = rudnev_select(&b).unwrap();
        let rb = brute_quotients(&b);
        let n = b.len() as u64;
        // Σ_r E⊕(B, rB) with rB taken as a set, so r = 0 contributes |B|^2
        let by_sets: u64 = rb.iter().map(|&r| brute_add_energy(&b, &b.map(|e| f.mul(r, e)))).sum();
        prop_assert_eq!(s.sum_identity_lhs, by_sets);
        // tuples (b1,b2,b3,b4,r) with b1 + r b2 = b3 + r b4 dominate the set count
        let mut tuples = 0u64;
        for &r in &rb {
            for b1 in b.iter() {
                for b2 in b.iter() {
                    for b3 in b.iter() {
                        for b4 in b.iter() {
                            tuples += (f.add(b1, f.mul(r, b2)) == f.add(b3, f.mul(r, b4))) as u64;
                        }
                    }
                }
            }
        }
        prop_assert!(by_sets <= tuples);
        prop_assert!(tuples <= n * n * rb.len() as u64 + n.pow(4));
        let candidates: Vec<u64> = s.energies.iter().filter(|(&r, _)| r != 0).map(|(_, &e)| e).collect();
        prop_assert_eq!(s.energy, *candidates.iter().min().unwrap());
    }

    #[test]
    fn closure_idempotent_and_monotone((f, (b, extra)) in field_and(|f| (subset(f, 3, false), subset(f, 2, false)).boxed())) {
        prop_assume!(b.iter().any(|e| !e.is_zero()));
        let w = generated_subfield(&b).unwrap();
        prop_assert_eq!(w.replay(&f).unwrap(), w.generated.clone());
        prop_assert_eq!(generated_subfield(&w.generated).unwrap().generated, w.generated.clone());
        let bigger = generated_subfield(&b.union(&extra)).unwrap();
        prop_assert!(w.generated.is_subset(&bigger.generated));
        prop_assert_eq!(w.generated.clone(), w.minimal_subfield(&f).elements);
    }

    #[test]
    fn dyadic_structure((_f, a) in field_and(|f| subset(f, 8, true).boxed())) {
        prop_assume!(a.len() >= 2);
        let (d, points) = dyadic_select(&a).unwrap();
        let n = a.len() as u64;
        prop_assert_eq!(d.energy, brute_mul_energy(&a));
        prop_assert!(d.floor * n * n >= d.mass);
        prop_assert!(d.lines * n * n >= d.mass);
        prop_assert!(4 * d.mass * d.class_count as u64 > d.energy);
        for fiber in points.fibers.values() {
            let len = fiber.len() as u64;
            prop_assert!(len >= d.floor && len < 2 * d.floor);
        }
        let size = points.len() as u64;
        prop_assert!(size >= d.lines * d.floor && size < 2 * d.lines * d.floor);
        let mirrored: BTreeSet<(Elem, Elem)> = points.points.iter().map(|&(x, y)| (y, x)).collect();
        let original: BTreeSet<(Elem, Elem)> = points.points.iter().copied().collect();
        prop_assert_eq!(mirrored, original);
    }

    #[test]
    fn classification_follows_predicates((_f, (a, b)) in field_and(|f| (subset(f, 4, false), subset(f, 4, false)).boxed())) {
        prop_assume!(a.len() >= 2 && b.len() >= 2);
        let c = classify_case(&a, &b).unwrap();
        let p = case_predicates(&a, &b).unwrap();
        let expected = if p[0] {
            if quotient_set(&a).unwrap().is_subset(&quotient_set(&b).unwrap()) {
                CaseLabel::DistinctQuotientsRight
            } else {
                CaseLabel::DistinctQuotientsLeft
            }
        } else if p[1] {
            CaseLabel::NotTranslationClosed
        } else if p[2] {
            CaseLabel::NotContained
        } else if p[3] {
            CaseLabel::NotDilationClosed
        } else {
            CaseLabel::Subfield
        };
        prop_assert_eq!(c.label, expected);
        if c.label == CaseLabel::Subfield {
            prop_assert_eq!(quotient_set(&a).unwrap(), generated_subfield(&a).unwrap().generated);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_is_dilation_invariant(
        (f, (a, c)) in prop::sample::select(vec!["7", "11", "13", "2^4", "3^2"])
            .prop_map(|s| Field::parse(s).unwrap())
            .prop_flat_map(|f| (Just(f.clone()), (subset(&f, 5, true), elem(&f, true))))
    ) {
        prop_assume!(a.len() >= 2);
        let (Ok(t), Ok(u)) = (trace(&a), trace(&a.map(|e| f.mul(c, e)))) else {
            // degenerate sets fail identically for every dilate
            prop_assert_eq!(trace(&a).is_err(), trace(&a.map(|e| f.mul(c, e))).is_err());
            return Ok(());
        };
        prop_assert_eq!(&t.k, &u.k);
        prop_assert_eq!(t.classification.label, u.classification.label);
        prop_assert_eq!(&t.dyadic.class_table, &u.dyadic.class_table);
        prop_assert_eq!(t.pair.a_tilde.clone(), u.pair.a_tilde.clone());
        prop_assert_eq!(t.violations.clone(), u.violations.clone());
    }

    #[test]
    fn search_invariants(p in prop::sample::select(vec![5u64, 7, 11, 13]), m in 2usize..5, seed in 0u64..1000) {
        let f = Field::prime(p).unwrap();
        prop_assume!(m < p as usize);
        let exact_best = exhaustive_min(&f, m, false, u128::MAX).unwrap();
        // brute force over every m-subset of F*, not only those containing 1
        let units: Vec<u32> = (1..p as u32).collect();
        let mut best = u64::MAX;
        for mask in 0u32..(1 << units.len()) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let s = FSet::from_indices(&f, units.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &u)| u as u64)).unwrap();
            let v = sumset(&s, &s).unwrap().len().max(productset(&s, &s).unwrap().len()) as u64;
            best = best.min(v);
        }
        prop_assert_eq!(exact_best.best_value, best);
        // Cauchy-Davenport on the sumset side
        prop_assert!(best >= (p).min(2 * m as u64 - 1));

        let opts = AnnealOptions::new(300, seed, false);
        let r1 = anneal_min(&f, m, &opts).unwrap();
        let r2 = anneal_min(&f, m, &opts).unwrap();
        prop_assert_eq!(&r1.best_set, &r2.best_set);
        prop_assert_eq!(r1.evaluations, r2.evaluations);
        prop_assert!(r1.best_value >= best);

        if let Ok(adm) = exhaustive_min(&f, m, true, u128::MAX) {
            prop_assert!(adm.best_value >= exact_best.best_value);
        }
    }
}
