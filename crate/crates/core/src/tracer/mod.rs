//! Runs the five-case sum-product argument on a concrete set, materializing
//! every intermediate object and auditing each displayed inequality with
//! exact arithmetic.

mod audit;
mod cases;
mod dyadic;
mod pair;

use std::collections::BTreeMap;

use serde::Serialize;

pub use audit::{audit_case, covering_application, ApplicationReport, Audit, AuditKind, CaseAudit, CaseContext, Sign};
pub use cases::{case_predicates, classify_case, CaseLabel, Classification, ClosureChain};
pub use dyadic::{dyadic_select, ClassRow, DyadicSelection, PigeonholeChecks, PointSet};
pub use pair::{popular_pair, PopularPair, Scale};

use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, Rational};
use crate::field::{admissibility_check, AdmissibilityReport, Elem};
use crate::lemmas::{pluennecke_refine_with, RefineMethod, TieBreak};
use crate::setalg::{kfold_sum, productset, sumset, FSet};

/// `max{|A+A|, |A·A|} / |A|`.
pub fn compute_k(a: &FSet) -> Result<Rational> {
    if a.contains(Elem::ZERO) {
        return Err(Error::ContainsZero);
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let sums = sumset(a, a)?.len();
    let products = productset(a, a)?.len();
    Ok(exact::ratio(sums.max(products) as u64, a.len() as u64))
}

#[derive(Debug, Clone, Serialize)]
pub struct FourfoldAudit {
    pub refined: FSet,
    pub method: RefineMethod,
    pub fourfold_size: usize,
    /// `|A+A|^3 / |A|^2` for the input set.
    #[serde(with = "serde_rational")]
    pub pluennecke_bound: Rational,
    #[serde(with = "serde_rational")]
    pub pluennecke_ratio: Rational,
    /// `K^3 |A|`.
    #[serde(with = "serde_rational")]
    pub k_bound: Rational,
    #[serde(with = "serde_rational")]
    pub k_ratio: Rational,
}

/// Picks `A' ⊆ A` with `|A'| >= (1-ε)|A|` minimizing `|A' + A + A + A|`
/// and measures `|A'+A'+A'+A'|` against `|A+A|^3/|A|^2` and `K^3|A|`.
pub fn refine_fourfold(a: &FSet, epsilon: &Rational) -> Result<FourfoldAudit> {
    let k = compute_k(a)?;
    let bs = [a.clone(), a.clone(), a.clone()];
    let refinement = pluennecke_refine_with(a, &bs, epsilon, TieBreak::DilationInvariant)?;
    let refined = refinement.subset;
    let fourfold_size = kfold_sum(&[refined.clone(), refined.clone(), refined.clone(), refined.clone()])?.len();
    let size = exact::int(a.len() as u64);
    let doubling = exact::int(sumset(a, a)?.len() as u64);
    let pluennecke_bound = exact::pow(&doubling, 3) / exact::pow(&size, 2);
    let k_bound = exact::pow(&k, 3) * &size;
    let four = exact::int(fourfold_size as u64);
    Ok(FourfoldAudit {
        refined,
        method: refinement.method,
        fourfold_size,
        pluennecke_ratio: &four / &pluennecke_bound,
        pluennecke_bound,
        k_ratio: &four / &k_bound,
        k_bound,
    })
}

/// `|A|^{1/11} / (log2 |A|)^{5/11}`.
pub fn benchmark(size: usize) -> f64 {
    let s = size as f64;
    s.powf(1.0 / 11.0) / s.log2().powf(5.0 / 11.0)
}

#[derive(Debug, Clone)]
pub struct TraceOptions {
    pub epsilon: Rational,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { epsilon: exact::ratio(1, 10) }
    }
}

/// Structural checks on the point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointChecks {
    /// Every selected line carries between `N` and `2N - 1` points.
    pub fibers_in_class: bool,
    /// `LN <= |P| < 2LN`.
    pub size_in_range: bool,
    /// `P` is symmetric through `y = x`.
    pub symmetric: bool,
    /// `Ã ⊆ A_{x0} ⊆ Ξ` after normalization.
    pub tilde_in_slopes: bool,
    /// `Ã_z ⊆ B_{y0}` for every `z ∈ Ã`.
    pub fibers_in_row: bool,
}

impl PointChecks {
    pub fn holds(&self) -> bool {
        self.fibers_in_class && self.size_in_range && self.symmetric && self.tilde_in_slopes && self.fibers_in_row
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProofTrace {
    pub field: String,
    pub input: FSet,
    #[serde(with = "serde_rational")]
    pub k: Rational,
    pub sum_size: usize,
    pub product_size: usize,
    pub admissibility: AdmissibilityReport,
    pub fourfold: FourfoldAudit,
    pub dyadic: DyadicSelection,
    pub points: PointSet,
    pub point_checks: PointChecks,
    pub pair: PopularPair,
    pub classification: Classification,
    pub case_audit: CaseAudit,
    /// `|A|^{1/11} / (log2|A|)^{5/11}` for the input set.
    pub benchmark: f64,
    pub k_over_benchmark: f64,
    /// Failed checks that contradict a proven statement.
    pub violations: Vec<String>,
}

impl ProofTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

pub fn trace(a: &FSet) -> Result<ProofTrace> {
    trace_with(a, &TraceOptions::default())
}

pub fn trace_with(a: &FSet, options: &TraceOptions) -> Result<ProofTrace> {
    if a.contains(Elem::ZERO) {
        return Err(Error::ContainsZero);
    }
    if a.len() < 2 {
        return Err(Error::TooSmall(format!("trace needs |A| >= 2, got {}", a.len())));
    }
    let f = a.field();
    let k = compute_k(a)?;
    let admissibility = admissibility_check(a)?;
    let fourfold = refine_fourfold(a, &options.epsilon)?;
    let refined = &fourfold.refined;
    let (dyadic, points) = dyadic_select(refined)?;
    let size = refined.len() as u64;
    let scale = Scale { set_size: size, lines: dyadic.lines, floor: dyadic.floor, mass: dyadic.mass };
    let pair = popular_pair(&points, refined, scale)?;

    let floor = dyadic.floor as usize;
    let point_checks = PointChecks {
        fibers_in_class: points.fibers.values().all(|p| p.len() >= floor && p.len() < 2 * floor),
        size_in_range: {
            let ln = (dyadic.lines * dyadic.floor) as usize;
            points.len() >= ln && points.len() < 2 * ln
        },
        symmetric: points.transpose() == points,
        tilde_in_slopes: pair.a_tilde.is_subset(&pair.column) && pair.column.is_subset(&points.slopes),
        fibers_in_row: pair.a_tilde_fibers.values().all(|s| s.is_subset(&pair.row)),
    };

    let universe = refined.map(|e| f.mul(e, pair.scale));
    let fibers: BTreeMap<Elem, FSet> = points
        .fibers
        .iter()
        .map(|(&slope, s)| (slope, s.map(|e| f.mul(e, pair.scale))))
        .collect();
    let classification = classify_case(&pair.a_tilde, &pair.row)?;
    let ctx = CaseContext {
        universe: &universe,
        pair: &pair,
        fibers: &fibers,
        k: &k,
        lines: dyadic.lines,
        floor: dyadic.floor,
        mass: dyadic.mass,
        doubling_size: sumset(&universe, &universe)?.len() as u64,
        fourfold_size: fourfold.fourfold_size as u64,
    };
    let case_audit = audit_case(&ctx, &classification)?;

    let mut violations = Vec::new();
    if !dyadic.checks.provable() {
        violations.push("dyadic pigeonhole".to_string());
    }
    if !point_checks.holds() {
        violations.push("point set structure".to_string());
    }
    if let Some(chain) = &case_audit.closure {
        if !chain.holds() {
            violations.push("closure chain".to_string());
        }
    }
    violations.extend(
        case_audit
            .audits
            .iter()
            .filter(|a| a.violated(admissibility.passed))
            .map(|a| a.id.clone()),
    );

    let bench = benchmark(a.len());
    Ok(ProofTrace {
        field: f.to_string(),
        input: a.clone(),
        sum_size: sumset(a, a)?.len(),
        product_size: productset(a, a)?.len(),
        k_over_benchmark: exact::to_f64(&k) / bench,
        k,
        admissibility,
        fourfold,
        dyadic,
        points,
        point_checks,
        pair,
        classification,
        case_audit,
        benchmark: bench,
        violations,
    })
}
