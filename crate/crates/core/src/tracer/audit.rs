use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::cases::{CaseLabel, Classification, ClosureChain};
use super::pair::PopularPair;
use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, serde_rational_opt, Rational};
use crate::field::Elem;
use crate::lemmas::{cover_greedy, generated_subfield, pluennecke_refine_with, rudnev_select, CoveringReport, RudnevSelection, TieBreak};
use crate::setalg::{dilate, kfold_sum, sumset, FSet};

/// How an audited inequality is expected to behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditKind {
    /// `lhs <= rhs` always; a failure is a bug.
    Exact,
    /// `lhs == rhs` always; a failure is a bug.
    Equality,
    /// `lhs <= rhs` whenever the input set is admissible.
    Conditional,
    /// `lhs << rhs` with an unspecified constant; `ratio` is the measured
    /// constant and `holds` compares with constant 1.
    Asymptotic,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub id: String,
    pub statement: String,
    pub kind: AuditKind,
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    #[serde(with = "serde_rational_opt")]
    pub ratio: Option<Rational>,
    pub holds: bool,
}

impl Audit {
    pub fn new(id: &str, statement: &str, kind: AuditKind, lhs: Rational, rhs: Rational) -> Audit {
        let holds = match kind {
            AuditKind::Equality => lhs == rhs,
            _ => lhs <= rhs,
        };
        Audit {
            id: id.to_string(),
            statement: statement.to_string(),
            kind,
            ratio: exact::quotient(&lhs, &rhs),
            lhs,
            rhs,
            holds,
        }
    }

    /// Whether this audit failing contradicts a proven statement.
    pub fn violated(&self, admissible: bool) -> bool {
        !self.holds
            && match self.kind {
                AuditKind::Exact | AuditKind::Equality => true,
                AuditKind::Conditional => admissible,
                AuditKind::Asymptotic => false,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        })
    }
}

/// Covering `±ξA'` by translates of `ξP_ξ ⊆ A` at 90%.
#[derive(Debug, Clone, Serialize)]
pub struct ApplicationReport {
    pub xi: Elem,
    pub sign: Sign,
    pub report: CoveringReport,
    /// Elements `a ∈ A'` with `±ξa` covered.
    pub pulled_back: FSet,
    /// `translate_count` against `K|A|/N`.
    pub budget: Audit,
}

/// Covers `sign·ξ·A'` by translates of `ξ·P_ξ` with `ε = 1/10`.
pub fn covering_application(
    a_prime: &FSet,
    xi: Elem,
    fibers: &BTreeMap<Elem, FSet>,
    sign: Sign,
    budget: &Rational,
) -> Result<ApplicationReport> {
    let Some(fiber) = fibers.get(&xi) else {
        return Err(Error::SlopeNotInXi(xi.0));
    };
    let f = a_prime.field();
    let factor = match sign {
        Sign::Plus => xi,
        Sign::Minus => f.neg(xi),
    };
    let target = dilate(factor, a_prime)?;
    let cover = dilate(xi, fiber)?;
    let report = cover_greedy(&target, &cover, &exact::ratio(1, 10))?;
    let pulled_back = FSet::from_elems(f, a_prime.iter().filter(|&a| report.covered.contains(f.mul(factor, a))));
    let budget = Audit::new(
        "apply",
        "translates <= K|A|/N",
        AuditKind::Asymptotic,
        exact::int(report.translate_count as u64),
        budget.clone(),
    );
    Ok(ApplicationReport { xi, sign, report, pulled_back, budget })
}

/// Everything the case audits measure against, in normalized coordinates.
pub struct CaseContext<'a> {
    /// The refined set divided by `x0`.
    pub universe: &'a FSet,
    pub pair: &'a PopularPair,
    /// Slope fibers `P_ξ` divided by `x0`.
    pub fibers: &'a BTreeMap<Elem, FSet>,
    pub k: &'a Rational,
    pub lines: u64,
    pub floor: u64,
    pub mass: u64,
    pub doubling_size: u64,
    pub fourfold_size: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseAudit {
    pub label: CaseLabel,
    pub audits: Vec<Audit>,
    pub applications: Vec<ApplicationReport>,
    /// The refined subsets built for the case (`B'`, `Ã'`, `Y1`, ...).
    pub subsets: BTreeMap<String, FSet>,
    pub closure: Option<ClosureChain>,
    pub rudnev: Option<RudnevSelection>,
}

fn n(v: usize) -> Rational {
    exact::int(v as u64)
}

impl CaseContext<'_> {
    fn size(&self) -> Rational {
        n(self.universe.len())
    }

    /// `K|A|/N`.
    fn cover_budget(&self) -> Rational {
        self.k * self.size() / exact::int(self.floor)
    }

    /// `LN/|A|`.
    fn popularity(&self) -> Rational {
        exact::int(self.lines * self.floor) / self.size()
    }

    /// `LM/|A|^3`.
    fn tilde_scale(&self) -> Rational {
        exact::int(self.lines * self.mass) / exact::pow(&self.size(), 3)
    }

    /// `LMN/|A|^4`.
    fn fiber_scale(&self) -> Rational {
        exact::int(self.lines * self.mass * self.floor) / exact::pow(&self.size(), 4)
    }

    fn fourfold(&self) -> Rational {
        exact::int(self.fourfold_size)
    }
}

struct Builder<'c, 'a> {
    ctx: &'c CaseContext<'a>,
    label: CaseLabel,
    audits: Vec<Audit>,
    applications: Vec<ApplicationReport>,
    subsets: BTreeMap<String, FSet>,
}

impl Builder<'_, '_> {
    fn audit(&mut self, id: &str, statement: &str, kind: AuditKind, lhs: Rational, rhs: Rational) {
        let id = format!("{}/{}", self.label, id);
        self.audits.push(Audit::new(&id, statement, kind, lhs, rhs));
    }

    /// Covers `sign·ξ·base` and returns the pulled-back part.
    fn cover(&mut self, base: &FSet, xi: Elem, sign: Sign) -> Result<FSet> {
        let mut app = covering_application(base, xi, self.ctx.fibers, sign, &self.ctx.cover_budget())?;
        app.budget.id = format!("{}/apply{}", self.label, self.applications.len() + 1);
        let pulled = app.pulled_back.clone();
        self.audits.push(app.budget.clone());
        self.applications.push(app);
        Ok(pulled)
    }

    /// Product of the translate counts of the applications so far.
    fn translate_product(&self) -> Rational {
        self.applications
            .iter()
            .fold(exact::int(1), |acc, a| acc * n(a.report.translate_count))
    }

    fn keep(&mut self, name: &str, set: &FSet) {
        self.subsets.insert(name.to_string(), set.clone());
    }
}

/// `|c1 S1 + c2 S2 + ...|` for nonzero coefficients.
fn dilate_sum(terms: &[(Elem, &FSet)]) -> Result<usize> {
    let sets = terms.iter().map(|&(c, s)| dilate(c, s)).collect::<Result<Vec<_>>>()?;
    Ok(kfold_sum(&sets)?.len())
}

pub fn audit_case(ctx: &CaseContext<'_>, class: &Classification) -> Result<CaseAudit> {
    let mut b = Builder {
        ctx,
        label: class.label,
        audits: Vec::new(),
        applications: Vec::new(),
        subsets: BTreeMap::new(),
    };
    let f = ctx.universe.field();
    let neg = |e: Elem| f.neg(e);
    let size = ctx.size();
    let k = ctx.k.clone();
    let budget = ctx.cover_budget();
    let fourfold = ctx.fourfold();
    let pair = ctx.pair;
    let rep = &class.representation;
    let mut closure = None;
    let mut rudnev = None;
    match class.label {
        CaseLabel::DistinctQuotientsLeft => {
            let r = class.witness.expect("case 1.1 has a witness");
            let [a1, a2, a3, a4] = [rep[0], rep[1], rep[2], rep[3]];
            let row = &pair.row;
            let mut sub = row.clone();
            for (xi, sign) in [(a1, Sign::Plus), (a2, Sign::Minus), (a3, Sign::Plus), (a4, Sign::Minus)] {
                sub = sub.intersection(&b.cover(row, xi, sign)?);
            }
            b.keep("row_refined", &sub);
            let twisted = sumset(&sub, &dilate(r, &sub)?)?.len();
            b.audit("trivial", "|B'+rB'| = |B'|^2", AuditKind::Equality, n(twisted), n(sub.len().pow(2)));
            let four = dilate_sum(&[(a1, &sub), (neg(a2), &sub), (a3, &sub), (neg(a4), &sub)])?;
            b.audit("dilate", "|B'+rB'| <= |a1B'-a2B'+a3B'-a4B'|", AuditKind::Exact, n(twisted), n(four));
            b.audit("cover", "|a1B'-a2B'+a3B'-a4B'| <= T1T2T3T4 |A+A+A+A|", AuditKind::Exact, n(four), b.translate_product() * &fourfold);
            let pop = ctx.popularity();
            b.audit("lower", "(LN/|A|)^2 << |a1B'-a2B'+a3B'-a4B'|", AuditKind::Asymptotic, exact::pow(&pop, 2), n(four));
            b.audit("chain", "(LN/|A|)^2 << (K|A|/N)^4 K^3|A|", AuditKind::Asymptotic, exact::pow(&pop, 2), exact::pow(&budget, 4) * exact::pow(&k, 3) * &size);
            b.audit("final", "M^2N^2 << K^7|A|^7", AuditKind::Asymptotic, exact::int(ctx.mass * ctx.mass * ctx.floor * ctx.floor), exact::pow(&k, 7) * exact::pow(&size, 7));
        }
        CaseLabel::DistinctQuotientsRight => {
            let r = class.witness.expect("case 1.2 has a witness");
            let y0 = pair.y0_normalized;
            let slopes: Vec<Elem> = rep.iter().map(|&e| f.div(e, y0).expect("y0 != 0")).collect();
            let tilde = &pair.a_tilde;
            let mut sub = tilde.clone();
            for (i, &xi) in slopes.iter().enumerate() {
                let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
                sub = sub.intersection(&b.cover(tilde, xi, sign)?);
            }
            b.keep("tilde_refined", &sub);
            let twisted = sumset(&sub, &dilate(r, &sub)?)?.len();
            b.audit("trivial", "|Ã'+rÃ'| = |Ã'|^2", AuditKind::Equality, n(twisted), n(sub.len().pow(2)));
            let terms: Vec<(Elem, &FSet)> = slopes
                .iter()
                .enumerate()
                .map(|(i, &s)| (if i % 2 == 0 { s } else { neg(s) }, &sub))
                .collect();
            let four = dilate_sum(&terms)?;
            b.audit("dilate", "|Ã'+rÃ'| <= |(p/y0)Ã'-(q/y0)Ã'+(s/y0)Ã'-(t/y0)Ã'|", AuditKind::Exact, n(twisted), n(four));
            b.audit("cover", "|(p/y0)Ã'-...-(t/y0)Ã'| <= T1T2T3T4 |A+A+A+A|", AuditKind::Exact, n(four), b.translate_product() * &fourfold);
            let ts = ctx.tilde_scale();
            b.audit("lower", "(LM/|A|^3)^2 << |Ã'+rÃ'|", AuditKind::Asymptotic, exact::pow(&ts, 2), n(twisted));
            b.audit("chain", "(LM/|A|^3)^2 << K^7|A|^5/N^4", AuditKind::Asymptotic, exact::pow(&ts, 2), exact::pow(&k, 7) * exact::pow(&size, 5) / exact::int(ctx.floor.pow(4)));
            b.audit("final", "M^4 << K^7|A|^11", AuditKind::Asymptotic, exact::int(ctx.mass.pow(4)), exact::pow(&k, 7) * exact::pow(&size, 11));
        }
        CaseLabel::NotTranslationClosed => {
            let r = class.witness.expect("case 2 has a witness");
            let [p, q, s, t] = [rep[0], rep[1], rep[2], rep[3]];
            let rho = f.sub(r, Elem::ONE);
            let row = &pair.row;
            let fiber_p = pair.a_tilde_fibers.get(&p).expect("p ∈ Ã");
            let row_s = b.cover(row, s, Sign::Plus)?;
            let row_t = b.cover(row, t, Sign::Minus)?;
            let row_sub = row.intersection(&row_s).intersection(&row_t);
            let fiber_sub = b.cover(fiber_p, q, Sign::Minus)?;
            let rho_fiber = dilate(rho, &fiber_sub)?;
            let refined = pluennecke_refine_with(&row_sub, &[fiber_sub.clone(), rho_fiber.clone()], &exact::ratio(1, 10), TieBreak::DilationInvariant)?;
            let row_ref = refined.subset.clone();
            b.keep("row_refined", &row_sub);
            b.keep("fiber_refined", &fiber_sub);
            b.keep("row_refined_twice", &row_ref);
            let triple = kfold_sum(&[row_ref.clone(), fiber_sub.clone(), rho_fiber.clone()])?.len();
            let row_plus_fiber = sumset(&row_sub, &fiber_sub)?.len();
            let row_plus_rho = sumset(&row_sub, &rho_fiber)?.len();
            b.audit("pluennecke", "|B''+Ã'+ρÃ'| << |B'+Ã'||B'+ρÃ'|/|B'|", AuditKind::Asymptotic, n(triple), n(row_plus_fiber * row_plus_rho) / n(row_sub.len()));
            b.audit("pluennecke-display", "|B''+Ã'+ρÃ'| << |A+A||B'+ρÃ'|/|B_y0|", AuditKind::Asymptotic, n(triple), exact::int(ctx.doubling_size) * n(row_plus_rho) / n(row.len()));
            let twisted = sumset(&row_ref, &dilate(r, &fiber_sub)?)?.len();
            b.audit("trivial", "|B''+rÃ'| = |B''||Ã'|", AuditKind::Equality, n(twisted), n(row_ref.len() * fiber_sub.len()));
            b.audit("contain", "|B''+rÃ'| <= |B''+Ã'+ρÃ'|", AuditKind::Exact, n(twisted), n(triple));
            let pop = ctx.popularity();
            let fs = ctx.fiber_scale();
            b.audit("sizes", "(LN/|A|)(LMN/|A|^4) << |B''||Ã'|", AuditKind::Asymptotic, &pop * &fs, n(row_ref.len() * fiber_sub.len()));
            b.audit("messy", "(LN/|A|)^2(LMN/|A|^4) << K|A||B'+ρÃ'|", AuditKind::Asymptotic, exact::pow(&pop, 2) * &fs, &k * &size * n(row_plus_rho));
            let four = dilate_sum(&[(s, &row_sub), (neg(t), &row_sub), (p, &fiber_sub), (neg(q), &fiber_sub)])?;
            b.audit("dilate", "|B'+ρÃ'| <= |sB'-tB'+pÃ'-qÃ'|", AuditKind::Exact, n(row_plus_rho), n(four));
            let with_a = kfold_sum(&[dilate(s, &row_sub)?, dilate(neg(t), &row_sub)?, ctx.universe.clone(), dilate(neg(q), &fiber_sub)?])?.len();
            b.audit("inclusion", "|sB'-tB'+pÃ'-qÃ'| <= |sB'-tB'+A-qÃ'|", AuditKind::Exact, n(four), n(with_a));
            b.audit("cover", "|sB'-tB'+A-qÃ'| <= TsTtTq |A+A+A+A|", AuditKind::Exact, n(with_a), b.translate_product() * &fourfold);
            b.audit("cover-bound", "|B'+ρÃ'| << K^6|A|^4/N^3", AuditKind::Asymptotic, n(row_plus_rho), exact::pow(&k, 6) * exact::pow(&size, 4) / exact::int(ctx.floor.pow(3)));
            b.audit("final", "M^4 << K^7|A|^11", AuditKind::Asymptotic, exact::int(ctx.mass.pow(4)), exact::pow(&k, 7) * exact::pow(&size, 11));
        }
        CaseLabel::NotContained => {
            let z = class.witness.expect("case 3 has a witness");
            let row = &pair.row;
            let fiber = pair.a_tilde_fibers.get(&z).expect("z ∈ Ã");
            b.keep("fiber", fiber);
            let twisted = sumset(row, &dilate(z, fiber)?)?.len();
            b.audit("trivial", "|B_y0+zÃ_z| = |B_y0||Ã_z|", AuditKind::Equality, n(twisted), n(row.len() * fiber.len()));
            b.audit("inclusion", "|B_y0+zÃ_z| <= |A+A|", AuditKind::Exact, n(twisted), exact::int(ctx.doubling_size));
            b.audit("sizes", "(LN/|A|)(LMN/|A|^4) << K|A|", AuditKind::Asymptotic, ctx.popularity() * ctx.fiber_scale(), &k * &size);
        }
        CaseLabel::NotDilationClosed => {
            let r = class.witness.expect("case 4 has a witness");
            let [a, bb, c, d, e] = [rep[0], rep[1], rep[2], rep[3], rep[4]];
            let rho = f.div(f.sub(bb, c), f.sub(d, e)).expect("d != e");
            let fiber_a = pair.a_tilde_fibers.get(&a).expect("a ∈ Ã");
            let fiber_d = pair.a_tilde_fibers.get(&d).expect("d ∈ Ã");
            let line_b = ctx.fibers.get(&bb).ok_or(Error::SlopeNotInXi(bb.0))?;
            let y2 = b.cover(line_b, c, Sign::Minus)?;
            let y1 = b.cover(fiber_d, e, Sign::Minus)?;
            b.keep("y1", &y1);
            b.keep("y2", &y2);
            let twisted = sumset(&y1, &dilate(r, fiber_a)?)?.len();
            b.audit("trivial", "|Y1+rÃ_a| = |Y1||Ã_a|", AuditKind::Equality, n(twisted), n(y1.len() * fiber_a.len()));
            let y1_rho_y2 = sumset(&y1, &dilate(rho, &y2)?)?.len();
            let a_fiber_y2 = sumset(&dilate(a, fiber_a)?, &y2)?.len();
            b.audit("ruzsa", "|Y1||Ã_a||Y2| << |Y1+ρY2||aÃ_a+Y2|", AuditKind::Asymptotic, n(y1.len() * fiber_a.len() * y2.len()), n(y1_rho_y2 * a_fiber_y2));
            let four = dilate_sum(&[(d, &y1), (neg(e), &y1), (bb, &y2), (neg(c), &y2)])?;
            b.audit("dilate", "|Y1+ρY2| <= |dY1-eY1+bY2-cY2|", AuditKind::Exact, n(y1_rho_y2), n(four));
            b.audit("inclusion", "|aÃ_a+Y2| <= |A+A|", AuditKind::Exact, n(a_fiber_y2), exact::int(ctx.doubling_size));
            b.audit("cover", "|dY1-eY1+bY2-cY2| <= TcTe |A+A+A+A|", AuditKind::Exact, n(four), b.translate_product() * &fourfold);
            b.audit("sizes-chain", "|Ã_d||Ã_a|N << |A+A+A+A||A+A|(K|A|/N)^2", AuditKind::Asymptotic, n(fiber_d.len() * fiber_a.len()) * exact::int(ctx.floor), &fourfold * exact::int(ctx.doubling_size) * exact::pow(&budget, 2));
            let fs = ctx.fiber_scale();
            b.audit("lower", "(LMN/|A|^4)^2 N^3 << K^6|A|^4", AuditKind::Asymptotic, exact::pow(&fs, 2) * exact::int(ctx.floor.pow(3)), exact::pow(&k, 6) * exact::pow(&size, 4));
            b.audit("final", "M^4 N << K^6|A|^12", AuditKind::Asymptotic, exact::int(ctx.mass.pow(4) * ctx.floor), exact::pow(&k, 6) * exact::pow(&size, 12));
        }
        CaseLabel::Subfield => {
            let tilde = &pair.a_tilde;
            let chain = ClosureChain::verify(tilde)?;
            let generated = generated_subfield(tilde)?.generated;
            let quotient = &class.quotient_tilde;
            b.audit("generated", "|R(Ã)| = |F_Ã|", AuditKind::Equality, n(quotient.len()), n(generated.len()));
            let meet = generated.intersection(ctx.universe).len();
            b.audit("admissible", "|F_Ã ∩ A|^2 <= |F_Ã|", AuditKind::Conditional, n(meet * meet), n(generated.len()));
            b.audit("contained", "|Ã|^2 <= |F_Ã ∩ A|^2", AuditKind::Exact, n(tilde.len().pow(2)), n(meet * meet));
            b.audit("quotient-size", "|Ã|^2 <= |R(Ã)|", AuditKind::Conditional, n(tilde.len().pow(2)), n(quotient.len()));
            let sel = rudnev_select(tilde)?;
            let [z1, z2, z3, z4] = sel.witnesses;
            let mut sub = tilde.clone();
            for (xi, sign) in [(z1, Sign::Plus), (z2, Sign::Minus), (z3, Sign::Plus), (z4, Sign::Minus)] {
                sub = sub.intersection(&b.cover(tilde, xi, sign)?);
            }
            b.keep("tilde_refined", &sub);
            b.audit("floor", "0.6|Ã| <= |Ã'|", AuditKind::Exact, exact::ratio(3, 5) * n(tilde.len()), n(sub.len()));
            let check = sel.check_subset(tilde, &sub)?;
            b.audit("energy", "|Ã'|^4/E(Ã', r̂Ã') <= |Ã'+r̂Ã'|", AuditKind::Exact, check.lhs, check.rhs);
            let two = dilate_sum(&[(f.sub(z1, z2), &sub), (f.sub(z3, z4), &sub)])?;
            b.audit("lower", "|Ã|^2 << |(z1-z2)Ã'+(z3-z4)Ã'|", AuditKind::Asymptotic, n(tilde.len().pow(2)), n(two));
            let four = dilate_sum(&[(z1, &sub), (neg(z2), &sub), (z3, &sub), (neg(z4), &sub)])?;
            b.audit("dilate", "|(z1-z2)Ã'+(z3-z4)Ã'| <= |z1Ã'-z2Ã'+z3Ã'-z4Ã'|", AuditKind::Exact, n(two), n(four));
            b.audit("cover", "|z1Ã'-z2Ã'+z3Ã'-z4Ã'| <= T1T2T3T4 |A+A+A+A|", AuditKind::Exact, n(four), b.translate_product() * &fourfold);
            b.audit("final", "M^4 << |A|^11 K^7", AuditKind::Asymptotic, exact::int(ctx.mass.pow(4)), exact::pow(&size, 11) * exact::pow(&k, 7));
            closure = Some(chain);
            rudnev = Some(sel);
        }
    }
    Ok(CaseAudit {
        label: class.label,
        audits: b.audits,
        applications: b.applications,
        subsets: b.subsets,
        closure,
        rudnev,
    })
}
