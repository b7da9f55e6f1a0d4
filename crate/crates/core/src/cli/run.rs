use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{parse_epsilon, parse_field, Command, Format, Lemma, RunConfig, SetOp};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::field::{admissibility_check, Field};
use crate::lemmas::{
    cover_greedy, cover_min_oracle, generated_subfield, pluennecke_check, pluennecke_refine, rudnev_select, run_suite,
    Suite, COVER_ORACLE_LIMIT,
};
use crate::search::{anneal_min, binomial, exhaustive_min, exponent_chart, write_csv, AnnealOptions, ChartRow, SearchRecord};
use crate::setalg::{
    additive_energy, difference_set, dilate, kfold_sum, multiplicative_energy, productset, quotient_set, ratio_set,
    sumset, translate, FSet,
};
use crate::tracer::{compute_k, trace_with, TraceOptions};

/// How a run ended when no operational error occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A checked inequality or invariant failed.
    Violation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 2,
        }
    }

    fn from_holds(holds: bool) -> Status {
        if holds {
            Status::Ok
        } else {
            Status::Violation
        }
    }
}

/// Result of one lemma check, on an instance or as a suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub lemma: String,
    pub inputs: BTreeMap<String, Value>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub holds: bool,
    pub witnesses: Value,
    pub measured_constants: BTreeMap<String, String>,
}

/// Runs `config`, writing the primary output to `out`. File outputs named
/// in the config are written as well.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<Status> {
    config.validate()?;
    match config.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            pool.install(|| dispatch(config))
        }
        None => dispatch(config),
    }
    .and_then(|(status, text)| {
        out.write_all(text.as_bytes())?;
        out.flush()?;
        Ok(status)
    })
}

fn dispatch(config: &RunConfig) -> Result<(Status, String)> {
    let seed = config.seed;
    let (status, text) = match &config.command {
        Command::Field { field } => (Status::Ok, field_cmd(&parse_field(field)?, text_or_json(config.format)?)?),
        Command::Setops { field, op, a, b, scalar } => {
            let f = parse_field(field)?;
            let a = FSet::parse(&f, a)?;
            let b = b.as_deref().map(|b| FSet::parse(&f, b)).transpose()?;
            (Status::Ok, setops_cmd(*op, &a, b.as_ref(), *scalar, text_or_json(config.format)?)?)
        }
        Command::Verify { lemma, field, x, b, y, epsilon, max_size } => {
            let f = parse_field(field)?;
            let format = text_or_json(config.format)?;
            let instance = x.is_some() || y.is_some() || !b.is_empty();
            let reports = if instance {
                let parse = |s: &String| FSet::parse(&f, s);
                let x = x.as_ref().map(parse).transpose()?;
                let y = y.as_ref().map(parse).transpose()?;
                let bs = b.iter().map(parse).collect::<Result<Vec<_>>>()?;
                vec![verify_instance(*lemma, x, &bs, y, &parse_epsilon(epsilon)?)?]
            } else {
                verify_suites(*lemma, &f, *max_size)?
            };
            let status = Status::from_holds(reports.iter().all(|r| r.holds));
            let text = match format {
                Format::Json if instance => to_json(&reports[0]),
                Format::Json => to_json(&reports),
                _ => reports.iter().map(report_text).collect(),
            };
            (status, text)
        }
        Command::Trace { field, set, epsilon, trace_out } => {
            let f = parse_field(field)?;
            let a = FSet::parse(&f, set)?;
            let format = text_or_json(config.format)?;
            let t = trace_with(&a, &TraceOptions { epsilon: parse_epsilon(epsilon)? })?;
            let json = t.to_json() + "\n";
            if let Some(path) = trace_out {
                write_file(path, &json)?;
            }
            let text = match format {
                Format::Json => json,
                _ => trace_text(&t),
            };
            (Status::from_holds(t.violations.is_empty()), text)
        }
        Command::Search { field, m, exhaustive, admissible, iters, budget, output } => {
            let f = parse_field(field)?;
            let record = if *exhaustive {
                exhaustive_min(&f, *m, *admissible, *budget as u128)?
            } else {
                anneal_min(&f, *m, &AnnealOptions::new(*iters, seed, *admissible))?
            };
            let text = records_output(&[record], config.format.unwrap_or(Format::Csv))?;
            (Status::Ok, emit_to(output.as_deref(), text)?)
        }
        Command::Chart { fields, m, admissible, iters, budget, output } => {
            let mut records = Vec::new();
            for spec in fields {
                let f = parse_field(spec)?;
                for &size in m {
                    if let Some(r) = chart_point(&f, size, *admissible, *iters, *budget, seed)? {
                        records.push(r);
                    }
                }
            }
            let text = records_output(&records, config.format.unwrap_or(Format::Csv))?;
            (Status::Ok, emit_to(output.as_deref(), text)?)
        }
    };
    Ok((status, text))
}

fn text_or_json(format: Option<Format>) -> Result<Format> {
    match format.unwrap_or(Format::Text) {
        Format::Csv => Err(Error::InvalidArgument("csv output is available for search and chart only".into())),
        f => Ok(f),
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `text` to `path` when given and returns what goes to stdout.
fn emit_to(path: Option<&Path>, text: String) -> Result<String> {
    match path {
        Some(p) => {
            write_file(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn field_cmd(f: &Field, format: Format) -> Result<String> {
    let subfields: Vec<Value> = f
        .subfields()
        .iter()
        .map(|s| json!({"degree": s.degree, "order": s.order, "elements": s.elements}))
        .collect();
    if format == Format::Json {
        return Ok(to_json(&json!({
            "field": f.to_string(),
            "p": f.p(),
            "n": f.n(),
            "order": f.order(),
            "modulus": f.modulus(),
            "x": f.generator_x(),
            "subfields": subfields,
        })));
    }
    let mut s = String::new();
    let _ = writeln!(s, "field      {f}");
    let _ = writeln!(s, "order      {} = {}^{}", f.order(), f.p(), f.n());
    let _ = writeln!(s, "modulus    {:?}", f.modulus());
    for sub in f.subfields() {
        let _ = writeln!(s, "subfield   degree {} order {}", sub.degree, sub.order);
        if sub.order <= 64 {
            let _ = writeln!(s, "           {}", sub.elements);
        }
    }
    Ok(s)
}

fn setops_cmd(op: SetOp, a: &FSet, b: Option<&FSet>, scalar: Option<u64>, format: Format) -> Result<String> {
    let f = a.field();
    let b = || b.ok_or_else(|| Error::InvalidArgument("--b is required".into()));
    let scalar = || {
        scalar
            .ok_or_else(|| Error::InvalidArgument("--scalar is required".into()))
            .and_then(|s| f.elem(s))
    };
    let set_out = |s: FSet| match format {
        Format::Json => to_json(&s.export()),
        _ => format!("{s}\nsize {}\n", s.len()),
    };
    let value_out = |name: &str, v: Value| match format {
        Format::Json => to_json(&json!({"op": name, "value": v})),
        _ => format!("{}\n", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())),
    };
    Ok(match op {
        SetOp::Sum => set_out(sumset(a, b()?)?),
        SetOp::Diff => set_out(difference_set(a, b()?)?),
        SetOp::Product => set_out(productset(a, b()?)?),
        SetOp::Ratio => set_out(ratio_set(a, b()?)?),
        SetOp::Quotient => set_out(quotient_set(a)?),
        SetOp::Dilate => set_out(dilate(scalar()?, a)?),
        SetOp::Translate => set_out(translate(scalar()?, a)),
        SetOp::Energy => value_out("energy", json!(additive_energy(a, b()?)?.value)),
        SetOp::Menergy => value_out("menergy", json!(multiplicative_energy(a)?.value)),
        SetOp::K => value_out("k", json!(compute_k(a)?.to_string())),
        SetOp::Admissible => {
            let r = admissibility_check(a)?;
            match format {
                Format::Json => to_json(&r),
                _ => format!(
                    "admissible {}\nworst subfield order {} coset {} intersection {} threshold {}\n",
                    r.passed, r.worst_subfield_order, r.worst_coset_rep, r.worst_intersection, r.threshold
                ),
            }
        }
        SetOp::Closure => {
            let w = generated_subfield(a)?;
            match format {
                Format::Json => to_json(&w),
                _ => format!("{}\nsize {}\nsteps {}\n", w.generated, w.generated.len(), w.program.len()),
            }
        }
    })
}

fn q(v: &Rational) -> String {
    v.to_string()
}

fn set_value(s: &FSet) -> Value {
    json!(s.indices())
}

fn require<'a>(v: Option<&'a FSet>, what: &str, lemma: Lemma) -> Result<&'a FSet> {
    v.ok_or_else(|| Error::InvalidArgument(format!("{} needs {what}", lemma.as_str())))
}

/// Checks one lemma on explicitly given sets.
pub fn verify_instance(
    lemma: Lemma,
    x: Option<FSet>,
    bs: &[FSet],
    y: Option<FSet>,
    epsilon: &Rational,
) -> Result<VerificationReport> {
    let mut inputs = BTreeMap::new();
    let mut constants = BTreeMap::new();
    let report = |lhs: Option<String>, rhs, holds, witnesses, inputs, constants| VerificationReport {
        lemma: lemma.as_str().to_string(),
        inputs,
        lhs,
        rhs,
        holds,
        witnesses,
        measured_constants: constants,
    };
    match lemma {
        Lemma::Pluennecke | Lemma::Refine => {
            let x = require(x.as_ref(), "--x", lemma)?;
            if bs.is_empty() {
                return Err(Error::InvalidArgument(format!("{} needs at least one --b", lemma.as_str())));
            }
            inputs.insert("field".into(), json!(x.field().to_string()));
            inputs.insert("x".into(), set_value(x));
            inputs.insert("b".into(), Value::Array(bs.iter().map(set_value).collect()));
            if lemma == Lemma::Pluennecke {
                let c = pluennecke_check(x, bs)?;
                constants.insert("ratio".into(), q(&(&c.lhs / &c.rhs)));
                let witnesses = json!({"sumset": set_value(&kfold_sum(bs)?)});
                Ok(report(Some(q(&c.lhs)), Some(q(&c.rhs)), c.holds, witnesses, inputs, constants))
            } else {
                inputs.insert("epsilon".into(), json!(q(epsilon)));
                let r = pluennecke_refine(x, bs, epsilon)?;
                constants.insert("measured_c".into(), q(&r.measured_c));
                let holds = r.subset.is_subset(x) && r.subset.len() >= r.min_size;
                let witnesses = json!({"subset": set_value(&r.subset), "min_size": r.min_size, "method": r.method});
                let lhs = exact::int(r.sum_size as u64);
                Ok(report(Some(q(&lhs)), Some(q(&r.bound)), holds, witnesses, inputs, constants))
            }
        }
        Lemma::Cover => {
            let x = require(x.as_ref(), "--x", lemma)?;
            let y = require(y.as_ref().or(bs.first()), "--y", lemma)?;
            inputs.insert("field".into(), json!(x.field().to_string()));
            inputs.insert("x".into(), set_value(x));
            inputs.insert("y".into(), set_value(y));
            inputs.insert("epsilon".into(), json!(q(epsilon)));
            let r = cover_greedy(x, y, epsilon)?;
            let mut holds = r.covered.len() >= r.required && r.covered.is_subset(x);
            constants.insert("measured_c".into(), q(&r.measured_c));
            if x.len() <= COVER_ORACLE_LIMIT {
                let best = cover_min_oracle(x, y, epsilon)?;
                holds &= r.translate_count >= best;
                constants.insert("oracle_translates".into(), best.to_string());
            }
            let witnesses = json!({
                "translates": r.translates,
                "covered": set_value(&r.covered),
                "required": r.required,
            });
            let lhs = exact::int(r.translate_count as u64);
            Ok(report(Some(q(&lhs)), Some(q(&r.benchmark)), holds, witnesses, inputs, constants))
        }
        Lemma::Rudnev => {
            let b = require(bs.first().or(x.as_ref()), "--b", lemma)?;
            inputs.insert("field".into(), json!(b.field().to_string()));
            inputs.insert("b".into(), set_value(b));
            let r = rudnev_select(b)?;
            let check = r.check_subset(b, b)?;
            constants.insert("energy".into(), r.energy.to_string());
            constants.insert("candidate_average".into(), q(&r.candidate_average));
            constants.insert("quotient_size".into(), r.quotient_size.to_string());
            let holds = r.sum_identity_holds && r.below_candidate_average && check.holds;
            let witnesses = json!({"r_hat": r.r_hat, "quadruple": r.witnesses, "energies": r.energies});
            Ok(report(
                Some(r.sum_identity_lhs.to_string()),
                Some(r.sum_identity_rhs.to_string()),
                holds,
                witnesses,
                inputs,
                constants,
            ))
        }
        Lemma::Subfield => {
            let b = require(bs.first().or(x.as_ref()), "--b", lemma)?;
            let f = b.field();
            inputs.insert("field".into(), json!(f.to_string()));
            inputs.insert("b".into(), set_value(b));
            let w = generated_subfield(b)?;
            let minimal = w.minimal_subfield(f);
            let replayed = w.replay(f)?;
            let holds = w.generated == minimal.elements && replayed == w.generated;
            constants.insert("steps".into(), w.program.len().to_string());
            constants.insert("subfield_degree".into(), minimal.degree.to_string());
            let witnesses = json!({"generated": set_value(&w.generated), "program": w.program});
            Ok(report(
                Some(w.generated.len().to_string()),
                Some(minimal.order.to_string()),
                holds,
                witnesses,
                inputs,
                constants,
            ))
        }
        Lemma::All => Err(Error::InvalidArgument("`verify all` runs suites and takes no sets".into())),
    }
}

fn verify_suites(lemma: Lemma, f: &Field, max_size: usize) -> Result<Vec<VerificationReport>> {
    let suites: Vec<Suite> = match lemma {
        Lemma::All => Suite::ALL.to_vec(),
        Lemma::Pluennecke => vec![Suite::Pluennecke],
        Lemma::Refine => vec![Suite::Refine],
        Lemma::Cover => vec![Suite::Cover],
        Lemma::Rudnev => vec![Suite::Rudnev],
        Lemma::Subfield => vec![Suite::Subfield],
    };
    suites
        .into_iter()
        .map(|s| {
            let r = run_suite(s, f, max_size)?;
            let mut inputs = BTreeMap::new();
            inputs.insert("field".into(), json!(r.field));
            inputs.insert("max_size".into(), json!(r.max_size));
            let mut constants = BTreeMap::new();
            constants.insert("cases".into(), r.cases.to_string());
            Ok(VerificationReport {
                lemma: s.name().to_string(),
                inputs,
                lhs: None,
                rhs: None,
                holds: r.passed,
                witnesses: json!({"violations": r.violations}),
                measured_constants: constants,
            })
        })
        .collect()
}

fn report_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(s, "{} {}", r.lemma, inputs.join(" "));
    if let (Some(l), Some(rhs)) = (&r.lhs, &r.rhs) {
        let _ = writeln!(s, "  lhs {l}  rhs {rhs}");
    }
    for (k, v) in &r.measured_constants {
        let _ = writeln!(s, "  {k} {v}");
    }
    if let Some(v) = r.witnesses.get("violations").and_then(Value::as_array) {
        for item in v {
            let _ = writeln!(s, "  violation {}", item.as_str().unwrap_or_default());
        }
    }
    let _ = writeln!(s, "  {}", if r.holds { "ok" } else { "VIOLATED" });
    s
}

fn trace_text(t: &crate::tracer::ProofTrace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "field        {}", t.field);
    let _ = writeln!(s, "set          {}", t.input);
    let _ = writeln!(s, "K            {} (|A+A| = {}, |A·A| = {})", t.k, t.sum_size, t.product_size);
    let _ = writeln!(s, "benchmark    {:.6} (K / benchmark = {:.6})", t.benchmark, t.k_over_benchmark);
    let _ = writeln!(s, "admissible   {}", t.admissibility.passed);
    let _ = writeln!(s, "refined      {} (|4A'| = {})", t.fourfold.refined, t.fourfold.fourfold_size);
    let d = &t.dyadic;
    let _ = writeln!(
        s,
        "dyadic       j = {} lines = {} floor = {} mass = {} energy = {}",
        d.j, d.lines, d.floor, d.mass, d.energy
    );
    let _ = writeln!(s, "pair         x0 = {} y0 = {} Ã = {}", t.pair.x0, t.pair.y0, t.pair.a_tilde);
    let c = &t.classification;
    match c.witness {
        Some(w) => {
            let _ = writeln!(s, "case         {} (witness {w})", c.label.as_str());
        }
        None => {
            let _ = writeln!(s, "case         {}", c.label.as_str());
        }
    }
    for a in &t.case_audit.audits {
        let _ = writeln!(s, "audit        {:<24} {} <= {} {}", a.id, a.lhs, a.rhs, if a.holds { "holds" } else { "fails" });
    }
    if t.violations.is_empty() {
        let _ = writeln!(s, "violations   none");
    } else {
        let _ = writeln!(s, "violations   {}", t.violations.join(", "));
    }
    s
}

/// Exhaustive when `C(q-2, m-1)` fits the budget, otherwise annealing.
/// Sizes outside `1..q` are skipped.
fn chart_point(f: &Field, m: usize, admissible: bool, iters: u64, budget: u64, seed: u64) -> Result<Option<SearchRecord>> {
    let units = f.order() as usize - 1;
    if m > units {
        return Ok(None);
    }
    let candidates = binomial(units as u64 - 1, m as u64 - 1);
    let record = if candidates <= budget as u128 {
        exhaustive_min(f, m, admissible, budget as u128)
    } else {
        anneal_min(f, m, &AnnealOptions::new(iters, seed, admissible))
    };
    match record {
        Ok(r) => Ok(Some(r)),
        Err(Error::NoAdmissibleSet(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn records_output(records: &[SearchRecord], format: Format) -> Result<String> {
    let rows = exponent_chart(records)?;
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .zip(sorted_sets(records))
                .map(|(row, set)| {
                    let mut v = serde_json::to_value(row).expect("row serializes");
                    v["best_set"] = set_value(set);
                    v
                })
                .collect();
            to_json(&items)
        }
        Format::Text => rows.iter().zip(sorted_sets(records)).map(|(r, set)| row_text(r, set)).collect(),
    })
}

/// Best sets in the same order as [`exponent_chart`] rows.
fn sorted_sets(records: &[SearchRecord]) -> Vec<&FSet> {
    let mut keyed: Vec<(u32, usize, &FSet)> = records.iter().map(|r| (r.field.order(), r.m, &r.best_set)).collect();
    keyed.sort_by_key(|(order, m, _)| (*order, *m));
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

fn row_text(r: &ChartRow, set: &FSet) -> String {
    let exponent = r.exponent.map(|e| format!("{e:.6}")).unwrap_or_else(|| "-".into());
    format!(
        "{} m={} {} best={} K={}/{} exponent={} admissible={} evaluations={} set={}\n",
        r.field, r.m, r.method, r.best_value, r.k_num, r.k_den, exponent, r.admissible, r.evaluations, set
    )
}
