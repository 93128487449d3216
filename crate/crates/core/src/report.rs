//! Report types, the behavior-table file format and output rendering
//! (canonical JSON, CSV, aligned text).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classicality::{
    chsh_facets, correlation_membership, kolmogorov_feasibility, vertex_label, vertex_signs, ClassicalityVerdict,
    Witness,
};
use crate::entities::{EntityConfig, RunSpec};
use crate::error::ValidationError;
use crate::liar::{LiarVariant, MeasurementChoice, TraceStep, TruthAssignment};
use crate::scalar::{Rational, Scalar};
use crate::scenario::{
    bell_quantity, bell_verdict, correlation_vector, expectation, BehaviorTable, BellVerdict, CoincidenceDistribution,
    CorrelationVector, CountTable, Pair,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// canonical JSON

/// Serializes `value` with sorted object keys, two-space indentation and
/// every non-integer number written with 17 significant digits.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) if n.is_i64() || n.is_u64() => out.push_str(&n.to_string()),
        Value::Number(n) => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // collect first: the map type only sorts when serde_json is
            // built without preserve_order
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            out.push_str("{\n");
            for (i, (k, item)) in entries.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

// ---------------------------------------------------------------------------
// behavior-table files

/// On-disk form of a behavior table:
/// `{"pairs": {"13": {"uu": r, "ud": r, "du": r, "dd": r}, ...}}` where each
/// `r` is a JSON number or a `"p/q"` string. Numbers are read as the exact
/// decimal they spell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDocument {
    pub pairs: BTreeMap<String, CoincidenceDistribution<Rational>>,
}

impl TableDocument {
    pub fn from_table(table: &BehaviorTable<Rational>) -> Self {
        TableDocument { pairs: table.iter().map(|(p, d)| (p.tag().to_string(), d.clone())).collect() }
    }

    pub fn into_table(self) -> Result<BehaviorTable<Rational>, ValidationError> {
        let mut map = BTreeMap::new();
        for (key, d) in self.pairs {
            map.insert(key.parse::<Pair>()?, d);
        }
        BehaviorTable::from_map(map)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableInputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

pub fn parse_table(text: &str) -> Result<BehaviorTable<Rational>, TableInputError> {
    let doc: TableDocument = serde_json::from_str(text).map_err(|e| TableInputError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    Ok(doc.into_table()?)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub uu: u64,
    pub ud: u64,
    pub du: u64,
    pub dd: u64,
}

impl From<[u64; 4]> for PairCounts {
    fn from([uu, ud, du, dd]: [u64; 4]) -> Self {
        PairCounts { uu, ud, du, dd }
    }
}

/// Result of a seeded simulation run; carries everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    #[serde(flatten)]
    pub setup: EntityConfig,
    pub seed: u64,
    pub trials: u64,
    pub counts: BTreeMap<Pair, PairCounts>,
    pub distributions: BTreeMap<Pair, CoincidenceDistribution<Rational>>,
    pub correlations: CorrelationVector<Rational>,
    pub bell_quantity: Rational,
    pub bell_verdict: BellVerdict<Rational>,
    /// Hull membership of the correlation vector.
    pub classicality: ClassicalityVerdict<Rational>,
    /// Joint-distribution feasibility of the full table.
    pub kolmogorov: ClassicalityVerdict<Rational>,
    pub version: String,
}

impl SimulationReport {
    pub fn from_counts(setup: EntityConfig, run: RunSpec, counts: &CountTable) -> Result<Self, ValidationError> {
        let table = counts.to_table()?;
        let e = correlation_vector(&table);
        Ok(SimulationReport {
            setup,
            seed: run.seed,
            trials: run.trials,
            counts: Pair::ALL.into_iter().map(|p| (p, counts.get(p).into())).collect(),
            distributions: table.iter().map(|(p, d)| (p, d.clone())).collect(),
            bell_quantity: bell_quantity(&e),
            bell_verdict: bell_verdict(&e),
            classicality: correlation_membership(&e),
            kolmogorov: kolmogorov_feasibility(&table),
            correlations: e,
            version: VERSION.to_string(),
        })
    }

    pub fn table(&self) -> Result<BehaviorTable<Rational>, ValidationError> {
        BehaviorTable::from_map(self.distributions.clone())
    }
}

/// Evaluation of a user-supplied behavior table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellCheckReport {
    pub distributions: BTreeMap<Pair, CoincidenceDistribution<Rational>>,
    pub correlations: CorrelationVector<Rational>,
    pub bell_quantity: Rational,
    pub bell_verdict: BellVerdict<Rational>,
    pub classicality: ClassicalityVerdict<Rational>,
    pub kolmogorov: ClassicalityVerdict<Rational>,
    pub version: String,
}

impl BellCheckReport {
    pub fn new(table: &BehaviorTable<Rational>) -> Self {
        let e = correlation_vector(table);
        BellCheckReport {
            distributions: table.iter().map(|(p, d)| (p, d.clone())).collect(),
            bell_quantity: bell_quantity(&e),
            bell_verdict: bell_verdict(&e),
            classicality: correlation_membership(&e),
            kolmogorov: kolmogorov_feasibility(table),
            correlations: e,
            version: VERSION.to_string(),
        }
    }

    pub fn table(&self) -> Result<BehaviorTable<Rational>, ValidationError> {
        BehaviorTable::from_map(self.distributions.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiarReport {
    pub variant: LiarVariant,
    pub start: MeasurementChoice,
    pub steps: usize,
    pub step_time: f64,
    /// Born probability of the starting measurement on the initial state.
    pub start_probability: f64,
    pub cycle: Vec<String>,
    pub assignments: Vec<TruthAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<TraceStep>>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexEntry {
    pub label: String,
    pub components: [i8; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetEntry {
    pub signs: [i8; 4],
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipTest {
    pub vector: CorrelationVector<Rational>,
    pub bell_quantity: Rational,
    pub facets: Vec<FacetEntry>,
    pub classicality: ClassicalityVerdict<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeReport {
    pub vertices: Vec<VertexEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<MembershipTest>,
    pub version: String,
}

impl PolytopeReport {
    pub fn new(test: Option<&CorrelationVector<Rational>>) -> Self {
        let vertices =
            vertex_signs().into_iter().map(|s| VertexEntry { label: vertex_label(s), components: s }).collect();
        let test = test.map(|e| MembershipTest {
            vector: e.clone(),
            bell_quantity: bell_quantity(e),
            facets: chsh_facets(e).into_iter().map(|f| FacetEntry { signs: f.signs, value: f.value }).collect(),
            classicality: correlation_membership(e),
        });
        PolytopeReport { vertices, test, version: VERSION.to_string() }
    }
}

// ---------------------------------------------------------------------------
// CSV

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

/// One row per pair: `pair,p_uu,p_ud,p_du,p_dd,E`, with exact rationals.
pub fn table_csv(table: &BehaviorTable<Rational>) -> String {
    let mut rows = vec![["pair", "p_uu", "p_ud", "p_du", "p_dd", "E"].map(String::from).to_vec()];
    for (p, d) in table.iter() {
        let mut row = vec![p.tag().to_string()];
        row.extend(d.entries().iter().map(|x| x.to_string()));
        row.push(expectation(d).to_string());
        rows.push(row);
    }
    csv_string(rows)
}

pub fn liar_csv(report: &LiarReport) -> String {
    let mut rows = vec![["step", "sentence1", "sentence2", "label"].map(String::from).to_vec()];
    for (i, a) in report.assignments.iter().enumerate() {
        rows.push(vec![i.to_string(), truth_word(a.sentence1).into(), truth_word(a.sentence2).into(), a.label()]);
    }
    csv_string(rows)
}

pub fn polytope_csv(report: &PolytopeReport) -> String {
    match &report.test {
        None => {
            let mut rows = vec![["e13", "e14", "e23", "e24"].map(String::from).to_vec()];
            rows.extend(report.vertices.iter().map(|v| v.components.iter().map(|c| c.to_string()).collect()));
            csv_string(rows)
        }
        Some(t) => {
            let mut rows = vec![["s13", "s14", "s23", "s24", "value"].map(String::from).to_vec()];
            for f in &t.facets {
                let mut row: Vec<String> = f.signs.iter().map(|s| s.to_string()).collect();
                row.push(f.value.to_string());
                rows.push(row);
            }
            csv_string(rows)
        }
    }
}

// ---------------------------------------------------------------------------
// text

fn truth_word(v: crate::liar::TruthValue) -> &'static str {
    match v {
        crate::liar::TruthValue::True => "true",
        crate::liar::TruthValue::False => "false",
        crate::liar::TruthValue::Latent => "latent",
    }
}

fn vector_text<T: Scalar>(e: &CorrelationVector<T>) -> String {
    let [a, b, c, d] = e.components();
    format!("({a}, {b}, {c}, {d})")
}

fn verdict_text<T: Scalar>(v: &BellVerdict<T>) -> String {
    match v {
        BellVerdict::Satisfied(q) => format!("{q} <= 2, satisfied"),
        BellVerdict::Violated(q) => format!("{q} > 2, violated"),
    }
}

fn classicality_text<T: Scalar>(v: &ClassicalityVerdict<T>) -> String {
    match v {
        ClassicalityVerdict::Classical { weights } => {
            let parts: Vec<String> = weights.iter().map(|(k, w)| format!("{k}: {w}")).collect();
            format!("classical, weights {{{}}}", parts.join(", "))
        }
        ClassicalityVerdict::NonClassical { witness } => match witness {
            Witness::ChshFacet { signs, value, bound } => {
                format!("nonclassical, CHSH facet {} = {value} > {bound}", vertex_label(*signs))
            }
            Witness::MarginalInconsistency { observable, pairs, up_probabilities } => format!(
                "nonclassical, observable {observable} has up-probability {} in {} but {} in {}",
                up_probabilities[0], pairs[0], up_probabilities[1], pairs[1]
            ),
            Witness::SeparatingFunctional { value, bound, .. } => {
                format!("nonclassical, separating functional value {value} > {bound}")
            }
        },
    }
}

fn distribution_lines(out: &mut String, dists: &BTreeMap<Pair, CoincidenceDistribution<Rational>>) {
    let rows: Vec<[String; 6]> = dists
        .iter()
        .map(|(p, d)| {
            let [a, b, c, e] = d.entries().map(|x| x.to_string());
            [p.to_string(), a, b, c, e, expectation(d).to_string()]
        })
        .collect();
    let header = ["pair", "p_uu", "p_ud", "p_du", "p_dd", "E"].map(String::from);
    aligned(out, &header, &rows);
}

fn aligned<const N: usize>(out: &mut String, header: &[String; N], rows: &[[String; N]]) {
    let mut widths = header.each_ref().map(|h| h.len());
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    for r in std::iter::once(header).chain(rows) {
        let line: Vec<String> = r.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
}

pub fn simulation_text(r: &SimulationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "entity          {}", r.setup.kind().tag());
    let _ = writeln!(out, "seed            {}", r.seed);
    let _ = writeln!(out, "trials per pair {}", r.trials);
    out.push('\n');
    let header = ["pair", "uu", "ud", "du", "dd"].map(String::from);
    let rows: Vec<[String; 5]> = r
        .counts
        .iter()
        .map(|(p, c)| [p.to_string(), c.uu.to_string(), c.ud.to_string(), c.du.to_string(), c.dd.to_string()])
        .collect();
    aligned(&mut out, &header, &rows);
    out.push('\n');
    distribution_lines(&mut out, &r.distributions);
    out.push('\n');
    summary_lines(&mut out, &r.correlations, &r.bell_verdict, &r.classicality, &r.kolmogorov);
    out
}

pub fn bell_check_text(r: &BellCheckReport) -> String {
    let mut out = String::new();
    distribution_lines(&mut out, &r.distributions);
    out.push('\n');
    summary_lines(&mut out, &r.correlations, &r.bell_verdict, &r.classicality, &r.kolmogorov);
    out
}

fn summary_lines(
    out: &mut String,
    e: &CorrelationVector<Rational>,
    bell: &BellVerdict<Rational>,
    membership: &ClassicalityVerdict<Rational>,
    joint: &ClassicalityVerdict<Rational>,
) {
    let _ = writeln!(out, "E (13, 14, 23, 24)  {}", vector_text(e));
    let _ = writeln!(out, "Bell quantity       {}", verdict_text(bell));
    let _ = writeln!(out, "correlation hull    {}", classicality_text(membership));
    let _ = writeln!(out, "joint distribution  {}", classicality_text(joint));
}

pub fn liar_text(r: &LiarReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "variant {}, start {} (probability {})", r.variant, r.start, r.start_probability);
    let _ = writeln!(out, "cycle   {}", r.cycle.join(" -> "));
    if let Some(states) = &r.states {
        for s in states {
            let amps: Vec<String> = s
                .state
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 1e-12)
                .map(|(i, z)| format!("[{i}] {:+.6}{:+.6}i", z.re, z.im))
                .collect();
            let _ = writeln!(out, "step {:<3} {:<3} {}", s.step, s.assignment.label(), amps.join("  "));
        }
    }
    out
}

pub fn polytope_text(r: &PolytopeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "deterministic correlation vertices (e13, e14, e23, e24):");
    for v in &r.vertices {
        let _ = writeln!(out, "  {}", v.label);
    }
    if let Some(t) = &r.test {
        out.push('\n');
        let _ = writeln!(out, "test vector    {}", vector_text(&t.vector));
        let _ = writeln!(out, "Bell quantity  {}", t.bell_quantity);
        for f in &t.facets {
            let _ = writeln!(out, "  facet {:<16} {}", vertex_label(f.signs), f.value);
        }
        let _ = writeln!(out, "verdict        {}", classicality_text(&t.classicality));
    }
    out
}
