//! The per-triple record shared by `verify --format json` and `scan`.

use mixsum::verify::{audit, ExceptionReport, Inconsistency};
use mixsum::{classify, FormInstance, Verdict};
use serde::{Deserialize, Serialize};

/// Bumped whenever a field is added, renamed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMatch {
    pub n: u64,
    pub l: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub modulus: u64,
    pub residue: u64,
    pub shifted_modulus: u64,
    pub shifted_residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub schema_version: u32,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub p: i64,
    pub k: u32,
    pub verdict: String,
    pub theorem: Option<String>,
    pub t: Option<i64>,
    pub field_d: Option<i64>,
    pub epsilon: Option<i64>,
    pub failing_prime: Option<i64>,
    pub trace: Vec<TraceRecord>,
    pub exceptions_checked_to: Option<u64>,
    pub exception_count: Option<u64>,
    pub tail_clear: Option<bool>,
    pub family_matches: Vec<FamilyMatch>,
    pub unexplained: Vec<u64>,
    pub progression: Option<Progression>,
    pub consistent: Option<bool>,
    pub inconsistencies: Vec<String>,
}

pub fn describe(inc: &Inconsistency) -> String {
    match inc {
        Inconsistency::TailNotClear { largest } => format!("tail_not_clear: largest exception {largest}"),
        Inconsistency::EmptyTail => "empty_tail".to_string(),
        Inconsistency::Unexplained { count, first } => format!("unexplained: {count} exceptions, first {first}"),
        Inconsistency::NoFamilyMatch => "no_family_match".to_string(),
        Inconsistency::NoProgression => "no_progression".to_string(),
    }
}

impl Record {
    /// Classifies `form`, and audits it when `bound > 0`.
    pub fn build(form: &FormInstance, bound: u64, threshold: u64) -> mixsum::Result<Self> {
        let verdict = classify(form)?;
        let report = if bound > 0 { Some(audit(form, &verdict, bound, threshold)?) } else { None };
        Ok(Self::from_parts(form, &verdict, report.as_ref()))
    }

    pub fn from_parts(form: &FormInstance, verdict: &Verdict, report: Option<&ExceptionReport>) -> Self {
        let (a, b) = form.original_ab();
        let cand = verdict.candidate;
        let mut rec = Record {
            schema_version: SCHEMA_VERSION,
            a,
            b,
            c: form.c(),
            p: form.p(),
            k: form.k(),
            verdict: verdict.kind.to_string(),
            theorem: verdict.theorem.map(|t| t.to_string()),
            t: cand.map(|c| c.t),
            field_d: cand.map(|c| c.field_d),
            epsilon: cand.and_then(|c| c.epsilon),
            failing_prime: verdict.local.failing_prime(),
            trace: verdict
                .trace
                .iter()
                .map(|e| TraceRecord { label: e.label.clone(), pass: e.pass, detail: e.detail.clone() })
                .collect(),
            exceptions_checked_to: None,
            exception_count: None,
            tail_clear: None,
            family_matches: Vec::new(),
            unexplained: Vec::new(),
            progression: None,
            consistent: None,
            inconsistencies: Vec::new(),
        };
        if let Some(r) = report {
            rec.exceptions_checked_to = Some(r.bound);
            rec.exception_count = Some(r.exceptions.len() as u64);
            rec.tail_clear = Some(r.tail_clear);
            rec.family_matches = r.family_matches.iter().map(|m| FamilyMatch { n: m.n, l: m.l }).collect();
            rec.unexplained = r.unexplained.clone();
            rec.progression = r.progression.map(|w| Progression {
                modulus: w.class.modulus,
                residue: w.class.residue,
                shifted_modulus: w.shifted.modulus,
                shifted_residue: w.shifted.residue,
            });
            rec.consistent = Some(r.consistent());
            rec.inconsistencies = r.inconsistencies.iter().map(describe).collect();
        }
        rec
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Flat CSV view: lists become `;`-separated, the trace `label:pass|fail`.
#[derive(Debug, Serialize)]
pub struct CsvRow {
    pub schema_version: u32,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub p: i64,
    pub k: u32,
    pub verdict: String,
    pub theorem: Option<String>,
    pub t: Option<i64>,
    pub field_d: Option<i64>,
    pub epsilon: Option<i64>,
    pub failing_prime: Option<i64>,
    pub trace: String,
    pub exceptions_checked_to: Option<u64>,
    pub exception_count: Option<u64>,
    pub tail_clear: Option<bool>,
    pub family_matches: String,
    pub unexplained: String,
    pub progression: String,
    pub consistent: Option<bool>,
    pub inconsistencies: String,
}

pub const CSV_HEADER: [&str; 21] = [
    "schema_version",
    "a",
    "b",
    "c",
    "p",
    "k",
    "verdict",
    "theorem",
    "t",
    "field_d",
    "epsilon",
    "failing_prime",
    "trace",
    "exceptions_checked_to",
    "exception_count",
    "tail_clear",
    "family_matches",
    "unexplained",
    "progression",
    "consistent",
    "inconsistencies",
];

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

impl From<&Record> for CsvRow {
    fn from(r: &Record) -> Self {
        CsvRow {
            schema_version: r.schema_version,
            a: r.a,
            b: r.b,
            c: r.c,
            p: r.p,
            k: r.k,
            verdict: r.verdict.clone(),
            theorem: r.theorem.clone(),
            t: r.t,
            field_d: r.field_d,
            epsilon: r.epsilon,
            failing_prime: r.failing_prime,
            trace: join(r.trace.iter().map(|e| format!("{}:{}", e.label, if e.pass { "pass" } else { "fail" }))),
            exceptions_checked_to: r.exceptions_checked_to,
            exception_count: r.exception_count,
            tail_clear: r.tail_clear,
            family_matches: join(r.family_matches.iter().map(|m| format!("{}:{}", m.n, m.l))),
            unexplained: join(&r.unexplained),
            progression: r.progression.map(|w| format!("{} mod {}", w.residue, w.modulus)).unwrap_or_default(),
            consistent: r.consistent,
            inconsistencies: join(&r.inconsistencies),
        }
    }
}
