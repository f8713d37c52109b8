//! Library half of the `mixsum` binary: error classes with their exit codes,
//! report rendering, the config file and the scan engine.

use std::fmt::Write as _;
use std::path::PathBuf;

use mixsum::arith::{gcd, is_prime};
use mixsum::verify::ExceptionReport;
use mixsum::{FormInstance, Verdict, VerdictKind};
use thiserror::Error;

pub mod config;
pub mod record;
pub mod scan;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] mixsum::Error),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
    #[error("refusing to resume: {0}")]
    Checkpoint(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) | Self::Config(_) => 2,
            Self::Core(mixsum::Error::BudgetExceeded { .. }) => 3,
            Self::Core(_) => 2,
            Self::Output { .. } => 4,
            Self::Checkpoint(_) => 5,
        }
    }
}

pub fn verdict_exit_code(kind: VerdictKind) -> i32 {
    match kind {
        VerdictKind::AlmostUniversal => 0,
        VerdictKind::NotAlmostUniversal => 10,
        VerdictKind::LocallyObstructed => 11,
    }
}

/// Every violated hypothesis, not just the first one `FormInstance::new` hits.
pub fn hypothesis_violations(a: i64, b: i64, c: i64, p: i64, k: u32) -> Vec<String> {
    let mut out = Vec::new();
    if a <= 0 || b <= 0 || c <= 0 {
        out.push("a, b, c must be positive".to_string());
    }
    if p == 2 || !is_prime(p) {
        out.push(format!("p = {p} must be an odd prime"));
    }
    if k == 0 {
        out.push("k must be positive".to_string());
    }
    let g = gcd(gcd(a, b), c);
    if a > 0 && b > 0 && c > 0 && g != 1 {
        out.push(format!("gcd(a, b, c) = {g}, must be 1"));
    }
    if p != 0 && c % p == 0 && c != 0 {
        out.push("p divides c".to_string());
    }
    out
}

pub fn build_form(a: i64, b: i64, c: i64, p: i64, k: u32) -> Result<FormInstance, CliError> {
    let violations = hypothesis_violations(a, b, c, p, k);
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations.join("; ")));
    }
    FormInstance::new(a, b, c, p, k).map_err(|e| CliError::Invalid(e.to_string()))
}

pub fn render_verdict(form: &FormInstance, verdict: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "form:     {form}  (p = {}, k = {})", form.p(), form.k());
    match verdict.local.failing_prime() {
        Some(q) => {
            let _ = writeln!(s, "verdict:  {} (q = {q})", verdict.kind);
        }
        None => {
            let _ = writeln!(s, "verdict:  {}", verdict.kind);
        }
    }
    if let Some(id) = verdict.theorem {
        let _ = writeln!(s, "theorem:  {}", id.as_str());
    }
    if let Some(cand) = verdict.candidate {
        let _ = write!(s, "t:        {}\nfield d:  {}", cand.t, cand.field_d);
        if let Some(e) = cand.epsilon {
            let _ = write!(s, "\nepsilon:  {e}");
        }
        s.push('\n');
    }
    if let Some([x, y, w]) = verdict.witness_vector {
        let _ = writeln!(s, "witness:  ({x}, {y}, {w})");
    }
    s.push_str("trace:\n");
    for e in &verdict.trace {
        let _ = writeln!(s, "  [{}] {}: {}", if e.pass { "pass" } else { "fail" }, e.label, e.detail);
    }
    s
}

const SHOWN: usize = 20;

pub fn render_report(report: &ExceptionReport) -> String {
    let mut s = String::new();
    let ex = &report.exceptions;
    let _ = writeln!(s, "checked:  n <= {} (threshold {})", report.bound, report.threshold);
    let _ = write!(s, "exceptions: {}", ex.len());
    if !ex.is_empty() {
        let head: Vec<String> = ex.iter().take(SHOWN).map(u64::to_string).collect();
        let _ = write!(s, " [{}{}]", head.join(", "), if ex.len() > SHOWN { ", ..." } else { "" });
    }
    let _ = writeln!(s, "\ntail clear: {}", report.tail_clear);
    if !report.family_matches.is_empty() {
        let _ = writeln!(s, "family matches ({}):\n  {:>12}  {:>8}", report.family_matches.len(), "n", "l");
        for m in report.family_matches.iter().take(SHOWN) {
            let _ = writeln!(s, "  {:>12}  {:>8}", m.n, m.l);
        }
        if report.family_matches.len() > SHOWN {
            s.push_str("  ...\n");
        }
    }
    if !report.unexplained.is_empty() {
        let head: Vec<String> = report.unexplained.iter().take(SHOWN).map(u64::to_string).collect();
        let _ = writeln!(s, "unexplained ({}): {}", report.unexplained.len(), head.join(", "));
    }
    if let Some(w) = report.progression {
        let _ = writeln!(
            s,
            "missed class: n ≡ {} (mod {}), shifted {} (mod {}), {} members",
            w.class.residue, w.class.modulus, w.shifted.residue, w.shifted.modulus, w.members
        );
    }
    if report.consistent() {
        s.push_str("consistent: yes\n");
    } else {
        s.push_str("consistent: no\n");
        for inc in &report.inconsistencies {
            let _ = writeln!(s, "  {}", record::describe(inc));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_violations_are_named() {
        let v = hypothesis_violations(3, 3, 3, 3, 1);
        assert_eq!(v, vec!["gcd(a, b, c) = 3, must be 1".to_string(), "p divides c".to_string()]);
        assert_eq!(hypothesis_violations(1, 1, 1, 4, 0).len(), 2);
        assert!(hypothesis_violations(2, 2, 1, 5, 1).is_empty());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Invalid(String::new()).exit_code(), 2);
        assert_eq!(CliError::Core(mixsum::Error::BudgetExceeded { requested: 2, cap: 1 }).exit_code(), 3);
        assert_eq!(CliError::Checkpoint(String::new()).exit_code(), 5);
        assert_eq!(verdict_exit_code(VerdictKind::LocallyObstructed), 11);
    }
}
