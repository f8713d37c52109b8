//! Empirical audit of verdicts against the brute-force oracle.
//!
//! Nothing here proves anything about infinitely many integers. The audit
//! checks the finite shadow of each verdict at a chosen bound `N`:
//!
//! * almost universal: no exceptions in `(N/2, N]`;
//! * not almost universal: exceptions keep appearing in `(N/2, N]`, and every
//!   exception above a small threshold has shifted target `t l^2`;
//! * locally obstructed: a whole residue class of `n` is missed.

use crate::arith::exact_sqrt;
use crate::classify::{Verdict, VerdictKind};
use crate::error::Result;
use crate::forms::{represented_set, shifted_target, FormInstance};
use crate::local::{missing_class, ResidueClass};

/// Exceptions at or below this are not held against any verdict.
pub const DEFAULT_THRESHOLD: u64 = 1000;

/// Largest modulus tried when looking for a missed residue class.
pub const MAX_PROGRESSION_MODULUS: u64 = 10_000;

/// A member of the predicted exception family: `8 p^k n + c (p^k - 2)^2 = t l^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FamilyMember {
    pub n: u64,
    pub l: u64,
}

/// A residue class of `n` containing no represented value up to the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgressionWitness {
    pub class: ResidueClass,
    /// The same class expressed on shifted targets.
    pub shifted: ResidueClass,
    /// How many members of the class lie in `[0, N]`.
    pub members: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inconsistency {
    /// Almost universal, yet exceptions remain in `(N/2, N]`.
    TailNotClear { largest: u64 },
    /// Not almost universal, but no exception in `(N/2, N]`.
    EmptyTail,
    /// Exceptions above the threshold outside the `t l^2` family.
    Unexplained { count: usize, first: u64 },
    /// Not almost universal, but no exception lies in the family.
    NoFamilyMatch,
    /// Locally obstructed, but no residue class is entirely missed.
    NoProgression,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionReport {
    pub form: FormInstance,
    pub bound: u64,
    pub threshold: u64,
    pub exceptions: Vec<u64>,
    pub tail_clear: bool,
    pub family_matches: Vec<FamilyMember>,
    pub unexplained: Vec<u64>,
    pub progression: Option<ProgressionWitness>,
    pub inconsistencies: Vec<Inconsistency>,
}

impl ExceptionReport {
    pub fn consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }
}

/// Every `n` in `[0, N]` that `f` does not represent.
pub fn exceptions_up_to(form: &FormInstance, bound: u64) -> Result<Vec<u64>> {
    Ok(represented_set(form, bound)?.missing().collect())
}

fn family_l(form: &FormInstance, t: i64, n: u64) -> Option<u64> {
    let target = shifted_target(form, n as i64).ok()? as i128;
    if target % t as i128 != 0 {
        return None;
    }
    exact_sqrt(target / t as i128).map(|l| l as u64)
}

/// All `(n, l)` with `n <= N`, `l >= 1` and `8 p^k n + c (p^k - 2)^2 = t l^2`.
pub fn family_predict(form: &FormInstance, t: i64, bound: u64) -> Vec<FamilyMember> {
    let pk = form.pk() as i128;
    let modulus = 8 * pk;
    let offset = form.c() as i128 * (pk - 2).pow(2);
    let top = modulus * bound as i128 + offset;
    let t = t as i128;
    let mut out = Vec::new();
    let mut l: i128 = 1;
    while t * l * l <= top {
        let diff = t * l * l - offset;
        if diff >= 0 && diff % modulus == 0 {
            debug_assert!(l % 2 == 1, "t l^2 ≡ c (p^k - 2)^2 (mod 8 p^k) forces l odd");
            out.push(FamilyMember { n: (diff / modulus) as u64, l: l as u64 });
        }
        l += 1;
    }
    out
}

/// Looks for a residue class modulo a power of `prime` that `f` misses over
/// `Z / prime^e` and confirms, against the oracle's exception list, that all
/// of its members up to the bound are exceptions.
pub fn progression_witness(
    form: &FormInstance,
    prime: i64,
    exceptions: &[u64],
    bound: u64,
) -> Option<ProgressionWitness> {
    let class = missing_class(form, prime, MAX_PROGRESSION_MODULUS)?;
    let members: Vec<u64> = (class.residue..=bound).step_by(class.modulus as usize).collect();
    let all_missed = members.iter().all(|n| exceptions.binary_search(n).is_ok());
    all_missed.then(|| ProgressionWitness { class, shifted: class.shifted(form), members: members.len() as u64 })
}

/// Audits `verdict` for `form` on `[0, N]`.
pub fn audit(form: &FormInstance, verdict: &Verdict, bound: u64, threshold: u64) -> Result<ExceptionReport> {
    let exceptions = exceptions_up_to(form, bound)?;
    let tail: Vec<u64> = exceptions.iter().copied().filter(|&n| n > bound / 2).collect();
    let mut report = ExceptionReport {
        form: form.clone(),
        bound,
        threshold,
        tail_clear: tail.is_empty(),
        exceptions,
        family_matches: Vec::new(),
        unexplained: Vec::new(),
        progression: None,
        inconsistencies: Vec::new(),
    };

    match verdict.kind {
        VerdictKind::AlmostUniversal => {
            if let Some(&largest) = tail.last() {
                report.inconsistencies.push(Inconsistency::TailNotClear { largest });
            }
        }
        VerdictKind::NotAlmostUniversal => {
            let t = verdict.candidate.expect("non-obstructed verdicts carry a candidate").t;
            for &n in &report.exceptions {
                match family_l(form, t, n) {
                    Some(l) => report.family_matches.push(FamilyMember { n, l }),
                    None if n > threshold => report.unexplained.push(n),
                    None => {}
                }
            }
            // Below the threshold nothing is claimed.
            if bound > threshold {
                if tail.is_empty() {
                    report.inconsistencies.push(Inconsistency::EmptyTail);
                }
                if let Some(&first) = report.unexplained.first() {
                    report.inconsistencies.push(Inconsistency::Unexplained { count: report.unexplained.len(), first });
                }
                if report.family_matches.is_empty() {
                    report.inconsistencies.push(Inconsistency::NoFamilyMatch);
                }
            }
        }
        VerdictKind::LocallyObstructed => {
            let prime = verdict.local.failing_prime().expect("obstructed verdicts name a prime");
            report.progression = progression_witness(form, prime, &report.exceptions, bound);
            if report.progression.is_none() {
                report.inconsistencies.push(Inconsistency::NoProgression);
            }
        }
    }
    Ok(report)
}
