//! Deciding when `a x^2 + b y^2 + c P_{p^k+2}(z)` is almost universal.
//!
//! For positive integers `a, b, c, k` with `gcd(a, b, c) = 1` and an odd
//! prime `p ∤ c`, the generalized polygonal numbers
//! `P_m(z) = ((m - 2) z^2 - (m - 4) z) / 2` with `m = p^k + 2` and `z ∈ Z`
//! give a ternary quadratic polynomial. It is *almost universal* when it
//! represents every positive integer except finitely many. This crate
//! decides that property exactly and checks every decision against a
//! brute-force sieve.
//!
//! ```
//! use mixsum::{classify, FormInstance, VerdictKind};
//!
//! let form = FormInstance::new(2, 2, 1, 5, 1)?; // 2x^2 + 2y^2 + P_7(z)
//! let verdict = classify(&form)?;
//! assert_eq!(verdict.kind, VerdictKind::AlmostUniversal);
//! # Ok::<(), mixsum::Error>(())
//! ```
//!
//! The modules mirror the pipeline:
//!
//! * [`arith`]: valuations, factorization, Jacobi and dyadic Hilbert symbols;
//! * [`forms`]: parameter validation, polygonal numbers, the sieve oracle;
//! * [`local`]: the genus-level conditions and Jordan invariants;
//! * [`classify`]: dispatch to one of six parity cases and its conditions;
//! * [`verify`]: auditing verdicts against the oracle.

pub mod arith;
pub mod classify;
mod error;
pub mod forms;
pub mod local;
pub mod verify;

pub use classify::{classify, dispatch, SpinorCandidate, TheoremId, TraceEntry, Verdict, VerdictKind};
pub use error::{Error, Result};
pub use forms::{represented_set, represents, FormInstance, RepresentedSet, Solution};
pub use local::{genus_check, LocalVerdict};
pub use verify::{audit, exceptions_up_to, ExceptionReport};

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/local.md")]
    mod local {}
    #[doc = include_str!("../../../book/src/classify.md")]
    mod classify {}
    #[doc = include_str!("../../../book/src/verify.md")]
    mod verify {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
