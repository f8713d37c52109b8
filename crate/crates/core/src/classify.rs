//! The decision procedure.
//!
//! Once the local conditions hold, the form fails to be almost universal
//! exactly when one specific integer `t` is a spinor exception of the reduced
//! lattice `L = <8 p^k a, 8 p^k b, c>` that `L` itself does not represent.
//! Which `t`, and which four conditions certify it, depends on six parity
//! cases of `(v_p(a), v_p(b))`, `(v_2(a), v_2(b))` and `p mod 4`; [`dispatch`]
//! picks the case and [`eval_conditions`] evaluates its conditions clause by
//! clause.

use std::fmt;

use crate::arith::{self, in_norm_group_2, is_qr_mod_pk, jacobi_unchecked};
use crate::error::{Error, Result};
use crate::forms::FormInstance;
use crate::local::{genus_check, DiagonalLattice, LocalVerdict};

/// The six parity cases, in the order they are usually stated.
///
/// | case  | `v_p(a) ≡ v_p(b)` | further hypothesis                       |
/// |-------|-------------------|------------------------------------------|
/// | T1_1  | yes               | `v_2(b) >= 2`                            |
/// | T1_2  | yes               | `v_2(b) = 1`                             |
/// | T1_3  | yes               | `v_2(b) = 0`                             |
/// | T1_4  | no                | `v_2(a) ≡ v_2(b)`, `p ≡ 3 (mod 4)`       |
/// | T1_5  | no                | `v_2(a) ≡ v_2(b)`, `p ≡ 1 (mod 4)`       |
/// | T1_6  | no                | `v_2(a) ≢ v_2(b)`                        |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T1_1,
    T1_2,
    T1_3,
    T1_4,
    T1_5,
    T1_6,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [Self::T1_1, Self::T1_2, Self::T1_3, Self::T1_4, Self::T1_5, Self::T1_6];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::T1_1 => "T1.1",
            Self::T1_2 => "T1.2",
            Self::T1_3 => "T1.3",
            Self::T1_4 => "T1.4",
            Self::T1_5 => "T1.5",
            Self::T1_6 => "T1.6",
        }
    }

    /// Whether the case's hypotheses hold for `form`, restated independently
    /// of [`dispatch`].
    pub fn hypotheses_hold(&self, form: &FormInstance) -> bool {
        let p_even = (form.nu_p_a() + form.nu_p_b()) % 2 == 0;
        let two_even = (form.nu2_a() + form.nu2_b()) % 2 == 0;
        let ordered = form.nu2_a() >= form.nu2_b();
        ordered
            && match self {
                Self::T1_1 => p_even && form.nu2_b() >= 2,
                Self::T1_2 => p_even && form.nu2_b() == 1,
                Self::T1_3 => p_even && form.nu2_b() == 0,
                Self::T1_4 => !p_even && two_even && form.p() % 4 == 3,
                Self::T1_5 => !p_even && two_even && form.p() % 4 == 1,
                Self::T1_6 => !p_even && !two_even,
            }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Picks the parity case governing `form`.
pub fn dispatch(form: &FormInstance) -> TheoremId {
    if (form.nu_p_a() + form.nu_p_b()) % 2 == 0 {
        match form.nu2_b() {
            0 => TheoremId::T1_3,
            1 => TheoremId::T1_2,
            _ => TheoremId::T1_1,
        }
    } else if (form.nu2_a() + form.nu2_b()) % 2 == 1 {
        TheoremId::T1_6
    } else if form.p() % 4 == 3 {
        TheoremId::T1_4
    } else {
        TheoremId::T1_5
    }
}

/// The candidate spinor exception `t` together with the quadratic field
/// `E = Q(sqrt(field_d))` governing its square multiples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinorCandidate {
    pub t: i64,
    pub field_d: i64,
    /// Only for T1_6: 1 if `v_p(b) ≢ k (mod 2)`, else 2.
    pub epsilon: Option<i64>,
}

/// Computes `t`, the field and `epsilon` for the given case.
pub fn candidate(form: &FormInstance, id: TheoremId) -> Result<SpinorCandidate> {
    let (a1, b1, c1) = (form.a_odd(), form.b_odd(), form.c_odd());
    let two_c = 1i64 << form.nu2_c();
    let p = form.p();
    let overflow = || Error::Overflow("candidate t");
    let (t, field_d) = match id {
        TheoremId::T1_1 | TheoremId::T1_2 | TheoremId::T1_3 => {
            let d = if (form.nu2_a() + form.nu2_b()) % 2 == 0 { -1 } else { -2 };
            let sf = squarefree_of_product(&[a1, b1, c1])?;
            (two_c.checked_mul(sf).ok_or_else(overflow)?, d)
        }
        TheoremId::T1_4 | TheoremId::T1_5 => {
            let sf = squarefree_of_product(&[p, a1, b1, c1])?;
            (two_c.checked_mul(sf).ok_or_else(overflow)?, -p)
        }
        TheoremId::T1_6 => (squarefree_of_product(&[p, a1, b1, c1])?, -2 * p),
    };
    let epsilon = (id == TheoremId::T1_6).then(|| if (form.nu_p_b() + form.k()) % 2 == 1 { 1 } else { 2 });
    Ok(SpinorCandidate { t, field_d, epsilon })
}

/// One evaluated clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

/// Full evaluation of a case's four conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub trace: Vec<TraceEntry>,
    /// Results of conditions (1)..(4).
    pub conditions: [bool; 4],
    /// Set when condition (4) fails because `L` represents `t`.
    pub witness: Option<[i64; 3]>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }
}

struct Trace(Vec<TraceEntry>);

impl Trace {
    fn push(&mut self, label: impl Into<String>, pass: bool, detail: impl Into<String>) -> bool {
        self.0.push(TraceEntry { label: label.into(), pass, detail: detail.into() });
        pass
    }

    /// Records each clause, then their conjunction under `label`.
    fn all(&mut self, label: &str, clauses: Vec<(&str, bool, String)>) -> bool {
        let mut ok = true;
        for (name, pass, detail) in clauses {
            ok &= self.push(format!("{label}.{name}"), pass, detail);
        }
        self.push(label, ok, "conjunction")
    }
}

fn legendre(a: i128, p: i64) -> i8 {
    jacobi_unchecked(a, p as u64)
}

/// Squarefree part of a product, computed factor by factor.
fn squarefree_of_product(values: &[i64]) -> Result<i64> {
    let mut odd_exponent: Vec<u64> = Vec::new();
    for &v in values {
        for &(q, e) in arith::factorize(v)?.factors() {
            if e % 2 == 1 {
                match odd_exponent.iter().position(|&x| x == q) {
                    Some(i) => {
                        odd_exponent.swap_remove(i);
                    }
                    None => odd_exponent.push(q),
                }
            }
        }
    }
    odd_exponent
        .into_iter()
        .try_fold(1i64, |acc, q| acc.checked_mul(q as i64))
        .ok_or(Error::Overflow("squarefree part"))
}

// Square-class representative of 2^e * u in Q_2: exponent mod 2, unit mod 8.
fn dyadic_rep(e: u32, u: i64) -> i64 {
    (1 + (e % 2) as i64) * u.rem_euclid(8)
}

fn congruent(x: i64, y: i64, m: i64) -> bool {
    (x - y).rem_euclid(m) == 0
}

fn ok_str(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

/// Condition (1): `(symbol_top / q) = 1` at every prime `q | sf`.
fn prime_symbol_condition(tr: &mut Trace, sf: i64, symbol_top: i64) -> bool {
    let primes: Vec<i64> =
        arith::factorize(sf).expect("squarefree part is nonzero").primes().map(|q| q as i64).collect();
    let mut ok = true;
    for &q in &primes {
        let s = legendre(symbol_top as i128, q);
        ok &= tr.push(format!("1.q{q}"), s == 1, format!("({symbol_top} / {q}) = {s}"));
    }
    let detail = if primes.is_empty() {
        format!("SF = {sf} has no prime divisors; vacuous")
    } else {
        format!("every prime q | {sf} has ({symbol_top} / q) = 1: {}", ok_str(ok))
    };
    tr.push("1", ok, detail)
}

/// Evaluates conditions (1)-(4) of case `id`, one trace entry per clause.
pub fn eval_conditions(form: &FormInstance, id: TheoremId) -> Result<Vec<TraceEntry>> {
    Ok(evaluate(form, id)?.trace)
}

/// Like [`eval_conditions`] but also returns the per-condition booleans and
/// the representing vector that falsifies condition (4), if any.
pub fn evaluate(form: &FormInstance, id: TheoremId) -> Result<ConditionReport> {
    let cand = candidate(form, id)?;
    let mut tr = Trace(Vec::new());

    let p = form.p();
    let pk = form.pk();
    let k = form.k();
    let (a1, b1, c1) = (form.a_odd(), form.b_odd(), form.c_odd());
    let (na, nb, nc) = (form.nu2_a(), form.nu2_b(), form.nu2_c());
    let (a0, b0, c) = (form.a0(), form.b0(), form.c());
    let two_parity_equal = (na + nb) % 2 == 0;
    // Only residues mod 8 of these products are ever tested.
    let pk_b1_c1 = (pk % 8) * (b1 % 8) * (c1 % 8);
    let a1b1 = (a1 % 8) * (b1 % 8);
    let b1c1 = (b1 % 8) * (c1 % 8);

    let c1_ok;
    let c2_ok;
    let c3_ok;
    match id {
        TheoremId::T1_1 | TheoremId::T1_2 | TheoremId::T1_3 => {
            let sf = squarefree_of_product(&[a1, b1, c1])?;
            c1_ok = prime_symbol_condition(&mut tr, sf, cand.field_d);

            let (vpa, vpb) = (form.nu_p_a(), form.nu_p_b());
            c2_ok = tr.all(
                "2",
                vec![(
                    "nu_p_parity",
                    vpa % 2 == k % 2 && vpb % 2 == k % 2,
                    format!("v_p(a) = {vpa}, v_p(b) = {vpb}, k = {k} all of one parity"),
                )],
            );

            c3_ok = match id {
                TheoremId::T1_1 => {
                    let last = if two_parity_equal {
                        (
                            "pk_bc_mod4",
                            congruent(pk_b1_c1, 1, 4),
                            format!("p^k b'c' ≡ {} (mod 4), need 1", pk_b1_c1.rem_euclid(4)),
                        )
                    } else {
                        let r = pk_b1_c1.rem_euclid(8);
                        ("pk_bc_mod8", r == 1 || r == 3, format!("p^k b'c' ≡ {r} (mod 8), need 1 or 3"))
                    };
                    tr.all(
                        "3",
                        vec![("odd_parts_mod8", congruent(a1, b1, 8), format!("a' = {a1}, b' = {b1} (mod 8)")), last],
                    )
                }
                TheoremId::T1_2 => tr.all(
                    "3",
                    vec![
                        ("odd_parts_mod8", congruent(a1, b1, 8), format!("a' = {a1}, b' = {b1} (mod 8)")),
                        ("nu2_parity", two_parity_equal, format!("v_2(a) = {na}, v_2(b) = {nb}")),
                        (
                            "pk_bc_mod4",
                            congruent(pk_b1_c1, 1, 4),
                            format!("p^k b'c' ≡ {} (mod 4), need 1", pk_b1_c1.rem_euclid(4)),
                        ),
                    ],
                ),
                _ => {
                    let mut clauses = vec![("four_ndiv_c", nc < 2, format!("v_2(c) = {nc}"))];
                    if nc < 2 {
                        let m = 1i64 << (3 - nc);
                        clauses.push(("odd_parts", congruent(a1, b1, m), format!("a' = {a1}, b' = {b1} (mod {m})")));
                    }
                    match nc {
                        1 => {
                            clauses.push((
                                "pk_bc_mod4",
                                congruent(pk_b1_c1, 1, 4),
                                format!("p^k b'c' ≡ {} (mod 4), need 1", pk_b1_c1.rem_euclid(4)),
                            ));
                            clauses.push((
                                "nu2_a",
                                na >= 2 && na % 2 == 0,
                                format!("v_2(a) = {na}, need even and >= 2"),
                            ));
                        }
                        0 => {
                            clauses.push((
                                "pk_bc_mod8",
                                congruent(pk_b1_c1, 1, 8),
                                format!("p^k b'c' ≡ {} (mod 8), need 1", pk_b1_c1.rem_euclid(8)),
                            ));
                            clauses.push((
                                "nu2_a",
                                na >= 3 && na % 2 == 1,
                                format!("v_2(a) = {na}, need odd and >= 3"),
                            ));
                        }
                        // 4 || c passes the local conditions but no branch covers it.
                        _ => clauses.push((
                            "no_branch",
                            false,
                            "4 || c: neither the 2 || c nor the 2 ∤ c branch applies".to_string(),
                        )),
                    }
                    tr.all("3", clauses)
                }
            };
        }
        TheoremId::T1_4 | TheoremId::T1_5 | TheoremId::T1_6 => {
            let sf = squarefree_of_product(&[p, a1, b1, c1])?;
            c1_ok = prime_symbol_condition(&mut tr, sf, cand.field_d);

            c2_ok = if id == TheoremId::T1_6 {
                let eps = cand.epsilon.expect("T1_6 carries epsilon");
                let s1 = legendre(2 * a0 as i128 * b0 as i128, p);
                let s2 = legendre(eps as i128 * b0 as i128 * c as i128, p);
                tr.all(
                    "2",
                    vec![
                        ("2a0b0", s1 == 1, format!("(2 a0 b0 / p) = (2 * {a0} * {b0} / {p}) = {s1}")),
                        ("eps_b0c", s2 == 1, format!("(eps b0 c / p) = ({eps} * {b0} * {c} / {p}) = {s2}")),
                    ],
                )
            } else {
                let s1 = legendre(2 * b0 as i128 * c as i128, p);
                let s2 = legendre(2 * a0 as i128 * c as i128, p);
                let s3 = legendre(a0 as i128 * b0 as i128, p);
                tr.all(
                    "2",
                    vec![
                        ("2b0c", s1 == 1, format!("(2 b0 c / p) = {s1}")),
                        ("2a0c", s2 == 1, format!("(2 a0 c / p) = {s2}")),
                        ("a0b0", s3 == 1, format!("(a0 b0 / p) = {s3}")),
                    ],
                )
            };

            let pab = (p % 8) * a1b1;
            c3_ok = match id {
                TheoremId::T1_4 => {
                    let m = 1i64 << 3u32.saturating_sub(nc);
                    let i = tr.push("3.i", p % 8 == 7, format!("p ≡ {} (mod 8), need 7", p % 8));
                    let ii = tr.push(
                        "3.ii",
                        nb % 2 != nc % 2 && na > nb,
                        format!("v_2(b) = {nb} ≢ v_2(c) = {nc} (mod 2) and v_2(a) = {na} > v_2(b)"),
                    );
                    let iii = tr.push(
                        "3.iii",
                        nb % 2 != nc % 2 && na == nb && congruent(a1b1, 3, 4),
                        format!("v_2(b) ≢ v_2(c), v_2(a) = v_2(b), a'b' ≡ {} (mod 4)", a1b1.rem_euclid(4)),
                    );
                    let any = tr.push("3.any", i || ii || iii, "disjunction of (i)-(iii)");
                    tr.all(
                        "3",
                        vec![
                            ("pab", congruent(pab, 1, m), format!("p a'b' ≡ {} (mod {m}), need 1", pab.rem_euclid(m))),
                            ("one_of", any, String::new()),
                        ],
                    )
                }
                TheoremId::T1_5 => {
                    let four_ndiv = nc < 2;
                    let m = 1i64 << 3u32.saturating_sub(nc);
                    let norm_elt = dyadic_rep(1 + nb, b1c1);
                    let in_norm = in_norm_group_2(norm_elt, -p)?;
                    let i = tr.push(
                        "3.i",
                        in_norm && na > nb && nb >= 2,
                        format!("2^(1+v_2(b)) b'c' ~ {norm_elt} in N_2(Q(sqrt(-{p}))): {in_norm}; v_2(a) = {na} > v_2(b) = {nb} >= 2"),
                    );
                    let ii = tr.push(
                        "3.ii",
                        congruent(b1c1, 1, 4) && nb <= 1 && nc % 2 != nb % 2 && na > nb,
                        format!("b'c' ≡ {} (mod 4), v_2(b) = {nb} in {{0, 1}}, v_2(c) = {nc} ≢ v_2(b), v_2(a) = {na} > v_2(b)", b1c1.rem_euclid(4)),
                    );
                    let want = if p % 8 == 1 { 1 } else { 2 + if nb % 2 == 0 { 1 } else { -1 } };
                    let iii = tr.push(
                        "3.iii",
                        na == nb && nb >= 1 && congruent(b1c1, want, 4),
                        format!("v_2(a) = v_2(b) = {nb} >= 1 and b'c' ≡ {} (mod 4), need {want}", b1c1.rem_euclid(4)),
                    );
                    let any = tr.push("3.any", i || ii || iii, "disjunction of (i)-(iii)");
                    tr.all(
                        "3",
                        vec![
                            ("four_ndiv_c", four_ndiv, format!("v_2(c) = {nc}")),
                            ("pab", congruent(pab, 1, m), format!("p a'b' ≡ {} (mod {m}), need 1", pab.rem_euclid(m))),
                            ("one_of", any, String::new()),
                        ],
                    )
                }
                _ => {
                    let norm_elt = dyadic_rep(1 + nb, pk_b1_c1);
                    let in_norm = in_norm_group_2(norm_elt, -2 * p)?;
                    let i = tr.push(
                        "3.i",
                        in_norm && na > nb && nb >= 2,
                        format!("2^(1+v_2(b)) p^k b'c' ~ {norm_elt} in N_2(Q(sqrt(-{}))): {in_norm}; v_2(a) = {na} > v_2(b) = {nb} >= 2", 2 * p),
                    );
                    let ii = tr.push(
                        "3.ii",
                        congruent(pk_b1_c1, p, 8) && nb == 0 && na >= 3,
                        format!(
                            "p^k b'c' ≡ {} (mod 8), need {}; v_2(b) = {nb} = 0; v_2(a) = {na} >= 3",
                            pk_b1_c1.rem_euclid(8),
                            p % 8
                        ),
                    );
                    let any = tr.push("3.any", i || ii, "disjunction of (i), (ii)");
                    tr.all(
                        "3",
                        vec![
                            ("c_odd", nc == 0, format!("v_2(c) = {nc}")),
                            (
                                "pab_mod8",
                                congruent(pab, 1, 8),
                                format!("p a'b' ≡ {} (mod 8), need 1", pab.rem_euclid(8)),
                            ),
                            ("nu2_b_ne_1", nb != 1, format!("v_2(b) = {nb}")),
                            ("one_of", any, String::new()),
                        ],
                    )
                }
            };
        }
    }

    // Condition (4). p ∤ t by the valuation parity hypotheses and p ∤ c.
    let t = cand.t;
    let c_inv = arith::inv_mod(c, pk).expect("p does not divide c");
    let tc = ((t.rem_euclid(pk) as i128 * c_inv as i128) % pk as i128) as i64;
    let qr = is_qr_mod_pk(tc, p, k)?;
    tr.push("4.qr", qr, format!("t c^-1 ≡ {tc} (mod {pk}) with t = {t}: quadratic residue {qr}"));
    let lattice = DiagonalLattice::reduced_lattice(form);
    let [e1, e2, e3] = lattice.entries();
    let witness = lattice.represent(t as i128)?.map(|v| v.map(|x| x as i64));
    let unrep = tr.push(
        "4.unrepresented",
        witness.is_none(),
        match witness {
            Some([x, y, w]) => format!("<{e1}, {e2}, {e3}> represents {t} at ({x}, {y}, {w})"),
            None => format!("<{e1}, {e2}, {e3}> does not represent {t}"),
        },
    );
    let c4_ok = tr.push("4", qr && unrep, "conjunction");

    Ok(ConditionReport { trace: tr.0, conditions: [c1_ok, c2_ok, c3_ok, c4_ok], witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    AlmostUniversal,
    NotAlmostUniversal,
    LocallyObstructed,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::AlmostUniversal => "AlmostUniversal",
            Self::NotAlmostUniversal => "NotAlmostUniversal",
            Self::LocallyObstructed => "LocallyObstructed",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Absent for locally obstructed forms.
    pub theorem: Option<TheoremId>,
    pub local: LocalVerdict,
    pub trace: Vec<TraceEntry>,
    /// The case's candidate exception; present whenever a case was evaluated.
    pub candidate: Option<SpinorCandidate>,
    /// A vector of `L` representing `t` when condition (4) fails on that account.
    pub witness_vector: Option<[i64; 3]>,
}

/// Classifies `form`: local conditions first, then the dispatched case.
pub fn classify(form: &FormInstance) -> Result<Verdict> {
    let local = genus_check(form);
    let mut trace = vec![TraceEntry {
        label: "local".to_string(),
        pass: local.ok(),
        detail: match local.failure() {
            None => "dyadic condition and split isometry at every odd q ≠ p hold".to_string(),
            Some(f) => format!("fails at q = {} ({})", f.prime, f.reason.as_str()),
        },
    }];
    if !local.ok() {
        return Ok(Verdict {
            kind: VerdictKind::LocallyObstructed,
            theorem: None,
            local,
            trace,
            candidate: None,
            witness_vector: None,
        });
    }

    let id = dispatch(form);
    let report = evaluate(form, id)?;
    trace.extend(report.trace.iter().cloned());
    let kind = if report.all_hold() { VerdictKind::NotAlmostUniversal } else { VerdictKind::AlmostUniversal };
    Ok(Verdict {
        kind,
        theorem: Some(id),
        local,
        trace,
        candidate: Some(candidate(form, id)?),
        witness_vector: report.witness,
    })
}
