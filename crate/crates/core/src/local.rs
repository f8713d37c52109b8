//! Genus-level (local) conditions.
//!
//! After the shift `n -> 8 p^k n + c (p^k - 2)^2` the polynomial becomes a
//! coset of the diagonal lattice `M = <8 p^k a, 8 p^k b, 4 p^{2k} c>`. Every
//! shifted target is represented by the genus exactly when
//!
//! * `4 ∤ c`, or `4 || c` and `2 || ab` (the dyadic condition), and
//! * `M_q ≅ <1, -1, -dM>` at every odd prime `q ≠ p`.
//!
//! At `p` the polygonal term alone covers every `p`-adic integer, so `p` is
//! never consulted.

use num_integer::Roots;

use crate::arith::{self, valuation_unchecked};
use crate::error::{Error, Result};
use crate::forms::FormInstance;

/// A ternary diagonal lattice `<e1, e2, e3>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalLattice {
    entries: [i128; 3],
}

impl DiagonalLattice {
    pub fn new(entries: [i128; 3]) -> Result<Self> {
        if entries.contains(&0) {
            return Err(Error::Zero);
        }
        Ok(Self { entries })
    }

    /// `M = <8 p^k a, 8 p^k b, 4 p^{2k} c>`.
    pub fn coset_lattice(form: &FormInstance) -> Self {
        let pk = form.pk() as i128;
        Self { entries: [8 * pk * form.a() as i128, 8 * pk * form.b() as i128, 4 * pk * pk * form.c() as i128] }
    }

    /// `L = <8 p^k a, 8 p^k b, c>`.
    pub fn reduced_lattice(form: &FormInstance) -> Self {
        let pk = form.pk() as i128;
        Self { entries: [8 * pk * form.a() as i128, 8 * pk * form.b() as i128, form.c() as i128] }
    }

    pub fn entries(&self) -> [i128; 3] {
        self.entries
    }

    pub fn discriminant(&self) -> i128 {
        self.entries.iter().product()
    }

    /// A vector `v >= 0` with `e1 v1^2 + e2 v2^2 + e3 v3^2 = t`, if any.
    ///
    /// Loops over the coordinates of the two largest entries and solves for
    /// the third; the first hit in that order is returned.
    pub fn represent(&self, t: i128) -> Result<Option<[i128; 3]>> {
        self.represent_with_cap(t, crate::forms::DEFAULT_SIEVE_CAP)
    }

    pub fn represent_with_cap(&self, t: i128, cap: u64) -> Result<Option<[i128; 3]>> {
        if self.entries.iter().any(|&e| e <= 0) {
            return Err(Error::NonPositiveCoefficient);
        }
        if t < 0 {
            return Err(Error::Negative(t.try_into().unwrap_or(i64::MIN)));
        }
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&i| std::cmp::Reverse(self.entries[i]));
        let [i, j, s] = order;
        let (ei, ej, es) = (self.entries[i], self.entries[j], self.entries[s]);
        let (ri, rj) = ((t / ei).sqrt(), (t / ej).sqrt());
        let work = (ri + 1).saturating_mul(rj + 1);
        if work > cap as i128 {
            return Err(Error::BudgetExceeded { requested: work.try_into().unwrap_or(u64::MAX), cap });
        }
        for vi in 0..=ri {
            let rest_i = t - ei * vi * vi;
            for vj in 0.. {
                let rest = rest_i - ej * vj * vj;
                if rest < 0 {
                    break;
                }
                if rest % es != 0 {
                    continue;
                }
                if let Some(vs) = arith::exact_sqrt(rest / es) {
                    let mut v = [0; 3];
                    (v[i], v[j], v[s]) = (vi, vj, vs);
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    }
}

/// One Jordan component `q^scale * U` of a lattice over `Z_q`, `q` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct JordanComponent {
    pub scale: u32,
    pub rank: u8,
    /// Legendre symbol of the determinant of the unimodular part `U`.
    pub class: i8,
}

fn check_odd_prime(q: i64) -> Result<()> {
    if q == 2 || !arith::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Ok(())
}

/// Groups the diagonal entries by `v_q` into Jordan components, ascending scale.
pub fn jordan_decompose_odd(entries: [i128; 3], q: i64) -> Result<Vec<JordanComponent>> {
    check_odd_prime(q)?;
    if entries.contains(&0) {
        return Err(Error::Zero);
    }
    let qi = q as i128;
    let mut split: Vec<(u32, i128)> = entries
        .iter()
        .map(|&e| {
            let v = valuation_unchecked(e, qi);
            (v, (e / qi.pow(v)).rem_euclid(qi))
        })
        .collect();
    split.sort_by_key(|&(v, _)| v);

    let mut out: Vec<JordanComponent> = Vec::new();
    for (scale, unit) in split {
        let class = arith::jacobi_unchecked(unit, q as u64);
        match out.last_mut() {
            Some(last) if last.scale == scale => {
                last.rank += 1;
                last.class *= class;
            }
            _ => out.push(JordanComponent { scale, rank: 1, class }),
        }
    }
    Ok(out)
}

/// Whether `<e1, e2, e3> ≅ <1, -1, -d>` over `Z_q` with `d = e1 e2 e3`.
///
/// Over `Z_q` for odd `q` a lattice is determined by the scale, rank and
/// determinant class of each Jordan component, so comparing the two
/// decompositions decides the isometry.
pub fn isometric_to_split(entries: [i128; 3], q: i64) -> Result<bool> {
    let d: i128 = entries.iter().product();
    let lhs = jordan_decompose_odd(entries, q)?;
    let rhs = jordan_decompose_odd([1, -1, -d], q)?;
    Ok(lhs == rhs)
}

/// `4 ∤ c`, or `4 || c` together with `2 || ab`.
pub fn dyadic_c_condition(form: &FormInstance) -> bool {
    match form.nu2_c() {
        0 | 1 => true,
        2 => form.nu2_a() + form.nu2_b() == 1,
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalFailureReason {
    DyadicCCondition,
    OddPrimeAnisotropy,
}

impl LocalFailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DyadicCCondition => "dyadic_c_condition",
            Self::OddPrimeAnisotropy => "odd_prime_anisotropy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalFailure {
    pub prime: i64,
    pub reason: LocalFailureReason,
}

/// Outcome of the genus check; carries the smallest failing prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalVerdict {
    failure: Option<LocalFailure>,
}

impl LocalVerdict {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }

    pub fn failure(&self) -> Option<LocalFailure> {
        self.failure
    }

    pub fn failing_prime(&self) -> Option<i64> {
        self.failure.map(|f| f.prime)
    }
}

/// Odd primes other than `p` dividing `abc`, ascending.
pub fn relevant_odd_primes(form: &FormInstance) -> Vec<i64> {
    let mut primes: Vec<i64> = [form.a(), form.b(), form.c()]
        .iter()
        .flat_map(|&v| {
            arith::factorize(v).expect("coefficients are positive").primes().map(|q| q as i64).collect::<Vec<_>>()
        })
        .filter(|&q| q != 2 && q != form.p())
        .collect();
    primes.sort_unstable();
    primes.dedup();
    primes
}

/// Checks both local conditions and reports the smallest failing prime.
///
/// Odd primes `q ∤ 2p abc` are skipped: there both `M_q` and `<1, -1, -dM>`
/// are unimodular of rank 3 with the same discriminant, hence isometric.
pub fn genus_check(form: &FormInstance) -> LocalVerdict {
    if !dyadic_c_condition(form) {
        return LocalVerdict { failure: Some(LocalFailure { prime: 2, reason: LocalFailureReason::DyadicCCondition }) };
    }
    let entries = DiagonalLattice::coset_lattice(form).entries();
    let failure = relevant_odd_primes(form)
        .into_iter()
        .find(|&q| !isometric_to_split(entries, q).expect("q is an odd prime"))
        .map(|q| LocalFailure { prime: q, reason: LocalFailureReason::OddPrimeAnisotropy });
    LocalVerdict { failure }
}

/// The arithmetic progression `n ≡ residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueClass {
    pub modulus: u64,
    pub residue: u64,
}

impl ResidueClass {
    pub fn contains(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }

    /// The matching class of shifted targets `8 p^k n + c (p^k - 2)^2`,
    /// taken modulo `8 p^k * modulus`.
    pub fn shifted(&self, form: &FormInstance) -> ResidueClass {
        let pk = form.pk() as u64;
        let modulus = 8 * pk * self.modulus;
        let offset = form.c() as u64 * (pk - 2) * (pk - 2);
        ResidueClass { modulus, residue: (8 * pk * self.residue + offset) % modulus }
    }
}

/// Smallest residue class of `n` modulo a power of `prime` that `f` misses
/// over `Z / prime^e`, trying `prime, prime^2, ...` up to `max_modulus`.
///
/// Any such class is missed by `f` over the integers as well. For odd
/// `prime` the value `P(z) mod M` depends on `z mod M`; for `prime = 2` it
/// depends on `z mod 2M`.
pub fn missing_class(form: &FormInstance, prime: i64, max_modulus: u64) -> Option<ResidueClass> {
    let mut modulus = prime as u64;
    while modulus <= max_modulus {
        if let Some(residue) = first_unreached(form, modulus, prime == 2) {
            return Some(ResidueClass { modulus, residue });
        }
        modulus *= prime as u64;
    }
    None
}

fn first_unreached(form: &FormInstance, m: u64, dyadic: bool) -> Option<u64> {
    let mi = m as i128;
    let residues = |coef: i64, f: &dyn Fn(i128) -> i128, period: u64| {
        let mut seen = vec![false; m as usize];
        for x in 0..period as i128 {
            seen[(coef as i128 * f(x)).rem_euclid(mi) as usize] = true;
        }
        seen
    };
    let square = |x: i128| x * x;
    let pk = form.pk() as i128;
    let poly = |z: i128| (pk * z * z - (pk - 2) * z) / 2;
    let sa = residues(form.a(), &square, m);
    let sb = residues(form.b(), &square, m);
    let sc = residues(form.c(), &poly, if dyadic { 2 * m } else { m });

    let sum = |lhs: &[bool], rhs: &[bool]| {
        let mut out = vec![false; m as usize];
        let rhs: Vec<usize> = (0..m as usize).filter(|&j| rhs[j]).collect();
        for i in (0..m as usize).filter(|&i| lhs[i]) {
            for &j in &rhs {
                out[(i + j) % m as usize] = true;
            }
        }
        out
    };
    let all = sum(&sum(&sa, &sb), &sc);
    all.iter().position(|&hit| !hit).map(|r| r as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(a: i64, b: i64, c: i64, p: i64, k: u32) -> FormInstance {
        FormInstance::new(a, b, c, p, k).unwrap()
    }

    fn jc(scale: u32, rank: u8, class: i8) -> JordanComponent {
        JordanComponent { scale, rank, class }
    }

    #[test]
    fn jordan_grouping() {
        // <1, -1, -d> with 7 ∤ d: a single unimodular block of class (d / 7).
        let d = 10;
        let class = arith::jacobi(d, 7).unwrap();
        assert_eq!(jordan_decompose_odd([1, -1, -d as i128], 7).unwrap(), vec![jc(0, 3, class)]);

        // <q^2 u1, u2, u3>
        let (q, u1, u2, u3) = (5i64, 2, 3, 4);
        let got = jordan_decompose_odd([(q * q * u1) as i128, u2 as i128, u3 as i128], q).unwrap();
        let c23 = arith::jacobi(u2 * u3, q).unwrap();
        let c1 = arith::jacobi(u1, q).unwrap();
        assert_eq!(got, vec![jc(0, 2, c23), jc(2, 1, c1)]);

        // (3, 6, 5) at q = 3: v_3 = (1, 1, 0); 5 ≡ 2 is a non-residue, as is 1 * 2.
        assert_eq!(jordan_decompose_odd([3, 6, 5], 3).unwrap(), vec![jc(0, 1, -1), jc(1, 2, -1)]);

        assert_eq!(jordan_decompose_odd([3, 6, 5], 2), Err(Error::NotPrime(2)));
        assert_eq!(jordan_decompose_odd([3, 0, 5], 3), Err(Error::Zero));
    }

    #[test]
    fn split_isometry_examples() {
        assert!(isometric_to_split([2, 3, 7], 5).unwrap());
        // Unimodular rank 1 plus a rank-2 block at scale 5, against rank 2 plus
        // rank 1 at scale 25.
        assert!(!isometric_to_split([5, 5, 1], 5).unwrap());
        // <u1, u2, q u3> with -u1 u2 a square mod q.
        assert!(isometric_to_split([1, 4, 5 * 3], 5).unwrap());
        // -1 is a non-residue mod 7.
        assert!(!isometric_to_split([1, 1, 7], 7).unwrap());
    }

    #[test]
    fn dyadic_condition() {
        assert!(dyadic_c_condition(&form(1, 1, 1, 3, 1)));
        assert!(!dyadic_c_condition(&form(1, 1, 8, 3, 1)));
        assert!(dyadic_c_condition(&form(2, 1, 4, 3, 1)));
        assert!(!dyadic_c_condition(&form(1, 1, 4, 3, 1)));
        assert!(!dyadic_c_condition(&form(4, 1, 4, 3, 1)));
        assert!(dyadic_c_condition(&form(5, 1, 2, 3, 1)));
    }

    #[test]
    fn genus_examples() {
        assert!(genus_check(&form(2, 2, 1, 5, 1)).ok());
        let v = genus_check(&form(1, 1, 8, 3, 1));
        assert_eq!(v.failure(), Some(LocalFailure { prime: 2, reason: LocalFailureReason::DyadicCCondition }));
        // Entries (120, 120, 36): at q = 5 the scales are (0, 1, 1) but the split
        // lattice has (0, 0, 2).
        let v = genus_check(&form(5, 5, 1, 3, 1));
        assert_eq!(v.failure(), Some(LocalFailure { prime: 5, reason: LocalFailureReason::OddPrimeAnisotropy }));
        assert_eq!(relevant_odd_primes(&form(15, 14, 11, 3, 1)), vec![5, 7, 11]);
    }

    #[test]
    fn missing_classes() {
        // 8 | c: a x^2 + b y^2 mod 8 misses a class and c P(z) ≡ 0 mod 8.
        let f = form(1, 1, 8, 3, 1);
        let class = missing_class(&f, 2, 1 << 10).unwrap();
        assert!(class.modulus <= 8);
        let f = form(5, 5, 1, 3, 1);
        let class = missing_class(&f, 5, 10_000).unwrap();
        assert_eq!(class.modulus % 5, 0);
        assert!(missing_class(&form(1, 1, 1, 3, 1), 5, 10_000).is_none());
        let shifted = ResidueClass { modulus: 5, residue: 2 }.shifted(&form(1, 1, 1, 3, 1));
        assert_eq!(shifted, ResidueClass { modulus: 120, residue: 49 });
    }
}
