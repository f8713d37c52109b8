//! Exact integer number theory on machine integers.
//!
//! Inputs are `i64`; every intermediate product is carried in `i128`/`u128`, so
//! nothing here can silently wrap. Primality is deterministic over the whole
//! `i64` range (the Miller-Rabin base set below is exact far beyond it).

use num_integer::Roots;

use crate::error::{Error, Result};

/// Witness set for the strong-pseudoprime test: the first thirteen primes,
/// which have no common strong pseudoprime below 3.3 * 10^24.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Trial division covers every prime below this bound before rho takes over.
const TRIAL_BOUND: u64 = 1_000_000;

/// Prime factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    negative: bool,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// `(prime, exponent)` pairs in ascending prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> i128 {
        let magnitude: i128 = self.factors.iter().map(|&(q, e)| (q as i128).pow(e)).product();
        if self.negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

/// Largest `e` with `q^e | n`.
pub fn valuation(n: i64, q: i64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Ok(valuation_unchecked(n as i128, q as i128))
}

pub(crate) fn valuation_unchecked(mut n: i128, q: i128) -> u32 {
    debug_assert!(n != 0 && q > 1);
    let mut e = 0;
    while n % q == 0 {
        n /= q;
        e += 1;
    }
    e
}

/// `n` with every factor of 2 removed.
pub fn odd_part(n: i64) -> Result<i64> {
    if n == 0 {
        return Err(Error::Zero);
    }
    Ok(n >> n.trailing_zeros())
}

/// The squarefree `d` with `n = d * s^2`, carrying the sign of `n`.
pub fn squarefree_part(n: i64) -> Result<i64> {
    let f = factorize(n)?;
    let magnitude: i64 = f.factors().iter().filter(|&&(_, e)| e % 2 == 1).map(|&(q, _)| q as i64).product();
    Ok(if f.is_negative() { -magnitude } else { magnitude })
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factorize(n).is_ok_and(|f| f.factors().iter().all(|&(_, e)| e == 1))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

/// Exact integer square root of a perfect square, `None` otherwise.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let ext = num_integer::Integer::extended_gcd(&a.rem_euclid(m), &m);
    (ext.gcd == 1).then(|| ext.x.rem_euclid(m))
}

/// Deterministic strong-pseudoprime test; exact for every `i64`.
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    for &q in &MR_BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Complete factorization of a nonzero integer: trial division below 10^6,
/// then Brent's variant of Pollard rho with fixed polynomial constants.
pub fn factorize(n: i64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut m = n.unsigned_abs();
    let mut factors = Vec::new();

    let mut push = |q: u64, m: &mut u64| {
        let mut e = 0;
        while *m % q == 0 {
            *m /= q;
            e += 1;
        }
        if e > 0 {
            factors.push((q, e));
        }
    };

    push(2, &mut m);
    let mut q = 3;
    while q < TRIAL_BOUND && q * q <= m {
        push(q, &mut m);
        q += 2;
    }

    if m > 1 {
        let mut stack = vec![m];
        let mut large = Vec::new();
        while let Some(x) = stack.pop() {
            if x < TRIAL_BOUND * TRIAL_BOUND || is_prime(x as i64) {
                // Every composite below 10^12 would have a factor below 10^6.
                large.push(x);
                continue;
            }
            let d = rho(x).ok_or(Error::FactorizationFailed(x))?;
            stack.push(d);
            stack.push(x / d);
        }
        large.sort_unstable();
        for x in large {
            match factors.last_mut() {
                Some((q, e)) if *q == x => *e += 1,
                _ => factors.push((x, 1)),
            }
        }
    }

    Ok(Factorization { negative: n < 0, factors })
}

/// A nontrivial divisor of the odd composite `n`.
fn rho(n: u64) -> Option<u64> {
    const BATCH: u64 = 128;
    const MAX_ROUNDS: u32 = 40;
    for c in 1..=64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let (mut x, mut ys) = (y, y);
        let mut rounds = 0;
        while g == 1 && rounds < MAX_ROUNDS {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = num_integer::gcd(q, n);
                k += BATCH;
            }
            r *= 2;
            rounds += 1;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
    }
    None
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::BadModulus(n));
    }
    Ok(jacobi_unchecked(a as i128, n as u64))
}

pub(crate) fn jacobi_unchecked(a: i128, n: u64) -> i8 {
    let mut a = a.rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// A nonzero element of `Q_2` up to squares: `unit * 2^exp` with `unit` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dyadic {
    unit: i64,
    exp: u32,
}

impl Dyadic {
    pub fn new(unit: i64, exp: u32) -> Result<Self> {
        if unit % 2 == 0 {
            return Err(if unit == 0 { Error::Zero } else { Error::BadModulus(unit) });
        }
        Ok(Self { unit, exp })
    }

    pub fn from_int(x: i64) -> Result<Self> {
        if x == 0 {
            return Err(Error::Zero);
        }
        let exp = x.trailing_zeros();
        Ok(Self { unit: x >> exp, exp })
    }

    pub fn unit(&self) -> i64 {
        self.unit
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// Canonical square-class key: (exponent parity, unit mod 8).
    pub fn square_class(&self) -> (u32, u8) {
        (self.exp % 2, self.unit.rem_euclid(8) as u8)
    }
}

// (u - 1)/2 mod 2
fn eps(u: i64) -> u32 {
    (u.rem_euclid(4) == 3) as u32
}

// (u^2 - 1)/8 mod 2
fn omega(u: i64) -> u32 {
    matches!(u.rem_euclid(8), 3 | 5) as u32
}

/// Hilbert symbol `(x, y)_2` from square-class data.
pub fn hilbert2(x: Dyadic, y: Dyadic) -> i8 {
    let (u, v) = (x.unit, y.unit);
    let parity = eps(u) * eps(v) + x.exp * omega(v) + y.exp * omega(u);
    if parity % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Membership of `x` in the local norm group `N_2(Q(sqrt(d)))`.
pub fn in_norm_group_2(x: i64, d: i64) -> Result<bool> {
    if d == 1 || !is_squarefree(d) {
        return Err(Error::BadSquareClass(d));
    }
    Ok(hilbert2(Dyadic::from_int(x)?, Dyadic::from_int(d)?) == 1)
}

/// Solvability of `x^2 = u (mod p^k)` for a `p`-adic unit `u`.
pub fn is_qr_mod_pk(u: i64, p: i64, k: u32) -> Result<bool> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::BadExponent);
    }
    if u % p == 0 {
        return Err(Error::NotUnit { value: u, prime: p });
    }
    // Hensel: for odd p a unit square mod p lifts to every p^k.
    Ok(jacobi_unchecked(u as i128, p as u64) == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
}

/// Decomposition of the odd prime `q` in `Q(sqrt(d))`, `d` squarefree.
pub fn splits_in(q: i64, d: i64) -> Result<Splitting> {
    if q == 2 || !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if d == 1 || !is_squarefree(d) {
        return Err(Error::BadSquareClass(d));
    }
    if d % q == 0 {
        return Err(Error::Ramified { q, d });
    }
    // The field discriminant is d or 4d; 4 is a square mod every odd q.
    let disc = if d.rem_euclid(4) == 1 { d as i128 } else { 4 * d as i128 };
    Ok(match jacobi_unchecked(disc, q as u64) {
        1 => Splitting::Split,
        _ => Splitting::Inert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(8, 2), Ok(3));
        assert_eq!(valuation(45, 3), Ok(2));
        assert_eq!(valuation(7, 5), Ok(0));
        assert_eq!(valuation(0, 5), Err(Error::Zero));
        assert_eq!(valuation(10, 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn odd_and_squarefree_parts() {
        assert_eq!(odd_part(12), Ok(3));
        assert_eq!(odd_part(7), Ok(7));
        assert_eq!(odd_part(80), Ok(5));
        assert_eq!(odd_part(-80), Ok(-5));
        assert_eq!(odd_part(0), Err(Error::Zero));
        assert_eq!(squarefree_part(12), Ok(3));
        assert_eq!(squarefree_part(9), Ok(1));
        assert_eq!(squarefree_part(45), Ok(5));
        assert_eq!(squarefree_part(-18), Ok(-2));
        assert_eq!(squarefree_part(0), Err(Error::Zero));
    }

    #[test]
    fn factorizations() {
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        let m61 = (1i64 << 61) - 1;
        assert_eq!(factorize(m61).unwrap().factors(), &[(m61 as u64, 1)]);
        // two primes above the trial bound
        let (p, q) = (1_000_003u64, 998_244_353u64);
        let f = factorize((p * q) as i64).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
        let f = factorize(-(p as i64) * (p as i64) * 12).unwrap();
        assert!(f.is_negative());
        assert_eq!(f.factors(), &[(2, 2), (3, 1), (p, 2)]);
        assert_eq!(factorize(i64::MIN).unwrap().factors(), &[(2, 63)]);
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(-7));
        assert!(is_prime((1 << 61) - 1));
        assert!(!trial_is_prime(3_215_031_751));
        assert!(!is_prime(3_215_031_751));
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n as i64), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(2, 7), Ok(1));
        assert_eq!(jacobi(2, 3), Ok(-1));
        assert_eq!(jacobi(6, 9), Ok(0));
        assert_eq!(jacobi(3, 8), Err(Error::BadModulus(8)));
        assert_eq!(jacobi(3, -5), Err(Error::BadModulus(-5)));
        // Euler's criterion: 1001^((9907-1)/2) mod 9907.
        assert!(is_prime(9907));
        let euler = pow_mod(1001, 9906 / 2, 9907);
        let expected = if euler == 1 { 1 } else { -1 };
        assert!(euler == 1 || euler == 9906);
        assert_eq!(jacobi(1001, 9907), Ok(expected));
    }

    #[test]
    fn hilbert_examples() {
        let h = |x, y| hilbert2(Dyadic::from_int(x).unwrap(), Dyadic::from_int(y).unwrap());
        for d in [-1, 2, 3, -5, 10, 7] {
            assert_eq!(h(1, d), 1);
        }
        assert_eq!(h(-1, -1), -1);
        assert_eq!(h(2, 7), 1);
        assert_eq!(h(2, 3), -1);
        assert_eq!(h(5, 2), -1);
        assert_eq!(Dyadic::new(4, 0), Err(Error::BadModulus(4)));
        assert_eq!(Dyadic::from_int(0), Err(Error::Zero));
    }

    #[test]
    fn norm_group_examples() {
        for p in [5, 13, 17, 29] {
            assert_eq!(in_norm_group_2(5, -p), Ok(true));
        }
        for p in [17, 41, 73] {
            assert_eq!(in_norm_group_2(2, -p), Ok(true));
        }
        for p in [3, 5, 7, 11, 13, 17, 19] {
            assert_eq!(in_norm_group_2(5, -2 * p), Ok(false));
        }
        assert_eq!(in_norm_group_2(5, 1), Err(Error::BadSquareClass(1)));
        assert_eq!(in_norm_group_2(5, -12), Err(Error::BadSquareClass(-12)));
        assert_eq!(in_norm_group_2(0, -3), Err(Error::Zero));
    }

    #[test]
    fn quadratic_residues_mod_prime_powers() {
        assert_eq!(is_qr_mod_pk(1, 11, 3), Ok(true));
        assert_eq!(is_qr_mod_pk(2, 7, 1), Ok(true));
        assert_eq!(is_qr_mod_pk(2, 5, 2), Ok(false));
        assert!((0..25).all(|x| x * x % 25 != 2));
        assert_eq!(is_qr_mod_pk(10, 5, 1), Err(Error::NotUnit { value: 10, prime: 5 }));
        assert_eq!(is_qr_mod_pk(3, 9, 1), Err(Error::NotPrime(9)));
        assert_eq!(is_qr_mod_pk(3, 5, 0), Err(Error::BadExponent));
    }

    #[test]
    fn qr_agrees_with_enumeration() {
        for p in [3i64, 5, 7, 11, 13] {
            let mut pk = p;
            for k in 1..=5u32 {
                if pk > 243 {
                    break;
                }
                let squares: std::collections::HashSet<i64> = (0..pk).map(|x| x * x % pk).collect();
                for u in (1..pk).filter(|u| u % p != 0) {
                    assert_eq!(is_qr_mod_pk(u, p, k).unwrap(), squares.contains(&u), "{u} mod {p}^{k}");
                }
                pk *= p;
            }
        }
    }

    #[test]
    fn splitting() {
        assert_eq!(splits_in(5, -1), Ok(Splitting::Split));
        assert_eq!(splits_in(7, -1), Ok(Splitting::Inert));
        let squares: Vec<i64> = (0..11).map(|x| x * x % 11).collect();
        let expected = if squares.contains(&(-6i64).rem_euclid(11)) { Splitting::Split } else { Splitting::Inert };
        assert_eq!(splits_in(11, -6), Ok(expected));
        assert_eq!(splits_in(3, -6), Err(Error::Ramified { q: 3, d: -6 }));
        assert_eq!(splits_in(2, -1), Err(Error::NotPrime(2)));
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(-3, 7), Some(2));
        assert_eq!(inv_mod(6, 9), None);
    }
}
