//! The polynomial `f(x, y, z) = a x^2 + b y^2 + c P_{p^k+2}(z)`.
//!
//! [`FormInstance`] validates and normalizes the parameters once; everything
//! downstream reads the derived invariants from it. [`represented_set`] is the
//! brute-force oracle every verdict is checked against.

use num_integer::Roots;
use rayon::prelude::*;

use crate::arith::{self, exact_sqrt};
use crate::error::{Error, Result};

/// Largest sieve bound accepted by [`represented_set`] (125 MB bitmap).
pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000_000;

/// A validated parameter tuple `(a, b, c, p, k)` with its derived invariants,
/// normalized so that `v_2(a) >= v_2(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormInstance {
    a: i64,
    b: i64,
    c: i64,
    p: i64,
    k: u32,
    pk: i64,
    swapped: bool,
    nu_p_a: u32,
    nu_p_b: u32,
    nu2_a: u32,
    nu2_b: u32,
    nu2_c: u32,
    a0: i64,
    b0: i64,
}

impl FormInstance {
    pub fn new(a: i64, b: i64, c: i64, p: i64, k: u32) -> Result<Self> {
        if a <= 0 || b <= 0 || c <= 0 {
            return Err(Error::NonPositiveCoefficient);
        }
        if p == 2 || !arith::is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if k == 0 {
            return Err(Error::BadExponent);
        }
        let g = arith::gcd(arith::gcd(a, b), c);
        if g != 1 {
            return Err(Error::GcdNotOne(g));
        }
        if c % p == 0 {
            return Err(Error::PDividesC);
        }
        let pk = p.checked_pow(k).ok_or(Error::Overflow("p^k"))?;
        // The lattice entries 8 p^k a, 8 p^k b and 4 p^{2k} c must stay in i64.
        let eight_pk = pk.checked_mul(8).ok_or(Error::Overflow("8 p^k"))?;
        eight_pk.checked_mul(a.max(b)).ok_or(Error::Overflow("8 p^k max(a, b)"))?;
        pk.checked_mul(pk)
            .and_then(|v| v.checked_mul(4))
            .and_then(|v| v.checked_mul(c))
            .ok_or(Error::Overflow("4 p^2k c"))?;

        let (a, b, swapped) = if b.trailing_zeros() > a.trailing_zeros() { (b, a, true) } else { (a, b, false) };
        let nu_p_a = arith::valuation_unchecked(a as i128, p as i128);
        let nu_p_b = arith::valuation_unchecked(b as i128, p as i128);
        Ok(Self {
            a,
            b,
            c,
            p,
            k,
            pk,
            swapped,
            nu_p_a,
            nu_p_b,
            nu2_a: a.trailing_zeros(),
            nu2_b: b.trailing_zeros(),
            nu2_c: c.trailing_zeros(),
            a0: a / p.pow(nu_p_a),
            b0: b / p.pow(nu_p_b),
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn p(&self) -> i64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    /// `p^k`.
    pub fn pk(&self) -> i64 {
        self.pk
    }
    /// The polygonal order `m = p^k + 2`.
    pub fn order(&self) -> i64 {
        self.pk + 2
    }
    /// Whether `a` and `b` were exchanged to get `v_2(a) >= v_2(b)`.
    pub fn swapped(&self) -> bool {
        self.swapped
    }
    /// `(a, b)` in the order the caller supplied them.
    pub fn original_ab(&self) -> (i64, i64) {
        if self.swapped {
            (self.b, self.a)
        } else {
            (self.a, self.b)
        }
    }
    pub fn nu_p_a(&self) -> u32 {
        self.nu_p_a
    }
    pub fn nu_p_b(&self) -> u32 {
        self.nu_p_b
    }
    pub fn nu2_a(&self) -> u32 {
        self.nu2_a
    }
    pub fn nu2_b(&self) -> u32 {
        self.nu2_b
    }
    pub fn nu2_c(&self) -> u32 {
        self.nu2_c
    }
    /// Odd part of `a`.
    pub fn a_odd(&self) -> i64 {
        self.a >> self.nu2_a
    }
    pub fn b_odd(&self) -> i64 {
        self.b >> self.nu2_b
    }
    pub fn c_odd(&self) -> i64 {
        self.c >> self.nu2_c
    }
    /// `a` with every factor of `p` removed.
    pub fn a0(&self) -> i64 {
        self.a0
    }
    pub fn b0(&self) -> i64 {
        self.b0
    }

    /// `f(x, y, z)`, or `None` on overflow.
    pub fn eval(&self, x: i64, y: i64, z: i64) -> Option<i64> {
        let v = self.a as i128 * (x as i128).pow(2)
            + self.b as i128 * (y as i128).pow(2)
            + self.c as i128 * polygonal_i128(self.order() as i128, z as i128);
        i64::try_from(v).ok()
    }

    // P_m(z) for the form's own order; callers keep z inside the search box.
    fn poly(&self, z: i64) -> i128 {
        polygonal_i128(self.order() as i128, z as i128)
    }
}

impl std::fmt::Display for FormInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.original_ab();
        write!(f, "{a}x^2 + {b}y^2 + {}P_{}(z)", self.c, self.order())
    }
}

fn polygonal_i128(m: i128, x: i128) -> i128 {
    ((m - 2) * x * x - (m - 4) * x) / 2
}

/// The generalized `m`-gonal number `((m - 2) x^2 - (m - 4) x) / 2`.
pub fn polygonal(m: i64, x: i64) -> Result<i64> {
    if m < 3 {
        return Err(Error::BadOrder(m));
    }
    let (m, x) = (m as i128, x as i128);
    let quad = (m - 2).checked_mul(x).and_then(|v| v.checked_mul(x)).ok_or(Error::Overflow("polygonal number"))?;
    let v = (quad - (m - 4) * x) / 2;
    i64::try_from(v).map_err(|_| Error::Overflow("polygonal number"))
}

/// `8 p^k n + c (p^k - 2)^2`, the value the lattice side has to represent.
pub fn shifted_target(form: &FormInstance, n: i64) -> Result<i64> {
    if n < 0 {
        return Err(Error::Negative(n));
    }
    let pk = form.pk as i128;
    let v = 8 * pk * n as i128 + form.c as i128 * (pk - 2).pow(2);
    i64::try_from(v).map_err(|_| Error::Overflow("shifted target"))
}

/// An integral point `(x, y, z)` on `f = t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Solution {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Solution {
    pub fn value(&self, form: &FormInstance) -> Option<i64> {
        form.eval(self.x, self.y, self.z)
    }
}

// Signed values of the given magnitude, smallest first: 0; -1, 1; -2, 2; ...
fn signed(mag: i64) -> impl Iterator<Item = i64> {
    let neg = (mag > 0).then_some(-mag);
    neg.into_iter().chain(std::iter::once(mag))
}

/// Searches `f(x, y, z) = t`.
///
/// Returns the solution minimizing `(|z|, z, |y|, y, |x|, x)`
/// lexicographically, so results are reproducible.
pub fn represents(form: &FormInstance, t: i64) -> Result<Option<Solution>> {
    if t < 0 {
        return Err(Error::Negative(t));
    }
    let (a, b, c) = (form.a, form.b, form.c);
    // P(|z|) <= P(-|z|) and P is increasing on z >= 0, so stop once c P(|z|) > t.
    for zmag in 0i64.. {
        if c as i128 * form.poly(zmag) > t as i128 {
            break;
        }
        for z in signed(zmag) {
            let cz = c as i128 * form.poly(z);
            if cz > t as i128 {
                continue;
            }
            let rem = t - cz as i64;
            let ymax = (rem / b).sqrt();
            for ymag in 0..=ymax {
                let rest = rem - b * ymag * ymag;
                if rest % a != 0 {
                    continue;
                }
                if let Some(xmag) = exact_sqrt((rest / a) as i128) {
                    let xmag = xmag as i64;
                    let y = signed(ymag).next().unwrap_or(0);
                    let x = signed(xmag).next().unwrap_or(0);
                    return Ok(Some(Solution { x, y, z }));
                }
            }
        }
    }
    Ok(None)
}

/// Membership bitmap of `{f(x, y, z)} ∩ [0, N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentedSet {
    bound: u64,
    words: Vec<u64>,
}

impl RepresentedSet {
    fn empty(bound: u64) -> Self {
        Self { bound, words: vec![0; (bound / 64 + 1) as usize] }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.bound && self.words[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    fn insert(&mut self, n: u64) {
        self.words[(n / 64) as usize] |= 1 << (n % 64);
    }

    /// Number of represented values in `[0, N]`.
    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Values in `[0, N]` that are not represented, ascending.
    pub fn missing(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.bound).filter(move |&n| !self.contains(n))
    }

    /// `self |= other << shift`, truncated at the bound.
    fn or_shifted(&mut self, other: &Self, shift: u64) {
        let len = self.words.len();
        let (wshift, bshift) = ((shift / 64) as usize, (shift % 64) as u32);
        if wshift >= len {
            return;
        }
        let dst = &mut self.words[wshift..];
        if bshift == 0 {
            for (d, s) in dst.iter_mut().zip(&other.words) {
                *d |= *s;
            }
        } else {
            let mut carry = 0u64;
            for (d, s) in dst.iter_mut().zip(&other.words) {
                *d |= s << bshift | carry;
                carry = s >> (64 - bshift);
            }
        }
        self.mask_tail();
    }

    fn union_with(&mut self, other: &Self) {
        for (d, s) in self.words.iter_mut().zip(&other.words) {
            *d |= *s;
        }
    }

    fn mask_tail(&mut self) {
        let used = self.bound % 64 + 1;
        if used < 64 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

/// Exact represented set of `f` on `[0, N]`, capped at [`DEFAULT_SIEVE_CAP`].
pub fn represented_set(form: &FormInstance, bound: u64) -> Result<RepresentedSet> {
    represented_set_with_cap(form, bound, DEFAULT_SIEVE_CAP)
}

/// Sieve with an explicit budget on `N`.
///
/// The outer loop runs over `z` with `c P(z) <= N`. The inner `(y, x)` loops
/// do not depend on `z`, so they are run once into a bitmap of the binary part
/// `a x^2 + b y^2`, and each `z` contributes that bitmap shifted by `c P(z)`.
/// The `z` range is split across rayon workers; OR is commutative, so the
/// result is identical to the sequential sieve.
pub fn represented_set_with_cap(form: &FormInstance, bound: u64, cap: u64) -> Result<RepresentedSet> {
    if bound > cap {
        return Err(Error::BudgetExceeded { requested: bound, cap });
    }
    let bound_i = bound as i64;
    let (a, b, c) = (form.a, form.b, form.c);

    let mut binary = RepresentedSet::empty(bound);
    let mut y = 0i64;
    while b * y * y <= bound_i {
        let by2 = b * y * y;
        let mut x = 0i64;
        while by2 + a * x * x <= bound_i {
            binary.insert((by2 + a * x * x) as u64);
            x += 1;
        }
        y += 1;
    }

    let mut shifts = Vec::new();
    for zmag in 0i64.. {
        if c as i128 * form.poly(zmag) > bound as i128 {
            break;
        }
        for z in signed(zmag) {
            let cz = c as i128 * form.poly(z);
            if cz <= bound as i128 {
                shifts.push(cz as u64);
            }
        }
    }

    const SEQUENTIAL_WORK: usize = 1 << 16;
    let work = shifts.len() * binary.words.len();
    if work < SEQUENTIAL_WORK {
        let mut out = RepresentedSet::empty(bound);
        for &s in &shifts {
            out.or_shifted(&binary, s);
        }
        return Ok(out);
    }
    let chunk = (SEQUENTIAL_WORK / binary.words.len()).max(1);
    let out = shifts
        .par_chunks(chunk)
        .map(|chunk| {
            let mut part = RepresentedSet::empty(bound);
            for &s in chunk {
                part.or_shifted(&binary, s);
            }
            part
        })
        .reduce(
            || RepresentedSet::empty(bound),
            |mut acc, part| {
                acc.union_with(&part);
                acc
            },
        );
    Ok(out)
}
