//! Exact rational helpers shared by the samplers, the exhaustive searches
//! and the parameter-table checks.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, Zero};

/// Machine-width rational, used for question-distribution masses and
/// exact acceptance bookkeeping on desk-scale instances.
pub type Rat = Ratio<i64>;

/// Arbitrary-precision rational, used where parameters like `2^{3η+6}·n!`
/// overflow 64 bits.
pub type BigRat = Ratio<BigInt>;

/// Best rational approximation of a float with bounded denominator
/// (continued-fraction expansion). Recovers `1/3` from its nearest `f64`,
/// which matters because the question-distribution masses are kept exact.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    const MAX_DEN: i64 = 1_000_000_000;
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut frac = x.abs();
    // Convergents h_k / k_k of the continued fraction of |x|.
    let (mut h0, mut h1): (i64, i64) = (1, frac.floor() as i64);
    let (mut k0, mut k1): (i64, i64) = (0, 1);
    frac -= frac.floor();
    for _ in 0..64 {
        if frac.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / frac;
        let a = frac.floor();
        if a >= MAX_DEN as f64 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DEN {
            break;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        frac -= a as f64;
    }
    let _ = (h0, k0);
    let r = Rat::new(if negative { -h1 } else { h1 }, k1);
    // Accept only if the approximation is faithful at f64 resolution.
    let back = *r.numer() as f64 / *r.denom() as f64;
    if (back - x).abs() <= 1e-12 * x.abs().max(1.0) {
        Some(r)
    } else {
        None
    }
}

fn bigint_nth_root(n: &BigInt, k: u32) -> BigInt {
    debug_assert!(!n.is_negative());
    if n.is_zero() {
        return BigInt::zero();
    }
    let bits = n.bits();
    let mut guess = BigInt::one() << (bits / k as u64 + 1);
    // Newton iteration on x^k - n, monotone decreasing from an over-estimate.
    loop {
        let gk1 = guess.pow(k - 1);
        let next = ((BigInt::from(k - 1) * &guess) + n / &gk1) / BigInt::from(k);
        if next >= guess {
            break;
        }
        guess = next;
    }
    while guess.pow(k) > *n {
        guess -= 1;
    }
    guess
}

fn exact_root(x: &BigRat, k: u32) -> Option<BigRat> {
    if x.is_negative() {
        return None;
    }
    let num_root = bigint_nth_root(x.numer(), k);
    let den_root = bigint_nth_root(x.denom(), k);
    if num_root.pow(k) == *x.numer() && den_root.pow(k) == *x.denom() {
        Some(BigRat::new(num_root, den_root))
    } else {
        None
    }
}

/// Exact square root of a non-negative rational, if one exists.
pub fn exact_sqrt(x: &BigRat) -> Option<BigRat> {
    exact_root(x, 2)
}

/// Exact cube root of a non-negative rational, if one exists.
pub fn exact_cbrt(x: &BigRat) -> Option<BigRat> {
    exact_root(x, 3)
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `2^e` as a big integer.
pub fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn bigrat_to_f64(r: &BigRat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
