//! Exact rational scalars and a few combinatorial helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q2(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(n: u32) -> Q {
    (1..=n as i64).fold(Q::one(), |acc, k| acc * q(k))
}

pub fn binomial(n: u32, k: u32) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `x (x-1) ... (x-l+1)` evaluated at a rational point.
pub fn falling(x: &Q, l: u32) -> Q {
    (0..l as i64).fold(Q::one(), |acc, j| acc * (x - q(j)))
}

pub fn pow(x: &Q, e: u32) -> Q {
    (0..e).fold(Q::one(), |acc, _| acc * x)
}

/// Integer value of a scalar, if it is one and fits an `i64`.
pub fn as_i64(x: &Q) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    i64::try_from(x.to_integer()).ok()
}

/// Canonical text of a rational: `3`, `-1/2`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Formats `coeff * body` as a term of a sum; `first` controls the leading sign.
pub(crate) fn fmt_term(out: &mut String, coeff: &Q, body: &str, first: bool) {
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if body.is_empty() {
        out.push_str(&fmt_q(&mag));
    } else if mag.is_one() {
        out.push_str(body);
    } else {
        out.push_str(&fmt_q(&mag));
        out.push('*');
        out.push_str(body);
    }
}
