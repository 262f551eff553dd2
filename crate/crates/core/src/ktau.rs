//! The ring `K_T` of rational functions whose poles sit at integers.
//!
//! Elements are stored in partial-fraction form: a polynomial part in the
//! monomial basis `1, t, t^2, ...` and a singular part
//! `sum c_{n,m} / (t - n)^m`. The form is unique, so structural equality is
//! equality of functions. Holomorphic and singular parts are the two fields.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, fmt_q, fmt_term, pow, q, Q};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KElement {
    poly: Vec<Q>,
    poles: BTreeMap<(i64, u32), Q>,
}

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add_into(acc: &mut Vec<Q>, other: &[Q], scale: &Q) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Q::zero());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b * scale;
    }
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Coefficients of `(t - n)^e` in the monomial basis.
fn linear_power(n: i64, e: u32) -> Vec<Q> {
    let shift = q(-n);
    (0..=e).map(|i| binomial(e, i) * pow(&shift, e - i)).collect()
}

/// Coefficients `a_j` with `p(t) = sum a_j (t - at)^j`.
fn taylor(p: &[Q], at: &Q) -> Vec<Q> {
    let mut out = vec![Q::zero(); p.len()];
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // t^i = ((t - at) + at)^i
        for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
            *slot += c * binomial(i as u32, j as u32) * pow(at, (i - j) as u32);
        }
    }
    out
}

fn add_pole(map: &mut BTreeMap<(i64, u32), Q>, key: (i64, u32), c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(key).or_insert_with(Q::zero);
    *entry += c;
    if entry.is_zero() {
        map.remove(&key);
    }
}

impl KElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_poly(vec![c])
    }

    /// The coordinate function `t`.
    pub fn tau() -> Self {
        Self::from_poly(vec![Q::zero(), Q::one()])
    }

    pub fn monomial(degree: u32) -> Self {
        let mut p = vec![Q::zero(); degree as usize + 1];
        p[degree as usize] = Q::one();
        Self::from_poly(p)
    }

    pub fn from_poly(poly: Vec<Q>) -> Self {
        Self {
            poly: trim(poly),
            poles: BTreeMap::new(),
        }
    }

    /// `1 / (t - n)^order`.
    pub fn pole(n: i64, order: u32) -> Self {
        assert!(order >= 1, "pole order must be positive");
        let mut poles = BTreeMap::new();
        poles.insert((n, order), Q::one());
        Self {
            poly: Vec::new(),
            poles,
        }
    }

    pub fn from_parts(poly: Vec<Q>, poles: impl IntoIterator<Item = ((i64, u32), Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (key, c) in poles {
            assert!(key.1 >= 1, "pole order must be positive");
            add_pole(&mut map, key, c);
        }
        Self {
            poly: trim(poly),
            poles: map,
        }
    }

    /// Monomial coefficients of the polynomial part, lowest degree first.
    pub fn poly(&self) -> &[Q] {
        &self.poly
    }

    /// Singular terms keyed by `(pole, order)`.
    pub fn poles(&self) -> &BTreeMap<(i64, u32), Q> {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty() && self.poles.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn is_singular(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match (self.poles.is_empty(), self.poly.len()) {
            (true, 0) => Some(Q::zero()),
            (true, 1) => Some(self.poly[0].clone()),
            _ => None,
        }
    }

    /// Degree of the polynomial part, `None` for a zero polynomial part.
    pub fn degree(&self) -> Option<usize> {
        self.poly.len().checked_sub(1)
    }

    pub fn max_pole_order(&self) -> u32 {
        self.poles.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Smallest and largest pole location, if any.
    pub fn pole_span(&self) -> Option<(i64, i64)> {
        let lo = self.poles.keys().map(|k| k.0).min()?;
        let hi = self.poles.keys().map(|k| k.0).max()?;
        Some((lo, hi))
    }

    pub fn hol(&self) -> KElement {
        Self::from_poly(self.poly.clone())
    }

    pub fn sing(&self) -> KElement {
        Self {
            poly: Vec::new(),
            poles: self.poles.clone(),
        }
    }

    pub fn scale(&self, c: &Q) -> KElement {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            poly: self.poly.iter().map(|x| x * c).collect(),
            poles: self.poles.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// `f(t + k)`, the action of `T^k`.
    pub fn shift(&self, k: i64) -> KElement {
        if k == 0 {
            return self.clone();
        }
        let poly = taylor(&self.poly, &q(k));
        let poles = self.poles.iter().map(|(&(n, m), c)| ((n - k, m), c.clone()));
        Self::from_parts(poly, poles)
    }

    /// `f(-t)`.
    pub fn reflect(&self) -> KElement {
        let poly = self
            .poly
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
            .collect();
        // 1/(-t - n)^m = (-1)^m / (t + n)^m
        let poles = self.poles.iter().map(|(&(n, m), c)| {
            let sign = if m % 2 == 0 { c.clone() } else { -c };
            ((-n, m), sign)
        });
        Self::from_parts(poly, poles)
    }

    pub fn derivative(&self) -> KElement {
        let poly = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * q(i as i64))
            .collect();
        let poles = self.poles.iter().map(|(&(n, m), c)| ((n, m + 1), c * q(-(m as i64))));
        Self::from_parts(poly, poles)
    }

    pub fn nth_derivative(&self, order: u32) -> KElement {
        (0..order).fold(self.clone(), |f, _| f.derivative())
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let mut acc = Q::zero();
        for c in self.poly.iter().rev() {
            acc = acc * x + c;
        }
        for (&(n, m), c) in &self.poles {
            let d = x - q(n);
            if d.is_zero() {
                return Err(Error::PoleEvaluation(n));
            }
            acc += c / pow(&d, m);
        }
        Ok(acc)
    }

    pub fn eval_at(&self, k: i64) -> Result<Q> {
        self.eval(&q(k))
    }

    /// Sum of residues over all integers.
    pub fn trace(&self) -> Q {
        self.poles
            .iter()
            .filter(|(k, _)| k.1 == 1)
            .fold(Q::zero(), |acc, (_, c)| acc + c)
    }

    /// The falling factorial `t(l)`; for negative `l` this is `1/t(|l|)`.
    pub fn falling_factorial(l: i64) -> KElement {
        if l >= 0 {
            let mut p = vec![Q::one()];
            for j in 0..l {
                p = poly_mul(&p, &[q(-j), Q::one()]);
            }
            return Self::from_poly(p);
        }
        let len = (-l) as u32;
        let poles = (0..len).map(|j| {
            let rest = len - 1 - j;
            let sign = if rest.is_multiple_of(2) { Q::one() } else { -Q::one() };
            ((j as i64, 1), sign / (factorial(j) * factorial(rest)))
        });
        Self::from_parts(Vec::new(), poles)
    }

    /// Coefficient of `t(n)` in the factorial expansion, `Tr(f * t(-n-1))`.
    pub fn mode(&self, n: i64) -> Q {
        (self * &Self::falling_factorial(-n - 1)).trace()
    }

    pub fn to_factorial_basis(&self, window: RangeInclusive<i64>) -> FactorialCoefficients {
        let coeffs: BTreeMap<i64, Q> = window
            .clone()
            .map(|n| (n, self.mode(n)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let recombined = FactorialCoefficients::recombine_map(&coeffs);
        FactorialCoefficients {
            exact: &recombined == self,
            coeffs,
            window: (*window.start(), *window.end()),
        }
    }

    pub fn pow(&self, e: i64) -> Result<KElement> {
        let base = if e < 0 { self.try_inverse()? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(Self::one(), |acc, _| &acc * &base))
    }

    /// Multiplicative inverse, defined when every zero of the function is an
    /// integer (so the inverse stays inside `K_T`).
    pub fn try_inverse(&self) -> Result<KElement> {
        if self.is_zero() {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        let mut denom = Self::one();
        let mut orders: BTreeMap<i64, u32> = BTreeMap::new();
        for &(n, m) in self.poles.keys() {
            let o = orders.entry(n).or_insert(0);
            *o = (*o).max(m);
        }
        for (&n, &m) in &orders {
            denom = &denom * &Self::from_poly(linear_power(n, m));
        }
        let numer = self * &denom;
        debug_assert!(numer.is_polynomial());
        let (lead, roots) = integer_roots(numer.poly()).ok_or_else(|| {
            Error::NotInvertible(format!(
                "{self} has a zero outside the integers, its inverse leaves K_T"
            ))
        })?;
        let mut inv = denom.scale(&(Q::one() / lead));
        for r in roots {
            inv = &inv * &Self::pole(r, 1);
        }
        Ok(inv)
    }
}

/// Replaces `p` by the quotient of `p / (t - n)` and returns the remainder.
fn divide_linear(p: &mut Vec<Q>, n: i64) -> Q {
    let n = Q::from_integer(n.into());
    let mut carry = Q::zero();
    for c in p.iter_mut().rev() {
        let v = &*c + &carry * &n;
        *c = std::mem::replace(&mut carry, v);
    }
    p.pop();
    carry
}

/// Splits a polynomial as `lead * prod (t - r_i)` with integer roots.
fn integer_roots(poly: &[Q]) -> Option<(Q, Vec<i64>)> {
    let mut p = trim(poly.to_vec());
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        roots.push(0);
    }
    while p.len() > 1 {
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p
            .iter()
            .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
            .collect();
        let a0 = ints[0].abs();
        let lead = ints.last().unwrap().abs();
        // Cauchy bound on root magnitude.
        let bound = ints
            .iter()
            .map(|c| (c.abs() + &lead - BigInt::one()) / &lead)
            .max()
            .unwrap()
            + BigInt::one();
        let limit = bound.min(a0.clone()).to_i64().unwrap_or(1_000_000).min(1_000_000);
        let mut found = None;
        'scan: for d in 1..=limit {
            if !(&a0 % BigInt::from(d)).is_zero() {
                continue;
            }
            for r in [d, -d] {
                let val = p.iter().rev().fold(Q::zero(), |acc, c| acc * q(r) + c);
                if val.is_zero() {
                    found = Some(r);
                    break 'scan;
                }
            }
        }
        let r = found?;
        roots.push(r);
        // synthetic division by (t - r)
        let deg = p.len() - 1;
        let mut quot = vec![Q::zero(); deg];
        let mut carry = Q::zero();
        for i in (0..=deg).rev() {
            let v = &p[i] + &carry * q(r);
            if i > 0 {
                quot[i - 1] = v.clone();
            }
            carry = v;
        }
        p = trim(quot);
    }
    let lead = p.first().cloned()?;
    Some((lead, roots))
}

impl Add for &KElement {
    type Output = KElement;
    fn add(self, rhs: &KElement) -> KElement {
        let mut poly = self.poly.clone();
        poly_add_into(&mut poly, &rhs.poly, &Q::one());
        let mut poles = self.poles.clone();
        for (k, c) in &rhs.poles {
            add_pole(&mut poles, *k, c.clone());
        }
        KElement {
            poly: trim(poly),
            poles,
        }
    }
}

impl Sub for &KElement {
    type Output = KElement;
    fn sub(self, rhs: &KElement) -> KElement {
        self + &(-rhs)
    }
}

impl Neg for &KElement {
    type Output = KElement;
    fn neg(self) -> KElement {
        self.scale(&-Q::one())
    }
}

impl Mul for &KElement {
    type Output = KElement;
    fn mul(self, rhs: &KElement) -> KElement {
        let mut poly = poly_mul(&self.poly, &rhs.poly);
        let mut poles = BTreeMap::new();
        // polynomial times pole: expand the polynomial around the pole
        let mut poly_pole = |p: &[Q], map: &BTreeMap<(i64, u32), Q>, poly: &mut Vec<Q>| {
            if p.is_empty() {
                return;
            }
            for (&(n, m), c) in map {
                // repeated synthetic division by (t - n)
                let mut cur = p.to_vec();
                for j in 0..m {
                    if cur.is_empty() {
                        break;
                    }
                    let r = divide_linear(&mut cur, n);
                    if !r.is_zero() {
                        add_pole(&mut poles, (n, m - j), r * c);
                    }
                }
                poly_add_into(poly, &cur, c);
            }
        };
        poly_pole(&self.poly, &rhs.poles, &mut poly);
        poly_pole(&rhs.poly, &self.poles, &mut poly);
        for (&(n1, a), c1) in &self.poles {
            for (&(n2, b), c2) in &rhs.poles {
                let c = c1 * c2;
                if n1 == n2 {
                    add_pole(&mut poles, (n1, a + b), c);
                    continue;
                }
                if a == 1 && b == 1 {
                    let r = c / q(n1 - n2);
                    add_pole(&mut poles, (n2, 1), -&r);
                    add_pole(&mut poles, (n1, 1), r);
                    continue;
                }
                // cofactor (t - n2)^-b expanded at n1, and symmetrically
                for (n, own, other, m) in [(n1, a, n2, b), (n2, b, n1, a)] {
                    let d = q(n - other);
                    for j in 0..own {
                        let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
                        let coef = sign * binomial(m + j - 1, j) / pow(&d, m + j);
                        add_pole(&mut poles, (n, own - j), &c * coef);
                    }
                }
            }
        }
        KElement {
            poly: trim(poly),
            poles,
        }
    }
}

impl Add for KElement {
    type Output = KElement;
    fn add(self, rhs: KElement) -> KElement {
        &self + &rhs
    }
}

impl Sub for KElement {
    type Output = KElement;
    fn sub(self, rhs: KElement) -> KElement {
        &self - &rhs
    }
}

impl Mul for KElement {
    type Output = KElement;
    fn mul(self, rhs: KElement) -> KElement {
        &self * &rhs
    }
}

impl From<Q> for KElement {
    fn from(c: Q) -> Self {
        KElement::constant(c)
    }
}

pub(crate) fn fmt_linear(n: i64, var: &str) -> String {
    match n.cmp(&0) {
        std::cmp::Ordering::Equal => var.to_string(),
        std::cmp::Ordering::Greater => format!("({var}-{n})"),
        std::cmp::Ordering::Less => format!("({var}+{})", -n),
    }
}

impl KElement {
    /// Canonical text; `unicode` spells the variable `τ`.
    pub fn render(&self, unicode: bool) -> String {
        let var = if unicode { "τ" } else { "t" };
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        let mut first = true;
        for (i, c) in self.poly.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            fmt_term(&mut out, c, &body, first);
            first = false;
        }
        let mut keys: Vec<_> = self.poles.keys().copied().collect();
        keys.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for key in keys {
            let c = &self.poles[&key];
            let (n, m) = key;
            let base = fmt_linear(n, var);
            let den = if m == 1 { base } else { format!("{base}^{m}") };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&fmt_q(&mag));
            out.push('/');
            out.push_str(&den);
            first = false;
        }
        out
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// Coefficients of a (possibly truncated) expansion in falling factorials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorialCoefficients {
    /// Coefficient of `t(n)` keyed by `n`; `t(-l) = 1/t(l)`.
    pub coeffs: BTreeMap<i64, Q>,
    /// True when the window sum reproduces the source exactly.
    pub exact: bool,
    pub window: (i64, i64),
}

impl FactorialCoefficients {
    fn recombine_map(coeffs: &BTreeMap<i64, Q>) -> KElement {
        coeffs.iter().fold(KElement::zero(), |acc, (&n, c)| {
            &acc + &KElement::falling_factorial(n).scale(c)
        })
    }

    pub fn recombine(&self) -> KElement {
        Self::recombine_map(&self.coeffs)
    }

    pub fn get(&self, n: i64) -> Q {
        self.coeffs.get(&n).cloned().unwrap_or_else(Q::zero)
    }
}

/// `1/(t1 - t2)` expanded as `sum_{n<M} t2(n) t1(-n-1)` plus an exact remainder.
pub fn geometric_kernel_expand(terms: u32) -> (crate::bivariate::BiRational, crate::bivariate::BiRational) {
    use crate::bivariate::{BiPoly, BiRational};
    let ff1 = |l: i64| BiPoly::in_first(&KElement::falling_factorial(l));
    let ff2 = |l: i64| BiPoly::in_second(&KElement::falling_factorial(l));
    let mut partial = BiRational::zero();
    for n in 0..terms as i64 {
        partial = &partial + &BiRational::new(ff2(n), ff1(n + 1));
    }
    let diff = &BiPoly::in_first(&KElement::tau()) - &BiPoly::in_second(&KElement::tau());
    let remainder = BiRational::new(ff2(terms as i64), &ff1(terms as i64) * &diff);
    (partial, remainder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q2;

    fn t() -> KElement {
        KElement::tau()
    }

    #[test]
    fn product_of_simple_poles() {
        let lhs = &KElement::pole(0, 1) * &KElement::pole(1, 1);
        assert_eq!(lhs, &KElement::pole(1, 1) - &KElement::pole(0, 1));
        assert_eq!(lhs.to_string(), "1/(t-1) - 1/t");
    }

    #[test]
    fn tau_times_inverse_is_one() {
        assert_eq!(&t() * &KElement::pole(0, 1), KElement::one());
    }

    #[test]
    fn double_pole_product() {
        let lhs = &(&KElement::pole(0, 1) * &KElement::pole(0, 1)) * &KElement::pole(1, 1);
        let rhs = &(&KElement::pole(1, 1) - &KElement::pole(0, 1)) - &KElement::pole(0, 2);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.eval_at(2).unwrap(), q2(1, 4));
        // clear denominators: t^2 (t-1) * rhs = 1
        let den = KElement::from_poly(vec![q(0), q(0), q(-1), q(1)]);
        assert_eq!(&den * &rhs, KElement::one());
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(KElement::falling_factorial(0), KElement::one());
        assert_eq!(
            KElement::falling_factorial(3),
            KElement::from_poly(vec![q(0), q(2), q(-3), q(1)])
        );
        assert_eq!(
            KElement::falling_factorial(-2),
            &KElement::pole(1, 1) - &KElement::pole(0, 1)
        );
        for l in 1..6 {
            let f = KElement::falling_factorial(l);
            assert_eq!(&f * &KElement::falling_factorial(-l), KElement::one());
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(KElement::monomial(3).trace(), q(0));
        assert_eq!(KElement::pole(5, 1).trace(), q(1));
        let f = &(&t() + &KElement::constant(q(2))) * &KElement::falling_factorial(-2);
        assert_eq!(f.trace(), q(1));
        assert_eq!(f.poles()[&(0, 1)], q(-2));
        assert_eq!(f.poles()[&(1, 1)], q(3));
    }

    #[test]
    fn mode_examples() {
        assert_eq!(KElement::falling_factorial(4).mode(4), q(1));
        assert_eq!(KElement::falling_factorial(2).mode(5), q(0));
        // Tr(t(n)/(t-3)) is the value of t(n) at 3, the coefficient of t(-n-1)
        let f = KElement::pole(3, 1);
        let expected = [1, 3, 6, 6, 0, 0];
        for (n, e) in expected.iter().enumerate() {
            assert_eq!(f.mode(-(n as i64) - 1), q(*e), "n = {n}");
        }
    }

    #[test]
    fn factorial_basis_examples() {
        let fc = KElement::pole(1, 1).to_factorial_basis(-4..=4);
        assert!(fc.exact);
        assert_eq!(fc.coeffs.len(), 2);
        assert_eq!(fc.get(-1), q(1));
        assert_eq!(fc.get(-2), q(1));

        let fc = KElement::monomial(2).to_factorial_basis(-3..=3);
        assert!(fc.exact);
        assert_eq!((fc.get(1), fc.get(2)), (q(1), q(1)));

        for window_end in [2, 5, 8] {
            let fc = KElement::pole(-1, 1).to_factorial_basis(-window_end - 1..=-1);
            assert!(!fc.exact);
            for k in 0..=window_end {
                let sign = if k % 2 == 0 { q(1) } else { q(-1) };
                assert_eq!(fc.get(-k - 1), sign * factorial(k as u32));
            }
        }
    }

    #[test]
    fn inverse_requires_integer_zeros() {
        let f = &(&t() + &KElement::constant(q(2))) * &KElement::falling_factorial(-2);
        let inv = f.try_inverse().unwrap();
        assert_eq!(&inv * &f, KElement::one());
        let bad = &t() - &KElement::constant(q2(1, 2));
        assert!(matches!(bad.try_inverse(), Err(Error::NotInvertible(_))));
        assert!(KElement::zero().try_inverse().is_err());
    }

    #[test]
    fn shift_and_reflect() {
        assert_eq!(t().shift(1), &t() + &KElement::one());
        assert_eq!(KElement::pole(0, 1).shift(-1), KElement::pole(1, 1));
        assert_eq!(KElement::pole(2, 1).reflect(), KElement::pole(-2, 1).scale(&q(-1)));
        let f = &KElement::pole(3, 2) + &KElement::monomial(3);
        assert_eq!(f.reflect().reflect(), f);
    }

    #[test]
    fn pole_evaluation_is_an_error() {
        assert!(matches!(KElement::pole(2, 1).eval_at(2), Err(Error::PoleEvaluation(2))));
    }

    #[test]
    fn kernel_expansion_identity() {
        use crate::bivariate::{BiPoly, BiRational};
        let diff = &BiPoly::in_first(&t()) - &BiPoly::in_second(&t());
        let lhs = BiRational::new(BiPoly::one(), diff);
        for m in 0..=8 {
            let (partial, rem) = geometric_kernel_expand(m);
            assert_eq!(&partial + &rem, lhs, "M = {m}");
        }
    }
}
