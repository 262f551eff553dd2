//! The Hopf algebra `H_T = Q[T, T^-1]` completed by `Dtau = log(T)`.
//!
//! An element is a finite combination of the basis `T^k Dtau^m`. `T` is
//! group-like, `Dtau` primitive, and both commute. `T` acts on functions by
//! `t -> t + 1` and `Dtau` acts as `d/dt`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ktau::KElement;
use crate::scalar::{binomial, factorial, fmt_term, q, Q};

/// Basis label `(k, m)` for `T^k Dtau^m`.
pub type HopfBasis = (i64, u32);

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HopfElement {
    terms: BTreeMap<HopfBasis, Q>,
}

fn insert(map: &mut BTreeMap<HopfBasis, Q>, key: HopfBasis, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = map.entry(key).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        map.remove(&key);
    }
}

impl HopfElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn scalar(c: Q) -> Self {
        Self::term(c, 0, 0)
    }

    /// `T^k`.
    pub fn t_pow(k: i64) -> Self {
        Self::monomial(k, 0)
    }

    pub fn dtau() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(k: i64, m: u32) -> Self {
        Self::term(Q::one(), k, m)
    }

    pub fn term(c: Q, k: i64, m: u32) -> Self {
        let mut terms = BTreeMap::new();
        insert(&mut terms, (k, m), c);
        Self { terms }
    }

    /// The difference operator `T - 1`.
    pub fn difference() -> Self {
        &Self::t_pow(1) - &Self::one()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (HopfBasis, Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            insert(&mut map, k, c);
        }
        Self { terms: map }
    }

    pub fn terms(&self) -> &BTreeMap<HopfBasis, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no `Dtau` appears, i.e. the element lies in `H_T`.
    pub fn is_group_algebra(&self) -> bool {
        self.terms.keys().all(|k| k.1 == 0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `sum_{n=1}^{order} (-1)^{n+1} (T - 1)^n / n`, the truncated `log(T)`.
    pub fn log_series(order: u32) -> Self {
        let delta = Self::difference();
        let mut acc = Self::zero();
        let mut power = Self::one();
        for n in 1..=order {
            power = &power * &delta;
            let sign = if n % 2 == 1 { q(1) } else { q(-1) };
            acc = &acc + &power.scale(&(sign / q(n as i64)));
        }
        acc
    }

    pub fn antipode(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(k, m), c)| {
            let sign = if m % 2 == 0 { c.clone() } else { -c };
            ((-k, m), sign)
        }))
    }

    pub fn counit(&self) -> Q {
        self.terms
            .iter()
            .filter(|(k, _)| k.1 == 0)
            .fold(Q::zero(), |acc, (_, c)| acc + c)
    }

    /// `Delta(T^k Dtau^m) = sum_j C(m, j) T^k Dtau^j (x) T^k Dtau^(m-j)`.
    pub fn coproduct(&self) -> HopfTensor {
        let mut out = HopfTensor::default();
        for (&(k, m), c) in &self.terms {
            for j in 0..=m {
                out.insert(((k, j), (k, m - j)), c * binomial(m, j));
            }
        }
        out
    }

    /// Action on functions: `T^k f(t) = f(t + k)`, `Dtau = d/dt`.
    pub fn act(&self, f: &KElement) -> KElement {
        let mut acc = KElement::zero();
        let mut derivs: Vec<KElement> = vec![f.clone()];
        for (&(k, m), c) in &self.terms {
            while derivs.len() <= m as usize {
                let next = derivs.last().unwrap().derivative();
                derivs.push(next);
            }
            acc = &acc + &derivs[m as usize].shift(k).scale(c);
        }
        acc
    }

    /// `alpha(h) = S(h) (1/t)`, an isomorphism onto the singular functions.
    pub fn alpha(&self) -> KElement {
        self.antipode().act(&KElement::pole(0, 1))
    }

    /// Inverse of [`alpha`](Self::alpha): `1/(t-n)^m -> T^n Dtau^(m-1) / (m-1)!`.
    pub fn alpha_inv(f: &KElement) -> Result<Self> {
        if !f.is_singular() {
            return Err(Error::Domain(format!(
                "alpha_inv needs a purely singular function, got {f}"
            )));
        }
        Ok(Self::from_terms(
            f.poles().iter().map(|(&(n, m), c)| ((n, m - 1), c / factorial(m - 1))),
        ))
    }

    /// `<T^k Dtau^m, f> = f^(m)(k)`; `Dtau` pairs only with polynomials.
    pub fn pair(&self, f: &KElement) -> Result<Q> {
        let mut acc = Q::zero();
        for (&(k, m), c) in &self.terms {
            if m > 0 && !f.is_polynomial() {
                return Err(Error::Domain(format!(
                    "Dtau pairs only with polynomial sequences, got {f}"
                )));
            }
            acc += c * f.nth_derivative(m).eval_at(k)?;
        }
        Ok(acc)
    }

    /// Renders with `T^k*Dtau^m` monomials, highest `T` power first.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (&(k, m), c)) in self.terms.iter().rev().enumerate() {
            fmt_term(&mut out, c, &basis_name(k, m), i == 0);
        }
        out
    }
}

pub(crate) fn basis_name(k: i64, m: u32) -> String {
    let t = match k {
        0 => String::new(),
        1 => "T".to_string(),
        _ => format!("T^{k}"),
    };
    let d = match m {
        0 => String::new(),
        1 => "Dtau".to_string(),
        _ => format!("Dtau^{m}"),
    };
    match (t.is_empty(), d.is_empty()) {
        (true, true) => String::new(),
        (false, true) => t,
        (true, false) => d,
        (false, false) => format!("{t}*{d}"),
    }
}

impl fmt::Display for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &HopfElement {
    type Output = HopfElement;
    fn add(self, rhs: &HopfElement) -> HopfElement {
        let mut terms = self.terms.clone();
        for (k, c) in &rhs.terms {
            insert(&mut terms, *k, c.clone());
        }
        HopfElement { terms }
    }
}

impl Neg for &HopfElement {
    type Output = HopfElement;
    fn neg(self) -> HopfElement {
        self.scale(&-Q::one())
    }
}

impl Sub for &HopfElement {
    type Output = HopfElement;
    fn sub(self, rhs: &HopfElement) -> HopfElement {
        self + &(-rhs)
    }
}

impl Mul for &HopfElement {
    type Output = HopfElement;
    fn mul(self, rhs: &HopfElement) -> HopfElement {
        let mut terms = BTreeMap::new();
        for (&(k1, m1), c1) in &self.terms {
            for (&(k2, m2), c2) in &rhs.terms {
                insert(&mut terms, (k1 + k2, m1 + m2), c1 * c2);
            }
        }
        HopfElement { terms }
    }
}

/// Element of `H (x) H` in the monomial basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HopfTensor {
    pub terms: BTreeMap<(HopfBasis, HopfBasis), Q>,
}

impl HopfTensor {
    fn insert(&mut self, key: (HopfBasis, HopfBasis), c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Applies `f (x) g` and multiplies the two legs.
    pub fn contract(
        &self,
        f: impl Fn(&HopfElement) -> HopfElement,
        g: impl Fn(&HopfElement) -> HopfElement,
    ) -> HopfElement {
        self.terms.iter().fold(HopfElement::zero(), |acc, (&(a, b), c)| {
            let left = f(&HopfElement::monomial(a.0, a.1));
            let right = g(&HopfElement::monomial(b.0, b.1));
            &acc + &(&left * &right).scale(c)
        })
    }

    /// `(Delta (x) id)` or `(id (x) Delta)` as a map into triple tensors.
    pub fn expand(&self, left: bool) -> BTreeMap<(HopfBasis, HopfBasis, HopfBasis), Q> {
        let mut out: BTreeMap<(HopfBasis, HopfBasis, HopfBasis), Q> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let split = if left { a } else { b };
            let inner = HopfElement::monomial(split.0, split.1).coproduct();
            for (&(x, y), d) in &inner.terms {
                let key = if left { (x, y, b) } else { (a, x, y) };
                let e = out.entry(key).or_insert_with(Q::zero);
                *e += c * d;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}
