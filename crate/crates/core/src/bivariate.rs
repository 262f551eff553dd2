//! Polynomials and rational functions in two variables `t1, t2`.
//!
//! Only what is needed to certify kernel identities: ring operations and
//! equality of fractions by cross-multiplication (no gcd reduction).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::ktau::KElement;
use crate::scalar::Q;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), Q::one());
        Self { terms }
    }

    fn from_univariate(f: &KElement, first: bool) -> Self {
        assert!(f.is_polynomial(), "bivariate embedding needs a polynomial");
        let terms = f
            .poly()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let key = if first { (i as u32, 0) } else { (0, i as u32) };
                (key, c.clone())
            })
            .collect();
        Self { terms }
    }

    pub fn in_first(f: &KElement) -> Self {
        Self::from_univariate(f, true)
    }

    pub fn in_second(f: &KElement) -> Self {
        Self::from_univariate(f, false)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, key: (u32, u32), c: Q) {
        let e = self.terms.entry(key).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert(*k, c.clone());
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.insert((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

/// `num / den` with `den != 0`. Equality compares `n1 d2 == n2 d1`.
#[derive(Clone, Debug)]
pub struct BiRational {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl BiRational {
    pub fn new(num: BiPoly, den: BiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self::new(BiPoly::zero(), BiPoly::one())
    }
}

impl PartialEq for BiRational {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Add for &BiRational {
    type Output = BiRational;
    fn add(self, rhs: &BiRational) -> BiRational {
        if self.den == rhs.den {
            return BiRational::new(&self.num + &rhs.num, self.den.clone());
        }
        BiRational::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &BiRational {
    type Output = BiRational;
    fn sub(self, rhs: &BiRational) -> BiRational {
        self + &BiRational::new(-&rhs.num, rhs.den.clone())
    }
}
