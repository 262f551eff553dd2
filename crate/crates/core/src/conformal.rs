//! `H_T`-conformal algebras given by structure constants on a free module.
//!
//! The table stores `a_{delta_n} b` for generators `a, b`. Products of
//! general elements follow from two covariance rules:
//! `(T^k a)_{delta_n} b = a_{delta_(n+k)} b` and
//! `a_{delta_n} (T^l b) = T^l (a_{delta_(n-l)} b)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::hopf::HopfElement;
use crate::ktau::KElement;
use crate::scalar::{fmt_q, Q};

/// Element of the free module `sum H_T g`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConformalElement {
    coords: BTreeMap<String, HopfElement>,
}

impl ConformalElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(name: &str) -> Self {
        Self::term(name, HopfElement::one())
    }

    pub fn term(name: &str, h: HopfElement) -> Self {
        Self::from_coords([(name.to_string(), h)])
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (String, HopfElement)>) -> Self {
        let mut out = Self::zero();
        for (g, h) in coords {
            out.add_coord(g, h);
        }
        out
    }

    fn add_coord(&mut self, g: String, h: HopfElement) {
        if h.is_zero() {
            return;
        }
        let sum = match self.coords.remove(&g) {
            Some(old) => &old + &h,
            None => h,
        };
        if !sum.is_zero() {
            self.coords.insert(g, sum);
        }
    }

    pub fn coords(&self) -> &BTreeMap<String, HopfElement> {
        &self.coords
    }

    pub fn coeff(&self, g: &str) -> HopfElement {
        self.coords.get(g).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_coords(self.coords.iter().map(|(g, h)| (g.clone(), h.scale(c))))
    }

    /// Left multiplication by `h`.
    pub fn apply(&self, h: &HopfElement) -> Self {
        Self::from_coords(self.coords.iter().map(|(g, x)| (g.clone(), h * x)))
    }

    /// Image in `C / m_T C`: every `T^k` becomes 1.
    pub fn counit_image(&self) -> BTreeMap<String, Q> {
        self.coords
            .iter()
            .map(|(g, h)| (g.clone(), h.counit()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn in_augmentation_ideal(&self) -> bool {
        self.counit_image().is_empty()
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (g, h) in &self.coords {
            let terms = h.terms();
            if terms.len() == 1 {
                let (&(k, m), c) = terms.iter().next().unwrap();
                let basis = crate::hopf::basis_name(k, m);
                let body = if basis.is_empty() {
                    g.clone()
                } else {
                    format!("{basis}*{g}")
                };
                let first = out.is_empty();
                crate::scalar::fmt_term(&mut out, c, &body, first);
            } else {
                let body = format!("({h})*{g}");
                let first = out.is_empty();
                crate::scalar::fmt_term(&mut out, &Q::one(), &body, first);
            }
        }
        out
    }

    fn check_delta_free(&self) -> Result<()> {
        if self.coords.values().all(HopfElement::is_group_algebra) {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "conformal products need Dtau-free coordinates, got {self}"
            )))
        }
    }
}

impl fmt::Display for ConformalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &ConformalElement {
    type Output = ConformalElement;
    fn add(self, rhs: &ConformalElement) -> ConformalElement {
        let mut out = self.clone();
        for (g, h) in &rhs.coords {
            out.add_coord(g.clone(), h.clone());
        }
        out
    }
}

impl Neg for &ConformalElement {
    type Output = ConformalElement;
    fn neg(self) -> ConformalElement {
        self.scale(&-Q::one())
    }
}

impl Sub for &ConformalElement {
    type Output = ConformalElement;
    fn sub(self, rhs: &ConformalElement) -> ConformalElement {
        self + &(-rhs)
    }
}

/// Index of a product `f_{F} g`.
#[derive(Clone, Debug, PartialEq)]
pub enum Sequence {
    /// Finite combination of Kronecker deltas `sum c_n delta_n`.
    Kronecker(BTreeMap<i64, Q>),
    /// The sequence `n -> p(n)` for a polynomial `p`.
    Polynomial(KElement),
}

impl Sequence {
    pub fn delta(n: i64) -> Self {
        Self::Kronecker([(n, Q::one())].into())
    }

    pub fn ones() -> Self {
        Self::Polynomial(KElement::one())
    }

    pub fn polynomial(p: KElement) -> Result<Self> {
        if !p.is_polynomial() {
            return Err(Error::Domain(format!("sequence index must be polynomial, got {p}")));
        }
        Ok(Self::Polynomial(p))
    }

    pub fn at(&self, n: i64) -> Q {
        match self {
            Self::Kronecker(m) => m.get(&n).cloned().unwrap_or_else(Q::zero),
            Self::Polynomial(p) => p.eval_at(n).expect("polynomial has no poles"),
        }
    }
}

type Table = BTreeMap<(String, String), BTreeMap<i64, ConformalElement>>;

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalAlgebra {
    generators: Vec<String>,
    table: Table,
}

impl ConformalAlgebra {
    /// Builds an algebra from explicit entries `((a, b), n) -> a_{delta_n} b`.
    pub fn new(
        generators: Vec<String>,
        entries: impl IntoIterator<Item = ((String, String), i64, ConformalElement)>,
    ) -> Result<Self> {
        let known: BTreeSet<&String> = generators.iter().collect();
        if known.len() != generators.len() {
            return Err(Error::Algebra("duplicate generator names".into()));
        }
        if let Some(bad) = generators.iter().find(|g| !is_identifier(g)) {
            return Err(Error::Algebra(format!("generator name {bad:?} is not an identifier")));
        }
        let mut table = Table::new();
        for ((a, b), n, value) in entries {
            for g in [&a, &b].into_iter().chain(value.coords.keys()) {
                if !known.contains(g) {
                    return Err(Error::Algebra(format!("unknown generator {g:?}")));
                }
            }
            if !value.coords.values().all(HopfElement::is_group_algebra) {
                return Err(Error::Algebra(format!("entry {a}_{{{n}}}{b} contains Dtau")));
            }
            let slot = table.entry((a, b)).or_default().entry(n).or_default();
            *slot = &*slot + &value;
        }
        for row in table.values_mut() {
            row.retain(|_, v| !v.is_zero());
        }
        table.retain(|_, row| !row.is_empty());
        Ok(Self { generators, table })
    }

    /// The Toda algebra on `B, C`.
    pub fn toda() -> Self {
        let (b, c) = ("B".to_string(), "C".to_string());
        let bc = (b.clone(), c.clone());
        let cb = (c.clone(), b.clone());
        let gen_c = ConformalElement::generator("C");
        Self::new(
            vec![b, c],
            [
                (bc.clone(), -1, gen_c.clone()),
                (bc, 0, -&gen_c),
                (cb.clone(), 0, gen_c.clone()),
                (cb, 1, ConformalElement::term("C", -&HopfElement::t_pow(1))),
            ],
        )
        .expect("Toda table is well formed")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn has_generator(&self, g: &str) -> bool {
        self.generators.iter().any(|x| x == g)
    }

    /// Number of nonzero table entries.
    pub fn entry_count(&self) -> usize {
        self.table.values().map(BTreeMap::len).sum()
    }

    /// Table entry `a_{delta_n} b` for generators.
    pub fn entry(&self, a: &str, n: i64, b: &str) -> ConformalElement {
        self.table
            .get(&(a.to_string(), b.to_string()))
            .and_then(|row| row.get(&n))
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero entries of the pair `(a, b)`.
    pub fn row(&self, a: &str, b: &str) -> impl Iterator<Item = (i64, &ConformalElement)> {
        self.table
            .get(&(a.to_string(), b.to_string()))
            .into_iter()
            .flat_map(|row| row.iter().map(|(n, v)| (*n, v)))
    }

    /// Largest `|n|` with a nonzero entry.
    pub fn support_radius(&self) -> i64 {
        self.table
            .values()
            .flat_map(|row| row.keys())
            .map(|n| n.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn check_element(&self, x: &ConformalElement) -> Result<()> {
        match x.coords.keys().find(|g| !self.has_generator(g)) {
            Some(g) => Err(Error::Usage(format!("generator {g} is not in this algebra"))),
            None => Ok(()),
        }
    }

    /// `f_{delta_n} g`.
    pub fn product_delta(&self, f: &ConformalElement, n: i64, g: &ConformalElement) -> Result<ConformalElement> {
        self.product(f, &Sequence::delta(n), g)
    }

    /// `f_{F} g = sum_n F(n) f_{delta_n} g`.
    pub fn product(&self, f: &ConformalElement, seq: &Sequence, g: &ConformalElement) -> Result<ConformalElement> {
        for x in [f, g] {
            self.check_element(x)?;
            x.check_delta_free()?;
        }
        let mut out = ConformalElement::zero();
        for (a, h1) in &f.coords {
            for (b, h2) in &g.coords {
                for (&(k, _), c1) in h1.terms() {
                    for (&(l, _), c2) in h2.terms() {
                        // entry index m = n + k - l, so n = m - k + l
                        for (m, value) in self.row(a, b) {
                            let w = seq.at(m - k + l);
                            if w.is_zero() {
                                continue;
                            }
                            let h = HopfElement::term(c1 * c2 * w, l, 0);
                            out = &out + &value.apply(&h);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The 1-product `f_{1} g`.
    pub fn one_product(&self, f: &ConformalElement, g: &ConformalElement) -> Result<ConformalElement> {
        self.product(f, &Sequence::ones(), g)
    }

    /// The Lie algebra `C / m_T C` and the checks of its defining identities.
    pub fn quotient_lie(&self) -> Result<QuotientLie> {
        let gens: Vec<ConformalElement> = self.generators.iter().map(|g| ConformalElement::generator(g)).collect();
        let t = HopfElement::t_pow(1);
        let mut brackets = BTreeMap::new();
        let mut checks = Vec::new();
        let mut record = |name: &str, gating: bool, ok: bool, detail: String| {
            checks.push(DisplayCheck {
                name: name.into(),
                gating,
                passed: ok,
                detail,
            });
        };
        for (fa, f) in self.generators.iter().zip(&gens) {
            for (ga, g) in self.generators.iter().zip(&gens) {
                let fg = self.one_product(f, g)?;
                let gf = self.one_product(g, f)?;
                brackets.insert((fa.clone(), ga.clone()), fg.counit_image());

                let lhs = self.one_product(&f.apply(&t), g)?;
                record(
                    "(Tf)_{1}g = f_{1}g",
                    true,
                    lhs == fg,
                    format!("f={fa}, g={ga}: {lhs} vs {fg}"),
                );

                let lhs = self.one_product(f, &g.apply(&t))?;
                let rhs = fg.apply(&t);
                record(
                    "f_{1}(Tg) = T(f_{1}g)",
                    true,
                    lhs == rhs,
                    format!("f={fa}, g={ga}: {lhs} vs {rhs}"),
                );

                let diff = &fg - &gf;
                record(
                    "f_{1}g - g_{1}f in m_T C",
                    false,
                    diff.in_augmentation_ideal(),
                    format!("f={fa}, g={ga}: {diff}"),
                );
                let sum = &fg + &gf;
                record(
                    "f_{1}g + g_{1}f in m_T C",
                    true,
                    sum.in_augmentation_ideal(),
                    format!("f={fa}, g={ga}: {sum}"),
                );

                for h in &gens {
                    let lhs = &self.one_product(f, &self.one_product(g, h)?)?
                        - &self.one_product(g, &self.one_product(f, h)?)?;
                    let rhs = self.one_product(&fg, h)?;
                    record(
                        "[f_{1}, g_{1}] = (f_{1}g)_{1}",
                        true,
                        lhs == rhs,
                        format!("f={fa}, g={ga}, h={}: {lhs} vs {rhs}", h.render()),
                    );
                }
            }
        }
        Ok(QuotientLie {
            generators: self.generators.clone(),
            brackets,
            checks,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let bad = |m: &str| Error::Algebra(m.to_string());
        let generators: Vec<String> = v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"generators\" array"))?
            .iter()
            .map(|g| {
                g.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("generator names must be strings"))
            })
            .collect::<Result<_>>()?;
        let mut entries = Vec::new();
        let empty = Map::new();
        let products = match v.get("products") {
            None => &empty,
            Some(p) => p.as_object().ok_or_else(|| bad("\"products\" must be an object"))?,
        };
        for (pair, row) in products {
            let (a, b) = pair
                .split_once('|')
                .ok_or_else(|| Error::Algebra(format!("product key {pair:?} is not of the form \"A|B\"")))?;
            let row = row.as_object().ok_or_else(|| bad("product rows must be objects"))?;
            for (n, value) in row {
                let n: i64 = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Algebra(format!("index {n:?} in {pair:?} is not an integer")))?;
                let value = value.as_object().ok_or_else(|| bad("product values must be objects"))?;
                let mut elem = ConformalElement::zero();
                for (g, h) in value {
                    let text = h
                        .as_str()
                        .ok_or_else(|| Error::Algebra(format!("coefficient of {g} must be a string")))?;
                    let h = crate::expr::parse_hopf(text)
                        .map_err(|e| Error::Algebra(format!("{pair} at {n}, coefficient of {g}: {e}")))?;
                    elem.add_coord(g.clone(), h);
                }
                entries.push(((a.to_string(), b.to_string()), n, elem));
            }
        }
        let alg = Self::new(generators, entries)?;
        crate::affine::validate_algebra(&alg)?;
        Ok(alg)
    }

    pub fn to_json(&self) -> Value {
        let mut products = Map::new();
        for ((a, b), row) in &self.table {
            let mut r = Map::new();
            for (n, value) in row {
                let coords: Map<String, Value> = value
                    .coords
                    .iter()
                    .map(|(g, h)| (g.clone(), Value::String(h.render())))
                    .collect();
                r.insert(n.to_string(), Value::Object(coords));
            }
            products.insert(format!("{a}|{b}"), Value::Object(r));
        }
        serde_json::json!({ "generators": self.generators, "products": products })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !crate::expr::is_reserved(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplayCheck {
    pub name: String,
    /// Whether a failure makes the algebra invalid.
    pub gating: bool,
    pub passed: bool,
    pub detail: String,
}

/// Structure constants of `C / m_T C` in the generator basis.
#[derive(Clone, Debug)]
pub struct QuotientLie {
    pub generators: Vec<String>,
    pub brackets: BTreeMap<(String, String), BTreeMap<String, Q>>,
    pub checks: Vec<DisplayCheck>,
}

impl QuotientLie {
    pub fn is_abelian(&self) -> bool {
        self.brackets.values().all(BTreeMap::is_empty)
    }

    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    pub fn violations(&self) -> Vec<&DisplayCheck> {
        self.checks.iter().filter(|c| c.gating && !c.passed).collect()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        match self.violations().first() {
            None => Ok(()),
            Some(c) => Err(Error::AxiomViolation(format!("{}: {}", c.name, c.detail))),
        }
    }

    pub fn render_bracket(&self, a: &str, b: &str) -> String {
        let Some(coords) = self.brackets.get(&(a.to_string(), b.to_string())) else {
            return "0".into();
        };
        if coords.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (g, c) in coords {
            let first = out.is_empty();
            crate::scalar::fmt_term(&mut out, c, g, first);
        }
        out
    }
}

impl fmt::Display for QuotientLie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension {}", self.dimension())?;
        for a in &self.generators {
            for b in &self.generators {
                if a < b {
                    writeln!(f, "[{a}, {b}] = {}", self.render_bracket(a, b))?;
                }
            }
        }
        for c in &self.checks {
            let tag = match (c.passed, c.gating) {
                (true, _) => "ok",
                (false, true) => "FAIL",
                (false, false) => "fails (informational)",
            };
            writeln!(f, "{tag}: {} [{}]", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Renders a scalar map like `{"C": -1}` for reports.
pub fn render_counit_image(m: &BTreeMap<String, Q>) -> String {
    let parts: Vec<String> = m.iter().map(|(g, c)| format!("{g}: {}", fmt_q(c))).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn b() -> ConformalElement {
        ConformalElement::generator("B")
    }
    fn c() -> ConformalElement {
        ConformalElement::generator("C")
    }

    #[test]
    fn toda_table() {
        let alg = ConformalAlgebra::toda();
        assert_eq!(alg.entry_count(), 4);
        assert_eq!(alg.product_delta(&b(), -1, &c()).unwrap(), c());
        assert_eq!(alg.product_delta(&b(), 0, &c()).unwrap(), -&c());
        for n in [-3, -2, 1, 2, 5] {
            assert!(alg.product_delta(&b(), n, &c()).unwrap().is_zero());
        }
        let tc = ConformalElement::term("C", HopfElement::t_pow(1));
        assert_eq!(alg.product_delta(&c(), 1, &b()).unwrap(), -&tc);
        assert_eq!(alg.product_delta(&c(), 0, &b()).unwrap(), c());
    }

    #[test]
    fn covariance_rules() {
        let alg = ConformalAlgebra::toda();
        let t = HopfElement::t_pow(1);
        // R1
        assert!(alg.product_delta(&b().apply(&t), 0, &c()).unwrap().is_zero());
        assert_eq!(alg.product_delta(&b().apply(&t), -2, &c()).unwrap(), c());
        // R2
        let lhs = alg.product_delta(&b(), 0, &c().apply(&t)).unwrap();
        assert_eq!(lhs, alg.product_delta(&b(), -1, &c()).unwrap().apply(&t));
    }

    #[test]
    fn sequence_products() {
        let alg = ConformalAlgebra::toda();
        assert!(alg.one_product(&b(), &c()).unwrap().is_zero());
        let delta_c = c().apply(&HopfElement::difference());
        assert_eq!(alg.one_product(&c(), &b()).unwrap(), -&delta_c);
        let tau = Sequence::polynomial(KElement::tau()).unwrap();
        assert_eq!(alg.product(&b(), &tau, &c()).unwrap(), -&c());
        let f = Sequence::Kronecker([(-4, q(3)), (0, q(2)), (7, q(-1))].into());
        assert!(alg.product(&b(), &f, &b()).unwrap().is_zero());
        assert!(alg.product(&c(), &f, &c()).unwrap().is_zero());
    }

    #[test]
    fn quotient_is_abelian_plane() {
        let lie = ConformalAlgebra::toda().quotient_lie().unwrap();
        assert_eq!(lie.dimension(), 2);
        assert!(lie.is_abelian());
        lie.ensure_valid().unwrap();
        assert!(lie.checks.iter().all(|c| c.passed));
    }

    #[test]
    fn rejects_foreign_generators_and_dtau() {
        let alg = ConformalAlgebra::toda();
        let x = ConformalElement::generator("X");
        assert!(matches!(alg.product_delta(&x, 0, &b()), Err(Error::Usage(_))));
        let d = ConformalElement::term("B", HopfElement::dtau());
        assert!(matches!(alg.product_delta(&d, 0, &b()), Err(Error::Usage(_))));
    }

    #[test]
    fn display() {
        let x = &ConformalElement::term("C", HopfElement::t_pow(1).scale(&q(-1))) + &b();
        assert_eq!(x.to_string(), "B - T*C");
        let y = ConformalElement::term("C", HopfElement::difference());
        assert_eq!(y.to_string(), "(T - 1)*C");
    }
}
