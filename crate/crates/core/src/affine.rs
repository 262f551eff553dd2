//! The affinization `LC = (C (x) K_T) / m_T (C (x) K_T)`.
//!
//! Elements are stored canonically with all Hopf coefficients moved onto the
//! function slot: `(h f)_<p>` becomes `f_<S(h) p>`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;

use crate::conformal::{ConformalAlgebra, ConformalElement};
use crate::distributions::{
    rationality_extract, Ansatz, BiDistribution, Current, DeltaTerm, Extraction, ModeMatrix, Vector, Window,
};
use crate::error::{Error, Result};
use crate::hopf::HopfElement;
use crate::ktau::KElement;
use crate::random::{self, Shape};
use crate::scalar::Q;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    coords: BTreeMap<String, KElement>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `g_<p>` for a generator `g`.
    pub fn basic(g: &str, p: KElement) -> Self {
        Self::from_coords([(g.to_string(), p)])
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (String, KElement)>) -> Self {
        let mut out = Self::zero();
        for (g, p) in coords {
            out.add_coord(g, p);
        }
        out
    }

    fn add_coord(&mut self, g: String, p: KElement) {
        if p.is_zero() {
            return;
        }
        let sum = match self.coords.remove(&g) {
            Some(old) => &old + &p,
            None => p,
        };
        if !sum.is_zero() {
            self.coords.insert(g, sum);
        }
    }

    /// The canonical projection `f (x) p -> f_<p>`.
    pub fn from_pair(f: &ConformalElement, p: &KElement) -> Self {
        Self::from_coords(f.coords().iter().map(|(g, h)| (g.clone(), h.antipode().act(p))))
    }

    pub fn coords(&self) -> &BTreeMap<String, KElement> {
        &self.coords
    }

    pub fn coeff(&self, g: &str) -> KElement {
        self.coords.get(g).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_coords(self.coords.iter().map(|(g, p)| (g.clone(), p.scale(c))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, p) in &other.coords {
            out.add_coord(g.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::from_integer(1.into())))
    }

    /// Action of `h` on the conformal factor: `(h f)_<p> = f_<S(h) p>`.
    pub fn apply_hopf(&self, h: &HopfElement) -> Self {
        let s = h.antipode();
        Self::from_coords(self.coords.iter().map(|(g, p)| (g.clone(), s.act(p))))
    }

    /// Coordinate-wise `(Hol, Sing)` split.
    pub fn hol_sing_split(&self) -> (Self, Self) {
        let hol = Self::from_coords(self.coords.iter().map(|(g, p)| (g.clone(), p.hol())));
        let sing = Self::from_coords(self.coords.iter().map(|(g, p)| (g.clone(), p.sing())));
        (hol, sing)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.coords.values().all(KElement::is_polynomial)
    }

    pub fn is_singular(&self) -> bool {
        self.coords.values().all(|p| p.hol().is_zero())
    }

    pub fn render(&self, unicode: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(g, p)| format!("{g}[{}]", p.render(unicode)))
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// Sparse coordinates of a `K_T` element: polynomial and pole parts.
pub(crate) fn kcoords(prefix: &str, p: &KElement) -> Vec<(String, Q)> {
    let poly = p
        .poly()
        .iter()
        .enumerate()
        .filter(|(_, c)| !Zero::is_zero(*c))
        .map(|(i, c)| (format!("{prefix}t^{i}"), c.clone()));
    let poles = p
        .poles()
        .iter()
        .map(|((n, m), c)| (format!("{prefix}p{n},{m}"), c.clone()));
    poly.chain(poles).collect()
}

impl Vector for LieElement {
    fn zero() -> Self {
        LieElement::zero()
    }
    fn is_zero(&self) -> bool {
        LieElement::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn times(&self, c: &Q) -> Self {
        self.scale(c)
    }
    fn coords(&self) -> Vec<(String, Q)> {
        self.coords
            .iter()
            .flat_map(|(g, p)| kcoords(&format!("{g}:"), p))
            .collect()
    }
}

fn check(alg: &ConformalAlgebra, x: &LieElement) -> Result<()> {
    match x.coords.keys().find(|g| !alg.has_generator(g)) {
        Some(g) => Err(Error::Usage(format!("generator {g} is not in this algebra"))),
        None => Ok(()),
    }
}

/// `[f_<p>, g_<q>] = sum_i (f_{delta_i} g)_<(T^i p) q>`.
pub fn bracket(alg: &ConformalAlgebra, x: &LieElement, y: &LieElement) -> Result<LieElement> {
    check(alg, x)?;
    check(alg, y)?;
    let mut out = LieElement::zero();
    for (a, p) in &x.coords {
        for (b, q) in &y.coords {
            for (i, value) in alg.row(a, b) {
                out = out.add(&LieElement::from_pair(value, &(&p.shift(i) * q)));
            }
        }
    }
    Ok(out)
}

/// The bracket of `f_<p>` and `g_<q>` without canonicalizing first: the
/// Hopf coefficients of `f, g` go through the conformal covariance rules.
pub fn bracket_pairs(
    alg: &ConformalAlgebra,
    (f, p): (&ConformalElement, &KElement),
    (g, q): (&ConformalElement, &KElement),
) -> Result<LieElement> {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let span = |h: &HopfElement| {
        let ks: Vec<i64> = h.terms().keys().map(|k| k.0).collect();
        (*ks.iter().min().unwrap_or(&0), *ks.iter().max().unwrap_or(&0))
    };
    let r = alg.support_radius();
    for hf in f.coords().values() {
        for hg in g.coords().values() {
            let (fk_lo, fk_hi) = span(hf);
            let (gl_lo, gl_hi) = span(hg);
            lo = lo.min(-r - fk_hi + gl_lo);
            hi = hi.max(r - fk_lo + gl_hi);
        }
    }
    let mut out = LieElement::zero();
    if lo > hi {
        return Ok(out);
    }
    for i in lo..=hi {
        let c = alg.product_delta(f, i, g)?;
        out = out.add(&LieElement::from_pair(&c, &(&p.shift(i) * q)));
    }
    Ok(out)
}

/// The mode `f_<t(n)>` of the current `f(t)`.
pub fn current_mode(f: &ConformalElement, n: i64) -> LieElement {
    LieElement::from_pair(f, &KElement::falling_factorial(n))
}

/// The current `X(t)`, smeared as `p -> X_<p>`.
#[derive(Clone, Debug)]
pub struct GeneratorCurrent {
    pub element: ConformalElement,
}

impl GeneratorCurrent {
    pub fn new(element: ConformalElement) -> Self {
        Self { element }
    }
}

impl Current<LieElement> for GeneratorCurrent {
    fn label(&self) -> String {
        self.element.to_string()
    }
    fn smear(&self, p: &KElement) -> Result<LieElement> {
        Ok(LieElement::from_pair(&self.element, p))
    }
}

/// `[f(t1), g(t2)]` as a mode matrix and as a finite delta expansion.
#[derive(Clone, Debug)]
pub struct CurrentCommutator {
    pub window: Window,
    pub modes: ModeMatrix<LieElement>,
    pub closed_form: BiDistribution<LieElement>,
    /// `(i, f_{delta_i} g)`, meaning `(f_{delta_i} g)(t2) T_2^i delta`.
    pub terms: Vec<(i64, ConformalElement)>,
}

impl CurrentCommutator {
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(i, c)| serde_json::json!({ "current": c.to_string(), "op": HopfElement::t_pow(*i).to_string() }))
            .collect();
        let modes: Vec<serde_json::Value> = self
            .modes
            .iter()
            .map(|((m, n), v)| serde_json::json!({ "m": m, "n": n, "value": v.to_string() }))
            .collect();
        serde_json::json!({
            "window": [self.window.lo, self.window.hi],
            "delta_expansion": terms,
            "display": self.render(),
            "modes": modes,
        })
    }

    /// `sum (f_{delta_i} g)(t2) T_2^i delta(t1, t2)`; scalar multiples of a
    /// generator are grouped into one operator.
    pub fn render(&self) -> String {
        let mut grouped: BTreeMap<String, HopfElement> = BTreeMap::new();
        let mut other = Vec::new();
        for (i, c) in &self.terms {
            let scalar = c.coords().values().all(|h| h.terms().keys().all(|k| *k == (0, 0)));
            if scalar {
                for (g, h) in c.coords() {
                    let e = grouped.entry(g.clone()).or_default();
                    *e = &*e + &(&HopfElement::t_pow(*i) * h);
                }
            } else {
                let op = HopfElement::t_pow(*i).to_string().replace('T', "T2");
                other.push(format!("({c})(t2)({op})delta(t1,t2)"));
            }
        }
        let mut parts: Vec<String> = grouped
            .iter()
            .filter(|(_, op)| !op.is_zero())
            .map(|(g, op)| format!("{g}(t2)({})delta(t1,t2)", op.to_string().replace('T', "T2")))
            .collect();
        parts.extend(other);
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Mode matrix from pairwise brackets and the closed form; they must agree.
pub fn current_commutator(
    alg: &ConformalAlgebra,
    f: &ConformalElement,
    g: &ConformalElement,
    window: Window,
) -> Result<CurrentCommutator> {
    alg.check_element(f)?;
    alg.check_element(g)?;
    let r = alg.support_radius() + 8;
    let mut terms = Vec::new();
    for i in -r..=r {
        let c = alg.product_delta(f, i, g)?;
        if !c.is_zero() {
            terms.push((i, c));
        }
    }
    let closed_form = BiDistribution::from_terms(
        terms
            .iter()
            .map(|(i, c)| {
                let cur: Arc<dyn Current<LieElement>> = Arc::new(GeneratorCurrent::new(c.clone()));
                DeltaTerm::new(cur, KElement::one(), HopfElement::t_pow(*i))
            })
            .collect(),
    );
    let mut modes = ModeMatrix::new();
    for m in window.iter() {
        let x = current_mode(f, m);
        for n in window.iter() {
            let v = bracket(alg, &x, &current_mode(g, n))?;
            if !v.is_zero() {
                modes.insert((m, n), v);
            }
        }
    }
    let closed = closed_form.mode_matrix(window)?;
    if closed != modes {
        let (k, v) = modes
            .iter()
            .find(|(k, v)| closed.get(k) != Some(v))
            .map(|(k, v)| (*k, v.to_string()))
            .or_else(|| closed.keys().find(|k| !modes.contains_key(k)).map(|k| (*k, "0".into())))
            .unwrap();
        return Err(Error::AxiomViolation(format!(
            "current commutator: mode ({}, {}) is {v} but the delta expansion disagrees",
            k.0, k.1
        )));
    }
    Ok(CurrentCommutator {
        window,
        modes,
        closed_form,
        terms,
    })
}

/// Recovers the delta expansion of `[f(t1), g(t2)]` from its mode matrix.
pub fn extract_current_commutator(
    alg: &ConformalAlgebra,
    cc: &CurrentCommutator,
    ops_radius: i64,
    max_order: u32,
) -> Result<Extraction> {
    let currents: Vec<Arc<dyn Current<LieElement>>> = alg
        .generators()
        .iter()
        .map(|g| Arc::new(GeneratorCurrent::new(ConformalElement::generator(g))) as Arc<dyn Current<LieElement>>)
        .collect();
    let ansatz = Ansatz::new(currents, Window::symmetric(ops_radius), max_order);
    let d = BiDistribution::from_matrix(cc.modes.clone(), cc.window);
    rationality_extract(&d, &ansatz, cc.window)
}

/// Random element with generator coordinates drawn from `shape`.
pub fn random_element<R: Rng>(rng: &mut R, alg: &ConformalAlgebra, shape: Shape) -> LieElement {
    let gens = alg.generators();
    let k = rng.gen_range(1..=gens.len().max(1));
    LieElement::from_coords((0..k).map(|_| {
        let g = gens[rng.gen_range(0..gens.len())].clone();
        (g, random::kelement(rng, shape))
    }))
}

/// Outcome of one sampled identity check.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<(String, String)>,
}

impl PropertyReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, lhs: &LieElement, rhs: &LieElement) {
        self.cases += 1;
        if lhs != rhs {
            self.failures.push((lhs.to_string(), rhs.to_string()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_antisymmetry<R: Rng>(alg: &ConformalAlgebra, rng: &mut R, n: usize) -> Result<PropertyReport> {
    let mut rep = PropertyReport::new("antisymmetry");
    for _ in 0..n {
        let x = random_element(rng, alg, Shape::default());
        let y = random_element(rng, alg, Shape::default());
        let lhs = bracket(alg, &x, &y)?;
        let rhs = bracket(alg, &y, &x)?.scale(&-Q::from_integer(1.into()));
        rep.record(&lhs, &rhs);
    }
    Ok(rep)
}

pub fn check_jacobi<R: Rng>(alg: &ConformalAlgebra, rng: &mut R, n: usize) -> Result<PropertyReport> {
    let mut rep = PropertyReport::new("jacobi");
    let shape = Shape {
        max_poles: 2,
        max_degree: 2,
        max_order: 2,
        ..Shape::default()
    };
    for _ in 0..n {
        let x = random_element(rng, alg, shape);
        let y = random_element(rng, alg, shape);
        let z = random_element(rng, alg, shape);
        let a = bracket(alg, &x, &bracket(alg, &y, &z)?)?;
        let b = bracket(alg, &y, &bracket(alg, &z, &x)?)?;
        let c = bracket(alg, &z, &bracket(alg, &x, &y)?)?;
        rep.record(&a.add(&b).add(&c), &LieElement::zero());
    }
    Ok(rep)
}

/// Compares the covariance-rule bracket with the canonical one.
pub fn check_extension_rules<R: Rng>(alg: &ConformalAlgebra, rng: &mut R, n: usize) -> Result<PropertyReport> {
    let mut rep = PropertyReport::new("extension rules");
    let gens = alg.generators();
    for _ in 0..n {
        let f = ConformalElement::term(&gens[rng.gen_range(0..gens.len())], random::group_element(rng, 3));
        let g = ConformalElement::term(&gens[rng.gen_range(0..gens.len())], random::group_element(rng, 3));
        let p = random::kelement(rng, Shape::default());
        let q = random::kelement(rng, Shape::default());
        let lhs = bracket_pairs(alg, (&f, &p), (&g, &q))?;
        let rhs = bracket(alg, &LieElement::from_pair(&f, &p), &LieElement::from_pair(&g, &q))?;
        rep.record(&lhs, &rhs);
    }
    Ok(rep)
}

/// Closure of `LC_Hol` and `LC_Sing` under the bracket.
pub fn check_triangular<R: Rng>(
    alg: &ConformalAlgebra,
    rng: &mut R,
    n: usize,
) -> Result<(PropertyReport, PropertyReport)> {
    let mut hol = PropertyReport::new("Hol closed");
    let mut sing = PropertyReport::new("Sing closed");
    for _ in 0..n {
        let x = random_element(rng, alg, Shape::default().holomorphic());
        let y = random_element(rng, alg, Shape::default().holomorphic());
        let b = bracket(alg, &x, &y)?;
        hol.record(&b.hol_sing_split().0, &b);
        let x = random_element(rng, alg, Shape::default().singular());
        let y = random_element(rng, alg, Shape::default().singular());
        let b = bracket(alg, &x, &y)?;
        sing.record(&b.hol_sing_split().1, &b);
    }
    Ok((hol, sing))
}

/// Load-time validation: the quotient identities, antisymmetry, Jacobi and
/// the covariance rules on a fixed sample.
pub fn validate_algebra(alg: &ConformalAlgebra) -> Result<()> {
    alg.quotient_lie()?
        .ensure_valid()
        .map_err(|e| Error::Algebra(e.to_string()))?;
    if alg.generators().is_empty() {
        return Ok(());
    }
    let mut rng = random::rng(0x5eed);
    for rep in [
        check_antisymmetry(alg, &mut rng, 20)?,
        check_jacobi(alg, &mut rng, 10)?,
        check_extension_rules(alg, &mut rng, 10)?,
    ] {
        if let Some((lhs, rhs)) = rep.failures.first() {
            return Err(Error::Algebra(format!("{} fails: {lhs} != {rhs}", rep.name)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn toda() -> ConformalAlgebra {
        ConformalAlgebra::toda()
    }

    #[test]
    fn from_pair_examples() {
        let tb = ConformalElement::term("B", HopfElement::t_pow(1));
        let x = LieElement::from_pair(&tb, &KElement::pole(0, 1));
        assert_eq!(x, LieElement::basic("B", KElement::pole(1, 1)));
        assert!(LieElement::from_pair(&ConformalElement::generator("B"), &KElement::zero()).is_zero());
        let p = KElement::from_parts(vec![q(2), q(1)], [((3, 2), q(1))]);
        let db = ConformalElement::term("B", HopfElement::difference());
        let want = LieElement::basic("B", &p.shift(-1) - &p);
        assert_eq!(LieElement::from_pair(&db, &p), want);
    }

    #[test]
    fn toda_brackets() {
        let alg = toda();
        let inv = KElement::pole(0, 1);
        let x = bracket(
            &alg,
            &LieElement::basic("B", inv.clone()),
            &LieElement::basic("C", inv.clone()),
        )
        .unwrap();
        let want = KElement::from_parts(vec![], [((1, 1), q(1)), ((0, 1), q(-1)), ((0, 2), q(-1))]);
        assert_eq!(x, LieElement::basic("C", want.clone()));
        assert_eq!(want.eval(&q(2)).unwrap(), crate::scalar::q2(1, 4));
        let qq = KElement::from_parts(vec![q(1), q(0), q(3)], [((-2, 1), q(5))]);
        let y = bracket(
            &alg,
            &LieElement::basic("B", KElement::tau()),
            &LieElement::basic("C", qq.clone()),
        )
        .unwrap();
        assert_eq!(y, LieElement::basic("C", -&qq));
        let z = bracket(&alg, &LieElement::basic("B", inv.clone()), &LieElement::basic("B", qq)).unwrap();
        assert!(z.is_zero());
        let mode = bracket(
            &alg,
            &current_mode(&ConformalElement::generator("B"), 1),
            &current_mode(&ConformalElement::generator("C"), 0),
        )
        .unwrap();
        assert_eq!(mode, LieElement::basic("C", KElement::constant(q(-1))));
    }

    #[test]
    fn split() {
        let p = KElement::from_parts(vec![q(0), q(1)], [((0, 1), q(1))]);
        let (h, s) = LieElement::basic("B", p).hol_sing_split();
        assert_eq!(h, LieElement::basic("B", KElement::tau()));
        assert_eq!(s, LieElement::basic("B", KElement::pole(0, 1)));
    }

    #[test]
    fn sampled_identities() {
        let alg = toda();
        let mut rng = random::rng(7);
        assert!(check_antisymmetry(&alg, &mut rng, 100).unwrap().passed());
        assert!(check_jacobi(&alg, &mut rng, 100).unwrap().passed());
        assert!(check_extension_rules(&alg, &mut rng, 50).unwrap().passed());
        let (h, s) = check_triangular(&alg, &mut rng, 50).unwrap();
        assert!(h.passed() && s.passed());
        validate_algebra(&alg).unwrap();
    }

    #[test]
    fn toda_current_commutator() {
        let alg = toda();
        let b = ConformalElement::generator("B");
        let c = ConformalElement::generator("C");
        let cc = current_commutator(&alg, &b, &c, Window::symmetric(6)).unwrap();
        assert_eq!(cc.render(), "C(t2)(-1 + T2^-1)delta(t1,t2)");
        let bb = current_commutator(&alg, &b, &b, Window::symmetric(4)).unwrap();
        assert!(bb.modes.is_empty() && bb.terms.is_empty());
        let ex = extract_current_commutator(&alg, &cc, 2, 0).unwrap();
        assert!(ex.unique);
        let map = ex.as_map();
        assert_eq!(map.len(), 2, "{map:?}");
        assert_eq!(map[&("C".to_string(), "T^-1".to_string())], KElement::one());
        assert_eq!(map[&("C".to_string(), "1".to_string())], KElement::constant(q(-1)));
    }
}
