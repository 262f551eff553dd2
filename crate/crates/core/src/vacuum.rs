//! The vacuum module `V = U(LC) (x)_{U(LC_Hol)} C_0` and its vertex operators.
//!
//! States are combinations of PBW monomials in the singular modes
//! `X_<1/(t-n)^m>`, ordered by `(generator, n, m)`. For Toda this puts all
//! `B` modes before all `C` modes. Normal ordering swaps adjacent creators
//! and adds their bracket, which is again singular.
//!
//! Vertex operators of single-mode states are the generator currents. Deeper
//! states use `Y(X_<p> b) = :Y(X_<p>|0>) Y(b):`. Mode sums that do not
//! terminate inside the configured budget are reported as untraceable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::affine::{self, LieElement};
use crate::conformal::ConformalAlgebra;
use crate::distributions::{rationality_extract, Ansatz, BiDistribution, Current, Extraction, Window};
use crate::error::{Error, Result};
use crate::hopf::HopfElement;
use crate::ktau::KElement;
use crate::linalg;
use crate::scalar::{factorial, fmt_q, fmt_term, q, Q};

/// The creator `gen_<1/(t-pole)^order>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub gen: String,
    pub pole: i64,
    pub order: u32,
}

impl Mode {
    pub fn new(gen: &str, pole: i64, order: u32) -> Self {
        assert!(order >= 1, "mode order starts at 1");
        Self {
            gen: gen.to_string(),
            pole,
            order,
        }
    }

    pub fn label(&self) -> KElement {
        KElement::pole(self.pole, self.order)
    }

    pub fn element(&self) -> LieElement {
        LieElement::basic(&self.gen, self.label())
    }

    pub fn render(&self, unicode: bool) -> String {
        format!("{}[{}]", self.gen, self.label().render(unicode))
    }
}

/// An ordered word of creators acting on the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PbwMonomial {
    modes: Vec<Mode>,
}

impl PbwMonomial {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Sorted copy; only valid as a basis element when the sorted word
    /// is what the caller means (commuting creators).
    #[cfg(test)]
    fn sorted(mut modes: Vec<Mode>) -> Self {
        modes.sort();
        Self { modes }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn depth(&self) -> usize {
        self.modes.len()
    }

    pub fn render(&self, unicode: bool) -> String {
        let mut out: String = self.modes.iter().map(|m| m.render(unicode)).collect();
        out.push_str("vac");
        out
    }
}

/// A finite combination of PBW monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct State {
    terms: BTreeMap<PbwMonomial, Q>,
}

impl State {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::monomial(PbwMonomial::vacuum(), Q::one())
    }

    fn monomial(m: PbwMonomial, c: Q) -> Self {
        let mut out = Self::zero();
        out.insert(m, c);
        out
    }

    fn insert(&mut self, m: PbwMonomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<PbwMonomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.terms.keys().map(PbwMonomial::depth).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &PbwMonomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of the vacuum.
    pub fn vacuum_coeff(&self) -> Q {
        self.coeff(&PbwMonomial::vacuum())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.insert(m.clone(), x * c);
        }
        out
    }

    pub fn render(&self, unicode: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            fmt_term(&mut out, c, &m.render(unicode), i == 0);
        }
        out
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl crate::distributions::Vector for State {
    fn zero() -> Self {
        State::zero()
    }
    fn is_zero(&self) -> bool {
        State::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn times(&self, c: &Q) -> Self {
        self.scale(c)
    }
    fn coords(&self) -> Vec<(String, Q)> {
        self.terms.iter().map(|(m, c)| (m.render(false), c.clone())).collect()
    }
}

/// Sign in `:f g: = f_Hol g (+/-) g f_Sing`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NopSign {
    Plus,
    Minus,
}

impl NopSign {
    pub fn factor(self) -> Q {
        match self {
            NopSign::Plus => Q::one(),
            NopSign::Minus => -Q::one(),
        }
    }
}

impl fmt::Display for NopSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NopSign::Plus => "plus",
            NopSign::Minus => "minus",
        })
    }
}

/// Budget for mode sums: stop after `zero_tail` consecutive zero terms,
/// give up after `max_terms`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SumPolicy {
    pub max_terms: u32,
    pub zero_tail: u32,
}

impl Default for SumPolicy {
    fn default() -> Self {
        Self {
            max_terms: 32,
            zero_tail: 6,
        }
    }
}

fn series(policy: SumPolicy, what: &str, mut term: impl FnMut(u32) -> Result<State>) -> Result<State> {
    let mut acc = State::zero();
    let mut zeros = 0;
    for k in 0..policy.max_terms {
        let t = term(k)?;
        if t.is_zero() {
            zeros += 1;
            if zeros >= policy.zero_tail {
                return Ok(acc);
            }
        } else {
            zeros = 0;
            acc = acc.add(&t);
        }
    }
    Err(Error::Untraceable(format!(
        "{what}: terms still nonzero after {} steps",
        policy.max_terms
    )))
}

/// A field on `V`, evaluated by pairing with test functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    /// `<Y, G> = Tr(G) id`.
    Identity,
    /// `<Y, G> = gen_<S(h) G>`, the field of `gen_<alpha(h)> |0>`.
    Generator {
        gen: String,
        h: HopfElement,
    },
    /// `:a b:` with the given sign convention.
    Nop {
        a: Box<Field>,
        b: Box<Field>,
        sign: NopSign,
    },
    /// `f(t)_{F} g(t)` by the twisted-exponential formula.
    Product {
        f: Box<Field>,
        func: KElement,
        g: Box<Field>,
    },
    Sum(Vec<(Q, Field)>),
}

impl Field {
    pub fn generator(gen: &str) -> Self {
        Field::Generator {
            gen: gen.to_string(),
            h: HopfElement::one(),
        }
    }

    pub fn product(f: Field, func: KElement, g: Field) -> Self {
        Field::Product {
            f: Box::new(f),
            func,
            g: Box::new(g),
        }
    }

    pub fn nop(a: Field, b: Field, sign: NopSign) -> Self {
        Field::Nop {
            a: Box::new(a),
            b: Box::new(b),
            sign,
        }
    }
}

/// The vacuum module over a conformal algebra.
#[derive(Clone, Debug)]
pub struct VacuumModule {
    alg: Arc<ConformalAlgebra>,
    pub policy: SumPolicy,
    pub depth_limit: usize,
    pub sign: NopSign,
}

/// Singular modes of `x` and its holomorphic remainder.
fn split_modes(x: &LieElement) -> (Vec<(Mode, Q)>, LieElement) {
    let (hol, sing) = x.hol_sing_split();
    let mut modes = Vec::new();
    for (g, p) in sing.coords() {
        for (&(n, m), c) in p.poles() {
            modes.push((Mode::new(g, n, m), c.clone()));
        }
    }
    (modes, hol)
}

impl VacuumModule {
    pub fn new(alg: ConformalAlgebra) -> Self {
        Self {
            alg: Arc::new(alg),
            policy: SumPolicy::default(),
            depth_limit: 3,
            sign: NopSign::Plus,
        }
    }

    pub fn toda() -> Self {
        Self::new(ConformalAlgebra::toda())
    }

    pub fn with_sign(mut self, sign: NopSign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth_limit = depth;
        self
    }

    pub fn with_policy(mut self, policy: SumPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn algebra(&self) -> &ConformalAlgebra {
        &self.alg
    }

    /// `c1 c2 ... ck |0>` for creators `word`, normal ordered.
    pub fn word(&self, word: &[Mode]) -> Result<State> {
        let Some(i) = word.windows(2).position(|w| w[0] > w[1]) else {
            return Ok(State::monomial(PbwMonomial { modes: word.to_vec() }, Q::one()));
        };
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        let mut out = self.word(&swapped)?;
        let comm = affine::bracket(&self.alg, &word[i].element(), &word[i + 1].element())?;
        if !comm.is_zero() {
            let mut tail = self.act(&comm, &self.word(&word[i + 2..])?)?;
            for m in word[..i].iter().rev() {
                tail = self.act(&m.element(), &tail)?;
            }
            out = out.add(&tail);
        }
        Ok(out)
    }

    /// `x . s`.
    pub fn act(&self, x: &LieElement, s: &State) -> Result<State> {
        for g in x.coords().keys() {
            if !self.alg.has_generator(g) {
                return Err(Error::Usage(format!("generator {g} is not in this algebra")));
            }
        }
        let (modes, hol) = split_modes(x);
        let mut out = State::zero();
        for (word, c) in &s.terms {
            for (mode, a) in &modes {
                let mut w = Vec::with_capacity(word.modes.len() + 1);
                w.push(mode.clone());
                w.extend(word.modes.iter().cloned());
                out = out.add(&self.word(&w)?.scale(&(a * c)));
            }
            if !hol.is_zero() {
                out = out.add(&self.act_hol(&hol, &word.modes)?.scale(c));
            }
        }
        Ok(out)
    }

    /// Holomorphic `x` on `w |0>`: commute to the right, kill the vacuum.
    fn act_hol(&self, x: &LieElement, word: &[Mode]) -> Result<State> {
        let Some((first, rest)) = word.split_first() else {
            return Ok(State::zero());
        };
        let rest_state = State::monomial(PbwMonomial { modes: rest.to_vec() }, Q::one());
        let moved = self.act_hol(x, rest)?;
        let mut out = self.act(&first.element(), &moved)?;
        let comm = affine::bracket(&self.alg, x, &first.element())?;
        if !comm.is_zero() {
            out = out.add(&self.act(&comm, &rest_state)?);
        }
        Ok(out)
    }

    /// Applies the creators of `modes` right to left to the vacuum.
    pub fn state_from_elements(&self, elems: &[LieElement]) -> Result<State> {
        let mut s = State::vacuum();
        for x in elems.iter().rev() {
            s = self.act(x, &s)?;
        }
        Ok(s)
    }

    /// `h . s`, label-wise: `T^k` sends `p` to `T^-k p`, `Dtau` acts as the
    /// derivation `p -> -p'`.
    pub fn module_action(&self, h: &HopfElement, s: &State) -> Result<State> {
        let mut out = State::zero();
        for (&(k, m), c) in h.terms() {
            for (word, a) in &s.terms {
                let labels: Vec<LieElement> = word
                    .modes
                    .iter()
                    .map(|md| LieElement::basic(&md.gen, md.label().shift(-k)))
                    .collect();
                let mut words = vec![(labels, Q::one())];
                for _ in 0..m {
                    words = words
                        .into_iter()
                        .flat_map(|(w, c)| {
                            (0..w.len()).map(move |i| {
                                let mut w2 = w.clone();
                                let d = LieElement::from_coords(
                                    w2[i].coords().iter().map(|(g, p)| (g.clone(), -&p.derivative())),
                                );
                                w2[i] = d;
                                (w2, c.clone())
                            })
                        })
                        .collect();
                }
                for (w, b) in words {
                    out = out.add(&self.state_from_elements(&w)?.scale(&(c * a * b)));
                }
            }
        }
        Ok(out)
    }

    /// `Y(s)` for a state of depth at most `depth_limit`.
    pub fn field(&self, s: &State) -> Result<Field> {
        let depth = s.depth();
        if depth > self.depth_limit {
            return Err(Error::DepthExceeded {
                depth,
                limit: self.depth_limit,
            });
        }
        let mut parts = Vec::new();
        for (word, c) in &s.terms {
            parts.push((c.clone(), self.monomial_field(&word.modes)?));
        }
        Ok(Field::Sum(parts))
    }

    fn monomial_field(&self, modes: &[Mode]) -> Result<Field> {
        match modes {
            [] => Ok(Field::Identity),
            [m] => Ok(Field::Generator {
                gen: m.gen.clone(),
                h: HopfElement::alpha_inv(&m.label())?,
            }),
            [m, rest @ ..] => Ok(Field::nop(
                self.monomial_field(std::slice::from_ref(m))?,
                self.monomial_field(rest)?,
                self.sign,
            )),
        }
    }

    /// `<field, g> s`.
    pub fn apply(&self, field: &Field, g: &KElement, s: &State) -> Result<State> {
        if s.is_zero() {
            return Ok(State::zero());
        }
        match field {
            Field::Identity => Ok(s.scale(&g.trace())),
            Field::Generator { gen, h } => {
                let label = h.antipode().act(g);
                self.act(&LieElement::basic(gen, label), s)
            }
            Field::Sum(parts) => {
                let mut out = State::zero();
                for (c, f) in parts {
                    out = out.add(&self.apply(f, g, s)?.scale(c));
                }
                Ok(out)
            }
            Field::Nop { a, b, sign } => {
                // sum_{k>=0} a<t(-k-1)> b<t(k) g> s
                let hol = series(self.policy, "normal ordered product, holomorphic part", |k| {
                    let inner = self.apply(b, &(&KElement::falling_factorial(k as i64) * g), s)?;
                    self.apply(a, &KElement::falling_factorial(-(k as i64) - 1), &inner)
                })?;
                // sum_{j>=0} b<t(-j-1) g> a<t(j)> s
                let sing = series(self.policy, "normal ordered product, singular part", |j| {
                    let inner = self.apply(a, &KElement::falling_factorial(j as i64), s)?;
                    self.apply(b, &(&KElement::falling_factorial(-(j as i64) - 1) * g), &inner)
                })?;
                Ok(hol.add(&sing.scale(&sign.factor())))
            }
            Field::Product { f, func, g: gf } => {
                // sum_k f<(T^-1 - 1)^k F / k!> g<t(k) G> s
                let back = &HopfElement::t_pow(-1) - &HopfElement::one();
                let mut fk = func.clone();
                let first = series(self.policy, "field product, first sum", |k| {
                    if k > 0 {
                        fk = back.act(&fk);
                    }
                    let inner = self.apply(gf, &(&KElement::falling_factorial(k as i64) * g), s)?;
                    let w = fk.scale(&(Q::one() / factorial(k)));
                    self.apply(f, &w, &inner)
                })?;
                // sum_k g<S[Delta^k F] G / k!> f<t(k)> s
                let delta = HopfElement::difference();
                let mut dk = func.clone();
                let second = series(self.policy, "field product, second sum", |k| {
                    if k > 0 {
                        dk = delta.act(&dk);
                    }
                    let inner = self.apply(f, &KElement::falling_factorial(k as i64), s)?;
                    let w = &dk.reflect().scale(&(Q::one() / factorial(k))) * g;
                    self.apply(gf, &w, &inner)
                })?;
                Ok(first.sub(&second))
            }
        }
    }

    /// `<Y(a), F> s`.
    pub fn vertex_eval(&self, a: &State, func: &KElement, s: &State) -> Result<State> {
        self.apply(&self.field(a)?, func, s)
    }

    /// `a_{1/t} b` under the module's sign convention.
    pub fn normal_ordered_product(&self, a: &State, b: &State) -> Result<State> {
        self.vertex_eval(a, &KElement::pole(0, 1), b)
    }

    /// `sum_{j=0}^{k} k(j) <Y(f), t(-j-1)> |0>` for `h = T^k`, `k >= 0`.
    pub fn h_v(&self, h: &HopfElement, f: &State) -> Result<State> {
        let field = self.field(f)?;
        let vac = State::vacuum();
        let mut out = State::zero();
        for (&(k, m), c) in h.terms() {
            if m > 0 || k < 0 {
                // <T^k Dtau^m, t(j)> need not vanish for large j: use the window
                let term = series(self.policy, "h_V mode sum", |j| {
                    let w = HopfElement::monomial(k, m).pair(&KElement::falling_factorial(j as i64))?;
                    if w.is_zero() {
                        return Ok(State::zero());
                    }
                    Ok(self
                        .apply(&field, &KElement::falling_factorial(-(j as i64) - 1), &vac)?
                        .scale(&w))
                })?;
                out = out.add(&term.scale(c));
                continue;
            }
            for j in 0..=k {
                let w = crate::scalar::falling(&q(k), j as u32);
                let v = self.apply(&field, &KElement::falling_factorial(-j - 1), &vac)?;
                out = out.add(&v.scale(&(c * w)));
            }
        }
        Ok(out)
    }

    /// Compares `h . f` with `h_V f`.
    pub fn compatibility_check(&self, f: &State, h: &HopfElement) -> Result<Check> {
        let lhs = self.module_action(h, f)?;
        let rhs = self.h_v(h, f)?;
        Ok(Check::new(format!("{h} . {f}"), lhs, rhs))
    }

    /// Finds `phi` with `<Y(a) s, t(n)> = Tr(phi t(n))` for `n >= 0`.
    pub fn singular_part_certificate(
        &self,
        a: &State,
        s: &State,
        poles: Window,
        order: u32,
        window: i64,
    ) -> Result<Certificate> {
        let field = self.field(a)?;
        let basis: Vec<(i64, u32)> = poles.iter().flat_map(|n| (1..=order).map(move |m| (n, m))).collect();
        let rows = window.max(basis.len() as i64 + 2);
        let mut modes = Vec::new();
        for n in 0..=rows {
            modes.push(self.apply(&field, &KElement::falling_factorial(n), s)?);
        }
        let mut keys: Vec<PbwMonomial> = modes.iter().flat_map(|m| m.terms.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        let mut matrix = Vec::new();
        for n in 0..=rows {
            let ff = KElement::falling_factorial(n);
            let row = basis
                .iter()
                .map(|&(p, m)| ff.nth_derivative(m - 1).eval_at(p).map(|v| v / factorial(m - 1)))
                .collect::<Result<Vec<Q>>>()?;
            matrix.push(row);
        }
        let rhs: Vec<Vec<Q>> = modes
            .iter()
            .map(|st| keys.iter().map(|k| st.coeff(k)).collect())
            .collect();
        let sol = linalg::solve(&matrix, &rhs);
        if !sol.is_exact() {
            let (r, c) = sol.residual[0];
            return Err(Error::AxiomViolation(format!(
                "no rational singular part with poles in {poles} and order <= {order}: mode {r} of {} is {}",
                keys[c].render(false),
                fmt_q(&rhs[r][c])
            )));
        }
        let mut phi = BTreeMap::new();
        for (j, key) in keys.iter().enumerate() {
            let f = KElement::from_parts(
                Vec::new(),
                basis.iter().zip(&sol.x).map(|(&(p, m), x)| ((p, m), x[j].clone())),
            );
            if !f.is_zero() {
                phi.insert(key.clone(), f);
            }
        }
        Ok(Certificate {
            phi,
            checked: rows as usize + 1,
        })
    }

    /// The mode matrix of `[Y(a, t1), Y(b, t2)]` applied to `s`.
    pub fn commutator_modes(&self, a: &Field, b: &Field, s: &State, window: Window) -> Result<BiDistribution<State>> {
        BiDistribution::from_fn(window, |m, n| {
            let fm = KElement::falling_factorial(m);
            let gn = KElement::falling_factorial(n);
            let ab = self.apply(a, &fm, &self.apply(b, &gn, s)?)?;
            let ba = self.apply(b, &gn, &self.apply(a, &fm, s)?)?;
            Ok(ab.sub(&ba))
        })
    }

    /// Recovers `[Y(f, t1), Y(g, t2)] s` as a finite delta expansion in the
    /// currents `X(t2) s`.
    pub fn extract_commutator(
        &self,
        f: &str,
        g: &str,
        s: &State,
        window: Window,
        ops_radius: i64,
    ) -> Result<Extraction> {
        let d = self.commutator_modes(&Field::generator(f), &Field::generator(g), s, window)?;
        let currents: Vec<Arc<dyn Current<State>>> = self
            .alg
            .generators()
            .iter()
            .map(|x| {
                Arc::new(StateCurrent {
                    module: self.clone(),
                    gen: x.clone(),
                    state: s.clone(),
                }) as Arc<dyn Current<State>>
            })
            .collect();
        let ansatz = Ansatz::new(currents, Window::symmetric(ops_radius), 0);
        rationality_extract(&d, &ansatz, window)
    }
}

/// `p -> gen_<p> s`.
#[derive(Clone)]
struct StateCurrent {
    module: VacuumModule,
    gen: String,
    state: State,
}

impl fmt::Debug for StateCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateCurrent({})", self.gen)
    }
}

impl Current<State> for StateCurrent {
    fn label(&self) -> String {
        self.gen.clone()
    }
    fn smear(&self, p: &KElement) -> Result<State> {
        self.module.act(&LieElement::basic(&self.gen, p.clone()), &self.state)
    }
}

/// `phi` in `V (x) K_T^Sing`, keyed by PBW monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub phi: BTreeMap<PbwMonomial, KElement>,
    /// Number of modes `n = 0, 1, ...` the solution was checked on.
    pub checked: usize,
}

impl Certificate {
    pub fn is_zero(&self) -> bool {
        self.phi.is_empty()
    }

    /// `Tr(phi t(n))`.
    pub fn mode(&self, n: i64) -> State {
        let ff = KElement::falling_factorial(n);
        let mut out = State::zero();
        for (m, f) in &self.phi {
            out.insert(m.clone(), (f * &ff).trace());
        }
        out
    }

    pub fn render(&self) -> String {
        if self.phi.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .phi
            .iter()
            .map(|(m, f)| format!("{} (x) ({})", m.render(false), f))
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// One exact comparison.
#[derive(Clone, Debug)]
pub struct Check {
    pub case: String,
    pub lhs: State,
    pub rhs: State,
}

impl Check {
    pub fn new(case: String, lhs: State, rhs: State) -> Self {
        Self { case, lhs, rhs }
    }

    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, Shape};
    use crate::scalar::q2;
    use rand::Rng;

    fn vac() -> State {
        State::vacuum()
    }

    fn creator(m: &VacuumModule, g: &str, n: i64, order: u32) -> State {
        m.act(&Mode::new(g, n, order).element(), &vac()).unwrap()
    }

    #[test]
    fn action_examples() {
        let v = VacuumModule::toda();
        let c = creator(&v, "C", 0, 1);
        assert!(v
            .act(&LieElement::basic("B", KElement::one()), &vac())
            .unwrap()
            .is_zero());
        assert_eq!(
            v.act(&LieElement::basic("B", KElement::tau()), &c).unwrap(),
            c.scale(&q(-1))
        );
        assert!(v.act(&LieElement::basic("B", KElement::one()), &c).unwrap().is_zero());
        let bc = v.act(&Mode::new("B", 0, 1).element(), &c).unwrap();
        assert_eq!(bc.to_string(), "B[1/t]C[1/t]vac");
        // C then B needs a commutator: C B = B C - [B, C]
        let b = creator(&v, "B", 0, 1);
        let cb = v.act(&Mode::new("C", 0, 1).element(), &b).unwrap();
        let comm = affine::bracket(
            v.algebra(),
            &Mode::new("B", 0, 1).element(),
            &Mode::new("C", 0, 1).element(),
        )
        .unwrap();
        assert_eq!(cb, bc.sub(&v.act(&comm, &vac()).unwrap()));
    }

    #[test]
    fn representation_property() {
        let v = VacuumModule::toda();
        let alg = v.algebra().clone();
        let mut rng = random::rng(11);
        let shape = Shape {
            pole_radius: 3,
            max_order: 2,
            max_degree: 2,
            max_poles: 2,
        };
        for _ in 0..100 {
            let x = affine::random_element(&mut rng, &alg, shape);
            let y = affine::random_element(&mut rng, &alg, shape);
            let depth = rng.gen_range(0..=2);
            let elems: Vec<LieElement> = (0..depth)
                .map(|_| affine::random_element(&mut rng, &alg, shape.singular()))
                .collect();
            let s = v.state_from_elements(&elems).unwrap();
            let lhs = v.act(&affine::bracket(&alg, &x, &y).unwrap(), &s).unwrap();
            let rhs = v
                .act(&x, &v.act(&y, &s).unwrap())
                .unwrap()
                .sub(&v.act(&y, &v.act(&x, &s).unwrap()).unwrap());
            assert_eq!(lhs, rhs, "x={x} y={y} s={s}");
        }
    }

    #[test]
    fn confluence() {
        let v = VacuumModule::toda();
        let word = [
            Mode::new("C", 1, 1),
            Mode::new("B", 0, 2),
            Mode::new("C", -1, 1),
            Mode::new("B", 2, 1),
        ];
        let direct = v.word(&word).unwrap();
        let elems: Vec<LieElement> = word.iter().map(Mode::element).collect();
        assert_eq!(direct, v.state_from_elements(&elems).unwrap());
        // commuting creators in any order
        let a = v.word(&[Mode::new("C", 1, 1), Mode::new("C", -1, 2)]).unwrap();
        let b = v.word(&[Mode::new("C", -1, 2), Mode::new("C", 1, 1)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vertex_examples() {
        let v = VacuumModule::toda();
        let b = creator(&v, "B", 0, 1);
        let c = creator(&v, "C", 0, 1);
        for n in 1..6 {
            let got = v.vertex_eval(&b, &KElement::falling_factorial(n), &c).unwrap();
            let sign = if n % 2 == 0 { q(1) } else { q(-1) };
            assert_eq!(got, c.scale(&(sign * factorial(n as u32))));
        }
        assert!(v.vertex_eval(&b, &KElement::one(), &c).unwrap().is_zero());
        let f = KElement::from_parts(vec![q(2)], [((3, 1), q2(5, 2)), ((0, 2), q(1))]);
        assert_eq!(v.vertex_eval(&vac(), &f, &c).unwrap(), c.scale(&q2(5, 2)));
        let bc = v.vertex_eval(&b, &KElement::pole(0, 1), &c).unwrap();
        assert_eq!(bc.to_string(), "B[1/t]C[1/t]vac");
        assert_eq!(v.normal_ordered_product(&vac(), &c).unwrap(), c);
    }

    #[test]
    fn certificates() {
        let v = VacuumModule::toda();
        let b = creator(&v, "B", 0, 1);
        let c = creator(&v, "C", 0, 1);
        let cert = v.singular_part_certificate(&b, &c, Window::new(-3, 3), 2, 8).unwrap();
        let want = KElement::from_parts(vec![], [((-1, 1), q(1)), ((0, 1), q(-1))]);
        assert_eq!(cert.phi.len(), 1);
        assert_eq!(cert.phi[&PbwMonomial::sorted(vec![Mode::new("C", 0, 1)])], want);
        assert!(v
            .singular_part_certificate(&vac(), &c, Window::new(-3, 3), 2, 8)
            .unwrap()
            .is_zero());
        assert!(v
            .singular_part_certificate(&b, &vac(), Window::new(-3, 3), 2, 8)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn module_action_and_compatibility() {
        let v = VacuumModule::toda();
        let b = creator(&v, "B", 0, 1);
        let t = HopfElement::t_pow(1);
        assert_eq!(v.module_action(&t, &b).unwrap(), creator(&v, "B", 1, 1));
        assert_eq!(v.h_v(&t, &b).unwrap(), creator(&v, "B", 1, 1));
        let s = v.word(&[Mode::new("B", 1, 2), Mode::new("C", 0, 1)]).unwrap();
        assert_eq!(v.module_action(&HopfElement::one(), &s).unwrap(), s);
        let back = v
            .module_action(&HopfElement::t_pow(-1), &v.module_action(&t, &s).unwrap())
            .unwrap();
        assert_eq!(back, s);
        for g in ["B", "C"] {
            for n in -3..=3 {
                for m in 1..=2 {
                    let f = creator(&v, g, n, m);
                    for k in 0..=3 {
                        let chk = v.compatibility_check(&f, &HopfElement::t_pow(k)).unwrap();
                        assert!(chk.passed(), "{}: {} vs {}", chk.case, chk.lhs, chk.rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_on_states_is_toda() {
        let v = VacuumModule::toda();
        let c = creator(&v, "C", 0, 1);
        let ex = v.extract_commutator("B", "C", &c, Window::symmetric(6), 2).unwrap();
        let map = ex.as_map();
        assert_eq!(map.len(), 2, "{map:?}");
        assert_eq!(map[&("C".to_string(), "T^-1".to_string())], KElement::one());
        assert_eq!(map[&("C".to_string(), "1".to_string())], KElement::constant(q(-1)));
    }
}
