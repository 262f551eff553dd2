//! Distributions on `K_T` in one and two variables.
//!
//! A one-variable distribution is known through its modes
//! `<D, t(n)>` on a window, optionally backed by an exact rational kernel.
//! Two-variable distributions are either finite sums of delta terms
//! `a(t2) h_2 delta(t1, t2)`, separable kernels, or plain mode matrices; every
//! comparison between them happens on mode matrices over a stated window.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hopf::{HopfBasis, HopfElement};
use crate::ktau::KElement;
use crate::linalg;
use crate::scalar::{factorial, fmt_q, Q};

/// Values a distribution can take: a vector space over `Q` with coordinates.
pub trait Vector: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, c: &Q) -> Self;
    /// Sparse coordinates in some fixed basis, used for exact linear solves.
    fn coords(&self) -> Vec<(String, Q)>;
}

impl Vector for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, c: &Q) -> Self {
        self * c
    }
    fn coords(&self) -> Vec<(String, Q)> {
        if Zero::is_zero(self) {
            Vec::new()
        } else {
            vec![(String::new(), self.clone())]
        }
    }
}

/// An inclusive range of mode indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub const DEFAULT: i64 = 8;

    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty window");
        Self { lo, hi }
    }

    /// `|n| <= half`.
    pub fn symmetric(half: i64) -> Self {
        Self::new(-half, half)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Basis of `K_T`: monomials and pole terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KBasis {
    Mono(u32),
    Pole(i64, u32),
}

impl KBasis {
    pub fn function(&self) -> KElement {
        match *self {
            KBasis::Mono(d) => KElement::monomial(d),
            KBasis::Pole(n, m) => KElement::pole(n, m),
        }
    }
}

/// An element of `W (x) K_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<W> {
    pub terms: BTreeMap<KBasis, W>,
}

impl<W: Vector> Kernel<W> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    /// `w (x) f`.
    pub fn tensor(w: &W, f: &KElement) -> Self {
        let mut out = Self::zero();
        for (d, c) in f.poly().iter().enumerate() {
            out.add_term(KBasis::Mono(d as u32), w.times(c));
        }
        for (&(n, m), c) in f.poles() {
            out.add_term(KBasis::Pole(n, m), w.times(c));
        }
        out
    }

    pub fn add_term(&mut self, b: KBasis, w: W) {
        if w.is_zero() {
            return;
        }
        let next = match self.terms.get(&b) {
            Some(old) => old.plus(&w),
            None => w,
        };
        if next.is_zero() {
            self.terms.remove(&b);
        } else {
            self.terms.insert(b, next);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, w) in &other.terms {
            out.add_term(*b, w.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sing(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| matches!(b, KBasis::Pole(..)))
                .map(|(b, w)| (*b, w.clone()))
                .collect(),
        }
    }

    /// `Tr(kernel * f)`.
    pub fn pair(&self, f: &KElement) -> W {
        self.terms.iter().fold(W::zero(), |acc, (b, w)| {
            let c = (&b.function() * f).trace();
            if Zero::is_zero(&c) {
                acc
            } else {
                acc.plus(&w.times(&c))
            }
        })
    }

    /// Kernel of the antipodal distribution, `-k(-t)`.
    pub fn antipode(&self) -> Self {
        let mut out = Self::zero();
        for (b, w) in &self.terms {
            let (nb, odd) = match *b {
                KBasis::Mono(d) => (KBasis::Mono(d), d % 2 == 1),
                KBasis::Pole(n, m) => (KBasis::Pole(-n, m), m % 2 == 1),
            };
            // -(-1)^parity
            let sign = if odd { Q::one() } else { -Q::one() };
            out.add_term(nb, w.times(&sign));
        }
        out
    }
}

impl Kernel<Q> {
    pub fn from_function(f: &KElement) -> Self {
        Self::tensor(&Q::one(), f)
    }
}

/// A `W`-valued distribution on `K_T`, known on a window of modes.
#[derive(Clone, Debug)]
pub struct Distribution<W> {
    /// `<D, t(n)>` for `n` in the window.
    pub modes: BTreeMap<i64, W>,
    /// Certificate for the modes `n >= 0`: `<D, t(n)> = Tr(phi t(n))`.
    pub rational_sing: Option<Kernel<W>>,
    /// Full rational kernel, when the distribution is given by one.
    pub kernel: Option<Kernel<W>>,
    pub window: Window,
}

impl<W: Vector> Distribution<W> {
    pub fn from_modes(modes: BTreeMap<i64, W>, window: Window) -> Self {
        Self {
            modes,
            rational_sing: None,
            kernel: None,
            window,
        }
    }

    pub fn from_kernel(kernel: Kernel<W>, window: Window) -> Self {
        let modes = window
            .iter()
            .map(|n| (n, kernel.pair(&KElement::falling_factorial(n))))
            .collect();
        Self {
            modes,
            rational_sing: Some(kernel.sing()),
            kernel: Some(kernel),
            window,
        }
    }

    pub fn with_certificate(mut self, phi: Kernel<W>) -> Self {
        self.rational_sing = Some(phi);
        self
    }

    pub fn mode(&self, n: i64) -> Option<&W> {
        self.modes.get(&n)
    }

    /// Modes `n >= 0` (kernel terms `t(-n-1)`).
    pub fn sing_part(&self) -> Self {
        Self {
            modes: self.modes.range(0..).map(|(k, v)| (*k, v.clone())).collect(),
            rational_sing: self.rational_sing.clone(),
            kernel: self.kernel.as_ref().map(Kernel::sing),
            window: self.window,
        }
    }

    /// Modes `n < 0` (kernel terms `t(m)`, `m >= 0`).
    pub fn hol_part(&self) -> Self {
        Self {
            modes: self.modes.range(..0).map(|(k, v)| (*k, v.clone())).collect(),
            rational_sing: None,
            kernel: None,
            window: self.window,
        }
    }

    fn mode_or_zero(&self, n: i64) -> W {
        self.modes.get(&n).cloned().unwrap_or_else(W::zero)
    }

    /// `<D, F>`; refuses pairings that the known data cannot determine.
    pub fn pair(&self, f: &KElement) -> Result<W> {
        if f.is_zero() {
            return Ok(W::zero());
        }
        if let Some(k) = &self.kernel {
            return Ok(k.pair(f));
        }
        if f.is_polynomial() {
            if let Some(phi) = &self.rational_sing {
                return Ok(phi.pair(f));
            }
        }
        let fc = f.to_factorial_basis(self.window.lo..=self.window.hi);
        if !fc.exact {
            return Err(Error::Untraceable(format!(
                "{f} has no finite factorial expansion inside the window {}",
                self.window
            )));
        }
        Ok(fc
            .coeffs
            .iter()
            .fold(W::zero(), |acc, (n, c)| acc.plus(&self.mode_or_zero(*n).times(c))))
    }

    /// Certificate consistency: modes `0..=hi` agree with `Tr(phi t(n))`.
    pub fn certificate_consistent(&self) -> bool {
        let Some(phi) = &self.rational_sing else {
            return true;
        };
        (0.max(self.window.lo)..=self.window.hi)
            .all(|n| phi.pair(&KElement::falling_factorial(n)) == self.mode_or_zero(n))
    }

    /// The antipodal distribution `<D^S, F> = <D, F(-t)>`.
    ///
    /// Without a full kernel only the modes `n >= 0` survive, since
    /// `t(n)(-t)` then has a finite factorial expansion.
    pub fn antipode(&self) -> Self {
        if let Some(k) = &self.kernel {
            return Self::from_kernel(k.antipode(), self.window);
        }
        let lo = self.window.lo.max(0);
        let window = Window::new(lo, self.window.hi.max(lo));
        let modes = window
            .iter()
            .filter(|&n| self.window.contains(n))
            .map(|n| {
                let reflected = KElement::falling_factorial(n).reflect();
                let fc = reflected.to_factorial_basis(0..=n);
                let v = fc
                    .coeffs
                    .iter()
                    .fold(W::zero(), |acc, (j, c)| acc.plus(&self.mode_or_zero(*j).times(c)));
                (n, v)
            })
            .collect();
        Self {
            modes,
            rational_sing: self.rational_sing.as_ref().map(Kernel::antipode),
            kernel: None,
            window,
        }
    }

    pub fn same_modes(&self, other: &Self) -> bool {
        let keys = self.modes.keys().chain(other.modes.keys());
        keys.into_iter()
            .all(|n| self.mode_or_zero(*n) == other.mode_or_zero(*n))
    }
}

/// A linear map `K_T -> W`: the coefficient "current" of a delta term.
pub trait Current<W>: fmt::Debug + Send + Sync {
    fn label(&self) -> String;
    fn smear(&self, p: &KElement) -> Result<W>;
    /// True when every polynomial smears to zero.
    fn kills_polynomials(&self) -> bool {
        false
    }
}

/// `p -> Tr(f p)`, a scalar coefficient function presented as a current.
#[derive(Clone, Debug)]
pub struct FunctionCurrent {
    pub label: String,
    pub f: KElement,
}

impl FunctionCurrent {
    /// The trace itself, labelled `1`.
    pub fn trace() -> Self {
        Self {
            label: "1".into(),
            f: KElement::one(),
        }
    }
}

impl Current<Q> for FunctionCurrent {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn smear(&self, p: &KElement) -> Result<Q> {
        Ok((&self.f * p).trace())
    }
    fn kills_polynomials(&self) -> bool {
        self.f.is_polynomial()
    }
}

/// `current(t2) * coeff(t2) * op_2 delta(t1, t2)`.
#[derive(Clone, Debug)]
pub struct DeltaTerm<W> {
    pub current: Arc<dyn Current<W>>,
    pub coeff: KElement,
    pub op: HopfElement,
}

impl<W: Vector> DeltaTerm<W> {
    pub fn new(current: Arc<dyn Current<W>>, coeff: KElement, op: HopfElement) -> Self {
        Self { current, coeff, op }
    }

    /// `<term, F (x) G> = current(coeff * (op F) * G)`.
    pub fn pair(&self, f: &KElement, g: &KElement) -> Result<W> {
        let hf = self.op.act(f);
        if self.current.kills_polynomials() && self.coeff.is_polynomial() && hf.is_polynomial() && g.is_polynomial() {
            return Ok(W::zero());
        }
        let inner = &(&self.coeff * &hf) * g;
        self.current.smear(&inner)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::First => "t1",
            Slot::Second => "t2",
        })
    }
}

#[derive(Clone, Debug)]
enum Step {
    /// Transform applied to test functions (`S(h)` for an action of `h`).
    Op(HopfElement),
    Mul(KElement),
}

#[derive(Clone, Debug)]
enum Source<W> {
    Delta(Vec<DeltaTerm<W>>),
    /// `sum w * a(t1) b(t2)`.
    Separable(Vec<(KElement, KElement, W)>),
    Matrix(BTreeMap<(i64, i64), W>, Window),
}

/// A two-variable distribution.
#[derive(Clone, Debug)]
pub struct BiDistribution<W> {
    source: Source<W>,
    first: Vec<Step>,
    second: Vec<Step>,
}

/// Mode matrix `<D, t1(m) t2(n)>` keyed by `(m, n)`, zeros omitted.
pub type ModeMatrix<W> = BTreeMap<(i64, i64), W>;

impl<W: Vector> BiDistribution<W> {
    pub fn from_terms(terms: Vec<DeltaTerm<W>>) -> Self {
        Self {
            source: Source::Delta(terms),
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn from_separable(parts: Vec<(KElement, KElement, W)>) -> Self {
        Self {
            source: Source::Separable(parts),
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    /// A distribution known only through its mode matrix on `window`.
    pub fn from_matrix(matrix: ModeMatrix<W>, window: Window) -> Self {
        Self {
            source: Source::Matrix(matrix, window),
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(i64, i64) -> Result<W>) -> Result<Self> {
        let mut matrix = BTreeMap::new();
        for m in window.iter() {
            for n in window.iter() {
                let v = f(m, n)?;
                if !v.is_zero() {
                    matrix.insert((m, n), v);
                }
            }
        }
        Ok(Self::from_matrix(matrix, window))
    }

    pub fn delta_terms(&self) -> Option<&[DeltaTerm<W>]> {
        match &self.source {
            Source::Delta(t) => Some(t),
            _ => None,
        }
    }

    fn steps(&mut self, slot: Slot) -> &mut Vec<Step> {
        match slot {
            Slot::First => &mut self.first,
            Slot::Second => &mut self.second,
        }
    }

    /// `h_slot D`, with `<h D, F> = <D, S(h) F>`.
    pub fn apply_hopf_slot(&self, h: &HopfElement, slot: Slot) -> Self {
        let mut out = self.clone();
        out.steps(slot).push(Step::Op(h.antipode()));
        out
    }

    /// `f(t_slot) D`.
    pub fn multiply_function_slot(&self, f: &KElement, slot: Slot) -> Self {
        let mut out = self.clone();
        out.steps(slot).push(Step::Mul(f.clone()));
        out
    }

    fn transform(steps: &[Step], f: &KElement) -> KElement {
        steps.iter().rev().fold(f.clone(), |acc, s| match s {
            Step::Op(h) => h.act(&acc),
            Step::Mul(g) => &acc * g,
        })
    }

    /// `<D, F (x) G>`.
    pub fn pair(&self, f: &KElement, g: &KElement) -> Result<W> {
        let f = Self::transform(&self.first, f);
        let g = Self::transform(&self.second, g);
        match &self.source {
            Source::Delta(terms) => terms
                .iter()
                .try_fold(W::zero(), |acc, t| Ok(acc.plus(&t.pair(&f, &g)?))),
            Source::Separable(parts) => Ok(parts.iter().fold(W::zero(), |acc, (a, b, w)| {
                let c = (a * &f).trace() * (b * &g).trace();
                acc.plus(&w.times(&c))
            })),
            Source::Matrix(matrix, window) => {
                let fc = Self::expand(&f, *window, Slot::First)?;
                let gc = Self::expand(&g, *window, Slot::Second)?;
                Ok(Self::contract(matrix, &fc, &gc))
            }
        }
    }

    fn expand(f: &KElement, window: Window, slot: Slot) -> Result<BTreeMap<i64, Q>> {
        let fc = f.to_factorial_basis(window.lo..=window.hi);
        if !fc.exact {
            return Err(Error::Untraceable(format!(
                "slot {slot}: {f} does not expand inside the window {window}"
            )));
        }
        Ok(fc.coeffs)
    }

    fn contract(matrix: &ModeMatrix<W>, fc: &BTreeMap<i64, Q>, gc: &BTreeMap<i64, Q>) -> W {
        let mut acc = W::zero();
        for (m, a) in fc {
            for (n, b) in gc {
                if let Some(w) = matrix.get(&(*m, *n)) {
                    acc = acc.plus(&w.times(&(a * b)));
                }
            }
        }
        acc
    }

    pub fn mode_matrix(&self, window: Window) -> Result<ModeMatrix<W>> {
        let basis: Vec<KElement> = window.iter().map(KElement::falling_factorial).collect();
        if let Source::Matrix(matrix, inner) = &self.source {
            // expand each transformed test function once
            let fs = basis
                .iter()
                .map(|f| Self::expand(&Self::transform(&self.first, f), *inner, Slot::First))
                .collect::<Result<Vec<_>>>()?;
            let gs = basis
                .iter()
                .map(|g| Self::expand(&Self::transform(&self.second, g), *inner, Slot::Second))
                .collect::<Result<Vec<_>>>()?;
            let mut out = BTreeMap::new();
            for (m, fc) in window.iter().zip(&fs) {
                for (n, gc) in window.iter().zip(&gs) {
                    let v = Self::contract(matrix, fc, gc);
                    if !v.is_zero() {
                        out.insert((m, n), v);
                    }
                }
            }
            return Ok(out);
        }
        if let Source::Delta(terms) = &self.source {
            let gs: Vec<KElement> = basis.iter().map(|g| Self::transform(&self.second, g)).collect();
            let mut out: ModeMatrix<W> = BTreeMap::new();
            for (m, f) in window.iter().zip(&basis) {
                let f = Self::transform(&self.first, f);
                let mut row: Vec<W> = vec![W::zero(); gs.len()];
                for t in terms {
                    let left = &t.coeff * &t.op.act(&f);
                    let skip = t.current.kills_polynomials() && left.is_polynomial();
                    for (cell, g) in row.iter_mut().zip(&gs) {
                        if skip && g.is_polynomial() {
                            continue;
                        }
                        *cell = cell.plus(&t.current.smear(&(&left * g))?);
                    }
                }
                for (n, v) in window.iter().zip(row) {
                    if !v.is_zero() {
                        out.insert((m, n), v);
                    }
                }
            }
            return Ok(out);
        }
        let mut out = BTreeMap::new();
        for (m, f) in window.iter().zip(&basis) {
            for (n, g) in window.iter().zip(&basis) {
                let v = self.pair(f, g)?;
                if !v.is_zero() {
                    out.insert((m, n), v);
                }
            }
        }
        Ok(out)
    }

    /// Traces out `slot`, giving a distribution in the other variable.
    pub fn trace_slot(&self, slot: Slot, window: Window) -> Result<Distribution<W>> {
        let one = KElement::one();
        let mut modes = BTreeMap::new();
        for n in window.iter() {
            let g = KElement::falling_factorial(n);
            let v = match slot {
                Slot::First => self.pair(&one, &g),
                Slot::Second => self.pair(&g, &one),
            }
            .map_err(|e| Error::Untraceable(format!("cannot trace slot {slot}: {e}")))?;
            if !v.is_zero() {
                modes.insert(n, v);
            }
        }
        Ok(Distribution::from_modes(modes, window))
    }
}

impl BiDistribution<Q> {
    /// The delta distribution `delta(t1, t2) = sum_n t(n) (x) t(-n-1)`.
    pub fn delta() -> Self {
        Self::from_terms(vec![DeltaTerm::new(
            Arc::new(FunctionCurrent::trace()),
            KElement::one(),
            HopfElement::one(),
        )])
    }
}

/// Which twisted exponential to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `L_S f = sum_k ((T^-1 - 1)^k f)(t1) t2(k) / k!`.
    Left,
    /// `R_S f = sum_k S[(Delta^k f)(t2)] t1(k) / k!`.
    Right,
}

/// A truncated twisted expansion `sum_k a_k(t1) b_k(t2)`.
#[derive(Clone, Debug)]
pub struct TwistedExpansion {
    pub side: Side,
    /// `(a_k(t1), b_k(t2))` for `k = 0..=order`.
    pub terms: Vec<(KElement, KElement)>,
    pub order: u32,
    /// True when the series terminated within `order`.
    pub exact: bool,
}

impl TwistedExpansion {
    pub fn to_distribution(&self, sign: &Q) -> BiDistribution<Q> {
        BiDistribution::from_separable(
            self.terms
                .iter()
                .map(|(a, b)| (a.clone(), b.clone(), sign.clone()))
                .collect(),
        )
    }

    /// The coefficient function multiplying `t_other(k)`.
    pub fn coefficient(&self, k: usize) -> &KElement {
        match self.side {
            Side::Left => &self.terms[k].0,
            Side::Right => &self.terms[k].1,
        }
    }
}

pub fn twisted_expand(f: &KElement, side: Side, order: u32) -> TwistedExpansion {
    let step = match side {
        Side::Left => &HopfElement::t_pow(-1) - &HopfElement::one(),
        Side::Right => HopfElement::difference(),
    };
    let mut terms = Vec::new();
    let mut current = f.clone();
    let mut exact = false;
    for k in 0..=order {
        if current.is_zero() {
            exact = true;
            break;
        }
        let coeff = current.scale(&(Q::one() / factorial(k)));
        let ff = KElement::falling_factorial(k as i64);
        terms.push(match side {
            Side::Left => (coeff, ff),
            Side::Right => (ff, coeff.reflect()),
        });
        current = step.act(&current);
    }
    if current.is_zero() {
        exact = true;
    }
    TwistedExpansion {
        side,
        terms,
        order,
        exact,
    }
}

/// `delta(p) = L_S p(t1) - R_S p(t2)` truncated at `order`.
pub fn delta(p: &KElement, order: u32) -> BiDistribution<Q> {
    let left = twisted_expand(p, Side::Left, order);
    let right = twisted_expand(p, Side::Right, order);
    let mut parts: Vec<(KElement, KElement, Q)> = left.terms.into_iter().map(|(a, b)| (a, b, Q::one())).collect();
    parts.extend(right.terms.into_iter().map(|(a, b)| (a, b, -Q::one())));
    BiDistribution::from_separable(parts)
}

/// The search space for a finite delta expansion.
#[derive(Clone, Debug)]
pub struct Ansatz<W> {
    pub currents: Vec<Arc<dyn Current<W>>>,
    /// Coefficient functions `a(t2)` are combinations of these.
    pub functions: Vec<KElement>,
    /// Operators `T^i Dtau^k`.
    pub ops: Vec<HopfBasis>,
}

impl<W: Vector> Ansatz<W> {
    /// Operators `T^i Dtau^k` for `i` in `poles`, `k <= max_order`, constant coefficients.
    pub fn new(currents: Vec<Arc<dyn Current<W>>>, poles: Window, max_order: u32) -> Self {
        let ops = poles
            .iter()
            .flat_map(|i| (0..=max_order).map(move |k| (i, k)))
            .collect();
        Self {
            currents,
            functions: vec![KElement::one()],
            ops,
        }
    }

    pub fn with_functions(mut self, functions: Vec<KElement>) -> Self {
        self.functions = functions;
        self
    }

    fn unknowns(&self) -> usize {
        self.currents.len() * self.functions.len() * self.ops.len()
    }
}

/// One recovered delta term: `gen(t2) * coeff(t2) * op_2 delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedTerm {
    pub gen: String,
    pub coeff: KElement,
    pub op: HopfElement,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub terms: Vec<ExtractedTerm>,
    pub window: Window,
    /// False when the window left some ansatz directions undetermined.
    pub unique: bool,
}

impl Extraction {
    /// `(gen, op) -> coeff` view for comparisons.
    pub fn as_map(&self) -> BTreeMap<(String, String), KElement> {
        self.terms
            .iter()
            .map(|t| ((t.gen.clone(), t.op.to_string()), t.coeff.clone()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "gen": t.gen,
                        "coeff": t.coeff.to_string(),
                        "op": t.op.to_string(),
                    })
                })
                .collect(),
        )
    }

    /// Rebuilds the delta expansion, resolving labels through `ansatz`.
    pub fn to_distribution<W: Vector>(&self, ansatz: &Ansatz<W>) -> BiDistribution<W> {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let current = ansatz.currents.iter().find(|c| c.label() == t.gen)?;
                Some(DeltaTerm::new(current.clone(), t.coeff.clone(), t.op.clone()))
            })
            .collect();
        BiDistribution::from_terms(terms)
    }
}

/// Recovers `sum a_{i,k}(t2) T_2^i Dtau_2^k delta` from a distribution's mode
/// matrix on `window` by an exact linear solve over the ansatz.
pub fn rationality_extract<W: Vector>(d: &BiDistribution<W>, ansatz: &Ansatz<W>, window: Window) -> Result<Extraction> {
    rationality_extract_many(std::slice::from_ref(d), ansatz, window)?
        .pop()
        .expect("one input")
}

/// [`rationality_extract`] for several distributions sharing one ansatz;
/// the ansatz columns are computed once.
pub fn rationality_extract_many<W: Vector>(
    ds: &[BiDistribution<W>],
    ansatz: &Ansatz<W>,
    window: Window,
) -> Result<Vec<Result<Extraction>>> {
    let targets = ds.iter().map(|d| d.mode_matrix(window)).collect::<Result<Vec<_>>>()?;
    let basis: Vec<KElement> = window.iter().map(KElement::falling_factorial).collect();
    let mut rows: BTreeMap<(i64, i64, String), usize> = BTreeMap::new();
    let mut columns: Vec<BTreeMap<usize, Q>> = Vec::with_capacity(ansatz.unknowns());
    let mut labels = Vec::new();
    let mut row_index = |key: (i64, i64, String)| {
        let next = rows.len();
        *rows.entry(key).or_insert(next)
    };
    // smeared functions coeff * (op F) * G, shared by all currents
    let skip_polynomials = ansatz.currents.iter().all(|c| c.kills_polynomials());
    let mut smeared: Vec<Vec<KElement>> = Vec::new();
    for func in &ansatz.functions {
        for &(i, k) in &ansatz.ops {
            let op = HopfElement::monomial(i, k);
            let mut cells = Vec::with_capacity(basis.len() * basis.len());
            for f in &basis {
                let left = func * &op.act(f);
                for g in &basis {
                    if skip_polynomials && left.is_polynomial() && g.is_polynomial() {
                        cells.push(KElement::zero());
                    } else {
                        cells.push(&left * g);
                    }
                }
            }
            smeared.push(cells);
        }
    }
    let pairs: Vec<(i64, i64)> = window.iter().flat_map(|m| window.iter().map(move |n| (m, n))).collect();
    for current in &ansatz.currents {
        let mut cells = smeared.iter();
        for func in &ansatz.functions {
            for &(i, k) in &ansatz.ops {
                let mut col = BTreeMap::new();
                for (&(m, n), p) in pairs.iter().zip(cells.next().unwrap()) {
                    for (key, c) in current.smear(p)?.coords() {
                        col.insert(row_index((m, n, key)), c);
                    }
                }
                columns.push(col);
                labels.push((current.label(), func.clone(), HopfElement::monomial(i, k)));
            }
        }
    }
    let mut rhs: Vec<BTreeMap<usize, Q>> = Vec::with_capacity(targets.len());
    for target in &targets {
        let mut col = BTreeMap::new();
        for ((m, n), w) in target {
            for (key, c) in w.coords() {
                col.insert(row_index((*m, *n, key)), c);
            }
        }
        rhs.push(col);
    }
    let nrows = rows.len();
    let mut a = vec![vec![<Q as Zero>::zero(); columns.len()]; nrows];
    for (j, col) in columns.iter().enumerate() {
        for (&i, c) in col {
            a[i][j] = c.clone();
        }
    }
    let b: Vec<Vec<Q>> = (0..nrows)
        .map(|i| {
            rhs.iter()
                .map(|col| col.get(&i).cloned().unwrap_or_else(<Q as Zero>::zero))
                .collect()
        })
        .collect();
    let sol = linalg::solve(&a, &b);
    let inverse: BTreeMap<usize, &(i64, i64, String)> = rows.iter().map(|(k, v)| (*v, k)).collect();
    let mut out = Vec::with_capacity(targets.len());
    for j in 0..targets.len() {
        let residual: Vec<usize> = sol.residual.iter().filter(|(_, c)| *c == j).map(|(r, _)| *r).collect();
        if !residual.is_empty() {
            let shown: Vec<String> = residual
                .iter()
                .take(4)
                .map(|r| {
                    let (m, n, key) = inverse[r];
                    format!("({m},{n}){key}: {}", fmt_q(&b[*r][j]))
                })
                .collect();
            out.push(Err(Error::ExtractionFailed {
                residual: format!("{} unmatched entries, e.g. {}", residual.len(), shown.join(", ")),
                window: window.to_string(),
            }));
            continue;
        }
        let mut grouped: BTreeMap<(String, HopfBasis), KElement> = BTreeMap::new();
        for ((label, func, op), x) in labels.iter().zip(&sol.x) {
            if Zero::is_zero(&x[j]) {
                continue;
            }
            let key = (label.clone(), *op.terms().keys().next().unwrap());
            let entry = grouped.entry(key).or_insert_with(KElement::zero);
            *entry = &*entry + &func.scale(&x[j]);
        }
        let terms = grouped
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((gen, (i, k)), coeff)| ExtractedTerm {
                gen,
                coeff,
                op: HopfElement::monomial(i, k),
            })
            .collect();
        out.push(Ok(Extraction {
            terms,
            window,
            unique: sol.is_unique(),
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn ff(n: i64) -> KElement {
        KElement::falling_factorial(n)
    }

    #[test]
    fn left_expansion_of_tau_terminates() {
        let e = twisted_expand(&KElement::tau(), Side::Left, 4);
        assert!(e.exact);
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.coefficient(0), &KElement::tau());
        assert_eq!(e.coefficient(1), &KElement::constant(q(-1)));
    }

    #[test]
    fn twisted_expansions_of_inverse_tau() {
        let l = twisted_expand(&KElement::pole(0, 1), Side::Left, 6);
        let r = twisted_expand(&KElement::pole(0, 1), Side::Right, 6);
        assert!(!l.exact && !r.exact);
        for k in 0..=6 {
            assert_eq!(l.coefficient(k), &ff(-(k as i64) - 1));
            assert_eq!(r.coefficient(k), &ff(-(k as i64) - 1).scale(&q(-1)));
        }
    }

    #[test]
    fn delta_of_polynomial_vanishes() {
        let d = delta(&ff(2), 6);
        assert!(d.mode_matrix(Window::symmetric(6)).unwrap().is_empty());
    }

    #[test]
    fn delta_modes_sit_on_the_antidiagonal() {
        let w = Window::symmetric(6);
        let canonical = BiDistribution::delta().mode_matrix(w).unwrap();
        assert_eq!(canonical.len(), 12);
        for ((m, n), v) in &canonical {
            assert_eq!(*n, -m - 1);
            assert_eq!(*v, q(1));
        }
        let twisted = delta(&KElement::pole(0, 1), 7).mode_matrix(w).unwrap();
        assert_eq!(canonical, twisted);
    }

    #[test]
    fn trace_of_delta_reproduces_function() {
        let f = KElement::pole(1, 1);
        let d = BiDistribution::delta().multiply_function_slot(&f, Slot::First);
        let w = Window::symmetric(6);
        let traced = d.trace_slot(Slot::First, w).unwrap();
        let expected = Distribution::from_kernel(Kernel::from_function(&f), w);
        assert!(traced.same_modes(&expected));
    }

    #[test]
    fn pairing_with_kernel() {
        let d = Distribution::<Q>::from_kernel(Kernel::from_function(&KElement::pole(-1, 1)), Window::symmetric(8));
        for n in 0..8u32 {
            let sign = if n % 2 == 0 { q(1) } else { q(-1) };
            assert_eq!(d.pair(&ff(n as i64)).unwrap(), sign * factorial(n));
        }
        assert_eq!(d.pair(&KElement::zero()).unwrap(), q(0));
    }

    #[test]
    fn windowed_pairing_refuses_infinite_expansions() {
        let modes = (0..=4).map(|n| (n, q(n))).collect();
        let d = Distribution::from_modes(modes, Window::new(0, 4));
        assert_eq!(d.pair(&ff(3)).unwrap(), q(3));
        assert!(matches!(d.pair(&KElement::pole(-1, 1)), Err(Error::Untraceable(_))));
    }

    #[test]
    fn matrix_slot_outside_window_is_untraceable() {
        let w = Window::symmetric(3);
        let m = BiDistribution::delta().mode_matrix(w).unwrap();
        let d = BiDistribution::from_matrix(m, w);
        let shifted = d.apply_hopf_slot(&HopfElement::t_pow(-1), Slot::First);
        let err = shifted.pair(&KElement::pole(0, 1), &KElement::one()).unwrap_err();
        assert!(err.to_string().contains("slot t1"), "{err}");
    }

    #[test]
    fn extraction_of_delta_itself() {
        let ansatz = Ansatz::<Q>::new(vec![Arc::new(FunctionCurrent::trace())], Window::new(-2, 2), 1);
        // Polynomial test functions of degree <= hi separate at most hi+1 ops.
        let ex = rationality_extract(&BiDistribution::delta(), &ansatz, Window::symmetric(10)).unwrap();
        assert!(ex.unique, "{:?}", ex);
        assert_eq!(ex.terms.len(), 1);
        assert_eq!(ex.terms[0].op, HopfElement::one());
        assert_eq!(ex.terms[0].coeff, KElement::one());
    }
}
