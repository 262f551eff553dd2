//! Verification suites: each runs a family of exact identity checks and
//! returns a [`Report`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::affine::{self, LieElement};
use crate::conformal::ConformalAlgebra;
use crate::distributions::{
    self, Ansatz, BiDistribution, Current, DeltaTerm, Distribution, FunctionCurrent, Kernel, Slot, Window,
};
use crate::error::{Error, Result};
use crate::hopf::HopfElement;
use crate::ktau::{self, KElement};
use crate::linalg;
use crate::random::{self, Shape};
use crate::scalar::{factorial, fmt_q, q, Q};
use crate::vacuum::{Field, Mode, NopSign, State, SumPolicy, VacuumModule};

pub const SUITES: &[&str] = &[
    "delta",
    "duality",
    "hopf",
    "jacobi",
    "currents",
    "vacuum",
    "homomorphism",
    "all",
];

pub const COMMUTATOR_SIGN: &str = "T^-1-1";
pub const COMMUTATOR_SIGN_ALT: &str = "T-1";
pub const TV_ORIENTATION: &str = "p -> T^-1 p";
pub const TV_ORIENTATION_ALT: &str = "p -> T p";

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub window: i64,
    pub seed: u64,
    pub depth: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            window: 8,
            seed: 0,
            depth: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: String,
    pub lhs: String,
    pub rhs: String,
}

/// Empirically resolved conventions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub commutator_sign: Option<String>,
    pub nop_sign: Option<String>,
    #[serde(rename = "Tv_orientation")]
    pub tv_orientation: Option<String>,
}

impl Verdicts {
    fn merge(&mut self, other: &Verdicts, failed: &mut Vec<Failure>) {
        let slots = [
            ("commutator_sign", &mut self.commutator_sign, &other.commutator_sign),
            ("nop_sign", &mut self.nop_sign, &other.nop_sign),
            ("Tv_orientation", &mut self.tv_orientation, &other.tv_orientation),
        ];
        for (name, mine, theirs) in slots {
            match (mine.as_ref(), theirs) {
                (_, None) => {}
                (None, Some(v)) => *mine = Some(v.clone()),
                (Some(a), Some(b)) if a != b => failed.push(Failure {
                    case: format!("verdict {name} agrees across suites"),
                    lhs: a.clone(),
                    rhs: b.clone(),
                }),
                _ => {}
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub window: i64,
    pub cases: usize,
    pub passed: usize,
    pub failed: Vec<Failure>,
    pub verdicts: Verdicts,
    /// Non-gating observations: experimental checks, untraceable cases.
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: &str, cfg: &Config) -> Self {
        Self {
            schema: 1,
            suite: suite.to_string(),
            seed: cfg.seed,
            window: cfg.window,
            cases: 0,
            passed: 0,
            failed: Vec::new(),
            verdicts: Verdicts::default(),
            notes: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    fn check(&mut self, case: impl Into<String>, ok: bool, lhs: impl fmt::Display, rhs: impl fmt::Display) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(Failure {
                case: case.into(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }

    fn eq<T: PartialEq + fmt::Display>(&mut self, case: impl Into<String>, lhs: &T, rhs: &T) {
        self.check(case, lhs == rhs, lhs, rhs);
    }

    fn holds(&mut self, case: impl Into<String>, ok: bool) {
        self.check(case, ok, ok, true);
    }

    /// Records `r`, turning an error into a failed case.
    fn attempt<T: PartialEq + fmt::Display>(&mut self, case: impl Into<String>, r: Result<(T, T)>) {
        match r {
            Ok((l, r)) => self.eq(case, &l, &r),
            Err(e) => self.check(case, false, format!("error: {e}"), "a value"),
        }
    }

    fn absorb(&mut self, other: Report) {
        self.cases += other.cases;
        self.passed += other.passed;
        self.failed.extend(other.failed.into_iter().map(|f| Failure {
            case: format!("{}: {}", other.suite, f.case),
            ..f
        }));
        self.verdicts.merge(&other.verdicts, &mut self.failed);
        self.notes
            .extend(other.notes.into_iter().map(|n| format!("{}: {n}", other.suite)));
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "suite {}: {} cases, {} passed, {} failed (window {}, seed {})\n",
            self.suite,
            self.cases,
            self.passed,
            self.failed.len(),
            self.window,
            self.seed
        );
        for f in &self.failed {
            out.push_str(&format!("FAIL {}\n  lhs: {}\n  rhs: {}\n", f.case, f.lhs, f.rhs));
        }
        let v = &self.verdicts;
        for (k, x) in [
            ("commutator_sign", &v.commutator_sign),
            ("nop_sign", &v.nop_sign),
            ("Tv_orientation", &v.tv_orientation),
        ] {
            if let Some(x) = x {
                out.push_str(&format!("verdict {k}: {x}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Runs a suite by name.
pub fn run(suite: &str, cfg: &Config) -> Result<Report> {
    match suite {
        "duality" => Ok(duality(cfg)),
        "hopf" => hopf(cfg),
        "delta" => delta(cfg),
        "jacobi" => jacobi(cfg),
        "currents" => currents(cfg),
        "vacuum" => vacuum(cfg),
        "homomorphism" => homomorphism(cfg),
        "all" => {
            let mut all = Report::new("all", cfg);
            for s in SUITES.iter().filter(|s| **s != "all") {
                all.absorb(run(s, cfg)?);
            }
            Ok(all)
        }
        other => Err(Error::Usage(format!(
            "unknown suite {other:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn ff(n: i64) -> KElement {
    KElement::falling_factorial(n)
}

/// `Tr(t(m) t(-n-1)) = [m = n]` for `0 <= m, n <= window`.
pub fn duality(cfg: &Config) -> Report {
    let mut r = Report::new("duality", cfg);
    for m in 0..=cfg.window {
        for n in 0..=cfg.window {
            let lhs = (&ff(m) * &ff(-n - 1)).trace();
            let rhs = if m == n { Q::one() } else { Q::zero() };
            r.check(
                format!("Tr(t({m}) t({}))", -n - 1),
                lhs == rhs,
                fmt_q(&lhs),
                fmt_q(&rhs),
            );
        }
    }
    r
}

/// Difference system, `alpha`, `Dtau = log(1 + Delta)` and Hopf axioms.
pub fn hopf(cfg: &Config) -> Result<Report> {
    let mut r = Report::new("hopf", cfg);
    let delta = HopfElement::difference();
    for l in 1..=10i64 {
        r.eq(
            format!("Delta t({l}) = {l} t({})", l - 1),
            &delta.act(&ff(l)),
            &ff(l - 1).scale(&q(l)),
        );
        r.attempt(format!("t({l}) at 0"), ff(l).eval_at(0).map(|v| (v, Q::zero())));
        let (unique, sol) = difference_solution(l as usize);
        r.holds(format!("difference system for t({l}) has a unique solution"), unique);
        r.eq(format!("difference system solution for t({l})"), &sol, &ff(l));
    }
    for n in -5..=5 {
        for m in 0..=4 {
            let h = HopfElement::monomial(n, m);
            r.attempt(
                format!("alpha_inv(alpha({h}))"),
                HopfElement::alpha_inv(&h.alpha()).map(|x| (x, h.clone())),
            );
            r.check(
                format!("Tr(alpha({h})) = counit"),
                h.alpha().trace() == h.counit(),
                fmt_q(&h.alpha().trace()),
                fmt_q(&h.counit()),
            );
        }
    }
    for d in 0..=8u32 {
        let mono = KElement::monomial(d);
        r.eq(
            format!("log(1 + Delta) t^{d} = d/dt t^{d}"),
            &HopfElement::log_series(d.max(1)).act(&mono),
            &mono.derivative(),
        );
        r.holds(
            format!("log series terminates on t^{d}"),
            delta.pow(d + 1).act(&mono).is_zero(),
        );
    }
    let mut rng = random::rng(cfg.seed);
    for i in 0..50 {
        let h = random::hopf_element(&mut rng, 3, 2);
        let g = random::hopf_element(&mut rng, 3, 2);
        let cop = h.coproduct();
        r.eq(
            format!("#{i} coassociativity of {h}"),
            &Triple(cop.expand(true)),
            &Triple(cop.expand(false)),
        );
        let eps = HopfElement::scalar(h.counit());
        r.eq(
            format!("#{i} m(S x id)Delta {h}"),
            &cop.contract(|a| a.antipode(), |b| b.clone()),
            &eps,
        );
        r.eq(
            format!("#{i} m(id x S)Delta {h}"),
            &cop.contract(|a| a.clone(), |b| b.antipode()),
            &eps,
        );
        r.eq(
            format!("#{i} (eps x id)Delta {h}"),
            &cop.contract(|a| HopfElement::scalar(a.counit()), |b| b.clone()),
            &h,
        );
        r.eq(
            format!("#{i} S(hg) = S(g)S(h)"),
            &(&h * &g).antipode(),
            &(&g.antipode() * &h.antipode()),
        );
        r.eq(format!("#{i} S(S(h)) = h"), &h.antipode().antipode(), &h);
        let f = random::kelement(&mut rng, Shape::default());
        r.eq(format!("#{i} (hg).f = h.(g.f)"), &(&h * &g).act(&f), &h.act(&g.act(&f)));
    }
    Ok(r)
}

type Index = (i64, u32);

struct Triple(BTreeMap<(Index, Index, Index), Q>);

impl PartialEq for Triple {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} terms", self.0.len())
    }
}

/// Solves `Delta p = l t(l-1)`, `p(0) = 0` over polynomials of degree `l`.
fn difference_solution(l: usize) -> (bool, KElement) {
    let rhs = ff(l as i64 - 1).scale(&q(l as i64));
    let delta = HopfElement::difference();
    let images: Vec<KElement> = (0..=l).map(|j| delta.act(&KElement::monomial(j as u32))).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for row in 0..=l {
        a.push(images.iter().map(|img| coeff(img, row)).collect());
        b.push(vec![coeff(&rhs, row)]);
    }
    a.push((0..=l).map(|j| if j == 0 { Q::one() } else { Q::zero() }).collect());
    b.push(vec![Q::zero()]);
    let sol = linalg::solve(&a, &b);
    let p = KElement::from_poly(sol.x.iter().map(|x| x[0].clone()).collect());
    (sol.is_exact() && sol.is_unique(), p)
}

fn coeff(f: &KElement, i: usize) -> Q {
    f.poly().get(i).cloned().unwrap_or_else(Q::zero)
}

struct Terms(BTreeMap<(String, String), KElement>);

impl PartialEq for Terms {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}

impl fmt::Display for Terms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|((g, op), c)| format!("{g}*({c})*{op}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

fn same_matrix(a: &BiDistribution<Q>, b: &BiDistribution<Q>, w: Window) -> Result<bool> {
    Ok(a.mode_matrix(w)? == b.mode_matrix(w)?)
}

fn trace_current() -> Vec<Arc<dyn Current<Q>>> {
    vec![Arc::new(FunctionCurrent::trace())]
}

/// Operators `T^i` for `|i| <= 2` and `Dtau`.
fn bullet_ansatz(functions: Vec<KElement>) -> Ansatz<Q> {
    let mut a = Ansatz::new(trace_current(), Window::symmetric(2), 0).with_functions(functions);
    a.ops.push((0, 1));
    a
}

/// Support of random finite delta expansions.
pub const EXPANSION_POLES: (i64, i64) = (-3, 3);
pub const EXPANSION_ORDER: u32 = 2;

/// A window on which the full expansion ansatz is separated: polynomial
/// test functions of degree `<= hi` separate at most `hi + 1` operators.
pub fn expansion_window() -> Window {
    let (lo, hi) = EXPANSION_POLES;
    let ops = (hi - lo + 1) * (EXPANSION_ORDER as i64 + 1);
    Window::new(-1, ops - 1)
}

/// Kernel remainder, the delta bullets, delta of polynomials, and the
/// extraction round trip.
pub fn delta(cfg: &Config) -> Result<Report> {
    let mut r = Report::new("delta", cfg);
    let w = Window::symmetric(cfg.window);
    {
        use crate::bivariate::{BiPoly, BiRational};
        let diff = &BiPoly::in_first(&KElement::tau()) - &BiPoly::in_second(&KElement::tau());
        let kernel = BiRational::new(BiPoly::one(), diff);
        for m in 0..=8 {
            let (partial, rem) = ktau::geometric_kernel_expand(m);
            r.holds(
                format!("1/(t1-t2) remainder identity, M = {m}"),
                &partial + &rem == kernel,
            );
        }
    }
    let canonical = BiDistribution::delta();
    r.holds(
        format!("delta(1/t) twisted = canonical on {w}"),
        same_matrix(
            &distributions::delta(&KElement::pole(0, 1), cfg.window as u32 + 1),
            &canonical,
            w,
        )?,
    );
    for l in 0..=4 {
        r.holds(
            format!("delta(t({l})) = 0 on {w}"),
            distributions::delta(&ff(l), 8).mode_matrix(w)?.is_empty(),
        );
    }
    let hs = [
        HopfElement::t_pow(1),
        HopfElement::t_pow(-1),
        HopfElement::t_pow(2),
        HopfElement::t_pow(-2),
        HopfElement::dtau(),
    ];
    let fs = [ff(1), ff(2), KElement::pole(0, 1), KElement::pole(1, 1)];
    let ew = Window::symmetric(cfg.window.max(8));
    for h in &hs {
        let lhs = canonical.apply_hopf_slot(h, Slot::First);
        let rhs = canonical.apply_hopf_slot(&h.antipode(), Slot::Second);
        r.holds(
            format!("{h}_1 delta = S({h})_2 delta on {w}"),
            same_matrix(&lhs, &rhs, w)?,
        );
        let ex = distributions::rationality_extract(&lhs, &bullet_ansatz(vec![KElement::one()]), ew)?;
        let want = h
            .antipode()
            .terms()
            .iter()
            .map(|(&(k, m), c)| {
                (
                    ("1".to_string(), HopfElement::monomial(k, m).to_string()),
                    KElement::constant(c.clone()),
                )
            })
            .collect();
        r.holds(format!("{h}_1 delta extracts to S({h})_2 delta on {ew}"), ex.unique);
        r.eq(
            format!("{h}_1 delta extracted terms"),
            &Terms(ex.as_map()),
            &Terms(want),
        );
    }
    for f in &fs {
        let lhs = canonical.multiply_function_slot(f, Slot::First);
        let rhs = canonical.multiply_function_slot(f, Slot::Second);
        r.holds(
            format!("({f})(t1) delta = ({f})(t2) delta on {w}"),
            same_matrix(&lhs, &rhs, w)?,
        );
        let traced = lhs.trace_slot(Slot::First, w)?;
        let expected = Distribution::from_kernel(Kernel::from_function(f), w);
        r.holds(
            format!("Tr_t1(({f})(t1) delta) = {f} on {w}"),
            traced.same_modes(&expected),
        );
        let killed = lhs
            .multiply_function_slot(&KElement::tau(), Slot::First)
            .mode_matrix(w)?
            == lhs
                .multiply_function_slot(&KElement::tau(), Slot::Second)
                .mode_matrix(w)?;
        r.holds(format!("(t1 - t2) ({f})(t1) delta = 0 on {w}"), killed);
        let ex = distributions::rationality_extract(&lhs, &bullet_ansatz(vec![f.clone()]), ew)?;
        let want = [(("1".to_string(), "1".to_string()), f.clone())].into();
        r.holds(
            format!("({f})(t1) delta extracts to ({f})(t2) delta on {ew}"),
            ex.unique,
        );
        r.eq(
            format!("({f})(t1) delta extracted terms"),
            &Terms(ex.as_map()),
            &Terms(want),
        );
    }
    let (lo, hi) = EXPANSION_POLES;
    let ansatz = Ansatz::new(trace_current(), Window::new(lo, hi), EXPANSION_ORDER);
    let xw = expansion_window();
    let mut rng = random::rng(cfg.seed);
    let mut samples = Vec::new();
    let mut expected = Vec::new();
    for _ in 0..50 {
        let mut terms = Vec::new();
        let mut want: BTreeMap<(String, String), KElement> = BTreeMap::new();
        for _ in 0..rng.gen_range(1..=4) {
            let op = HopfElement::monomial(rng.gen_range(lo..=hi), rng.gen_range(0..=EXPANSION_ORDER));
            let c = KElement::constant(random::scalar(&mut rng));
            let slot = want
                .entry(("1".to_string(), op.to_string()))
                .or_insert_with(KElement::zero);
            *slot = &*slot + &c;
            terms.push(DeltaTerm::new(trace_current().remove(0), c, op));
        }
        want.retain(|_, c| !c.is_zero());
        samples.push(BiDistribution::from_terms(terms));
        expected.push(want);
    }
    let extracted = distributions::rationality_extract_many(&samples, &ansatz, xw)?;
    for (i, (ex, want)) in extracted.into_iter().zip(&expected).enumerate() {
        let case = format!("#{i} extract(expand(X)) = X on {xw}");
        match ex {
            Ok(ex) if ex.unique => r.eq(case, &Terms(ex.as_map()), &Terms(want.clone())),
            Ok(_) => r.check(case, false, "not unique", "unique"),
            Err(e) => r.check(case, false, e, "zero residual"),
        }
    }
    Ok(r)
}

fn absorb_property(r: &mut Report, rep: affine::PropertyReport) {
    let failed = rep.failures.len();
    for (lhs, rhs) in rep.failures {
        r.check(rep.name.clone(), false, lhs, rhs);
    }
    r.cases += rep.cases - failed;
    r.passed += rep.cases - failed;
}

/// Lie axioms, triangular closure, covariance rules and the quotient.
pub fn jacobi(cfg: &Config) -> Result<Report> {
    let mut r = Report::new("jacobi", cfg);
    let alg = ConformalAlgebra::toda();
    let mut rng = random::rng(cfg.seed);
    absorb_property(&mut r, affine::check_antisymmetry(&alg, &mut rng, 100)?);
    absorb_property(&mut r, affine::check_jacobi(&alg, &mut rng, 100)?);
    let (hol, sing) = affine::check_triangular(&alg, &mut rng, 50)?;
    absorb_property(&mut r, hol);
    absorb_property(&mut r, sing);
    absorb_property(&mut r, affine::check_extension_rules(&alg, &mut rng, 50)?);

    let quot = alg.quotient_lie()?;
    for c in &quot.checks {
        if c.gating {
            r.check(format!("quotient: {}", c.name), c.passed, &c.detail, "holds");
        } else if !c.passed {
            r.notes.push(format!(
                "quotient display {} fails (informational): {}",
                c.name, c.detail
            ));
        }
    }
    r.eq("quotient dimension", &quot.dimension(), &2);
    r.holds("quotient is abelian", quot.is_abelian());
    Ok(r)
}

fn commutator_candidate(op: HopfElement, window: Window) -> Result<distributions::ModeMatrix<LieElement>> {
    let c = crate::conformal::ConformalElement::generator("C");
    let cur: Arc<dyn Current<LieElement>> = Arc::new(affine::GeneratorCurrent::new(c));
    let terms = op
        .terms()
        .iter()
        .map(|(&(k, m), v)| {
            let h = HopfElement::from_terms([((k, m), v.clone())]);
            DeltaTerm::new(cur.clone(), KElement::one(), h)
        })
        .collect();
    BiDistribution::from_terms(terms).mode_matrix(window)
}

/// `[B(t1), C(t2)]` on the window and both candidate closed forms.
pub fn currents(cfg: &Config) -> Result<Report> {
    let mut r = Report::new("currents", cfg);
    let alg = ConformalAlgebra::toda();
    let w = Window::symmetric(6);
    let b = crate::conformal::ConformalElement::generator("B");
    let c = crate::conformal::ConformalElement::generator("C");
    let cc = match affine::current_commutator(&alg, &b, &c, w) {
        Ok(cc) => cc,
        Err(e) => {
            r.check("[B(t1), C(t2)] pairwise vs closed form", false, e, "agreement");
            return Ok(r);
        }
    };
    r.holds("[B(t1), C(t2)] pairwise vs closed form", true);

    let one = HopfElement::one();
    let inv = &HopfElement::t_pow(-1) - &one;
    let alt = &HopfElement::t_pow(1) - &one;
    let primary = commutator_candidate(inv, w)? == cc.modes;
    let alternative = commutator_candidate(alt, w)? == cc.modes;
    r.holds("modes equal C(t2)(T2^-1 - 1)delta", primary);
    r.notes.push(format!(
        "alternative C(t2)(T2 - 1)delta {} the mode matrix",
        if alternative { "matches" } else { "does not match" }
    ));
    if primary != alternative {
        r.verdicts.commutator_sign = Some(if primary { COMMUTATOR_SIGN } else { COMMUTATOR_SIGN_ALT }.into());
    } else {
        r.check("commutator sign is decided", false, primary, !alternative);
    }

    let ext = affine::extract_current_commutator(&alg, &cc, 2, 1)?;
    r.holds("extraction is unique", ext.unique);
    let expected: BTreeMap<(String, String), KElement> = [
        (("C".to_string(), HopfElement::t_pow(-1).to_string()), KElement::one()),
        (
            ("C".to_string(), HopfElement::one().to_string()),
            KElement::constant(-Q::one()),
        ),
    ]
    .into_iter()
    .collect();
    r.eq("extracted expansion", &Terms(ext.as_map()), &Terms(expected));
    Ok(r)
}
fn creator(v: &VacuumModule, g: &str, n: i64, order: u32) -> Result<State> {
    v.act(&Mode::new(g, n, order).element(), &State::vacuum())
}

fn single_mode_states(
    v: &VacuumModule,
    poles: std::ops::RangeInclusive<i64>,
    orders: std::ops::RangeInclusive<u32>,
) -> Result<Vec<State>> {
    let mut out = Vec::new();
    for g in v.algebra().generators() {
        for n in poles.clone() {
            for m in orders.clone() {
                out.push(creator(v, g, n, m)?);
            }
        }
    }
    Ok(out)
}

fn expected_expansion(op: i64) -> BTreeMap<(String, String), KElement> {
    [
        (("C".to_string(), HopfElement::t_pow(op).to_string()), KElement::one()),
        (
            ("C".to_string(), HopfElement::one().to_string()),
            KElement::constant(-Q::one()),
        ),
    ]
    .into_iter()
    .collect()
}

/// Representation, vacuum axioms, covariance, rationality, compatibility
/// and singular-part certificates on the Toda vacuum module.
pub fn vacuum(cfg: &Config) -> Result<Report> {
    let mut r = Report::new("vacuum", cfg);
    let v = VacuumModule::toda().with_depth(cfg.depth);
    let alg = v.algebra().clone();
    let mut rng = random::rng(cfg.seed);
    let vac = State::vacuum();

    let shape = Shape {
        pole_radius: 3,
        max_order: 2,
        max_degree: 2,
        max_poles: 2,
    };
    for i in 0..100 {
        let x = affine::random_element(&mut rng, &alg, shape);
        let y = affine::random_element(&mut rng, &alg, shape);
        let depth = rng.gen_range(0..=2);
        let elems: Vec<LieElement> = (0..depth)
            .map(|_| affine::random_element(&mut rng, &alg, shape.singular()))
            .collect();
        let s = v.state_from_elements(&elems)?;
        let lhs = v.act(&affine::bracket(&alg, &x, &y)?, &s)?;
        let rhs = v.act(&x, &v.act(&y, &s)?)?.sub(&v.act(&y, &v.act(&x, &s)?)?);
        r.eq(format!("representation #{i}: [{x}, {y}] on {s}"), &lhs, &rhs);
    }

    let gens = single_mode_states(&v, 0..=0, 1..=1)?;
    let mut targets = vec![vac.clone()];
    targets.extend(gens.iter().cloned());
    for s in &targets {
        for n in -3..=3 {
            let g = ff(n);
            r.eq(
                format!("Y(vac) on {s} at t({n})"),
                &v.vertex_eval(&vac, &g, s)?,
                &s.scale(&g.trace()),
            );
        }
    }
    for a in &gens {
        r.eq(
            format!("constant term of Y({a})vac"),
            &v.vertex_eval(a, &ff(-1), &vac)?,
            a,
        );
        for n in 0..=cfg.window {
            r.eq(
                format!("Y({a})vac at t({n})"),
                &v.vertex_eval(a, &ff(n), &vac)?,
                &State::zero(),
            );
        }
    }

    // T_V <Y(a), G> T_V^-1 = <Y(T a), G> = <Y(a), T^-1 G> for h = T^{+-1}
    for a in &gens {
        for k in [-1i64, 1] {
            let h = HopfElement::t_pow(k);
            let ta = v.module_action(&h, a)?;
            for s in &targets {
                for n in -3..=3 {
                    let g = ff(n);
                    let lhs = v.module_action(&h, &v.vertex_eval(a, &g, s)?)?;
                    let rhs = v.vertex_eval(&ta, &g, &v.module_action(&h, s)?)?;
                    r.eq(format!("ad-covariance T^{k}, a={a}, s={s}, t({n})"), &lhs, &rhs);
                    let shifted = v.vertex_eval(a, &g.shift(-k), s)?;
                    r.eq(
                        format!("Y(T^{k} a) = Y(a)(T^{} .), a={a}, s={s}, t({n})", -k),
                        &v.vertex_eval(&ta, &g, s)?,
                        &shifted,
                    );
                }
            }
        }
    }

    let mut sign_ok = [true, true];
    for s in [vac.clone(), creator(&v, "C", 0, 1)?] {
        let ext = v.extract_commutator("B", "C", &s, Window::symmetric(6), 2)?;
        r.holds(format!("[Y(B), Y(C)] on {s}: extraction unique"), ext.unique);
        let got = ext.as_map();
        sign_ok[0] &= got == expected_expansion(-1);
        sign_ok[1] &= got == expected_expansion(1);
        r.eq(
            format!("[Y(B), Y(C)] on {s}"),
            &Terms(got),
            &Terms(expected_expansion(-1)),
        );
    }
    match sign_ok {
        [true, false] => r.verdicts.commutator_sign = Some(COMMUTATOR_SIGN.into()),
        [false, true] => r.verdicts.commutator_sign = Some(COMMUTATOR_SIGN_ALT.into()),
        _ => r.check("module commutator sign is decided", false, sign_ok[0], sign_ok[1]),
    }

    skew_symmetry(&v, &gens, &mut r)?;

    let mut orient = [true, true];
    for f in single_mode_states(&v, -3..=3, 1..=2)? {
        for k in 0..=3 {
            let h = HopfElement::t_pow(k);
            let hv = v.h_v(&h, &f)?;
            let label = v.module_action(&h, &f)?;
            orient[0] &= label == hv;
            orient[1] &= v.module_action(&HopfElement::t_pow(-k), &f)? == hv;
            r.eq(format!("compatibility T^{k} . {f}"), &label, &hv);
        }
    }
    match orient {
        [true, false] => r.verdicts.tv_orientation = Some(TV_ORIENTATION.into()),
        [false, true] => r.verdicts.tv_orientation = Some(TV_ORIENTATION_ALT.into()),
        _ => r.check("T_V orientation is decided", false, orient[0], orient[1]),
    }

    let poles = Window::new(-3, 3);
    let sources = single_mode_states(&v, 0..=0, 1..=2)?;
    let mut states = vec![vac.clone()];
    states.extend(single_mode_states(&v, -1..=1, 1..=1)?);
    for a in &sources {
        for s in &states {
            let case = format!("certificate Y({a}) {s}");
            match v.singular_part_certificate(a, s, poles, 2, 8) {
                Ok(cert) => {
                    let field = v.field(a)?;
                    let mut ok = true;
                    for n in 0..=cfg.window.max(8) {
                        ok &= cert.mode(n) == v.apply(&field, &ff(n), s)?;
                    }
                    r.check(case, ok, &cert, "matches every mode");
                }
                Err(e) => r.check(case, false, format!("error: {e}"), "a certificate"),
            }
        }
    }
    let b = creator(&v, "B", 0, 1)?;
    let c = creator(&v, "C", 0, 1)?;
    let cert = v.singular_part_certificate(&b, &c, poles, 2, 8)?;
    let want = &KElement::pole(-1, 1) - &KElement::pole(0, 1);
    let got = cert.phi.values().next().cloned().unwrap_or_else(KElement::zero);
    r.check(
        "certificate of B[1/t]vac on C[1/t]vac",
        cert.phi.len() == 1 && got == want && cert.phi.keys().next() == c.terms().keys().next(),
        &cert,
        format!("C[1/t]vac (x) ({want})"),
    );
    Ok(r)
}

/// `<Y(a), G> b` against `sum_k Delta_V^k <Y(b), (t(k)/k! G)(-t)> a`;
/// reported as a note only.
fn skew_symmetry(v: &VacuumModule, gens: &[State], r: &mut Report) -> Result<()> {
    const N: u32 = 8;
    let delta = HopfElement::difference();
    let (mut total, mut agree) = (0, 0);
    for a in gens {
        for b in gens {
            for n in 0..=4 {
                let g = ff(n);
                let lhs = v.vertex_eval(a, &g, b)?;
                let mut rhs = State::zero();
                for k in 0..N {
                    let w = (&ff(k as i64) * &g).scale(&(Q::one() / factorial(k))).reflect();
                    let inner = v.vertex_eval(b, &w, a)?;
                    rhs = rhs.add(&v.module_action(&delta.pow(k), &inner)?);
                }
                total += 1;
                agree += usize::from(lhs == rhs);
            }
        }
    }
    r.notes.push(format!(
        "skew-symmetry (experimental, truncated at order {N}): {agree} of {total} cases agree"
    ));
    Ok(())
}
/// `Y(f_{F} g)` against `Y(f)_{F} Y(g)` mode by mode, under both normal
/// ordering signs.
pub fn homomorphism(cfg: &Config) -> Result<Report> {
    let mut r = Report::new("homomorphism", cfg);
    let policy = SumPolicy {
        max_terms: 16,
        zero_tail: 6,
    };
    let plus = VacuumModule::toda()
        .with_sign(NopSign::Plus)
        .with_depth(cfg.depth)
        .with_policy(policy);
    let minus = plus.clone().with_sign(NopSign::Minus);
    let gens = single_mode_states(&plus, 0..=0, 1..=1)?;
    let window = Window::symmetric(cfg.window.min(6));
    // negative modes on excited targets need unbounded mode sums
    let targets = [
        (State::vacuum(), window),
        (creator(&plus, "B", 0, 1)?, Window::new(0, window.hi)),
    ];
    let funcs = [
        KElement::pole(0, 1),
        KElement::pole(1, 1),
        KElement::pole(-1, 1),
        &KElement::pole(1, 1) - &KElement::pole(-1, 1),
        &KElement::pole(0, 1) + &KElement::pole(1, 1).scale(&q(2)),
    ];

    let mut failures: [Vec<Failure>; 2] = [Vec::new(), Vec::new()];
    let mut skipped: Vec<String> = Vec::new();
    let mut untraceable = |case: &str, e: Error| -> Result<()> {
        match e {
            Error::Untraceable(e) => {
                skipped.push(format!("{case}: {e}"));
                Ok(())
            }
            e => Err(e),
        }
    };
    for f in &gens {
        for g in &gens {
            for func in &funcs {
                let state = plus.vertex_eval(f, func, g)?;
                let product = Field::product(plus.field(f)?, func.clone(), plus.field(g)?);
                let fields = [plus.field(&state)?, minus.field(&state)?];
                for (s, w) in &targets {
                    for m in w.iter() {
                        let case = format!("Y({f}_{{{func}}}{g}) at t({m}) on {s}");
                        let rhs = match plus.apply(&product, &ff(m), s) {
                            Ok(x) => x,
                            Err(e) => {
                                untraceable(&case, e)?;
                                continue;
                            }
                        };
                        r.cases += 1;
                        for (i, (v, field)) in [&plus, &minus].into_iter().zip(&fields).enumerate() {
                            match v.apply(field, &ff(m), s) {
                                Ok(lhs) if lhs == rhs => {}
                                Ok(lhs) => failures[i].push(Failure {
                                    case: case.clone(),
                                    lhs: lhs.to_string(),
                                    rhs: rhs.to_string(),
                                }),
                                Err(e) => untraceable(&format!("{case} ({})", v.sign), e)?,
                            }
                        }
                    }
                }
            }
        }
    }
    if let Some(first) = skipped.first() {
        r.notes.push(format!(
            "{} evaluations untraceable within the mode-sum budget and skipped, e.g. {first}",
            skipped.len()
        ));
    }
    let [fp, fm] = failures;
    r.notes.push(format!(
        "sign plus: {} failures; sign minus: {} failures",
        fp.len(),
        fm.len()
    ));
    let (verdict, chosen) = match (fp.is_empty(), fm.is_empty()) {
        (true, false) => (Some(NopSign::Plus), fp),
        (false, true) => (Some(NopSign::Minus), fm),
        _ => (None, fp),
    };
    match verdict {
        Some(sign) => {
            r.verdicts.nop_sign = Some(sign.to_string());
            r.passed = r.cases;
        }
        None => {
            r.passed = r.cases - chosen.len();
            r.failed = chosen;
            r.check(
                "exactly one normal ordering sign passes",
                false,
                "ambiguous",
                "one sign",
            );
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timed(name: &str) -> Report {
        let t = std::time::Instant::now();
        let r = run(name, &Config::default()).unwrap();
        eprintln!("{name}: {:?}", t.elapsed());
        r
    }

    #[test]
    fn small_suites_pass() {
        for s in ["duality", "hopf", "delta"] {
            let r = timed(s);
            assert!(r.ok(), "{}", r.render_text());
        }
        assert_eq!(
            run(
                "duality",
                &Config {
                    window: 12,
                    ..Config::default()
                }
            )
            .unwrap()
            .cases,
            169
        );
        assert!(matches!(run("nosuch", &Config::default()), Err(Error::Usage(_))));
    }

    #[test]
    fn algebra_suites_pass() {
        for s in ["jacobi", "currents", "vacuum", "homomorphism"] {
            let r = timed(s);
            assert!(r.ok(), "{}", r.render_text());
        }
        let r = run("currents", &Config::default()).unwrap();
        assert_eq!(r.verdicts.commutator_sign.as_deref(), Some(COMMUTATOR_SIGN));
    }
}
