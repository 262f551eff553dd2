//! Acceptance criteria 1 to 12. Each criterion prints one PASS or FAIL line;
//! engine results are compared against oracles computed here from first
//! principles, and the full suite run goes through the `htv` binary.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;

use rand::Rng;
use serde_json::Value as Json;

use htv_core::affine::{self, LieElement};
use htv_core::distributions::{self, Ansatz, BiDistribution, Current, DeltaTerm, FunctionCurrent, Kernel, Slot};
use htv_core::random;
use htv_core::scalar::{factorial, q, q2};
use htv_core::suites::{self, Config};
use htv_core::{
    ConformalAlgebra, ConformalElement, Distribution, HopfElement, KElement, Mode, State, VacuumModule, Window, Q,
};

type Check = Result<(), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ff(n: i64) -> KElement {
    KElement::falling_factorial(n)
}

/// `x (x-1) ... (x-n+1)` on rationals.
fn falling(x: &Q, n: i64) -> Q {
    (0..n).fold(q(1), |acc, i| acc * (x - q(i)))
}

/// Rank by Gaussian elimination.
fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != q(0)) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] != q(0) {
                let f = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn terms_map(ex: &distributions::Extraction) -> BTreeMap<(String, String), KElement> {
    ex.as_map()
}

/// Duality: `Tr(t(m) t(-n-1)) = delta_mn`, the trace being the residue sum.
fn criterion_1() -> Check {
    let mut cases = 0;
    for m in 0..=12 {
        for n in 0..=12 {
            let engine = (&ff(m) * &ff(-n - 1)).trace();
            // t(-n-1) = 1 / (t (t-1) ... (t-n)); residue at t = k
            let oracle = (0..=n).fold(q(0), |acc, k| {
                let den = (0..=n).filter(|&i| i != k).fold(q(1), |d, i| d * q(k - i));
                acc + falling(&q(k), m) / den
            });
            ensure(engine == oracle, || {
                format!("m={m} n={n}: engine {engine}, residues {oracle}")
            })?;
            ensure(oracle == q(i64::from(m == n)), || {
                format!("m={m} n={n}: residues give {oracle}")
            })?;
            cases += 1;
        }
    }
    let report = suites::run(
        "duality",
        &Config {
            window: 12,
            ..Config::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(report.ok() && report.cases == 169 && cases == 169, || {
        report.render_text()
    })
}

/// Difference system with Stirling-number coefficients, and injectivity of
/// `p -> (Delta p, p(0))` on polynomials of degree <= l.
fn criterion_2() -> Check {
    // unsigned Stirling numbers of the first kind with signs: t(l) = sum s(l,k) t^k
    let mut stirling: Vec<Vec<i64>> = vec![vec![1]];
    for l in 0..10usize {
        let prev = &stirling[l];
        let mut next = vec![0; l + 2];
        for (k, c) in prev.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= l as i64 * c;
        }
        stirling.push(next);
    }
    for l in 1..=10i64 {
        let t_l = ff(l);
        let want: Vec<Q> = stirling[l as usize].iter().map(|&c| q(c)).collect();
        ensure(t_l.poly() == want.as_slice(), || format!("t({l}) = {t_l}"))?;
        let diff = &t_l.shift(1) - &t_l;
        ensure(diff == ff(l - 1).scale(&q(l)), || format!("Delta t({l}) = {diff}"))?;
        ensure(t_l.eval_at(0).ok() == Some(q(0)), || format!("t({l})(0) != 0"))?;
        // columns t^j, rows: coefficients of Delta t^j, then the value at 0
        let size = l as usize + 1;
        let mut cols = Vec::with_capacity(size);
        for j in 0..size {
            let mono = KElement::monomial(j as u32);
            let d = &mono.shift(1) - &mono;
            let mut col = vec![q(0); size + 1];
            for (i, c) in d.poly().iter().enumerate() {
                col[i] = c.clone();
            }
            col[size] = mono.eval_at(0).map_err(|e| e.to_string())?;
            cols.push(col);
        }
        let rows: Vec<Vec<Q>> = (0..=size)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        ensure(rank(rows) == size, || format!("degree {l}: solution not unique"))?;
    }
    let report = suites::run("hopf", &Config::default()).map_err(|e| e.to_string())?;
    ensure(report.ok(), || report.render_text())
}

/// `alpha(T^n Dtau^m) = m!/(t-n)^(m+1)`, round trip, and `Tr o alpha = counit`.
fn criterion_3() -> Check {
    for n in -5..=5 {
        for m in 0..=4u32 {
            let h = HopfElement::monomial(n, m);
            let a = h.alpha();
            let oracle = KElement::pole(n, m + 1).scale(&factorial(m));
            ensure(a == oracle, || format!("alpha({h}) = {a}, expected {oracle}"))?;
            let back = HopfElement::alpha_inv(&a).map_err(|e| e.to_string())?;
            ensure(back == h, || format!("alpha_inv(alpha({h})) = {back}"))?;
            let counit = q(i64::from(m == 0));
            ensure(a.trace() == counit && h.counit() == counit, || {
                format!("Tr(alpha({h})) = {}", a.trace())
            })?;
        }
    }
    Ok(())
}

/// `sum_k (-1)^(k+1) Delta^k / k` is `d/dt` on `t^d`, `d <= 8`, and terminates.
fn criterion_4() -> Check {
    let delta = HopfElement::difference();
    for d in 0..=8u32 {
        let f = KElement::monomial(d);
        let mut coeffs = vec![q(0); d.max(1) as usize];
        if d > 0 {
            coeffs[d as usize - 1] = q(i64::from(d));
        }
        let oracle = KElement::from_poly(coeffs);
        let mut series = KElement::zero();
        let mut power = f.clone();
        for k in 1..=d + 1 {
            power = delta.act(&power);
            let sign = if k % 2 == 1 { q(1) } else { q(-1) };
            series = &series + &power.scale(&(sign / q(i64::from(k))));
        }
        ensure(delta.act(&power).is_zero(), || format!("Delta^{} t^{d} != 0", d + 2))?;
        ensure(series == oracle, || format!("log(1+Delta) t^{d} = {series}"))?;
        ensure(HopfElement::log_series(d + 1).act(&f) == oracle, || {
            format!("log_series on t^{d}")
        })?;
        ensure(HopfElement::dtau().act(&f) == oracle, || format!("Dtau on t^{d}"))?;
    }
    Ok(())
}

/// Remainder identity at rational sample points, the delta mode matrix, and
/// the delta bullets.
fn criterion_5(all: &Json) -> Check {
    let points = [
        (q2(7, 2), q2(-4, 3)),
        (q2(11, 5), q2(3, 7)),
        (q2(-13, 4), q2(5, 2)),
        (q(19), q2(-1, 9)),
    ];
    for m in 0..=8 {
        for (x, y) in &points {
            let kernel = q(1) / (x - y);
            let partial = (0..m).fold(q(0), |acc, n| acc + falling(y, n) / falling(x, n + 1));
            let rem = falling(y, m) / (falling(x, m) * (x - y));
            ensure(&kernel - &partial == rem, || format!("remainder M={m} at ({x}, {y})"))?;
        }
    }
    let w = Window::symmetric(8);
    let canonical = BiDistribution::delta().mode_matrix(w).map_err(|e| e.to_string())?;
    for a in w.iter() {
        for b in w.iter() {
            let want = q(i64::from(a + b == -1));
            let got = canonical.get(&(a, b)).cloned().unwrap_or_else(|| q(0));
            ensure(got == want, || format!("delta mode ({a}, {b}) = {got}"))?;
        }
    }
    let traced = BiDistribution::delta()
        .multiply_function_slot(&KElement::pole(1, 1), Slot::First)
        .trace_slot(Slot::First, w)
        .map_err(|e| e.to_string())?;
    let want = Distribution::from_kernel(Kernel::from_function(&KElement::pole(1, 1)), w);
    ensure(traced.same_modes(&want), || "Tr_t1(delta/(t1-1)) != 1/(t2-1)".into())?;
    suite_ok(all, "delta")
}

/// Round trip on 50 random finite delta expansions.
fn criterion_6() -> Check {
    let mut rng = random::rng(6);
    let trace: Arc<dyn Current<Q>> = Arc::new(FunctionCurrent::trace());
    let ansatz = Ansatz::new(vec![trace.clone()], Window::new(-3, 3), 2);
    let mut samples = Vec::new();
    let mut wanted = Vec::new();
    for _ in 0..50 {
        let mut want: BTreeMap<(String, String), KElement> = BTreeMap::new();
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=5) {
            let op = HopfElement::monomial(rng.gen_range(-3..=3), rng.gen_range(0..=2));
            let c = q2(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            let e = want.entry(("1".into(), op.to_string())).or_insert_with(KElement::zero);
            *e = &*e + &KElement::constant(c.clone());
            terms.push(DeltaTerm::new(trace.clone(), KElement::constant(c), op));
        }
        want.retain(|_, c| !c.is_zero());
        samples.push(BiDistribution::from_terms(terms));
        wanted.push(want);
    }
    let window = suites::expansion_window();
    let got = distributions::rationality_extract_many(&samples, &ansatz, window).map_err(|e| e.to_string())?;
    for (i, (ex, want)) in got.into_iter().zip(&wanted).enumerate() {
        let ex = ex.map_err(|e| format!("sample {i}: {e}"))?;
        ensure(ex.unique, || format!("sample {i}: not unique on {window}"))?;
        ensure(&terms_map(&ex) == want, || {
            format!("sample {i}: {:?} vs {want:?}", terms_map(&ex))
        })?;
    }
    Ok(())
}

/// Lie axioms, triangular closure, and `[B_p, C_q] = C_{(p(t-1) - p) q}`.
fn criterion_7() -> Check {
    let alg = ConformalAlgebra::toda();
    let mut rng = random::rng(7);
    let anti = affine::check_antisymmetry(&alg, &mut rng, 100).map_err(|e| e.to_string())?;
    let jac = affine::check_jacobi(&alg, &mut rng, 100).map_err(|e| e.to_string())?;
    let (hol, sing) = affine::check_triangular(&alg, &mut rng, 50).map_err(|e| e.to_string())?;
    for rep in [&anti, &jac, &hol, &sing] {
        ensure(rep.passed(), || format!("{}: {:?}", rep.name, rep.failures.first()))?;
    }
    ensure(
        anti.cases >= 100 && jac.cases >= 100 && hol.cases >= 50 && sing.cases >= 50,
        || "too few cases".into(),
    )?;
    for _ in 0..50 {
        let p = random::kelement(&mut rng, random::Shape::default());
        let g = random::kelement(&mut rng, random::Shape::default());
        let got = affine::bracket(
            &alg,
            &LieElement::basic("B", p.clone()),
            &LieElement::basic("C", g.clone()),
        )
        .map_err(|e| e.to_string())?;
        let oracle = LieElement::basic("C", &(&p.shift(-1) - &p) * &g);
        ensure(got == oracle, || format!("[B[{p}], C[{g}]] = {got}, expected {oracle}"))?;
    }
    Ok(())
}

/// `[B(t1), C(t2)]` on `|m|, |n| <= 6`: pairwise brackets, the closed form,
/// extraction, and rejection of the `T2 - 1` alternative.
fn criterion_8(all: &Json) -> Check {
    let alg = ConformalAlgebra::toda();
    let w = Window::symmetric(6);
    let b = ConformalElement::generator("B");
    let c = ConformalElement::generator("C");
    let cc = affine::current_commutator(&alg, &b, &c, w).map_err(|e| e.to_string())?;
    let closed = |k: i64| -> Result<BTreeMap<(i64, i64), LieElement>, String> {
        let cur: Arc<dyn Current<LieElement>> = Arc::new(affine::GeneratorCurrent::new(c.clone()));
        BiDistribution::from_terms(vec![
            DeltaTerm::new(cur.clone(), KElement::one(), HopfElement::t_pow(k)),
            DeltaTerm::new(cur, KElement::constant(q(-1)), HopfElement::one()),
        ])
        .mode_matrix(w)
        .map_err(|e| e.to_string())
    };
    for m in w.iter() {
        for n in w.iter() {
            let oracle = LieElement::basic("C", &(&ff(m).shift(-1) - &ff(m)) * &ff(n));
            let got = cc.modes.get(&(m, n)).cloned().unwrap_or_else(LieElement::zero);
            ensure(got == oracle, || format!("mode ({m}, {n}) = {got}, expected {oracle}"))?;
        }
    }
    ensure(closed(-1)? == cc.modes, || {
        "modes differ from C(t2)(T2^-1 - 1)delta".into()
    })?;
    ensure(closed(1)? != cc.modes, || "the T2 - 1 alternative also matches".into())?;
    let ex = affine::extract_current_commutator(&alg, &cc, 2, 1).map_err(|e| e.to_string())?;
    let want: BTreeMap<(String, String), KElement> = [
        (("C".into(), "T^-1".into()), KElement::one()),
        (("C".into(), "1".into()), KElement::constant(q(-1))),
    ]
    .into();
    ensure(ex.unique && terms_map(&ex) == want, || {
        format!("extracted {:?}", terms_map(&ex))
    })?;
    ensure(all["verdicts"]["commutator_sign"] == "T^-1-1", || {
        format!("verdict {}", all["verdicts"])
    })
}

/// The quotient by `m_T`: all displays hold, 2-dimensional, abelian.
fn criterion_9() -> Check {
    let quot = ConformalAlgebra::toda().quotient_lie().map_err(|e| e.to_string())?;
    let names: std::collections::BTreeSet<&str> = quot.checks.iter().map(|c| c.name.as_str()).collect();
    ensure(names.len() >= 4, || format!("displays checked: {names:?}"))?;
    for c in &quot.checks {
        ensure(c.passed, || format!("{}: {}", c.name, c.detail))?;
    }
    ensure(quot.dimension() == 2 && quot.is_abelian(), || quot.to_string())
}

/// Vacuum module suite, and the singular part of `Y(B[1/t]vac) C[1/t]vac`:
/// mode `n` is `[B[t(n)], C[1/t]]vac`, i.e. `(-1)^n n! C[1/t]vac` for `n >= 1`
/// and `0` for `n = 0`.
fn criterion_10(all: &Json) -> Check {
    let v = VacuumModule::toda();
    let mk = |g: &str| v.act(&Mode::new(g, 0, 1).element(), &State::vacuum()).unwrap();
    let (b, c) = (mk("B"), mk("C"));
    let cert = v
        .singular_part_certificate(&b, &c, Window::new(-3, 3), 2, 8)
        .map_err(|e| e.to_string())?;
    for n in 0..=8 {
        let oracle = if n == 0 {
            q(0)
        } else {
            let sign = if n % 2 == 0 { q(1) } else { q(-1) };
            sign * factorial(n as u32)
        };
        let mode = v.vertex_eval(&b, &ff(n), &c).map_err(|e| e.to_string())?;
        ensure(mode == c.scale(&oracle), || format!("mode {n}: {mode}"))?;
        ensure(cert.mode(n) == mode, || {
            format!("certificate mode {n}: {}", cert.mode(n))
        })?;
    }
    let phi = &KElement::pole(-1, 1) - &KElement::pole(0, 1);
    ensure(cert.phi.len() == 1 && cert.phi.values().all(|f| *f == phi), || {
        cert.to_string()
    })?;
    suite_ok(all, "vacuum")?;
    ensure(all["verdicts"]["Tv_orientation"] == "p -> T^-1 p", || {
        format!("verdict {}", all["verdicts"])
    })
}

/// Exactly one normal ordering sign satisfies the homomorphism property.
fn criterion_11(all: &Json) -> Check {
    suite_ok(all, "homomorphism")?;
    ensure(all["verdicts"]["nop_sign"] == "plus", || {
        format!("verdict {}", all["verdicts"])
    })?;
    let note = all["notes"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(Json::as_str)
        .find(|n| n.contains("sign plus:"))
        .ok_or("no sign summary")?;
    ensure(
        note.contains("sign plus: 0 failures") && !note.contains("sign minus: 0 failures"),
        || note.to_string(),
    )
}

/// Golden transcripts and `verify all`.
fn criterion_12(all_code: i32, cache: &Json) -> Check {
    let n = common::golden_files().len();
    ensure(n >= 30, || format!("only {n} transcripts"))?;
    let bad = common::golden_mismatches(false);
    ensure(bad.is_empty(), || bad.join("\n"))?;
    ensure(all_code == 0, || format!("verify all exited {all_code}"))?;
    ensure(
        cache["nop_sign"] == "plus" && cache["commutator_sign"] == "T^-1-1" && cache["Tv_orientation"] == "p -> T^-1 p",
        || format!("verdicts.json: {cache}"),
    )
}

fn suite_ok(all: &Json, suite: &str) -> Check {
    let prefix = format!("{suite}: ");
    let failed: Vec<&Json> = all["failed"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|f| f["case"].as_str().is_some_and(|c| c.starts_with(&prefix)))
        .collect();
    ensure(failed.is_empty(), || format!("{failed:?}"))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let args: Vec<String> = ["verify", "all", "--seed", "42", "--format", "json"]
        .map(String::from)
        .into();
    let out = common::htv(&args, dir.path());
    let all: Json = serde_json::from_slice(&out.stdout).unwrap_or(Json::Null);
    let code = out.status.code().unwrap_or(-1);
    let cache: Json = std::fs::read_to_string(dir.path().join("verdicts.json"))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or(Json::Null);

    let criteria: Vec<Criterion> = vec![
        ("duality", Box::new(criterion_1)),
        ("difference system", Box::new(criterion_2)),
        ("alpha isomorphism", Box::new(criterion_3)),
        ("Dtau = log(1 + Delta)", Box::new(criterion_4)),
        ("delta kernel", Box::new(|| criterion_5(&all))),
        ("finite-expansion extraction", Box::new(criterion_6)),
        ("Toda Lie algebra", Box::new(criterion_7)),
        ("current commutator", Box::new(|| criterion_8(&all))),
        ("quotient Lie algebra", Box::new(criterion_9)),
        ("vacuum module", Box::new(|| criterion_10(&all))),
        ("homomorphism property", Box::new(|| criterion_11(&all))),
        (
            "CLI transcripts and verify all",
            Box::new(|| criterion_12(code, &cache)),
        ),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(()) => println!("criterion {:>2} {name}: PASS", i + 1),
            Err(e) => {
                failures += 1;
                println!("criterion {:>2} {name}: FAIL\n{e}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
