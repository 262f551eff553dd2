use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use htv_core::affine;
use htv_core::distributions::{self, Ansatz, BiDistribution, Current, DeltaTerm, FunctionCurrent};
use htv_core::expr::{self, Env, Value};
use htv_core::suites;
use htv_core::{ConformalAlgebra, Error, HopfElement, KElement, NopSign, VacuumModule, Window};

const VERDICTS_FILE: &str = "verdicts.json";

#[derive(Parser)]
#[command(name = "htv", version, about = "Exact calculus for H_T-vertex algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Mode window `|n| <= N`.
    #[arg(long, global = true, env = "HTV_WINDOW", default_value_t = 8)]
    window: i64,

    /// Largest PBW depth for which fields are built.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Print `τ` instead of `t`.
    #[arg(long, global = true)]
    unicode: bool,

    /// Algebra file replacing the Toda algebra.
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Lie bracket of two elements of the affinization.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// The conformal product `f_{delta_n} g`.
    Cproduct {
        f: String,
        #[arg(allow_hyphen_values = true)]
        n: i64,
        g: String,
    },
    /// Act on a state with a Lie or Hopf element.
    Apply {
        #[arg(allow_hyphen_values = true)]
        x: String,
        state: String,
    },
    /// `<Y(a), F> s`.
    Vertex {
        a: String,
        #[arg(allow_hyphen_values = true)]
        func: String,
        state: String,
    },
    /// Rational singular part of `Y(a) s`.
    Certify {
        a: String,
        state: String,
        /// Pole range `lo..hi`.
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true, value_parser = parse_range)]
        poles: Window,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Mode matrix of `delta(p)`.
    Delta {
        #[arg(allow_hyphen_values = true)]
        p: String,
        /// Truncation order; defaults to the window.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Expand `f(t2) h_2 delta` into modes and extract it back.
    Extract {
        #[arg(allow_hyphen_values = true)]
        h: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        coeff: String,
        /// Ansatz operators `T^i` for `|i| <= R`.
        #[arg(long, default_value_t = 2)]
        poles: i64,
        /// Ansatz `Dtau` order.
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// `[f(t1), g(t2)]` as modes and as a delta expansion.
    CurrentComm { f: String, g: String },
    /// Run a verification suite.
    Verify { suite: String },
    /// Validate an algebra file and show its quotient Lie algebra.
    LoadAlgebra { file: PathBuf },
}

fn parse_range(s: &str) -> Result<Window, String> {
    let (lo, hi) = s.split_once("..").ok_or("expected `lo..hi`")?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(Window::new(lo, hi))
}

/// An error together with the input it came from.
struct Failure {
    error: Error,
    input: Option<String>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Self { error, input: None }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self.error {
            Error::AxiomViolation(_)
            | Error::ExtractionFailed { .. }
            | Error::Untraceable(_)
            | Error::DepthExceeded { .. } => 1,
            _ => 2,
        }
    }

    fn report(&self) -> String {
        let mut out = format!("error: {}\n", self.error);
        if let (Error::Syntax { line, column, .. }, Some(input)) = (&self.error, &self.input) {
            if let Some(text) = input.lines().nth(line - 1) {
                out.push_str(&format!("  | {text}\n  | {}^\n", " ".repeat(column - 1)));
            }
        }
        out
    }
}

type Outcome = Result<Output, Failure>;

struct Output {
    text: String,
    json: Json,
    code: u8,
}

impl Output {
    fn ok(text: impl Into<String>, json: Json) -> Self {
        Self {
            text: text.into(),
            json,
            code: 0,
        }
    }
}

struct Ctx {
    env: Env,
    window: i64,
    seed: u64,
    depth: usize,
    unicode: bool,
}

impl Ctx {
    fn value(&self, text: &str) -> Result<Value, Failure> {
        expr::evaluate(text, &self.env).map_err(|error| Failure {
            error,
            input: Some(text.to_string()),
        })
    }

    fn module(&self) -> Result<&VacuumModule, Failure> {
        Ok(self.env.module()?)
    }

    fn algebra(&self) -> Result<&ConformalAlgebra, Failure> {
        Ok(self.module()?.algebra())
    }

    fn show(&self, v: &Value) -> String {
        v.render(self.unicode)
    }

    fn value_output(&self, command: &str, v: Value) -> Output {
        let text = self.show(&v);
        let json = json!({ "schema": 1, "command": command, "kind": v.kind(), "value": text });
        Output::ok(text, json)
    }
}

fn read_verdicts(dir: &Path) -> Json {
    fs::read_to_string(dir.join(VERDICTS_FILE))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .filter(Json::is_object)
        .unwrap_or_else(|| json!({ "schema": 1 }))
}

fn cached_sign() -> NopSign {
    match read_verdicts(Path::new(".")).get("nop_sign").and_then(Json::as_str) {
        Some("minus") => NopSign::Minus,
        _ => NopSign::Plus,
    }
}

fn write_verdicts(report: &suites::Report) -> std::io::Result<()> {
    let mut cache = read_verdicts(Path::new("."));
    let v = serde_json::to_value(&report.verdicts).expect("verdicts serialize");
    let mut changed = false;
    for (k, x) in v.as_object().into_iter().flatten() {
        if !x.is_null() && cache.get(k) != Some(x) {
            cache[k] = x.clone();
            changed = true;
        }
    }
    if changed {
        fs::write(VERDICTS_FILE, serde_json::to_string_pretty(&cache)? + "\n")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let alg = match &cli.algebra {
        Some(path) => ConformalAlgebra::from_json(&fs::read_to_string(path).map_err(Error::from)?)?,
        None => ConformalAlgebra::toda(),
    };
    let module = VacuumModule::new(alg).with_depth(cli.depth).with_sign(cached_sign());
    let ctx = Ctx {
        env: Env::new(module),
        window: cli.window,
        seed: cli.seed,
        depth: cli.depth,
        unicode: cli.unicode,
    };
    if ctx.window < 0 {
        return Err(Error::Usage("the window must be non-negative".into()).into());
    }
    match cli.command {
        Command::Eval { expr } => Ok(ctx.value_output("eval", ctx.value(&expr)?)),
        Command::Bracket { x, y } => {
            let x = ctx.value(&x)?.into_lie()?;
            let y = ctx.value(&y)?.into_lie()?;
            let b = affine::bracket(ctx.algebra()?, &x, &y)?;
            Ok(ctx.value_output("bracket", Value::Lie(b)))
        }
        Command::Cproduct { f, n, g } => {
            let f = ctx.value(&f)?.into_element()?;
            let g = ctx.value(&g)?.into_element()?;
            let p = ctx.algebra()?.product_delta(&f, n, &g)?;
            Ok(ctx.value_output("cproduct", Value::Element(p)))
        }
        Command::Apply { x, state } => {
            let s = ctx.value(&state)?.into_state()?;
            let m = ctx.module()?;
            let out = match ctx.value(&x)? {
                Value::Hopf(h) => m.module_action(&h, &s)?,
                v => m.act(&v.into_lie()?, &s)?,
            };
            Ok(ctx.value_output("apply", Value::State(out)))
        }
        Command::Vertex { a, func, state } => {
            let a = ctx.value(&a)?.into_state()?;
            let func = ctx.value(&func)?.into_func()?;
            let s = ctx.value(&state)?.into_state()?;
            let out = ctx.module()?.vertex_eval(&a, &func, &s)?;
            Ok(ctx.value_output("vertex", Value::State(out)))
        }
        Command::Certify { a, state, poles, order } => certify(&ctx, &a, &state, poles, order),
        Command::Delta { p, order } => delta(&ctx, &p, order),
        Command::Extract { h, coeff, poles, order } => extract(&ctx, &h, &coeff, poles, order),
        Command::CurrentComm { f, g } => {
            let f = ctx.value(&f)?.into_element()?;
            let g = ctx.value(&g)?.into_element()?;
            let cc = affine::current_commutator(ctx.algebra()?, &f, &g, Window::symmetric(ctx.window))?;
            let mut json = cc.to_json();
            json["schema"] = json!(1);
            Ok(Output::ok(cc.render(), json))
        }
        Command::Verify { suite } => verify(&ctx, &suite),
        Command::LoadAlgebra { file } => load_algebra(&file),
    }
}

fn certify(ctx: &Ctx, a: &str, state: &str, poles: Window, order: u32) -> Outcome {
    let a = ctx.value(a)?.into_state()?;
    let s = ctx.value(state)?.into_state()?;
    let cert = ctx
        .module()?
        .singular_part_certificate(&a, &s, poles, order, ctx.window)?;
    let phi: Vec<Json> = cert
        .phi
        .iter()
        .map(|(m, f)| json!({ "state": m.render(false), "function": f.to_string() }))
        .collect();
    let text = if cert.is_zero() {
        "0".to_string()
    } else {
        cert.phi
            .iter()
            .map(|(m, f)| format!("{} (x) ({})", m.render(ctx.unicode), f.render(ctx.unicode)))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let json = json!({
        "schema": 1,
        "command": "certify",
        "poles": [poles.lo, poles.hi],
        "order": order,
        "phi": phi,
        "checked_modes": cert.checked,
    });
    Ok(Output::ok(text, json))
}

fn delta(ctx: &Ctx, p: &str, order: Option<u32>) -> Outcome {
    let p = ctx.value(p)?.into_func()?;
    let order = order.unwrap_or(ctx.window as u32);
    let w = Window::symmetric(ctx.window);
    let modes = distributions::delta(&p, order).mode_matrix(w)?;
    let text = if modes.is_empty() {
        "0".to_string()
    } else {
        modes
            .iter()
            .map(|((m, n), c)| format!("({m}, {n}): {}", htv_core::scalar::fmt_q(c)))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let json = json!({
        "schema": 1,
        "command": "delta",
        "p": p.to_string(),
        "order": order,
        "window": [w.lo, w.hi],
        "modes": modes
            .iter()
            .map(|((m, n), c)| json!({ "m": m, "n": n, "value": htv_core::scalar::fmt_q(c) }))
            .collect::<Vec<_>>(),
    });
    Ok(Output::ok(text, json))
}

fn extract(ctx: &Ctx, h: &str, coeff: &str, radius: i64, order: u32) -> Outcome {
    let h: HopfElement = ctx.value(h)?.into_hopf()?;
    let coeff = ctx.value(coeff)?.into_func()?;
    if radius < 0 {
        return Err(Error::Usage("--poles must be non-negative".into()).into());
    }
    let current: Arc<dyn Current<htv_core::Q>> = Arc::new(FunctionCurrent::trace());
    let terms = h
        .terms()
        .iter()
        .map(|(&key, c)| {
            let op = HopfElement::from_terms([(key, c.clone())]);
            DeltaTerm::new(current.clone(), coeff.clone(), op)
        })
        .collect();
    let d = BiDistribution::from_terms(terms);
    let mut functions = vec![KElement::one()];
    if coeff.as_constant().is_none() {
        functions.push(coeff.clone());
    }
    let nf = functions.len() as i64;
    let ansatz = Ansatz::new(vec![current], Window::symmetric(radius), order).with_functions(functions);
    // polynomial test functions of degree <= hi separate hi + 1 operators
    let ops = (2 * radius + 1) * (i64::from(order) + 1) * nf;
    let window = Window::new(-ctx.window.max(1), ctx.window.max(ops));
    let forward = BiDistribution::from_matrix(d.mode_matrix(window)?, window);
    let ext = distributions::rationality_extract(&forward, &ansatz, window)?;
    let text = if ext.terms.is_empty() {
        "0".to_string()
    } else {
        ext.terms
            .iter()
            .map(|t| format!("({})(t2) ({})_2 delta", t.coeff.render(ctx.unicode), t.op))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let text = if ext.unique {
        text
    } else {
        format!("{text}\n(not unique on window {window})")
    };
    let json = json!({
        "schema": 1,
        "command": "extract",
        "window": [window.lo, window.hi],
        "unique": ext.unique,
        "terms": ext.to_json(),
    });
    Ok(Output::ok(text, json))
}

fn verify(ctx: &Ctx, suite: &str) -> Outcome {
    let suite = suite.strip_suffix("-suite").unwrap_or(suite);
    let cfg = suites::Config {
        window: ctx.window,
        seed: ctx.seed,
        depth: ctx.depth,
    };
    let report = suites::run(suite, &cfg)?;
    write_verdicts(&report).map_err(Error::from)?;
    Ok(Output {
        text: report.render_text().trim_end().to_string(),
        json: report.to_json(),
        code: if report.ok() { 0 } else { 1 },
    })
}

fn load_algebra(file: &Path) -> Outcome {
    let alg = ConformalAlgebra::from_json(&fs::read_to_string(file).map_err(Error::from)?)?;
    let quot = alg.quotient_lie()?;
    let text = format!(
        "generators: {}\nentries: {}\nquotient {}",
        alg.generators().join(", "),
        alg.entry_count(),
        quot.to_string().trim_end()
    );
    let brackets: serde_json::Map<String, Json> = quot
        .generators
        .iter()
        .flat_map(|a| quot.generators.iter().map(move |b| (a, b)))
        .map(|(a, b)| (format!("{a}|{b}"), json!(quot.render_bracket(a, b))))
        .collect();
    let json = json!({
        "schema": 1,
        "command": "load-algebra",
        "algebra": alg.to_json(),
        "quotient": {
            "dimension": quot.dimension(),
            "abelian": quot.is_abelian(),
            "brackets": brackets,
            "checks": quot.checks.iter().map(|c| json!({
                "name": c.name, "gating": c.gating, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        },
    });
    Ok(Output::ok(text, json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Text => println!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json")),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprint!("{}", f.report());
            ExitCode::from(f.exit_code())
        }
    }
}
