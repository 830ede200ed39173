//! Command-line workflows over a TOML context file: Weil checks, enumeration of
//! Weil polynomials, isogeny-class solving and L-isomorphism classification.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use drinfeld::base_ring::parse_apoly;
use drinfeld::charpoly::CharPoly;
use drinfeld::context::ClassContext;
use drinfeld::invariants::{enumerate_basic_j_indices, group_classes, profile, InvariantError};
use drinfeld::local::LocalFactorization;
use drinfeld::skew::{solve_unchecked, DrinfeldModule};
use drinfeld::weil::{check_weil_fast, enumerate_weil, WeilError, WeilReport};
use drinfeld::{APoly, FFElem, FieldSpec, Poly};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid context: {0}")]
    Context(String),
    #[error("invalid polynomial: {0}")]
    Poly(String),
    #[error("--workers must be at least 1")]
    Workers,
    #[error("{0}")]
    Undecided(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "drinfeld",
    version,
    about = "Weil polynomials and isomorphism classes of Drinfeld modules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether M is a Weil polynomial for the context.
    Check(PolyArgs),
    /// List every Weil polynomial of the context.
    Enumerate(CommonArgs),
    /// All Drinfeld modules whose Frobenius is a root of M.
    Solve(PolyArgs),
    /// The modules of `solve`, grouped into L-isomorphism classes.
    Classify(PolyArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PolyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub poly: PathBuf,
}

/// An element given by its coordinates over F_p, or an integer of the prime field.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum ElemSpec {
    Int(i64),
    Coords(Vec<u64>),
}

/// A polynomial in T, as text over the prime field or as ascending coefficients.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum APolySpec {
    Text(String),
    Coeffs(Vec<ElemSpec>),
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub p: u64,
    /// Defining polynomials of F_q over F_p, one per level, ascending and monic.
    #[serde(default)]
    pub fq_tower: Vec<Vec<ElemSpec>>,
    pub pv: APolySpec,
    pub m: usize,
    /// Defining polynomials of L over F_q.
    #[serde(default)]
    pub l_tower: Vec<Vec<ElemSpec>>,
    pub gamma_t: ElemSpec,
    pub r: usize,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    context: ContextSpec,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct PolyFile {
    /// a_0 .. a_r1 ascending in x; the last one must be 1.
    coeffs: Vec<APolySpec>,
}

fn elem(field: &Arc<FieldSpec>, e: &ElemSpec) -> Result<FFElem, String> {
    match e {
        ElemSpec::Int(n) => Ok(field.from_int(*n)),
        ElemSpec::Coords(c) => field.from_coords(c).map_err(|e| e.to_string()),
    }
}

fn apoly(fq: &Arc<FieldSpec>, a: &APolySpec) -> Result<APoly, String> {
    match a {
        APolySpec::Text(s) => parse_apoly(fq, s, 'T').ok_or_else(|| format!("cannot parse {s:?}")),
        APolySpec::Coeffs(c) => Ok(Poly::new(
            fq.clone(),
            c.iter().map(|e| elem(fq, e)).collect::<Result<_, _>>()?,
        )),
    }
}

fn extend_tower(
    mut field: Arc<FieldSpec>,
    tower: &[Vec<ElemSpec>],
) -> Result<Arc<FieldSpec>, String> {
    for level in tower {
        let coeffs = level
            .iter()
            .map(|e| elem(&field, e))
            .collect::<Result<Vec<_>, _>>()?;
        field = field.extend(&coeffs).map_err(|e| e.to_string())?;
    }
    Ok(field)
}

pub fn build_context(spec: &ContextSpec) -> Result<ClassContext, CliError> {
    let err = CliError::Context;
    let fp = FieldSpec::prime(spec.p).map_err(|e| err(e.to_string()))?;
    let fq = extend_tower(fp, &spec.fq_tower).map_err(err)?;
    let l = extend_tower(fq.clone(), &spec.l_tower).map_err(err)?;
    let pv = apoly(&fq, &spec.pv).map_err(err)?;
    let gamma_t = elem(&l, &spec.gamma_t).map_err(err)?;
    ClassContext::new(fq, pv, spec.m, l, gamma_t, spec.r).map_err(|e| err(e.to_string()))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_context(path: &Path) -> Result<ClassContext, CliError> {
    let cfg: ConfigFile = toml::from_str(&read(path)?).map_err(|source| CliError::Toml {
        path: path.to_path_buf(),
        source,
    })?;
    build_context(&cfg.context)
}

pub fn parse_poly(text: &str, fq: &Arc<FieldSpec>) -> Result<CharPoly, CliError> {
    let f: PolyFile = toml::from_str(text).map_err(|e| CliError::Poly(e.to_string()))?;
    let coeffs = f
        .coeffs
        .iter()
        .map(|a| apoly(fq, a))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::Poly)?;
    CharPoly::new(coeffs).map_err(|e| CliError::Poly(e.to_string()))
}

pub fn load_poly(path: &Path, fq: &Arc<FieldSpec>) -> Result<CharPoly, CliError> {
    parse_poly(&read(path)?, fq)
}

fn elem_json(field: &FieldSpec, a: FFElem) -> Value {
    json!(field.coords(a))
}

fn apoly_json(a: &APoly) -> Value {
    Value::Array(
        a.coeffs()
            .iter()
            .map(|&c| elem_json(a.field(), c))
            .collect(),
    )
}

fn charpoly_json(m: &CharPoly) -> Value {
    Value::Array(m.coeffs().iter().map(apoly_json).collect())
}

fn local_json(fac: &LocalFactorization) -> Value {
    json!({
        "precision": fac.precision,
        "exact": fac.exact,
        "factors": fac.factors.iter().map(|f| json!({
            "degree": f.degree(),
            "e": f.e,
            "f": f.f,
            "residual": f.residual.coeffs().iter().map(|&c| elem_json(&fac.field, c)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn report_json(m: &CharPoly, ctx: &ClassContext, rep: &WeilReport) -> Value {
    let shape = rep.shape.as_ref().map(|s| {
        json!({
            "r1": s.r1,
            "r2": s.r2,
            "mu": elem_json(&ctx.fq, s.mu),
            "s": s.s,
            "n": s.n,
            "h": s.h,
            "inseparable": s.inseparable.map(|(d, e)| json!({"deg_f": d, "e": e})),
        })
    });
    let ev = &rep.evidence;
    let residue = ev
        .finite
        .as_ref()
        .map_or_else(|| ctx.residue().field().clone(), |f| f.field.clone());
    json!({
        "kind": "weil-report",
        "poly": m.to_string(),
        "coeffs": charpoly_json(m),
        "verdict": rep.verdict,
        "fast_path": rep.fast_path.tag(),
        "failure": rep.failure.map(|f| f.as_str()),
        "shape_error": rep.shape_error.as_ref().map(|e| e.to_string()),
        "shape": shape,
        "evidence": {
            "infinity": ev.infinity.as_ref().map(local_json),
            "finite": ev.finite.as_ref().map(local_json),
            "resultants": ev.resultants.iter().map(|&c| elem_json(&residue, c)).collect::<Vec<_>>(),
            "standard_form": ev.standard_form.as_ref().map(|s| json!({
                "c1": apoly_json(&s.c1),
                "c2": apoly_json(&s.c2),
                "shift": apoly_json(&s.shift),
                "scale": apoly_json(&s.scale),
            })),
        },
    })
}

pub fn module_json(phi: &DrinfeldModule) -> Value {
    let l = phi.field();
    json!({
        "kind": "module",
        "gamma_t": elem_json(l, phi.gamma_t()),
        "g": phi.coefficients().iter().map(|&c| elem_json(l, c)).collect::<Vec<_>>(),
    })
}

/// Records produced by a command together with its exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub records: Vec<Value>,
}

impl Outcome {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

/// The Weil report of M, with reducible input reported as a false verdict.
pub fn weil_report(m: &CharPoly, ctx: &ClassContext) -> Result<WeilReport, CliError> {
    match check_weil_fast(m, ctx) {
        Ok(rep) => Ok(rep),
        Err(WeilError::NotIrreducibleOverK) => Ok(WeilReport::reducible()),
        Err(e) => Err(CliError::Undecided(e.to_string())),
    }
}

pub fn cmd_check(ctx: &ClassContext, m: &CharPoly) -> Result<Outcome, CliError> {
    let rep = weil_report(m, ctx)?;
    let code = if rep.verdict { EXIT_TRUE } else { EXIT_FALSE };
    Ok(Outcome {
        code,
        records: vec![report_json(m, ctx, &rep)],
    })
}

pub fn cmd_enumerate(ctx: &ClassContext) -> Result<Outcome, CliError> {
    let en = enumerate_weil(ctx);
    let mut records: Vec<Value> = en
        .records
        .iter()
        .map(|(m, rep)| {
            let s = rep.shape.as_ref();
            json!({
                "kind": "weil-polynomial",
                "poly": m.to_string(),
                "coeffs": charpoly_json(m),
                "r1": s.map(|s| s.r1),
                "r2": s.map(|s| s.r2),
                "mu": s.map(|s| elem_json(&ctx.fq, s.mu)),
                "fast_path": rep.fast_path.tag(),
            })
        })
        .collect();
    let st = &en.stats;
    records.push(json!({
        "kind": "summary",
        "candidates": st.candidates,
        "per_template": st.per_template.iter().map(|&(r1, r2, n)| json!({"r1": r1, "r2": r2, "candidates": n})).collect::<Vec<_>>(),
        "reducible": st.reducible,
        "accepted": st.accepted,
        "shortcut_skips": st.shortcut_skips,
    }));
    Ok(Outcome {
        code: EXIT_TRUE,
        records,
    })
}

fn solve_checked(
    ctx: &ClassContext,
    m: &CharPoly,
) -> Result<Result<Vec<DrinfeldModule>, Outcome>, CliError> {
    let rep = weil_report(m, ctx)?;
    if !rep.verdict {
        return Ok(Err(Outcome {
            code: EXIT_FALSE,
            records: vec![report_json(m, ctx, &rep)],
        }));
    }
    Ok(Ok(solve_unchecked(m, ctx)))
}

pub fn cmd_solve(ctx: &ClassContext, m: &CharPoly) -> Result<Outcome, CliError> {
    let gamma = match solve_checked(ctx, m)? {
        Ok(g) => g,
        Err(out) => return Ok(out),
    };
    let mut records: Vec<Value> = gamma.iter().map(module_json).collect();
    records.push(json!({"kind": "summary", "poly": m.to_string(), "modules": gamma.len()}));
    Ok(Outcome {
        code: if gamma.is_empty() {
            EXIT_FALSE
        } else {
            EXIT_TRUE
        },
        records,
    })
}

fn inv_err(e: InvariantError) -> CliError {
    CliError::Undecided(e.to_string())
}

pub fn cmd_classify(ctx: &ClassContext, m: &CharPoly) -> Result<Outcome, CliError> {
    let gamma = match solve_checked(ctx, m)? {
        Ok(g) => g,
        Err(out) => return Ok(out),
    };
    let classes = group_classes(&gamma).map_err(inv_err)?;
    let indices = if ctx.r >= 2 {
        enumerate_basic_j_indices(ctx.r, ctx.q())
    } else {
        Vec::new()
    };
    let l = &ctx.l;
    let mut records = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        let p = profile(&class[0], &indices).map_err(inv_err)?;
        records.push(json!({
            "kind": "class",
            "index": i + 1,
            "size": class.len(),
            "profile": {
                "j": p.j.iter().map(|(idx, v)| json!([idx.to_string(), elem_json(l, *v)])).collect::<Vec<_>>(),
                "fi": {
                    "I": p.fi.support,
                    "d": p.fi.d.to_string(),
                    "lambda": p.fi.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "value": elem_json(l, p.fi.value),
                    "class": p.fi.class,
                },
            },
            "members": class.iter().map(module_json).collect::<Vec<_>>(),
        }));
    }
    records.push(json!({
        "kind": "summary",
        "poly": m.to_string(),
        "classes": classes.len(),
        "modules": gamma.len(),
    }));
    Ok(Outcome {
        code: if gamma.is_empty() {
            EXIT_FALSE
        } else {
            EXIT_TRUE
        },
        records,
    })
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Enumerate(c) => cmd_enumerate(&load_context(&c.config)?),
        Command::Check(a) | Command::Solve(a) | Command::Classify(a) => {
            let ctx = load_context(&a.common.config)?;
            let m = load_poly(&a.poly, &ctx.fq)?;
            match cmd {
                Command::Check(_) => cmd_check(&ctx, &m),
                Command::Solve(_) => cmd_solve(&ctx, &m),
                _ => cmd_classify(&ctx, &m),
            }
        }
    }
}

fn common(cmd: &Command) -> &CommonArgs {
    match cmd {
        Command::Enumerate(c) => c,
        Command::Check(a) | Command::Solve(a) | Command::Classify(a) => &a.common,
    }
}

/// Runs a parsed command, writing records to `--out` or `stdout` and diagnostics to `stderr`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let c = common(&cli.command);
    let result = (|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = c.workers {
            if n == 0 {
                return Err(CliError::Workers);
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Context(e.to_string()))?;
        pool.install(|| dispatch(&cli.command))
    })();
    match result {
        Ok(out) => {
            let text = out.render();
            let written = match &c.out {
                Some(path) => fs::write(path, &text),
                None => stdout.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_MALFORMED;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_MALFORMED
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_TRUE
            };
        }
    };
    execute(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
