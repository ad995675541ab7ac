//! Command-line front end: `solve`, `complete`, `verify` and `potential`.
//!
//! Every subcommand reads an optional JSON document (`--input`) and lets
//! flags override its fields. Exit codes: 0 success, 1 invalid input,
//! 2 failed verification, 3 internal inconsistency.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::majorization::sort_desc;
use crate::oracle::{audit_structure, brute_force_min, majorization_spot_check, StructureReport};
use crate::potentials::{eval_frame, eval_vector, PotentialSpec};
use crate::solver::{optimal_spectrum, Block, BlockSpectrum, ProblemData};
use crate::spectral::{orthonormality_defect, VectorSequence};
use crate::synthesis::{complete_with_tol, initial_spectrum, BASIS_TOL};
use crate::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BUDGET: usize = 10_000;
/// Largest dimension `verify` accepts without `--allow-large`.
pub const MAX_VERIFY_DIM: usize = 8;
/// Tolerance of the structure audit run on synthesized completions.
pub const AUDIT_TOL: f64 = 1e-8;
pub const THREADS_ENV: &str = "FRAME_COMPLETE_THREADS";

const JSON_DIGITS: usize = 12;
const TEXT_DIGITS: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "frame-complete",
    version,
    about = "Majorization-optimal completions of vector sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the optimal spectrum for (lambda, norms).
    Solve(Args),
    /// Synthesize completion vectors and audit them.
    Complete(Args),
    /// Compare the solver with the brute-force oracle and audit a completion.
    Verify(Args),
    /// Evaluate tr f(S) for a frame, or sum f(lambda_i) for a spectrum.
    Potential(Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Spectrum of the initial frame operator, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    /// Prescribed squared norms, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub norms: Option<Vec<f64>>,
    /// JSON input document.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Potentials: fp, mse, exp, pow:<p>. Comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub potential: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Oracle samples per potential and majorization samples.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Let `verify` run above the desk-scale dimension limit.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

/// A failed command: exit code and message.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconsistent(_) | Error::NoConvergence(_) => EXIT_INTERNAL,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// A coordinate: a real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PotentialField {
    One(String),
    Many(Vec<String>),
}

/// The JSON input schema shared by every subcommand.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct InputDoc {
    pub lambda: Option<Vec<f64>>,
    pub norms: Option<Vec<f64>>,
    /// `F0`, one vector per row.
    pub vectors: Option<Vec<Vec<Entry>>>,
    /// Orthonormal eigenbasis paired with `lambda` when `vectors` is absent.
    pub basis: Option<Vec<Vec<Entry>>>,
    pub dim: Option<usize>,
    /// A completion `G` to audit.
    pub g: Option<Vec<Vec<Entry>>>,
    /// A candidate spectrum to verify, aligned with ascending `lambda`.
    pub nu: Option<Vec<f64>>,
    pub potential: Option<PotentialField>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub tol: Option<f64>,
}

/// Report of `solve`; also valid input for `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub lambda: Vec<f64>,
    pub norms: Vec<f64>,
    pub blocks: Vec<Block>,
    pub block_ends: Vec<usize>,
    pub constants: Vec<f64>,
    pub tail: Vec<f64>,
    /// `ν`, aligned with ascending `lambda`.
    pub nu: Vec<f64>,
    pub nu_desc: Vec<f64>,
    pub mu: Vec<f64>,
    pub feasible: bool,
    pub s_star: usize,
    pub p: usize,
    pub near_ties: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
}

impl SolveReport {
    pub fn new(pd: &ProblemData, nu: &BlockSpectrum, seed: u64) -> Self {
        SolveReport {
            lambda: pd.lambda().to_vec(),
            norms: pd.norms().to_vec(),
            blocks: nu.blocks(),
            block_ends: nu.block_ends.clone(),
            constants: nu.constants.clone(),
            tail: nu.tail.clone(),
            nu: nu.flatten(),
            nu_desc: nu.desc(),
            mu: nu.mu(pd.lambda()),
            feasible: nu.is_feasible(),
            s_star: nu.feasible_start,
            p: nu.p(),
            near_ties: nu.near_ties.clone(),
            seed,
            tol: pd.tol(),
        }
    }

    /// Every float rounded to `digits` significant digits.
    pub fn rounded(&self, digits: usize) -> Self {
        let r = |v: &[f64]| round_all(v, digits);
        SolveReport {
            lambda: r(&self.lambda),
            norms: r(&self.norms),
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    constant: round_sig(b.constant, digits),
                    ..*b
                })
                .collect(),
            constants: r(&self.constants),
            tail: r(&self.tail),
            nu: r(&self.nu),
            nu_desc: r(&self.nu_desc),
            mu: r(&self.mu),
            tol: round_sig(self.tol, digits),
            ..self.clone()
        }
    }
}

/// `x` rounded to `digits` significant digits; zero, infinities and NaN
/// pass through, and `-0` becomes `0`.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", digits.max(1) - 1, x).parse().unwrap_or(x)
}

fn round_all(v: &[f64], digits: usize) -> Vec<f64> {
    v.iter().map(|&x| round_sig(x, digits)).collect()
}

/// JSON number, or the string `"inf"` / `"-inf"` / `"nan"`.
fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x, JSON_DIGITS))
    } else {
        json!(text_num(x))
    }
}

fn text_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{}", round_sig(x, TEXT_DIGITS))
    }
}

fn text_list(v: &[f64]) -> String {
    v.iter().map(|&x| text_num(x)).collect::<Vec<_>>().join(" ")
}

/// Everything a subcommand needs, after merging the input file and flags.
struct Settings {
    doc: InputDoc,
    lambda: Option<Vec<f64>>,
    norms: Option<Vec<f64>>,
    potentials: Vec<PotentialSpec>,
    seed: u64,
    budget: usize,
    tol: f64,
    format: Format,
    output: Option<PathBuf>,
    allow_large: bool,
}

impl Settings {
    fn resolve(args: &Args) -> CliResult<Self> {
        let doc: InputDoc = match &args.input {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::validation(format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    Failure::validation(format!("cannot parse {}: {e}", path.display()))
                })?
            }
            None => InputDoc::default(),
        };
        let names: Vec<String> = if !args.potential.is_empty() {
            args.potential.clone()
        } else {
            match &doc.potential {
                Some(PotentialField::One(s)) => vec![s.clone()],
                Some(PotentialField::Many(v)) => v.clone(),
                None => Vec::new(),
            }
        };
        let potentials = names
            .iter()
            .map(|s| s.parse::<PotentialSpec>())
            .collect::<Result<Vec<_>, _>>()?;
        let tol = args.tol.or(doc.tol).unwrap_or(DEFAULT_TOL);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::validation(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(Settings {
            lambda: args.lambda.clone().or_else(|| doc.lambda.clone()),
            norms: args.norms.clone().or_else(|| doc.norms.clone()),
            potentials,
            seed: args.seed.or(doc.seed).unwrap_or(DEFAULT_SEED),
            budget: args.budget.or(doc.budget).unwrap_or(DEFAULT_BUDGET),
            tol,
            format: args.format,
            output: args.output.clone(),
            allow_large: args.allow_large,
            doc,
        })
    }

    fn potentials_or(&self, default: &[PotentialSpec]) -> Vec<PotentialSpec> {
        if self.potentials.is_empty() {
            default.to_vec()
        } else {
            self.potentials.clone()
        }
    }

    fn norms(&self) -> CliResult<&[f64]> {
        self.norms.as_deref().ok_or_else(|| {
            Failure::validation("norms are required (--norms or `norms` in the input)")
        })
    }

    fn dim_hint(&self) -> Option<usize> {
        self.doc
            .dim
            .or_else(|| {
                self.doc
                    .vectors
                    .as_ref()
                    .and_then(|v| v.first())
                    .map(Vec::len)
            })
            .or_else(|| self.lambda.as_ref().map(Vec::len))
    }

    /// `F0` from `vectors`, or from `lambda` and an optional basis.
    fn initial_frame(&self) -> CliResult<VectorSequence> {
        if let Some(rows) = &self.doc.vectors {
            let dim = self.dim_hint().ok_or_else(|| {
                Failure::validation("cannot infer the dimension of an empty `vectors` list")
            })?;
            return Ok(sequence(dim, rows)?);
        }
        let lambda = self
            .lambda
            .as_ref()
            .ok_or_else(|| Failure::validation("need `vectors` or `lambda` to describe F0"))?;
        let d = lambda.len();
        if d == 0 {
            return Err(Error::Empty.into());
        }
        if let Some((index, &value)) = lambda
            .iter()
            .enumerate()
            .find(|(_, &l)| !(l >= 0.0 && l.is_finite()))
        {
            return Err(Failure::validation(format!(
                "lambda[{index}] = {value} must be finite and nonnegative"
            )));
        }
        let basis: Vec<Vec<Complex64>> = match &self.doc.basis {
            Some(rows) => {
                let b = sequence(d, rows)?.into_vectors();
                if b.len() != d {
                    return Err(Error::LengthMismatch {
                        left: b.len(),
                        right: d,
                    }
                    .into());
                }
                let defect = orthonormality_defect(&b);
                if defect > BASIS_TOL {
                    return Err(Error::NotOrthonormal(defect).into());
                }
                b
            }
            None => (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                        .collect()
                })
                .collect(),
        };
        let vectors = lambda
            .iter()
            .zip(basis)
            .filter(|(&l, _)| l > 0.0)
            .map(|(&l, b)| b.into_iter().map(|z| z * l.sqrt()).collect())
            .collect();
        Ok(VectorSequence::new(d, vectors)?)
    }

    /// `λ` from `lambda`, or from the frame operator of `vectors`.
    fn lambda(&self) -> CliResult<Vec<f64>> {
        if let Some(l) = &self.lambda {
            return Ok(l.clone());
        }
        if self.doc.vectors.is_some() {
            return Ok(initial_spectrum(&self.initial_frame()?, self.tol)?.1);
        }
        Err(Failure::validation(
            "lambda is required (--lambda, `lambda` or `vectors` in the input)",
        ))
    }

    fn problem(&self) -> CliResult<ProblemData> {
        Ok(ProblemData::with_tol(
            &self.lambda()?,
            self.norms()?,
            self.tol,
        )?)
    }
}

fn sequence(dim: usize, rows: &[Vec<Entry>]) -> crate::Result<VectorSequence> {
    VectorSequence::new(
        dim,
        rows.iter()
            .map(|r| r.iter().map(|&e| Complex64::from(e)).collect())
            .collect(),
    )
}

fn rows_json(seq: &VectorSequence) -> Value {
    let real = seq.is_real();
    Value::Array(
        seq.vectors()
            .iter()
            .map(|v| {
                Value::Array(
                    v.iter()
                        .map(|z| {
                            if real {
                                json_num(z.re)
                            } else {
                                json!([json_num(z.re), json_num(z.im)])
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// One vector per row; complex data uses `re_i,im_i` column pairs.
pub fn vectors_csv(seq: &VectorSequence) -> CliResult<String> {
    let real = seq.is_real();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (1..=seq.dim())
        .flat_map(|i| {
            if real {
                vec![format!("x{i}")]
            } else {
                vec![format!("re{i}"), format!("im{i}")]
            }
        })
        .collect();
    let internal = |e: csv::Error| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    };
    w.write_record(&header).map_err(internal)?;
    for v in seq.vectors() {
        let fields: Vec<String> = v
            .iter()
            .flat_map(|z| {
                if real {
                    vec![round_sig(z.re, JSON_DIGITS).to_string()]
                } else {
                    vec![
                        round_sig(z.re, JSON_DIGITS).to_string(),
                        round_sig(z.im, JSON_DIGITS).to_string(),
                    ]
                }
            })
            .collect();
        w.write_record(&fields).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn emit(settings: &Settings, body: String) -> CliResult<()> {
    let body = if body.ends_with('\n') {
        body
    } else {
        body + "\n"
    };
    match &settings.output {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok());
    match threads.filter(|&n| n > 0) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

fn cmd_solve(s: &Settings) -> CliResult<()> {
    let pd = s.problem()?;
    let nu = optimal_spectrum(&pd)?;
    let report = SolveReport::new(&pd, &nu, s.seed);
    let body = match s.format {
        Format::Json => pretty(&report.rounded(JSON_DIGITS)),
        Format::Text => solve_text(&report),
        Format::Csv => {
            let mut out = String::from("index,lambda,nu,mu\n");
            for i in 0..report.lambda.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    i + 1,
                    round_sig(report.lambda[i], JSON_DIGITS),
                    round_sig(report.nu[i], JSON_DIGITS),
                    round_sig(report.mu[i], JSON_DIGITS)
                );
            }
            out
        }
    };
    emit(s, body)
}

fn solve_text(r: &SolveReport) -> String {
    let blocks = r
        .blocks
        .iter()
        .map(|b| format!("[{}..{}] c={}", b.start, b.end, text_num(b.constant)))
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "lambda      {}", text_list(&r.lambda));
    let _ = writeln!(out, "norms       {}", text_list(&r.norms));
    let _ = writeln!(out, "blocks      {blocks}");
    let _ = writeln!(out, "tail        {}", text_list(&r.tail));
    let _ = writeln!(out, "nu          {}", text_list(&r.nu));
    let _ = writeln!(out, "nu_desc     {}", text_list(&r.nu_desc));
    let _ = writeln!(out, "mu          {}", text_list(&r.mu));
    let _ = writeln!(out, "feasible    {}", r.feasible);
    let _ = writeln!(out, "s_star      {}", r.s_star);
    let _ = writeln!(out, "p           {}", r.p);
    if !r.near_ties.is_empty() {
        let _ = writeln!(out, "near_ties   {:?}", r.near_ties);
    }
    let _ = writeln!(out, "seed        {}", r.seed);
    let _ = writeln!(out, "tol         {:e}", r.tol);
    out
}

fn audit_text(out: &mut String, audit: &StructureReport) {
    for c in &audit.checks {
        let _ = writeln!(out, "audit {:<20} {}  {}", c.name, pass(c.passed), c.detail);
    }
    let _ = writeln!(
        out,
        "audit {:<20} {}",
        "partitions",
        pass(audit.partitions_ok)
    );
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_complete(s: &Settings) -> CliResult<()> {
    let f0 = s.initial_frame()?;
    let norms = s.norms()?.to_vec();
    let c = complete_with_tol(&f0, &norms, s.tol)?;
    let audit = audit_structure(&f0, &c.vectors, AUDIT_TOL.max(s.tol))?;
    if !audit.passed() {
        let failed: Vec<String> = audit
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        return Err(Failure {
            code: EXIT_INTERNAL,
            message: format!(
                "synthesized completion failed its audit: {}",
                failed.join("; ")
            ),
        });
    }
    let body = match s.format {
        Format::Csv => vectors_csv(&c.vectors)?,
        Format::Json => {
            let report = json!({
                "dim": f0.dim(),
                "lambda": round_all(c.problem.lambda(), JSON_DIGITS),
                "norms": round_all(&norms, JSON_DIGITS),
                "vectors": rows_json(&f0),
                "g": rows_json(&c.vectors),
                "frame": rows_json(&c.frame(&f0)?),
                "nu": round_all(&c.spectrum.flatten(), JSON_DIGITS),
                "nu_desc": round_all(&c.spectrum.desc(), JSON_DIGITS),
                "mu": round_all(&c.mu, JSON_DIGITS),
                "constants": round_all(&c.spectrum.constants, JSON_DIGITS),
                "block_ends": c.spectrum.block_ends,
                "audit": audit,
                "seed": s.seed,
                "tol": s.tol,
            });
            pretty(&report)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "dim         {}", f0.dim());
            let _ = writeln!(out, "nu_desc     {}", text_list(&c.spectrum.desc()));
            let _ = writeln!(out, "mu          {}", text_list(&c.mu));
            for (i, v) in c.vectors.vectors().iter().enumerate() {
                let coords: Vec<String> = v
                    .iter()
                    .map(|z| {
                        if c.vectors.is_real() {
                            text_num(z.re)
                        } else {
                            format!("{}{:+}i", text_num(z.re), round_sig(z.im, TEXT_DIGITS))
                        }
                    })
                    .collect();
                let _ = writeln!(out, "g{:<10} {}", i + 1, coords.join(" "));
            }
            audit_text(&mut out, &audit);
            let _ = writeln!(out, "seed        {}", s.seed);
            out
        }
    };
    emit(s, body)
}

/// One oracle comparison in a `verify` report.
#[derive(Debug, Clone, PartialEq, Serialize)]
struct OracleEntry {
    potential: String,
    solver_value: Value,
    oracle_value: Value,
    argmin_distance: f64,
    runner_up_gap: Option<f64>,
    passed: bool,
}

fn cmd_verify(s: &Settings) -> CliResult<()> {
    let pd = s.problem()?;
    let d = pd.d();
    if d > MAX_VERIFY_DIM && !s.allow_large {
        return Err(Failure::validation(format!(
            "verify samples the whole search space and is meant for d <= {MAX_VERIFY_DIM}; \
             got d = {d}. Pass --allow-large to run anyway."
        )));
    }
    let nu: Vec<f64> = match &s.doc.nu {
        Some(nu) => {
            if nu.len() != d {
                return Err(Error::LengthMismatch {
                    left: nu.len(),
                    right: d,
                }
                .into());
            }
            nu.clone()
        }
        None => optimal_spectrum(&pd)?.flatten(),
    };
    let f0 = s.initial_frame()?;
    let g = match &s.doc.g {
        Some(rows) => sequence(f0.dim(), rows)?,
        None => complete_with_tol(&f0, s.norms()?, s.tol)?.vectors,
    };
    let potentials = s.potentials_or(&[
        PotentialSpec::FramePotential,
        PotentialSpec::Power(4.0),
        PotentialSpec::Exponential,
    ]);

    let (oracle, spot, audit) = with_thread_pool(|| {
        let nu_desc = sort_desc(&nu);
        let oracle: Vec<OracleEntry> = potentials
            .iter()
            .map(|f| {
                let best = brute_force_min(&pd, f, s.budget, s.seed);
                let solver_value = eval_vector(f, &nu).unwrap_or(f64::NAN);
                let slack = 1e-6 * best.value.abs().max(1.0);
                let passed = best.value.is_infinite() || solver_value <= best.value + slack;
                let argmin_distance = sort_desc(&best.point)
                    .iter()
                    .zip(&nu_desc)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                OracleEntry {
                    potential: f.name(),
                    solver_value: json_num(solver_value),
                    oracle_value: json_num(best.value),
                    argmin_distance,
                    runner_up_gap: best.runner_up_gap,
                    passed,
                }
            })
            .collect();
        let spot = majorization_spot_check(&nu, &pd, s.budget, s.seed);
        let audit = audit_structure(&f0, &g, AUDIT_TOL.max(s.tol));
        (oracle, spot, audit)
    });
    let audit = audit?;
    let passed = oracle.iter().all(|o| o.passed) && spot.passed() && audit.passed();

    let body = match s.format {
        Format::Json | Format::Csv => pretty(&json!({
            "d": d,
            "k": pd.k(),
            "nu": round_all(&nu, JSON_DIGITS),
            "oracle": oracle,
            "majorization": spot,
            "audit": audit,
            "passed": passed,
            "seed": s.seed,
            "budget": s.budget,
            "tol": s.tol,
        })),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "nu          {}", text_list(&nu));
            for o in &oracle {
                let _ = writeln!(
                    out,
                    "oracle {:<12} {}  solver {} oracle {} argmin distance {:.3e}",
                    o.potential,
                    pass(o.passed),
                    o.solver_value,
                    o.oracle_value,
                    o.argmin_distance
                );
            }
            let _ = writeln!(
                out,
                "majorization        {}  {} samples, {} failures, worst violation {:.3e}",
                pass(spot.passed()),
                spot.samples,
                spot.failures,
                spot.worst_violation
            );
            audit_text(&mut out, &audit);
            let _ = writeln!(out, "result              {}", pass(passed));
            let _ = writeln!(out, "seed                {}", s.seed);
            out
        }
    };
    emit(s, body)?;
    if passed {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFICATION,
            message: "verification failed".into(),
        })
    }
}

fn cmd_potential(s: &Settings) -> CliResult<()> {
    let potentials = s.potentials_or(&[PotentialSpec::FramePotential]);
    let values: Vec<(String, f64)> = if s.doc.vectors.is_some() {
        let frame = s.initial_frame()?;
        potentials
            .iter()
            .map(|f| Ok((f.name(), eval_frame(f, &frame)?)))
            .collect::<CliResult<_>>()?
    } else {
        let lambda = s.lambda.as_ref().ok_or_else(|| {
            Failure::validation("need `vectors` or `lambda` to evaluate a potential")
        })?;
        potentials
            .iter()
            .map(|f| Ok((f.name(), eval_vector(f, lambda)?)))
            .collect::<CliResult<_>>()?
    };
    let body = match s.format {
        Format::Json => {
            let mut m = Map::new();
            for (name, v) in &values {
                m.insert(name.clone(), json_num(*v));
            }
            m.insert("seed".into(), json!(s.seed));
            pretty(&Value::Object(m))
        }
        Format::Text => values
            .iter()
            .map(|(n, v)| format!("{n} {}\n", text_num(*v)))
            .collect(),
        Format::Csv => {
            let mut out = String::from("potential,value\n");
            for (n, v) in &values {
                let _ = writeln!(out, "{n},{}", json_num(*v).to_string().trim_matches('"'));
            }
            out
        }
    };
    emit(s, body)
}

/// Runs one subcommand.
pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(&Settings::resolve(a)?),
        Command::Complete(a) => cmd_complete(&Settings::resolve(a)?),
        Command::Verify(a) => cmd_verify(&Settings::resolve(a)?),
        Command::Potential(a) => cmd_potential(&Settings::resolve(a)?),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(round_sig(2.0 / 3.0, 6), 0.666667);
        assert_eq!(round_sig(123456.789, 6), 123457.0);
        assert_eq!(round_sig(-0.0, 6), 0.0);
        assert_eq!(round_sig(f64::INFINITY, 6), f64::INFINITY);
        assert_eq!(text_num(f64::INFINITY), "inf");
        assert_eq!(text_num(10.0), "10");
    }

    #[test]
    fn entries_parse() {
        let doc: InputDoc =
            serde_json::from_str(r#"{"vectors": [[1, [0, 2]]], "potential": "fp"}"#).unwrap();
        let rows = doc.vectors.unwrap();
        assert_eq!(Complex64::from(rows[0][0]), Complex64::new(1.0, 0.0));
        assert_eq!(Complex64::from(rows[0][1]), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn solve_report_round_trips() {
        let pd = ProblemData::new(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0]).unwrap();
        let nu = optimal_spectrum(&pd).unwrap();
        let report = SolveReport::new(&pd, &nu, 42).rounded(JSON_DIGITS);
        let back: SolveReport = serde_json::from_str(&pretty(&report)).unwrap();
        assert_eq!(back, report);
        assert_eq!(report.nu_desc, vec![10.0, 6.0, 2.0]);
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::Empty).code, EXIT_VALIDATION);
        assert_eq!(
            Failure::from(Error::Inconsistent("x".into())).code,
            EXIT_INTERNAL
        );
        assert_eq!(run(["frame-complete", "frobnicate"]), EXIT_VALIDATION);
    }
}
