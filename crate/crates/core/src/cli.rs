//! The `spaceform` command line.
//!
//! Exit status is 0 on success, 1 on invalid input (including unknown flags
//! and checksum mismatches) and 2 when an iterative solve does not converge.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::complex::{Cochain, CochainFile};
use crate::dec::{Dec, SolveConfig, Space};
use crate::error::{Error, Result};
use crate::forms::BuiltinForm;
use crate::geometry::{ball_mesh, Curvature, TriMesh};
use crate::hodge::{decompose, harmonic_diagnostics, stream_function, truncation_distance, HarmonicReport, HodgeSplit, StreamResult};
use crate::weitzenbock::{verify_suite, SuiteReport};

#[derive(Debug, Parser)]
#[command(name = "spaceform", version, about = "Hodge decompositions of 1-forms on hyperbolic and flat geodesic balls")]
pub struct Cli {
    /// Omit wall-clock timings so that reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate the geodesic ball of radius RHO and write it as JSON.
    Mesh(MeshArgs),
    /// Split a 1-cochain into exact, co-exact and harmonic parts.
    Decompose(DecomposeArgs),
    /// Recover the stream function of a co-closed 1-cochain.
    Stream(StreamArgs),
    /// Check the constant-curvature tensor identities in exact arithmetic.
    VerifyTensor(VerifyArgs),
    /// Decompose a builtin form on successively halved meshes and emit a CSV.
    Convergence(ConvergenceArgs),
    /// Distance between a form and its cutoff at several radii, as CSV.
    Truncate(TruncateArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub curvature: f64,
    #[arg(long)]
    pub radius: f64,
    #[arg(long)]
    pub edge: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Relative residual target for the Gram solve.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// A cochain file, or `builtin:dx|exact|coexact|mixed|bump`.
    #[arg(long)]
    pub form: String,
    #[arg(long, default_value = "h1")]
    pub space: Space,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub form: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for the co-closedness and reconstruction checks.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 5)]
    pub max_dim: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub curvature: f64,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Edge length of the coarsest level; each further level halves it.
    #[arg(long, default_value_t = 0.2)]
    pub edge: f64,
    #[arg(long, default_value = "builtin:dx")]
    pub form: String,
    #[arg(long, default_value = "h1")]
    pub space: Space,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruncateArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub curvature: f64,
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.15)]
    pub edge: f64,
    #[arg(long, default_value = "builtin:dx")]
    pub form: String,
    #[arg(long, default_value = "h1")]
    pub space: Space,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, echo) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_status(&e)
        }
    }
}

pub fn exit_status(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => 2,
        _ => 1,
    }
}

fn execute(cli: &Cli, command: Vec<String>) -> Result<()> {
    let ctx = Context { command, deterministic: cli.deterministic };
    match &cli.command {
        Command::Mesh(a) => mesh(a),
        Command::Decompose(a) => ctx.decompose(a),
        Command::Stream(a) => ctx.stream(a),
        Command::VerifyTensor(a) => ctx.verify(a),
        Command::Convergence(a) => ctx.convergence(a),
        Command::Truncate(a) => ctx.truncate(a),
    }
}

struct Context {
    command: Vec<String>,
    deterministic: bool,
}

fn load_mesh(path: &Path) -> Result<TriMesh> {
    TriMesh::from_json(&fs::read_to_string(path)?)
}

/// Either `builtin:NAME` or a cochain file built against this mesh.
fn load_form(dec: &Dec, spec: &str, seed: u64) -> Result<Cochain> {
    if spec.starts_with("builtin:") {
        return spec.parse::<BuiltinForm>()?.build(dec, seed);
    }
    let file: CochainFile = serde_json::from_str(&fs::read_to_string(spec)?)?;
    file.into_cochain(&dec.mesh.checksum(), &dec.complex)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        f.write_all(b"\n")?;
    }
    Ok(())
}

fn mesh(a: &MeshArgs) -> Result<()> {
    let m = ball_mesh(Curvature::new(a.curvature)?, a.radius, a.edge)?;
    write_text(&a.out, &m.to_json()?)?;
    println!(
        "mesh: {} vertices, {} triangles, checksum {}",
        m.vertices().len(),
        m.triangles().len(),
        m.checksum()
    );
    Ok(())
}

#[derive(Serialize)]
struct DecomposeReport<'a> {
    command: &'a [String],
    mesh_checksum: String,
    #[serde(flatten)]
    split: &'a HodgeSplit,
    harmonic: Option<HarmonicReport>,
}

#[derive(Serialize)]
struct StreamReport<'a> {
    command: &'a [String],
    mesh_checksum: String,
    #[serde(flatten)]
    result: &'a StreamResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    command: &'a [String],
    all_passed: bool,
    #[serde(flatten)]
    report: &'a SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

impl Context {
    fn solve_config(&self, s: &SolveArgs) -> SolveConfig {
        SolveConfig { tolerance: s.tol, max_iterations: s.max_iter, deterministic: self.deterministic }
    }

    fn elapsed(&self, start: Instant) -> Option<f64> {
        (!self.deterministic).then(|| start.elapsed().as_secs_f64() * 1e3)
    }

    fn decompose(&self, a: &DecomposeArgs) -> Result<()> {
        let dec = Dec::new(load_mesh(&a.mesh)?)?;
        let alpha = load_form(&dec, &a.form, a.seed)?;
        let space = dec.space(a.space, alpha.degree())?;
        let split = decompose(&dec, &alpha, &space, &self.solve_config(&a.solve))?;
        let harmonic = if alpha.degree() == 1 { Some(harmonic_diagnostics(&dec, &split.gamma, &space)?) } else { None };
        let report = DecomposeReport { command: &self.command, mesh_checksum: dec.mesh.checksum(), split: &split, harmonic };
        write_text(&a.out, &serde_json::to_string_pretty(&report)?)?;
        let d = &split.diagnostics;
        println!(
            "decompose: |α|² = {:.6e}, |dβ|² = {:.6e}, |δω|² = {:.6e}, |γ|² = {:.6e}, {} iterations",
            d.norm_sq_input, d.norm_sq_exact, d.norm_sq_coexact, d.norm_sq_harmonic, d.iterations
        );
        Ok(())
    }

    fn stream(&self, a: &StreamArgs) -> Result<()> {
        let start = Instant::now();
        let dec = Dec::new(load_mesh(&a.mesh)?)?;
        let v = load_form(&dec, &a.form, a.seed)?;
        let cfg = SolveConfig { tolerance: a.tol, deterministic: self.deterministic, ..SolveConfig::default() };
        let result = stream_function(&dec, &v, &cfg)?;
        let report = StreamReport {
            command: &self.command,
            mesh_checksum: dec.mesh.checksum(),
            result: &result,
            elapsed_ms: self.elapsed(start),
        };
        write_text(&a.out, &serde_json::to_string_pretty(&report)?)?;
        println!("stream: residual {:.3e}", result.residual);
        Ok(())
    }

    fn verify(&self, a: &VerifyArgs) -> Result<()> {
        let start = Instant::now();
        let report = verify_suite(a.max_dim, a.trials, a.seed)?;
        for c in &report.cases {
            println!(
                "N={} k={}: {}/{} exact, ⋆⋆ = {:+}, sums = +K k(N−k) α in {} trials",
                c.dim, c.degree, c.passed, c.trials, c.star_sign, c.positive_sign_matches
            );
        }
        for f in &report.failures {
            eprintln!("failed: N={} k={} trial {}: {}", f.dim, f.degree, f.trial, f.check);
        }
        if let Some(out) = &a.out {
            let full = VerifyReport {
                command: &self.command,
                all_passed: report.all_passed(),
                report: &report,
                elapsed_ms: self.elapsed(start),
            };
            write_text(out, &serde_json::to_string_pretty(&full)?)?;
        }
        if report.all_passed() {
            Ok(())
        } else {
            Err(Error::Consistency(format!("{} tensor identity checks failed", report.failures.len())))
        }
    }

    fn convergence(&self, a: &ConvergenceArgs) -> Result<()> {
        if a.levels == 0 {
            return Err(Error::Configuration("at least one refinement level is required".into()));
        }
        let cfg = self.solve_config(&a.solve);
        let mut rows = Vec::new();
        for level in 0..a.levels {
            let h = a.edge / f64::from(1u32 << level);
            let dec = Dec::new(ball_mesh(Curvature::new(a.curvature)?, a.radius, h)?)?;
            let alpha = load_form(&dec, &a.form, a.seed)?;
            let space = dec.space(a.space, 1)?;
            let split = decompose(&dec, &alpha, &space, &cfg)?;
            let hr = harmonic_diagnostics(&dec, &split.gamma, &space)?;
            let d = &split.diagnostics;
            let orth = [d.inner_exact_coexact, d.inner_exact_harmonic, d.inner_coexact_harmonic]
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()))
                / d.norm_sq_input;
            rows.push(ConvergenceRow {
                level,
                h,
                d_residual: hr.d_residual,
                delta_residual: hr.delta_residual,
                energy_ratio: hr.bound_ratio,
                orthogonality_defect: orth,
            });
        }
        let csv = convergence_csv(&rows)?;
        match &a.out {
            Some(path) => write_text(path, &csv)?,
            None => print!("{csv}"),
        }
        Ok(())
    }

    fn truncate(&self, a: &TruncateArgs) -> Result<()> {
        let dec = Dec::new(ball_mesh(Curvature::new(a.curvature)?, a.radius, a.edge)?)?;
        let gamma = load_form(&dec, &a.form, 0)?;
        let space = dec.space(a.space, 1)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["radius", "distance"]).map_err(csv_error)?;
        for &r in &a.radii {
            let d = truncation_distance(&dec, &gamma, r, &space)?;
            w.write_record([r.to_string(), format!("{d:.12e}")]).map_err(csv_error)?;
        }
        let text = String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?)
            .expect("csv output is utf-8");
        match &a.out {
            Some(path) => write_text(path, &text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub d_residual: Option<f64>,
    pub delta_residual: Option<f64>,
    pub energy_ratio: Option<f64>,
    pub orthogonality_defect: f64,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
