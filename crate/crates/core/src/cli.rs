//! Command-line front end. Every subcommand accepts `--config FILE` with a JSON object whose
//! keys match the long flag names (snake_case); flags given on the command line win.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{classify_regime, derive_exponents, ProblemParams};
use crate::nonlinear::{check_uniqueness_plus, integral_identity_check, solve_profile_on, Branch, NonlinearProfile, DEFAULT_CELLS, DEFAULT_TOL};
use crate::spectra::{eigen_table, harmonic, verify_growth_bounds, GrowthGrid, HarmonicExtra, HarmonicKind, SeparableHarmonic};
use crate::verify::{ko_bound_check, pde_residual_extrapolated, phragmen_lindelof_check, scaling_check, FieldSampler};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "HARDY_SEP_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "hardy-sep", version, about = "Separable solutions of Hardy-potential equations on the half-space")]
pub struct Cli {
    /// Worker threads for sweeps (default: $HARDY_SEP_WORKERS, else all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary exponents, critical powers and regime classification (JSON)
    Params(ParamsArgs),
    /// Angular eigenvalues Lambda_{s,m} (CSV or JSON)
    Eigs(EigsArgs),
    /// Separable harmonic artifact (JSON)
    Harmonic(HarmonicArgs),
    /// Nonlinear separable profile artifact (JSON)
    Profile(ProfileArgs),
    /// Regime classification over a (mu, p) grid (CSV)
    Phase(PhaseArgs),
    /// Sample an artifact on a polar grid (CSV)
    Sample(SampleArgs),
    /// Run the verification checks on an artifact (JSON, exit 1 on failure)
    Verify(VerifyArgs),
}

/// Field-wise `flag.or(file)` for option-only argument structs.
macro_rules! merge_fields {
    ($a:ident, $b:ident; $($f:ident),*) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f; } )*
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigsArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Azimuthal indices, comma separated (default 0)
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
    /// Eigenvalues per azimuthal index (default 3)
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// csv (default) or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicArgs {
    /// h_plus, h_minus, H_plus, H_minus or H_gamma
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// plus or minus
    #[arg(long)]
    pub branch: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_max: Option<f64>,
    #[arg(long)]
    pub mu_points: Option<usize>,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub p_points: Option<usize>,
    /// Also write the boundary curves p_c, p_KO, p_c^- and mu* to this CSV
    #[arg(long)]
    pub boundaries: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleArgs {
    /// Artifact JSON written by `harmonic` or `profile`
    #[arg(long)]
    pub artifact: Option<PathBuf>,
    #[arg(long)]
    pub radii: Option<usize>,
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyArgs {
    #[arg(long)]
    pub artifact: Option<PathBuf>,
    /// Random interior points for the PDE residual (default 100)
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ball radius for the Keller-Osserman check (default 1)
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn with_config<T: DeserializeOwned>(config: &Option<PathBuf>) -> Result<Option<T>> {
    match config {
        None => Ok(None),
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Some(serde_json::from_str(&text)?))
        }
    }
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidParams(format!("missing required argument --{}", name.replace('_', "-"))))
}

fn positive(value: f64, name: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive, got {value}")))
    }
}

/// Shortest round-trip representation; scientific notation outside `[1e-5, 1e16)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn enum_name<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Artifacts accepted by `sample` and `verify`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Artifact {
    Profile(Box<NonlinearProfile>),
    Harmonic(Box<SeparableHarmonic>),
}

impl Artifact {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read artifact {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParams(format!("{} is not a harmonic or profile artifact: {e}", path.display())))
    }

    pub fn sampler(&self) -> FieldSampler {
        match self {
            Artifact::Profile(p) => FieldSampler::profile((**p).clone()),
            Artifact::Harmonic(h) => FieldSampler::harmonic((**h).clone()),
        }
    }
}

fn configure_workers(workers: Option<usize>) -> Result<()> {
    let count = match workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Error::InvalidParams(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(w) = count {
        if w == 0 {
            return Err(Error::InvalidParams("worker count must be positive".into()));
        }
        // a second configuration in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(())
}

/// Runs a parsed command. `Ok(false)` means a check failed.
pub fn run(cli: Cli) -> Result<bool> {
    configure_workers(cli.workers)?;
    match cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Eigs(a) => cmd_eigs(a),
        Command::Harmonic(a) => cmd_harmonic(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Phase(a) => cmd_phase(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Process entry point: parses `args` and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Serialize)]
struct ParamsReport {
    params: ProblemParams,
    exponents: crate::exponents::ExponentTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<crate::exponents::RegimeClassification>,
}

pub fn cmd_params(mut a: ParamsArgs) -> Result<bool> {
    if let Some(f) = with_config::<ParamsArgs>(&a.config)? {
        merge_fields!(a, f; n, mu, p, output);
    }
    let params = ProblemParams::new(required(a.n, "n")?, required(a.mu, "mu")?, a.p)?;
    let report = ParamsReport {
        exponents: derive_exponents(&params)?,
        regime: if params.p.is_some() { Some(classify_regime(&params)?) } else { None },
        params,
    };
    emit(&a.output, &json(&report)?)?;
    Ok(true)
}

pub fn cmd_eigs(mut a: EigsArgs) -> Result<bool> {
    if let Some(f) = with_config::<EigsArgs>(&a.config)? {
        merge_fields!(a, f; n, mu, m, count, tol, format, output);
    }
    let params = ProblemParams::linear(required(a.n, "n")?, required(a.mu, "mu")?)?;
    let ms = a.m.unwrap_or_else(|| vec![0]);
    let count = a.count.unwrap_or(3);
    let tol = positive(a.tol.unwrap_or(1e-10), "tol")?;
    let table = eigen_table(params.n, params.mu, &ms, count, tol)?;
    let text = match a.format.as_deref().unwrap_or("csv") {
        "json" => json(&table)?,
        "csv" => {
            let rows: Vec<Vec<String>> = table
                .iter()
                .map(|e| {
                    vec![
                        params.n.to_string(),
                        fmt_num(params.mu),
                        e.m.to_string(),
                        e.s.to_string(),
                        fmt_num(e.lambda),
                        fmt_num(e.gamma_plus),
                        fmt_num(e.gamma_minus),
                        fmt_num(e.mismatch),
                    ]
                })
                .collect();
            csv(&["n", "mu", "m", "s", "lambda", "gamma_plus", "gamma_minus", "mismatch"], &rows)
        }
        other => return Err(Error::InvalidParams(format!("unknown format '{other}' (csv or json)"))),
    };
    emit(&a.output, &text)?;
    Ok(true)
}

pub fn cmd_harmonic(mut a: HarmonicArgs) -> Result<bool> {
    if let Some(f) = with_config::<HarmonicArgs>(&a.config)? {
        merge_fields!(a, f; kind, n, mu, gamma, s, m, tol, output);
    }
    let kind: HarmonicKind = required(a.kind.clone(), "kind")?.parse()?;
    let params = ProblemParams::linear(required(a.n, "n")?, required(a.mu, "mu")?)?;
    let extra = HarmonicExtra {
        gamma: a.gamma,
        s: a.s,
        m: a.m.unwrap_or(0),
    };
    let tol = positive(a.tol.unwrap_or(1e-10), "tol")?;
    let h = harmonic(kind, params.n, params.mu, extra, tol)?;
    emit(&a.output, &json(&h)?)?;
    Ok(true)
}

pub fn cmd_profile(mut a: ProfileArgs) -> Result<bool> {
    if let Some(f) = with_config::<ProfileArgs>(&a.config)? {
        merge_fields!(a, f; n, mu, p, branch, tol, cells, output);
    }
    let params = ProblemParams::nonlinear(required(a.n, "n")?, required(a.mu, "mu")?, required(a.p, "p")?)?;
    let branch: Branch = required(a.branch.clone(), "branch")?.parse()?;
    let tol = positive(a.tol.unwrap_or(DEFAULT_TOL), "tol")?;
    let prof = solve_profile_on(&params, branch, tol, a.cells.unwrap_or(DEFAULT_CELLS))?;
    emit(&a.output, &json(&prof)?)?;
    Ok(true)
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| {
            let f = i as f64 / (points - 1) as f64;
            lo * (1.0 - f) + hi * f
        })
        .collect()
}

pub fn cmd_phase(mut a: PhaseArgs) -> Result<bool> {
    if let Some(f) = with_config::<PhaseArgs>(&a.config)? {
        merge_fields!(a, f; n, mu_min, mu_max, mu_points, p_min, p_max, p_points, boundaries, output);
    }
    let n = required(a.n, "n")?;
    let (mu_lo, mu_hi) = (required(a.mu_min, "mu_min")?, required(a.mu_max, "mu_max")?);
    let (p_lo, p_hi) = (required(a.p_min, "p_min")?, required(a.p_max, "p_max")?);
    let (mu_n, p_n) = (a.mu_points.unwrap_or(100), a.p_points.unwrap_or(100));
    if mu_n == 0 || p_n == 0 || mu_lo > mu_hi || p_lo > p_hi {
        return Err(Error::InvalidParams("empty or reversed (mu, p) range".into()));
    }
    ProblemParams::nonlinear(n, mu_lo, p_lo)?;
    ProblemParams::nonlinear(n, mu_hi, p_hi)?;
    let mus = linspace(mu_lo, mu_hi, mu_n);
    let ps = linspace(p_lo, p_hi, p_n);
    let rows: Vec<Vec<Vec<String>>> = mus
        .par_iter()
        .map(|&mu| {
            ps.iter()
                .map(|&p| {
                    let params = ProblemParams::nonlinear(n, mu, p)?;
                    let c = classify_regime(&params)?;
                    Ok(vec![
                        fmt_num(mu),
                        fmt_num(p),
                        enum_name(&c.plus_branch),
                        enum_name(&c.minus_branch),
                        c.table1_row.map(|r| r.to_string()).unwrap_or_default(),
                    ])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = rows.into_iter().flatten().collect();
    emit(&a.output, &csv(&["mu", "p", "plus_branch", "minus_branch", "table1_row"], &rows))?;
    if let Some(path) = &a.boundaries {
        let curves = mus
            .iter()
            .map(|&mu| {
                let t = derive_exponents(&ProblemParams::linear(n, mu)?)?;
                Ok(vec![fmt_num(mu), fmt_num(t.p_c), fmt_num(t.p_ko), fmt_num(t.p_c_minus), fmt_num(t.mu_star)])
            })
            .collect::<Result<Vec<_>>>()?;
        std::fs::write(path, csv(&["mu", "p_c", "p_ko", "p_c_minus", "mu_star"], &curves))?;
    }
    Ok(true)
}

pub fn cmd_sample(mut a: SampleArgs) -> Result<bool> {
    if let Some(f) = with_config::<SampleArgs>(&a.config)? {
        merge_fields!(a, f; artifact, radii, angles, r_min, r_max, output);
    }
    let artifact = Artifact::load(&required(a.artifact.clone(), "artifact")?)?;
    let u = artifact.sampler();
    let (radii, angles) = (a.radii.unwrap_or(20), a.angles.unwrap_or(20));
    let r_min = positive(a.r_min.unwrap_or(0.1), "r_min")?;
    let r_max = positive(a.r_max.unwrap_or(10.0), "r_max")?;
    if radii == 0 || angles == 0 || r_min > r_max {
        return Err(Error::InvalidParams("empty sampling grid".into()));
    }
    let gamma = u.radial_exponent.unwrap_or(0.0);
    let alpha = u.boundary_exponent.unwrap_or(0.0);
    let mut rows = Vec::with_capacity(radii * angles);
    for r in linspace(r_min.ln(), r_max.ln(), radii).into_iter().map(f64::exp) {
        for j in 0..angles {
            let theta = (j as f64 + 0.5) / angles as f64 * std::f64::consts::FRAC_PI_2;
            let (x1, xp) = (r * theta.cos(), r * theta.sin());
            let mut x = vec![0.0; u.n as usize];
            x[0] = x1;
            if x.len() > 1 {
                x[1] = xp;
            }
            let value = u.eval(&x);
            let envelope = x1.powf(alpha) * r.powf(gamma - alpha);
            rows.push(vec![fmt_num(x1), fmt_num(xp), fmt_num(value), fmt_num(value / envelope)]);
        }
    }
    emit(&a.output, &csv(&["x1", "x_perp", "value", "envelope_ratio"], &rows))?;
    Ok(true)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub artifact: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

fn check(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass: value.is_finite() && value <= threshold,
        value,
        threshold,
        detail: detail.into(),
    }
}

/// Random interior points with `x_1 in [0.05, 1]`, other coordinates in `[-1, 1]`.
pub fn interior_points(n: u32, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|j| if j == 0 { rng.gen_range(0.05..1.0) } else { rng.gen_range(-1.0..1.0) })
                .collect()
        })
        .collect()
}

fn max_residual(u: &FieldSampler, points: &[Vec<f64>], nonlinear: bool) -> Result<f64> {
    let values = points
        .par_iter()
        .map(|x| pde_residual_extrapolated(u, x, nonlinear).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

pub fn verify_artifact(artifact: &Artifact, points: usize, seed: u64, radius: f64) -> Result<VerifyReport> {
    let u = artifact.sampler();
    let pts = interior_points(u.n, points, seed);
    let mut checks = Vec::new();
    match artifact {
        Artifact::Profile(prof) => {
            checks.push(check("pde_residual", max_residual(&u, &pts, true)?, 1e-4, format!("{points} random points, seed {seed}, extrapolated step")));
            checks.push(check("solver_residual", prof.residual_sup, prof.tol, "normalized cell residual"));
            checks.push(check("bracket_containment", prof.containment_violation().max(0.0), 1e-12, "sub <= w <= super at every node"));
            checks.push(check("boundary_limit_positive", -prof.v_limit, 0.0, format!("w(0) = {}", fmt_num(prof.v_limit))));
            match integral_identity_check(prof) {
                Ok(d) => checks.push(check("integral_identity", d, 1e-6, "relative defect")),
                Err(e) => checks.push(check("integral_identity", f64::INFINITY, 1e-6, e.to_string())),
            }
            let ko = ko_bound_check(&u, u.n, u.mu, prof.p(), radius)?;
            let detail = format!("sup u x1^(2/(p-1)) = {} vs C = {}", fmt_num(ko.constant_found), fmt_num(ko.bound));
            checks.push(check("keller_osserman", if ko.pass { 0.0 } else { 1.0 }, 0.0, detail));
            if prof.branch == Branch::Plus {
                match check_uniqueness_plus(&prof.params, 5, 1e-6, seed) {
                    Ok(r) => checks.push(check("uniqueness", r.max_deviation, 1e-6, "5 starts, relative sup deviation")),
                    Err(e) => checks.push(check("uniqueness", f64::INFINITY, 1e-6, e.to_string())),
                }
            }
            let few: Vec<Vec<f64>> = pts.iter().take(10).cloned().collect();
            checks.push(check("scaling", scaling_check(&u, 2.0, &few, true)?, 1e-6, "a = 2"));
        }
        Artifact::Harmonic(h) => {
            checks.push(check("pde_residual", max_residual(&u, &pts, false)?, 1e-5, format!("{points} random points, seed {seed}, extrapolated step")));
            if h.positive {
                let g = verify_growth_bounds(h, h.gamma, &GrowthGrid::default());
                let detail = format!("c_best = {}", fmt_num(g.c_best));
                let applies = h.kind == HarmonicKind::SingularGamma || h.kind == HarmonicKind::SingularPlus;
                if applies {
                    checks.push(check("growth_bound", if g.pass { 0.0 } else { 1.0 }, 0.0, detail));
                }
            }
            let pl = phragmen_lindelof_check(&u, 1.0, 0.1, 20)?;
            let consistent = !pl.hypotheses_hold || pl.conclusion_holds;
            let detail = format!(
                "hypothesis a: {}, hypothesis b: {}, conclusion: {}",
                enum_name(&pl.hypothesis_a),
                enum_name(&pl.hypothesis_b),
                enum_name(&pl.conclusion)
            );
            checks.push(check("phragmen_lindelof_consistency", if consistent { 0.0 } else { 1.0 }, 0.0, detail));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        artifact: u.name.clone(),
        checks,
        pass,
    })
}

pub fn cmd_verify(mut a: VerifyArgs) -> Result<bool> {
    if let Some(f) = with_config::<VerifyArgs>(&a.config)? {
        merge_fields!(a, f; artifact, points, seed, radius, output);
    }
    let artifact = Artifact::load(&required(a.artifact.clone(), "artifact")?)?;
    let radius = positive(a.radius.unwrap_or(1.0), "radius")?;
    let report = verify_artifact(&artifact, a.points.unwrap_or(100), a.seed.unwrap_or(0), radius)?;
    emit(&a.output, &json(&report)?)?;
    Ok(report.pass)
}
