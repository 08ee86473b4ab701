//! The six commands. Each reads its block of the run configuration, writes
//! its files and returns the process exit code.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radlab::ball::{ball_frac_inverse, build_spectrum, ni_ball_ratio, NiBallReport, SpectrumChecks};
use radlab::inequality::{
    check_conditions, default_family, measure_ratio, measure_ratio_unchecked, MeasureOptions, RatioReport, Sample, SampleFlag, TheoremId,
};
use radlab::potentials::{bessel_convolve_on, default_grid, frac_derivative_on, riesz_potential_on, DerivMethod, FracDiffScheme};
use radlab::transforms::hankel_at;
use radlab::RadialProfile;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BallBlock, FamilyConfig, Operator, ProfileConfig, RunConfig};
use crate::error::CliError;
use crate::output::{has_provenance, num, opt, Meta, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Transform,
    Potential,
    Derivative,
    Verify,
    Ball,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Potential => "potential",
            Command::Derivative => "derivative",
            Command::Verify => "verify",
            Command::Ball => "ball",
            Command::Selftest => "selftest",
        }
    }
}

/// Flags that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

/// Runs `cmd` on a worker pool of the requested size and returns the exit code.
pub fn run(cmd: Command, config: RunConfig, out: &Path, ov: &Overrides) -> Result<i32, CliError> {
    let mut config = config;
    if ov.seed.is_some() {
        config.seed = ov.seed;
    }
    let threads = ov.threads.or(config.threads);
    if threads == Some(0) {
        return Err(CliError::config("threads must be at least 1"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::config(e.to_string()))?;
    pool.install(|| dispatch(cmd, &config, out))
}

fn dispatch(cmd: Command, config: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let mut dir = OutDir::create(out)?;
    match cmd {
        Command::Transform => cmd_transform(config, &mut dir),
        Command::Potential => cmd_potential(config, &mut dir),
        Command::Derivative => cmd_derivative(config, &mut dir),
        Command::Verify => cmd_verify(config, &mut dir).map(|s| s.exit_code()),
        Command::Ball => cmd_ball(config, &mut dir),
        Command::Selftest => cmd_selftest(&mut dir),
    }
}

fn missing(block: &str) -> CliError {
    CliError::config(format!("missing [{block}] block"))
}

fn build_profiles(list: &[ProfileConfig], n: u32) -> Result<Vec<RadialProfile>, CliError> {
    if list.is_empty() {
        return Err(CliError::config("no profiles"));
    }
    list.iter().map(|p| p.build(n).map_err(|e| CliError::config(e.to_string()))).collect()
}

#[derive(Serialize)]
struct FileIndex {
    files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct FileEntry {
    profile: String,
    file: String,
}

/// `(ρ, û(ρ), error)` per profile; `ρ = 0` is allowed.
pub fn cmd_transform(config: &RunConfig, dir: &mut OutDir) -> Result<i32, CliError> {
    let block = config.transform.as_ref().ok_or_else(|| missing("transform"))?;
    let profiles = build_profiles(&block.profiles, block.n)?;
    let rhos = block.grid.values()?;
    let spec = config.quadrature();
    let meta = Meta::new("transform", config)?;
    let mut index = Vec::new();
    for (i, u) in profiles.iter().enumerate() {
        let est = rhos.par_iter().map(|&rho| hankel_at(u, rho, &spec)).collect::<radlab::Result<Vec<_>>>()?;
        let rows: Vec<Vec<String>> = rhos.iter().zip(&est).map(|(&r, e)| vec![num(r), num(e.value), num(e.error)]).collect();
        let name = format!("transform_{i}.csv");
        dir.csv(&name, &meta, &["rho", "value", "abs_error_estimate"], &rows)?;
        index.push(FileEntry { profile: u.descriptor(), file: name });
    }
    dir.json("transform.json", &meta, &FileIndex { files: index })?;
    Ok(0)
}

pub fn cmd_potential(config: &RunConfig, dir: &mut OutDir) -> Result<i32, CliError> {
    let block = config.potential.as_ref().ok_or_else(|| missing("potential"))?;
    let profiles = build_profiles(&block.profiles, block.n)?;
    let spec = config.quadrature();
    let meta = Meta::new("potential", config)?;
    let mut index = Vec::new();
    for (i, f) in profiles.iter().enumerate() {
        let grid = match &block.grid {
            Some(g) => g.grid()?,
            None => default_grid(f)?,
        };
        let u = match block.operator {
            Operator::Riesz => riesz_potential_on(f, block.s, &grid, block.route, &spec)?,
            Operator::Bessel => bessel_convolve_on(f, block.s, &grid, block.route, &spec)?,
        };
        let rows = grid.radii().iter().map(|&r| Ok(vec![num(r), num(u.eval(r)?)])).collect::<radlab::Result<Vec<_>>>()?;
        let name = format!("potential_{i}.csv");
        dir.csv(&name, &meta, &["r", "value"], &rows)?;
        index.push(FileEntry { profile: f.descriptor(), file: name });
    }
    dir.json("potential.json", &meta, &FileIndex { files: index })?;
    Ok(0)
}

pub fn cmd_derivative(config: &RunConfig, dir: &mut OutDir) -> Result<i32, CliError> {
    let block = config.derivative.as_ref().ok_or_else(|| missing("derivative"))?;
    let profiles = build_profiles(&block.profiles, block.n)?;
    let spec = config.quadrature();
    let meta = Meta::new("derivative", config)?;
    let mut scheme = FracDiffScheme::for_order(block.s)?;
    if block.method == DerivMethod::Hypersingular {
        scheme = scheme.calibrate(block.n, block.s, &spec)?;
    }
    let mut index = Vec::new();
    for (i, u) in profiles.iter().enumerate() {
        let grid = match &block.grid {
            Some(g) => g.grid()?,
            None => default_grid(u)?,
        };
        let d = frac_derivative_on(u, block.s, &scheme, block.method, &grid, &spec)?;
        let rows = grid.radii().iter().map(|&r| Ok(vec![num(r), num(d.eval(r)?)])).collect::<radlab::Result<Vec<_>>>()?;
        let name = format!("derivative_{i}.csv");
        dir.csv(&name, &meta, &["r", "value"], &rows)?;
        index.push(FileEntry { profile: u.descriptor(), file: name });
    }
    dir.json("derivative.json", &meta, &FileIndex { files: index })?;
    Ok(0)
}

/// One `(theorem, params)` outcome of `verify`.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyRecord {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub theorem: TheoremId,
    pub params: String,
    pub admissible: bool,
    pub violated: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation_met: Option<bool>,
    pub measured: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Sample>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<radlab::inequality::measure::GridMeta>,
    pub unexpected_divergence: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifySummary {
    pub runs: usize,
    pub admissible: usize,
    pub measured: usize,
    pub expectation_mismatches: usize,
    pub unexpected_divergence: usize,
}

impl VerifySummary {
    /// 4 for an unexpected divergence, 1 for a failed expectation, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.unexpected_divergence > 0 {
            4
        } else if self.expectation_mismatches > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    records: &'a [VerifyRecord],
    summary: &'a VerifySummary,
}

pub fn cmd_verify(config: &RunConfig, dir: &mut OutDir) -> Result<VerifySummary, CliError> {
    let block = config.verify.as_ref().ok_or_else(|| missing("verify"))?;
    if block.runs.is_empty() {
        return Err(CliError::config("no runs"));
    }
    let mut opts = block.measure.clone().unwrap_or_default();
    if let Some(q) = config.quadrature {
        if block.measure.as_ref().is_none_or(|m| m.quadrature == MeasureOptions::default().quadrature) {
            opts.quadrature = q;
        }
    }
    let mut rng = match (block.jitter, config.seed) {
        (Some(j), Some(seed)) if j > 0.0 => Some((j, ChaCha8Rng::seed_from_u64(seed))),
        (Some(j), None) if j > 0.0 => return Err(CliError::config("jitter needs a seed (config `seed` or --seed)")),
        (Some(j), _) if !(j >= 0.0 && j.is_finite()) => return Err(CliError::config("jitter must be finite and nonnegative")),
        _ => None,
    };
    let meta = Meta::new("verify", config)?;
    let mut records = Vec::with_capacity(block.runs.len());
    let mut summary = VerifySummary { runs: block.runs.len(), ..Default::default() };
    for (index, run) in block.runs.iter().enumerate() {
        let params = run.params.resolve()?;
        let adm = check_conditions(run.theorem, &params)?;
        let expectation_met = run.expect.as_ref().map(|e| e.admissible == adm.admissible && e.violated == adm.violated);
        if expectation_met == Some(false) {
            summary.expectation_mismatches += 1;
            eprintln!("run {index} ({} {params}): expected {:?}, got admissible={} violated={:?}", run.theorem, run.expect, adm.admissible, adm.violated);
        }
        summary.admissible += adm.admissible as usize;
        let mut rec = VerifyRecord {
            index,
            label: run.label.clone(),
            theorem: run.theorem,
            params: params.to_string(),
            admissible: adm.admissible,
            violated: adm.violated.clone(),
            notes: adm.notes.clone(),
            expectation_met,
            measured: false,
            samples: None,
            sup_ratio: None,
            argmax: None,
            grid: None,
            unexpected_divergence: false,
        };
        if run.measure && (adm.admissible || run.run_anyway) {
            let mut family = match &run.family {
                FamilyConfig::Named(name) if name == "default" => default_family(run.theorem, &params)?,
                FamilyConfig::Named(other) => return Err(CliError::config(format!("unknown family `{other}` (use \"default\" or a profile list)"))),
                FamilyConfig::Profiles(list) => build_profiles(list, params.require_dim(run.theorem)?)?,
            };
            if let Some((j, rng)) = rng.as_mut() {
                family = family.iter().map(|f| f.dilate((*j * rng.random_range(-1.0..1.0)).exp())).collect::<radlab::Result<_>>()?;
            }
            let rep: RatioReport = if adm.admissible {
                measure_ratio(run.theorem, &params, &family, &opts)?
            } else {
                measure_ratio_unchecked(run.theorem, &params, &family, &opts)?
            };
            summary.measured += 1;
            summary.unexpected_divergence += rep.unexpected_divergence as usize;
            rec.measured = true;
            rec.sup_ratio = rep.sup_ratio;
            rec.argmax = rep.argmax;
            rec.grid = Some(rep.grid);
            rec.unexpected_divergence = rep.unexpected_divergence;
            rec.samples = Some(rep.samples);
        }
        records.push(rec);
    }
    dir.json("verify.json", &meta, &VerifyOutput { records: &records, summary: &summary })?;
    let mut rows = Vec::new();
    for r in &records {
        let base = |d: &str| vec![r.index.to_string(), r.theorem.to_string(), r.params.clone(), r.admissible.to_string(), d.to_string()];
        match &r.samples {
            Some(samples) => {
                for s in samples {
                    let mut row = base(&s.descriptor);
                    row.extend([opt(s.lhs), opt(s.rhs), opt(s.ratio), flag_label(&s.flag)]);
                    rows.push(row);
                }
            }
            None => {
                let mut row = base("");
                row.extend([String::new(), String::new(), String::new(), String::new()]);
                rows.push(row);
            }
        }
    }
    dir.csv("verify.csv", &meta, &["run", "theorem", "params", "admissible", "profile", "lhs", "rhs", "ratio", "flag"], &rows)?;
    Ok(summary)
}

fn flag_label(f: &Option<SampleFlag>) -> String {
    match f {
        None => String::new(),
        Some(SampleFlag::Degenerate) => "degenerate".into(),
        Some(SampleFlag::DivergentRhs(r)) => format!("divergent_rhs: {r}"),
        Some(SampleFlag::DivergentLhs(r)) => format!("divergent_lhs: {r}"),
    }
}

trait RequireDim {
    fn require_dim(&self, t: TheoremId) -> Result<u32, CliError>;
}

impl RequireDim for radlab::inequality::ParamSet {
    fn require_dim(&self, t: TheoremId) -> Result<u32, CliError> {
        self.n.ok_or_else(|| CliError::config(format!("missing field `n` for {t}")))
    }
}

#[derive(Serialize)]
struct BallRecord {
    profile: String,
    expansion_file: String,
    tail_estimate: Option<f64>,
    truncated_norm_sq: f64,
    truncation_warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ni: Option<NiBallReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ni_violated: Option<Vec<String>>,
}

#[derive(Serialize)]
struct BallOutput {
    checks: SpectrumChecks,
    records: Vec<BallRecord>,
}

pub fn cmd_ball(config: &RunConfig, dir: &mut OutDir) -> Result<i32, CliError> {
    let block: &BallBlock = config.ball.as_ref().ok_or_else(|| missing("ball"))?;
    if block.profiles.is_empty() {
        return Err(CliError::config("no profiles"));
    }
    let meta = Meta::new("ball", config)?;
    let sp = build_spectrum(block.n, block.radius, block.modes)?;
    let rows: Vec<Vec<String>> = (0..sp.modes()).map(|k| vec![(k + 1).to_string(), num(sp.eigenvalues()[k]), num(sp.normalizers()[k])]).collect();
    dir.csv("ball_eigenvalues.csv", &meta, &["k", "lambda", "normalizer"], &rows)?;
    let grid = sp.output_grid()?;
    let mut records = Vec::new();
    for (i, pc) in block.profiles.iter().enumerate() {
        let f = match pc {
            ProfileConfig::BallMode { k } => sp.eigenfunction_profile(*k).map_err(|e| CliError::config(e.to_string()))?,
            other => other.build(block.n).map_err(|e| CliError::config(e.to_string()))?,
        };
        let inv = ball_frac_inverse(&f, block.s, &sp)?;
        let rows: Vec<Vec<String>> = grid.radii().iter().map(|&r| vec![num(r), num(inv.eval(r))]).collect();
        let name = format!("ball_expansion_{i}.csv");
        dir.csv(&name, &meta, &["r", "value"], &rows)?;
        let (ni, ni_violated) = match block.p {
            None => (None, None),
            Some(p) => match ni_ball_ratio(&f, block.s, p, &sp) {
                Ok(rep) => (Some(rep), None),
                Err(radlab::Error::Inadmissible { violated, .. }) => (None, Some(violated)),
                Err(e) => return Err(e.into()),
            },
        };
        records.push(BallRecord {
            profile: f.descriptor(),
            expansion_file: name,
            tail_estimate: inv.tail_estimate.is_finite().then_some(inv.tail_estimate),
            truncated_norm_sq: inv.truncated_norm_sq,
            truncation_warning: inv.truncation_warning.clone(),
            ni,
            ni_violated,
        });
    }
    dir.json("ball.json", &meta, &BallOutput { checks: sp.checks(), records })?;
    Ok(0)
}

/// The golden admissibility table, as a verify configuration.
pub const GOLDEN_ADMISSIBILITY: &str = include_str!("../golden/admissibility.toml");

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct SelftestOutput {
    checks: Vec<Check>,
    passed: bool,
}

/// Small end-to-end checks; exit 0 when all pass, 1 otherwise.
pub fn cmd_selftest(dir: &mut OutDir) -> Result<i32, CliError> {
    let mut checks = Vec::new();
    let sub = |name: &str| -> Result<OutDir, CliError> { OutDir::create(&dir.path().join("selftest").join(name)) };

    let transform = RunConfig::parse(
        "[transform]\nn = 3\nprofiles = [{ kind = \"gaussian\", sigma = 1.0 }]\ngrid = { kind = \"linear\", min = 0.0, max = 6.0, points = 13 }\n",
    )?;
    let mut t_dir = sub("transform")?;
    cmd_transform(&transform, &mut t_dir)?;
    let worst = read_csv_values(&t_dir.path().join("transform_0.csv"))?.iter().map(|r| (r[1] - (-0.5 * r[0] * r[0]).exp()).abs()).fold(0.0, f64::max);
    checks.push(Check { name: "gaussian_fixed_point", passed: worst < 1e-6, detail: format!("max error {worst:e}") });

    let ball = RunConfig::parse("[ball]\nn = 3\nmodes = 8\ns = 2.0\nprofiles = [{ kind = \"constant\", value = 1.0 }]\n")?;
    let mut b_dir = sub("ball")?;
    cmd_ball(&ball, &mut b_dir)?;
    let eig = read_csv_values(&b_dir.path().join("ball_eigenvalues.csv"))?;
    let worst = eig.iter().map(|r| (r[1] / (r[0] * std::f64::consts::PI).powi(2) - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check { name: "ball_eigenvalues", passed: eig.len() == 8 && worst < 1e-10, detail: format!("max relative error {worst:e}") });

    let golden = RunConfig::parse(GOLDEN_ADMISSIBILITY)?;
    let mut g_dir = sub("golden")?;
    let s = cmd_verify(&golden, &mut g_dir)?;
    checks.push(Check {
        name: "golden_admissibility",
        passed: s.expectation_mismatches == 0 && s.runs >= 40,
        detail: format!("{} tuples, {} mismatches", s.runs, s.expectation_mismatches),
    });

    let written: Vec<PathBuf> = [t_dir.written, b_dir.written, g_dir.written].concat();
    let missing: Vec<String> = written
        .iter()
        .filter(|p| std::fs::read_to_string(p).map(|t| !has_provenance(&t)).unwrap_or(true))
        .map(|p| p.display().to_string())
        .collect();
    checks.push(Check { name: "provenance", passed: missing.is_empty(), detail: format!("{} files checked; missing: {missing:?}", written.len()) });

    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let meta = Meta::new("selftest", &RunConfig::default())?;
    dir.json("selftest.json", &meta, &SelftestOutput { checks, passed })?;
    Ok(if passed { 0 } else { 1 })
}

/// Numeric rows of a CSV written by this tool.
pub fn read_csv_values(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| CliError::Check(e.to_string()))?;
            r.iter().map(|x| x.parse::<f64>().map_err(|e| CliError::Check(format!("{x}: {e}")))).collect()
        })
        .collect()
}
