//! Front end for the `chebcert` binary.
//!
//! Exit codes: 0 when the command achieved its purpose, 1 when it did not
//! (a verdict failed, or `falsify` found nothing), 2 on usage or config errors.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use chebcert::campaign::{enumerate_cells, falsify, run_cells, CellGrid, CellRecord, Generator};
use chebcert::chebyshev::{triangular_example, PointwiseStudy, StudyCell, StudyGrid, Verdict};
use chebcert::fields::TriangularPair;
use chebcert::means::{check_mean_axioms, check_path_identity, AxiomFailure};
use chebcert::sampling::{random_strictly_positive, rng_for};
use chebcert::{HermitianMatrix, MeanSpec, Tolerances, WeightVector};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Matrix2;
use rand::Rng;
use serde::Serialize;

use crate::config::{CampaignConfig, ConfigError, FileConfig, Format};
use crate::report::{now, write_report, Report};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Random stream for path-identity triples, apart from the core streams.
const PATH_STREAM: u64 = 3;
/// Relative residual bound for the path identity.
pub const PATH_IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "chebcert",
    version,
    about = "Certify Chebyshev-type inequalities for operator fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an inequality's campaign over the configured grid.
    Verify(CampaignArgs),
    /// Check the mean axioms and the path identity over the (r, lambda) grid.
    Axioms(CampaignArgs),
    /// Evaluate the 2x2 triangular example at 16 points on [0, 1].
    DemoExample(DemoArgs),
    /// Search for a violation; succeeds when one is found.
    Falsify(CampaignArgs),
}

#[derive(Debug, Default, Args)]
pub struct CampaignArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub inequality: Option<String>,
    /// Field generator: scaled, increasing or nonsynchronous.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CampaignArgs {
    fn resolve(self, default_generator: Option<Generator>) -> Result<CampaignConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            inequality: self.inequality,
            generator: self.generator,
            dims: self.dims,
            n_points: self.points,
            trials: self.trials,
            seed: self.seed,
            r_grid: self.r_grid,
            lambda_grid: self.lambda_grid,
            tolerances: None,
            output_format: self.format,
            output_path: self.out,
        };
        CampaignConfig::resolve(file.overlay(flags), default_generator)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoVariant {
    /// `f = t`, `g = 1 − t` in both fields.
    Chebyshev,
    /// Constant entries; every gap vanishes.
    Constant,
    /// `f = g = t`, so both diagonal slots are increasing.
    SameMonotone,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub variant: DemoVariant,
    /// Emit a report instead of the plain-text table.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
    }
}

pub fn run(cli: Cli) -> u8 {
    let outcome = match cli.command {
        Command::Verify(args) => args.resolve(None).map(cmd_verify),
        Command::Axioms(args) => args.resolve(None).map(cmd_axioms),
        Command::Falsify(args) => args
            .resolve(Some(Generator::Nonsynchronous))
            .map(cmd_falsify),
        Command::DemoExample(args) => Ok(cmd_demo_example(&args)),
    };
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
        Err(e) => {
            eprintln!("config error: {e}");
            EXIT_USAGE
        }
    }
}

type CmdResult = Result<u8, Box<dyn std::error::Error>>;

fn open_output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<X: Serialize>(
    cfg_format: Format,
    path: Option<&PathBuf>,
    report: &Report<'_, X>,
) -> io::Result<()> {
    let mut out = open_output(path)?;
    write_report(&mut out, cfg_format, report)?;
    out.flush()
}

#[derive(Debug, Serialize)]
struct StudySummary<'a> {
    valid_exponents: Vec<f64>,
    refuted: Vec<&'a StudyCell>,
}

#[derive(Debug, Serialize)]
struct VerifyContext<'a> {
    config: &'a CampaignConfig,
    cells: usize,
    failed: usize,
    not_asserted: usize,
    pointwise_study: Option<StudySummary<'a>>,
}

/// The scalar study over the default grid plus the configured `(r, λ)` values.
pub fn pointwise_study_for(cfg: &CampaignConfig) -> PointwiseStudy {
    let mut grid = StudyGrid::default();
    grid.extend(&cfg.r_grid, &cfg.lambda_grid);
    PointwiseStudy::run(grid, &cfg.tolerances)
}

pub fn cmd_verify(cfg: CampaignConfig) -> CmdResult {
    let study = cfg
        .inequality
        .uses_mean()
        .then(|| pointwise_study_for(&cfg));
    let cells = enumerate_cells(&CellGrid {
        inequality: cfg.inequality,
        generator: cfg.generator,
        seed: cfg.seed,
        trials: cfg.trials,
        dims: &cfg.dims,
        n_points: &cfg.n_points,
        r_grid: &cfg.r_grid,
        lambda_grid: &cfg.lambda_grid,
    });
    let records = run_cells(&cells, &cfg.tolerances, study.as_ref())?;
    let failed = records.iter().filter(|r| r.is_counted_failure()).count();
    let not_asserted = records.iter().filter(|r| !r.validated).count();
    let context = VerifyContext {
        config: &cfg,
        cells: records.len(),
        failed,
        not_asserted,
        pointwise_study: study.as_ref().map(|s| StudySummary {
            valid_exponents: s.valid_exponents(),
            refuted: s.refuted().collect(),
        }),
    };
    let report = Report {
        timestamp: now(),
        command: "verify",
        records: &records,
        context,
    };
    emit(cfg.output_format, cfg.output_path.as_ref(), &report)?;
    eprintln!(
        "verify {} ({}): {} cells, {} failed, {} not asserted",
        cfg.inequality,
        cfg.generator,
        records.len(),
        failed,
        not_asserted
    );
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

/// Worst relative residual of the path identity over `trials` random triples
/// with second-mean weight `s`, half on commuting (diagonal) inputs.
pub fn path_identity_residual(
    r: f64,
    s: f64,
    dim: usize,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> chebcert::Result<f64> {
    let mut rng = rng_for(seed, PATH_STREAM);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let (a, b) = if trial % 2 == 0 {
            (
                random_strictly_positive(dim, &mut rng),
                random_strictly_positive(dim, &mut rng),
            )
        } else {
            (
                positive_diagonal(dim, &mut rng),
                positive_diagonal(dim, &mut rng),
            )
        };
        let (p, q): (f64, f64) = (rng.gen(), rng.gen());
        let residual = check_path_identity(r, p, q, s, &a, &b, tol)?;
        worst = worst.max(residual / a.frobenius_norm());
    }
    Ok(worst)
}

fn positive_diagonal<R: Rng>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let values: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..2.0)).collect();
    HermitianMatrix::diagonal(&values)
}

#[derive(Debug, Serialize)]
struct AxiomContext<'a> {
    config: &'a CampaignConfig,
    failures: Vec<AxiomFailure>,
}

pub fn cmd_axioms(cfg: CampaignConfig) -> CmdResult {
    let tol = &cfg.tolerances;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &r in &cfg.r_grid {
        for &lambda in &cfg.lambda_grid {
            for &dim in &cfg.dims {
                let replay = format!(
                    "seed={}/dim={dim}/trials={}/r={r:?}/lambda={lambda:?}",
                    cfg.seed, cfg.trials
                );
                let axioms =
                    check_mean_axioms(MeanSpec::new(r, lambda)?, cfg.trials, dim, cfg.seed, tol)?;
                records.push(CellRecord {
                    inequality: "axioms".into(),
                    seed: cfg.seed,
                    dim,
                    n: cfg.trials,
                    r: Some(r),
                    lambda: Some(lambda),
                    min_eig: axioms.min_relative_slack,
                    scale: 1.0,
                    verdict: if axioms.passed() {
                        Verdict::Pass
                    } else {
                        Verdict::Fail
                    },
                    validated: true,
                    inputs_digest: format!("axioms/{replay}"),
                });
                failures.extend(axioms.failures);

                let residual = path_identity_residual(r, lambda, dim, cfg.trials, cfg.seed, tol)?;
                records.push(CellRecord {
                    inequality: "path_identity".into(),
                    seed: cfg.seed,
                    dim,
                    n: cfg.trials,
                    r: Some(r),
                    lambda: Some(lambda),
                    min_eig: -residual,
                    scale: 1.0,
                    verdict: if residual <= PATH_IDENTITY_TOL {
                        Verdict::Pass
                    } else {
                        Verdict::Fail
                    },
                    validated: true,
                    inputs_digest: format!("path_identity/{replay}"),
                });
            }
        }
    }
    let failed = records.iter().filter(|r| r.is_counted_failure()).count();
    let report = Report {
        timestamp: now(),
        command: "axioms",
        records: &records,
        context: AxiomContext {
            config: &cfg,
            failures,
        },
    };
    emit(cfg.output_format, cfg.output_path.as_ref(), &report)?;
    eprintln!("axioms: {} records, {} failed", records.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Debug, Serialize)]
struct FalsifyContext<'a> {
    config: &'a CampaignConfig,
    trials_run: usize,
    found: bool,
}

pub fn cmd_falsify(cfg: CampaignConfig) -> CmdResult {
    let mean = cfg
        .explicit_mean_grid
        .then(|| (cfg.r_grid[0], cfg.lambda_grid[0]));
    let result = falsify(
        cfg.inequality.name(),
        cfg.generator.name(),
        cfg.trials,
        cfg.seed,
        mean,
        &cfg.tolerances,
    )?;
    let records: Vec<CellRecord> = result.first_failure.iter().cloned().collect();
    let report = Report {
        timestamp: now(),
        command: "falsify",
        records: &records,
        context: FalsifyContext {
            config: &cfg,
            trials_run: result.trials_run,
            found: result.found(),
        },
    };
    emit(cfg.output_format, cfg.output_path.as_ref(), &report)?;
    match &result.first_failure {
        Some(record) => {
            eprintln!(
                "falsify {} ({}): violation after {} trials, replay digest {}",
                cfg.inequality, cfg.generator, result.trials_run, record.inputs_digest
            );
            Ok(EXIT_OK)
        }
        None => {
            eprintln!(
                "falsify {} ({}): no violation in {} trials",
                cfg.inequality, cfg.generator, result.trials_run
            );
            Ok(EXIT_FAILED)
        }
    }
}

pub const DEMO_POINTS: usize = 16;

/// The triangular pair for a demo variant on `DEMO_POINTS` equispaced points.
pub fn demo_pair(variant: DemoVariant) -> TriangularPair {
    let t: Vec<f64> = (0..DEMO_POINTS)
        .map(|i| i as f64 / (DEMO_POINTS - 1) as f64)
        .collect();
    let (f, g): (Vec<f64>, Vec<f64>) = match variant {
        DemoVariant::Chebyshev => (t.clone(), t.iter().map(|x| 1.0 - x).collect()),
        DemoVariant::Constant => (vec![0.5; DEMO_POINTS], vec![0.5; DEMO_POINTS]),
        DemoVariant::SameMonotone => (t.clone(), t.clone()),
    };
    TriangularPair {
        a: (0..DEMO_POINTS)
            .map(|i| Matrix2::new(f[i], 1.0, 0.0, g[i]))
            .collect(),
        b: (0..DEMO_POINTS)
            .map(|i| Matrix2::new(f[i], 0.0, 1.0, g[i]))
            .collect(),
    }
}

#[derive(Debug, Serialize)]
struct DemoContext {
    variant: DemoVariant,
    lhs: [[f64; 2]; 2],
    rhs: [[f64; 2]; 2],
    diagonal_gaps: [f64; 2],
}

fn variant_name(v: DemoVariant) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_owned())
        .unwrap_or_default()
}

fn rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn cmd_demo_example(args: &DemoArgs) -> CmdResult {
    let tol = Tolerances::default();
    let pair = demo_pair(args.variant);
    let ones = WeightVector::uniform(DEMO_POINTS);
    let example = triangular_example(&pair, &ones, &ones)?;
    let gaps = example.diagonal_gaps();
    let pass = gaps.iter().all(|&g| g >= -tol.psd_tol);
    let lhs = rows(&example.lhs);
    let rhs = rows(&example.rhs);
    match args.format {
        None => {
            let mut out = open_output(args.out.as_ref())?;
            writeln!(out, "points: {DEMO_POINTS} on [0, 1], alpha = beta = 1")?;
            writeln!(out, "lhs: diag({:?}, {:?})", lhs[0][0], lhs[1][1])?;
            writeln!(out, "rhs: diag({:?}, {:?})", rhs[0][0], rhs[1][1])?;
            writeln!(out, "gaps: {:?} {:?}", gaps[0], gaps[1])?;
            writeln!(out, "off-diagonal zero: {}", example.is_diagonal())?;
            out.flush()?;
        }
        Some(format) => {
            let scale = lhs
                .iter()
                .flatten()
                .chain(rhs.iter().flatten())
                .fold(0.0f64, |m, x| m.max(x.abs()));
            let records = [CellRecord {
                inequality: "example".into(),
                seed: 0,
                dim: 2,
                n: DEMO_POINTS,
                r: None,
                lambda: None,
                min_eig: gaps[0].min(gaps[1]),
                scale,
                verdict: if pass { Verdict::Pass } else { Verdict::Fail },
                validated: true,
                inputs_digest: format!("example/{}", variant_name(args.variant)),
            }];
            let report = Report {
                timestamp: now(),
                command: "demo-example",
                records: &records,
                context: DemoContext {
                    variant: args.variant,
                    lhs,
                    rhs,
                    diagonal_gaps: gaps,
                },
            };
            emit(format, args.out.as_ref(), &report)?;
        }
    }
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}
