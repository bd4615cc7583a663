//! Verification cells, replay digests and the falsification harness.
//!
//! A [`Cell`] names an inequality, a field generator, a seed and the grid
//! coordinates. Fields and weights are regenerated deterministically from
//! those values, so a cell's digest string is enough to replay it exactly.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::chebyshev::{
    gap_discrete, gap_mean, gap_mean_two_weight, gap_mean_unchecked, gap_two_weight,
    pointwise_mean_gap, q_chain, GapReport, PointwiseStudy, Verdict,
};
use crate::error::{Error, Result};
use crate::fields::{
    gen_increasing_pair, gen_nonsynchronous_pair, gen_scaled_pair, OperatorField, WeightVector,
};
use crate::hermat::Tolerances;
use crate::sampling::{nonnegative_weights, rng_for, WEIGHT_STREAM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Inequality {
    /// Two-weight inequality for synchronous fields.
    Thm21,
    /// Its discrete instance with weights `ω`, `ν`.
    Cor22,
    /// Monotone refinement chain `Q(1) ≤ … ≤ Q(n)`.
    Thm31,
    /// Pointwise `A∘B ⪰ (A m_{r,λ} B) ∘ (A m_{r,1−λ} B)`.
    Path1,
    /// Interpolational-mean inequality for positive increasing fields.
    Thm41,
    /// Two-weight interpolational-mean variant (exploratory).
    Cor41,
}

impl Inequality {
    pub const ALL: [Inequality; 6] = [
        Inequality::Thm21,
        Inequality::Cor22,
        Inequality::Thm31,
        Inequality::Path1,
        Inequality::Thm41,
        Inequality::Cor41,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::Thm21 => "thm21",
            Inequality::Cor22 => "cor22",
            Inequality::Thm31 => "thm31",
            Inequality::Path1 => "path1",
            Inequality::Thm41 => "thm41",
            Inequality::Cor41 => "cor41",
        }
    }

    /// Whether cells are parametrized by `(r, λ)`.
    pub fn uses_mean(self) -> bool {
        matches!(
            self,
            Inequality::Path1 | Inequality::Thm41 | Inequality::Cor41
        )
    }

    /// The generator whose output satisfies this inequality's hypotheses.
    pub fn default_generator(self) -> Generator {
        if self.uses_mean() {
            Generator::Increasing
        } else {
            Generator::Scaled
        }
    }

    /// Exploratory inequalities are reported but never asserted.
    pub fn is_exploratory(self) -> bool {
        self == Inequality::Cor41
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::UnknownInequality(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Scaled,
    Increasing,
    Nonsynchronous,
}

impl Generator {
    pub const ALL: [Generator; 3] = [
        Generator::Scaled,
        Generator::Increasing,
        Generator::Nonsynchronous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Scaled => "scaled",
            Generator::Increasing => "increasing",
            Generator::Nonsynchronous => "nonsynchronous",
        }
    }

    pub fn generate(
        self,
        dim: usize,
        n: usize,
        seed: u64,
    ) -> Result<(OperatorField, OperatorField)> {
        match self {
            Generator::Scaled => gen_scaled_pair(dim, n, seed),
            Generator::Increasing => gen_increasing_pair(dim, n, seed),
            Generator::Nonsynchronous => gen_nonsynchronous_pair(dim, n, seed),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownGenerator(s.to_owned()))
    }
}

/// One verification cell. `r` and `lambda` are set exactly for mean inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub inequality: Inequality,
    pub generator: Generator,
    pub seed: u64,
    pub dim: usize,
    pub n: usize,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
}

/// Weights `α`, `β` (or `ω`, `ν`) of a cell.
pub fn cell_weights(n: usize, seed: u64) -> Result<(WeightVector, WeightVector)> {
    let mut rng = rng_for(seed, WEIGHT_STREAM);
    let alpha = WeightVector::new(nonnegative_weights(n, &mut rng))?;
    let beta = WeightVector::new(nonnegative_weights(n, &mut rng))?;
    Ok((alpha, beta))
}

impl Cell {
    /// Canonical replay string, e.g. `thm21/scaled/seed=42/dim=3/n=5`.
    /// `r` and `λ` are printed with Rust's shortest round-trip formatting.
    pub fn digest(&self) -> String {
        let mut s = format!(
            "{}/{}/seed={}/dim={}/n={}",
            self.inequality, self.generator, self.seed, self.dim, self.n
        );
        if let Some(r) = self.r {
            s.push_str(&format!("/r={r:?}"));
        }
        if let Some(lambda) = self.lambda {
            s.push_str(&format!("/lambda={lambda:?}"));
        }
        s
    }

    pub fn from_digest(digest: &str) -> Result<Self> {
        let bad = || Error::MalformedDigest(digest.to_owned());
        let mut parts = digest.split('/');
        let inequality: Inequality = parts.next().ok_or_else(bad)?.parse()?;
        let generator: Generator = parts.next().ok_or_else(bad)?.parse()?;
        let (mut seed, mut dim, mut n, mut r, mut lambda) = (None, None, None, None, None);
        for part in parts {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key {
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                "dim" => dim = Some(value.parse().map_err(|_| bad())?),
                "n" => n = Some(value.parse().map_err(|_| bad())?),
                "r" => r = Some(value.parse().map_err(|_| bad())?),
                "lambda" => lambda = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let cell = Cell {
            inequality,
            generator,
            seed: seed.ok_or_else(bad)?,
            dim: dim.ok_or_else(bad)?,
            n: n.ok_or_else(bad)?,
            r,
            lambda,
        };
        if inequality.uses_mean() != (r.is_some() && lambda.is_some()) {
            return Err(bad());
        }
        Ok(cell)
    }

    fn mean_parameters(&self) -> Result<(f64, f64)> {
        match (self.r, self.lambda) {
            (Some(r), Some(lambda)) => Ok((r, lambda)),
            _ => Err(Error::InvalidParameter {
                name: "r/lambda",
                value: f64::NAN,
                reason: "mean inequalities need both r and lambda",
            }),
        }
    }

    /// Regenerates the cell's inputs and assembles its gap.
    ///
    /// With the inequality's own generator the hypothesis-checked assemblers
    /// are used; any other generator runs the unchecked assembly so that
    /// violations surface as failing verdicts.
    pub fn run(&self, tol: &Tolerances) -> Result<GapReport> {
        let (f, g) = self.generator.generate(self.dim, self.n, self.seed)?;
        let (alpha, beta) = cell_weights(self.n, self.seed)?;
        let checked = self.generator == self.inequality.default_generator();
        let report = match self.inequality {
            Inequality::Thm21 => gap_two_weight(&f, &g, &alpha, &beta, tol)?,
            Inequality::Cor22 => gap_discrete(&f, &g, &alpha, &beta, tol)?,
            Inequality::Thm31 => {
                let chain = q_chain(&f, &g, &alpha, &beta)?;
                let check = chain.check(tol)?;
                let span = chain.last() - chain.first();
                let mut report = GapReport::new("thm31", span, chain.scale, tol)?;
                report.min_eig = check.min_increment_eig;
                report.verdict = if check.passed() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                report
            }
            Inequality::Path1 => {
                let (r, lambda) = self.mean_parameters()?;
                let last = self.n - 1;
                pointwise_mean_gap(f.at(last), g.at(last), r, lambda, tol)?
            }
            Inequality::Thm41 => {
                let (r, lambda) = self.mean_parameters()?;
                if checked {
                    gap_mean(&f, &g, &alpha, r, lambda, tol)?
                } else {
                    gap_mean_unchecked(&f, &g, &alpha, r, lambda, tol)?
                }
            }
            Inequality::Cor41 => {
                let (r, lambda) = self.mean_parameters()?;
                gap_mean_two_weight(&f, &g, &alpha, &beta, r, lambda, tol)?
            }
        };
        Ok(report.with_digest(self.digest()))
    }
}

/// One row of a campaign report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub inequality: String,
    pub seed: u64,
    pub dim: usize,
    pub n: usize,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
    pub min_eig: f64,
    pub scale: f64,
    pub verdict: Verdict,
    /// False for cells outside the validated region (or exploratory inequalities);
    /// their verdicts are reported but not asserted.
    pub validated: bool,
    pub inputs_digest: String,
}

impl CellRecord {
    /// A validated cell that failed.
    pub fn is_counted_failure(&self) -> bool {
        self.validated && self.verdict == Verdict::Fail
    }
}

/// Whether a cell's verdict is asserted, given the pointwise study.
pub fn is_validated(cell: &Cell, study: Option<&PointwiseStudy>) -> bool {
    if cell.inequality.is_exploratory() {
        return false;
    }
    match (cell.inequality.uses_mean(), study, cell.r, cell.lambda) {
        (false, _, _, _) => true,
        (true, Some(study), Some(r), Some(lambda)) => study.admits(r, lambda),
        (true, None, _, _) => true,
        _ => false,
    }
}

pub fn run_cell(
    cell: &Cell,
    tol: &Tolerances,
    study: Option<&PointwiseStudy>,
) -> Result<CellRecord> {
    let report = cell.run(tol)?;
    Ok(CellRecord {
        inequality: cell.inequality.name().to_owned(),
        seed: cell.seed,
        dim: cell.dim,
        n: cell.n,
        r: cell.r,
        lambda: cell.lambda,
        min_eig: report.min_eig,
        scale: report.scale,
        verdict: report.verdict,
        validated: is_validated(cell, study),
        inputs_digest: cell.digest(),
    })
}

/// Replays a digest, returning the regenerated gap report.
pub fn replay(digest: &str, tol: &Tolerances) -> Result<GapReport> {
    Cell::from_digest(digest)?.run(tol)
}

/// Grid description for [`enumerate_cells`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid<'a> {
    pub inequality: Inequality,
    pub generator: Generator,
    pub seed: u64,
    pub trials: usize,
    pub dims: &'a [usize],
    pub n_points: &'a [usize],
    pub r_grid: &'a [f64],
    pub lambda_grid: &'a [f64],
}

/// Cells in sorted order: trial (seed), dim, n, r, λ.
pub fn enumerate_cells(grid: &CellGrid<'_>) -> Vec<Cell> {
    let mut cells = Vec::new();
    for trial in 0..grid.trials {
        let seed = grid.seed.wrapping_add(trial as u64);
        for &dim in grid.dims {
            for &n in grid.n_points {
                let base = Cell {
                    inequality: grid.inequality,
                    generator: grid.generator,
                    seed,
                    dim,
                    n,
                    r: None,
                    lambda: None,
                };
                if grid.inequality.uses_mean() {
                    for &r in grid.r_grid {
                        for &lambda in grid.lambda_grid {
                            cells.push(Cell {
                                r: Some(r),
                                lambda: Some(lambda),
                                ..base
                            });
                        }
                    }
                } else {
                    cells.push(base);
                }
            }
        }
    }
    cells
}

/// Runs cells across worker threads; records come back in input order.
pub fn run_cells(
    cells: &[Cell],
    tol: &Tolerances,
    study: Option<&PointwiseStudy>,
) -> Result<Vec<CellRecord>> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(cells.len().max(1));
    let chunk = cells.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|c| run_cell(c, tol, study))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(cells.len());
        for h in handles {
            out.extend(h.join().expect("cell worker panicked")?);
        }
        Ok(out)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsificationReport {
    pub inequality: String,
    pub generator: String,
    pub seed: u64,
    pub trials_run: usize,
    pub first_failure: Option<CellRecord>,
}

impl FalsificationReport {
    pub fn found(&self) -> bool {
        self.first_failure.is_some()
    }
}

/// Searches for a failing verdict of `inequality` on fields from `generator`.
///
/// Trial `i` uses seed `seed + i`, `dim = 1 + i mod 4` and `n = 2 + i mod 7`;
/// mean inequalities use `(r, λ) = mean` (default `(0, 1/2)`).
pub fn falsify(
    inequality: &str,
    generator: &str,
    trials: usize,
    seed: u64,
    mean: Option<(f64, f64)>,
    tol: &Tolerances,
) -> Result<FalsificationReport> {
    let ineq: Inequality = inequality.parse()?;
    let gen: Generator = generator.parse()?;
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "at least one trial is required",
        });
    }
    let (r, lambda) = mean.unwrap_or((0.0, 0.5));
    let mut trials_run = 0;
    for i in 0..trials {
        trials_run += 1;
        let cell = Cell {
            inequality: ineq,
            generator: gen,
            seed: seed.wrapping_add(i as u64),
            dim: 1 + i % 4,
            n: 2 + i % 7,
            r: ineq.uses_mean().then_some(r),
            lambda: ineq.uses_mean().then_some(lambda),
        };
        let mut record = run_cell(&cell, tol, None)?;
        if record.verdict == Verdict::Fail {
            record.validated = true;
            return Ok(FalsificationReport {
                inequality: ineq.name().to_owned(),
                generator: gen.name().to_owned(),
                seed,
                trials_run,
                first_failure: Some(record),
            });
        }
    }
    Ok(FalsificationReport {
        inequality: ineq.name().to_owned(),
        generator: gen.name().to_owned(),
        seed,
        trials_run,
        first_failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn names_round_trip() {
        for i in Inequality::ALL {
            assert_eq!(i.name().parse::<Inequality>().unwrap(), i);
        }
        for g in Generator::ALL {
            assert_eq!(g.name().parse::<Generator>().unwrap(), g);
        }
        assert!(matches!(
            "thm99".parse::<Inequality>(),
            Err(Error::UnknownInequality(_))
        ));
        assert!(matches!(
            "nope".parse::<Generator>(),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn digest_round_trip() {
        let cell = Cell {
            inequality: Inequality::Thm41,
            generator: Generator::Increasing,
            seed: 9,
            dim: 3,
            n: 4,
            r: Some(-0.5),
            lambda: Some(0.1 + 0.2),
        };
        let digest = cell.digest();
        assert_eq!(
            digest,
            "thm41/increasing/seed=9/dim=3/n=4/r=-0.5/lambda=0.30000000000000004"
        );
        assert_eq!(Cell::from_digest(&digest).unwrap(), cell);
        assert!(Cell::from_digest("thm41/increasing/seed=9/dim=3/n=4").is_err());
        assert!(Cell::from_digest("thm21/scaled/seed=x/dim=3/n=4").is_err());
    }

    #[test]
    fn replay_reproduces_min_eig() {
        let cell = Cell {
            inequality: Inequality::Thm21,
            generator: Generator::Scaled,
            seed: 5,
            dim: 4,
            n: 6,
            r: None,
            lambda: None,
        };
        let record = run_cell(&cell, &tol(), None).unwrap();
        let json = serde_json::to_string(&record).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let stored = parsed["min_eig"].as_f64().unwrap();
        let replayed = replay(parsed["inputs_digest"].as_str().unwrap(), &tol()).unwrap();
        assert_eq!(replayed.min_eig.to_bits(), stored.to_bits());
    }

    #[test]
    fn falsify_contract() {
        let found = falsify("cor22", "nonsynchronous", 1000, 0, None, &tol()).unwrap();
        assert!(found.found());
        assert_eq!(found.trials_run, 1);
        let clean = falsify("cor22", "scaled", 50, 0, None, &tol()).unwrap();
        assert!(!clean.found());
        assert!(falsify("cor22", "scaled", 0, 0, None, &tol()).is_err());
        assert!(matches!(
            falsify("nope", "scaled", 1, 0, None, &tol()),
            Err(Error::UnknownInequality(_))
        ));
        assert!(matches!(
            falsify("cor22", "nope", 1, 0, None, &tol()),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn enumeration_order_and_size() {
        let grid = CellGrid {
            inequality: Inequality::Thm41,
            generator: Generator::Increasing,
            seed: 100,
            trials: 2,
            dims: &[1, 2],
            n_points: &[2, 3],
            r_grid: &[-1.0, 0.0],
            lambda_grid: &[0.25, 0.5, 0.75],
        };
        let cells = enumerate_cells(&grid);
        assert_eq!(cells.len(), 2 * 2 * 2 * 2 * 3);
        assert_eq!(cells[0].seed, 100);
        assert_eq!(cells.last().unwrap().seed, 101);
        let plain = enumerate_cells(&CellGrid {
            inequality: Inequality::Thm21,
            generator: Generator::Scaled,
            ..grid
        });
        assert_eq!(plain.len(), 8);
        assert!(plain.iter().all(|c| c.r.is_none()));
    }

    #[test]
    fn threaded_run_matches_sequential() {
        let cells = enumerate_cells(&CellGrid {
            inequality: Inequality::Thm31,
            generator: Generator::Scaled,
            seed: 1,
            trials: 3,
            dims: &[1, 3],
            n_points: &[2, 5],
            r_grid: &[],
            lambda_grid: &[],
        });
        let threaded = run_cells(&cells, &tol(), None).unwrap();
        let sequential: Vec<_> = cells
            .iter()
            .map(|c| run_cell(c, &tol(), None).unwrap())
            .collect();
        assert_eq!(threaded, sequential);
        assert!(threaded.iter().all(|r| r.verdict == Verdict::Pass));
    }
}
