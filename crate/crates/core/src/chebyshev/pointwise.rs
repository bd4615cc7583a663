//! Scalar brute-force study of the pointwise inequality
//! `ab ≥ (a m_{r,λ} b)(a m_{r,1−λ} b)`.
//!
//! In the commuting case the inequality says `log M_r(λ)` lies below the chord
//! through `λ = 0, 1`, which holds when `log M_r` is convex in `λ` (r ≤ 0)
//! and reverses when it is concave (r > 0). The study tabulates this over a
//! grid so that matrix campaigns run only where the scalar case survives.

use serde::Serialize;

use crate::hermat::Tolerances;

/// Parameters to sweep. Ratios are `b/a` with `a = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyGrid {
    pub r: Vec<f64>,
    pub lambda: Vec<f64>,
    pub ratio: Vec<f64>,
}

impl Default for StudyGrid {
    fn default() -> Self {
        let mut lambda: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        lambda.extend([0.25, 0.75]);
        lambda.sort_by(f64::total_cmp);
        Self {
            r: vec![-1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0],
            lambda,
            ratio: (-10..=10).map(|k| 10f64.powf(k as f64 / 10.0)).collect(),
        }
    }
}

impl StudyGrid {
    /// Adds `(r, λ)` values not already swept.
    pub fn extend(&mut self, r: &[f64], lambda: &[f64]) {
        let merge = |into: &mut Vec<f64>, extra: &[f64]| {
            for &x in extra {
                if !into.iter().any(|&y| same(x, y)) {
                    into.push(x);
                }
            }
            into.sort_by(f64::total_cmp);
        };
        merge(&mut self.r, r);
        merge(&mut self.lambda, lambda);
    }
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12
}

/// Scalar weighted power mean with `λ` weighting `b`.
fn scalar_mean(a: f64, b: f64, r: f64, lambda: f64, zero_r_cutoff: f64) -> f64 {
    if r.abs() < zero_r_cutoff {
        a.powf(1.0 - lambda) * b.powf(lambda)
    } else {
        ((1.0 - lambda) * a.powf(r) + lambda * b.powf(r)).powf(1.0 / r)
    }
}

/// `ab − M_r(λ) M_r(1−λ)` for positive scalars.
pub fn scalar_pointwise_gap(a: f64, b: f64, r: f64, lambda: f64, zero_r_cutoff: f64) -> f64 {
    a * b
        - scalar_mean(a, b, r, lambda, zero_r_cutoff)
            * scalar_mean(a, b, r, 1.0 - lambda, zero_r_cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyCell {
    pub r: f64,
    pub lambda: f64,
    /// Ratio `b/a` achieving the most negative relative gap.
    pub worst_ratio: f64,
    /// `gap / max(1, ab)` at the worst ratio.
    pub worst_relative_gap: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseStudy {
    pub grid: StudyGrid,
    pub cells: Vec<StudyCell>,
}

impl PointwiseStudy {
    pub fn run(grid: StudyGrid, tol: &Tolerances) -> Self {
        let mut cells = Vec::with_capacity(grid.r.len() * grid.lambda.len());
        for &r in &grid.r {
            for &lambda in &grid.lambda {
                let (worst_ratio, worst_relative_gap) = grid
                    .ratio
                    .iter()
                    .map(|&x| {
                        let gap = scalar_pointwise_gap(1.0, x, r, lambda, tol.zero_r_cutoff);
                        (x, gap / x.max(1.0))
                    })
                    .min_by(|p, q| p.1.total_cmp(&q.1))
                    .unwrap_or((1.0, 0.0));
                cells.push(StudyCell {
                    r,
                    lambda,
                    worst_ratio,
                    worst_relative_gap,
                    valid: worst_relative_gap >= -tol.psd_tol,
                });
            }
        }
        Self { grid, cells }
    }

    pub fn cell(&self, r: f64, lambda: f64) -> Option<&StudyCell> {
        self.cells
            .iter()
            .find(|c| same(c.r, r) && same(c.lambda, lambda))
    }

    /// Whether matrix campaigns may assert the inequality at `(r, λ)`.
    /// The endpoints `λ ∈ {0, 1}` are exact for every `r`; other cells must
    /// have been swept and survived.
    pub fn admits(&self, r: f64, lambda: f64) -> bool {
        if same(lambda, 0.0) || same(lambda, 1.0) {
            return true;
        }
        self.cell(r, lambda).is_some_and(|c| c.valid)
    }

    pub fn refuted(&self) -> impl Iterator<Item = &StudyCell> {
        self.cells.iter().filter(|c| !c.valid)
    }

    /// Exponents for which every swept `λ` survived.
    pub fn valid_exponents(&self) -> Vec<f64> {
        self.grid
            .r
            .iter()
            .copied()
            .filter(|&r| self.cells.iter().filter(|c| same(c.r, r)).all(|c| c.valid))
            .collect()
    }
}
