//! Per-node parameter search over a grid of `c` values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{erf_min_bound, GaussianParams, ToleranceConfig, SENTINEL};
use crate::error::{Error, Result};
use crate::search::{minimize_2d_polished, PatternSearchConfig};

/// Starting point for the first node of a cold run.
pub const COLD_START: GaussianParams = GaussianParams { a: 0.9, b: 0.5 };

/// A certified bound at one grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub c: f64,
    /// Certified bound at `c`, or [`SENTINEL`] when `degenerate`.
    pub c_k: f64,
    pub params: GaussianParams,
    pub degenerate: bool,
}

impl BoundPoint {
    /// Re-certify `params` at `c`. Validation failures give a degenerate point.
    pub fn certify(c: f64, params: GaussianParams, tol: &ToleranceConfig) -> BoundPoint {
        match erf_min_bound(c, &params, tol) {
            Ok(out) if !out.degenerate => BoundPoint { c, c_k: out.value, params, degenerate: false },
            _ => BoundPoint { c, c_k: SENTINEL, params, degenerate: true },
        }
    }
}

/// One grid segment: nodes every `step` up to and including `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub step: f64,
    pub end: f64,
}

/// Build a piecewise uniform grid starting at `start`.
///
/// Node `i` of a segment beginning at `s` is `s + i * step`, computed from
/// the integer index, and every segment end is stored exactly.
pub fn build_grid(start: f64, segments: &[Segment]) -> Result<Vec<f64>> {
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::BadParameter(format!("grid start must be positive, got {start}")));
    }
    let mut grid = vec![start];
    let mut s = start;
    for seg in segments {
        if !(seg.step > 0.0 && seg.end > s) {
            return Err(Error::BadParameter(format!(
                "segment step {} to {} does not advance from {s}",
                seg.step, seg.end
            )));
        }
        let ratio = (seg.end - s) / seg.step;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 {
            return Err(Error::BadParameter(format!(
                "segment [{s}, {}] is not a whole number of steps of {}",
                seg.end, seg.step
            )));
        }
        let n = n as usize;
        grid.extend((1..n).map(|i| s + i as f64 * seg.step));
        grid.push(seg.end);
        s = seg.end;
    }
    Ok(grid)
}

/// 0.0195 to 1.5 in steps of 0.0005, to 10 in steps of 0.005, to 40 in steps of 0.05.
pub fn build_full_grid() -> Vec<f64> {
    build_grid(
        0.0195,
        &[
            Segment { step: 0.0005, end: 1.5 },
            Segment { step: 0.005, end: 10.0 },
            Segment { step: 0.05, end: 40.0 },
        ],
    )
    .expect("the fixed grid is well formed")
}

/// Check that `grid` is positive and strictly increasing.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    for (i, &c) in grid.iter().enumerate() {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::BadParameter(format!("grid node {i} is {c}")));
        }
        if i > 0 && c <= grid[i - 1] {
            return Err(Error::UnsortedGrid { index: i });
        }
    }
    Ok(())
}

/// Objective seen by the search. Degenerate and unverifiable triples rank
/// below every certified one; with the sentinel value they would attract the
/// search at small `c`, where every certified bound exceeds 10.
fn search_objective(c: f64, p: &GaussianParams, tol: &ToleranceConfig) -> f64 {
    match erf_min_bound(c, p, tol) {
        Ok(out) if !out.degenerate => out.value,
        _ => f64::INFINITY,
    }
}

/// Side of the log-spaced seed lattice scanned at every node.
pub const SEED_LATTICE: usize = 10;

/// Number of lattice points polished at every node in addition to the start.
pub const SEED_COUNT: usize = 3;

/// The [`SEED_COUNT`] best points of a fixed log-spaced lattice over
/// `a in [1e-3, 10^0.5]`, `b in [1e-4, 10^0.5]`.
fn lattice_seeds(c: f64, tol: &ToleranceConfig) -> Vec<GaussianParams> {
    let n = SEED_LATTICE;
    let mut scored = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let a = 10f64.powf(-3.0 + 3.5 * i as f64 / (n - 1) as f64);
            let b = 10f64.powf(-4.0 + 4.5 * k as f64 / (n - 1) as f64);
            let p = GaussianParams { a, b };
            let v = search_objective(c, &p, tol);
            if v.is_finite() {
                scored.push((v, p));
            }
        }
    }
    // Stable sort keeps lattice order among ties.
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    scored.into_iter().take(SEED_COUNT).map(|(_, p)| p).collect()
}

fn polish(c: f64, start: GaussianParams, cfg: &PatternSearchConfig, tol: &ToleranceConfig) -> (f64, GaussianParams) {
    let res = minimize_2d_polished(
        |[a, b]| search_objective(c, &GaussianParams { a, b }, tol),
        [start.a, start.b],
        cfg,
    );
    (res.value, GaussianParams { a: res.point[0], b: res.point[1] })
}

/// Search from `start` and from the lattice seeds, keeping the best result.
/// Ties go to the `start` branch, so a node never gets worse than its start.
fn optimize_node(
    c: f64,
    start: GaussianParams,
    cfg: &PatternSearchConfig,
    tol: &ToleranceConfig,
) -> BoundPoint {
    let mut best = polish(c, start, cfg, tol);
    for seed in lattice_seeds(c, tol) {
        let cand = polish(c, seed, cfg, tol);
        if cand.0 < best.0 {
            best = cand;
        }
    }
    let params = best.1;
    BoundPoint::certify(c, params, tol)
}

/// Search parameters for every node of `grid` and certify them.
///
/// Without `warm_start` the nodes are processed in order, each starting
/// from the previous node's optimum ([`COLD_START`] for the first). With a
/// table, nodes are independent and run in parallel.
pub fn optimize_grid(
    grid: &[f64],
    cfg: &PatternSearchConfig,
    tol: &ToleranceConfig,
    warm_start: Option<&[GaussianParams]>,
) -> Result<Vec<BoundPoint>> {
    check_grid(grid)?;
    cfg.validate()?;
    match warm_start {
        Some(table) => {
            if table.len() != grid.len() {
                return Err(Error::DimensionMismatch(grid.len(), table.len()));
            }
            Ok(grid
                .par_iter()
                .zip(table.par_iter())
                .map(|(&c, &start)| optimize_node(c, start, cfg, tol))
                .collect())
        }
        None => {
            let mut start = COLD_START;
            let mut out = Vec::with_capacity(grid.len());
            for &c in grid {
                let point = optimize_node(c, start, cfg, tol);
                if !point.degenerate {
                    start = point.params;
                }
                out.push(point);
            }
            Ok(out)
        }
    }
}

/// Sequential variant of the warm-started path, for determinism checks.
pub fn optimize_grid_sequential(
    grid: &[f64],
    cfg: &PatternSearchConfig,
    tol: &ToleranceConfig,
    warm_start: &[GaussianParams],
) -> Result<Vec<BoundPoint>> {
    check_grid(grid)?;
    cfg.validate()?;
    if warm_start.len() != grid.len() {
        return Err(Error::DimensionMismatch(grid.len(), warm_start.len()));
    }
    Ok(grid.iter().zip(warm_start).map(|(&c, &s)| optimize_node(c, s, cfg, tol)).collect())
}
