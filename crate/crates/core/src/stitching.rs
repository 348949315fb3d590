//! Turning bounds at finitely many commutator sizes into one constant.
//!
//! A bound `C` at size `c` implies `C (d + 1)/(c + 1)` at every `d >= c`
//! (shrink `X` by `c/d`). Each grid interval `[c_k, c_{k+1}]` therefore
//! inherits `D_k = C_k (c_{k+1} + 1)/(c_k + 1)`, and the ends of the grid are
//! closed off with explicit bounds: `c + 1` below `c_1` and
//! `(1 - 1/(4c))(c + 1)/c` above `c_n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::approx::SENTINEL;
use crate::closed_forms::{csc1, scaled_cayley_cc, shift_constant};
use crate::error::{Error, Result};
use crate::optimizer::BoundPoint;
use crate::quadrature::integrate;

/// Stitched bound over `(0, inf)` assembled from a grid of [`BoundPoint`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StitchedCertificate {
    pub points: Vec<BoundPoint>,
    /// `D_k` for the interval starting at `points[k]`.
    pub lifted: Vec<f64>,
    pub corner_small: f64,
    pub corner_large: f64,
    pub global_c: f64,
}

/// `C (d + 1)/(c + 1)`: a bound at `c` carried to `d >= c`.
pub fn continuity_lift(bound: f64, c: f64, d: f64) -> Result<f64> {
    if d < c {
        return Err(Error::ArgumentOrder { lo: c, hi: d });
    }
    Ok(bound * (d + 1.0) / (c + 1.0))
}

fn check_points(points: &[BoundPoint]) -> Result<()> {
    for (k, p) in points.iter().enumerate() {
        // Certified bounds above the sentinel are legitimate at small c; only
        // the sentinel itself marks a degenerate node.
        if p.degenerate || p.c_k == SENTINEL {
            return Err(Error::DegenerateNode { c: p.c });
        }
        if k > 0 && p.c <= points[k - 1].c {
            return Err(Error::UnsortedGrid { index: k });
        }
    }
    Ok(())
}

/// Largest gap between consecutive nodes; zero for a single node.
pub fn max_spacing(points: &[BoundPoint]) -> f64 {
    points.windows(2).map(|w| w[1].c - w[0].c).fold(0.0, f64::max)
}

/// `D_k` for every node. The last interval is `[c_n, c_n + dc]` with `dc` the
/// largest grid spacing.
pub fn stitch(points: &[BoundPoint]) -> Result<Vec<f64>> {
    check_points(points)?;
    let spacing = max_spacing(points);
    points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let next = points.get(k + 1).map_or(p.c + spacing, |n| n.c);
            continuity_lift(p.c_k, p.c, next)
        })
        .collect()
}

/// `sup_{c in (0, c1]} c / f1(c) = c1 + 1`.
pub fn corner_small(c1: f64) -> f64 {
    c1 + 1.0
}

/// `sup_{c >= cn} (1 - 1/(4c)) / f1(c)`.
///
/// The ratio rises on `[1/2, 2/3]` and decreases afterwards, so below `2/3`
/// the supremum is the peak value [`shift_constant`].
pub fn corner_large(cn: f64) -> Result<f64> {
    if !(cn >= 0.5) {
        return Err(Error::BadParameter(format!("upper corner needs c_n >= 1/2, got {cn}")));
    }
    if cn < 2.0 / 3.0 {
        return Ok(shift_constant());
    }
    Ok((1.0 - 1.0 / (4.0 * cn)) * (cn + 1.0) / cn)
}

/// Stitch `points` and close off both ends of `[c1, cn]`.
pub fn global_constant(points: &[BoundPoint], c1: f64, cn: f64) -> Result<StitchedCertificate> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f.c, l.c),
        _ => return Err(Error::CoverageGap("no grid points".into())),
    };
    if first != c1 || last != cn {
        return Err(Error::CoverageGap(format!(
            "grid spans [{first}, {last}] but the corners are at {c1} and {cn}"
        )));
    }
    let lifted = stitch(points)?;
    let corner_small = corner_small(c1);
    let corner_large = corner_large(cn)?;
    let global_c = lifted.iter().copied().fold(corner_small.max(corner_large), f64::max);
    Ok(StitchedCertificate { points: points.to_vec(), lifted, corner_small, corner_large, global_c })
}

/// Constant for the square root from the grid bounds.
///
/// Integrates the bound `C(t)/((1 + t) sqrt(t))` against the resolvent
/// representation of `A^(1/2)`: `C(t) <= 1 + t` below `c_1`,
/// `C(t) <= C_k (t + 1)/(c_k + 1)` on each grid interval and
/// `C(t) <= (1 + t)/t` above `c_n`.
pub fn sqrt_constant(points: &[BoundPoint]) -> Result<f64> {
    check_points(points)?;
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f.c, l.c),
        _ => return Err(Error::CoverageGap("no grid points".into())),
    };
    let middle: f64 = points
        .windows(2)
        .map(|w| 2.0 * w[0].c_k / (w[0].c + 1.0) * (w[1].c.sqrt() - w[0].c.sqrt()))
        .sum();
    Ok((2.0 * first.sqrt() + middle + 2.0 / last.sqrt()) / PI)
}

/// `(1/pi) int_0^inf bound(t) dt / ((1 + t) sqrt t)` via `t = tan^2(theta)`.
pub fn resolvent_average<F: Fn(f64) -> f64>(bound: F, abs_tol: f64) -> Result<f64> {
    let integrand = |theta: f64| {
        let t = theta.tan();
        bound(t * t)
    };
    Ok(2.0 / PI * integrate(integrand, 0.0, PI / 2.0, abs_tol)?.value)
}

/// Square-root constant from the explicit operator-norm curve `min(csc 1, Cayley bound)`.
pub fn gamma_half_via_cc() -> Result<f64> {
    resolvent_average(|t| csc1().min(scaled_cayley_cc(t)), 1e-10)
}
