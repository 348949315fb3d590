//! Explicit constants for power functions and `f1`, and the two
//! piecewise-quadratic approximation bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{golden_section, minimize_2d, PatternSearchConfig};
use crate::special::f1;

fn check_exponent(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("exponent must lie in (0, 1), got {r}")))
    }
}

/// `sup_c min(c, 1) / f1(c)`, attained at `c = 1`.
pub fn trivial_constant() -> f64 {
    2.0
}

/// `min(c, 1) / f1(c)`: range-diameter bound above 1, Lipschitz bound below.
pub fn trivial_ratio(c: f64) -> f64 {
    c.min(1.0) / f1(c)
}

/// Bound on the approximation functional of `f1` from shifting: `c` below 1/2, `1 - 1/(4c)` above.
pub fn shift_bound_e(c: f64) -> f64 {
    if c < 0.5 {
        c
    } else {
        1.0 - 1.0 / (4.0 * c)
    }
}

/// `sup_c shift_bound_e(c) / f1(c)`.
///
/// For `c >= 1/2` the ratio is `1 + 3u/4 - u^2/4` in `u = 1/c`, maximal at
/// `u = 3/2`; below 1/2 it is `c + 1 < 3/2`.
pub fn shift_constant() -> f64 {
    let u = 1.5;
    1.0 + 0.75 * u - 0.25 * u * u
}

pub fn gamma_boyadzhiev(r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok((PI * r).sin() / (PI * r * (1.0 - r)))
}

pub fn gamma_olsen_pedersen(r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok((1.0 - r).powf(r - 1.0))
}

pub fn gamma_pedersen(r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok(2f64.powf(r) * (1.0 - r).powf(-0.5 * (1.0 - r)) * (1.0 + r).powf(-0.5 * (1.0 + r)))
}

/// `(2 - r) 2^(r - 1)`, the minimum of [`tangent_objective`] over `a`.
pub fn gamma_tangent(r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok((2.0 - r) * 2f64.powf(r - 1.0))
}

/// `(2 - r) [((1 - r)/2) a^r + r a^(r-1)]`, minimised at `a = 2`.
pub fn tangent_objective(r: f64, a: f64) -> f64 {
    (2.0 - r) * (0.5 * (1.0 - r) * a.powf(r) + r * a.powf(r - 1.0))
}

/// `min_{t in (0, pi)} t^r / sin t` and its minimiser.
///
/// `ln(t^r / sin t)` is strictly convex on `(0, pi)`, so golden-section
/// search finds the unique minimiser.
pub fn gamma_sin(r: f64) -> Result<(f64, f64)> {
    check_exponent(r)?;
    let (t, v) = golden_section(|t| t.powf(r) / t.sin(), 1e-9, PI - 1e-9, 1e-10)?;
    Ok((v, t))
}

/// `csc(1)`.
pub fn csc1() -> f64 {
    1.0 / 1f64.sin()
}

/// `min(t + 1, (t + 1)/t)`: Lipschitz bound below 1, range bound above.
pub fn simple_ct(t: f64) -> f64 {
    (t + 1.0).min((t + 1.0) / t)
}

/// `(c + 1) / (1/2 + sqrt(1/4 + c^2))`, maximal (5/4) at `c = 2/3`.
pub fn scaled_cayley_cc(c: f64) -> f64 {
    (c + 1.0) / (0.5 + (0.25 + c * c).sqrt())
}

/// Scale `t = (-1 + sqrt(1 + 4c^2)) / (2c)` at which the Cayley estimate is optimal.
pub fn cayley_optimal_scale(c: f64) -> f64 {
    2.0 * c / (1.0 + (1.0 + 4.0 * c * c).sqrt())
}

/// Operator monotone family for [`lv_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LvFamily {
    /// `x / (x + t)`.
    Resolvent { t: f64 },
    /// `x^r`.
    Power { r: f64 },
}

/// Commutator size below which the extended absolute-value estimate is not claimed.
pub fn lv_threshold(family: LvFamily, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::BadParameter(format!("x must be positive, got {x}")));
    }
    match family {
        LvFamily::Resolvent { t } if t > 0.0 => Ok(t.sqrt() * (x + t).sqrt() - t),
        LvFamily::Power { r } if r > 0.0 && r < 1.0 => Ok(r.powf(1.0 / (1.0 - r)) * x),
        other => Err(Error::BadParameter(format!("invalid family parameter {other:?}"))),
    }
}

/// Knot `a` and slope offset `m` of a piecewise-quadratic approximant.
///
/// Below the knot `g'` is the line through `(a, F(a))` with slope
/// `F'(a) + m`; above it `g = f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseQuadParams {
    pub a: f64,
    pub m: f64,
}

impl PiecewiseQuadParams {
    pub fn new(a: f64, m: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() && m <= 0.0 && m.is_finite() {
            Ok(PiecewiseQuadParams { a, m })
        } else {
            Err(Error::BadParameter(format!("need a > 0 and m <= 0, got a = {a}, m = {m}")))
        }
    }
}

/// Quadratic part of `g` below the knot, matching `f` in value and `F` in slope at `a`.
fn pq_g(x: f64, a: f64, f_a: f64, slope_a: f64, curvature: f64) -> f64 {
    let d = x - a;
    0.5 * curvature * d * d + slope_a * d + f_a
}

/// Bound for the square root at unit commutator size.
pub fn pq_sqrt_bound(p: &PiecewiseQuadParams) -> f64 {
    let (a, m) = (p.a, p.m);
    let slope_a = 0.5 / a.sqrt();
    let curvature = -0.25 * a.powf(-1.5) + m;
    let j = |x: f64| {
        if x >= a {
            0.0
        } else {
            x.sqrt() - pq_g(x, a, a.sqrt(), slope_a, curvature)
        }
    };
    let r = (1.0 + 8.0 / (1.0 - 4.0 * m * a.powf(1.5))).sqrt();
    let t_star = 0.25 * a * (r - 1.0) * (r - 1.0);
    let g_prime_0 = 0.75 / a.sqrt() - m * a;
    j(t_star) - j(0.0).min(0.0) + g_prime_0
}

/// Critical point `t_*` of `j = f1 - g` below the knot.
pub fn pq_f1_critical_point(p: &PiecewiseQuadParams) -> f64 {
    let s = p.a + 1.0;
    let q = 2.0 - p.m * s.powi(3);
    -1.0 + s * (1.0 + (1.0 + 4.0 * q).sqrt()) / (2.0 * q)
}

/// `(sup j - inf j + c g'(0)) / f1(c)` for the piecewise-quadratic approximant of `f1`.
pub fn pq_f1_bound(c: f64, p: &PiecewiseQuadParams) -> f64 {
    let (a, m) = (p.a, p.m);
    let s = a + 1.0;
    let slope_a = 1.0 / (s * s);
    let curvature = -2.0 / (s * s * s) + m;
    let j = |x: f64| {
        if x >= a {
            0.0
        } else {
            f1(x) - pq_g(x, a, f1(a), slope_a, curvature)
        }
    };
    let t_star = pq_f1_critical_point(p);
    let osc = if t_star > 0.0 { j(t_star) - j(0.0).min(0.0) } else { j(0.0) };
    let g_prime_0 = a * (2.0 / (s * s * s) - m) + slope_a;
    (osc + c * g_prime_0) / f1(c)
}

/// Best parameters found for one `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PqNode {
    pub c: f64,
    pub value: f64,
    pub params: PiecewiseQuadParams,
}

/// Minimise [`pq_f1_bound`] over `a > 0`, `m <= 0` by compass search from `start`.
pub fn pq_f1_optimize(c: f64, start: PiecewiseQuadParams, cfg: &PatternSearchConfig) -> PqNode {
    // Search in (a, -m) so both coordinates have a lower bound.
    let bounded = PatternSearchConfig { lower_bounds: (cfg.lower_bounds.0, 0.0), ..*cfg };
    let best = minimize_2d(
        |[a, s]| pq_f1_bound(c, &PiecewiseQuadParams { a, m: -s }),
        [start.a, -start.m],
        &bounded,
    );
    PqNode {
        c,
        value: best.value,
        params: PiecewiseQuadParams { a: best.point[0], m: -best.point[1] },
    }
}

/// Search settings for the piecewise-quadratic scans: defaults with a `1e-10` step floor.
pub fn pq_search_config() -> PatternSearchConfig {
    PatternSearchConfig { min_step: 1e-10, ..PatternSearchConfig::default() }
}

/// Optimise every node of `grid`, each starting from the previous optimum.
pub fn pq_f1_scan(grid: &[f64], cfg: &PatternSearchConfig) -> Vec<PqNode> {
    let mut start = PiecewiseQuadParams { a: 1.0, m: 0.0 };
    grid.iter()
        .map(|&c| {
            let node = pq_f1_optimize(c, start, cfg);
            start = node.params;
            node
        })
        .collect()
}

/// Uniform constant over `(0, inf)` from a scan: per-interval lifts on
/// `[c_1, c_n + dc]`, `c + 1` below `c_1` and the trivial ratio beyond.
pub fn pq_f1_lifted_constant(nodes: &[PqNode]) -> Result<f64> {
    let (first, last) = match (nodes.first(), nodes.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::CoverageGap("no nodes".into())),
    };
    let spacing = nodes.windows(2).map(|w| w[1].c - w[0].c).fold(0.0, f64::max);
    let mut best = (first.c + 1.0).max(trivial_ratio(last.c + spacing));
    for (k, node) in nodes.iter().enumerate() {
        let next = nodes.get(k + 1).map_or(node.c + spacing, |n| n.c);
        best = best.max(node.value * (next + 1.0) / (node.c + 1.0));
    }
    Ok(best)
}
