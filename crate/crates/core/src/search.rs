//! Derivative-free minimisers: compass pattern search in two variables and
//! golden-section search on an interval.

use serde::{Deserialize, Serialize};

use crate::approx::GaussianParams;
use crate::error::{Error, Result};

/// Settings for [`pattern_search`] and [`minimize_2d`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSearchConfig {
    pub initial_step: f64,
    pub shrink: f64,
    pub expand: f64,
    pub min_step: f64,
    pub max_evals: usize,
    /// Lower bounds `(a_min, b_min)`; trial points below them are skipped.
    pub lower_bounds: (f64, f64),
}

impl Default for PatternSearchConfig {
    fn default() -> Self {
        PatternSearchConfig {
            initial_step: 0.5,
            shrink: 0.5,
            expand: 2.0,
            min_step: 1e-9,
            max_evals: 20_000,
            lower_bounds: (1e-8, 1e-8),
        }
    }
}

impl PatternSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.min_step > 0.0
            && self.min_step < self.initial_step
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.expand >= 1.0
            && self.max_evals > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::BadParameter(format!("invalid pattern search config {self:?}")))
        }
    }
}

/// Outcome of a two-variable search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub point: [f64; 2],
    pub value: f64,
    pub evals: usize,
}

/// Compass search over `[lower.0, inf) x [lower.1, inf)`.
///
/// Polls `+x, -x, +y, -y` at the current step, moves to the first strictly
/// better point and expands the step, otherwise shrinks it. NaN objective
/// values never count as improvements.
pub fn minimize_2d<F>(objective: F, start: [f64; 2], cfg: &PatternSearchConfig) -> SearchResult
where
    F: Fn([f64; 2]) -> f64,
{
    minimize_2d_in_frame(objective, start, cfg, [[1.0, 0.0], [0.0, 1.0]])
}

/// Compass search polling `+e0, -e0, +e1, -e1` for the frame `[e0, e1]`.
pub fn minimize_2d_in_frame<F>(
    objective: F,
    start: [f64; 2],
    cfg: &PatternSearchConfig,
    frame: [[f64; 2]; 2],
) -> SearchResult
where
    F: Fn([f64; 2]) -> f64,
{
    let lower = [cfg.lower_bounds.0, cfg.lower_bounds.1];
    let mut x = start;
    let mut fx = objective(x);
    let mut evals = 1;
    let mut step = cfg.initial_step;
    let dirs = [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)];

    'outer: while step >= cfg.min_step && evals < cfg.max_evals {
        for &(k, sign) in &dirs {
            let d = frame[k];
            let trial = [x[0] + sign * step * d[0], x[1] + sign * step * d[1]];
            if trial[0] < lower[0] || trial[1] < lower[1] || trial == x {
                continue;
            }
            let ft = objective(trial);
            evals += 1;
            if ft < fx {
                x = trial;
                fx = ft;
                step *= cfg.expand;
                continue 'outer;
            }
            if evals >= cfg.max_evals {
                break 'outer;
            }
        }
        step *= cfg.shrink;
    }
    SearchResult { point: x, value: fx, evals }
}

/// [`minimize_2d`] over Gaussian parameters `(a, b)`.
pub fn pattern_search<F>(objective: F, start: GaussianParams, cfg: &PatternSearchConfig) -> GaussianParams
where
    F: Fn(&GaussianParams) -> f64,
{
    let res = minimize_2d(|[a, b]| objective(&GaussianParams { a, b }), [start.a, start.b], cfg);
    GaussianParams { a: res.point[0], b: res.point[1] }
}

/// Alternate [`minimize_2d`] with searches in the diagonal frame until
/// neither improves. Axis-only polling stalls on kinks of max-type
/// objectives whose descent valley is not aligned with the axes.
pub fn minimize_2d_polished<F>(objective: F, start: [f64; 2], cfg: &PatternSearchConfig) -> SearchResult
where
    F: Fn([f64; 2]) -> f64,
{
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let frames = [[[1.0, 0.0], [0.0, 1.0]], [[s, s], [s, -s]]];
    let mut best = minimize_2d_in_frame(&objective, start, cfg, frames[0]);
    let mut evals = best.evals;
    let mut stalled = 0;
    let mut k = 1;
    while stalled < 2 && evals < cfg.max_evals {
        let budget = PatternSearchConfig { max_evals: cfg.max_evals - evals, ..*cfg };
        let next = minimize_2d_in_frame(&objective, best.point, &budget, frames[k % 2]);
        evals += next.evals;
        if next.value < best.value {
            best = SearchResult { evals, ..next };
            stalled = 0;
        } else {
            stalled += 1;
        }
        k += 1;
    }
    SearchResult { evals, ..best }
}

/// Golden-section search for a minimiser of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmin, min)` once the bracket is narrower than `tol`.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::ArgumentOrder { lo, hi });
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let p = pattern_search(
            |p| (p.a - 1.0).powi(2) + (p.b - 2.0).powi(2),
            GaussianParams { a: 3.0, b: 3.0 },
            &PatternSearchConfig::default(),
        );
        assert!((p.a - 1.0).abs() < 1e-6 && (p.b - 2.0).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn constant_objective_returns_start() {
        let start = GaussianParams { a: 0.3, b: 7.0 };
        assert_eq!(pattern_search(|_| 4.0, start, &PatternSearchConfig::default()), start);
    }

    #[test]
    fn respects_lower_bounds() {
        let cfg = PatternSearchConfig::default();
        let r = minimize_2d(|[x, y]| x + y, [1.0, 1.0], &cfg);
        assert!(r.point[0] >= 1e-8 && r.point[1] >= 1e-8);
        assert!(r.value < 1e-6);
    }

    #[test]
    fn eval_budget_is_respected() {
        let cfg = PatternSearchConfig { max_evals: 37, ..Default::default() };
        let r = minimize_2d(|[x, y]| (x - 100.0).powi(2) + y * y, [0.0, 1.0], &cfg);
        assert!(r.evals <= 37);
    }

    #[test]
    fn nan_never_accepted() {
        let cfg = PatternSearchConfig::default();
        let r = minimize_2d(|[x, _]| if x > 1.0 { f64::NAN } else { -x }, [0.5, 0.5], &cfg);
        assert!(r.value.is_finite());
        assert!((r.point[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = PatternSearchConfig { shrink: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = PatternSearchConfig { min_step: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(PatternSearchConfig::default().validate().is_ok());
    }

    #[test]
    fn golden_section_minimum() {
        let (x, v) = golden_section(|x| (x - 0.3).powi(2), 0.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v < 1e-18);
        let (x, _) = golden_section(|x: f64| -x.sin(), 0.0, 3.0, 1e-10).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-5);
        assert!(golden_section(|x| x, 1.0, 1.0, 1e-9).is_err());
    }
}
