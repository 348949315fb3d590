//! Certified upper bounds for `E(c) / f1(c)` with a Gaussian approximant.
//!
//! The approximant `g` has derivative `G(x) = a exp(-b x^2)`, so
//! `g(x) = (a/2) sqrt(pi/b) erf(sqrt(b) x)` and its commutator Lipschitz
//! constant is `G(0) = a`. For `j = f1 - g` the bound is
//!
//! ```text
//! (sup j - inf j + c a) / f1(c)
//! ```
//!
//! The critical points of `j` are the roots of
//! `phi(x) = b x^2 - 2 ln(x + 1) - ln a`, which has the sign of `j'` on
//! `[0, inf)`. `phi` is strictly convex on `(-1, inf)` with minimiser
//! [`x_star`], so when `phi(x_star) < 0` there is exactly one root `x2` in
//! `(x_star, x_end)` and, iff `a < 1`, one root `x1` in `(0, x_star)`.
//! The roots are located numerically, checked through the sign of `j'` at
//! `x ± T`, and the location error is paid for by the cushion
//! `2 (1 + a) T` (since `|j'| <= 1 + a`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::bracketed_root;
use crate::special::{erf, f1};

/// Value returned when `phi(x_star) >= 0`; larger than every bound of interest.
pub const SENTINEL: f64 = 10.0;

/// Parameters of the Gaussian `G(x) = a exp(-b x^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    /// `G(0)`, the commutator Lipschitz budget of `g`.
    pub a: f64,
    /// Decay rate.
    pub b: f64,
}

impl GaussianParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let p = GaussianParams { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite() {
            Ok(())
        } else {
            Err(Error::BadParameter(format!(
                "Gaussian parameters must be positive and finite, got a = {}, b = {}",
                self.a, self.b
            )))
        }
    }
}

/// Root location tolerance `T` and computation tolerance `T_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub root_tol: f64,
    pub comp_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { root_tol: 1e-5, comp_tol: 1e-10 }
    }
}

impl ToleranceConfig {
    pub fn new(root_tol: f64, comp_tol: f64) -> Result<Self> {
        if !(comp_tol > 0.0 && comp_tol < root_tol && root_tol.is_finite()) {
            return Err(Error::BadParameter(format!(
                "need 0 < T_f < T, got T = {root_tol}, T_f = {comp_tol}"
            )));
        }
        Ok(ToleranceConfig { root_tol, comp_tol })
    }
}

/// Result of [`erf_min_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErfMinOutcome {
    /// Certified upper bound, or [`SENTINEL`] when degenerate.
    pub value: f64,
    /// `(x1, x2)`: approximate critical points of `j`. `x1` is present only for `a < 1`.
    pub roots: Option<(Option<f64>, f64)>,
    /// The cushion `2 (1 + a) T`.
    pub error_budget: f64,
    /// `phi(x_star) >= 0`.
    pub degenerate: bool,
}

/// `g(x) = (a/2) sqrt(pi/b) erf(sqrt(b) x)`, the antiderivative of `G` with `g(0) = 0`.
pub fn g_erf(x: f64, p: &GaussianParams) -> f64 {
    0.5 * p.a * (std::f64::consts::PI / p.b).sqrt() * erf(p.b.sqrt() * x)
}

/// `j = f1 - g`.
pub fn j_func(x: f64, p: &GaussianParams) -> f64 {
    f1(x) - g_erf(x, p)
}

/// `j'(x) = 1/(x+1)^2 - a exp(-b x^2)`.
pub fn j_prime(x: f64, p: &GaussianParams) -> f64 {
    let s = x + 1.0;
    1.0 / (s * s) - p.a * (-p.b * x * x).exp()
}

/// `lim_{x -> inf} j(x) = 1 - (a/2) sqrt(pi/b)`.
pub fn j_infinity(p: &GaussianParams) -> f64 {
    1.0 - 0.5 * p.a * (std::f64::consts::PI / p.b).sqrt()
}

/// `phi(x) = b x^2 - 2 ln(x + 1) - ln a` on `(-1, inf)`.
pub fn phi(x: f64, p: &GaussianParams) -> f64 {
    p.b * x * x - 2.0 * x.ln_1p() - p.a.ln()
}

/// Global minimiser of `phi`: the positive root of `x^2 + x - 1/b`.
pub fn x_star(b: f64) -> f64 {
    // Rationalised form of (-1 + sqrt(1 + 4/b)) / 2; no cancellation for large b.
    let r = (1.0 + 4.0 / b).sqrt();
    (2.0 / b) / (1.0 + r)
}

/// Right end of the bracket for the largest root of `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightBracket {
    pub x: f64,
    /// The radicand `1 + b ln a` was negative and clamped to zero.
    pub clamped: bool,
    /// Number of doublings needed before `phi(x) > 0`.
    pub doublings: u32,
}

/// `x_e = (1 + sqrt(1 + b ln a)) / b`, beyond which `phi > 0`.
///
/// A negative radicand is clamped to zero and the result is re-verified,
/// doubling `x_e` (at most 60 times) until `phi(x_e) > 0`.
pub fn x_end(p: &GaussianParams) -> RightBracket {
    let radicand = 1.0 + p.b * p.a.ln();
    let clamped = radicand < 0.0;
    let mut x = (1.0 + radicand.max(0.0).sqrt()) / p.b;
    let mut doublings = 0;
    while phi(x, p) <= 0.0 && doublings < 60 {
        x *= 2.0;
        doublings += 1;
    }
    RightBracket { x, clamped, doublings }
}

fn check_root(
    root: f64,
    tol: &ToleranceConfig,
    p: &GaussianParams,
    rising: bool,
) -> Result<()> {
    let (t, tf) = (tol.root_tol, tol.comp_tol);
    if root - t < tf {
        return Err(Error::DomainViolation(format!(
            "critical point window [{}, {}] leaves [T_f, inf)",
            root - t,
            root + t
        )));
    }
    let left = j_prime(root - t, p);
    let right = j_prime(root + t, p);
    let ok = if rising {
        left <= -tf && right >= tf
    } else {
        left >= tf && right <= -tf
    };
    if ok {
        Ok(())
    } else {
        Err(Error::RootValidationFailed {
            root,
            reason: if rising {
                "j' must go from <= -T_f to >= T_f across the window"
            } else {
                "j' must go from >= T_f to <= -T_f across the window"
            },
        })
    }
}

/// Certified upper bound of `(sup j - inf j + c a) / f1(c)` over `x >= 0`.
///
/// Returns the degenerate sentinel when `phi(x_star) >= 0`. Fails with
/// [`Error::RootValidationFailed`] or [`Error::DomainViolation`] when the
/// located critical points cannot be validated; such triples must be
/// rejected, not patched.
pub fn erf_min_bound(c: f64, p: &GaussianParams, tol: &ToleranceConfig) -> Result<ErfMinOutcome> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::BadParameter(format!("c must be positive, got {c}")));
    }
    p.validate()?;

    let error_budget = 2.0 * (1.0 + p.a) * tol.root_tol;
    let xs = x_star(p.b);
    if phi(xs, p) >= 0.0 {
        return Ok(ErfMinOutcome { value: SENTINEL, roots: None, error_budget, degenerate: true });
    }

    let phi_p = |x: f64| phi(x, p);
    let xe = x_end(p).x;
    let x2 = bracketed_root(phi_p, xs, xe, tol)?;
    check_root(x2, tol, p, true)?;

    let x1 = if p.a < 1.0 {
        let x1 = bracketed_root(phi_p, 0.0, xs, tol)?;
        check_root(x1, tol, p, false)?;
        Some(x1)
    } else {
        None
    };

    // j(0) = 0 exactly.
    let j_inf = j_infinity(p);
    let j2 = j_func(x2, p);
    let osc = match x1 {
        Some(x1) => j_func(x1, p).max(j_inf) - j2.min(0.0),
        None => j_inf.max(0.0) - j2,
    };

    Ok(ErfMinOutcome {
        value: (osc + error_budget + c * p.a) / f1(c),
        roots: Some((x1, x2)),
        error_budget,
        degenerate: false,
    })
}

/// [`erf_min_bound`] as a total objective: validation failures map to [`SENTINEL`].
pub fn erf_min_objective(c: f64, p: &GaussianParams, tol: &ToleranceConfig) -> f64 {
    match erf_min_bound(c, p, tol) {
        Ok(out) => out.value,
        Err(_) => SENTINEL,
    }
}
