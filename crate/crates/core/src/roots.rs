//! Deterministic bracketed root finding.

use crate::approx::ToleranceConfig;
use crate::error::{Error, Result};

/// Iteration cap for [`bracketed_root`].
pub const MAX_ITER: usize = 200;

/// Brent's method (inverse quadratic interpolation, secant, bisection
/// fallback) on a sign-changing bracket.
///
/// The convergence window is `T / 10`, so the returned point is always well
/// inside the `±T` window that [`crate::approx::erf_min_bound`] validates.
/// The iteration policy is fixed, so equal inputs give bit-identical outputs.
pub fn bracketed_root<F>(fun: F, lo: f64, hi: f64, tol: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let flo = fun(lo);
    let fhi = fun(hi);
    if !(flo * fhi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, flo, fhi });
    }

    let xtol = tol.root_tol / 10.0;
    let rtol = 4.0 * f64::EPSILON;

    let (mut xpre, mut xcur) = (lo, hi);
    let (mut fpre, mut fcur) = (flo, fhi);
    let (mut xblk, mut fblk) = (0.0, 0.0);
    let (mut spre, mut scur) = (0.0, 0.0);

    for _ in 0..MAX_ITER {
        if fpre != 0.0 && fcur != 0.0 && fpre.is_sign_negative() != fcur.is_sign_negative() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = (xtol + rtol * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(xcur);
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        xcur += if scur.abs() > delta { scur } else { delta.copysign(sbis) };
        fcur = fun(xcur);
    }
    Ok(xcur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{phi, x_end, x_star, GaussianParams};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn sqrt_two() {
        let r = bracketed_root(|x| x * x - 2.0, 1.0, 2.0, &tol()).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < tol().root_tol / 10.0);
    }

    #[test]
    fn linear_root() {
        let c = 0.37;
        let r = bracketed_root(|t| t - c, 0.0, 2.0 * c, &tol()).unwrap();
        assert!((r - c).abs() < 1e-6);
    }

    #[test]
    fn phi_root_inside_window() {
        let p = GaussianParams::new(1.0, 1.0).unwrap();
        let lo = x_star(p.b);
        let hi = x_end(&p).x;
        let r = bracketed_root(|x| phi(x, &p), lo, hi, &tol()).unwrap();
        // Fine-sampling oracle: the sign change must sit inside [r - T, r + T].
        let t = tol().root_tol;
        let n = 10_000;
        let mut found = None;
        for i in 0..n {
            let x0 = lo + (hi - lo) * i as f64 / n as f64;
            let x1 = lo + (hi - lo) * (i + 1) as f64 / n as f64;
            if phi(x0, &p) < 0.0 && phi(x1, &p) >= 0.0 {
                found = Some((x0, x1));
            }
        }
        let (x0, x1) = found.unwrap();
        assert!(x1 >= r - t && x0 <= r + t);
        assert!(phi(r - t, &p) < 0.0 && phi(r + t, &p) > 0.0);
    }

    #[test]
    fn no_sign_change() {
        let err = bracketed_root(|x| x * x + 1.0, -1.0, 1.0, &tol()).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x - 0.3).sin() + 0.1 * x;
        let a = bracketed_root(f, -1.0, 2.0, &tol()).unwrap();
        let b = bracketed_root(f, -1.0, 2.0, &tol()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
