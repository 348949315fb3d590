//! Scalar building blocks shared by every bound.

/// The pivot operator monotone function `x / (x + 1)`.
///
/// Every non-negative operator monotone function reduces to this one through
/// its integral representation, so all certified constants are stated
/// relative to it.
#[inline]
pub fn f1(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "f1 is defined on [0, inf)");
    x / (x + 1.0)
}

/// Error function, accurate to within a couple of ulps over the whole line.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series `2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))`
    /// with Neumaier summation. Independent of `libm`.
    fn erf_series(x: f64) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut power = x; // x^(2n+1) / n!
        for n in 0..60 {
            let term = if n % 2 == 0 { 1.0 } else { -1.0 } * power / (2 * n + 1) as f64;
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            power *= x * x / (n + 1) as f64;
        }
        2.0 / std::f64::consts::PI.sqrt() * (sum + comp)
    }

    #[test]
    fn f1_exact_fractions() {
        assert_eq!(f1(0.0), 0.0);
        assert_eq!(f1(1.0), 0.5);
        assert!((f1(2.0 / 3.0) - 0.4).abs() < 1e-16);
    }

    #[test]
    fn erf_matches_series() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-15);
        for i in 0..=40 {
            let x = i as f64 * 0.05;
            assert!((erf(x) - erf_series(x)).abs() < 1e-14, "x = {x}");
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn erf_saturates() {
        for x in [6.0, 7.5, 10.0, 100.0] {
            assert!((erf(x) - 1.0).abs() < 1e-14);
        }
    }
}
