//! Numerical checks of commutator inequalities on random and fixed matrices.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closed_forms::{lv_threshold, LvFamily};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, gen_commutator, hermitian_eig, matrix_function, singular_values, spectral_apply, ui_norm,
    ComplexMatrix, NormKind,
};
use crate::special::f1;

/// Scalar functions available to the checks and the campaign runner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFn {
    /// `x / (x + 1)`.
    F1,
    Sqrt,
    /// `x^r`.
    Power(f64),
    /// `x / (x + t)`.
    Ft(f64),
    Linear,
}

impl ScalarFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarFn::F1 => f1(x),
            ScalarFn::Sqrt => x.sqrt(),
            ScalarFn::Power(r) => x.powf(r),
            ScalarFn::Ft(t) => x / (x + t),
            ScalarFn::Linear => x,
        }
    }

    /// The family used for the large-commutator threshold, if there is one.
    pub fn lv_family(&self) -> Option<LvFamily> {
        match *self {
            ScalarFn::F1 => Some(LvFamily::Resolvent { t: 1.0 }),
            ScalarFn::Ft(t) => Some(LvFamily::Resolvent { t }),
            ScalarFn::Sqrt => Some(LvFamily::Power { r: 0.5 }),
            ScalarFn::Power(r) => Some(LvFamily::Power { r }),
            ScalarFn::Linear => None,
        }
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::F1 => write!(f, "f1"),
            ScalarFn::Sqrt => write!(f, "sqrt"),
            ScalarFn::Power(r) => write!(f, "power:{r}"),
            ScalarFn::Ft(t) => write!(f, "ft:{t}"),
            ScalarFn::Linear => write!(f, "linear"),
        }
    }
}

impl FromStr for ScalarFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadParameter(format!("unknown function `{s}`"));
        let s = s.trim();
        let f = match s.split_once(':') {
            None => match s {
                "f1" => ScalarFn::F1,
                "sqrt" => ScalarFn::Sqrt,
                "linear" | "id" => ScalarFn::Linear,
                _ => return Err(bad()),
            },
            Some(("power", r)) => {
                let r: f64 = r.parse().map_err(|_| bad())?;
                if !(r > 0.0 && r <= 1.0) {
                    return Err(Error::BadParameter(format!("power {r} outside (0, 1]")));
                }
                ScalarFn::Power(r)
            }
            Some(("ft", t)) => {
                let t: f64 = t.parse().map_err(|_| bad())?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::BadParameter(format!("ft needs t > 0, got {t}")));
                }
                ScalarFn::Ft(t)
            }
            Some(_) => return Err(bad()),
        };
        Ok(f)
    }
}

impl Serialize for ScalarFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScalarFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `Ã = diag(A, B)` and `X̃ = [[0, X], [X*, 0]]`, so that
/// `[Ã, X̃] = [[0, AX - XB], [-(AX - XB)*, 0]]`.
pub fn doubling_embed(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    x: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let zero = ComplexMatrix::zeros(a.dim());
    let a_t = ComplexMatrix::block_diag(a, b)?;
    if x.dim() != a.dim() {
        return Err(Error::DimensionMismatch(x.dim(), a.dim()));
    }
    let x_t = ComplexMatrix::blocks(&zero, x, &x.adjoint(), &zero)?;
    Ok((a_t, x_t))
}

/// `|||f(A)X - Xf(B)||| / (|||X||| f(|||AX - XB||| / |||X|||))`.
///
/// A zero numerator gives 0 regardless of the denominator.
pub fn verify_conjecture_ratio(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    x: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
    kind: NormKind,
) -> Result<f64> {
    let fa = matrix_function(a, &f)?;
    let fb = matrix_function(b, &f)?;
    let num = ui_norm(&gen_commutator(&fa, x, &fb)?, kind)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    let xn = ui_norm(x, kind)?;
    let c = ui_norm(&gen_commutator(a, x, b)?, kind)?;
    let den = if xn > 0.0 { xn * f(c / xn) } else { 0.0 };
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// The three terms `|||[e^{iX}, Y]|||`, `|||[X, Y]|||` and
/// `(||X|| / sin ||X||) |||[e^{iX}, Y]|||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpChain {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
}

impl ExpChain {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.mid + tol && self.mid <= self.rhs + tol
    }
}

pub fn verify_exp_equivalence(x: &ComplexMatrix, y: &ComplexMatrix, kind: NormKind) -> Result<ExpChain> {
    let spec = hermitian_eig(x)?;
    let norm = spec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if norm >= PI {
        return Err(Error::SpectralRadiusTooLarge { norm });
    }
    let u = spec.apply(|l| Complex64::from_polar(1.0, l));
    let lhs = ui_norm(&commutator(&u, y)?, kind)?;
    let mid = ui_norm(&commutator(x, y)?, kind)?;
    let factor = if norm == 0.0 { 1.0 } else { norm / norm.sin() };
    Ok(ExpChain { lhs, mid, rhs: factor * lhs })
}

/// Both upper bounds for `|||[|A|, X]|||` with `-a1 <= A <= a2` taken from the
/// spectrum of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsReport {
    pub lhs: f64,
    pub commutator: f64,
    pub a1: f64,
    pub a2: f64,
    /// `2 min(a1, a2) + |||[A, X]|||`.
    pub min_bound: f64,
    /// `||A|| / 2 + |||[A, X]|||`.
    pub half_norm_bound: f64,
}

impl AbsReport {
    pub fn min_slack(&self) -> f64 {
        self.min_bound - self.lhs
    }

    pub fn half_norm_slack(&self) -> f64 {
        self.half_norm_bound - self.lhs
    }
}

pub fn verify_abs_bounds(a: &ComplexMatrix, x: &ComplexMatrix, kind: NormKind) -> Result<AbsReport> {
    let spec = hermitian_eig(a)?;
    let lo = spec.eigenvalues.first().copied().unwrap_or(0.0);
    let hi = spec.eigenvalues.last().copied().unwrap_or(0.0);
    let (a1, a2) = ((-lo).max(0.0), hi.max(0.0));
    let abs_a = spec.apply(|l| l.abs().into());
    let lhs = ui_norm(&commutator(&abs_a, x)?, kind)?;
    let c = ui_norm(&commutator(a, x)?, kind)?;
    Ok(AbsReport {
        lhs,
        commutator: c,
        a1,
        a2,
        min_bound: 2.0 * a1.min(a2) + c,
        half_norm_bound: 0.5 * a1.max(a2) + c,
    })
}

/// `(|||f(|Y|)|||, |||I||| f(|||Y||| / |||I|||))`.
pub fn verify_jensen(y: &ComplexMatrix, f: impl Fn(f64) -> f64, kind: NormKind) -> Result<(f64, f64)> {
    let gram = &y.adjoint() * y;
    let f_abs = matrix_function(&gram, |l| f(l.sqrt()))?;
    let lhs = ui_norm(&f_abs, kind)?;
    let id = ui_norm(&ComplexMatrix::identity(y.dim()), kind)?;
    let rhs = id * f(ui_norm(y, kind)? / id);
    Ok((lhs, rhs))
}

/// The 3x3 instance where `[A, e^{iX}]` has a larger trace norm of
/// `f(|.|)` than `[A, X]` for `f(x) = x/(x + 0.02)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub t: f64,
    pub sigma_commutator: Vec<f64>,
    pub sigma_exp_commutator: Vec<f64>,
    pub trace_commutator: f64,
    pub trace_exp_commutator: f64,
    pub reversed: bool,
}

pub fn counterexample_matrices() -> (ComplexMatrix, ComplexMatrix) {
    let y = ComplexMatrix::from_rows(&[vec![2.0, 4.0, 2.0], vec![4.0, 2.0, 3.0], vec![2.0, 3.0, 4.0]])
        .expect("fixed 3x3 data");
    let c = Complex64::new;
    let a = ComplexMatrix::from_rows(&[
        vec![c(5.0, 0.0), c(3.0, 0.0), c(3.0, 0.0)],
        vec![c(3.0, 0.0), c(3.0, 0.0), c(3.0, -1.0)],
        vec![c(3.0, 0.0), c(3.0, 1.0), c(5.0, 0.0)],
    ])
    .expect("fixed 3x3 data");
    let x = y.scale(1.0 / singular_values(&y)[0]);
    (a, x)
}

pub fn counterexample_report() -> CounterexampleReport {
    const T: f64 = 0.02;
    let (a, x) = counterexample_matrices();
    let u = spectral_apply(&x, |l| Complex64::from_polar(1.0, l)).expect("X is real symmetric");
    let s1 = singular_values(&commutator(&a, &x).expect("same size"));
    let s2 = singular_values(&commutator(&a, &u).expect("same size"));
    let f = ScalarFn::Ft(T);
    let trace = |s: &[f64]| s.iter().map(|&v| f.eval(v)).sum::<f64>();
    let (t1, t2) = (trace(&s1), trace(&s2));
    CounterexampleReport {
        t: T,
        sigma_commutator: s1,
        sigma_exp_commutator: s2,
        trace_commutator: t1,
        trace_exp_commutator: t2,
        reversed: t2 > t1,
    }
}

/// Complex Gaussian matrix with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `M* M` for a complex Gaussian `M`.
pub fn wishart<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = gaussian_matrix(n, rng);
    let w = &m.adjoint() * &m;
    (&w + &w.adjoint()).scale(0.5)
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = gaussian_matrix(n, rng);
    (&m + &m.adjoint()).scale(0.5)
}

/// Unitary from Gram-Schmidt on the columns of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = gaussian_matrix(n, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let dot: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let v = cols[k][i];
                cols[j][i] -= dot * v;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// How campaign instances are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Independent Wishart `A` and `B`.
    General,
    /// `B = A`.
    SameOperator,
    /// `B = A` with `|||A||| = 1`, keeping only instances whose commutator
    /// lies in the range covered by the large-commutator estimate.
    LoringVides,
}

impl FromStr for Sampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "general" => Ok(Sampler::General),
            "same" | "same-operator" => Ok(Sampler::SameOperator),
            "lv" | "loring-vides" => Ok(Sampler::LoringVides),
            other => Err(Error::BadParameter(format!("unknown sampler `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub f: ScalarFn,
    pub norm: NormKind,
    pub sampler: Sampler,
}

impl CampaignConfig {
    /// Smallest sampled size; a Ky Fan `k`-norm needs `n >= k`.
    pub fn min_dim(&self) -> usize {
        match self.norm {
            NormKind::KyFan(k) => k.max(1),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadParameter("campaign needs at least one trial".into()));
        }
        if self.n_max == 0 {
            return Err(Error::BadParameter("n_max must be at least 1".into()));
        }
        self.norm.validate(self.n_max)?;
        if self.sampler == Sampler::LoringVides && self.f.lv_family().is_none() {
            return Err(Error::BadParameter(format!("no threshold is known for f = {}", self.f)));
        }
        Ok(())
    }
}

/// One sampled triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Instance {
    pub A: ComplexMatrix,
    pub B: ComplexMatrix,
    pub X: ComplexMatrix,
}

/// Fixed-width histogram of ratios on `[lo, hi)` with an overflow counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

const HIST_BINS: usize = 55;
const HIST_HI: f64 = 1.1;

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Self { lo, hi, counts: vec![0; bins], overflow: 0 }
    }

    pub fn add(&mut self, v: f64) {
        if v >= self.hi {
            self.overflow += 1;
            return;
        }
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        let k = (((v - self.lo) / w).floor().max(0.0) as usize).min(self.counts.len() - 1);
        self.counts[k] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub trials: usize,
    pub norm: NormKind,
    pub f: ScalarFn,
    pub sampler: Sampler,
    pub n_max: usize,
    /// Trials that produced a ratio.
    pub evaluated: u64,
    /// Trials dropped by the sampler filter or with a zero numerator or denominator.
    pub excluded: u64,
    pub max_ratio: f64,
    pub argmax: Option<Instance>,
    pub histogram: Histogram,
}

/// Trials drawn from one generator stream.
pub const SHARD_SIZE: usize = 256;

struct ShardOutcome {
    best: Option<(f64, Instance)>,
    histogram: Histogram,
    evaluated: u64,
    excluded: u64,
}

fn normalised<R: Rng + ?Sized>(n: usize, kind: NormKind, rng: &mut R) -> Result<ComplexMatrix> {
    let x = gaussian_matrix(n, rng);
    Ok(x.scale(1.0 / ui_norm(&x, kind)?))
}

/// Draws one instance and returns its ratio, or `None` if it is excluded.
fn trial<R: Rng + ?Sized>(cfg: &CampaignConfig, rng: &mut R) -> Result<Option<(f64, Instance)>> {
    let n = rng.random_range(cfg.min_dim()..=cfg.n_max);
    let kind = cfg.norm;
    // Spread the spectra over several orders of magnitude so that the ratio
    // sees commutator sizes on both sides of the bend of f.
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let (a, b) = match cfg.sampler {
        Sampler::General => (wishart(n, rng).scale(scale), wishart(n, rng).scale(scale)),
        Sampler::SameOperator => {
            let a = wishart(n, rng).scale(scale);
            (a.clone(), a)
        }
        Sampler::LoringVides => {
            let a = wishart(n, rng);
            let a = a.scale(1.0 / ui_norm(&a, kind)?);
            (a.clone(), a)
        }
    };
    let x = normalised(n, kind, rng)?;
    if cfg.sampler == Sampler::LoringVides {
        let family = cfg.f.lv_family().expect("checked by validate");
        let c = ui_norm(&commutator(&a, &x)?, kind)?;
        if c < lv_threshold(family, 1.0)? || c > 1.0 {
            return Ok(None);
        }
    }
    match verify_conjecture_ratio(&a, &b, &x, |v| cfg.f.eval(v), kind) {
        Ok(r) if r > 0.0 => Ok(Some((r, Instance { A: a, B: b, X: x }))),
        Ok(_) | Err(Error::ZeroDenominator) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_shard(cfg: &CampaignConfig, shard: usize) -> Result<ShardOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(shard as u64);
    let count = SHARD_SIZE.min(cfg.trials - shard * SHARD_SIZE);
    let mut out = ShardOutcome {
        best: None,
        histogram: Histogram::new(0.0, HIST_HI, HIST_BINS),
        evaluated: 0,
        excluded: 0,
    };
    for _ in 0..count {
        match trial(cfg, &mut rng)? {
            Some((r, inst)) => {
                out.evaluated += 1;
                out.histogram.add(r);
                if out.best.as_ref().is_none_or(|(m, _)| r > *m) {
                    out.best = Some((r, inst));
                }
            }
            None => out.excluded += 1,
        }
    }
    Ok(out)
}

/// Random search for large ratios. Trials are split into shards of
/// [`SHARD_SIZE`], shard `s` uses the ChaCha stream `s` of `seed`, and shards
/// are merged in order, so the report depends only on the configuration.
pub fn monte_carlo_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let shards = cfg.trials.div_ceil(SHARD_SIZE);
    let outcomes: Vec<ShardOutcome> =
        (0..shards).into_par_iter().map(|s| run_shard(cfg, s)).collect::<Result<_>>()?;

    let mut histogram = Histogram::new(0.0, HIST_HI, HIST_BINS);
    let mut best: Option<(f64, Instance)> = None;
    let (mut evaluated, mut excluded) = (0, 0);
    for o in outcomes {
        histogram.merge(&o.histogram);
        evaluated += o.evaluated;
        excluded += o.excluded;
        if let Some((r, inst)) = o.best {
            if best.as_ref().is_none_or(|(m, _)| r > *m) {
                best = Some((r, inst));
            }
        }
    }
    let (max_ratio, argmax) = match best {
        Some((r, inst)) => (r, Some(inst)),
        None => (0.0, None),
    };
    Ok(CampaignReport {
        seed: cfg.seed,
        trials: cfg.trials,
        norm: cfg.norm,
        f: cfg.f,
        sampler: cfg.sampler,
        n_max: cfg.n_max,
        evaluated,
        excluded,
        max_ratio,
        argmax,
        histogram,
    })
}
