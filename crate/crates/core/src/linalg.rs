//! Small dense complex matrices: Hermitian eigensolver, singular values and
//! the unitarily invariant norms built from them.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("matrix dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(data.len(), n * n));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParameter("matrix has non-finite entries".into()));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<T: Into<Complex64> + Copy>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(bad.len(), n));
        }
        Self::new(n, rows.iter().flat_map(|r| r.iter().map(|&z| z.into())).collect())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i].into() } else { 0.0.into() })
    }

    /// `diag(a, b)` as a `2n x 2n` block matrix.
    pub fn block_diag(a: &Self, b: &Self) -> Result<Self> {
        Self::blocks(a, &Self::zeros(a.n), &Self::zeros(a.n), b)
    }

    /// `[[tl, tr], [bl, br]]` from four `n x n` blocks.
    pub fn blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        let n = tl.n;
        for m in [tr, bl, br] {
            if m.n != n {
                return Err(Error::DimensionMismatch(m.n, n));
            }
        }
        Ok(Self::from_fn(2 * n, |i, j| {
            let src = match (i < n, j < n) {
                (true, true) => tl,
                (true, false) => tr,
                (false, true) => bl,
                (false, false) => br,
            };
            src[(i % n, j % n)]
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `||A - A*||_F`.
    pub fn hermitian_defect(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.n).map(<[Complex64]>::to_vec).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

// The arithmetic operators panic on a dimension mismatch, like slice indexing.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sum");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { n: self.n, data }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in difference");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { n: self.n, data }
    }
}

/// Serialised as nested rows of `[re, im]` pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            self.data.chunks(self.n).map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> =
            rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in ascending order and the matching unitary eigenvector matrix
/// (eigenvectors are columns).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectral {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianSpectral {
    /// `V diag(f(lambda)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.vectors.n;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }
}

const HERMITIAN_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianSpectral> {
    let scale = a.frobenius_norm();
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { asymmetry: defect / scale });
    }
    let n = a.n;
    // Work on the exactly Hermitian part.
    let mut m = (a + &a.adjoint()).scale(0.5);
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianSpectral { eigenvalues, vectors })
}

/// One Jacobi rotation annihilating `m[p][q]`. The rotation is a phase change
/// on column `q` that makes the pivot real, followed by a real plane rotation.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = (apq / r).conj();
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J restricted to the (p, q) plane.
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = phase * -s;
    let jqq = phase * c;

    let n = m.n;
    for k in 0..n {
        let (x, y) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = x * jpp + y * jqp;
        m[(k, q)] = x * jpq + y * jqq;
    }
    for k in 0..n {
        let (x, y) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = jpp.conj() * x + jqp.conj() * y;
        m[(q, k)] = jpq.conj() * x + jqq.conj() * y;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * jpp + y * jqp;
        v[(k, q)] = x * jpq + y * jqq;
    }
}

/// Singular values in descending order, from the eigenvalues of `X* X`.
pub fn singular_values(x: &ComplexMatrix) -> Vec<f64> {
    let gram = &x.adjoint() * x;
    let spec = hermitian_eig(&gram).expect("X* X is Hermitian by construction");
    spec.eigenvalues.iter().rev().map(|&l| l.max(0.0).sqrt()).collect()
}

/// A unitarily invariant norm on `n x n` matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Operator,
    /// Sum of the `k` largest singular values.
    KyFan(usize),
    Schatten(f64),
    Trace,
    HilbertSchmidt,
}

impl NormKind {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            NormKind::KyFan(k) if k == 0 || k > n => {
                Err(Error::BadParameter(format!("Ky Fan index {k} out of range 1..={n}")))
            }
            NormKind::Schatten(p) if !(p >= 1.0) => {
                Err(Error::BadParameter(format!("Schatten exponent {p} below 1")))
            }
            _ => Ok(()),
        }
    }

    /// The norm of a matrix with the given singular values (descending, nonnegative).
    pub fn of_singular_values(&self, sigma: &[f64]) -> Result<f64> {
        self.validate(sigma.len())?;
        Ok(match *self {
            NormKind::Operator => sigma.first().copied().unwrap_or(0.0),
            NormKind::KyFan(k) => sigma[..k].iter().sum(),
            NormKind::Trace => sigma.iter().sum(),
            NormKind::HilbertSchmidt => sigma.iter().map(|s| s * s).sum::<f64>().sqrt(),
            NormKind::Schatten(p) if p.is_infinite() => sigma.first().copied().unwrap_or(0.0),
            NormKind::Schatten(p) => {
                let top = sigma.first().copied().unwrap_or(0.0);
                if top == 0.0 {
                    0.0
                } else {
                    top * sigma.iter().map(|s| (s / top).powf(p)).sum::<f64>().powf(1.0 / p)
                }
            }
        })
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Operator => write!(f, "operator"),
            NormKind::KyFan(k) => write!(f, "kyfan:{k}"),
            NormKind::Schatten(p) => write!(f, "schatten:{p}"),
            NormKind::Trace => write!(f, "trace"),
            NormKind::HilbertSchmidt => write!(f, "hs"),
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadParameter(format!("unknown norm `{s}`"));
        match s.trim().split_once(':') {
            None => match s.trim() {
                "operator" | "op" => Ok(NormKind::Operator),
                "trace" => Ok(NormKind::Trace),
                "hs" | "hilbert-schmidt" | "frobenius" => Ok(NormKind::HilbertSchmidt),
                _ => Err(bad()),
            },
            Some(("kyfan", k)) => Ok(NormKind::KyFan(k.parse().map_err(|_| bad())?)),
            Some(("schatten", p)) => {
                let p: f64 = p.parse().map_err(|_| bad())?;
                if !(p >= 1.0) {
                    return Err(Error::BadParameter(format!("Schatten exponent {p} below 1")));
                }
                Ok(NormKind::Schatten(p))
            }
            Some(_) => Err(bad()),
        }
    }
}

impl Serialize for NormKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn ui_norm(x: &ComplexMatrix, kind: NormKind) -> Result<f64> {
    kind.validate(x.n)?;
    kind.of_singular_values(&singular_values(x))
}

const PSD_TOL: f64 = 1e-10;

/// `f(A)` for positive semidefinite `A`. Eigenvalues in `[-1e-10, 0)` are
/// treated as zero.
pub fn matrix_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(a)?;
    if let Some(&low) = spec.eigenvalues.first() {
        if low < -PSD_TOL {
            return Err(Error::DomainViolation(format!("eigenvalue {low} is negative")));
        }
    }
    Ok(spec.apply(|l| f(l.max(0.0)).into()))
}

/// `f(A)` for Hermitian `A` and any complex-valued `f`, e.g. `x -> e^{ix}`.
pub fn spectral_apply(a: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.apply(f))
}

/// `|Y| = (Y* Y)^(1/2)`.
pub fn abs(y: &ComplexMatrix) -> ComplexMatrix {
    let gram = &y.adjoint() * y;
    hermitian_eig(&gram).expect("Y* Y is Hermitian by construction").apply(|l| l.max(0.0).sqrt().into())
}

/// `AX - XB`.
pub fn gen_commutator(a: &ComplexMatrix, x: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [x, b] {
        if m.n != a.n {
            return Err(Error::DimensionMismatch(m.n, a.n));
        }
    }
    Ok(&(a * x) - &(x * b))
}

/// `[A, X] = AX - XA`.
pub fn commutator(a: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    gen_commutator(a, x, a)
}
