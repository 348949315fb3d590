//! Parameter tables, grid specs, certificate files and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::approx::{GaussianParams, SENTINEL};
use crate::error::{Error, Result};
use crate::optimizer::{build_grid, build_full_grid, check_grid, BoundPoint, Segment};
use crate::stitching::{max_spacing, StitchedCertificate};

/// Parse a column of decimal floats, one per line. Blank lines and
/// surrounding whitespace are ignored; `#` starts a comment.
pub fn parse_column(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::BadParameter(format!("line {}: `{line}` is not a number", k + 1)))?;
        if !v.is_finite() {
            return Err(Error::BadParameter(format!("line {}: non-finite value", k + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

/// One value per line, each printed so that it parses back to the same bits.
pub fn format_column(values: &[f64]) -> String {
    values.iter().fold(String::new(), |mut s, v| {
        let _ = writeln!(s, "{v:?}");
        s
    })
}

/// Grid nodes with one Gaussian parameter pair per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterTable {
    pub cs: Vec<f64>,
    pub as_: Vec<f64>,
    pub bs: Vec<f64>,
}

impl ParameterTable {
    pub fn new(cs: Vec<f64>, as_: Vec<f64>, bs: Vec<f64>) -> Result<Self> {
        if as_.len() != cs.len() {
            return Err(Error::DimensionMismatch(as_.len(), cs.len()));
        }
        if bs.len() != cs.len() {
            return Err(Error::DimensionMismatch(bs.len(), cs.len()));
        }
        check_grid(&cs)?;
        for (&a, &b) in as_.iter().zip(&bs) {
            GaussianParams::new(a, b)?;
        }
        Ok(Self { cs, as_, bs })
    }

    /// Pair the `a` and `b` columns (file contents) with `grid`.
    pub fn from_columns(grid: Vec<f64>, as_text: &str, bs_text: &str) -> Result<Self> {
        Self::new(grid, parse_column(as_text)?, parse_column(bs_text)?)
    }

    pub fn params(&self) -> Vec<GaussianParams> {
        self.as_.iter().zip(&self.bs).map(|(&a, &b)| GaussianParams { a, b }).collect()
    }
}

/// Grid from a spec string: `full`, or `c0:h1:c1:h2:c2...` meaning steps of
/// `h1` from `c0` to `c1`, then steps of `h2` up to `c2`, and so on.
pub fn parse_grid_spec(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec == "full" {
        return Ok(build_full_grid());
    }
    let nums = spec
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::BadParameter(format!("bad grid spec `{spec}`"))))
        .collect::<Result<Vec<_>>>()?;
    if nums.len() % 2 == 0 {
        return Err(Error::BadParameter(format!(
            "grid spec `{spec}` must look like c0 or c0:h1:c1[:h2:c2...]"
        )));
    }
    let segments: Vec<Segment> = nums[1..].chunks(2).map(|w| Segment { step: w[0], end: w[1] }).collect();
    build_grid(nums[0], &segments)
}

/// On-disk form of a stitched certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub grid: Vec<f64>,
    #[serde(rename = "C_k")]
    pub c_k: Vec<f64>,
    #[serde(rename = "D_k")]
    pub d_k: Vec<f64>,
    pub params: Vec<GaussianParams>,
    pub corner_small: f64,
    pub corner_large: f64,
    #[serde(rename = "global_C")]
    pub global_c: f64,
}

impl From<&StitchedCertificate> for Certificate {
    fn from(s: &StitchedCertificate) -> Self {
        Certificate {
            grid: s.points.iter().map(|p| p.c).collect(),
            c_k: s.points.iter().map(|p| p.c_k).collect(),
            d_k: s.lifted.clone(),
            params: s.points.iter().map(|p| p.params).collect(),
            corner_small: s.corner_small,
            corner_large: s.corner_large,
            global_c: s.global_c,
        }
    }
}

impl Certificate {
    /// Grid points as recorded, with `C_k` equal to the sentinel marked degenerate.
    pub fn points(&self) -> Result<Vec<BoundPoint>> {
        let n = self.grid.len();
        for len in [self.c_k.len(), self.params.len()] {
            if len != n {
                return Err(Error::DimensionMismatch(len, n));
            }
        }
        Ok((0..n)
            .map(|k| BoundPoint {
                c: self.grid[k],
                c_k: self.c_k[k],
                params: self.params[k],
                degenerate: self.c_k[k] == SENTINEL,
            })
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadParameter(format!("certificate JSON: {e}")))
    }
}

/// CSV with columns `c_k,C_k,D_k,degenerate`. `D_k` is the continuity lift to
/// the next node (the largest spacing past the last one) and is written even
/// for degenerate nodes.
pub fn certificate_csv(points: &[BoundPoint]) -> String {
    let spacing = max_spacing(points);
    let mut s = String::from("c_k,C_k,D_k,degenerate\n");
    for (k, p) in points.iter().enumerate() {
        let next = points.get(k + 1).map_or(p.c + spacing, |n| n.c);
        let d = p.c_k * (next + 1.0) / (p.c + 1.0);
        let _ = writeln!(s, "{:?},{:?},{:?},{}", p.c, p.c_k, d, p.degenerate);
    }
    s
}

/// Write `contents` to a temporary file next to `path` and rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents).map_err(io_err)?;
    fs::rename(tmp, path).map_err(|e| {
        let _ = fs::remove_file(tmp);
        io_err(e)
    })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
