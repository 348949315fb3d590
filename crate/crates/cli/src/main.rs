use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use commbound::approx::{erf_min_bound, GaussianParams, ToleranceConfig};
use commbound::closed_forms::{
    csc1, gamma_boyadzhiev, gamma_olsen_pedersen, gamma_pedersen, gamma_sin, gamma_tangent, pq_sqrt_bound,
    scaled_cayley_cc, shift_constant, trivial_constant, PiecewiseQuadParams,
};
use commbound::io::{certificate_csv, parse_grid_spec, read_to_string, write_atomic, Certificate, ParameterTable};
use commbound::lab::{counterexample_report, monte_carlo_campaign, CampaignConfig, Sampler, ScalarFn};
use commbound::linalg::NormKind;
use commbound::optimizer::{optimize_grid, BoundPoint};
use commbound::search::PatternSearchConfig;
use commbound::stitching::{gamma_half_via_cc, global_constant, sqrt_constant};
use commbound::Error;

#[derive(Debug, Parser)]
#[command(name = "commbound", version, about = "Certified constants for commutator estimates of x/(x+1)")]
struct Cli {
    /// Output file for commands that write one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomised commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certified bound for one (c, a, b) triple, printed as JSON.
    Erfmin {
        #[arg(value_parser = positive, allow_negative_numbers = true)]
        c: f64,
        #[arg(value_parser = positive, allow_negative_numbers = true)]
        a: f64,
        #[arg(value_parser = positive, allow_negative_numbers = true)]
        b: f64,
        /// Root location tolerance.
        #[arg(long = "T", default_value_t = 1e-5, value_parser = positive)]
        t: f64,
        /// Derivative sign tolerance.
        #[arg(long = "Tf", default_value_t = 1e-10, value_parser = positive)]
        tf: f64,
    },
    /// Optimise (or re-certify) a grid, stitch it and write the certificate.
    Certify {
        /// `full` or `c0:h1:c1[:h2:c2...]`.
        #[arg(long, default_value = "full")]
        grid: String,
        /// Files with the `a` and `b` columns, one value per grid node.
        #[arg(long, num_args = 2, value_names = ["AS", "BS"])]
        params: Option<Vec<PathBuf>>,
    },
    /// Square-root constant from a certificate file.
    SqrtConst {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Tabulate the closed-form constants.
    ClosedForms {
        /// Exponents for the power-function rows (default 0.1, 0.2, ..., 0.9).
        #[arg(long, num_args = 1..)]
        r: Vec<f64>,
        /// Print CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
    /// Monte-Carlo campaign over random matrices.
    Verify {
        /// f1, sqrt, linear, power:r or ft:t.
        #[arg(long, default_value = "f1")]
        f: ScalarFn,
        /// operator, trace, hs, kyfan:k or schatten:p.
        #[arg(long, default_value = "operator")]
        norm: NormKind,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// general, same or lv.
        #[arg(long, default_value = "general")]
        sampler: Sampler,
    },
    /// The 3x3 trace-norm reversal example.
    Counterexample,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

/// An error together with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

fn invalid(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

/// Bad input is a usage error; a result that fails certification is exit 2.
fn classify(e: Error) -> Failure {
    match e {
        Error::BadParameter(_) | Error::DimensionMismatch(..) | Error::UnsortedGrid { .. } | Error::Io { .. } => {
            usage(e)
        }
        _ => invalid(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Erfmin { c, a, b, t, tf } => erfmin(c, a, b, t, tf),
        Command::Certify { grid, params } => certify(&grid, params.as_deref(), out),
        Command::SqrtConst { cert } => sqrt_const(&cert),
        Command::ClosedForms { r, csv } => closed_forms(&r, csv),
        Command::Verify { f, norm, trials, n_max, sampler } => {
            let cfg = CampaignConfig { n_max, trials, seed: cli.seed, f, norm, sampler };
            verify(&cfg, out)
        }
        Command::Counterexample => emit(&json!(counterexample_report()), out),
    }
}

/// Print `value` as JSON, or write it to `out`.
fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialise");
    match out {
        Some(path) => write_atomic(path, format!("{text}\n").as_bytes()).map_err(classify),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn erfmin(c: f64, a: f64, b: f64, t: f64, tf: f64) -> Result<(), Failure> {
    let tol = ToleranceConfig::new(t, tf).map_err(usage)?;
    let p = GaussianParams::new(a, b).map_err(usage)?;
    let outcome = erf_min_bound(c, &p, &tol).map_err(invalid)?;
    let (x1, x2) = match outcome.roots {
        Some((x1, x2)) => (x1, Some(x2)),
        None => (None, None),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "c": c,
            "a": a,
            "b": b,
            "value": outcome.value,
            "x1": x1,
            "x2": x2,
            "error_budget": outcome.error_budget,
            "degenerate": outcome.degenerate,
        }))
        .expect("JSON values serialise")
    );
    Ok(())
}

fn certify(grid_spec: &str, params: Option<&[PathBuf]>, out: Option<&Path>) -> Result<(), Failure> {
    let started = Instant::now();
    let grid = parse_grid_spec(grid_spec).map_err(usage)?;
    let tol = ToleranceConfig::default();
    let points: Vec<BoundPoint> = match params {
        Some([as_path, bs_path]) => {
            let table = ParameterTable::from_columns(
                grid,
                &read_to_string(as_path).map_err(usage)?,
                &read_to_string(bs_path).map_err(usage)?,
            )
            .map_err(usage)?;
            table.cs.par_iter().zip(table.params()).map(|(&c, p)| BoundPoint::certify(c, p, &tol)).collect()
        }
        Some(_) => return Err(usage(anyhow!("--params takes two files"))),
        None => optimize_grid(&grid, &PatternSearchConfig::default(), &tol, None).map_err(classify)?,
    };

    let cert_path = out.map_or_else(|| PathBuf::from("certificate.json"), Path::to_path_buf);
    let csv_path = cert_path.with_extension("csv");
    write_atomic(&csv_path, certificate_csv(&points).as_bytes()).map_err(classify)?;

    let degenerate: Vec<f64> = points.iter().filter(|p| p.degenerate).map(|p| p.c).collect();
    if !degenerate.is_empty() {
        return Err(invalid(anyhow!(
            "{} degenerate node(s), first at c = {}; partial table written to {}",
            degenerate.len(),
            degenerate[0],
            csv_path.display()
        )));
    }
    let (c1, cn) = (points[0].c, points[points.len() - 1].c);
    let stitched = global_constant(&points, c1, cn).map_err(classify)?;
    let cert = Certificate::from(&stitched);
    write_atomic(&cert_path, format!("{}\n", cert.to_json()).as_bytes()).map_err(classify)?;

    let max_c = cert.c_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_d = cert.d_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("nodes         {}", cert.grid.len());
    println!("max C_k       {max_c:.6}");
    println!("max D_k       {max_d:.6}");
    println!("corner_small  {:.6}", cert.corner_small);
    println!("corner_large  {:.6}", cert.corner_large);
    println!("global_C      {:.6}", cert.global_c);
    println!("certificate   {}", cert_path.display());
    println!("table         {}", csv_path.display());
    eprintln!("elapsed {:.1?}", started.elapsed());
    Ok(())
}

fn sqrt_const(path: &Path) -> Result<(), Failure> {
    let text = read_to_string(path).map_err(usage)?;
    let cert = Certificate::from_json(&text).map_err(usage)?;
    let points = cert.points().map_err(usage)?;
    let value = sqrt_constant(&points).map_err(|e| match e {
        Error::DegenerateNode { c } => invalid(Error::CoverageGap(format!("degenerate node at c = {c}"))),
        other => classify(other),
    })?;
    println!("{value}");
    Ok(())
}

fn closed_forms(rs: &[f64], csv: bool) -> Result<(), Failure> {
    let default_rs: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let rs = if rs.is_empty() { &default_rs[..] } else { rs };
    let mut rows: Vec<(&str, Option<f64>, f64)> = Vec::new();
    for &r in rs {
        let (sin_min, sin_arg) = gamma_sin(r).map_err(usage)?;
        rows.push(("boyadzhiev", Some(r), gamma_boyadzhiev(r).map_err(usage)?));
        rows.push(("olsen_pedersen", Some(r), gamma_olsen_pedersen(r).map_err(usage)?));
        rows.push(("pedersen", Some(r), gamma_pedersen(r).map_err(usage)?));
        rows.push(("tangent", Some(r), gamma_tangent(r).map_err(usage)?));
        rows.push(("sin", Some(r), sin_min));
        rows.push(("sin_argmin", Some(r), sin_arg));
    }
    let pq = PiecewiseQuadParams::new(8.0, -0.03314563).map_err(usage)?;
    rows.push(("f1_trivial", None, trivial_constant()));
    rows.push(("f1_shift", None, shift_constant()));
    rows.push(("csc1", None, csc1()));
    rows.push(("cayley_max", None, scaled_cayley_cc(2.0 / 3.0)));
    rows.push(("sqrt_via_csc1_cayley", None, gamma_half_via_cc().map_err(invalid)?));
    rows.push(("sqrt_piecewise_quadratic", None, pq_sqrt_bound(&pq)));

    if csv {
        println!("name,r,value");
        for (name, r, v) in rows {
            println!("{name},{},{v:?}", r.map_or(String::new(), |r| format!("{r:?}")));
        }
    } else {
        println!("{:<26} {:>6} {:>14}", "name", "r", "value");
        for (name, r, v) in rows {
            println!("{name:<26} {:>6} {v:>14.9}", r.map_or("-".to_string(), |r| format!("{r}")));
        }
    }
    Ok(())
}

fn verify(cfg: &CampaignConfig, out: Option<&Path>) -> Result<(), Failure> {
    let report = monte_carlo_campaign(cfg).map_err(classify)?;
    eprintln!(
        "max ratio {:.9} over {} evaluated trials ({} excluded)",
        report.max_ratio, report.evaluated, report.excluded
    );
    emit(&serde_json::to_value(&report).context("serialising report").map_err(invalid)?, out)
}
