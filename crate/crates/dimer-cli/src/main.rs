//! Command-line front end: batch computations over the dimer library with
//! deterministic CSV output.
//!
//! Every command writes a CSV whose first line is a `#`-prefixed JSON echo
//! of the effective configuration, followed by a column-name row and data
//! rows with 17-significant-digit floats (round-trip exact). Output is
//! written to a temporary sibling file and renamed into place, so a failed
//! run never leaves a partial file behind.
//!
//! Frequencies on the command line (`--j-hz`, `--u-hz`, `--gamma-hz`) are
//! plain frequencies in Hz; the library works in angular units internally.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dimer::dissipative::{self, TwoLevelEffective};
use dimer::meanfield::{self, DimerParams, PhaseSpacePoint};
use dimer::quantum;
use dimer::semiclassical::{self, ESource, SemiclassicalError, SplittingSource};

#[derive(Parser)]
#[command(name = "dimer", version, about = "Two-well condensate tunneling computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full Bose-Hubbard spectrum: (index, energy in rad/s).
    Spectrum(CommonArgs),
    /// Doublet splitting versus Lambda by all methods.
    SplittingSweep(CommonArgs),
    /// Husimi distribution frames at quarter-period multiples.
    Husimi(CommonArgs),
    /// Survival probability: master equation vs two-level models.
    Dissipate(CommonArgs),
    /// Cumulative eigenstate weights of the fixed-point coherent state
    /// over an N sweep.
    Weights(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::SplittingSweep(_) => "splitting-sweep",
            Command::Husimi(_) => "husimi",
            Command::Dissipate(_) => "dissipate",
            Command::Weights(_) => "weights",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a)
            | Command::SplittingSweep(a)
            | Command::Husimi(a)
            | Command::Dissipate(a)
            | Command::Weights(a) => a,
        }
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file with the same field names; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Particle number N (sweep maximum for `weights`).
    #[arg(long)]
    n: Option<usize>,
    /// Nonlinearity Lambda = U N / (2 J) (sweep maximum for
    /// `splitting-sweep`).
    #[arg(long)]
    lambda: Option<f64>,
    /// On-site interaction U / 2 pi in Hz (with --lambda, J is derived).
    #[arg(long = "u-hz")]
    u_hz: Option<f64>,
    /// Hopping J / 2 pi in Hz (default 1 when only --lambda is given).
    #[arg(long = "j-hz")]
    j_hz: Option<f64>,
    /// Single-atom loss rate / 2 pi in Hz.
    #[arg(long = "gamma-hz")]
    gamma_hz: Option<f64>,
    /// Initial imbalance (default: the self-trapped fixed point).
    #[arg(long)]
    z0: Option<f64>,
    /// Initial relative phase (default: pi).
    #[arg(long)]
    phi0: Option<f64>,
    /// Time window in seconds.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Sampling step in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Grid resolution (sweep points / Husimi axis points).
    #[arg(long)]
    grid: Option<usize>,
    /// Splitting source: exact | semiclassical | closed-form | zero.
    #[arg(long)]
    source: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Effective configuration: config-file values overridden by flags; echoed
/// verbatim in the output header.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(skip_deserializing)]
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
}

impl RunConfig {
    fn merge(command: &str, args: &CommonArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        cfg.command = command.to_string();
        macro_rules! take {
            ($field:ident) => {
                if args.$field.is_some() {
                    cfg.$field = args.$field.clone();
                }
            };
        }
        take!(n);
        take!(lambda);
        take!(u_hz);
        take!(j_hz);
        take!(gamma_hz);
        take!(z0);
        take!(phi0);
        take!(t_end);
        take!(dt);
        take!(grid);
        take!(source);
        Ok(cfg)
    }

    fn n(&self) -> Result<usize> {
        let n = self.n.ok_or_else(|| anyhow!("--n is required"))?;
        if n == 0 {
            bail!("--n must be >= 1 (a dimer needs at least one particle)");
        }
        Ok(n)
    }

    /// Resolve DimerParams at a given Lambda for the fixed (U or J) choice.
    fn params_at(&self, lambda: f64, n: usize) -> Result<DimerParams> {
        if let Some(u_hz) = self.u_hz {
            let u = 2.0 * PI * u_hz;
            let j = u * n as f64 / (2.0 * lambda);
            return Ok(DimerParams::new(j, u, n)?);
        }
        let j = 2.0 * PI * self.j_hz.unwrap_or(1.0);
        Ok(DimerParams::from_lambda(j, lambda, n)?)
    }

    fn params(&self) -> Result<DimerParams> {
        let n = self.n()?;
        match (self.lambda, self.u_hz, self.j_hz) {
            (Some(lambda), _, _) => self.params_at(lambda, n),
            (None, Some(u_hz), j_hz) => Ok(DimerParams::new(
                2.0 * PI * j_hz.unwrap_or(1.0),
                2.0 * PI * u_hz,
                n,
            )?),
            (None, None, _) => bail!("specify --lambda or --u-hz"),
        }
    }

    fn source(&self) -> Result<SplittingSource> {
        match self.source.as_deref().unwrap_or("exact") {
            "exact" => Ok(SplittingSource::Exact),
            "semiclassical" => Ok(SplittingSource::Semiclassical),
            "closed-form" => Ok(SplittingSource::ClosedForm),
            "zero" => Ok(SplittingSource::Zero),
            other => bail!("unknown --source {other:?} (exact | semiclassical | closed-form | zero)"),
        }
    }

    fn start_point(&self, params: &DimerParams) -> Result<PhaseSpacePoint> {
        let z0 = match self.z0 {
            Some(z) => z,
            None => meanfield::self_trapping_z(params.lambda()),
        };
        Ok(PhaseSpacePoint::new(z0, self.phi0.unwrap_or(PI))?)
    }

    fn header(&self) -> String {
        format!("# {}", serde_json::to_string(self).expect("config serializes"))
    }
}

/// Round-trip-exact float formatting (17 significant digits).
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write header + rows to `out` atomically (temp file + rename); no partial
/// file survives a failure.
fn write_csv(out: &Path, header: &str, columns: &str, rows: &[String]) -> Result<()> {
    let mut tmp = out.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut body = String::with_capacity(rows.len() * 40 + 128);
    body.push_str(header);
    body.push('\n');
    body.push_str(columns);
    body.push('\n');
    for row in rows {
        body.push_str(row);
        body.push('\n');
    }
    let result = fs::write(&tmp, body)
        .with_context(|| format!("writing {}", tmp.display()))
        .and_then(|()| {
            fs::rename(&tmp, out).with_context(|| format!("renaming into {}", out.display()))
        });
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn out_path(args: &CommonArgs) -> Result<&Path> {
    args.out.as_deref().ok_or_else(|| anyhow!("--out is required"))
}

fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.params()?;
    let spectrum = quantum::spectrum(&params)?;
    let rows: Vec<String> = spectrum
        .energies()
        .iter()
        .enumerate()
        .map(|(i, e)| format!("{i},{}", fmt(*e)))
        .collect();
    write_csv(out, &cfg.header(), "index,energy_rad_s", &rows)
}

fn cmd_splitting_sweep(cfg: &RunConfig, out: &Path) -> Result<()> {
    let n = cfg.n()?;
    let lambda_max = cfg.lambda.ok_or_else(|| anyhow!("--lambda (sweep maximum) is required"))?;
    let points = cfg.grid.unwrap_or(25);
    if points < 2 {
        bail!("--grid must be >= 2 for a sweep");
    }
    let boundary = semiclassical::validity_boundary(n)?;
    let lambda_min = boundary + 1e-3;
    if lambda_max <= lambda_min {
        bail!(
            "empty sweep range: --lambda {lambda_max} is not above the validity boundary {boundary:.6}"
        );
    }
    let lambdas: Vec<f64> = (0..points)
        .map(|i| lambda_min + (lambda_max - lambda_min) * i as f64 / (points - 1) as f64)
        .collect();
    let rows: Vec<String> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<String> {
            let params = cfg.params_at(lambda, n)?;
            let exact = semiclassical::splitting_hz(&params, SplittingSource::Exact)?;
            // The finite-size shifted island can still be below h/2 near the
            // boundary; mark those rows instead of failing the sweep.
            let (semi, valid) =
                match semiclassical::splitting_hz(&params, SplittingSource::Semiclassical) {
                    Ok(v) => (v, 1),
                    Err(SemiclassicalError::Validity(_)) => (f64::NAN, 0),
                    Err(err) => return Err(err.into()),
                };
            let closed = semiclassical::approx_splitting_closed_form(
                &params,
                true,
                ESource::ClosedForm,
            )?;
            let uncorrected = semiclassical::approx_splitting_closed_form(
                &params,
                false,
                ESource::ClosedForm,
            )?;
            Ok(format!(
                "{},{},{},{},{},{},{valid}",
                fmt(lambda),
                fmt(params.hopping() / (2.0 * PI)),
                fmt(exact),
                fmt(semi),
                fmt(closed),
                fmt(uncorrected),
            ))
        })
        .collect::<Result<_>>()?;
    write_csv(
        out,
        &cfg.header(),
        "lambda,j_hz,f_exact_hz,f_semiclassical_hz,f_closed_form_hz,f_closed_form_uncorrected_hz,semiclassical_valid",
        &rows,
    )
}

fn cmd_husimi(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.params()?;
    let grid = cfg.grid.unwrap_or(61);
    if grid < 2 {
        bail!("--grid must be >= 2");
    }
    let p0 = cfg.start_point(&params)?;
    let f_hz = semiclassical::splitting_hz(&params, cfg.source()?)?;
    if !(f_hz > 0.0) {
        bail!("splitting source gave a non-positive frequency {f_hz} Hz; no period schedule");
    }
    let period = 1.0 / f_hz;
    let times: Vec<f64> = (0..=4).map(|q| q as f64 * period / 4.0).collect();
    let z_axis: Vec<f64> =
        (0..grid).map(|i| -1.0 + 2.0 * i as f64 / (grid - 1) as f64).collect();
    let phi_axis: Vec<f64> =
        (0..grid).map(|i| 2.0 * PI * i as f64 / (grid - 1) as f64).collect();
    let spectrum = quantum::spectrum(&params)?;
    let psi0 = quantum::coherent_state(&params, p0)?;
    let frames: Vec<(usize, f64, quantum::HusimiGrid)> = times
        .par_iter()
        .enumerate()
        .map(|(i, &t)| -> Result<_> {
            let psi = quantum::evolve(&psi0, &spectrum, t)?;
            Ok((i, t, quantum::husimi(&params, &psi, &z_axis, &phi_axis)?))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(times.len() * grid * grid);
    for (frame, t, grid_q) in &frames {
        for (zi, &z) in z_axis.iter().enumerate() {
            for (pi_idx, &phi) in phi_axis.iter().enumerate() {
                rows.push(format!(
                    "{frame},{},{},{},{}",
                    fmt(*t),
                    fmt(z),
                    fmt(phi),
                    fmt(grid_q.q[zi][pi_idx])
                ));
            }
        }
    }
    write_csv(out, &cfg.header(), "frame,t_s,z,phi,q", &rows)
}

fn cmd_dissipate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.params()?;
    let gamma_hz = cfg.gamma_hz.ok_or_else(|| anyhow!("--gamma-hz is required"))?;
    if gamma_hz < 0.0 {
        bail!("--gamma-hz must be >= 0");
    }
    let gamma = 2.0 * PI * gamma_hz;
    let p0 = cfg.start_point(&params)?;
    let t_end = match cfg.t_end {
        Some(t) => t,
        None if gamma > 0.0 => 5.0 / gamma,
        None => bail!("--t-end is required when --gamma-hz is 0"),
    };
    let dt = cfg.dt.unwrap_or(t_end / 200.0);
    let master = dissipative::survival_master_equation(&params, gamma, p0, t_end, dt)?;
    let with_de = dissipative::effective_two_level(&params, gamma, cfg.source()?)?;
    let frozen = TwoLevelEffective { delta_e: 0.0, ..with_de };
    let rows: Vec<String> = master
        .iter()
        .map(|&(t, p)| -> Result<String> {
            Ok(format!(
                "{},{},{},{}",
                fmt(t),
                fmt(p),
                fmt(dissipative::survival_two_level(&with_de, t)?),
                fmt(dissipative::survival_two_level(&frozen, t)?)
            ))
        })
        .collect::<Result<_>>()?;
    write_csv(
        out,
        &cfg.header(),
        "t_s,p_master,p_two_level,p_two_level_frozen",
        &rows,
    )
}

fn cmd_weights(cfg: &RunConfig, out: &Path) -> Result<()> {
    let n_max = cfg.n()?;
    if n_max < 2 {
        bail!("--n must be >= 2 for a weights sweep");
    }
    let lambda = cfg.lambda.ok_or_else(|| anyhow!("--lambda is required"))?;
    let per_n: Vec<Vec<String>> = (2..=n_max)
        .into_par_iter()
        .map(|n| -> Result<Vec<String>> {
            let params = cfg.params_at(lambda, n)?;
            let p0 = cfg.start_point(&params)?;
            (1..=n + 1)
                .map(|k| {
                    let w = quantum::top_weights(&params, p0, k)?;
                    Ok(format!("{n},{k},{}", fmt(w)))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<String> = per_n.into_iter().flatten().collect();
    write_csv(out, &cfg.header(), "n_particles,n_states,cumulative_weight", &rows)
}

fn run() -> Result<()> {
    if let Ok(threads) = std::env::var("DIMER_THREADS") {
        let threads: usize = threads
            .parse()
            .with_context(|| format!("DIMER_THREADS must be a positive integer, got {threads:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let cli = Cli::parse();
    let args = cli.command.args();
    let cfg = RunConfig::merge(cli.command.name(), args)?;
    let out = out_path(args)?;
    match &cli.command {
        Command::Spectrum(_) => cmd_spectrum(&cfg, out),
        Command::SplittingSweep(_) => cmd_splitting_sweep(&cfg, out),
        Command::Husimi(_) => cmd_husimi(&cfg, out),
        Command::Dissipate(_) => cmd_dissipate(&cfg, out),
        Command::Weights(_) => cmd_weights(&cfg, out),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
