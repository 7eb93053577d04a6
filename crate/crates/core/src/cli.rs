//! Command-line interface.
//!
//! Subcommands: `solve` (one instance), `analytic` (prism oracle table),
//! `limit1d` (1D spectrum), `sweep` (full study), `compare` (FEM vs oracle
//! vs limit). Exit codes: 0 success, 2 config error, 3 solver failure,
//! 4 acceptance-check failure in `compare`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::assembly::BcMode;
use crate::error::{Error, Result};
use crate::limit1d::{self, Weight1D};
use crate::studies::{self, StudyConfig};

#[derive(Debug, Parser)]
#[command(name = "rodspec", version, about = "Low-frequency Laplacian spectra on thin rod domains")]
struct Cli {
    /// Suppress the human-readable tables on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BcArg {
    Mixed,
    Neumann,
    Dirichlet,
}

impl From<BcArg> for BcMode {
    fn from(b: BcArg) -> BcMode {
        match b {
            BcArg::Mixed => BcMode::Mixed,
            BcArg::Neumann => BcMode::Neumann,
            BcArg::Dirichlet => BcMode::Dirichlet,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve one (domain, bc, eps) instance from a JSON study config.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the JSON report, CSV table and VTK fields.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configured number of modes.
        #[arg(long)]
        modes: Option<usize>,
        /// Override the configured solver tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Also export the mesh and one VTK file per mode.
        #[arg(long)]
        vtk: bool,
        /// Also dump the reduced stiffness/mass pair in Matrix Market format.
        #[arg(long)]
        dump_matrices: bool,
    },
    /// Closed-form prism spectrum.
    Analytic {
        #[arg(long, value_enum)]
        bc: BcArg,
        #[arg(long)]
        ell1: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 1D weighted Dirichlet limit spectrum from a weight config.
    Limit1d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full eps-sweep study from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// FEM vs analytic vs limit comparison on the prism; exits 4 when the
    /// relative-error check fails.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Acceptance threshold on the max relative eigenvalue error.
        #[arg(long, default_value_t = 0.01)]
        max_rel_err: f64,
    },
}

/// Config for the `limit1d` subcommand: either an explicit piecewise
/// constant weight or the area weight of a catalog domain.
#[derive(Debug, Serialize, Deserialize)]
struct Limit1dConfig {
    #[serde(default)]
    ell0: f64,
    ell1: f64,
    #[serde(default = "default_modes_1d")]
    n_modes: usize,
    #[serde(default = "studies_default_elements")]
    elements_1d: usize,
    #[serde(default)]
    pieces: Option<Vec<(f64, f64, f64)>>,
    #[serde(default)]
    domain: Option<studies::DomainConfig>,
}

fn default_modes_1d() -> usize {
    5
}

fn studies_default_elements() -> usize {
    1000
}

#[derive(Debug, Serialize)]
struct Limit1dReport {
    ell0: f64,
    ell1: f64,
    elements: usize,
    lambda: Vec<f64>,
    oracle: Option<Vec<f64>>,
}

fn load_limit1d_config(path: &Path) -> Result<Limit1dConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run_limit1d(cfg: &Limit1dConfig, quiet: bool, out: Option<&Path>) -> Result<()> {
    let weight = match (&cfg.pieces, &cfg.domain) {
        (Some(p), None) => Weight1D::piecewise_constant(p.clone())?,
        (None, Some(d)) => Weight1D::from_domain(&d.build()?),
        _ => {
            return Err(Error::Config(
                "limit1d config needs exactly one of `pieces` or `domain`".into(),
            ))
        }
    };
    let sol = limit1d::solve_limit(&weight, cfg.ell0, cfg.ell1, cfg.n_modes, cfg.elements_1d)?;
    let lambda: Vec<f64> = sol.pairs.iter().map(|p| p.lambda0).collect();
    let oracle = weight
        .pieces()
        .and_then(|_| limit1d::shooting_oracle(&weight, cfg.ell0, cfg.ell1, cfg.n_modes).ok());
    if !quiet {
        println!("1d limit spectrum on ({}, {}):", cfg.ell0, cfg.ell1);
        for (i, l) in lambda.iter().enumerate() {
            match &oracle {
                Some(o) => println!("  mode {:>2}  lambda0 = {:<22} oracle = {}", i + 1, l, o[i]),
                None => println!("  mode {:>2}  lambda0 = {}", i + 1, l),
            }
        }
    }
    let report = Limit1dReport {
        ell0: cfg.ell0,
        ell1: cfg.ell1,
        elements: cfg.elements_1d,
        lambda,
        oracle,
    };
    if let Some(dir) = out {
        studies::write_text(
            &dir.join("limit1d_report.json"),
            &studies::to_json_pretty(&report)?,
        )?;
    }
    Ok(())
}

fn run_analytic(
    bc: BcMode,
    ell1: f64,
    eps: f64,
    modes: usize,
    quiet: bool,
    out: Option<&Path>,
) -> Result<()> {
    if modes < 1 {
        return Err(Error::Config("modes must be at least 1".into()));
    }
    if !(ell1 > 0.0) || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(
            "analytic table needs ell1 > 0 and eps in (0, 1]".into(),
        ));
    }
    // Neumann counting: the zero mode is index 0; show it on top of the
    // requested nonzero modes
    let extra = if bc == BcMode::Neumann { 1 } else { 0 };
    let table = analytic::enumerate_sorted(bc, ell1, eps, modes + extra);
    if !quiet {
        println!("analytic prism spectrum (bc {bc:?}, ell1 {ell1}, eps {eps}):");
        for (i, m) in table.iter().enumerate() {
            let index = i + 1 - extra;
            println!(
                "  mode {:>2}  (m,r,s) = ({},{},{})  lambda = {:<22} lambda/pi^2 = {}",
                index,
                m.m,
                m.r,
                m.s,
                m.lambda,
                m.lambda / (std::f64::consts::PI * std::f64::consts::PI)
            );
        }
    }
    if let Some(dir) = out {
        studies::write_text(
            &dir.join("analytic_report.json"),
            &studies::to_json_pretty(&table)?,
        )?;
    }
    Ok(())
}

fn run_solve_cmd(
    config: &Path,
    out: Option<&Path>,
    modes: Option<usize>,
    tol: Option<f64>,
    want_vtk: bool,
    dump_matrices: bool,
    quiet: bool,
) -> Result<()> {
    let mut cfg = StudyConfig::from_path(config)?;
    if let Some(m) = modes {
        cfg.n_modes = m;
    }
    if let Some(t) = tol {
        cfg.tol = t;
    }
    let outcome = studies::run_solve(&cfg)?;
    if !quiet {
        println!(
            "solved {:?} eps={} on {:?}: {} free DOFs",
            cfg.bc,
            outcome.report.eps,
            cfg.resolution,
            outcome.report.n_free
        );
        for r in &outcome.report.modes {
            println!(
                "  mode {:>2}  lambda = {:<22} residual = {:<12.3e} {:?}",
                r.mode, r.lambda, r.residual, r.classification
            );
        }
    }
    let dir = out.map(Path::to_path_buf).or(cfg.out_dir.clone());
    if let Some(dir) = dir {
        studies::write_text(
            &dir.join("solve_report.json"),
            &studies::to_json_pretty(&outcome.report)?,
        )?;
        let rows: Vec<&studies::ModeRow> = outcome.report.modes.iter().collect();
        studies::write_text(&dir.join("modes.csv"), &studies::rows_to_csv(&rows))?;
        if want_vtk {
            crate::vtk::write_unstructured_grid(
                &dir.join("mesh.vtk"),
                "stretched reference mesh",
                &outcome.mesh,
                &[],
            )?;
            studies::export_fields(&outcome.mesh, &outcome.assembled, &outcome.pairs, &dir)?;
        }
        if dump_matrices {
            for (name, matrix) in [("k.mtx", &outcome.assembled.k), ("m.mtx", &outcome.assembled.m)]
            {
                let path = dir.join(name);
                let file = std::fs::File::create(&path)
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
                matrix
                    .write_matrix_market(std::io::BufWriter::new(file))
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
            }
        }
    }
    Ok(())
}

fn run_sweep_cmd(config: &Path, out: Option<&Path>, quiet: bool) -> Result<()> {
    let cfg = StudyConfig::from_path(config)?;
    let report = studies::run_sweep(&cfg)?;
    if !quiet {
        println!(
            "sweep {:?} over eps {:?} ({} modes):",
            report.bc, report.eps_list, report.n_modes
        );
        for m in 0..report.n_modes {
            print!("  mode {:>2}  limit = {:<22}", m + 1, report.limit[m]);
            match report.slopes[m] {
                Some(p) => println!(" slope = {p:.3}"),
                None => println!(" slope = n/a"),
            }
            for (ei, &eps) in report.eps_list.iter().enumerate() {
                match report.paired(m, ei) {
                    Some(row) => println!(
                        "      eps {:<8} lambda = {:<22} gap = {:.3e}",
                        eps,
                        row.lambda,
                        report.gap(m, ei).unwrap()
                    ),
                    None => println!("      eps {eps:<8} (mode not identified)"),
                }
            }
        }
        let violations = report.bounds.iter().filter(|b| !b.satisfied).count();
        println!(
            "  bound verdicts: {} checked, {} violated",
            report.bounds.len(),
            violations
        );
    }
    let dir = out.map(Path::to_path_buf).or(cfg.out_dir.clone());
    if let Some(dir) = dir {
        studies::write_text(
            &dir.join("sweep_report.json"),
            &studies::to_json_pretty(&report)?,
        )?;
        let rows: Vec<&studies::ModeRow> = report.table.iter().flatten().collect();
        studies::write_text(&dir.join("sweep_table.csv"), &studies::rows_to_csv(&rows))?;
    }
    Ok(())
}

fn run_compare_cmd(
    config: &Path,
    out: Option<&Path>,
    max_rel_err: f64,
    quiet: bool,
) -> Result<i32> {
    let cfg = StudyConfig::from_path(config)?;
    let report = studies::compare(&cfg, max_rel_err)?;
    if !quiet {
        println!(
            "compare {:?} eps={} on {:?}: max rel err {:.4e} (threshold {:.4e})",
            report.bc, report.eps, report.resolution, report.max_rel_err, report.threshold
        );
        for r in &report.rows {
            println!(
                "  mode {:>2}  fem = {:<22} analytic = {:<22} rel = {:+.3e}",
                r.mode, r.lambda_fem, r.lambda_analytic, r.rel_err
            );
        }
        for c in &report.cluster_angles {
            println!(
                "  cluster at lambda = {} (size {}): subspace angle {:.3e} rad",
                c.lambda, c.size, c.angle_rad
            );
        }
    }
    if let Some(dir) = out.map(Path::to_path_buf).or(cfg.out_dir.clone()) {
        studies::write_text(
            &dir.join("compare_report.json"),
            &studies::to_json_pretty(&report)?,
        )?;
    }
    Ok(if report.passed { 0 } else { 4 })
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version on stdout with success
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let quiet = cli.quiet;
    let outcome: Result<i32> = match cli.cmd {
        Cmd::Solve {
            config,
            out,
            modes,
            tol,
            vtk,
            dump_matrices,
        } => run_solve_cmd(&config, out.as_deref(), modes, tol, vtk, dump_matrices, quiet)
            .map(|()| 0),
        Cmd::Analytic {
            bc,
            ell1,
            eps,
            modes,
            out,
        } => run_analytic(bc.into(), ell1, eps, modes, quiet, out.as_deref()).map(|()| 0),
        Cmd::Limit1d { config, modes, out } => load_limit1d_config(&config)
            .and_then(|mut cfg| {
                if let Some(m) = modes {
                    cfg.n_modes = m;
                }
                run_limit1d(&cfg, quiet, out.as_deref())
            })
            .map(|()| 0),
        Cmd::Sweep { config, out } => run_sweep_cmd(&config, out.as_deref(), quiet).map(|()| 0),
        Cmd::Compare {
            config,
            out,
            max_rel_err,
        } => run_compare_cmd(&config, out.as_deref(), max_rel_err, quiet),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
