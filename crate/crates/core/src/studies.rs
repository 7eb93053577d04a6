//! Study orchestration: single solves, eps-sweeps against the 1D limit,
//! eigenvalue-bound checks, comparisons with the prism oracle, and report
//! export (JSON, CSV, VTK).
//!
//! Reports are deterministic: identical configs produce identical bytes.
//! Serialized structs keep a fixed field order, floats are written in
//! Rust's shortest round-trip form, and nothing time- or thread-dependent
//! enters any output.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::{self, AnalyticMode};
use crate::assembly::{self, BcMode, SparsePair};
use crate::eigensolve::{self, cluster_partition, subspace_angle, EigenPair, CLUSTER_REL_GAP};
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, Profile, RodDomain};
use crate::limit1d::{self, Weight1D};
use crate::mesh::{build_mesh, HexMesh};
use crate::modes::{self, Classification, DEFAULT_THRESHOLDS};
use crate::vtk;

/// Extra modes solved beyond the requested count so that transverse
/// intruders can be filtered out before pairing with the 1D limit.
pub const DEFAULT_SOLVE_BUFFER: usize = 6;

fn default_elements_1d() -> usize {
    1000
}

fn default_tol() -> f64 {
    eigensolve::DEFAULT_TOL
}

fn default_thresholds() -> (f64, f64) {
    DEFAULT_THRESHOLDS
}

fn default_solve_buffer() -> usize {
    DEFAULT_SOLVE_BUFFER
}

/// Geometry description as it appears in study configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainConfig {
    Prism {
        #[serde(default)]
        ell0: f64,
        ell1: f64,
        eps: f64,
        #[serde(default)]
        width: Option<f64>,
        #[serde(default)]
        height: Option<f64>,
    },
    TwoPrism {
        #[serde(default)]
        ell0: f64,
        ell1: f64,
        eps: f64,
        #[serde(default)]
        outer_half: Option<f64>,
        #[serde(default)]
        inner_half: Option<f64>,
        #[serde(default)]
        junction: Option<f64>,
    },
    ProfiledHeight {
        #[serde(default)]
        ell0: f64,
        ell1: f64,
        eps: f64,
        profile: Profile,
    },
    ProfiledWidth {
        #[serde(default)]
        ell0: f64,
        ell1: f64,
        eps: f64,
        profile: Profile,
    },
    ProfiledBox {
        #[serde(default)]
        ell0: f64,
        ell1: f64,
        eps: f64,
        left: Profile,
        right: Profile,
        down: Profile,
        up: Profile,
    },
}

impl DomainConfig {
    pub fn build(&self) -> Result<RodDomain> {
        match self.clone() {
            DomainConfig::Prism {
                ell0,
                ell1,
                eps,
                width,
                height,
            } => RodDomain::new(
                ell0,
                ell1,
                eps,
                CrossSection::Rectangle {
                    width: width.unwrap_or(1.0),
                    height: height.unwrap_or(1.0),
                },
            ),
            DomainConfig::TwoPrism {
                ell0,
                ell1,
                eps,
                outer_half,
                inner_half,
                junction,
            } => {
                let outer = outer_half.unwrap_or(1.0);
                RodDomain::new(
                    ell0,
                    ell1,
                    eps,
                    CrossSection::TwoSquare {
                        outer_half: outer,
                        inner_half: inner_half.unwrap_or(0.5 * outer),
                        junction: junction.unwrap_or(0.5 * (ell0 + ell1)),
                    },
                )
            }
            DomainConfig::ProfiledHeight {
                ell0,
                ell1,
                eps,
                profile,
            } => RodDomain::new(ell0, ell1, eps, CrossSection::HeightProfile { profile }),
            DomainConfig::ProfiledWidth {
                ell0,
                ell1,
                eps,
                profile,
            } => RodDomain::new(ell0, ell1, eps, CrossSection::WidthProfile { profile }),
            DomainConfig::ProfiledBox {
                ell0,
                ell1,
                eps,
                left,
                right,
                down,
                up,
            } => RodDomain::new(
                ell0,
                ell1,
                eps,
                CrossSection::BoxProfile {
                    left,
                    right,
                    down,
                    up,
                },
            ),
        }
    }
}

/// Full study configuration (JSON schema documented in the README).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub domain: DomainConfig,
    pub bc: BcMode,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    pub n_modes: usize,
    pub resolution: [usize; 3],
    #[serde(default = "default_elements_1d")]
    pub elements_1d: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub compare_analytic: bool,
    #[serde(default)]
    pub localization_cuts: Option<Vec<f64>>,
    #[serde(default = "default_thresholds")]
    pub thresholds: (f64, f64),
    #[serde(default = "default_solve_buffer")]
    pub solve_buffer: usize,
}

impl StudyConfig {
    pub fn validate(&self, needs_eps_list: bool) -> Result<()> {
        if self.n_modes < 1 {
            return Err(Error::Config("n_modes must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        let (t_lo, t_hi) = self.thresholds;
        if !(0.0 < t_lo && t_lo < t_hi && t_hi < 1.0) {
            return Err(Error::Config(
                "thresholds must satisfy 0 < t_lo < t_hi < 1".into(),
            ));
        }
        if needs_eps_list {
            if self.eps_list.is_empty() {
                return Err(Error::Config("eps_list must not be empty".into()));
            }
            for w in self.eps_list.windows(2) {
                if w[1] >= w[0] {
                    return Err(Error::Config("eps_list must be strictly decreasing".into()));
                }
            }
            for &e in &self.eps_list {
                if !(e > 0.0 && e <= 1.0) {
                    return Err(Error::Config(format!("eps {e} must lie in (0, 1]")));
                }
            }
        }
        Ok(())
    }

    pub fn from_path(path: &Path) -> Result<StudyConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// One row of an eigenvalue table (CSV mirror order:
/// mode,eps,lambda,residual,classification,transverse_fraction).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeRow {
    pub mode: usize,
    pub eps: f64,
    pub lambda: f64,
    pub residual: f64,
    pub classification: Classification,
    pub transverse_fraction: f64,
}

/// Report of a single (domain, bc, eps) solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub bc: BcMode,
    pub eps: f64,
    pub resolution: [usize; 3],
    pub n_free: usize,
    pub modes: Vec<ModeRow>,
    /// Per-mode segment mass fractions when localization cuts apply.
    pub axial_mass: Option<Vec<Vec<f64>>>,
    pub participation: Option<Vec<f64>>,
    pub cuts: Vec<f64>,
    /// Closed-form eigenvalues, attached for unit-section prisms when the
    /// config asks for the analytic comparison.
    pub analytic: Option<Vec<f64>>,
}

/// Minimax/Poincare bound verdict for one computed eigenvalue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub mode: usize,
    pub eps: f64,
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    pub satisfied: bool,
}

/// Sweep output: rectangular eigenvalue table (n_modes x |eps_list|),
/// 1D limit values, gaps, fitted slopes and bound verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub bc: BcMode,
    pub ell0: f64,
    pub ell1: f64,
    pub c0: f64,
    pub c1: f64,
    pub eps_list: Vec<f64>,
    pub n_modes: usize,
    pub resolution: [usize; 3],
    /// Paired longitudinal eigenvalues, row-major over (mode, eps);
    /// None marks a mode that could not be identified at that eps.
    pub table: Vec<Option<ModeRow>>,
    /// Raw solved spectra per eps (classification included).
    pub spectra: Vec<Vec<ModeRow>>,
    /// 1D limit eigenvalues from the P1 solver.
    pub limit: Vec<f64>,
    /// Shooting-oracle cross-check when the weight is piecewise constant.
    pub limit_oracle: Option<Vec<f64>>,
    /// |lambda_n^eps - lambda_n^0|, row-major over (mode, eps).
    pub gaps: Vec<Option<f64>>,
    /// Strict decrease of the gap along eps_list, per mode.
    pub gaps_strictly_decreasing: Vec<bool>,
    /// Fitted slope p of gap ~ C eps^p per mode (log-log least squares).
    pub slopes: Vec<Option<f64>>,
    pub bounds: Vec<BoundVerdict>,
}

impl SweepReport {
    pub fn gap(&self, mode: usize, eps_idx: usize) -> Option<f64> {
        self.gaps[mode * self.eps_list.len() + eps_idx]
    }

    pub fn paired(&self, mode: usize, eps_idx: usize) -> Option<&ModeRow> {
        self.table[mode * self.eps_list.len() + eps_idx].as_ref()
    }
}

/// Solve one instance and classify every returned mode.
pub struct SolveOutcome {
    pub domain: RodDomain,
    pub mesh: HexMesh,
    pub assembled: SparsePair,
    pub pairs: Vec<EigenPair>,
    pub report: SolveReport,
}

fn classify_rows(
    pairs: &[EigenPair],
    assembled: &SparsePair,
    eps: f64,
    thresholds: (f64, f64),
) -> Result<Vec<ModeRow>> {
    pairs
        .iter()
        .map(|p| {
            let frac = modes::transverse_fraction(p, assembled)?;
            Ok(ModeRow {
                mode: p.index,
                eps,
                lambda: p.lambda,
                residual: p.residual,
                classification: modes::classify(frac, thresholds),
                transverse_fraction: frac,
            })
        })
        .collect()
}

/// Run a single (domain, bc, eps) eigensolve with classification and
/// optional localization.
pub fn run_solve(config: &StudyConfig) -> Result<SolveOutcome> {
    config.validate(false)?;
    let domain = config.domain.build()?;
    let (n1, n2, n3) = (
        config.resolution[0],
        config.resolution[1],
        config.resolution[2],
    );
    let mesh = build_mesh(&domain, (n1, n2, n3))?;
    let assembled = assembly::assemble(&mesh, config.bc, domain.eps())?;
    let pairs = eigensolve::solve_lowest(&assembled, config.n_modes, config.tol)?;
    let rows = classify_rows(&pairs, &assembled, domain.eps(), config.thresholds)?;
    let cuts = config
        .localization_cuts
        .clone()
        .unwrap_or_else(|| domain.discontinuities());
    let (axial_mass, participation) = if cuts.is_empty() {
        (None, None)
    } else {
        let mut masses = Vec::with_capacity(pairs.len());
        let mut parts = Vec::with_capacity(pairs.len());
        for p in &pairs {
            let (m, part) = modes::localization(p, &mesh, &assembled, &cuts)?;
            masses.push(m);
            parts.push(part);
        }
        (Some(masses), Some(parts))
    };
    let analytic_column = if config.compare_analytic {
        let is_unit_prism = matches!(domain.section(), CrossSection::Rectangle { width, height }
            if (*width - 1.0).abs() < 1e-12 && (*height - 1.0).abs() < 1e-12);
        if !is_unit_prism {
            return Err(Error::Config(
                "compare_analytic needs the unit-section prism".into(),
            ));
        }
        // for Neumann both lists start at the zero mode, so indices align
        let oracle =
            analytic::enumerate_sorted(config.bc, domain.ell1(), domain.eps(), pairs.len());
        Some(oracle.iter().map(|m| m.lambda).collect())
    } else {
        None
    };
    let report = SolveReport {
        bc: config.bc,
        eps: domain.eps(),
        resolution: config.resolution,
        n_free: assembled.n_free(),
        modes: rows,
        axial_mass,
        participation,
        cuts,
        analytic: analytic_column,
    };
    Ok(SolveOutcome {
        domain,
        mesh,
        assembled,
        pairs,
        report,
    })
}

/// Least-squares slope of ln(gap) against ln(eps).
fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, g)| *g > 0.0)
        .map(|(e, g)| (e.ln(), g.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Bound verdicts for computed eigenvalues against the minimax comparison
/// values: lower bound 1/len^2 from the Poincare constant, upper bound
/// (c1/c0) lambda_n^0 with the unweighted Dirichlet values
/// lambda_n^0 = n^2 pi^2 / len^2.
pub fn check_bounds(
    entries: &[(usize, f64, f64)],
    c0: f64,
    c1: f64,
    lambda0_unweighted: &[f64],
    len: f64,
    slack: f64,
) -> Vec<BoundVerdict> {
    let lower = (1.0 / (len * len)) * (1.0 - slack);
    entries
        .iter()
        .map(|&(mode, eps, lambda)| {
            let upper = if mode >= 1 && mode <= lambda0_unweighted.len() {
                (c1 / c0) * lambda0_unweighted[mode - 1] * (1.0 + slack)
            } else {
                f64::INFINITY
            };
            BoundVerdict {
                mode,
                eps,
                lambda,
                lower,
                upper,
                satisfied: lambda >= lower && lambda <= upper,
            }
        })
        .collect()
}

/// The unweighted 1D Dirichlet eigenvalues n^2 pi^2 / len^2 used in the
/// minimax comparison.
pub fn unweighted_dirichlet_values(n: usize, len: f64) -> Vec<f64> {
    (1..=n)
        .map(|k| (k as f64 * PI / len).powi(2))
        .collect()
}

/// Run an eps-sweep: one stretched mesh, one assembly pattern, one solve per
/// eps, classification, pairing of longitudinal modes with the 1D limit,
/// gap slopes and bound verdicts.
pub fn run_sweep(config: &StudyConfig) -> Result<SweepReport> {
    config.validate(true)?;
    let domain = config.domain.build()?;
    let (n1, n2, n3) = (
        config.resolution[0],
        config.resolution[1],
        config.resolution[2],
    );
    let mesh = build_mesh(&domain, (n1, n2, n3))?;
    let full = assembly::assemble_full(&mesh);
    let boundary = mesh.boundary_nodes();
    let constrained = assembly::constrained_nodes(&mesh, config.bc);

    // 1D limit baseline, plus oracle cross-check for stepwise weights
    let weight = Weight1D::from_domain(&domain);
    let elements = config.elements_1d.max(1000);
    let limit_sol = limit1d::solve_limit(
        &weight,
        domain.ell0(),
        domain.ell1(),
        config.n_modes,
        elements,
    )
    .map_err(|e| e.with_stage("1d limit stage"))?;
    let limit: Vec<f64> = limit_sol.pairs.iter().map(|p| p.lambda0).collect();
    let limit_oracle = weight.pieces().and_then(|_| {
        limit1d::shooting_oracle(&weight, domain.ell0(), domain.ell1(), config.n_modes).ok()
    });

    let n_solve = config.n_modes + config.solve_buffer;
    let mut spectra = Vec::with_capacity(config.eps_list.len());
    let mut table: Vec<Option<ModeRow>> = vec![None; config.n_modes * config.eps_list.len()];
    let ne = config.eps_list.len();

    for (ei, &eps) in config.eps_list.iter().enumerate() {
        let assembled = assembly::eliminate_dirichlet(
            &full,
            &constrained,
            &boundary,
            eps,
            config.bc,
            true,
        )?;
        let n_req = n_solve
            .min(assembled.n_free().saturating_sub(2))
            .max(config.n_modes);
        let pairs = eigensolve::solve_lowest(&assembled, n_req, config.tol)
            .map_err(|e| e.with_stage(&format!("solve stage at eps={eps}")))?;
        let rows = classify_rows(&pairs, &assembled, eps, config.thresholds)?;
        // Pair the k-th non-transverse mode with the k-th limit eigenvalue.
        // Transverse modes escape as eps^-2 and are excluded; a weakly
        // hybridized axial mode (Mixed) still tracks the limit problem.
        let mut k = 0usize;
        for row in rows.iter() {
            if row.mode == 0 {
                continue; // Neumann kernel has no 1D counterpart
            }
            if row.classification != Classification::Transverse && k < config.n_modes {
                table[k * ne + ei] = Some(row.clone());
                k += 1;
            }
        }
        spectra.push(rows);
    }

    let mut gaps: Vec<Option<f64>> = vec![None; config.n_modes * ne];
    for m in 0..config.n_modes {
        for ei in 0..ne {
            if let Some(row) = &table[m * ne + ei] {
                gaps[m * ne + ei] = Some((row.lambda - limit[m]).abs());
            }
        }
    }
    let mut gaps_strictly_decreasing = Vec::with_capacity(config.n_modes);
    let mut slopes = Vec::with_capacity(config.n_modes);
    for m in 0..config.n_modes {
        let series: Vec<Option<f64>> = (0..ne).map(|ei| gaps[m * ne + ei]).collect();
        let strictly = series.windows(2).all(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => b < a,
            _ => false,
        });
        gaps_strictly_decreasing.push(strictly && series.iter().all(|g| g.is_some()));
        // the fitted rate uses cleanly longitudinal points only
        let pts: Vec<(f64, f64)> = (0..ne)
            .filter_map(|ei| {
                let row = table[m * ne + ei].as_ref()?;
                if row.classification != Classification::Longitudinal {
                    return None;
                }
                gaps[m * ne + ei].map(|g| (config.eps_list[ei], g))
            })
            .collect();
        slopes.push(fit_slope(&pts));
    }

    let (c0, c1) = domain.area_bounds();
    let len = domain.ell1() - domain.ell0();
    let lambda0_unw = unweighted_dirichlet_values(config.n_modes, len);
    let mut entries = Vec::new();
    for m in 0..config.n_modes {
        for ei in 0..ne {
            if let Some(row) = &table[m * ne + ei] {
                entries.push((m + 1, row.eps, row.lambda));
            }
        }
    }
    let bounds = check_bounds(
        &entries,
        c0,
        c1,
        &lambda0_unw,
        len,
        (10.0 * config.tol).max(1e-6),
    );

    Ok(SweepReport {
        bc: config.bc,
        ell0: domain.ell0(),
        ell1: domain.ell1(),
        c0,
        c1,
        eps_list: config.eps_list.clone(),
        n_modes: config.n_modes,
        resolution: config.resolution,
        table,
        spectra,
        limit,
        limit_oracle,
        gaps,
        gaps_strictly_decreasing,
        slopes,
        bounds,
    })
}

/// Comparison of the FEM spectrum against the prism oracle and the 1D limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRow {
    pub mode: usize,
    pub lambda_fem: f64,
    pub lambda_analytic: f64,
    pub rel_err: f64,
    pub from_above: bool,
    /// 1D limit value for longitudinal modes (r = s = 0).
    pub lambda_limit: Option<f64>,
    pub analytic_limit_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterAngle {
    pub first_mode: usize,
    pub size: usize,
    pub lambda: f64,
    pub angle_rad: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub bc: BcMode,
    pub eps: f64,
    pub resolution: [usize; 3],
    pub rows: Vec<CompareRow>,
    pub cluster_angles: Vec<ClusterAngle>,
    pub max_rel_err: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Interpolate analytic modes at the free nodes as pseudo eigenpairs.
fn analytic_on_mesh(
    modes_a: &[AnalyticMode],
    mesh: &HexMesh,
    assembled: &SparsePair,
    ell1: f64,
) -> Result<Vec<EigenPair>> {
    modes_a
        .iter()
        .map(|m| {
            let mut v = Vec::with_capacity(assembled.n_free());
            for &node in &assembled.dof_map.node_of_free {
                v.push(analytic::evaluate(m, mesh.nodes[node], ell1)?);
            }
            Ok(EigenPair {
                lambda: m.lambda,
                vector: v,
                residual: 0.0,
                index: 0,
            })
        })
        .collect()
}

/// FEM vs analytic vs 1D limit on a prism domain. The comparison threshold
/// applies to the max relative eigenvalue error over the requested modes;
/// degenerate clusters are additionally compared by subspace angle.
pub fn compare(config: &StudyConfig, threshold: f64) -> Result<CompareReport> {
    let domain = config.domain.build()?;
    if !matches!(domain.section(), CrossSection::Rectangle { width, height }
        if (*width - 1.0).abs() < 1e-12 && (*height - 1.0).abs() < 1e-12)
    {
        return Err(Error::Config(
            "compare needs the unit-section prism (the closed-form oracle only covers it)".into(),
        ));
    }
    let outcome = run_solve(config)?;
    let ell1 = domain.ell1();
    let eps = domain.eps();
    let n = config.n_modes;
    let oracle = analytic::enumerate_sorted(config.bc, ell1, eps, n + 1);

    // skip the Neumann zero mode on both sides when pairing
    let fem: Vec<&EigenPair> = outcome.pairs.iter().filter(|p| p.index >= 1).collect();
    let skip = if config.bc == BcMode::Neumann { 1 } else { 0 };
    let count = fem.len().min(n);
    let mut rows = Vec::with_capacity(count);
    let mut max_rel_err = 0.0f64;
    // unweighted limit values are exact for the prism's unit weight; use the
    // shooting oracle so the analytic-vs-limit gap is an independent check
    let weight = Weight1D::from_domain(&domain);
    let limit_roots =
        limit1d::shooting_oracle(&weight, domain.ell0(), domain.ell1(), count.max(1))?;
    let mut long_seen = 0usize;
    for i in 0..count {
        let a = &oracle[skip + i];
        let f = fem[i];
        let rel = (f.lambda - a.lambda) / a.lambda;
        max_rel_err = max_rel_err.max(rel.abs());
        let (ll, gap) = if a.r == 0 && a.s == 0 && a.m >= 1 && long_seen < limit_roots.len() {
            let l0 = limit_roots[long_seen];
            long_seen += 1;
            (Some(l0), Some((a.lambda - l0).abs()))
        } else {
            (None, None)
        };
        rows.push(CompareRow {
            mode: f.index,
            lambda_fem: f.lambda,
            lambda_analytic: a.lambda,
            rel_err: rel,
            from_above: f.lambda >= a.lambda * (1.0 - 1e-10),
            lambda_limit: ll,
            analytic_limit_gap: gap,
        });
    }

    // degenerate clusters by subspace angle
    let lam_a: Vec<f64> = (0..count).map(|i| oracle[skip + i].lambda).collect();
    let mut cluster_angles = Vec::new();
    for (start, end) in cluster_partition(&lam_a, CLUSTER_REL_GAP) {
        if end - start < 2 {
            continue;
        }
        let fem_cluster: Vec<EigenPair> = (start..end).map(|i| fem[i].clone()).collect();
        let ana_cluster = analytic_on_mesh(
            &oracle[skip + start..skip + end],
            &outcome.mesh,
            &outcome.assembled,
            ell1,
        )?;
        let angle = subspace_angle(&fem_cluster, &ana_cluster, &outcome.assembled.m)?;
        cluster_angles.push(ClusterAngle {
            first_mode: start + 1,
            size: end - start,
            lambda: lam_a[start],
            angle_rad: angle,
        });
    }

    Ok(CompareReport {
        bc: config.bc,
        eps,
        resolution: config.resolution,
        rows,
        cluster_angles,
        max_rel_err,
        threshold,
        passed: max_rel_err <= threshold,
    })
}

/// Write one VTK file per mode (constrained DOFs re-inserted as zeros) and
/// an index JSON mapping files to (index, lambda, classification).
pub fn export_fields(
    mesh: &HexMesh,
    assembled: &SparsePair,
    pairs: &[EigenPair],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    #[derive(Serialize)]
    struct IndexEntry {
        file: String,
        index: usize,
        lambda: f64,
        classification: Classification,
    }
    let mut files = Vec::new();
    let mut index = Vec::new();
    for p in pairs {
        let full = assembled.dof_map.expand(&p.vector);
        let name = format!("mode_{:03}.vtk", p.index);
        let path = dir.join(&name);
        vtk::write_unstructured_grid(
            &path,
            &format!("eigenmode {} lambda {}", p.index, p.lambda),
            mesh,
            &[("u", &full)],
        )?;
        let frac = modes::transverse_fraction(p, assembled)?;
        index.push(IndexEntry {
            file: name,
            index: p.index,
            lambda: p.lambda,
            classification: modes::classify(frac, DEFAULT_THRESHOLDS),
        });
        files.push(path);
    }
    let json = serde_json::to_string_pretty(&index)
        .map_err(|e| Error::Config(format!("index serialization: {e}")))?;
    let ipath = dir.join("modes_index.json");
    fs::write(&ipath, json + "\n").map_err(|e| Error::io(ipath.display().to_string(), e))?;
    files.push(ipath);
    Ok(files)
}

/// CSV mirror of an eigenvalue table, header
/// `mode,eps,lambda,residual,classification,transverse_fraction`.
pub fn rows_to_csv(rows: &[&ModeRow]) -> String {
    let mut out = String::from("mode,eps,lambda,residual,classification,transverse_fraction\n");
    for r in rows {
        let class = match r.classification {
            Classification::Longitudinal => "longitudinal",
            Classification::Transverse => "transverse",
            Classification::Mixed => "mixed",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.mode, r.eps, r.lambda, r.residual, class, r.transverse_fraction
        ));
    }
    out
}

/// Serialize a report as pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Config(format!("serialization: {e}")))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}
