//! Classification of computed eigenfunctions and localization metrics.
//!
//! The Rayleigh identity splits an eigenvalue into axial and transverse
//! Dirichlet energy; low modes of thin rods carry almost everything in the
//! axial block, transverse oscillation shows up as an O(eps^-2) share.

use serde::{Deserialize, Serialize};

use crate::assembly::SparsePair;
use crate::eigensolve::EigenPair;
use crate::error::{Error, Result};
use crate::mesh::{det3, jacobian, shape_values, HexMesh};
use crate::sparse::quadratic_form;

/// Default (t_lo, t_hi) thresholds on the transverse energy fraction.
pub const DEFAULT_THRESHOLDS: (f64, f64) = (0.1, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Longitudinal,
    Transverse,
    Mixed,
}

/// Per-mode classification summary serialized into study outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeReport {
    pub transverse_fraction: f64,
    pub classification: Classification,
    pub axial_mass: Vec<f64>,
    pub participation: f64,
}

/// (axial, transverse) Dirichlet energies u^T K1 u and eps^-2 u^T K23 u.
/// Requires the assembly to have retained the directional blocks.
pub fn energy_split(pair: &EigenPair, assembled: &SparsePair) -> Result<(f64, f64)> {
    let (Some(ka), Some(kt)) = (&assembled.k_axial, &assembled.k_transverse) else {
        return Err(Error::Config(
            "directional stiffness blocks were not retained; re-assemble with block retention"
                .into(),
        ));
    };
    let axial = quadratic_form(ka, &pair.vector, &pair.vector);
    let trans = quadratic_form(kt, &pair.vector, &pair.vector);
    Ok((axial, trans))
}

/// Transverse share of the total Dirichlet energy.
pub fn transverse_fraction(pair: &EigenPair, assembled: &SparsePair) -> Result<f64> {
    let (axial, trans) = energy_split(pair, assembled)?;
    let total = axial + trans;
    // index 0 is the deflated Neumann kernel: both energies are roundoff
    if pair.index == 0 || total <= 0.0 {
        return Ok(0.0);
    }
    Ok(trans / total)
}

pub fn classify(transverse_fraction: f64, thresholds: (f64, f64)) -> Classification {
    let (t_lo, t_hi) = thresholds;
    if transverse_fraction < t_lo {
        Classification::Longitudinal
    } else if transverse_fraction > t_hi {
        Classification::Transverse
    } else {
        Classification::Mixed
    }
}

/// Per-segment M-mass fractions and the inverse participation ratio.
///
/// Cuts split the axial interval into segments; each element contributes its
/// elementwise mass u_e^T M_e u_e to the segment containing the element
/// centroid, so the fractions sum to one exactly.
pub fn localization(
    pair: &EigenPair,
    mesh: &HexMesh,
    assembled: &SparsePair,
    cuts: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let (ell0, ell1) = mesh.axial_span();
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config("cuts must be strictly increasing".into()));
        }
    }
    for &c in cuts {
        if c <= ell0 || c >= ell1 {
            return Err(Error::Config(format!(
                "cut {c} must lie strictly inside ({ell0}, {ell1})"
            )));
        }
    }
    let full = assembled.dof_map.expand(&pair.vector);
    let nseg = cuts.len() + 1;
    let mut mass = vec![0.0f64; nseg];
    let mut counts = vec![0usize; nseg];
    let g = 1.0 / 3.0f64.sqrt();
    for c in 0..mesh.cell_count() {
        let centroid = mesh.cell_axial_centroid(c);
        let seg = cuts.partition_point(|&cut| cut < centroid);
        counts[seg] += 1;
        let coords = mesh.cell_coords(c);
        let cell = &mesh.cells[c];
        let mut ue = [0.0f64; 8];
        for (a, &node) in cell.iter().enumerate() {
            ue[a] = full[node];
        }
        let mut me_quad = 0.0;
        for &sx in &[-g, g] {
            for &sy in &[-g, g] {
                for &sz in &[-g, g] {
                    let det = det3(&jacobian(&coords, sx, sy, sz));
                    let nv = shape_values(sx, sy, sz);
                    let uh: f64 = (0..8).map(|a| nv[a] * ue[a]).sum();
                    me_quad += det * uh * uh;
                }
            }
        }
        mass[seg] += me_quad;
    }
    if let Some(seg) = counts.iter().position(|&c| c == 0) {
        return Err(Error::Config(format!(
            "axial segment {seg} contains no elements; coarsen the cuts or refine the mesh"
        )));
    }
    let total: f64 = mass.iter().sum();
    let fractions: Vec<f64> = mass.iter().map(|m| m / total).collect();
    let participation = 1.0 / fractions.iter().map(|f| f * f).sum::<f64>();
    Ok((fractions, participation))
}

/// Full report for one mode.
pub fn mode_report(
    pair: &EigenPair,
    mesh: &HexMesh,
    assembled: &SparsePair,
    cuts: &[f64],
    thresholds: (f64, f64),
) -> Result<ModeReport> {
    let frac = transverse_fraction(pair, assembled)?;
    let (axial_mass, participation) = localization(pair, mesh, assembled, cuts)?;
    Ok(ModeReport {
        transverse_fraction: frac,
        classification: classify(frac, thresholds),
        axial_mass,
        participation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, assemble_with_options, BcMode};
    use crate::eigensolve::solve_lowest;
    use crate::geometry::RodDomain;
    use crate::mesh::build_mesh;

    #[test]
    fn classify_thresholds() {
        assert_eq!(
            classify(0.0, DEFAULT_THRESHOLDS),
            Classification::Longitudinal
        );
        assert_eq!(
            classify(100.0 / 101.0, DEFAULT_THRESHOLDS),
            Classification::Transverse
        );
        assert_eq!(classify(0.3, DEFAULT_THRESHOLDS), Classification::Mixed);
    }

    #[test]
    fn energy_split_requires_blocks() {
        let mesh = build_mesh(&RodDomain::prism(1.0, 0.1).unwrap(), (8, 2, 2)).unwrap();
        let sp = assemble_with_options(&mesh, BcMode::Mixed, 0.1, false).unwrap();
        let pairs = solve_lowest(&sp, 1, 1e-9).unwrap();
        assert!(matches!(
            energy_split(&pairs[0], &sp),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn axial_mode_has_negligible_transverse_energy() {
        let mesh = build_mesh(&RodDomain::prism(1.0, 0.1).unwrap(), (16, 2, 2)).unwrap();
        let sp = assemble(&mesh, BcMode::Mixed, 0.1).unwrap();
        let pairs = solve_lowest(&sp, 1, 1e-9).unwrap();
        let (axial, trans) = energy_split(&pairs[0], &sp).unwrap();
        assert!(trans <= 1e-6 * pairs[0].lambda);
        assert!((axial + trans - pairs[0].lambda).abs() <= 1e-7 * pairs[0].lambda);
    }

    #[test]
    fn neumann_constant_has_zero_split_and_volume_mass() {
        let mesh = build_mesh(&RodDomain::two_prism(1.0, 0.125).unwrap(), (8, 4, 4)).unwrap();
        let sp = assemble(&mesh, BcMode::Neumann, 0.125).unwrap();
        let pairs = solve_lowest(&sp, 1, 1e-8).unwrap();
        let zero = &pairs[0];
        assert_eq!(zero.index, 0);
        let (axial, trans) = energy_split(zero, &sp).unwrap();
        assert!(axial.abs() < 1e-10 && trans.abs() < 1e-10);
        // constant mode mass splits by stretched segment volume: 2 vs 1/2
        let (fractions, participation) = localization(zero, &mesh, &sp, &[0.5]).unwrap();
        assert!((fractions[0] - 0.8).abs() < 1e-12);
        assert!((fractions[1] - 0.2).abs() < 1e-12);
        let expect_p = 1.0 / (0.8f64.powi(2) + 0.2f64.powi(2));
        assert!((participation - expect_p).abs() < 1e-10);
    }

    #[test]
    fn uniform_split_gives_participation_two() {
        let mesh = build_mesh(&RodDomain::prism(1.0, 0.1).unwrap(), (8, 2, 2)).unwrap();
        let sp = assemble(&mesh, BcMode::Neumann, 0.1).unwrap();
        let pairs = solve_lowest(&sp, 1, 1e-8).unwrap();
        let (fractions, participation) = localization(&pairs[0], &mesh, &sp, &[0.5]).unwrap();
        assert!((fractions[0] - 0.5).abs() < 1e-12);
        assert!((participation - 2.0).abs() < 1e-10);
        // a mode supported in a single segment has participation one
        let (whole, p1) = localization(&pairs[0], &mesh, &sp, &[]).unwrap();
        assert_eq!(whole, vec![1.0]);
        assert!((p1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fractions_sum_to_one_for_oscillatory_modes() {
        let mesh = build_mesh(&RodDomain::prism(1.0, 0.1).unwrap(), (16, 2, 2)).unwrap();
        let sp = assemble(&mesh, BcMode::Mixed, 0.1).unwrap();
        let pairs = solve_lowest(&sp, 3, 1e-9).unwrap();
        for p in &pairs {
            let (fractions, _) = localization(p, &mesh, &sp, &[0.3, 0.7]).unwrap();
            let sum: f64 = fractions.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bad_cuts_are_config_errors() {
        let mesh = build_mesh(&RodDomain::prism(1.0, 0.1).unwrap(), (4, 2, 2)).unwrap();
        let sp = assemble(&mesh, BcMode::Mixed, 0.1).unwrap();
        let pairs = solve_lowest(&sp, 1, 1e-9).unwrap();
        assert!(localization(&pairs[0], &mesh, &sp, &[1.5]).is_err());
        // a sliver segment with no element centroids
        assert!(localization(&pairs[0], &mesh, &sp, &[0.001, 0.002]).is_err());
    }
}
