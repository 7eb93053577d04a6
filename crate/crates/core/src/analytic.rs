//! Closed-form separable eigenpairs of the unit-section prism.
//!
//! For the prism the eigenfunctions factor into 1D trigonometric problems:
//! sine in the axial direction under Dirichlet bases, cosine under Neumann,
//! and sine/cosine transversally depending on the lateral condition. In
//! stretched coordinates the transverse wavenumbers lose their eps (the
//! cosine of r pi x2/eps becomes cos(r pi y2)), while the eigenvalue keeps
//! its eps^-2 blow-up.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::assembly::BcMode;
use crate::error::{Error, Result};

/// One separable prism mode with its separation constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMode {
    pub m: u32,
    pub r: u32,
    pub s: u32,
    pub bc: BcMode,
    /// (m pi / ell1)^2 + (r pi / eps)^2 + (s pi / eps)^2, stored as the exact
    /// sum of the separation constants below.
    pub lambda: f64,
    /// Normalizing amplitude making the stretched L2 norm equal one.
    pub amplitude: f64,
    /// Separation constants (mu1, mu2, mu3).
    pub mu: (f64, f64, f64),
}

fn axial_weight(bc: BcMode, m: u32, ell1: f64) -> f64 {
    match bc {
        BcMode::Neumann if m == 0 => ell1,
        _ => 0.5 * ell1,
    }
}

fn transverse_weight(bc: BcMode, t: u32) -> f64 {
    match bc {
        BcMode::Dirichlet => 0.5,
        _ => {
            if t == 0 {
                1.0
            } else {
                0.5
            }
        }
    }
}

fn make_mode(bc: BcMode, ell1: f64, eps: f64, m: u32, r: u32, s: u32) -> AnalyticMode {
    let mu1 = (m as f64 * PI / ell1).powi(2);
    let mu2 = (r as f64 * PI / eps).powi(2);
    let mu3 = (s as f64 * PI / eps).powi(2);
    let norm2 = axial_weight(bc, m, ell1) * transverse_weight(bc, r) * transverse_weight(bc, s);
    AnalyticMode {
        m,
        r,
        s,
        bc,
        // grouping the transverse pair keeps the (r, s) swap symmetry exact
        lambda: mu1 + (mu2 + mu3),
        amplitude: 1.0 / norm2.sqrt(),
        mu: (mu1, mu2, mu3),
    }
}

fn index_start(bc: BcMode) -> (u32, u32) {
    // (axial start, transverse start)
    match bc {
        BcMode::Mixed => (1, 0),
        BcMode::Neumann => (0, 0),
        BcMode::Dirichlet => (1, 1),
    }
}

/// Enumerate the `count` smallest prism eigenvalues with multiplicity,
/// sorted nondecreasing, ties broken lexicographically by (m, r, s). The
/// enumeration is complete below a cutoff grown until enough modes exist,
/// with index bounds m <= ell1 sqrt(cut)/pi and r, s <= eps sqrt(cut)/pi.
pub fn enumerate_sorted(bc: BcMode, ell1: f64, eps: f64, count: usize) -> Vec<AnalyticMode> {
    assert!(count >= 1, "mode count must be at least 1");
    assert!(ell1 > 0.0 && eps > 0.0 && eps <= 1.0);
    let (m0, t0) = index_start(bc);
    let base = (PI / ell1).powi(2);
    let mut cut = base * ((count as f64) + 1.0).powi(2) + 2.0 * (PI / eps).powi(2);
    loop {
        let mut modes = Vec::new();
        let m_max = (ell1 * cut.sqrt() / PI).floor() as u32 + 1;
        let t_max = (eps * cut.sqrt() / PI).floor() as u32 + 1;
        for m in m0..=m_max {
            for r in t0..=t_max {
                for s in t0..=t_max {
                    let mode = make_mode(bc, ell1, eps, m, r, s);
                    if mode.lambda <= cut {
                        modes.push(mode);
                    }
                }
            }
        }
        if modes.len() >= count {
            modes.sort_by(|a, b| {
                a.lambda
                    .total_cmp(&b.lambda)
                    .then(a.m.cmp(&b.m))
                    .then(a.r.cmp(&b.r))
                    .then(a.s.cmp(&b.s))
            });
            modes.truncate(count);
            return modes;
        }
        cut *= 2.0;
    }
}

/// Evaluate the normalized eigenfunction at a stretched point
/// y in [0, ell1] x [0,1]^2.
pub fn evaluate(mode: &AnalyticMode, y: [f64; 3], ell1: f64) -> Result<f64> {
    let tol = 1e-12 * ell1.max(1.0);
    if y[0] < -tol
        || y[0] > ell1 + tol
        || y[1] < -tol
        || y[1] > 1.0 + tol
        || y[2] < -tol
        || y[2] > 1.0 + tol
    {
        return Err(Error::Domain(format!(
            "point ({}, {}, {}) outside the stretched prism",
            y[0], y[1], y[2]
        )));
    }
    let ax = mode.m as f64 * PI * y[0] / ell1;
    let t2 = mode.r as f64 * PI * y[1];
    let t3 = mode.s as f64 * PI * y[2];
    let v = match mode.bc {
        BcMode::Mixed => ax.sin() * t2.cos() * t3.cos(),
        BcMode::Neumann => ax.cos() * t2.cos() * t3.cos(),
        BcMode::Dirichlet => ax.sin() * t2.sin() * t3.sin(),
    };
    Ok(mode.amplitude * v)
}

/// Fraction of the Dirichlet energy carried by the transverse directions,
/// ((r pi/eps)^2 + (s pi/eps)^2) / lambda. Zero for the Neumann constant.
pub fn transverse_fraction(mode: &AnalyticMode) -> f64 {
    if mode.lambda <= 0.0 {
        return 0.0;
    }
    (mode.mu.1 + mode.mu.2) / mode.lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI2: f64 = PI * PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn mixed_prism_spectrum_matches_figure_values() {
        let modes = enumerate_sorted(BcMode::Mixed, 1.0, 0.1, 12);
        for (i, k) in (1..=10).enumerate() {
            assert!(close(modes[i].lambda, (k * k) as f64 * PI2, 1e-12));
            assert_eq!((modes[i].m, modes[i].r, modes[i].s), (k as u32, 0, 0));
        }
        assert!(close(modes[10].lambda, 101.0 * PI2, 1e-12));
        assert!(close(modes[11].lambda, 101.0 * PI2, 1e-12));
        // lexicographic tie-break: (1,0,1) before (1,1,0)
        assert_eq!((modes[10].m, modes[10].r, modes[10].s), (1, 0, 1));
        assert_eq!((modes[11].m, modes[11].r, modes[11].s), (1, 1, 0));
    }

    #[test]
    fn neumann_spectrum_starts_at_zero_with_triple_transverse_level() {
        let modes = enumerate_sorted(BcMode::Neumann, 1.0, 0.1, 13);
        assert_eq!(modes[0].lambda, 0.0);
        assert_eq!((modes[0].m, modes[0].r, modes[0].s), (0, 0, 0));
        // the eleventh nonzero eigenvalue is 100 pi^2 with multiplicity 3
        assert!(close(modes[10].lambda, 100.0 * PI2, 1e-12));
        assert!(close(modes[11].lambda, 100.0 * PI2, 1e-12));
        assert!(close(modes[12].lambda, 100.0 * PI2, 1e-12));
        let trio: Vec<(u32, u32, u32)> = modes[10..13]
            .iter()
            .map(|mm| (mm.m, mm.r, mm.s))
            .collect();
        assert_eq!(trio, vec![(0, 0, 1), (0, 1, 0), (10, 0, 0)]);
    }

    #[test]
    fn dirichlet_spectrum_matches_figure_values() {
        let modes = enumerate_sorted(BcMode::Dirichlet, 1.0, 0.1, 11);
        assert!(close(modes[0].lambda, 201.0 * PI2, 1e-12));
        assert_eq!((modes[0].m, modes[0].r, modes[0].s), (1, 1, 1));
        assert!(close(modes[6].lambda, 249.0 * PI2, 1e-12));
        assert!(close(modes[10].lambda, 321.0 * PI2, 1e-12));
    }

    #[test]
    fn fat_prism_first_mode_is_axial() {
        let modes = enumerate_sorted(BcMode::Mixed, 1.0, 1.0, 2);
        assert!(close(modes[0].lambda, PI2, 1e-12));
        assert_eq!((modes[0].m, modes[0].r, modes[0].s), (1, 0, 0));
        assert!(close(modes[1].lambda, 2.0 * PI2, 1e-12));
    }

    #[test]
    fn lambda_equals_sum_of_separation_constants_exactly() {
        for bc in [BcMode::Mixed, BcMode::Neumann, BcMode::Dirichlet] {
            for mode in enumerate_sorted(bc, 1.3, 0.2, 30) {
                assert_eq!(mode.lambda, mode.mu.0 + (mode.mu.1 + mode.mu.2));
                // swap symmetry
                let swapped = make_mode(bc, 1.3, 0.2, mode.m, mode.s, mode.r);
                assert_eq!(swapped.lambda, mode.lambda);
            }
        }
    }

    #[test]
    fn evaluation_peaks_and_boundary_zeros() {
        let modes = enumerate_sorted(BcMode::Mixed, 1.0, 0.1, 1);
        let m1 = &modes[0];
        let at_peak = evaluate(m1, [0.5, 0.3, 0.8], 1.0).unwrap();
        assert!((at_peak - m1.amplitude).abs() < 1e-12);
        for y in [[0.0, 0.2, 0.2], [1.0, 0.9, 0.1]] {
            assert!(evaluate(m1, y, 1.0).unwrap().abs() < 1e-12);
        }
        let neu = enumerate_sorted(BcMode::Neumann, 1.0, 0.1, 12);
        let n010 = neu.iter().find(|mm| (mm.m, mm.r, mm.s) == (0, 1, 0)).unwrap();
        let at_wall = evaluate(n010, [0.4, 0.0, 0.7], 1.0).unwrap();
        assert!((at_wall - n010.amplitude).abs() < 1e-12);
        assert!(evaluate(m1, [1.5, 0.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn strong_form_holds_at_random_points() {
        // -(d11 + eps^-2 d22 + eps^-2 d33) u = lambda u with analytic second
        // derivatives of the separable factors
        let ell1 = 1.0;
        let eps = 0.1;
        let mut t = 0.1234_f64;
        for bc in [BcMode::Mixed, BcMode::Neumann, BcMode::Dirichlet] {
            for mode in enumerate_sorted(bc, ell1, eps, 8) {
                for _ in 0..100 {
                    t = (t * 16807.0).fract();
                    let y = [t * ell1, (t * 7.0).fract(), (t * 13.0).fract()];
                    let u = evaluate(&mode, y, ell1).unwrap();
                    let lap = -(mode.mu.0 + mode.mu.1 + mode.mu.2) * u;
                    assert!(
                        (-lap - mode.lambda * u).abs() <= 1e-10 * mode.lambda.max(1.0),
                        "strong form residual too large"
                    );
                }
            }
        }
    }

    #[test]
    fn midpoint_normalization_is_close_to_one() {
        let n = 64;
        let h = 1.0 / n as f64;
        for bc in [BcMode::Mixed, BcMode::Neumann, BcMode::Dirichlet] {
            for mode in enumerate_sorted(bc, 1.0, 0.1, 3) {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let y = [
                                (i as f64 + 0.5) * h,
                                (j as f64 + 0.5) * h,
                                (k as f64 + 0.5) * h,
                            ];
                            s += evaluate(&mode, y, 1.0).unwrap().powi(2);
                        }
                    }
                }
                s *= h * h * h;
                assert!((s - 1.0).abs() < 1e-3, "{bc:?} ({},{},{}): {s}", mode.m, mode.r, mode.s);
            }
        }
    }

    #[test]
    fn longitudinal_eigenvalues_do_not_depend_on_eps() {
        let a = enumerate_sorted(BcMode::Mixed, 1.0, 0.1, 10);
        let b = enumerate_sorted(BcMode::Mixed, 1.0, 0.05, 10);
        for (ma, mb) in a.iter().zip(&b) {
            assert_eq!(ma.r, 0);
            assert_eq!(ma.s, 0);
            assert_eq!(ma.lambda, mb.lambda);
        }
    }

    #[test]
    fn transverse_fraction_examples() {
        let modes = enumerate_sorted(BcMode::Mixed, 1.0, 0.1, 12);
        assert_eq!(transverse_fraction(&modes[0]), 0.0);
        let pair = &modes[11]; // (1,1,0)
        let f = transverse_fraction(pair);
        assert!((f - 100.0 / 101.0).abs() < 1e-12);
        let m011 = make_mode(BcMode::Neumann, 1.0, 0.1, 0, 1, 1);
        assert!((transverse_fraction(&m011) - 1.0).abs() < 1e-15);
        let zero = make_mode(BcMode::Neumann, 1.0, 0.1, 0, 0, 0);
        assert_eq!(transverse_fraction(&zero), 0.0);
    }
}
