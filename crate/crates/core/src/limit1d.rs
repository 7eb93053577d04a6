//! The 1D weighted Dirichlet limit problem and its independent oracle.
//!
//! -(w U')' = lambda0 w U on (ell0, ell1), U(ell0) = U(ell1) = 0, with the
//! cross-section area as weight. Two routes: a P1 finite-element
//! discretization (conforming, eigenvalues from above) and a
//! transfer-matrix shooting method for piecewise-constant weights, used to
//! cross-check the P1 path.

use crate::assembly::{BcMode, DofMap, SparsePair};
use crate::eigensolve::{self, EigenPair};
use crate::error::{Error, Result};
use crate::geometry::{partition_with_breakpoints, RodDomain};
use crate::sparse::CooTriple;

/// Weight backing: the area profile of a rod domain or explicit pieces.
#[derive(Debug, Clone)]
enum WeightFn {
    Domain(RodDomain),
    PiecewiseConstant(Vec<(f64, f64, f64)>), // (start, end, value)
}

/// A positive, piecewise-continuous 1D weight with its jump list and bounds.
#[derive(Debug, Clone)]
pub struct Weight1D {
    f: WeightFn,
    pub discontinuities: Vec<f64>,
    pub c0: f64,
    pub c1: f64,
}

impl Weight1D {
    /// Exact 1D weight of the stretched domain: the cross-section area.
    pub fn from_domain(domain: &RodDomain) -> Weight1D {
        let (c0, c1) = domain.area_bounds();
        Weight1D {
            discontinuities: domain.discontinuities(),
            c0,
            c1,
            f: WeightFn::Domain(domain.clone()),
        }
    }

    /// Piecewise-constant weight from (start, end, value) pieces covering
    /// [ell0, ell1] without gaps.
    pub fn piecewise_constant(pieces: Vec<(f64, f64, f64)>) -> Result<Weight1D> {
        if pieces.is_empty() {
            return Err(Error::Config("weight needs at least one piece".into()));
        }
        let mut disc = Vec::new();
        for w in pieces.windows(2) {
            if (w[0].1 - w[1].0).abs() > 1e-12 * (w[0].1.abs().max(1.0)) {
                return Err(Error::Config("weight pieces must be contiguous".into()));
            }
            disc.push(w[1].0);
        }
        let mut c0 = f64::INFINITY;
        let mut c1 = f64::NEG_INFINITY;
        for &(a, b, v) in &pieces {
            if b <= a {
                return Err(Error::Config("weight piece has nonpositive length".into()));
            }
            if v <= 0.0 {
                return Err(Error::Config("weight values must be positive".into()));
            }
            c0 = c0.min(v);
            c1 = c1.max(v);
        }
        Ok(Weight1D {
            f: WeightFn::PiecewiseConstant(pieces),
            discontinuities: disc,
            c0,
            c1,
        })
    }

    pub fn eval(&self, x1: f64) -> f64 {
        match &self.f {
            WeightFn::Domain(d) => d
                .area_profile(x1.clamp(d.ell0(), d.ell1()))
                .expect("clamped axial coordinate"),
            WeightFn::PiecewiseConstant(pieces) => {
                // right-continuous at jumps
                for &(_, b, v) in pieces {
                    if x1 < b {
                        return v;
                    }
                }
                pieces.last().unwrap().2
            }
        }
    }

    /// Pieces when the weight is piecewise constant, None otherwise.
    pub fn pieces(&self) -> Option<Vec<(f64, f64, f64)>> {
        match &self.f {
            WeightFn::PiecewiseConstant(p) => Some(p.clone()),
            WeightFn::Domain(d) => {
                let mut bounds = vec![d.ell0()];
                bounds.extend(d.discontinuities());
                bounds.push(d.ell1());
                let mut pieces = Vec::new();
                for w in bounds.windows(2) {
                    let mid = 0.5 * (w[0] + w[1]);
                    let v = d.area_profile(mid).ok()?;
                    // constant on the piece? sample a few stations
                    for k in 1..8 {
                        let x = w[0] + (w[1] - w[0]) * k as f64 / 8.0;
                        if (d.area_profile(x).ok()? - v).abs() > 1e-12 * v {
                            return None;
                        }
                    }
                    pieces.push((w[0], w[1], v));
                }
                Some(pieces)
            }
        }
    }
}

/// 1D eigenpair: Dirichlet ends imposed exactly, normalization
/// int w U^2 = 1.
#[derive(Debug, Clone)]
pub struct EigenPair1D {
    pub lambda0: f64,
    /// Values at every node of the 1D mesh, zeros at both ends.
    pub values: Vec<f64>,
    pub index: usize,
}

/// The 1D mesh and its eigenpairs.
#[derive(Debug, Clone)]
pub struct Limit1DSolution {
    pub nodes: Vec<f64>,
    pub pairs: Vec<EigenPair1D>,
}

/// Lowest `n` eigenpairs of the P1 discretization with `elements` elements.
/// Element integrals use 3-point Gauss on each smooth piece; mesh nodes are
/// placed on every weight discontinuity.
pub fn solve_limit(
    weight: &Weight1D,
    ell0: f64,
    ell1: f64,
    n: usize,
    elements: usize,
) -> Result<Limit1DSolution> {
    if n < 1 {
        return Err(Error::Config("mode count must be at least 1".into()));
    }
    if elements < 8.max(4 * n) {
        return Err(Error::Config(format!(
            "need at least {} elements for {n} modes",
            8.max(4 * n)
        )));
    }
    let nodes = partition_with_breakpoints(ell0, ell1, &weight.discontinuities, elements)?;
    let nn = nodes.len();
    let mut coo = CooTriple::new(nn);
    // 3-point Gauss on [-1, 1]
    let gauss = [
        (-(0.6f64).sqrt(), 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        ((0.6f64).sqrt(), 5.0 / 9.0),
    ];
    for e in 0..nn - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        let mut ke = [[0.0f64; 2]; 2];
        let mut me = [[0.0f64; 2]; 2];
        for &(t, wq) in &gauss {
            let x = 0.5 * (a + b) + 0.5 * h * t;
            let w = weight.eval(x) * 0.5 * h * wq;
            let phi = [(b - x) / h, (x - a) / h];
            let dphi = [-1.0 / h, 1.0 / h];
            for i in 0..2 {
                for j in 0..2 {
                    ke[i][j] += w * dphi[i] * dphi[j];
                    me[i][j] += w * phi[i] * phi[j];
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                coo.push(e + i, e + j, ke[i][j], 0.0, me[i][j]);
            }
        }
    }
    let (k_full, _, m_full) = coo.into_csr();
    // eliminate the two Dirichlet end nodes: reduced row i = full row i+1
    let reduce = |a: &crate::sparse::Csr| {
        let nf = nn - 2;
        let mut rp = vec![0usize; nf + 1];
        let mut ci = Vec::new();
        let mut va = Vec::new();
        for i in 0..nf {
            let (cols, vals) = a.row(i + 1);
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                if j >= 1 && j <= nn - 2 {
                    ci.push((j - 1) as u32);
                    va.push(*v);
                }
            }
            rp[i + 1] = ci.len();
        }
        crate::sparse::Csr {
            n: nf,
            row_ptr: rp,
            col_idx: ci,
            values: va,
        }
    };
    let k = reduce(&k_full);
    let m = reduce(&m_full);
    let nf = k.n;
    let pair = SparsePair {
        k,
        m,
        k_axial: None,
        k_transverse: None,
        dof_map: DofMap {
            free_of_node: std::iter::once(None)
                .chain((0..nf).map(Some))
                .chain(std::iter::once(None))
                .collect(),
            node_of_free: (1..=nf).collect(),
        },
        eps: 1.0,
        bc: BcMode::Mixed,
    };
    // Normalized residuals bottom out near machine-eps * lambda_max/lambda,
    // which at fine resolutions sits above 1e-10; the default tolerance is
    // comfortable and eigenvalues converge quadratically in the residual.
    let pairs3d: Vec<EigenPair> = eigensolve::solve_lowest(&pair, n, eigensolve::DEFAULT_TOL)?;
    let pairs = pairs3d
        .into_iter()
        .map(|p| {
            let mut values = vec![0.0; nn];
            for (f, v) in p.vector.iter().enumerate() {
                values[f + 1] = *v;
            }
            EigenPair1D {
                lambda0: p.lambda,
                values,
                index: p.index,
            }
        })
        .collect();
    Ok(Limit1DSolution { nodes, pairs })
}

/// First `n` eigenvalues of the piecewise-constant weighted problem by the
/// transfer-matrix dispersion relation: per piece U = alpha cos(sqrt(l) t) +
/// beta sin(sqrt(l) t), continuity of U and of w U' at interfaces, Dirichlet
/// ends. Roots located by scanning for sign changes and bisected to 1e-10.
pub fn shooting_oracle(weight: &Weight1D, ell0: f64, ell1: f64, n: usize) -> Result<Vec<f64>> {
    let pieces = weight.pieces().ok_or_else(|| {
        Error::Config("shooting oracle needs a piecewise-constant weight".into())
    })?;
    if (pieces[0].0 - ell0).abs() > 1e-12 || (pieces.last().unwrap().1 - ell1).abs() > 1e-12 {
        return Err(Error::Config(
            "weight pieces do not cover the requested interval".into(),
        ));
    }
    // Dirichlet end value after propagating (U, wU') = (0, w_1) from ell0.
    let end_value = |lambda: f64| -> f64 {
        let mut u = 0.0f64;
        let mut flux = pieces[0].2;
        for &(a, b, w) in &pieces {
            let len = b - a;
            let du = flux / w;
            if lambda <= 0.0 {
                u += len * du;
            } else {
                let k = lambda.sqrt();
                let (s, c) = (k * len).sin_cos();
                let u_new = u * c + du * s / k;
                let du_new = -u * k * s + du * c;
                u = u_new;
                flux = w * du_new;
            }
            // renormalize to avoid overflow for large lambda
            let m = u.abs().max(flux.abs());
            if m > 1e100 {
                u /= m;
                flux /= m;
            }
        }
        u
    };

    let len = ell1 - ell0;
    let ratio = (weight.c1 / weight.c0).max(1.0);
    let mut upper = ratio * ((n as f64 + 1.0) * std::f64::consts::PI / len).powi(2);
    for _attempt in 0..6 {
        // scan in sqrt(lambda); interlacing keeps consecutive roots at least
        // about pi/(len sqrt(c1/c0)) apart, sample well below that
        let k_max = upper.sqrt();
        let dk = std::f64::consts::PI / (len * ratio.sqrt()) / 16.0;
        let steps = (k_max / dk).ceil() as usize;
        let mut roots = Vec::new();
        let mut k_prev = dk * 1e-6;
        let mut f_prev = end_value(k_prev * k_prev);
        for i in 1..=steps {
            let k = dk * i as f64;
            let f = end_value(k * k);
            if f == 0.0 {
                roots.push(k * k);
            } else if f_prev.signum() != f.signum() {
                // bisection on lambda to absolute tolerance 1e-10
                let (mut lo, mut hi) = (k_prev * k_prev, k * k);
                let mut flo = end_value(lo);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    let fm = end_value(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                    } else if flo.signum() != fm.signum() {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            if roots.len() == n {
                return Ok(roots);
            }
            k_prev = k;
            f_prev = f;
        }
        upper *= 4.0;
    }
    Err(Error::solver(format!(
        "shooting scan found fewer than {n} roots after widening; weight may be degenerate"
    )))
}

/// The exact 1D weight of a catalog domain (alias of `Weight1D::from_domain`).
pub fn weight_from_domain(domain: &RodDomain) -> Weight1D {
    Weight1D::from_domain(domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Profile;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    #[test]
    fn constant_weight_matches_sine_spectrum() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 1.0, 1.0)]).unwrap();
        let sol = solve_limit(&w, 0.0, 1.0, 3, 1000).unwrap();
        for (i, p) in sol.pairs.iter().enumerate() {
            let exact = ((i + 1) * (i + 1)) as f64 * PI2;
            assert!(
                (p.lambda0 - exact).abs() < 1e-3 * exact,
                "mode {}: {} vs {exact}",
                i + 1,
                p.lambda0
            );
            assert!(p.lambda0 >= exact); // conforming, from above
            assert_eq!(p.values[0], 0.0);
            assert_eq!(*p.values.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn constant_weight_scaling_cancels() {
        let w1 = Weight1D::piecewise_constant(vec![(0.0, 1.0, 1.0)]).unwrap();
        let w4 = Weight1D::piecewise_constant(vec![(0.0, 1.0, 4.0)]).unwrap();
        let a = solve_limit(&w1, 0.0, 1.0, 3, 200).unwrap();
        let b = solve_limit(&w4, 0.0, 1.0, 3, 200).unwrap();
        for (pa, pb) in a.pairs.iter().zip(&b.pairs) {
            assert!((pa.lambda0 - pb.lambda0).abs() < 1e-10 * pa.lambda0);
        }
    }

    #[test]
    fn step_weight_first_eigenvalue_is_pi_squared() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)]).unwrap();
        let roots = shooting_oracle(&w, 0.0, 1.0, 3).unwrap();
        assert!(
            (roots[0] - PI2).abs() < 1e-8,
            "lambda1 = {} vs pi^2",
            roots[0]
        );
        let sol = solve_limit(&w, 0.0, 1.0, 1, 1000).unwrap();
        assert!((sol.pairs[0].lambda0 - PI2).abs() < 1e-3 * PI2);
        assert!(sol.pairs[0].lambda0 >= roots[0] - 1e-9);
    }

    #[test]
    fn mirrored_step_weight_has_the_same_spectrum() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)]).unwrap();
        let wm = Weight1D::piecewise_constant(vec![(0.0, 0.5, 1.0), (0.5, 1.0, 4.0)]).unwrap();
        let a = shooting_oracle(&w, 0.0, 1.0, 4).unwrap();
        let b = shooting_oracle(&wm, 0.0, 1.0, 4).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert!((ra - rb).abs() < 1e-8);
        }
    }

    #[test]
    fn single_piece_oracle_is_exact() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 1.0, 1.0)]).unwrap();
        let roots = shooting_oracle(&w, 0.0, 1.0, 5).unwrap();
        for (i, r) in roots.iter().enumerate() {
            let exact = ((i + 1) * (i + 1)) as f64 * PI2;
            assert!((r - exact).abs() < 1e-8, "{r} vs {exact}");
        }
    }

    #[test]
    fn p1_is_above_oracle_and_converges_quadratically() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)]).unwrap();
        let oracle = shooting_oracle(&w, 0.0, 1.0, 2).unwrap();
        let mut errs = Vec::new();
        for elements in [64, 128, 256] {
            let sol = solve_limit(&w, 0.0, 1.0, 2, elements).unwrap();
            for (p, o) in sol.pairs.iter().zip(&oracle) {
                assert!(p.lambda0 >= *o - 1e-9);
            }
            errs.push(sol.pairs[1].lambda0 - oracle[1]);
        }
        assert!(errs[0] / errs[1] >= 3.5);
        assert!(errs[1] / errs[2] >= 3.5);
    }

    #[test]
    fn eigenfunctions_oscillate_per_sturm() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)]).unwrap();
        let sol = solve_limit(&w, 0.0, 1.0, 4, 800).unwrap();
        for (i, p) in sol.pairs.iter().enumerate() {
            let mut changes = 0;
            let mut last = 0.0f64;
            for &v in &p.values[1..p.values.len() - 1] {
                if v.abs() < 1e-12 {
                    continue;
                }
                if last != 0.0 && v.signum() != last.signum() {
                    changes += 1;
                }
                last = v;
            }
            assert_eq!(changes, i, "mode {} sign changes", i + 1);
        }
    }

    #[test]
    fn weighted_normalization_holds() {
        let w = Weight1D::piecewise_constant(vec![(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)]).unwrap();
        let sol = solve_limit(&w, 0.0, 1.0, 2, 400).unwrap();
        for p in &sol.pairs {
            // trapezoid of w U^2 against the P1 mass normalization
            let mut s = 0.0;
            for e in 0..sol.nodes.len() - 1 {
                let h = sol.nodes[e + 1] - sol.nodes[e];
                let xm = 0.5 * (sol.nodes[e] + sol.nodes[e + 1]);
                let um = 0.5 * (p.values[e] + p.values[e + 1]);
                s += w.eval(xm) * um * um * h;
            }
            assert!((s - 1.0).abs() < 1e-2, "weighted norm {s}");
        }
    }

    #[test]
    fn weight_from_two_prism_is_the_step() {
        let d = RodDomain::two_prism(1.0, 0.1).unwrap();
        let w = weight_from_domain(&d);
        assert_eq!(w.eval(0.25), 4.0);
        assert_eq!(w.eval(0.75), 1.0);
        assert_eq!((w.c0, w.c1), (1.0, 4.0));
        let pieces = w.pieces().unwrap();
        assert_eq!(pieces, vec![(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)]);
    }

    #[test]
    fn weight_from_profiled_box_is_the_product_of_sums() {
        let d = crate::geometry::RodDomain::new(
            0.0,
            1.0,
            0.1,
            crate::geometry::CrossSection::BoxProfile {
                left: Profile::Constant { value: 0.5 },
                right: Profile::Constant { value: 0.5 },
                down: Profile::Constant { value: 1.0 },
                up: Profile::SinBump {
                    offset: 1.5,
                    amplitude: 0.4,
                },
            },
        )
        .unwrap();
        let w = weight_from_domain(&d);
        assert!((w.eval(0.5) - 2.9).abs() < 1e-12);
        assert!(w.pieces().is_none());
    }

    #[test]
    fn unresolvable_discontinuities_error() {
        // nine pieces, eight elements: one element per segment is impossible
        let pieces: Vec<(f64, f64, f64)> = (0..9)
            .map(|i| (i as f64 / 9.0, (i + 1) as f64 / 9.0, 1.0 + (i % 2) as f64))
            .collect();
        let w = Weight1D::piecewise_constant(pieces).unwrap();
        assert!(matches!(
            solve_limit(&w, 0.0, 1.0, 2, 8),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn prism_weight_is_constant_one() {
        let d = RodDomain::prism(1.0, 0.1).unwrap();
        let w = weight_from_domain(&d);
        assert_eq!(w.eval(0.3), 1.0);
        assert_eq!(w.pieces().unwrap(), vec![(0.0, 1.0, 1.0)]);
    }
}
