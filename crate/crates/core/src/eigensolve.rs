//! Lowest eigenpairs of K u = lambda M u by shift-invert Lanczos.
//!
//! The shifted matrix K - sigma*M (sigma slightly negative, so the matrix is
//! positive definite) is factored by a banded Cholesky decomposition; the
//! structured meshes built here have small bandwidth, which makes the
//! factorization the cheap part. Lanczos runs in the M-inner product with
//! full reorthogonalization and a deterministic start vector, so iteration
//! counts and tie-breaks are reproducible.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{BcMode, SparsePair};
use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, quadratic_form, Csr};

/// Relative eigenvalue distance under which eigenvalues are reported as a
/// cluster and compared by subspace angles.
pub const CLUSTER_REL_GAP: f64 = 1e-6;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

const START_SEED: u64 = 0x5eed_0001;

/// One converged eigenpair on the free DOFs.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Eigenvalue, units length^-2.
    pub lambda: f64,
    /// M-normalized coefficient vector; the entry of largest magnitude is
    /// positive.
    pub vector: Vec<f64>,
    /// ||K u - lambda M u|| / (||K u|| + lambda ||M u||).
    pub residual: f64,
    /// 1-based position in the sorted spectrum; the Neumann zero mode is 0.
    pub index: usize,
}

/// Lower-banded Cholesky factorization A = L L^T.
pub struct BandedCholesky {
    n: usize,
    b: usize,
    band: Vec<f64>,
}

impl BandedCholesky {
    /// Factor a symmetric positive definite CSR matrix.
    pub fn factor(a: &Csr) -> Result<Self> {
        let n = a.n;
        let b = a.bandwidth();
        let w = b + 1;
        let mut band = vec![0.0f64; n * w];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                if j <= i {
                    band[i * w + (j + b - i)] = *v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(b);
            for j in lo..=i {
                let mut s = band[i * w + (j + b - i)];
                let kmin = lo.max(j.saturating_sub(b));
                for k in kmin..j {
                    s -= band[i * w + (k + b - i)] * band[j * w + (k + b - j)];
                }
                if j < i {
                    band[i * w + (j + b - i)] = s / band[j * w + b];
                } else {
                    if s <= 0.0 {
                        return Err(Error::solver(format!(
                            "Cholesky breakdown at row {i}: pivot {s} is not positive"
                        )));
                    }
                    band[i * w + b] = s.sqrt();
                }
            }
        }
        Ok(BandedCholesky { n, b, band })
    }

    /// Solve A x = rhs in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut s = x[i];
            for k in lo..i {
                s -= self.band[i * w + (k + b - i)] * x[k];
            }
            x[i] = s / self.band[i * w + b];
        }
        for i in (0..n).rev() {
            let hi = (i + b).min(n - 1);
            let mut s = x[i];
            for k in (i + 1)..=hi {
                s -= self.band[k * w + (i + b - k)] * x[k];
            }
            x[i] = s / self.band[i * w + b];
        }
    }
}

/// Gershgorin-type upper estimate of the largest generalized eigenvalue,
/// max over rows of sum_j |K_ij| / M_ii.
pub fn lambda_max_estimate(k: &Csr, m: &Csr) -> f64 {
    let diag = m.diagonal();
    let mut est = 0.0f64;
    for i in 0..k.n {
        let (_, vals) = k.row(i);
        let s: f64 = vals.iter().map(|v| v.abs()).sum();
        if diag[i] > 0.0 {
            est = est.max(s / diag[i]);
        }
    }
    est.max(1.0)
}

struct Workspace<'a> {
    k: &'a Csr,
    m: &'a Csr,
    chol: BandedCholesky,
    sigma: f64,
    /// M-orthonormal vectors kept out of the iteration: the exact Neumann
    /// kernel plus eigenvectors converged in earlier restarts.
    deflated: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn m_orthogonalize(&self, w: &mut [f64]) {
        // two classical Gram-Schmidt passes against deflated + Lanczos vectors
        for _ in 0..2 {
            let z = self.m.matvec_alloc(w);
            for basis in self.deflated.iter().chain(self.v.iter()) {
                let c = dot(&z, basis);
                for (wi, bi) in w.iter_mut().zip(basis) {
                    *wi -= c * bi;
                }
            }
        }
    }

    fn m_norm(&self, w: &[f64]) -> f64 {
        quadratic_form(self.m, w, w).max(0.0).sqrt()
    }

    /// Operator application: (K - sigma M)^-1 M v.
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut w = self.m.matvec_alloc(v);
        self.chol.solve_in_place(&mut w);
        w
    }

    fn fresh_start(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let n = self.k.n;
        for _ in 0..8 {
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            self.m_orthogonalize(&mut w);
            let nrm = self.m_norm(&w);
            if nrm > 1e-10 {
                for wi in &mut w {
                    *wi /= nrm;
                }
                return Ok(w);
            }
        }
        Err(Error::solver(
            "could not produce a start vector M-orthogonal to the converged space",
        ))
    }

    fn reset(&mut self) {
        self.v.clear();
        self.alpha.clear();
        self.beta.clear();
    }
}

fn ritz_pairs(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    // theta descending = lambda ascending
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let thetas: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<f64>::zeros(m, m);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (thetas, vecs)
}

fn residual_of(k: &Csr, m: &Csr, lambda: f64, u: &[f64], scale: f64) -> f64 {
    let ku = k.matvec_alloc(u);
    let mu = m.matvec_alloc(u);
    let num = ku
        .iter()
        .zip(&mu)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    let weight = if lambda > 0.0 { lambda } else { scale };
    let denom = norm2(&ku) + weight * norm2(&mu);
    if denom == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    num / denom
}

fn fix_sign(u: &mut [f64]) {
    let mut imax = 0;
    let mut best = 0.0f64;
    for (i, &x) in u.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            imax = i;
        }
    }
    if u[imax] < 0.0 {
        for x in u.iter_mut() {
            *x = -*x;
        }
    }
}

/// Compute the `n` smallest eigenpairs (plus the zero mode, indexed 0, for
/// Neumann problems). Returned vectors are M-normalized and pairwise
/// M-orthogonal; eigenvalues are nondecreasing, repeated by multiplicity.
pub fn solve_lowest(pair: &SparsePair, n: usize, tol: f64) -> Result<Vec<EigenPair>> {
    let nf = pair.n_free();
    let reserved = if pair.bc == BcMode::Neumann { 1 } else { 0 };
    if n < 1 {
        return Err(Error::Config("requested mode count must be >= 1".into()));
    }
    if n + reserved > nf {
        return Err(Error::Config(format!(
            "requested {n} modes but only {nf} free DOFs are available"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Config("solver tolerance must be positive".into()));
    }

    let scale = lambda_max_estimate(&pair.k, &pair.m);
    let sigma = match pair.bc {
        BcMode::Neumann => -1e-4 * scale,
        _ => -1e-8 * scale,
    };
    let shifted = pair.k.add_scaled(&pair.m, -sigma)?;
    let chol = BandedCholesky::factor(&shifted)?;

    let mut ws = Workspace {
        k: &pair.k,
        m: &pair.m,
        chol,
        sigma,
        deflated: Vec::new(),
        v: Vec::new(),
        alpha: Vec::new(),
        beta: Vec::new(),
    };

    // The Neumann kernel is known exactly: deflate the constant and report it
    // as index 0 afterwards.
    let mut zero_pair = None;
    if pair.bc == BcMode::Neumann {
        let mut ones = vec![1.0; nf];
        let nrm = ws.m_norm(&ones);
        for x in &mut ones {
            *x /= nrm;
        }
        let lambda0 = quadratic_form(&pair.k, &ones, &ones);
        let residual = residual_of(&pair.k, &pair.m, 0.0, &ones, scale);
        let mut u0 = ones.clone();
        fix_sign(&mut u0);
        zero_pair = Some(EigenPair {
            lambda: lambda0,
            vector: u0,
            residual,
            index: 0,
        });
        ws.deflated.push(ones);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut converged: Vec<EigenPair> = Vec::new();
    let mut best_residuals: Vec<f64> = Vec::new();
    // Budget across restarts: a multiple eigenvalue yields one copy per
    // deflated run, plus one final completeness probe.
    let outer_cap = 2 * n + 8;
    let mut steps_left = 50 * (n + 1) + 400;

    for _run in 0..outer_cap {
        let avail = nf - reserved - converged.len();
        let have = converged.len();
        let want = if have >= n { 1 } else { n - have };
        if avail == 0 {
            break;
        }
        let inner_cap = (50 * want + 60).min(avail).min(steps_left.max(1));
        let (accepted, residuals, used) =
            lanczos_run(&mut ws, &pair.k, &pair.m, want, tol, inner_cap, scale, &mut rng)?;
        steps_left = steps_left.saturating_sub(used);
        best_residuals = residuals;
        if accepted.is_empty() {
            break; // no progress; report best residuals below
        }
        if have >= n {
            // completeness probe: a deflated run can only surface something
            // new below the current n-th value if a multiple copy was missed
            let cutoff = converged[n - 1].lambda;
            let found = &accepted[0];
            let below = found.lambda < cutoff - CLUSTER_REL_GAP * cutoff.abs().max(1e-300);
            ws.deflated.extend(accepted.iter().map(|p| p.vector.clone()));
            converged.extend(accepted);
            converged.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
            if !below {
                break;
            }
        } else {
            ws.deflated.extend(accepted.iter().map(|p| p.vector.clone()));
            converged.extend(accepted);
            converged.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        }
        if steps_left == 0 {
            break;
        }
    }

    if converged.len() < n {
        return Err(Error::Solver {
            message: format!(
                "Lanczos converged {} of {n} modes within the restart budget (tol {tol})",
                converged.len()
            ),
            best_residuals,
        });
    }
    converged.truncate(n);
    for p in &mut converged {
        fix_sign(&mut p.vector);
    }
    let mut out = Vec::with_capacity(n + reserved);
    if let Some(z) = zero_pair {
        out.push(z);
    }
    for (i, mut p) in converged.into_iter().enumerate() {
        p.index = i + 1;
        out.push(p);
    }
    Ok(out)
}

/// One Lanczos pass against the current deflation set: build a Krylov space
/// of at most `max_steps` vectors, return the Ritz pairs among the `want`
/// smallest whose explicit residual meets `tol`, the last residual set, and
/// the number of steps consumed.
#[allow(clippy::too_many_arguments)]
fn lanczos_run(
    ws: &mut Workspace,
    k: &Csr,
    m: &Csr,
    want: usize,
    tol: f64,
    max_steps: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<EigenPair>, Vec<f64>, usize)> {
    ws.reset();
    let nf = k.n;
    let mut v_curr = ws.fresh_start(rng)?;
    let mut v_prev: Option<Vec<f64>> = None;
    let mut best: (Vec<EigenPair>, Vec<f64>) = (Vec::new(), Vec::new());
    // Ritz extraction is O(dim^3); space the checks geometrically so late,
    // large decompositions stay rare.
    let mut next_check = want.max(10);

    for step in 0..max_steps {
        ws.v.push(v_curr.clone());
        let mut w = ws.apply(&v_curr);
        let a_j = quadratic_form(ws.m, &w, &v_curr);
        ws.alpha.push(a_j);
        for (wi, vi) in w.iter_mut().zip(&v_curr) {
            *wi -= a_j * vi;
        }
        if let Some(prev) = &v_prev {
            let b_prev = *ws.beta.last().unwrap();
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b_prev * pi;
            }
        }
        ws.m_orthogonalize(&mut w);
        let b_j = ws.m_norm(&w);

        let dim = ws.alpha.len();
        let exhausted = dim == max_steps || ws.v.len() + ws.deflated.len() >= nf;
        let breakdown = b_j <= 1e-13;
        let check_now = dim >= want && (dim >= next_check || exhausted || breakdown);
        if check_now {
            next_check = dim + (dim / 5).max(10);
            let (thetas, svecs) = ritz_pairs(&ws.alpha, &ws.beta);
            let take = want.min(dim);
            // cheap bound first: beta * |last row of s| relative to theta
            let promising = (0..take).all(|i| {
                thetas[i] > 0.0 && b_j * svecs[(dim - 1, i)].abs() <= tol * thetas[i].max(1e-300)
            });
            if promising || exhausted || breakdown {
                let mut pairs = Vec::with_capacity(take);
                let mut residuals = Vec::with_capacity(take);
                for i in 0..take {
                    if thetas[i] <= 0.0 {
                        residuals.push(f64::INFINITY);
                        continue;
                    }
                    let lambda = ws.sigma + 1.0 / thetas[i];
                    let mut u = vec![0.0; nf];
                    for (jcol, vj) in ws.v.iter().enumerate() {
                        let s = svecs[(jcol, i)];
                        for (ui, vji) in u.iter_mut().zip(vj) {
                            *ui += s * vji;
                        }
                    }
                    let nrm = ws.m_norm(&u);
                    for x in &mut u {
                        *x /= nrm;
                    }
                    let r = residual_of(k, m, lambda, &u, scale);
                    residuals.push(r);
                    pairs.push(EigenPair {
                        lambda,
                        vector: u,
                        residual: r,
                        index: 0,
                    });
                }
                let all_ok = pairs.len() == take && residuals.iter().all(|r| *r <= tol);
                best = (
                    pairs
                        .iter()
                        .zip(&residuals)
                        .filter(|(_, r)| **r <= tol)
                        .map(|(p, _)| p.clone())
                        .collect(),
                    residuals,
                );
                if all_ok {
                    return Ok((best.0, best.1, step + 1));
                }
            }
        }
        if exhausted {
            break;
        }
        if breakdown {
            if ws.v.len() + ws.deflated.len() >= nf {
                break;
            }
            // invariant subspace found: continue in a fresh orthogonal
            // direction, leaving a zero coupling in the tridiagonal matrix
            ws.beta.push(0.0);
            v_prev = None;
            v_curr = ws.fresh_start(rng)?;
            continue;
        }
        ws.beta.push(b_j);
        v_prev = Some(v_curr);
        v_curr = w.iter().map(|x| x / b_j).collect();
    }
    let steps = ws.alpha.len();
    Ok((best.0, best.1, steps))
}

/// Group sorted eigenvalues into clusters of relative width `rel_gap`.
/// Returns half-open index ranges.
pub fn cluster_partition(lambdas: &[f64], rel_gap: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=lambdas.len() {
        let split = i == lambdas.len() || {
            let a = lambdas[i - 1];
            let b = lambdas[i];
            (b - a).abs() > rel_gap * a.abs().max(b.abs()).max(1e-300)
        };
        if split {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Largest principal angle (radians) between the spans of two M-normalized
/// eigenvector sets.
pub fn subspace_angle(a: &[EigenPair], b: &[EigenPair], m: &Csr) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Logic(format!(
            "subspace angle needs equal nonzero counts (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let n = m.n;
    for p in a.iter().chain(b.iter()) {
        if p.vector.len() != n {
            return Err(Error::Logic("vector length does not match the mass matrix".into()));
        }
    }
    let orthonormalize = |pairs: &[EigenPair]| -> Result<Vec<Vec<f64>>> {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(pairs.len());
        for p in pairs {
            let mut v = p.vector.clone();
            for _ in 0..2 {
                let z = m.matvec_alloc(&v);
                for q in &basis {
                    let c = dot(&z, q);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                }
            }
            let nrm = quadratic_form(m, &v, &v).max(0.0).sqrt();
            if nrm <= 1e-12 {
                return Err(Error::Logic("linearly dependent vectors in subspace".into()));
            }
            for vi in &mut v {
                *vi /= nrm;
            }
            basis.push(v);
        }
        Ok(basis)
    };
    let ba = orthonormalize(a)?;
    let bb = orthonormalize(b)?;
    let p = ba.len();
    let mut cross = DMatrix::<f64>::zeros(p, p);
    for (j, vb) in bb.iter().enumerate() {
        let z = m.matvec_alloc(vb);
        for (i, va) in ba.iter().enumerate() {
            cross[(i, j)] = dot(&z, va);
        }
    }
    let svd = cross.svd(false, false);
    let sigma_min = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |acc, s| acc.min(*s))
        .clamp(0.0, 1.0);
    Ok(sigma_min.acos())
}
