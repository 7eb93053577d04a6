//! Assembly of the discrete generalized eigenproblem K u = lambda M u.
//!
//! The weak form is written in stretched coordinates, so the stiffness
//! integrand carries the anisotropic coefficients (1, eps^-2, eps^-2):
//! K = K_axial + eps^-2 K_trans, with both directional blocks retained for
//! energy splitting. Trilinear shape functions, 2x2x2 Gauss quadrature,
//! essential conditions imposed by symmetric row/column elimination.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{det3, inv3, jacobian, shape_gradients, shape_values, FaceTag, HexMesh};
use crate::sparse::{CooTriple, Csr};

/// Boundary-condition regime: which boundary nodes carry essential zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcMode {
    /// Dirichlet on the two bases, Neumann on the lateral surface.
    Mixed,
    /// Natural conditions everywhere; constants lie in the kernel of K.
    Neumann,
    /// Dirichlet on the whole boundary.
    Dirichlet,
}

/// Mesh-node <-> free-DOF correspondence after elimination.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub free_of_node: Vec<Option<usize>>,
    pub node_of_free: Vec<usize>,
}

impl DofMap {
    pub fn n_free(&self) -> usize {
        self.node_of_free.len()
    }

    /// Scatter a free-DOF vector to all mesh nodes, zeros on constrained ones.
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.free_of_node.len()];
        for (f, &node) in self.node_of_free.iter().enumerate() {
            full[node] = free[f];
        }
        full
    }
}

/// Stiffness/mass pair on the free DOFs, plus the directional stiffness
/// blocks (transverse one already scaled by eps^-2) when retained.
#[derive(Debug, Clone)]
pub struct SparsePair {
    pub k: Csr,
    pub m: Csr,
    pub k_axial: Option<Csr>,
    pub k_transverse: Option<Csr>,
    pub dof_map: DofMap,
    pub eps: f64,
    pub bc: BcMode,
}

impl SparsePair {
    pub fn n_free(&self) -> usize {
        self.dof_map.n_free()
    }
}

/// Full-system (all mesh nodes) matrices before elimination.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub k_axial: Csr,
    pub k_trans_unit: Csr,
    pub mass: Csr,
}

/// Integrate the element blocks over every cell. The transverse block is
/// returned without the eps factor so one assembly serves a whole sweep.
pub fn assemble_full(mesh: &HexMesh) -> FullSystem {
    let n = mesh.node_count();
    let mut coo = CooTriple::new(n);
    let g = 1.0 / 3.0f64.sqrt();
    let mut gauss = Vec::with_capacity(8);
    for &a in &[-g, g] {
        for &b in &[-g, g] {
            for &c in &[-g, g] {
                gauss.push((a, b, c));
            }
        }
    }

    for cell in &mesh.cells {
        let mut coords = [[0.0f64; 3]; 8];
        for (a, &node) in cell.iter().enumerate() {
            coords[a] = mesh.nodes[node];
        }
        let mut ke1 = [[0.0f64; 8]; 8];
        let mut ke23 = [[0.0f64; 8]; 8];
        let mut me = [[0.0f64; 8]; 8];
        for &(xi, eta, zeta) in &gauss {
            let jm = jacobian(&coords, xi, eta, zeta);
            let det = det3(&jm);
            let inv = inv3(&jm, det);
            let gref = shape_gradients(xi, eta, zeta);
            let nval = shape_values(xi, eta, zeta);
            // physical gradients: d/dy_r = sum_c inv[c][r] * d/dxi_c
            let mut gphys = [[0.0f64; 8]; 3];
            for a in 0..8 {
                for r in 0..3 {
                    gphys[r][a] =
                        inv[0][r] * gref[0][a] + inv[1][r] * gref[1][a] + inv[2][r] * gref[2][a];
                }
            }
            // upper triangle, mirrored afterwards: exact symmetry
            for a in 0..8 {
                for b in a..8 {
                    ke1[a][b] += det * gphys[0][a] * gphys[0][b];
                    ke23[a][b] += det * (gphys[1][a] * gphys[1][b] + gphys[2][a] * gphys[2][b]);
                    me[a][b] += det * nval[a] * nval[b];
                }
            }
        }
        for a in 0..8 {
            for b in 0..8 {
                let (r, c) = if a <= b { (a, b) } else { (b, a) };
                coo.push(cell[a], cell[b], ke1[r][c], ke23[r][c], me[r][c]);
            }
        }
    }
    let (k_axial, k_trans_unit, mass) = coo.into_csr();
    FullSystem {
        k_axial,
        k_trans_unit,
        mass,
    }
}

/// Nodes constrained under a boundary-condition regime, sorted ascending.
pub fn constrained_nodes(mesh: &HexMesh, bc: BcMode) -> Vec<usize> {
    match bc {
        BcMode::Neumann => Vec::new(),
        BcMode::Dirichlet => mesh.boundary_nodes(),
        BcMode::Mixed => {
            let mut nodes = mesh.tagged_nodes(FaceTag::Base0);
            nodes.extend(mesh.tagged_nodes(FaceTag::Base1));
            nodes.sort_unstable();
            nodes.dedup();
            nodes
        }
    }
}

/// Symmetric reduction of the full system: rows and columns of constrained
/// nodes removed, free DOFs renumbered in node order.
pub fn eliminate_dirichlet(
    full: &FullSystem,
    constrained: &[usize],
    boundary_nodes: &[usize],
    eps: f64,
    bc: BcMode,
    retain_blocks: bool,
) -> Result<SparsePair> {
    for node in constrained {
        if boundary_nodes.binary_search(node).is_err() {
            return Err(Error::Logic(format!(
                "constrained node {node} is not a boundary node"
            )));
        }
    }
    let n = full.mass.n;
    let mut free_of_node = vec![None; n];
    let mut node_of_free = Vec::with_capacity(n - constrained.len());
    let mut it = constrained.iter().peekable();
    for node in 0..n {
        if it.peek() == Some(&&node) {
            it.next();
            continue;
        }
        free_of_node[node] = Some(node_of_free.len());
        node_of_free.push(node);
    }
    if node_of_free.is_empty() {
        return Err(Error::Config(
            "elimination removed every DOF; refine the mesh".into(),
        ));
    }
    let dof_map = DofMap {
        free_of_node,
        node_of_free,
    };
    let reduce = |a: &Csr| -> Csr {
        let nf = dof_map.n_free();
        let mut row_ptr = vec![0usize; nf + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (fi, &node) in dof_map.node_of_free.iter().enumerate() {
            let (cols, vals) = a.row(node);
            for (c, v) in cols.iter().zip(vals) {
                if let Some(fj) = dof_map.free_of_node[*c as usize] {
                    col_idx.push(fj as u32);
                    values.push(*v);
                }
            }
            row_ptr[fi + 1] = col_idx.len();
        }
        Csr {
            n: nf,
            row_ptr,
            col_idx,
            values,
        }
    };
    let inv_eps2 = 1.0 / (eps * eps);
    let k_axial = reduce(&full.k_axial);
    let k_trans = reduce(&full.k_trans_unit).scaled(inv_eps2);
    let k = k_axial.add_scaled(&k_trans, 1.0)?;
    let m = reduce(&full.mass);
    Ok(SparsePair {
        k,
        m,
        k_axial: retain_blocks.then_some(k_axial),
        k_transverse: retain_blocks.then_some(k_trans),
        dof_map,
        eps,
        bc,
    })
}

/// Assemble the reduced pair for a boundary-condition regime, retaining the
/// directional stiffness blocks.
pub fn assemble(mesh: &HexMesh, bc: BcMode, eps: f64) -> Result<SparsePair> {
    assemble_with_options(mesh, bc, eps, true)
}

pub fn assemble_with_options(
    mesh: &HexMesh,
    bc: BcMode,
    eps: f64,
    retain_blocks: bool,
) -> Result<SparsePair> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!("eps {eps} must lie in (0, 1]")));
    }
    let full = assemble_full(mesh);
    let constrained = constrained_nodes(mesh, bc);
    let boundary = mesh.boundary_nodes();
    eliminate_dirichlet(&full, &constrained, &boundary, eps, bc, retain_blocks)
}
