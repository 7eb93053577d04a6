//! Structured hexahedral meshes of the stretched reference domain.
//!
//! Meshes always live in the stretched variable y; one mesh serves a whole
//! eps-sweep because the thinness parameter only enters assembly
//! coefficients. Boundary faces carry tags separating the two bases from the
//! lateral surface.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{partition_with_breakpoints, CrossSection, RodDomain, RodKind};

/// Boundary classification: the two bases perpendicular to the axis and the
/// lateral surface (which includes the junction annulus of a two-prism).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceTag {
    Base0,
    Base1,
    Lateral,
}

/// One exterior quad face, addressed by owning cell and local face index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryFace {
    pub cell: usize,
    pub local_face: usize,
    pub tag: FaceTag,
}

/// Local corner order: right-handed unit cube, y3-face first
/// (0,0,0),(1,0,0),(1,1,0),(0,1,0),(0,0,1),(1,0,1),(1,1,1),(0,1,1).
/// Local faces in the fixed order (-y1, +y1, -y2, +y2, -y3, +y3).
pub const FACE_NODES: [[usize; 4]; 6] = [
    [0, 3, 7, 4],
    [1, 2, 6, 5],
    [0, 1, 5, 4],
    [3, 2, 6, 7],
    [0, 1, 2, 3],
    [4, 5, 6, 7],
];

/// Edges of the reference hexahedron, used for aspect ratios.
pub const CELL_EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

/// Conforming trilinear hexahedral mesh with tagged boundary.
#[derive(Debug, Clone)]
pub struct HexMesh {
    pub nodes: Vec<[f64; 3]>,
    pub cells: Vec<[usize; 8]>,
    pub boundary_faces: Vec<BoundaryFace>,
    pub resolution: (usize, usize, usize),
    pub ell0: f64,
    pub ell1: f64,
}

/// Corner-Jacobian minimum and edge-length aspect maximum over all cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub min_jacobian: f64,
    pub max_aspect: f64,
}

/// Trilinear shape values at a reference point (coordinates in [-1, 1]).
pub(crate) fn shape_values(xi: f64, eta: f64, zeta: f64) -> [f64; 8] {
    let m = |t: f64| 0.5 * (1.0 - t);
    let p = |t: f64| 0.5 * (1.0 + t);
    [
        m(xi) * m(eta) * m(zeta),
        p(xi) * m(eta) * m(zeta),
        p(xi) * p(eta) * m(zeta),
        m(xi) * p(eta) * m(zeta),
        m(xi) * m(eta) * p(zeta),
        p(xi) * m(eta) * p(zeta),
        p(xi) * p(eta) * p(zeta),
        m(xi) * p(eta) * p(zeta),
    ]
}

/// Reference-space gradients of the trilinear shape functions, rows are
/// d/dxi, d/deta, d/dzeta.
pub(crate) fn shape_gradients(xi: f64, eta: f64, zeta: f64) -> [[f64; 8]; 3] {
    let m = |t: f64| 0.5 * (1.0 - t);
    let p = |t: f64| 0.5 * (1.0 + t);
    let signs: [[f64; 3]; 8] = [
        [-1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0],
        [1.0, 1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
    ];
    let f = |s: f64, t: f64| if s > 0.0 { p(t) } else { m(t) };
    let mut g = [[0.0; 8]; 3];
    for (a, s) in signs.iter().enumerate() {
        g[0][a] = 0.5 * s[0] * f(s[1], eta) * f(s[2], zeta);
        g[1][a] = 0.5 * s[1] * f(s[0], xi) * f(s[2], zeta);
        g[2][a] = 0.5 * s[2] * f(s[0], xi) * f(s[1], eta);
    }
    g
}

/// Jacobian of the trilinear map at a reference point, rows dy_i/dxi_j.
pub(crate) fn jacobian(coords: &[[f64; 3]; 8], xi: f64, eta: f64, zeta: f64) -> [[f64; 3]; 3] {
    let g = shape_gradients(xi, eta, zeta);
    let mut j = [[0.0f64; 3]; 3];
    for a in 0..8 {
        for r in 0..3 {
            for c in 0..3 {
                j[r][c] += g[c][a] * coords[a][r];
            }
        }
    }
    j
}

pub(crate) fn det3(j: &[[f64; 3]; 3]) -> f64 {
    j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
        - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
}

pub(crate) fn inv3(j: &[[f64; 3]; 3], det: f64) -> [[f64; 3]; 3] {
    let inv_det = 1.0 / det;
    [
        [
            (j[1][1] * j[2][2] - j[1][2] * j[2][1]) * inv_det,
            (j[0][2] * j[2][1] - j[0][1] * j[2][2]) * inv_det,
            (j[0][1] * j[1][2] - j[0][2] * j[1][1]) * inv_det,
        ],
        [
            (j[1][2] * j[2][0] - j[1][0] * j[2][2]) * inv_det,
            (j[0][0] * j[2][2] - j[0][2] * j[2][0]) * inv_det,
            (j[0][2] * j[1][0] - j[0][0] * j[1][2]) * inv_det,
        ],
        [
            (j[1][0] * j[2][1] - j[1][1] * j[2][0]) * inv_det,
            (j[0][1] * j[2][0] - j[0][0] * j[2][1]) * inv_det,
            (j[0][0] * j[1][1] - j[0][1] * j[1][0]) * inv_det,
        ],
    ]
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a * (1.0 - t) + b * t
}

/// Build a conforming structured mesh of the stretched domain.
///
/// Single-block fitted meshing for the prism and profiled kinds (nodes mapped
/// through the bound functions station by station); two matched blocks for
/// the two-prism, sharing every junction node. Preconditions: n1, n2, n3 >= 1;
/// for the two-prism n1 must be even and n2, n3 multiples of 4.
pub fn build_mesh(domain: &RodDomain, resolution: (usize, usize, usize)) -> Result<HexMesh> {
    let (n1, n2, n3) = resolution;
    if n1 < 1 || n2 < 1 || n3 < 1 {
        return Err(Error::Config(format!(
            "resolution ({n1}, {n2}, {n3}) must be at least 1 in every direction"
        )));
    }
    let mut mesh = match domain.kind() {
        RodKind::TwoPrism => build_two_prism(domain, resolution)?,
        _ => build_single_block(domain, resolution)?,
    };
    mesh.boundary_faces = classify_boundary(&mesh);
    let q = mesh_quality(&mesh);
    if !(q.min_jacobian > 0.0) {
        return Err(Error::Geometry(format!(
            "mesh has non-positive corner Jacobian ({})",
            q.min_jacobian
        )));
    }
    Ok(mesh)
}

fn build_single_block(domain: &RodDomain, (n1, n2, n3): (usize, usize, usize)) -> Result<HexMesh> {
    if !domain.discontinuities().is_empty() {
        // The only discontinuous catalog geometry is the two-prism, which has
        // its own conforming builder; a jump in a graph-bounded profile would
        // leave an unmeshable L-shaped lateral wall.
        return Err(Error::Config(
            "discontinuous bound profiles are not meshable; use the two-prism kind or a continuous profile"
                .into(),
        ));
    }
    let stations = partition_with_breakpoints(domain.ell0(), domain.ell1(), &[], n1)?;
    let nn2 = n2 + 1;
    let nn3 = n3 + 1;
    let mut nodes = Vec::with_capacity(stations.len() * nn2 * nn3);
    for &x1 in &stations {
        let (b2, b3) = domain.section_box(x1)?;
        if b2[1] - b2[0] <= 0.0 || b3[1] - b3[0] <= 0.0 {
            return Err(Error::Geometry(format!(
                "degenerate cross-section at x1 = {x1}"
            )));
        }
        for i2 in 0..nn2 {
            let y2 = lerp(b2[0], b2[1], i2 as f64 / n2 as f64);
            for i3 in 0..nn3 {
                let y3 = lerp(b3[0], b3[1], i3 as f64 / n3 as f64);
                nodes.push([x1, y2, y3]);
            }
        }
    }
    let nid = |i1: usize, i2: usize, i3: usize| (i1 * nn2 + i2) * nn3 + i3;
    let mut cells = Vec::with_capacity(n1 * n2 * n3);
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                cells.push([
                    nid(i1, i2, i3),
                    nid(i1 + 1, i2, i3),
                    nid(i1 + 1, i2 + 1, i3),
                    nid(i1, i2 + 1, i3),
                    nid(i1, i2, i3 + 1),
                    nid(i1 + 1, i2, i3 + 1),
                    nid(i1 + 1, i2 + 1, i3 + 1),
                    nid(i1, i2 + 1, i3 + 1),
                ]);
            }
        }
    }
    Ok(HexMesh {
        nodes,
        cells,
        boundary_faces: Vec::new(),
        resolution: (n1, n2, n3),
        ell0: domain.ell0(),
        ell1: domain.ell1(),
    })
}

fn build_two_prism(domain: &RodDomain, (n1, n2, n3): (usize, usize, usize)) -> Result<HexMesh> {
    if n1 % 2 != 0 {
        return Err(Error::Config(format!(
            "two-prism meshes need an even axial resolution (got n1 = {n1}) so a node layer lies on the junction"
        )));
    }
    if n2 % 4 != 0 || n3 % 4 != 0 {
        return Err(Error::Config(format!(
            "two-prism meshes need n2 and n3 divisible by 4 (got {n2}, {n3}) so wide-side nodes land on the inner square"
        )));
    }
    let (outer, inner, junction) = match domain.section() {
        CrossSection::TwoSquare {
            outer_half,
            inner_half,
            junction,
        } => (*outer_half, *inner_half, *junction),
        _ => unreachable!("two-prism builder called for a different kind"),
    };
    let half1 = n1 / 2;
    let nn2 = n2 + 1;
    let nn3 = n3 + 1;
    let m2 = n2 / 2; // narrow-side cells per transverse direction
    let m3 = n3 / 2;
    let off2 = n2 / 4; // wide-grid index offset of the inner square
    let off3 = n3 / 4;

    let mut nodes = Vec::new();
    // wide block, layers 0..=half1 over (ell0, junction)
    let wide = |i1: usize, i2: usize, i3: usize| (i1 * nn2 + i2) * nn3 + i3;
    for i1 in 0..=half1 {
        let x1 = lerp(domain.ell0(), junction, i1 as f64 / half1 as f64);
        for i2 in 0..nn2 {
            let y2 = lerp(-outer, outer, i2 as f64 / n2 as f64);
            for i3 in 0..nn3 {
                let y3 = lerp(-outer, outer, i3 as f64 / n3 as f64);
                nodes.push([x1, y2, y3]);
            }
        }
    }
    // narrow block: junction-layer nodes are shared with the wide block,
    // deeper layers get fresh nodes.
    let wide_count = nodes.len();
    let narrow_stride = (m2 + 1) * (m3 + 1);
    let narrow = |i1: usize, i2: usize, i3: usize| -> usize {
        if i1 == half1 {
            wide(half1, i2 + off2, i3 + off3)
        } else {
            wide_count + (i1 - half1 - 1) * narrow_stride + i2 * (m3 + 1) + i3
        }
    };
    for i1 in (half1 + 1)..=n1 {
        let x1 = lerp(junction, domain.ell1(), (i1 - half1) as f64 / half1 as f64);
        for i2 in 0..=m2 {
            let y2 = lerp(-inner, inner, i2 as f64 / m2 as f64);
            for i3 in 0..=m3 {
                let y3 = lerp(-inner, inner, i3 as f64 / m3 as f64);
                nodes.push([x1, y2, y3]);
            }
        }
    }

    let mut cells = Vec::with_capacity(half1 * (n2 * n3 + m2 * m3));
    for i1 in 0..half1 {
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                cells.push([
                    wide(i1, i2, i3),
                    wide(i1 + 1, i2, i3),
                    wide(i1 + 1, i2 + 1, i3),
                    wide(i1, i2 + 1, i3),
                    wide(i1, i2, i3 + 1),
                    wide(i1 + 1, i2, i3 + 1),
                    wide(i1 + 1, i2 + 1, i3 + 1),
                    wide(i1, i2 + 1, i3 + 1),
                ]);
            }
        }
    }
    for i1 in half1..n1 {
        for i2 in 0..m2 {
            for i3 in 0..m3 {
                cells.push([
                    narrow(i1, i2, i3),
                    narrow(i1 + 1, i2, i3),
                    narrow(i1 + 1, i2 + 1, i3),
                    narrow(i1, i2 + 1, i3),
                    narrow(i1, i2, i3 + 1),
                    narrow(i1 + 1, i2, i3 + 1),
                    narrow(i1 + 1, i2 + 1, i3 + 1),
                    narrow(i1, i2 + 1, i3 + 1),
                ]);
            }
        }
    }
    Ok(HexMesh {
        nodes,
        cells,
        boundary_faces: Vec::new(),
        resolution: (n1, n2, n3),
        ell0: domain.ell0(),
        ell1: domain.ell1(),
    })
}

/// Every exterior quad appears in exactly one cell; interior quads in two.
fn classify_boundary(mesh: &HexMesh) -> Vec<BoundaryFace> {
    let mut seen: HashMap<[usize; 4], u8> = HashMap::with_capacity(mesh.cells.len() * 3);
    let face_key = |cell: &[usize; 8], f: usize| -> [usize; 4] {
        let mut k = [0usize; 4];
        for (slot, &ln) in FACE_NODES[f].iter().enumerate() {
            k[slot] = cell[ln];
        }
        k.sort_unstable();
        k
    };
    for cell in &mesh.cells {
        for f in 0..6 {
            *seen.entry(face_key(cell, f)).or_insert(0) += 1;
        }
    }
    let tol = 1e-12 * (mesh.ell1 - mesh.ell0).abs().max(1.0);
    let mut faces = Vec::new();
    for (c, cell) in mesh.cells.iter().enumerate() {
        for f in 0..6 {
            if seen[&face_key(cell, f)] != 1 {
                continue;
            }
            let on = |target: f64| {
                FACE_NODES[f]
                    .iter()
                    .all(|&ln| (mesh.nodes[cell[ln]][0] - target).abs() <= tol)
            };
            let tag = if on(mesh.ell0) {
                FaceTag::Base0
            } else if on(mesh.ell1) {
                FaceTag::Base1
            } else {
                FaceTag::Lateral
            };
            faces.push(BoundaryFace {
                cell: c,
                local_face: f,
                tag,
            });
        }
    }
    faces
}

/// Corner-Jacobian minimum and max edge-length ratio.
pub fn mesh_quality(mesh: &HexMesh) -> QualityReport {
    let corners = [
        (-1.0, -1.0, -1.0),
        (1.0, -1.0, -1.0),
        (1.0, 1.0, -1.0),
        (-1.0, 1.0, -1.0),
        (-1.0, -1.0, 1.0),
        (1.0, -1.0, 1.0),
        (1.0, 1.0, 1.0),
        (-1.0, 1.0, 1.0),
    ];
    let mut min_jac = f64::INFINITY;
    let mut max_aspect: f64 = 0.0;
    for cell in &mesh.cells {
        let coords = mesh.cell_coords_of(cell);
        for &(xi, eta, zeta) in &corners {
            let j = jacobian(&coords, xi, eta, zeta);
            min_jac = min_jac.min(det3(&j));
        }
        let mut emin = f64::INFINITY;
        let mut emax: f64 = 0.0;
        for e in &CELL_EDGES {
            let a = coords[e[0]];
            let b = coords[e[1]];
            let len = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2))
                .sqrt();
            emin = emin.min(len);
            emax = emax.max(len);
        }
        max_aspect = max_aspect.max(emax / emin);
    }
    QualityReport {
        min_jacobian: min_jac,
        max_aspect,
    }
}

impl HexMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn axial_span(&self) -> (f64, f64) {
        (self.ell0, self.ell1)
    }

    pub fn cell_coords(&self, cell: usize) -> [[f64; 3]; 8] {
        self.cell_coords_of(&self.cells[cell])
    }

    fn cell_coords_of(&self, cell: &[usize; 8]) -> [[f64; 3]; 8] {
        let mut c = [[0.0; 3]; 8];
        for (a, &n) in cell.iter().enumerate() {
            c[a] = self.nodes[n];
        }
        c
    }

    /// Nodes lying on faces with the given tag, sorted ascending.
    pub fn tagged_nodes(&self, tag: FaceTag) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_faces
            .iter()
            .filter(|bf| bf.tag == tag)
            .flat_map(|bf| {
                FACE_NODES[bf.local_face]
                    .iter()
                    .map(move |&ln| self.cells[bf.cell][ln])
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All nodes on the boundary, sorted ascending.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_faces
            .iter()
            .flat_map(|bf| {
                FACE_NODES[bf.local_face]
                    .iter()
                    .map(move |&ln| self.cells[bf.cell][ln])
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Total volume by 2x2x2 Gauss quadrature of the trilinear maps.
    pub fn total_volume(&self) -> f64 {
        let g = 1.0 / 3.0f64.sqrt();
        let mut vol = 0.0;
        for cell in &self.cells {
            let coords = self.cell_coords_of(cell);
            for &sx in &[-g, g] {
                for &sy in &[-g, g] {
                    for &sz in &[-g, g] {
                        vol += det3(&jacobian(&coords, sx, sy, sz));
                    }
                }
            }
        }
        vol
    }

    /// Centroid axial coordinate of a cell.
    pub fn cell_axial_centroid(&self, cell: usize) -> f64 {
        self.cells[cell]
            .iter()
            .map(|&n| self.nodes[n][0])
            .sum::<f64>()
            / 8.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Profile;

    fn count_tags(mesh: &HexMesh) -> (usize, usize, usize) {
        let mut b0 = 0;
        let mut b1 = 0;
        let mut lat = 0;
        for f in &mesh.boundary_faces {
            match f.tag {
                FaceTag::Base0 => b0 += 1,
                FaceTag::Base1 => b1 += 1,
                FaceTag::Lateral => lat += 1,
            }
        }
        (b0, b1, lat)
    }

    #[test]
    fn prism_4x2x2_counts() {
        let d = RodDomain::prism(1.0, 0.1).unwrap();
        let m = build_mesh(&d, (4, 2, 2)).unwrap();
        assert_eq!(m.node_count(), 45);
        assert_eq!(m.cell_count(), 16);
        assert_eq!(m.boundary_faces.len(), 40);
        assert_eq!(count_tags(&m), (4, 4, 32));
    }

    #[test]
    fn prism_single_cell() {
        let d = RodDomain::prism(1.0, 0.5).unwrap();
        let m = build_mesh(&d, (1, 1, 1)).unwrap();
        assert_eq!(m.node_count(), 8);
        assert_eq!(m.cell_count(), 1);
        assert_eq!(m.boundary_faces.len(), 6);
    }

    #[test]
    fn prism_quality_is_exact_for_boxes() {
        let d = RodDomain::prism(1.0, 0.1).unwrap();
        let m = build_mesh(&d, (4, 2, 2)).unwrap();
        let q = mesh_quality(&m);
        assert!(q.min_jacobian > 0.0);
        assert!((q.max_aspect - 2.0).abs() < 1e-12); // 0.5 vs 0.25 edges
        let cube = build_mesh(&RodDomain::prism(1.0, 0.1).unwrap(), (4, 4, 4)).unwrap();
        assert!((mesh_quality(&cube).max_aspect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_prism_junction_is_conforming() {
        let d = RodDomain::two_prism(1.0, 0.125).unwrap();
        let m = build_mesh(&d, (8, 4, 4)).unwrap();
        // every narrow-side face at the junction must coincide node-for-node
        // with a wide-side face: shared node ids make coincidence exact, so it
        // is enough that no boundary face sits at the junction plane interior
        // to the narrow square.
        let tol = 1e-12;
        for bf in &m.boundary_faces {
            let ns = FACE_NODES[bf.local_face].map(|ln| m.cells[bf.cell][ln]);
            let on_junction = ns.iter().all(|&n| (m.nodes[n][0] - 0.5).abs() < tol);
            if on_junction {
                assert_eq!(bf.tag, FaceTag::Lateral);
                // the annulus: at least one corner outside the closed inner square
                let outside = ns.iter().any(|&n| {
                    m.nodes[n][1].abs() > 0.5 + tol || m.nodes[n][2].abs() > 0.5 + tol
                });
                assert!(outside, "junction face fully inside the narrow square");
            }
        }
        // stretched volume: 4 * 1/2 + 1 * 1/2
        assert!((m.total_volume() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn two_prism_narrow_junction_faces_coincide_with_wide_faces() {
        let d = RodDomain::two_prism(1.0, 0.125).unwrap();
        let m = build_mesh(&d, (8, 4, 4)).unwrap();
        let tol = 1e-12;
        let junction_face = |cell: &[usize; 8], f: usize| -> Option<[usize; 4]> {
            let mut k = [0usize; 4];
            for (slot, &l) in FACE_NODES[f].iter().enumerate() {
                k[slot] = cell[l];
            }
            if k.iter().all(|&n| (m.nodes[n][0] - 0.5).abs() < tol) {
                k.sort_unstable();
                Some(k)
            } else {
                None
            }
        };
        let wide: std::collections::HashSet<[usize; 4]> = m
            .cells
            .iter()
            .filter_map(|c| junction_face(c, 1))
            .collect();
        let mut narrow_seen = 0;
        for cell in &m.cells {
            if let Some(k) = junction_face(cell, 0) {
                assert!(wide.contains(&k), "narrow junction face has no wide match");
                narrow_seen += 1;
            }
        }
        assert_eq!(narrow_seen, 4); // (n2/2) * (n3/2) faces at the junction
    }

    #[test]
    fn two_prism_resolution_preconditions() {
        let d = RodDomain::two_prism(1.0, 0.125).unwrap();
        assert!(matches!(build_mesh(&d, (7, 4, 4)), Err(Error::Config(_))));
        assert!(matches!(build_mesh(&d, (8, 6, 4)), Err(Error::Config(_))));
    }

    #[test]
    fn profiled_mesh_is_fitted_and_positive() {
        let d = RodDomain::profiled_height(
            1.0,
            0.1,
            Profile::SinBump {
                offset: 1.5,
                amplitude: 0.4,
            },
        )
        .unwrap();
        let m = build_mesh(&d, (16, 4, 4)).unwrap();
        assert!(mesh_quality(&m).min_jacobian > 0.0);
        // top boundary nodes sit exactly on the graph of h
        for bf in &m.boundary_faces {
            if bf.tag != FaceTag::Lateral {
                continue;
            }
            for &ln in &FACE_NODES[bf.local_face] {
                let p = m.nodes[m.cells[bf.cell][ln]];
                assert!(d.contains_stretched(p));
            }
        }
    }

    #[test]
    fn step_profiles_are_not_meshable() {
        let d = RodDomain::profiled_height(
            1.0,
            0.1,
            Profile::Step {
                left: 2.0,
                right: 1.0,
                at: 0.5,
            },
        )
        .unwrap();
        assert!(matches!(build_mesh(&d, (8, 2, 2)), Err(Error::Config(_))));
    }

    #[test]
    fn volume_matches_exact_for_prisms_and_interpolant_for_profiles() {
        let prism = build_mesh(&RodDomain::prism(2.0, 0.1).unwrap(), (5, 3, 2)).unwrap();
        assert!((prism.total_volume() - 2.0).abs() < 1e-12);

        let profile = Profile::SinBump {
            offset: 1.5,
            amplitude: 0.4,
        };
        let d = RodDomain::profiled_height(1.0, 0.1, profile.clone()).unwrap();
        let n1 = 16;
        let m = build_mesh(&d, (n1, 4, 4)).unwrap();
        // trapezoid over the stations = volume of the piecewise-trilinear mesh
        let mut expect = 0.0;
        for i in 0..n1 {
            let xa = i as f64 / n1 as f64;
            let xb = (i + 1) as f64 / n1 as f64;
            let ha = profile.eval(xa, 0.0, 1.0);
            let hb = profile.eval(xb, 0.0, 1.0);
            expect += 0.5 * (ha + hb) * (xb - xa);
        }
        assert!((m.total_volume() - expect).abs() < 1e-12);
    }

    #[test]
    fn refinement_multiplies_cells_by_eight_and_keeps_tags() {
        let d = RodDomain::two_prism(1.0, 0.125).unwrap();
        let coarse = build_mesh(&d, (4, 4, 4)).unwrap();
        let fine = build_mesh(&d, (8, 8, 8)).unwrap();
        assert_eq!(fine.cell_count(), 8 * coarse.cell_count());
        let (b0c, b1c, latc) = count_tags(&coarse);
        let (b0f, b1f, latf) = count_tags(&fine);
        assert_eq!(b0f, 4 * b0c);
        assert_eq!(b1f, 4 * b1c);
        assert_eq!(latf, 4 * latc);
    }
}
