//! Structured simplicial meshes of axis-aligned boxes.
//!
//! 2D rectangles are cut into a uniform grid of squares, each split into two
//! triangles along the same diagonal; 3D boxes are cut into cubes, each split
//! into six tetrahedra sharing the main diagonal (the splitting is
//! translation invariant, so neighboring cubes match facet to facet). Meshes
//! are immutable after construction; all derived quantities (cell volumes,
//! P1 basis gradients, centroids, incidence lists) are precomputed.

mod calculus;
mod cutoff;
mod field;
mod region;
mod seminorms;

pub use calculus::{
    cell_average, gradient, hessian, integrate, kahan_sum, lq_norm, power_integral,
    recover_cell_field, sobolev_seminorm, w1p_distance, w1p_norm, Kahan, Recovery,
};
pub use cutoff::{make_cutoff, CutoffFunction};
pub use field::{MatrixField, ScalarField, Support, VectorField};
pub use region::{Region, RegionKind};
pub use seminorms::{holder_norm, morrey_norm};

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("field has {got} entries, mesh expects {expected} on this support")]
    FieldMismatch { expected: usize, got: usize },
    #[error("field lives on the wrong support for this operation")]
    WrongSupport,
    #[error("exponent out of range: {0}")]
    InvalidExponent(f64),
    #[error("Morrey exponent {lambda} outside ({lo}, {hi})")]
    InvalidMorreyExponent { lambda: f64, lo: f64, hi: f64 },
    #[error("region is not compactly contained in the mesh domain")]
    RegionOutsideDomain,
    #[error("region contains no mesh entities")]
    EmptyRegion,
    #[error("invalid cutoff radii: inner {inner} must be < outer {outer}")]
    InvalidCutoff { inner: f64, outer: f64 },
    #[error("invalid mesh parameters: {0}")]
    InvalidParameter(String),
    #[error("empty sample set")]
    EmptySamples,
}

/// A conforming P1 simplicial mesh of a box.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cells_per_axis: Vec<usize>,
    nodes: Vec<f64>,
    cells: Vec<usize>,
    boundary: Vec<bool>,
    volumes: Vec<f64>,
    /// Basis gradients: for cell `c` and local vertex `v`,
    /// `basis_grads[(c*(dim+1)+v)*dim ..][..dim]`.
    basis_grads: Vec<f64>,
    centroids: Vec<f64>,
    node_cells: Vec<Vec<usize>>,
}

impl Mesh {
    /// Uniform triangulation of the rectangle `[lo0,hi0] x [lo1,hi1]` with
    /// `nx * ny` squares, each split into two triangles.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize) -> Result<Mesh, MeshError> {
        if nx < 1 || ny < 1 {
            return Err(MeshError::InvalidParameter("need at least one cell per axis".into()));
        }
        if lo[0] >= hi[0] || lo[1] >= hi[1] {
            return Err(MeshError::InvalidParameter("box must have positive extent".into()));
        }
        let (hx, hy) = ((hi[0] - lo[0]) / nx as f64, (hi[1] - lo[1]) / ny as f64);
        let n_nodes = (nx + 1) * (ny + 1);
        let mut nodes = Vec::with_capacity(2 * n_nodes);
        let mut boundary = Vec::with_capacity(n_nodes);
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(lo[0] + i as f64 * hx);
                nodes.push(lo[1] + j as f64 * hy);
                boundary.push(i == 0 || i == nx || j == 0 || j == ny);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(2 * nx * ny * 3);
        for j in 0..ny {
            for i in 0..nx {
                // Lower and upper triangle of the square, split along the
                // (i,j) -> (i+1,j+1) diagonal.
                cells.extend_from_slice(&[id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                cells.extend_from_slice(&[id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Mesh::finish(2, lo.to_vec(), hi.to_vec(), vec![nx, ny], nodes, cells, boundary)
    }

    /// Kuhn triangulation of a box into `6 * nx * ny * nz` tetrahedra.
    pub fn box3d(
        lo: [f64; 3],
        hi: [f64; 3],
        n: [usize; 3],
    ) -> Result<Mesh, MeshError> {
        if n.iter().any(|&k| k < 1) {
            return Err(MeshError::InvalidParameter("need at least one cell per axis".into()));
        }
        if (0..3).any(|a| lo[a] >= hi[a]) {
            return Err(MeshError::InvalidParameter("box must have positive extent".into()));
        }
        let h: Vec<f64> = (0..3).map(|a| (hi[a] - lo[a]) / n[a] as f64).collect();
        let n_nodes = (n[0] + 1) * (n[1] + 1) * (n[2] + 1);
        let mut nodes = Vec::with_capacity(3 * n_nodes);
        let mut boundary = Vec::with_capacity(n_nodes);
        for k in 0..=n[2] {
            for j in 0..=n[1] {
                for i in 0..=n[0] {
                    nodes.push(lo[0] + i as f64 * h[0]);
                    nodes.push(lo[1] + j as f64 * h[1]);
                    nodes.push(lo[2] + k as f64 * h[2]);
                    boundary
                        .push(i == 0 || i == n[0] || j == 0 || j == n[1] || k == 0 || k == n[2]);
                }
            }
        }
        let id =
            |i: usize, j: usize, k: usize| (k * (n[1] + 1) + j) * (n[0] + 1) + i;
        // Each cube splits into the 6 simplices of the Kuhn decomposition:
        // paths from the low corner to the high corner, one axis at a time.
        const PERMS: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut cells = Vec::with_capacity(6 * n[0] * n[1] * n[2] * 4);
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    for perm in PERMS {
                        let mut c = [i, j, k];
                        let mut tet = vec![id(c[0], c[1], c[2])];
                        for &axis in &perm {
                            c[axis] += 1;
                            tet.push(id(c[0], c[1], c[2]));
                        }
                        cells.extend_from_slice(&tet);
                    }
                }
            }
        }
        Mesh::finish(3, lo.to_vec(), hi.to_vec(), n.to_vec(), nodes, cells, boundary)
    }

    fn finish(
        dim: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells_per_axis: Vec<usize>,
        nodes: Vec<f64>,
        cells: Vec<usize>,
        boundary: Vec<bool>,
    ) -> Result<Mesh, MeshError> {
        let nv = dim + 1;
        let n_cells = cells.len() / nv;
        let mut volumes = Vec::with_capacity(n_cells);
        let mut basis_grads = vec![0.0; n_cells * nv * dim];
        let mut centroids = vec![0.0; n_cells * dim];
        let n_nodes = nodes.len() / dim;
        let mut node_cells: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
        let mut factorial = 1.0;
        for k in 2..=dim {
            factorial *= k as f64;
        }
        for c in 0..n_cells {
            let verts = &cells[c * nv..(c + 1) * nv];
            for &v in verts {
                node_cells[v].push(c);
            }
            let x0 = &nodes[verts[0] * dim..verts[0] * dim + dim];
            let mut m = DMatrix::zeros(dim, dim);
            for j in 1..nv {
                let xj = &nodes[verts[j] * dim..verts[j] * dim + dim];
                for a in 0..dim {
                    m[(a, j - 1)] = xj[a] - x0[a];
                }
            }
            let det = m.determinant();
            let vol = det.abs() / factorial;
            if vol <= 0.0 {
                return Err(MeshError::InvalidParameter(format!("degenerate cell {c}")));
            }
            volumes.push(vol);
            let inv = m.try_inverse().ok_or_else(|| {
                MeshError::InvalidParameter(format!("singular geometry matrix in cell {c}"))
            })?;
            // grad of barycentric coordinate j (j >= 1) is row j-1 of inv;
            // the first one balances the rest.
            let base = c * nv * dim;
            for j in 1..nv {
                for a in 0..dim {
                    let g = inv[(j - 1, a)];
                    basis_grads[base + j * dim + a] = g;
                    basis_grads[base + a] -= g;
                }
            }
            for &v in verts {
                for a in 0..dim {
                    centroids[c * dim + a] += nodes[v * dim + a] / nv as f64;
                }
            }
        }
        Ok(Mesh {
            dim,
            lo,
            hi,
            cells_per_axis,
            nodes,
            cells,
            boundary,
            volumes,
            basis_grads,
            centroids,
            node_cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }

    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cells[c * nv..(c + 1) * nv]
    }

    pub fn volume(&self, c: usize) -> f64 {
        self.volumes[c]
    }

    /// Gradient of the P1 basis function of local vertex `v` on cell `c`.
    pub fn basis_grad(&self, c: usize, v: usize) -> &[f64] {
        let nv = self.dim + 1;
        let base = (c * nv + v) * self.dim;
        &self.basis_grads[base..base + self.dim]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn cells_at_node(&self, node: usize) -> &[usize] {
        &self.node_cells[node]
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells_per_axis
    }

    /// Largest per-axis grid spacing.
    pub fn h(&self) -> f64 {
        (0..self.dim)
            .map(|a| (self.hi[a] - self.lo[a]) / self.cells_per_axis[a] as f64)
            .fold(0.0f64, f64::max)
    }

    pub fn domain_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.hi[a] - self.lo[a]).product()
    }

    /// Whether the closed ball of the given radius lies strictly inside the box.
    pub fn contains_ball_strictly(&self, center: &[f64], radius: f64) -> bool {
        if center.len() != self.dim || radius <= 0.0 {
            return false;
        }
        (0..self.dim).all(|a| {
            let margin = 1e-12 * (self.hi[a] - self.lo[a]);
            center[a] - self.lo[a] > radius + margin && self.hi[a] - center[a] > radius + margin
        })
    }

    /// Check the structural invariants: positive volumes, each interior facet
    /// shared by exactly two cells, boundary mask consistent with the box.
    pub fn validate(&self) -> Result<(), MeshError> {
        use std::collections::HashMap;
        if self.volumes.iter().any(|&v| v <= 0.0) {
            return Err(MeshError::InvalidParameter("nonpositive cell volume".into()));
        }
        let nv = self.dim + 1;
        let mut facets: HashMap<Vec<usize>, usize> = HashMap::new();
        for c in 0..self.n_cells() {
            let verts = self.cell_vertices(c);
            for skip in 0..nv {
                let mut f: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                f.sort_unstable();
                *facets.entry(f).or_insert(0) += 1;
            }
        }
        for (f, count) in &facets {
            match count {
                1 => {
                    if f.iter().any(|&v| !self.boundary[v]) {
                        return Err(MeshError::InvalidParameter(
                            "boundary facet with interior node".into(),
                        ));
                    }
                }
                2 => {}
                _ => {
                    return Err(MeshError::InvalidParameter(format!(
                        "facet shared by {count} cells"
                    )))
                }
            }
        }
        for i in 0..self.n_nodes() {
            let x = self.node(i);
            let on_box = (0..self.dim).any(|a| {
                let tol = 1e-12 * (self.hi[a] - self.lo[a]);
                (x[a] - self.lo[a]).abs() < tol || (x[a] - self.hi[a]).abs() < tol
            });
            if on_box != self.boundary[i] {
                return Err(MeshError::InvalidParameter(format!(
                    "boundary mask inconsistent at node {i}"
                )));
            }
        }
        Ok(())
    }

    /// Reference-simplex subsample points (barycentric-free, as coefficients
    /// of `x0 + a (x1-x0) + b (x2-x0) [+ c (x3-x0)]`), uniform in volume.
    pub(crate) fn subsample_coords(dim: usize) -> Vec<Vec<f64>> {
        const K: usize = 4;
        let mut pts = Vec::new();
        match dim {
            2 => {
                // Centroids of the K^2 congruent subtriangles.
                for i in 0..K {
                    for j in 0..K - i {
                        pts.push(vec![
                            (i as f64 + 1.0 / 3.0) / K as f64,
                            (j as f64 + 1.0 / 3.0) / K as f64,
                        ]);
                        if i + j < K - 1 {
                            pts.push(vec![
                                (i as f64 + 2.0 / 3.0) / K as f64,
                                (j as f64 + 2.0 / 3.0) / K as f64,
                            ]);
                        }
                    }
                }
            }
            _ => {
                // Midpoint grid on the cube folded onto the Kuhn simplex by
                // sorting coordinates (a measure-preserving map).
                for i in 0..K {
                    for j in 0..K {
                        for k in 0..K {
                            let mut abc = [
                                (i as f64 + 0.5) / K as f64,
                                (j as f64 + 0.5) / K as f64,
                                (k as f64 + 0.5) / K as f64,
                            ];
                            abc.sort_by(|x, y| y.partial_cmp(x).unwrap());
                            // The Kuhn simplex {1 >= a >= b >= c >= 0} has
                            // vertices 0, d1, d1+d2, d1+d2+d3 along the path
                            // directions, so the point a d1 + b d2 + c d3 has
                            // edge-frame coefficients (a-b, b-c, c).
                            pts.push(vec![abc[0] - abc[1], abc[1] - abc[2], abc[2]]);
                        }
                    }
                }
            }
        }
        pts
    }
}
