//! Discrete fields attached to a mesh: P1 nodal or P0 per-cell values.

use super::{Mesh, MeshError};

/// Where a field's degrees of freedom live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Nodes,
    Cells,
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    pub support: Support,
    pub data: Vec<f64>,
    pub unit: String,
}

#[derive(Debug, Clone)]
pub struct VectorField {
    pub support: Support,
    pub dim: usize,
    /// Interleaved components, `data[i*dim + a]`.
    pub data: Vec<f64>,
    pub unit: String,
}

#[derive(Debug, Clone)]
pub struct MatrixField {
    pub support: Support,
    pub dim: usize,
    /// Row-major per entity, `data[(i*dim + r)*dim + c]`.
    pub data: Vec<f64>,
    pub symmetric: bool,
    /// Entities whose value is trustworthy (e.g. interior nodes with a full
    /// recovery stencil). Entities marked false are excluded from integrals.
    pub valid: Vec<bool>,
    pub unit: String,
}

fn expected_len(mesh: &Mesh, support: Support) -> usize {
    match support {
        Support::Nodes => mesh.n_nodes(),
        Support::Cells => mesh.n_cells(),
    }
}

impl ScalarField {
    pub fn zeros(mesh: &Mesh, support: Support) -> Self {
        ScalarField { support, data: vec![0.0; expected_len(mesh, support)], unit: "1".into() }
    }

    /// Sample a function at the support points (node coordinates or cell centroids).
    pub fn from_fn<F: Fn(&[f64]) -> f64>(mesh: &Mesh, support: Support, f: F) -> Self {
        let n = expected_len(mesh, support);
        let data = (0..n)
            .map(|i| match support {
                Support::Nodes => f(mesh.node(i)),
                Support::Cells => f(mesh.centroid(i)),
            })
            .collect();
        ScalarField { support, data, unit: "1".into() }
    }

    pub fn check(&self, mesh: &Mesh) -> Result<(), MeshError> {
        let expected = expected_len(mesh, self.support);
        if self.data.len() != expected {
            return Err(MeshError::FieldMismatch { expected, got: self.data.len() });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn scale(&mut self, t: f64) {
        for v in &mut self.data {
            *v *= t;
        }
    }

    /// Entrywise map, keeping support and unit.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ScalarField {
        ScalarField {
            support: self.support,
            data: self.data.iter().map(|&v| f(v)).collect(),
            unit: self.unit.clone(),
        }
    }

    /// CSV dump, one row per support point: `x,y[,z],value`.
    pub fn to_csv(&self, mesh: &Mesh, name: &str) -> String {
        let mut out = String::new();
        let axes = ["x", "y", "z"];
        out.push_str(&format!("# unit: {}\n", self.unit));
        out.push_str(&axes[..mesh.dim()].join(","));
        out.push_str(&format!(",{name}\n"));
        for i in 0..self.data.len() {
            let x = match self.support {
                Support::Nodes => mesh.node(i),
                Support::Cells => mesh.centroid(i),
            };
            for v in x {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{}\n", self.data[i]));
        }
        out
    }
}

impl VectorField {
    pub fn zeros(mesh: &Mesh, support: Support) -> Self {
        let dim = mesh.dim();
        VectorField {
            support,
            dim,
            data: vec![0.0; expected_len(mesh, support) * dim],
            unit: "1".into(),
        }
    }

    pub fn check(&self, mesh: &Mesh) -> Result<(), MeshError> {
        let expected = expected_len(mesh, self.support) * self.dim;
        if self.data.len() != expected || self.dim != mesh.dim() {
            return Err(MeshError::FieldMismatch { expected, got: self.data.len() });
        }
        Ok(())
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn set(&mut self, i: usize, v: &[f64]) {
        self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(v);
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Euclidean magnitude as a scalar field on the same support.
    pub fn magnitude(&self) -> ScalarField {
        let data = (0..self.len())
            .map(|i| crate::sampling::norm2(self.get(i)))
            .collect();
        ScalarField { support: self.support, data, unit: self.unit.clone() }
    }

    /// Pointwise map through a scalar-valued function of the vector value.
    pub fn map_scalar<F: Fn(&[f64]) -> f64>(&self, f: F) -> ScalarField {
        let data = (0..self.len()).map(|i| f(self.get(i))).collect();
        ScalarField { support: self.support, data, unit: self.unit.clone() }
    }
}

impl MatrixField {
    pub fn zeros(mesh: &Mesh, support: Support) -> Self {
        let dim = mesh.dim();
        let n = expected_len(mesh, support);
        MatrixField {
            support,
            dim,
            data: vec![0.0; n * dim * dim],
            symmetric: false,
            valid: vec![true; n],
            unit: "1".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.data[i * s..(i + 1) * s]
    }

    pub fn entry(&self, i: usize, r: usize, c: usize) -> f64 {
        self.data[(i * self.dim + r) * self.dim + c]
    }

    pub fn set_entry(&mut self, i: usize, r: usize, c: usize, v: f64) {
        self.data[(i * self.dim + r) * self.dim + c] = v;
    }

    /// Squared Frobenius norm per entity; invalid entities map to 0.
    pub fn frobenius_sq(&self) -> ScalarField {
        let s = self.dim * self.dim;
        let data = (0..self.len())
            .map(|i| {
                if self.valid[i] {
                    self.data[i * s..(i + 1) * s].iter().map(|v| v * v).sum()
                } else {
                    0.0
                }
            })
            .collect();
        ScalarField { support: self.support, data, unit: self.unit.clone() }
    }

    pub fn symmetry_defect(&self, i: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..r {
                worst = worst.max((self.entry(i, r, c) - self.entry(i, c, r)).abs());
            }
        }
        worst
    }
}
