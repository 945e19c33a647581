//! Integration regions: balls, annuli, or the whole domain, with per-cell
//! membership weights obtained by subsampling each cell.

use super::{Mesh, MeshError};

#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, r_in: f64, r_out: f64 },
    Whole,
}

/// A region with precomputed cell membership weights in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Region {
    kind: RegionKind,
    weights: Vec<f64>,
}

impl Region {
    pub fn whole(mesh: &Mesh) -> Region {
        Region { kind: RegionKind::Whole, weights: vec![1.0; mesh.n_cells()] }
    }

    pub fn ball(mesh: &Mesh, center: &[f64], radius: f64) -> Result<Region, MeshError> {
        if center.len() != mesh.dim() || !(radius > 0.0) {
            return Err(MeshError::InvalidParameter("bad ball parameters".into()));
        }
        let kind = RegionKind::Ball { center: center.to_vec(), radius };
        let weights = subsample_weights(mesh, &kind);
        Ok(Region { kind, weights })
    }

    pub fn annulus(
        mesh: &Mesh,
        center: &[f64],
        r_in: f64,
        r_out: f64,
    ) -> Result<Region, MeshError> {
        if center.len() != mesh.dim() || !(0.0 < r_in && r_in < r_out) {
            return Err(MeshError::InvalidParameter("bad annulus parameters".into()));
        }
        let kind = RegionKind::Annulus { center: center.to_vec(), r_in, r_out };
        let weights = subsample_weights(mesh, &kind);
        Ok(Region { kind, weights })
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn weight(&self, cell: usize) -> f64 {
        self.weights[cell]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Approximate measure of the region (sum of weighted cell volumes).
    pub fn measure(&self, mesh: &Mesh) -> f64 {
        let mut acc = 0.0;
        for c in 0..mesh.n_cells() {
            acc += self.weights[c] * mesh.volume(c);
        }
        acc
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        point_in_kind(&self.kind, x)
    }
}

fn point_in_kind(kind: &RegionKind, x: &[f64]) -> bool {
    match kind {
        RegionKind::Whole => true,
        RegionKind::Ball { center, radius } => dist(x, center) < *radius,
        RegionKind::Annulus { center, r_in, r_out } => {
            let d = dist(x, center);
            *r_in <= d && d < *r_out
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn subsample_weights(mesh: &Mesh, kind: &RegionKind) -> Vec<f64> {
    let dim = mesh.dim();
    let coords = Mesh::subsample_coords(dim);
    let mut weights = Vec::with_capacity(mesh.n_cells());
    let mut pt = vec![0.0; dim];
    for c in 0..mesh.n_cells() {
        let verts = mesh.cell_vertices(c);
        let x0 = mesh.node(verts[0]).to_vec();
        let mut inside = 0usize;
        for sc in &coords {
            for a in 0..dim {
                pt[a] = x0[a];
            }
            for (j, &w) in sc.iter().enumerate() {
                let xj = mesh.node(verts[j + 1]);
                for a in 0..dim {
                    pt[a] += w * (xj[a] - x0[a]);
                }
            }
            if point_in_kind(kind, &pt) {
                inside += 1;
            }
        }
        weights.push(inside as f64 / coords.len() as f64);
    }
    weights
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_area_matches_pi_r_squared() {
        // Grid-aligned case from the quadrature contract: radius 1/4 ball in
        // the unit square has area pi/16 up to O(h) subsampling error.
        let m = Mesh::rectangle([0.0, 0.0], [1.0, 1.0], 64, 64).unwrap();
        let r = Region::ball(&m, &[0.5, 0.5], 0.25).unwrap();
        assert!((r.measure(&m) - std::f64::consts::PI / 16.0).abs() < 3e-4);
        // Generic (incommensurate) ball: error decreases under refinement.
        let rad = 0.23 * std::f64::consts::SQRT_2;
        let exact = std::f64::consts::PI * rad * rad;
        let mut errs = Vec::new();
        for n in [8, 16, 64, 128] {
            let m = Mesh::rectangle([0.0, 0.0], [1.0, 1.0], n, n).unwrap();
            let r = Region::ball(&m, &[0.4871, 0.5313], rad).unwrap();
            errs.push((r.measure(&m) - exact).abs());
        }
        assert!(errs[3] < errs[0], "{errs:?}");
        assert!(errs[3] < 3e-4, "{errs:?}");
    }

    #[test]
    fn partition_ball_annulus() {
        let m = Mesh::rectangle([0.0, 0.0], [1.0, 1.0], 32, 32).unwrap();
        let b_inner = Region::ball(&m, &[0.5, 0.5], 0.2).unwrap();
        let ann = Region::annulus(&m, &[0.5, 0.5], 0.2, 0.4).unwrap();
        let b_outer = Region::ball(&m, &[0.5, 0.5], 0.4).unwrap();
        for c in 0..m.n_cells() {
            let sum = b_inner.weight(c) + ann.weight(c);
            assert!((sum - b_outer.weight(c)).abs() < 1e-14);
        }
    }

    #[test]
    fn whole_region_measure() {
        let m = Mesh::rectangle([0.0, 0.0], [2.0, 1.0], 8, 4).unwrap();
        assert!((Region::whole(&m).measure(&m) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn ball_volume_3d() {
        let m = Mesh::box3d([0.0; 3], [1.0; 3], [12, 12, 12]).unwrap();
        let r = Region::ball(&m, &[0.5; 3], 0.3).unwrap();
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 0.3f64.powi(3);
        assert!((r.measure(&m) - exact).abs() < 0.02 * exact);
    }
}
