//! Radial piecewise-linear cutoff functions: 1 on an inner ball, 0 outside an
//! outer ball, with gradient bounded by `1/(s-t)` up to a mesh-size term.

use super::{gradient, Mesh, MeshError, ScalarField, Support};

#[derive(Debug, Clone)]
pub struct CutoffFunction {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
    pub values: ScalarField,
}

/// Build the nodal interpolant of `clamp((s - d(x, center)) / (s - t), 0, 1)`.
///
/// Requires `t < s` and the outer ball strictly inside the domain.
pub fn make_cutoff(
    mesh: &Mesh,
    center: &[f64],
    t: f64,
    s: f64,
) -> Result<CutoffFunction, MeshError> {
    if !(t > 0.0) || t >= s {
        return Err(MeshError::InvalidCutoff { inner: t, outer: s });
    }
    if !mesh.contains_ball_strictly(center, s) {
        return Err(MeshError::RegionOutsideDomain);
    }
    let c = center.to_vec();
    let values = ScalarField::from_fn(mesh, Support::Nodes, |x| {
        let d = x
            .iter()
            .zip(&c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        ((s - d) / (s - t)).clamp(0.0, 1.0)
    });
    Ok(CutoffFunction { center: c, inner: t, outer: s, values })
}

impl CutoffFunction {
    /// Max of the discrete gradient magnitude over all cells.
    pub fn max_gradient(&self, mesh: &Mesh) -> Result<f64, MeshError> {
        let g = gradient(mesh, &self.values)?.magnitude();
        Ok(g.data.iter().cloned().fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_profile() {
        let m = Mesh::rectangle([0.0, 0.0], [1.0, 1.0], 32, 32).unwrap();
        let eta = make_cutoff(&m, &[0.5, 0.5], 0.1, 0.4).unwrap();
        for i in 0..m.n_nodes() {
            let x = m.node(i);
            let d = ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt();
            let v = eta.values.data[i];
            assert!((0.0..=1.0).contains(&v));
            if d <= 0.1 {
                assert_eq!(v, 1.0);
            }
            if d >= 0.4 {
                assert_eq!(v, 0.0);
            }
        }
        // Center node value.
        let center_node = (0..m.n_nodes())
            .find(|&i| (m.node(i)[0] - 0.5).abs() < 1e-12 && (m.node(i)[1] - 0.5).abs() < 1e-12)
            .unwrap();
        assert_eq!(eta.values.data[center_node], 1.0);
    }

    #[test]
    fn cutoff_gradient_bound_tightens_under_refinement() {
        let (t, s) = (0.1, 0.4);
        let bound = 1.0 / (s - t);
        let mut excess = Vec::new();
        for n in [16, 32, 64, 128] {
            let m = Mesh::rectangle([0.0, 0.0], [1.0, 1.0], n, n).unwrap();
            let eta = make_cutoff(&m, &[0.5, 0.5], t, s).unwrap();
            let mg = eta.max_gradient(&m).unwrap();
            excess.push((mg - bound).max(0.0));
            // (1 + mesh-size tolerance) / (s - t): curvature of the radial
            // distance contributes O(h/t).
            assert!(mg <= bound * (1.0 + 6.0 * m.h() / t), "n={n}: {mg} vs {bound}");
        }
        assert!(excess.last().unwrap() < excess.first().unwrap());
    }

    #[test]
    fn cutoff_validation() {
        let m = Mesh::rectangle([0.0, 0.0], [1.0, 1.0], 8, 8).unwrap();
        assert!(matches!(
            make_cutoff(&m, &[0.5, 0.5], 0.3, 0.2),
            Err(MeshError::InvalidCutoff { .. })
        ));
        assert!(matches!(
            make_cutoff(&m, &[0.5, 0.5], 0.3, 0.6),
            Err(MeshError::RegionOutsideDomain)
        ));
    }
}
