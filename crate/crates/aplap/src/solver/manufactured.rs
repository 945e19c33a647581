//! Closed-form exact solutions used as convergence oracles.

use std::sync::Arc;

use super::{Boundary, SolveError, Source};
use crate::norms::{AnisotropicNorm, NormFamily};

/// An exact solution together with the source that induces it.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub p: f64,
    pub exact: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub exact_gradient: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    pub source: Source,
    requires_euclidean: bool,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ManufacturedCase({}, p={})", self.name, self.p)
    }
}

impl ManufacturedCase {
    /// Boundary data matching the exact solution.
    pub fn boundary(&self) -> Boundary {
        let exact = self.exact.clone();
        Boundary::Custom(Arc::new(move |x| exact(x)))
    }

    pub fn check_norm(&self, norm: &AnisotropicNorm) -> Result<(), SolveError> {
        if self.requires_euclidean && !matches!(norm.family(), NormFamily::Euclidean) {
            return Err(SolveError::RequiresEuclideanNorm);
        }
        Ok(())
    }
}

/// The radial solution of `-div(|grad u|^{p-2} grad u) = 1`:
///
/// ```text
/// u(x) = (p-1)/p * n^{-1/(p-1)} * ( R^{p/(p-1)} - |x - x0|^{p/(p-1)} ),
/// ```
///
/// with `|grad u| = (|x-x0|/n)^{1/(p-1)}` and the single critical point `x0`.
/// Valid only for the Euclidean norm.
pub fn manufactured_torsion(p: f64, dim: usize, center: Vec<f64>, radius: f64) -> ManufacturedCase {
    assert!(p > 1.0 && dim >= 2 && center.len() == dim && radius > 0.0);
    let n = dim as f64;
    let pc = p / (p - 1.0);
    let coef = (p - 1.0) / p * n.powf(-1.0 / (p - 1.0));
    let c1 = center.clone();
    let exact = move |x: &[f64]| {
        let r = dist(x, &c1);
        coef * (radius.powf(pc) - r.powf(pc))
    };
    let c2 = center.clone();
    let exact_gradient = move |x: &[f64]| {
        let r = dist(x, &c2);
        if r == 0.0 {
            return vec![0.0; x.len()];
        }
        let mag = n.powf(-1.0 / (p - 1.0)) * r.powf(1.0 / (p - 1.0));
        x.iter().zip(&c2).map(|(a, b)| -mag * (a - b) / r).collect()
    };
    ManufacturedCase {
        name: format!("torsion_p{p}"),
        p,
        exact: Arc::new(exact),
        exact_gradient: Arc::new(exact_gradient),
        source: Source::Constant(1.0),
        requires_euclidean: true,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
