//! The regularized stress map and its pointwise companions.
//!
//! For a norm `H`, exponent `p > 1` and regularization `eps in [0,1)`:
//!
//! ```text
//! a_eps(xi) = (eps^2 + H^2(xi))^{(p-2)/2} H(xi) grad H(xi),   a_eps(0) = 0,
//! ```
//!
//! which is the gradient of the profile `(eps^2+H^2(xi))^{p/2}/p`. At `eps=0`
//! this is the anisotropic stress `H^{p-1} grad H` whose divergence drives the
//! equation. Everything in this module is a pure pointwise map.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::norms::{profile_hessian, AnisotropicNorm, NormError};
use crate::sampling::dot;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("eps must lie in [0,1), got {0}")]
    InvalidEps(f64),
    #[error("exponent must satisfy p > 1, got {0}")]
    InvalidExponent(f64),
    #[error("profile argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("source truncation requires eps > 0")]
    TruncationUndefined,
    #[error("stress Jacobian undefined at the origin for eps = 0")]
    SingularOrigin,
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// The stress map of one `(H, p, eps)` triple.
#[derive(Debug, Clone)]
pub struct RegularizedOperator {
    norm: AnisotropicNorm,
    p: f64,
    eps: f64,
}

impl RegularizedOperator {
    pub fn new(norm: AnisotropicNorm, p: f64, eps: f64) -> Result<Self, OperatorError> {
        if !(p > 1.0) {
            return Err(OperatorError::InvalidExponent(p));
        }
        if !(0.0..1.0).contains(&eps) {
            return Err(OperatorError::InvalidEps(eps));
        }
        Ok(RegularizedOperator { norm, p, eps })
    }

    pub fn norm(&self) -> &AnisotropicNorm {
        &self.norm
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Same operator with a different regularization parameter.
    pub fn with_eps(&self, eps: f64) -> Result<Self, OperatorError> {
        RegularizedOperator::new(self.norm.clone(), self.p, eps)
    }

    /// Regularized profile `b_eps(t) = ((eps^2+t^2)^{p/2} - eps^p)/p`, `t >= 0`.
    ///
    /// Increasing and convex, with `b_0(t) = t^p/p`.
    pub fn b_eps(&self, t: f64) -> Result<f64, OperatorError> {
        if t < 0.0 {
            return Err(OperatorError::NegativeArgument(t));
        }
        let e = self.eps;
        Ok(((e * e + t * t).powf(self.p / 2.0) - e.powf(self.p)) / self.p)
    }

    /// `a_eps(xi)`; maps the origin to the origin.
    pub fn stress(&self, xi: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let h = self.norm.eval(xi)?;
        if h == 0.0 {
            return Ok(vec![0.0; xi.len()]);
        }
        let w = (self.eps * self.eps + h * h).powf((self.p - 2.0) / 2.0);
        let g = self.norm.grad(xi)?;
        Ok(g.iter().map(|gi| w * h * gi).collect())
    }

    /// Scalar magnitude `(eps^2+H^2(xi))^{(p-2)/2} H(xi)`, which equals the
    /// dual norm `H_0(a_eps(xi))` of the stress.
    pub fn stress_dual_magnitude(&self, xi: &[f64]) -> Result<f64, OperatorError> {
        let h = self.norm.eval(xi)?;
        Ok((self.eps * self.eps + h * h).powf((self.p - 2.0) / 2.0) * h)
    }

    /// Jacobian `A_eps(xi) = grad_xi a_eps(xi)`, symmetric positive definite
    /// away from the origin.
    ///
    /// The origin itself is a domain error except for ellipsoidal norms with
    /// `eps > 0`, where `a_eps` is differentiable at 0 with Jacobian
    /// `eps^{p-2} W` (`W` the quadratic form of the norm).
    pub fn stress_jacobian(&self, xi: &[f64]) -> Result<DMatrix<f64>, OperatorError> {
        let h = self.norm.eval(xi)?;
        if h == 0.0 {
            if self.eps == 0.0 {
                return Err(OperatorError::SingularOrigin);
            }
            return self.jacobian_at_origin();
        }
        Ok(profile_hessian(&self.norm, self.p, self.eps, xi)?)
    }

    fn jacobian_at_origin(&self) -> Result<DMatrix<f64>, OperatorError> {
        use crate::norms::NormFamily;
        let n = self.norm.dim();
        let scale = self.eps.powf(self.p - 2.0);
        match self.norm.family() {
            NormFamily::Euclidean => Ok(DMatrix::identity(n, n) * scale),
            NormFamily::WeightedEuclidean { weights } => {
                Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    n,
                    weights.iter().map(|w| w * scale),
                )))
            }
            // H^2 is not twice differentiable at 0 for general norms, so the
            // Jacobian genuinely does not exist there.
            NormFamily::PowerCombination { .. } => Err(OperatorError::SingularOrigin),
        }
    }

    /// Monotonicity gap `(a_eps(xi) - a_eps(eta)) . (xi - eta) >= 0`.
    ///
    /// For `p >= 2` the gap additionally dominates `gamma0 |xi-eta|^p` for
    /// some `gamma0 > 0`; the verification layer fits that constant
    /// empirically instead of assuming a value.
    pub fn monotonicity_gap(&self, xi: &[f64], eta: &[f64]) -> Result<f64, OperatorError> {
        let axi = self.stress(xi)?;
        let aeta = self.stress(eta)?;
        let mut acc = 0.0;
        for i in 0..xi.len() {
            acc += (axi[i] - aeta[i]) * (xi[i] - eta[i]);
        }
        Ok(acc)
    }
}

/// Pointwise truncation of a source value at level `1/eps`, sign-preserving.
pub fn truncate_value(f: f64, eps: f64) -> Result<f64, OperatorError> {
    if !(eps > 0.0) {
        return Err(OperatorError::TruncationUndefined);
    }
    let cap = 1.0 / eps;
    Ok(f.clamp(-cap, cap))
}

/// Truncate a whole sampled source field at level `1/eps`.
pub fn truncate_source(f_values: &[f64], eps: f64) -> Result<Vec<f64>, OperatorError> {
    if !(eps > 0.0) {
        return Err(OperatorError::TruncationUndefined);
    }
    let cap = 1.0 / eps;
    Ok(f_values.iter().map(|f| f.clamp(-cap, cap)).collect())
}

/// Fit the largest `gamma0` with `gap >= gamma0 |xi-eta|^p` over sample pairs
/// (meaningful for `p >= 2`). Returns the infimum of the observed quotients.
pub fn fit_gap_constant(
    op: &RegularizedOperator,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64, OperatorError> {
    let mut gamma = f64::INFINITY;
    for (xi, eta) in pairs {
        let d: Vec<f64> = xi.iter().zip(eta).map(|(a, b)| a - b).collect();
        let dn = crate::sampling::norm2(&d);
        if dn < 1e-12 {
            continue;
        }
        let gap = op.monotonicity_gap(xi, eta)?;
        gamma = gamma.min(gap / dn.powf(op.p()));
    }
    Ok(gamma)
}
