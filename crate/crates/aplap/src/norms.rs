//! Anisotropic norms `H` on R^n and the quantities derived from them.
//!
//! Every norm here is 1-homogeneous, C^2 away from the origin, and has a
//! uniformly convex unit ball, so the composed profile `(eps^2 + H^2)^{p/2}/p`
//! satisfies a two-sided ellipticity bound
//!
//! ```text
//! lambda |eta|^2 <= < D^2_xi ((eps^2+H^2)^{p/2}/p) eta, eta > / (eps^2+|xi|^2)^{(p-2)/2} <= Lambda |eta|^2 .
//! ```
//!
//! Three families are built in: the Euclidean norm, diagonally weighted
//! Euclidean norms, and power combinations `(a H_s^m + b H_t^m)^{1/m}` of two
//! base norms. All three have analytic gradients and Hessians; dual norms are
//! closed-form for the first two and computed by constrained maximization for
//! power combinations.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::sampling::{dot, norm2, unit_directions};

#[derive(Debug, Error, PartialEq)]
pub enum NormError {
    #[error("vector has dimension {got}, norm expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation undefined at the origin")]
    ZeroVector,
    #[error("sample list is empty")]
    EmptySamples,
    #[error("exponent must satisfy p > 1, got {0}")]
    InvalidExponent(f64),
    #[error("degenerate (zero) sample vector at index {0}")]
    DegenerateSample(usize),
    #[error("invalid norm parameter: {0}")]
    InvalidParameter(String),
}

/// One of the built-in norm families.
#[derive(Debug, Clone)]
pub enum NormFamily {
    Euclidean,
    /// `H(xi) = sqrt(sum w_i xi_i^2)` with positive weights.
    WeightedEuclidean { weights: Vec<f64> },
    /// `H(xi) = (a H_sharp^m(xi) + b H_star^m(xi))^{1/m}`.
    ///
    /// `H_sharp` must itself have a uniformly convex unit ball (all built-in
    /// families do); `H_star` only needs to be a C^2 norm.
    PowerCombination {
        sharp: Box<AnisotropicNorm>,
        star: Box<AnisotropicNorm>,
        a: f64,
        b: f64,
        exponent: f64,
    },
}

/// A norm on R^n together with its derivative and duality structure.
#[derive(Debug, Clone)]
pub struct AnisotropicNorm {
    dim: usize,
    family: NormFamily,
}

/// Sampled ellipticity bounds for the regularized profile of `(H, p, eps)`.
///
/// `lambda_min <= lambda_max` sandwich the eigenvalues of the profile Hessian
/// divided by `(eps^2+|xi|^2)^{(p-2)/2}`; `growth_lower`/`growth_upper` are
/// the corresponding lower-eigenvalue and entrywise-sum growth bounds. All
/// four are empirical (min/max over the sample set), not certified: enlarging
/// the sample set can only shrink `lambda_min` and grow `lambda_max`.
#[derive(Debug, Clone, Copy)]
pub struct EllipticityConstants {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub growth_lower: f64,
    pub growth_upper: f64,
    pub sample_count: usize,
}

/// Number of coarse grid directions used before local ascent (2D / 3D).
const DUAL_GRID_2D: usize = 720;
const DUAL_ASCENT_ITERS: usize = 20;

impl AnisotropicNorm {
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim >= 2);
        AnisotropicNorm { dim, family: NormFamily::Euclidean }
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self, NormError> {
        if weights.len() < 2 {
            return Err(NormError::InvalidParameter("need at least 2 weights".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(NormError::InvalidParameter("weights must be positive and finite".into()));
        }
        Ok(AnisotropicNorm { dim: weights.len(), family: NormFamily::WeightedEuclidean { weights } })
    }

    pub fn power_combination(
        sharp: AnisotropicNorm,
        star: AnisotropicNorm,
        a: f64,
        b: f64,
        exponent: f64,
    ) -> Result<Self, NormError> {
        if sharp.dim != star.dim {
            return Err(NormError::DimensionMismatch { expected: sharp.dim, got: star.dim });
        }
        if !(a > 0.0) || !(b > 0.0) {
            return Err(NormError::InvalidParameter("combination weights a, b must be positive".into()));
        }
        if !(exponent > 1.0) {
            return Err(NormError::InvalidExponent(exponent));
        }
        let dim = sharp.dim;
        Ok(AnisotropicNorm {
            dim,
            family: NormFamily::PowerCombination {
                sharp: Box::new(sharp),
                star: Box::new(star),
                a,
                b,
                exponent,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    /// All built-in families carry analytic gradient/Hessian formulas.
    pub fn has_analytic_derivatives(&self) -> bool {
        true
    }

    /// True when the dual norm is evaluated by a closed form rather than by
    /// maximization over the unit sphere.
    pub fn has_analytic_dual(&self) -> bool {
        matches!(self.family, NormFamily::Euclidean | NormFamily::WeightedEuclidean { .. })
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            NormFamily::Euclidean => "euclidean",
            NormFamily::WeightedEuclidean { .. } => "weighted",
            NormFamily::PowerCombination { .. } => "power",
        }
    }

    fn check_dim(&self, xi: &[f64]) -> Result<(), NormError> {
        if xi.len() != self.dim {
            return Err(NormError::DimensionMismatch { expected: self.dim, got: xi.len() });
        }
        Ok(())
    }

    /// `H(xi)`.
    pub fn eval(&self, xi: &[f64]) -> Result<f64, NormError> {
        self.check_dim(xi)?;
        Ok(self.eval_unchecked(xi))
    }

    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> f64 {
        match &self.family {
            NormFamily::Euclidean => norm2(xi),
            NormFamily::WeightedEuclidean { weights } => xi
                .iter()
                .zip(weights)
                .map(|(x, w)| w * x * x)
                .sum::<f64>()
                .sqrt(),
            NormFamily::PowerCombination { sharp, star, a, b, exponent } => {
                let hs = sharp.eval_unchecked(xi);
                let ht = star.eval_unchecked(xi);
                (a * hs.powf(*exponent) + b * ht.powf(*exponent)).powf(1.0 / exponent)
            }
        }
    }

    /// `grad H(xi)` for `xi != 0`. 0-homogeneous and satisfies the Euler
    /// identity `grad H(xi) . xi = H(xi)`.
    pub fn grad(&self, xi: &[f64]) -> Result<Vec<f64>, NormError> {
        self.check_dim(xi)?;
        if norm2(xi) == 0.0 {
            return Err(NormError::ZeroVector);
        }
        Ok(self.grad_unchecked(xi))
    }

    fn grad_unchecked(&self, xi: &[f64]) -> Vec<f64> {
        match &self.family {
            NormFamily::Euclidean => {
                let h = norm2(xi);
                xi.iter().map(|x| x / h).collect()
            }
            NormFamily::WeightedEuclidean { weights } => {
                let h = self.eval_unchecked(xi);
                xi.iter().zip(weights).map(|(x, w)| w * x / h).collect()
            }
            NormFamily::PowerCombination { sharp, star, a, b, exponent } => {
                // grad H = G^{1/m-1} (a Hs^{m-1} grad Hs + b Ht^{m-1} grad Ht),
                // G = a Hs^m + b Ht^m.
                let m = *exponent;
                let hs = sharp.eval_unchecked(xi);
                let ht = star.eval_unchecked(xi);
                let gs = sharp.grad_unchecked(xi);
                let gt = star.grad_unchecked(xi);
                let g = a * hs.powf(m) + b * ht.powf(m);
                let scale = g.powf(1.0 / m - 1.0);
                let (ca, cb) = (a * hs.powf(m - 1.0), b * ht.powf(m - 1.0));
                gs.iter()
                    .zip(&gt)
                    .map(|(s, t)| scale * (ca * s + cb * t))
                    .collect()
            }
        }
    }

    /// `Hess H(xi)` for `xi != 0`. Symmetric, positive semidefinite, and
    /// annihilates the radial direction: `Hess H(xi) xi = 0`.
    pub fn hess(&self, xi: &[f64]) -> Result<DMatrix<f64>, NormError> {
        self.check_dim(xi)?;
        if norm2(xi) == 0.0 {
            return Err(NormError::ZeroVector);
        }
        Ok(self.hess_unchecked(xi))
    }

    fn hess_unchecked(&self, xi: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        match &self.family {
            NormFamily::Euclidean => {
                let h = norm2(xi);
                let mut m = DMatrix::identity(n, n) / h;
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] -= xi[i] * xi[j] / (h * h * h);
                    }
                }
                m
            }
            NormFamily::WeightedEuclidean { weights } => {
                let h = self.eval_unchecked(xi);
                let wx: Vec<f64> = xi.iter().zip(weights).map(|(x, w)| w * x).collect();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = weights[i] / h;
                    for j in 0..n {
                        m[(i, j)] -= wx[i] * wx[j] / (h * h * h);
                    }
                }
                m
            }
            NormFamily::PowerCombination { sharp, star, a, b, exponent } => {
                // With S = a Hs^{m-1} grad Hs + b Ht^{m-1} grad Ht and G = a Hs^m + b Ht^m:
                //   Hess H = (1-m) G^{1/m-2} S S^T + G^{1/m-1} grad S.
                let m = *exponent;
                let hs = sharp.eval_unchecked(xi);
                let ht = star.eval_unchecked(xi);
                let gs = sharp.grad_unchecked(xi);
                let gt = star.grad_unchecked(xi);
                let hss = sharp.hess_unchecked(xi);
                let hst = star.hess_unchecked(xi);
                let g = a * hs.powf(m) + b * ht.powf(m);
                let s: Vec<f64> = gs
                    .iter()
                    .zip(&gt)
                    .map(|(p, q)| a * hs.powf(m - 1.0) * p + b * ht.powf(m - 1.0) * q)
                    .collect();
                let mut out = DMatrix::zeros(n, n);
                let c0 = (1.0 - m) * g.powf(1.0 / m - 2.0);
                let c1 = g.powf(1.0 / m - 1.0);
                for i in 0..n {
                    for j in 0..n {
                        let grad_s = a
                            * ((m - 1.0) * hs.powf(m - 2.0) * gs[i] * gs[j]
                                + hs.powf(m - 1.0) * hss[(i, j)])
                            + b * ((m - 1.0) * ht.powf(m - 2.0) * gt[i] * gt[j]
                                + ht.powf(m - 1.0) * hst[(i, j)]);
                        out[(i, j)] = c0 * s[i] * s[j] + c1 * grad_s;
                    }
                }
                // Exact symmetry regardless of rounding in the assembly above.
                let sym = (out.clone() + out.transpose()) * 0.5;
                sym
            }
        }
    }

    /// Dual norm `H_0(x) = sup_{xi != 0} x.xi / H(xi)`.
    ///
    /// Closed form for Euclidean and weighted Euclidean norms; otherwise a
    /// coarse direction grid followed by local ascent. The returned value
    /// dominates `x.xi / H(xi)` for every probed direction by construction.
    pub fn dual_eval(&self, x: &[f64]) -> Result<f64, NormError> {
        self.check_dim(x)?;
        if norm2(x) == 0.0 {
            return Ok(0.0);
        }
        match &self.family {
            NormFamily::Euclidean => Ok(norm2(x)),
            NormFamily::WeightedEuclidean { weights } => Ok(x
                .iter()
                .zip(weights)
                .map(|(v, w)| v * v / w)
                .sum::<f64>()
                .sqrt()),
            NormFamily::PowerCombination { .. } => Ok(self.dual_by_maximization(x)),
        }
    }

    /// Maximize `phi(d) = x.d / H(d)` over unit directions.
    fn dual_by_maximization(&self, x: &[f64]) -> f64 {
        let phi = |d: &[f64]| dot(x, d) / self.eval_unchecked(d);
        match self.dim {
            2 => {
                let n = DUAL_GRID_2D;
                let mut best_k = 0;
                let mut best = f64::NEG_INFINITY;
                let angle = |k: f64| 2.0 * std::f64::consts::PI * k / n as f64;
                for k in 0..n {
                    let t = angle(k as f64);
                    let v = phi(&[t.cos(), t.sin()]);
                    if v > best {
                        best = v;
                        best_k = k;
                    }
                }
                // Golden-section refinement of the bracketing arc.
                let mut lo = angle(best_k as f64 - 1.0);
                let mut hi = angle(best_k as f64 + 1.0);
                let eval_angle = |t: f64| phi(&[t.cos(), t.sin()]);
                let inv_phi = 0.618_033_988_749_894_9;
                let mut c = hi - inv_phi * (hi - lo);
                let mut d = lo + inv_phi * (hi - lo);
                let (mut fc, mut fd) = (eval_angle(c), eval_angle(d));
                for _ in 0..DUAL_ASCENT_ITERS {
                    if fc > fd {
                        hi = d;
                        d = c;
                        fd = fc;
                        c = hi - inv_phi * (hi - lo);
                        fc = eval_angle(c);
                    } else {
                        lo = c;
                        c = d;
                        fc = fd;
                        d = lo + inv_phi * (hi - lo);
                        fd = eval_angle(d);
                    }
                }
                best.max(fc).max(fd)
            }
            _ => {
                let grid = icosphere_directions(3);
                let mut best = f64::NEG_INFINITY;
                let mut d = grid[0].clone();
                for dir in &grid {
                    let v = phi(dir);
                    if v > best {
                        best = v;
                        d = dir.clone();
                    }
                }
                // Derivative-free pattern search on the sphere.
                let mut step = 0.05;
                for _ in 0..DUAL_ASCENT_ITERS {
                    let (t1, t2) = tangent_basis(&d);
                    let mut improved = false;
                    for dir in [&t1, &t2] {
                        for sgn in [1.0, -1.0] {
                            let mut cand: Vec<f64> = d
                                .iter()
                                .zip(dir.iter())
                                .map(|(a, b)| a + sgn * step * b)
                                .collect();
                            let nc = norm2(&cand);
                            for c in &mut cand {
                                *c /= nc;
                            }
                            let v = phi(&cand);
                            if v > best {
                                best = v;
                                d = cand;
                                improved = true;
                            }
                        }
                    }
                    if !improved {
                        step *= 0.25;
                    }
                }
                best
            }
        }
    }

    /// Max over `samples` of `|H_0(grad H(xi)) - 1|`, the deviation from the
    /// gradient/dual identity that characterizes norm duality.
    pub fn verify_dual_identity(&self, samples: &[Vec<f64>]) -> Result<f64, NormError> {
        if samples.is_empty() {
            return Err(NormError::EmptySamples);
        }
        let mut worst: f64 = 0.0;
        for (k, xi) in samples.iter().enumerate() {
            self.check_dim(xi)?;
            if norm2(xi) == 0.0 {
                return Err(NormError::DegenerateSample(k));
            }
            let g = self.grad_unchecked(xi);
            let d = self.dual_eval(&g)?;
            worst = worst.max((d - 1.0).abs());
        }
        Ok(worst)
    }

    /// A certified constant `alpha` with `|xi| <= alpha H(xi)` for all `xi`.
    ///
    /// Closed form for the ellipsoidal families, otherwise the sampled
    /// maximum of `|xi|/H(xi)` over the unit sphere inflated by 1%.
    pub fn certified_alpha(&self) -> f64 {
        match &self.family {
            NormFamily::Euclidean => 1.0,
            NormFamily::WeightedEuclidean { weights } => {
                1.0 / weights.iter().cloned().fold(f64::INFINITY, f64::min).sqrt()
            }
            NormFamily::PowerCombination { .. } => 1.01 / self.sphere_range().0,
        }
    }

    /// A certified constant `gamma` with `H(xi) <= gamma |xi|` for all `xi`.
    pub fn certified_gamma(&self) -> f64 {
        match &self.family {
            NormFamily::Euclidean => 1.0,
            NormFamily::WeightedEuclidean { weights } => {
                weights.iter().cloned().fold(0.0f64, f64::max).sqrt()
            }
            NormFamily::PowerCombination { .. } => 1.01 * self.sphere_range().1,
        }
    }

    /// (min, max) of `H` over the Euclidean unit sphere, by dense sampling.
    fn sphere_range(&self) -> (f64, f64) {
        let dirs = if self.dim == 2 {
            unit_directions(2, 4096)
        } else {
            icosphere_directions(3)
        };
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for d in &dirs {
            let h = self.eval_unchecked(d);
            lo = lo.min(h);
            hi = hi.max(h);
        }
        (lo, hi)
    }
}

/// Hessian of the regularized profile `xi -> (eps^2 + H^2(xi))^{p/2} / p`
/// at `xi != 0`.
///
/// With `m(t) = (eps^2+t^2)^{(p-2)/2} t` this is
/// `m'(H) grad H grad H^T + m(H) Hess H`, assembled by the chain rule.
pub fn profile_hessian(
    norm: &AnisotropicNorm,
    p: f64,
    eps: f64,
    xi: &[f64],
) -> Result<DMatrix<f64>, NormError> {
    if !(p > 1.0) {
        return Err(NormError::InvalidExponent(p));
    }
    let h = norm.eval(xi)?;
    if h == 0.0 {
        return Err(NormError::ZeroVector);
    }
    let g = norm.grad_unchecked(xi);
    let hess = norm.hess_unchecked(xi);
    let s = eps * eps + h * h;
    let m = s.powf((p - 2.0) / 2.0) * h;
    let mprime = s.powf((p - 4.0) / 2.0) * ((p - 1.0) * h * h + eps * eps);
    let n = norm.dim();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = mprime * g[i] * g[j] + m * hess[(i, j)];
        }
    }
    Ok(out)
}

/// Sampled ellipticity constants of the regularized profile of `(H, p, eps)`.
///
/// For each sample `xi` the eigenvalues of the profile Hessian are divided by
/// the weight `(eps^2+|xi|^2)^{(p-2)/2}` and min/max are accumulated. For
/// `eps = 0` the quotient is 0-homogeneous, so unit-sphere samples suffice;
/// for `eps > 0` the caller should mix magnitudes (see [`ellipticity_samples`]).
pub fn estimate_ellipticity(
    norm: &AnisotropicNorm,
    p: f64,
    eps: f64,
    samples: &[Vec<f64>],
) -> Result<EllipticityConstants, NormError> {
    if !(p > 1.0) {
        return Err(NormError::InvalidExponent(p));
    }
    if samples.is_empty() {
        return Err(NormError::EmptySamples);
    }
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max: f64 = 0.0;
    let mut growth_upper: f64 = 0.0;
    for (k, xi) in samples.iter().enumerate() {
        if norm2(xi) == 0.0 {
            return Err(NormError::DegenerateSample(k));
        }
        let a = profile_hessian(norm, p, eps, xi)?;
        let w = (eps * eps + dot(xi, xi)).powf((p - 2.0) / 2.0);
        let eigs = a.clone().symmetric_eigen().eigenvalues;
        for e in eigs.iter() {
            lambda_min = lambda_min.min(e / w);
            lambda_max = lambda_max.max(e / w);
        }
        let entry_sum: f64 = a.iter().map(|v| v.abs()).sum();
        growth_upper = growth_upper.max(entry_sum / w);
    }
    Ok(EllipticityConstants {
        lambda_min,
        lambda_max,
        growth_lower: lambda_min,
        growth_upper,
        sample_count: samples.len(),
    })
}

/// Default ellipticity sample set: quasi-uniform directions, crossed with a
/// logarithmic magnitude ladder when `eps > 0` (the quotient then depends on
/// `|xi|/eps`).
pub fn ellipticity_samples(dim: usize, eps: f64, count: usize) -> Vec<Vec<f64>> {
    if eps == 0.0 {
        return unit_directions(dim, count);
    }
    let n_radii = 32usize;
    let n_dirs = (count / n_radii).max(8);
    let dirs = unit_directions(dim, n_dirs);
    let lo = (eps * 1e-2).max(1e-9).ln();
    let hi = (eps * 1e2).max(10.0).ln();
    let mut out = Vec::with_capacity(n_dirs * n_radii);
    for k in 0..n_radii {
        let r = (lo + (hi - lo) * (k as f64 + 0.5) / n_radii as f64).exp();
        for d in &dirs {
            out.push(d.iter().map(|x| x * r).collect());
        }
    }
    out
}

/// Orthonormal tangent basis at a unit vector in R^3.
fn tangent_basis(d: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pick = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut t1 = vec![
        pick[1] * d[2] - pick[2] * d[1],
        pick[2] * d[0] - pick[0] * d[2],
        pick[0] * d[1] - pick[1] * d[0],
    ];
    let n1 = norm2(&t1);
    for x in &mut t1 {
        *x /= n1;
    }
    let t2 = vec![
        d[1] * t1[2] - d[2] * t1[1],
        d[2] * t1[0] - d[0] * t1[2],
        d[0] * t1[1] - d[1] * t1[0],
    ];
    (t1, t2)
}

/// Face-centroid directions of an icosphere with `20 * 4^level` faces
/// (level 3 gives 1280 faces).
pub fn icosphere_directions(level: usize) -> Vec<Vec<f64>> {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    for v in &mut verts {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        v[0] /= n;
        v[1] /= n;
        v[2] /= n;
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    use std::collections::HashMap;
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let m = [
                        (verts[a][0] + verts[b][0]) / 2.0,
                        (verts[a][1] + verts[b][1]) / 2.0,
                        (verts[a][2] + verts[b][2]) / 2.0,
                    ];
                    let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                    verts.push([m[0] / n, m[1] / n, m[2] / n]);
                    verts.len() - 1
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        faces = next;
    }
    faces
        .iter()
        .map(|f| {
            let mut c = [0.0f64; 3];
            for &v in f {
                c[0] += verts[v][0];
                c[1] += verts[v][1];
                c[2] += verts[v][2];
            }
            let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            vec![c[0] / n, c[1] / n, c[2] / n]
        })
        .collect()
}
