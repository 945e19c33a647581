//! Central finite differences, the cross-validation oracle for every analytic
//! derivative formula in the crate.
//!
//! Step size is `1e-5 * (1 + |x|)`, balancing truncation against roundoff at
//! f64 precision.

/// Finite-difference step at the point `x`.
pub fn step(x: &[f64]) -> f64 {
    1e-5 * (1.0 + crate::sampling::norm2(x))
}

/// Central-difference gradient of a scalar function.
pub fn central_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
    let h = step(x);
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Jacobian of a vector function, row `i` = d out_i / d x_j.
pub fn central_jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: F, x: &[f64]) -> Vec<Vec<f64>> {
    let h = step(x);
    let n = x.len();
    let m = f(x).len();
    let mut jac = vec![vec![0.0; n]; m];
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..m {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}
