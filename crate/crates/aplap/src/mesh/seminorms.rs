//! Sampled Morrey norms and Hölder norms.
//!
//! Both are suprema in the continuum; the sampled versions here are lower
//! bounds that can only grow as the sample set is enlarged, and the
//! verification layer always uses them on the side of an inequality where a
//! lower bound makes the check harder to pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{integrate, Mesh, MeshError, Region, ScalarField, VectorField};

/// Sampled Morrey norm
/// `sup over (center, rho) of [ rho^{-lambda} int_{B_rho} f^2 ]^{1/2}`
/// with `lambda in (n-2, n)`; only balls strictly inside the domain count.
pub fn morrey_norm(
    mesh: &Mesh,
    f: &ScalarField,
    lambda: f64,
    centers: &[Vec<f64>],
    radii: &[f64],
) -> Result<f64, MeshError> {
    let n = mesh.dim() as f64;
    if !(lambda > n - 2.0 && lambda < n) {
        return Err(MeshError::InvalidMorreyExponent { lambda, lo: n - 2.0, hi: n });
    }
    if centers.is_empty() || radii.is_empty() {
        return Err(MeshError::EmptySamples);
    }
    let f2 = f.map(|v| v * v);
    let mut best: f64 = 0.0;
    let mut used = 0usize;
    for c in centers {
        for &rho in radii {
            if !mesh.contains_ball_strictly(c, rho) {
                continue;
            }
            used += 1;
            let ball = Region::ball(mesh, c, rho)?;
            let v = integrate(mesh, &f2, &ball, None)?;
            best = best.max(rho.powf(-lambda) * v);
        }
    }
    if used == 0 {
        return Err(MeshError::RegionOutsideDomain);
    }
    Ok(best.sqrt())
}

/// Default Morrey sample protocol: seeded centers in the box plus the box
/// center, and a fixed geometric radius ladder independent of the mesh size.
pub fn default_morrey_samples(mesh: &Mesh, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let (lo, hi) = mesh.bounds();
    let extent: f64 = (0..mesh.dim()).map(|a| hi[a] - lo[a]).fold(f64::INFINITY, f64::min);
    let mut centers = crate::sampling::random_points_in_box(lo, hi, 48, seed);
    centers.push((0..mesh.dim()).map(|a| 0.5 * (lo[a] + hi[a])).collect());
    let radii: Vec<f64> = (0..5).map(|k| 0.45 * extent * 0.5f64.powi(k)).collect();
    (centers, radii)
}

/// Sampled Hölder norm `sup |F| + sup |F(x)-F(y)| / |x-y|^alpha` of a nodal
/// vector field over the nodes of a region. The sup term runs over all region
/// nodes; the seminorm term over `n_pairs` seeded node pairs (prefix-stable:
/// more pairs can only increase the value).
pub fn holder_norm(
    mesh: &Mesh,
    f: &VectorField,
    alpha: f64,
    region: &Region,
    n_pairs: usize,
    seed: u64,
) -> Result<f64, MeshError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(MeshError::InvalidExponent(alpha));
    }
    f.check(mesh)?;
    if f.support != super::Support::Nodes {
        return Err(MeshError::WrongSupport);
    }
    let inside: Vec<usize> =
        (0..mesh.n_nodes()).filter(|&i| region.contains_point(mesh.node(i))).collect();
    if inside.len() < 2 {
        return Err(MeshError::EmptyRegion);
    }
    let mut sup: f64 = 0.0;
    for &i in &inside {
        sup = sup.max(crate::sampling::norm2(f.get(i)));
    }
    let mut semi: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = mesh.dim();
    for _ in 0..n_pairs {
        let i = inside[rng.gen_range(0..inside.len())];
        let j = inside[rng.gen_range(0..inside.len())];
        if i == j {
            continue;
        }
        let (xi, xj) = (mesh.node(i), mesh.node(j));
        let mut d2 = 0.0;
        let mut df2 = 0.0;
        for a in 0..dim {
            d2 += (xi[a] - xj[a]).powi(2);
            df2 += (f.get(i)[a] - f.get(j)[a]).powi(2);
        }
        semi = semi.max(df2.sqrt() / d2.sqrt().powf(alpha));
    }
    Ok(sup + semi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Support;

    fn unit_square(n: usize) -> Mesh {
        Mesh::rectangle([0.0, 0.0], [1.0, 1.0], n, n).unwrap()
    }

    #[test]
    fn morrey_constant_field_closed_form() {
        // For f = c, the sampled value is max over admissible rho of
        // [ c^2 omega_n rho^{n-lambda} ]^{1/2}, attained at the largest rho.
        let m = unit_square(48);
        let f = ScalarField::from_fn(&m, Support::Nodes, |_| 2.0);
        let lambda = 1.5;
        let centers = vec![vec![0.5, 0.5]];
        let radii = vec![0.1, 0.2, 0.4];
        let v = morrey_norm(&m, &f, lambda, &centers, &radii).unwrap();
        let exact = (4.0 * std::f64::consts::PI * 0.4f64.powf(2.0 - lambda)).sqrt();
        assert!((v - exact).abs() < 0.01 * exact, "{v} vs {exact}");
        // Zero field.
        let z = ScalarField::zeros(&m, Support::Nodes);
        assert_eq!(morrey_norm(&m, &z, lambda, &centers, &radii).unwrap(), 0.0);
    }

    #[test]
    fn morrey_homogeneity_and_range_guard() {
        let m = unit_square(24);
        let f = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] - x[1].cos());
        let (centers, radii) = default_morrey_samples(&m, 5);
        let v1 = morrey_norm(&m, &f, 1.2, &centers, &radii).unwrap();
        let mut f3 = f.clone();
        f3.scale(-3.0);
        let v3 = morrey_norm(&m, &f3, 1.2, &centers, &radii).unwrap();
        assert!((v3 - 3.0 * v1).abs() < 1e-12 * v3);
        assert!(matches!(
            morrey_norm(&m, &f, 0.0, &centers, &radii),
            Err(MeshError::InvalidMorreyExponent { .. })
        ));
        assert!(matches!(
            morrey_norm(&m, &f, 2.0, &centers, &radii),
            Err(MeshError::InvalidMorreyExponent { .. })
        ));
    }

    #[test]
    fn morrey_grows_with_samples() {
        let m = unit_square(24);
        let f = ScalarField::from_fn(&m, Support::Nodes, |x| (7.0 * x[0]).sin());
        let (centers, radii) = default_morrey_samples(&m, 5);
        let few = morrey_norm(&m, &f, 1.3, &centers[..4], &radii).unwrap();
        let many = morrey_norm(&m, &f, 1.3, &centers, &radii).unwrap();
        assert!(many >= few);
    }

    #[test]
    fn holder_constant_and_identity_fields() {
        let m = unit_square(16);
        let whole = Region::whole(&m);
        // Constant field: seminorm part zero, value = sup |F|.
        let mut c = VectorField::zeros(&m, Support::Nodes);
        for i in 0..m.n_nodes() {
            c.set(i, &[3.0, 4.0]);
        }
        let v = holder_norm(&m, &c, 0.5, &whole, 500, 1).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
        // Identity field F(x) = x: quotient |x-y|^{1-alpha}, maximal at the
        // domain diameter.
        let mut idf = VectorField::zeros(&m, Support::Nodes);
        for i in 0..m.n_nodes() {
            idf.set(i, m.node(i));
        }
        let alpha = 0.5;
        let v = holder_norm(&m, &idf, alpha, &whole, 4000, 1).unwrap();
        let sup = 2.0f64.sqrt();
        let semi = 2.0f64.sqrt().powf(1.0 - alpha);
        assert!(v <= sup + semi + 1e-12);
        assert!(v > sup + 0.8 * semi, "{v} vs {}", sup + semi);
    }

    #[test]
    fn holder_monotone_in_samples() {
        let m = unit_square(16);
        let whole = Region::whole(&m);
        let mut f = VectorField::zeros(&m, Support::Nodes);
        for i in 0..m.n_nodes() {
            let x = m.node(i);
            f.set(i, &[(5.0 * x[0]).sin(), x[1] * x[1]]);
        }
        let a = holder_norm(&m, &f, 0.3, &whole, 200, 9).unwrap();
        let b = holder_norm(&m, &f, 0.3, &whole, 400, 9).unwrap();
        assert!(b >= a);
        assert!(matches!(holder_norm(&m, &f, 1.0, &whole, 10, 9), Err(MeshError::InvalidExponent(_))));
    }
}
