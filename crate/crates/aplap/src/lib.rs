//! Solver and verification harness for anisotropic p-Laplace equations
//!
//! ```text
//! -div( a(grad u) ) = f,      a(xi) = H^{p-1}(xi) grad H(xi),
//! ```
//! where `H` is a C^2 norm with uniformly convex unit ball. The equation is
//! the Euler-Lagrange equation of the convex energy `(1/p) int H^p(grad v) - int f v`,
//! and is solved here by minimizing an epsilon-regularized energy over a P1
//! finite element space, with continuation in epsilon.
//!
//! On top of the solver sits a verification layer ([`verify`]) that evaluates
//! both sides of the interior regularity estimates satisfied by the stress
//! field `a(grad u)` and the Hessian of `u` (Caccioppoli-type bounds, weighted
//! Hessian integrals, critical-set measures, divergence-potential bounds for
//! Morrey sources) and tracks the implied empirical constants across mesh
//! refinement, ball radii and source instances.
//!
//! Crate layout:
//! - [`norms`]: anisotropic norms, their derivatives, dual norms, ellipticity sampling
//! - [`operator`]: the regularized stress map `a_eps`, its Jacobian, source truncation
//! - [`mesh`]: structured simplicial meshes, fields, quadrature, recovery, seminorms
//! - [`solver`]: damped-Newton energy minimization, epsilon continuation, Poisson solve
//! - [`verify`]: estimate checks producing [`verify::EstimateReport`]s
//! - [`config`] / [`cli`]: flat key-value run configuration and the command entry points

pub mod cli;
pub mod config;
pub mod expr;
pub mod fd;
pub mod mesh;
pub mod norms;
pub mod operator;
pub mod sampling;
pub mod solver;
pub mod verify;
