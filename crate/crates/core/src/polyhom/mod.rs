//! Homogeneous polynomials in two variables over an exact (Gaussian
//! rational) or floating (`Complex64`) coefficient field.
//!
//! The exact backend computes gcds by Euclid on the dehomogenized
//! polynomials and root multiplicities by square-free decomposition; its
//! roots are exact when they lie in ℚ(i) and approximate otherwise (see
//! [`Pt`]). The float backend finds roots by Aberth iteration, clusters them
//! into multiple roots and matches clusters within `Tol::root` for gcds.

mod parse;
mod poly;
mod roots;
mod scalar;
pub(crate) mod uni;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_hompoly, poly_from_json, poly_to_json, scalar_from_json, scalar_to_json};
pub use poly::{proportional_vecs, HomPoly, ProjPoint, Pt};
pub use roots::{aberth, clustered_roots, gcd_by_roots, roots, Root, RootList};
pub use scalar::{parse_rational, rational_approx, Backend, GaussRat, Scalar};

/// Numerical tolerances shared by the float code paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tol {
    /// Chordal distance below which two points are the same (ε_root).
    pub root: f64,
    /// Relative remainder accepted by float exact division.
    pub div: f64,
    /// Relative size below which a Taylor coefficient counts as zero.
    pub mult: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { root: 1e-8, div: 1e-8, mult: 1e-7 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("(0:0) is not a point of P^1")]
    ZeroPoint,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("division is not exact")]
    InexactDivision,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("value is not representable in the coefficient field")]
    NotRepresentable,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Greatest common divisor, normalized so its first nonzero coefficient is 1.
pub fn gcd<S: Scalar>(p: &HomPoly<S>, q: &HomPoly<S>, tol: &Tol) -> Result<HomPoly<S>, PolyError> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return Err(PolyError::ZeroPolynomial),
        (true, false) => return Ok(q.normalized()),
        (false, true) => return Ok(p.normalized()),
        _ => {}
    }
    match S::BACKEND {
        Backend::Exact => Ok(euclid_gcd(p, q)),
        Backend::Float => gcd_by_roots(p, q, tol),
    }
}

fn euclid_gcd<S: Scalar>(p: &HomPoly<S>, q: &HomPoly<S>) -> HomPoly<S> {
    let a = p.w_power().min(q.w_power());
    let g = uni::gcd(&p.dehomogenize(), &q.dehomogenize());
    let dg = uni::degree(&g).unwrap_or(0);
    let gh = HomPoly::homogenize(&g, dg).expect("degree fits");
    gh.mul(&HomPoly::monomial(a, a, S::one())).normalized()
}

/// `Π (w_i z - z_i w)^{m_i}` over native roots.
pub fn from_roots<S: Scalar>(rs: &RootList<S>) -> Result<HomPoly<S>, PolyError> {
    let mut out = HomPoly::one();
    for r in rs.iter() {
        let pt = r.point.native().ok_or(PolyError::NotRepresentable)?;
        out = out.mul(&HomPoly::vanishing_at(pt).pow(r.mult as u64));
    }
    Ok(out)
}
