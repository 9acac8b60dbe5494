//! Points of the compactification Ratbar_d: pairs `(P:Q)` of degree-d forms
//! up to scale, factored as `f = H_f·φ_f` with `H_f = gcd(P,Q)`.
//!
//! Iterates are built from the product formula
//! `fⁿ = Π_{k<n} (H_f∘φ^k)^{d^{n-k-1}} · φⁿ`, and hole lists of iterates and
//! compositions are assembled from preimages of the holes of `f` rather than
//! by root-finding the (large) gcd part.

mod map;
mod mobius;

use serde_json::{json, Value};
use thiserror::Error;

use crate::polyhom::{
    gcd, parse_hompoly, poly_from_json, poly_to_json, proportional_vecs, roots, Backend, HomPoly, PolyError,
    ProjPoint, Pt, RootList, Scalar, Tol,
};

pub use map::RatMap;
pub use mobius::Mobius;

/// Largest degree `dⁿ` for which iterates are materialized.
pub const DEFAULT_DEGREE_BUDGET: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RatbarError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("P and Q are both zero")]
    BothZero,
    #[error("point lies in the indeterminacy locus I(d)")]
    Indeterminate,
    #[error("pair lies in I(d,e): phi_g is constant at a hole of f")]
    CompositionIndeterminate,
    #[error("degree {degree} exceeds the budget {budget}")]
    DegreeBudget { degree: u128, budget: usize },
    #[error("Mobius matrix is singular")]
    SingularMobius,
    #[error("integer overflow in depth arithmetic")]
    Overflow,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// A point `f = H_f·φ_f` of Ratbar_d.
#[derive(Clone, Debug)]
pub struct RatbarPoint<S> {
    degree: usize,
    p: HomPoly<S>,
    q: HomPoly<S>,
    h: HomPoly<S>,
    phi: RatMap<S>,
    holes: RootList<S>,
    tol: Tol,
}

impl<S: Scalar> RatbarPoint<S> {
    pub fn normalize(p: HomPoly<S>, q: HomPoly<S>) -> Result<Self, RatbarError> {
        Self::normalize_with(p, q, Tol::default())
    }

    pub fn normalize_with(p: HomPoly<S>, q: HomPoly<S>, tol: Tol) -> Result<Self, RatbarError> {
        if p.degree() != q.degree() {
            return Err(PolyError::DegreeMismatch { expected: p.degree(), found: q.degree() }.into());
        }
        if p.is_zero() && q.is_zero() {
            return Err(RatbarError::BothZero);
        }
        let h = gcd(&p, &q, &tol)?;
        let phi = RatMap::new(p.divide_exact(&h, &tol)?, q.divide_exact(&h, &tol)?);
        let holes = if h.degree() == 0 { RootList::default() } else { roots(&h, &tol)? };
        Ok(Self::assemble(p.degree(), h, phi, holes, tol))
    }

    /// `H·φ` with `H = Π (linear form at h)^{depth}` over `holes`. The caller
    /// guarantees that `φ.p` and `φ.q` have no common root.
    pub fn from_factored(phi: RatMap<S>, holes: RootList<S>, tol: Tol) -> Result<Self, RatbarError> {
        if phi.p.is_zero() && phi.q.is_zero() {
            return Err(RatbarError::BothZero);
        }
        let mut h = HomPoly::one();
        for r in holes.iter() {
            let pt = r.point.native().ok_or(PolyError::NotRepresentable)?;
            h = h.mul(&HomPoly::vanishing_at(pt).pow(r.mult as u64));
        }
        Ok(Self::assemble(phi.degree() + h.degree(), h, phi, holes, tol))
    }

    /// Parse shorthand components, e.g. `("zw", "z^2")`.
    pub fn parse(p: &str, q: &str, degree: Option<usize>, params: &[(&str, S)]) -> Result<Self, RatbarError> {
        let (pp, qq) = parse_pair(p, q, degree, params)?;
        Self::normalize(pp, qq)
    }

    /// Build from an unnormalized gcd part and reduced map; `P = H·φ_P`.
    fn assemble(degree: usize, h_raw: HomPoly<S>, phi: RatMap<S>, holes: RootList<S>, tol: Tol) -> Self {
        let lead = h_raw.leading_nonzero().cloned().unwrap_or_else(S::one);
        let h = h_raw.normalized();
        let phi = RatMap::new(phi.p.scale(&lead), phi.q.scale(&lead));
        let p = h.mul(&phi.p);
        let q = h.mul(&phi.q);
        debug_assert_eq!(p.degree(), degree);
        RatbarPoint { degree, p, q, h, phi, holes, tol }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn p(&self) -> &HomPoly<S> {
        &self.p
    }

    pub fn q(&self) -> &HomPoly<S> {
        &self.q
    }

    /// The gcd part `H_f`, normalized.
    pub fn h(&self) -> &HomPoly<S> {
        &self.h
    }

    pub fn phi(&self) -> &RatMap<S> {
        &self.phi
    }

    pub fn holes(&self) -> &RootList<S> {
        &self.holes
    }

    pub fn tol(&self) -> &Tol {
        &self.tol
    }

    pub fn with_tol(mut self, tol: Tol) -> Self {
        self.tol = tol;
        self
    }

    /// True for points of the boundary ∂Rat_d (at least one hole).
    pub fn is_degenerate(&self) -> bool {
        self.h.degree() > 0
    }

    /// Depth `d_z(f)`; zero away from the holes.
    pub fn depth_at(&self, z: &Pt<S>) -> usize {
        self.holes.mult_at(z, &self.tol)
    }

    /// The hole equal to `z` within tolerance, if any.
    pub fn snap_to_hole(&self, z: &Pt<S>) -> Option<Pt<S>> {
        self.holes.find(z, &self.tol).map(|r| r.point.clone())
    }

    /// `φ_f` constant with value at a hole.
    pub fn in_indeterminacy(&self) -> bool {
        match self.phi.constant_value() {
            Some(c) => self.depth_at(&Pt::Native(c)) > 0,
            None => false,
        }
    }

    /// Projective equality of the pairs `(P, Q)`.
    pub fn proj_eq(&self, o: &Self) -> bool {
        if self.degree != o.degree {
            return false;
        }
        let a: Vec<S> = self.p.coeffs().iter().chain(self.q.coeffs()).cloned().collect();
        let b: Vec<S> = o.p.coeffs().iter().chain(o.q.coeffs()).cloned().collect();
        proportional_vecs(&a, &b, &self.tol)
    }

    pub fn iterate(&self, n: usize) -> Result<Self, RatbarError> {
        self.iterate_within(n, DEFAULT_DEGREE_BUDGET)
    }

    /// `fⁿ` by the product formula, refusing degrees above `budget`.
    pub fn iterate_within(&self, n: usize, budget: usize) -> Result<Self, RatbarError> {
        if n == 0 {
            return Err(RatbarError::Invalid("iterate needs n >= 1".into()));
        }
        if self.in_indeterminacy() {
            return Err(RatbarError::Indeterminate);
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let dn = checked_pow(self.degree as u128, n)?;
        if dn > budget as u128 {
            return Err(RatbarError::DegreeBudget { degree: dn, budget });
        }
        let d = self.degree;
        let mut phik = RatMap::identity();
        let mut h_n = HomPoly::one();
        for k in 0..n {
            let pulled = self.h.substitute(&phik.p, &phik.q)?;
            h_n = h_n.mul(&pulled.pow(d.pow((n - k - 1) as u32) as u64));
            phik = self.phi.compose(&phik)?;
        }
        let holes = self.iterate_holes(n)?;
        Ok(Self::assemble(dn as usize, h_n, phik, holes, self.tol))
    }

    /// Holes of `fⁿ`: each `y` with `φ^k(y) = h` contributes
    /// `d^{n-1-k} m_y(φ^k) d_h(f)`.
    pub fn iterate_holes(&self, n: usize) -> Result<RootList<S>, RatbarError> {
        let d = self.degree;
        let mut out = RootList::default();
        let mut level = self.holes.clone();
        for k in 0..n {
            let weight = d.pow((n - 1 - k) as u32);
            out.merge(level.clone(), weight, &self.tol);
            if k + 1 < n {
                level = self.preimage_level(&level)?;
                if level.is_empty() {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Pull a weighted point set back one step under `φ`.
    pub fn preimage_level(&self, level: &RootList<S>) -> Result<RootList<S>, RatbarError> {
        let mut next = RootList::default();
        for r in level.iter() {
            for (y, m) in self.phi.preimages(&r.point, &self.tol)? {
                next.add(y, m * r.mult, &self.tol);
            }
        }
        Ok(next)
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &Self) -> Result<Self, RatbarError> {
        self.compose_within(g, DEFAULT_DEGREE_BUDGET)
    }

    pub fn compose_within(&self, g: &Self, budget: usize) -> Result<Self, RatbarError> {
        if let Some(c) = g.phi.constant_value() {
            if self.depth_at(&Pt::Native(c)) > 0 {
                return Err(RatbarError::CompositionIndeterminate);
            }
        }
        let de = self.degree as u128 * g.degree as u128;
        if de > budget as u128 {
            return Err(RatbarError::DegreeBudget { degree: de, budget });
        }
        let h = g.h.pow(self.degree as u64).mul(&self.h.substitute(&g.phi.p, &g.phi.q)?);
        let phi = self.phi.compose(&g.phi)?;
        let mut holes = RootList::default();
        holes.merge(g.holes.clone(), self.degree, &self.tol);
        holes.merge(g.preimage_level(&self.holes)?, 1, &self.tol);
        Ok(Self::assemble(de as usize, h, phi, holes, self.tol))
    }

    /// `A f A⁻¹`.
    pub fn conjugate(&self, a: &Mobius<S>) -> Result<Self, RatbarError> {
        if a.det().is_zero() {
            return Err(RatbarError::SingularMobius);
        }
        let (l1, l2) = a.inverse().forms();
        let h = self.h.substitute(&l1, &l2)?;
        let (pp, qq) = a.act_on_pair(&self.phi.p.substitute(&l1, &l2)?, &self.phi.q.substitute(&l1, &l2)?)?;
        let mut holes = RootList::default();
        for r in self.holes.iter() {
            holes.add(a.apply_pt(&r.point), r.mult, &self.tol);
        }
        Ok(Self::assemble(self.degree, h, RatMap::new(pp, qq), holes, self.tol))
    }

    /// `d_z(fⁿ)` from the orbit of `z`, without forming `fⁿ`:
    /// `Σ_{k<n} d^{n-1-k} m_z(φ^k) d_{φ^k(z)}(f)`.
    pub fn depth_of_iterate(&self, z: &Pt<S>, n: usize) -> Result<u128, RatbarError> {
        if n == 0 {
            return Err(RatbarError::Invalid("depth_of_iterate needs n >= 1".into()));
        }
        if self.in_indeterminacy() {
            return Err(RatbarError::Indeterminate);
        }
        let d = self.degree as u128;
        let mut acc: u128 = 0;
        let mut m: u128 = 1;
        let mut x = self.snap_to_hole(z).unwrap_or_else(|| z.clone());
        for k in 0..n {
            let term = checked_pow(d, n - 1 - k)?
                .checked_mul(m)
                .and_then(|t| t.checked_mul(self.depth_at(&x) as u128))
                .ok_or(RatbarError::Overflow)?;
            acc = acc.checked_add(term).ok_or(RatbarError::Overflow)?;
            if k + 1 == n {
                break;
            }
            m = m.checked_mul(self.phi.local_degree(&x, &self.tol)? as u128).ok_or(RatbarError::Overflow)?;
            if m == 0 {
                break;
            }
            let y = self.phi.eval_pt(&x)?;
            x = self.snap_to_hole(&y).unwrap_or(y);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "P": poly_to_json(&self.p),
            "Q": poly_to_json(&self.q),
            "backend": S::BACKEND.to_string(),
        })
    }

    pub fn holes_json(&self) -> Value {
        Value::Array(
            self.holes.iter().map(|r| json!({"point": pt_to_json(&r.point), "depth": r.mult})).collect(),
        )
    }

    /// Reads `{degree?, P, Q}`; the components may be shorthand strings or
    /// coefficient lists.
    pub fn from_json(v: &Value, params: &[(&str, S)]) -> Result<Self, RatbarError> {
        let bad = |f: &str| RatbarError::Invalid(format!("missing field '{f}'"));
        let degree = match v.get("degree") {
            None => None,
            Some(d) => Some(d.as_u64().ok_or_else(|| RatbarError::Invalid("field 'degree' must be an integer".into()))?
                as usize),
        };
        let pv = v.get("P").ok_or_else(|| bad("P"))?;
        let qv = v.get("Q").ok_or_else(|| bad("Q"))?;
        let field_err = |name: &str, e: PolyError| RatbarError::Invalid(format!("field '{name}': {e}"));
        let (p, q) = match (pv, qv, degree) {
            (Value::String(a), Value::String(b), _) => {
                parse_pair(a, b, degree, params).map_err(|e| RatbarError::Invalid(e.to_string()))?
            }
            _ => {
                let p = poly_from_json(pv, degree, params).map_err(|e| field_err("P", e))?;
                let q = poly_from_json(qv, degree.or(Some(p.degree())), params).map_err(|e| field_err("Q", e))?;
                (p, q)
            }
        };
        Self::normalize(p, q)
    }
}

/// Both shorthand components at a common degree (so that `"0"` is accepted).
fn parse_pair<S: Scalar>(
    p: &str,
    q: &str,
    degree: Option<usize>,
    params: &[(&str, S)],
) -> Result<(HomPoly<S>, HomPoly<S>), RatbarError> {
    let field = |name: &str, e: PolyError| RatbarError::Invalid(format!("field '{name}': {e}"));
    let deg = match degree {
        Some(d) => d,
        None => {
            let a = parse_hompoly::<S>(p, None, params).map_err(|e| field("P", e))?;
            if a.is_zero() {
                parse_hompoly::<S>(q, None, params).map_err(|e| field("Q", e))?.degree()
            } else {
                a.degree()
            }
        }
    };
    Ok((
        parse_hompoly(p, Some(deg), params).map_err(|e| field("P", e))?,
        parse_hompoly(q, Some(deg), params).map_err(|e| field("Q", e))?,
    ))
}

fn checked_pow(base: u128, e: usize) -> Result<u128, RatbarError> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(base).ok_or(RatbarError::Overflow)?;
    }
    Ok(acc)
}

/// `"inf"`, an exact coefficient string, or `[re, im]`.
pub fn pt_to_json<S: Scalar>(p: &Pt<S>) -> Value {
    match p {
        Pt::Native(x) if x.is_infinity() => json!("inf"),
        Pt::Approx(x) if x.is_infinity() => json!("inf"),
        Pt::Native(x) if S::BACKEND == Backend::Exact => json!(x.z().to_string()),
        _ => {
            let z = p.approx().z().to_owned();
            json!([z.re, z.im])
        }
    }
}

pub fn point_from_json<S: Scalar>(v: &Value) -> Result<ProjPoint<S>, String> {
    if v.as_str() == Some("inf") {
        return Ok(ProjPoint::infinity());
    }
    crate::polyhom::scalar_from_json::<S>(v).map(ProjPoint::finite)
}

/// `m_z(φⁿ) = Π_{k<n} m_{φ^k(z)}(φ)`; 1 for `n = 0`, 0 for constant `φ`.
pub fn local_degree<S: Scalar>(phi: &RatMap<S>, z: &Pt<S>, n: usize, tol: &Tol) -> Result<usize, RatbarError> {
    let mut m = 1;
    let mut x = z.clone();
    for _ in 0..n {
        m *= phi.local_degree(&x, tol)?;
        if m == 0 {
            return Ok(0);
        }
        x = phi.eval_pt(&x)?;
    }
    Ok(m)
}
