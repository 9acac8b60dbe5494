use num_complex::Complex64;

use crate::polyhom::{roots, HomPoly, PolyError, ProjPoint, Pt, Scalar, Tol};

/// A reduced rational map `(P:Q)` with coprime components, possibly constant.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMap<S> {
    pub p: HomPoly<S>,
    pub q: HomPoly<S>,
}

impl<S: Scalar> RatMap<S> {
    pub fn new(p: HomPoly<S>, q: HomPoly<S>) -> Self {
        assert_eq!(p.degree(), q.degree());
        RatMap { p, q }
    }

    pub fn identity() -> Self {
        RatMap { p: HomPoly::z(), q: HomPoly::w() }
    }

    /// The constant map with value `c`.
    pub fn constant(c: &ProjPoint<S>) -> Self {
        RatMap { p: HomPoly::constant(c.z().clone()), q: HomPoly::constant(c.w().clone()) }
    }

    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Value of a constant map.
    pub fn constant_value(&self) -> Option<ProjPoint<S>> {
        if !self.is_constant() {
            return None;
        }
        ProjPoint::new(self.p.coeffs()[0].clone(), self.q.coeffs()[0].clone()).ok()
    }

    pub fn to_c64(&self) -> RatMap<Complex64> {
        RatMap { p: self.p.to_c64(), q: self.q.to_c64() }
    }

    pub fn eval(&self, pt: &ProjPoint<S>) -> Result<ProjPoint<S>, PolyError> {
        ProjPoint::new(self.p.eval(pt), self.q.eval(pt))
    }

    pub fn eval_pt(&self, pt: &Pt<S>) -> Result<Pt<S>, PolyError> {
        match pt {
            Pt::Native(x) => Ok(Pt::Native(self.eval(x)?)),
            Pt::Approx(x) => Ok(Pt::Approx(self.to_c64().eval(x)?)),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RatMap<S>) -> Result<RatMap<S>, PolyError> {
        Ok(RatMap { p: self.p.substitute(&other.p, &other.q)?, q: self.q.substitute(&other.p, &other.q)? })
    }

    pub fn pow(&self, n: usize) -> Result<RatMap<S>, PolyError> {
        let mut acc = RatMap::identity();
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `t_w P - t_z Q`, whose roots are the preimages of `t`.
    fn fiber_poly(&self, t: &ProjPoint<S>) -> HomPoly<S> {
        self.p.scale(t.w()).sub(&self.q.scale(t.z())).expect("equal degrees")
    }

    /// Preimages of `target` with their local degrees. Empty for a constant map.
    pub fn preimages(&self, target: &Pt<S>, tol: &Tol) -> Result<Vec<(Pt<S>, usize)>, PolyError> {
        if self.is_constant() {
            return Ok(Vec::new());
        }
        match target {
            Pt::Native(t) => Ok(roots(&self.fiber_poly(t), tol)?
                .entries
                .into_iter()
                .map(|r| (r.point, r.mult))
                .collect()),
            Pt::Approx(t) => {
                let m = self.to_c64();
                Ok(roots(&m.fiber_poly(t), tol)?
                    .entries
                    .into_iter()
                    .map(|r| (Pt::Approx(r.point.approx()), r.mult))
                    .collect())
            }
        }
    }

    /// Local degree `m_z(φ)`: multiplicity of `z` as a solution of
    /// `φ(y) = φ(z)`. Zero for a constant map.
    pub fn local_degree(&self, z: &Pt<S>, tol: &Tol) -> Result<usize, PolyError> {
        if self.is_constant() {
            return Ok(0);
        }
        match z {
            Pt::Native(x) => Ok(self.fiber_poly(&self.eval(x)?).multiplicity_at(x, tol).max(1)),
            Pt::Approx(x) => {
                let m = self.to_c64();
                Ok(m.fiber_poly(&m.eval(x)?).multiplicity_at(x, tol).max(1))
            }
        }
    }
}
