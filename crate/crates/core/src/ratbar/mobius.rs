use num_complex::Complex64;

use super::RatbarError;
use crate::polyhom::{HomPoly, PolyError, ProjPoint, Pt, Scalar};

/// `z ↦ (az + b)/(cz + d)` as the matrix `(a b; c d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mobius<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> Mobius<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Result<Self, RatbarError> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            return Err(RatbarError::SingularMobius);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mobius { a: S::one(), b: S::zero(), c: S::zero(), d: S::one() }
    }

    pub fn det(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    /// The adjugate, which represents the inverse projectively.
    pub fn inverse(&self) -> Self {
        Mobius { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }

    /// Matrix product: `(self ∘ o)(z) = self(o(z))`.
    pub fn compose(&self, o: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        Mobius {
            a: a.clone() * o.a.clone() + b.clone() * o.c.clone(),
            b: a.clone() * o.b.clone() + b.clone() * o.d.clone(),
            c: c.clone() * o.a.clone() + d.clone() * o.c.clone(),
            d: c.clone() * o.b.clone() + d.clone() * o.d.clone(),
        }
    }

    pub fn apply(&self, p: &ProjPoint<S>) -> ProjPoint<S> {
        let (z, w) = (p.z().clone(), p.w().clone());
        ProjPoint::new(
            self.a.clone() * z.clone() + self.b.clone() * w.clone(),
            self.c.clone() * z + self.d.clone() * w,
        )
        .expect("invertible")
    }

    pub fn apply_pt(&self, p: &Pt<S>) -> Pt<S> {
        match p {
            Pt::Native(x) => Pt::Native(self.apply(x)),
            Pt::Approx(x) => Pt::Approx(self.to_c64().apply(x)),
        }
    }

    pub fn to_c64(&self) -> Mobius<Complex64> {
        Mobius { a: self.a.to_c64(), b: self.b.to_c64(), c: self.c.to_c64(), d: self.d.to_c64() }
    }

    /// The linear forms `(az + bw, cz + dw)`.
    pub fn forms(&self) -> (HomPoly<S>, HomPoly<S>) {
        (HomPoly::linear(self.a.clone(), self.b.clone()), HomPoly::linear(self.c.clone(), self.d.clone()))
    }

    /// `(P, Q) ↦ (aP + bQ, cP + dQ)`.
    pub fn act_on_pair(&self, p: &HomPoly<S>, q: &HomPoly<S>) -> Result<(HomPoly<S>, HomPoly<S>), PolyError> {
        Ok((
            p.scale(&self.a).add(&q.scale(&self.b))?,
            p.scale(&self.c).add(&q.scale(&self.d))?,
        ))
    }
}
