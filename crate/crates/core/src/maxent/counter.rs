//! The degenerating families `g_{a,t}`, `h_{a,t}` and their iterate limits
//! `f_a`, `f_{a,n}`, `h_a`, with the cross-ratios that tell the limits apart.

use num_complex::Complex64;

use super::MaxentError;
use crate::moduli2::Ext;
use crate::polyhom::{roots, HomPoly, ProjPoint, Scalar, Tol};
use crate::ratbar::{RatMap, RatbarPoint};

/// Fixed data of a family: degree `d` and the polynomial `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample<S> {
    pub d: usize,
    pub p: HomPoly<S>,
}

/// `Π_{k=1}^{deg} (z - sign·k·w)`.
pub fn default_p<S: Scalar>(deg: usize, sign: i64) -> HomPoly<S> {
    let mut acc = HomPoly::one();
    for k in 1..=deg as i64 {
        acc = acc.mul(&HomPoly::linear(S::one(), S::from_i64(-sign * k)));
    }
    acc
}

impl<S: Scalar> Counterexample<S> {
    /// `P` of degree `d - 1` (the g family), monic in `z`, with distinct
    /// roots and `P(0,1) ≠ 0`.
    pub fn g(d: usize, p: HomPoly<S>) -> Result<Self, MaxentError> {
        check_p(&p, d.checked_sub(1).filter(|_| d >= 2))?;
        Ok(Counterexample { d, p })
    }

    /// `P` of degree `d - 2` for the h family, `d ≥ 5`.
    pub fn h(d: usize, p: HomPoly<S>) -> Result<Self, MaxentError> {
        check_p(&p, d.checked_sub(2).filter(|_| d >= 5))?;
        Ok(Counterexample { d, p })
    }

    pub fn default_g(d: usize) -> Result<Self, MaxentError> {
        Self::g(d, default_p(d.saturating_sub(1), 1))
    }

    pub fn default_h(d: usize) -> Result<Self, MaxentError> {
        Self::h(d, default_p(d.saturating_sub(2), -1))
    }
}

fn check_p<S: Scalar>(p: &HomPoly<S>, deg: Option<usize>) -> Result<(), MaxentError> {
    let deg = deg.ok_or_else(|| MaxentError::Invalid("degree too small for this family (g needs d ≥ 2, h needs d ≥ 5)".into()))?;
    if p.degree() != deg {
        return Err(MaxentError::Invalid(format!("P must have degree {deg}, found {}", p.degree())));
    }
    if !p.coeffs()[0].is_one() {
        return Err(MaxentError::Invalid("P must be monic in z".into()));
    }
    if p.coeffs()[deg].is_zero() {
        return Err(MaxentError::Invalid("P(0,1) must be nonzero".into()));
    }
    let r = roots(p, &Tol::default()).map_err(crate::ratbar::RatbarError::from)?;
    if r.iter().any(|x| x.mult > 1) {
        return Err(MaxentError::Invalid("P must have distinct roots".into()));
    }
    Ok(())
}

fn zd<S: Scalar>(d: usize) -> HomPoly<S> {
    HomPoly::monomial(d, 0, S::one())
}

fn wpow<S: Scalar>(k: usize) -> HomPoly<S> {
    HomPoly::monomial(k, k, S::one())
}

/// `g_{a,t} = (a t z^d + w P : t z^d)`.
pub fn g_family<S: Scalar>(c: &Counterexample<S>, a: &S, t: &S) -> Result<RatbarPoint<S>, MaxentError> {
    let tz = zd::<S>(c.d).scale(t);
    let p = tz.scale(a).add(&HomPoly::w().mul(&c.p)).map_err(crate::ratbar::RatbarError::from)?;
    Ok(RatbarPoint::normalize(p, tz)?)
}

/// `g = (w P : 0)`, the common limit of `g_{a,t}`.
pub fn g_limit<S: Scalar>(c: &Counterexample<S>) -> Result<RatbarPoint<S>, MaxentError> {
    Ok(RatbarPoint::normalize(HomPoly::w().mul(&c.p), HomPoly::zero(c.d))?)
}

/// `f_a = (w^{d-1} P^{d-1} (a w P + z^d) : w^d P^d)`, the limit of `g_{a,t}²`.
pub fn f_a<S: Scalar>(c: &Counterexample<S>, a: &S) -> Result<RatbarPoint<S>, MaxentError> {
    let d = c.d;
    let wp = HomPoly::w().mul(&c.p);
    let h = wp.pow((d - 1) as u64);
    let top = wp.scale(a).add(&zd(d)).map_err(crate::ratbar::RatbarError::from)?;
    Ok(RatbarPoint::normalize(h.mul(&top), h.mul(&wp))?)
}

/// Limit of `g_{a,t}ⁿ`: `f_a^{n/2}` for even `n`, `g ∘ f_a^{(n-1)/2}` for odd `n`.
pub fn f_an<S: Scalar>(c: &Counterexample<S>, a: &S, n: usize) -> Result<RatbarPoint<S>, MaxentError> {
    if n < 2 {
        return Err(MaxentError::Invalid("n must be at least 2".into()));
    }
    let fa = f_a(c, a)?;
    let m = n / 2;
    let half = if n.is_multiple_of(2) { m } else { (n - 1) / 2 };
    let base = if half == 1 { fa } else { fa.iterate(half)? };
    if n.is_multiple_of(2) {
        Ok(base)
    } else {
        Ok(g_limit(c)?.compose(&base)?)
    }
}

/// `h_{a,t} = (a t z^d + w² P : t z^d)`.
pub fn h_family<S: Scalar>(c: &Counterexample<S>, a: &S, t: &S) -> Result<RatbarPoint<S>, MaxentError> {
    let tz = zd::<S>(c.d).scale(t);
    let p = tz.scale(a).add(&wpow::<S>(2).mul(&c.p)).map_err(crate::ratbar::RatbarError::from)?;
    Ok(RatbarPoint::normalize(p, tz)?)
}

/// `h_a = (a w^{2d} P^d : w^{2d} P^d)`, the limit of `h_{a,t}²`.
pub fn h_a<S: Scalar>(c: &Counterexample<S>, a: &S) -> Result<RatbarPoint<S>, MaxentError> {
    let h = wpow::<S>(2 * c.d).mul(&c.p.pow(c.d as u64));
    Ok(RatbarPoint::normalize(h.scale(a), h)?)
}

/// `g_{a,t}` for the default `P = Π_{k<d} (z - k w)`.
pub fn degree_d_counterexample<S: Scalar>(d: usize, a: &S, t: &S) -> Result<RatbarPoint<S>, MaxentError> {
    g_family(&Counterexample::default_g(d)?, a, t)
}

fn bracket(x: &ProjPoint<Complex64>, y: &ProjPoint<Complex64>) -> Complex64 {
    x.z() * y.w() - x.w() * y.z()
}

/// `[z₁, z₂; z₃, z₄] = (z₁ - z₃)(z₂ - z₄) / ((z₁ - z₄)(z₂ - z₃))`.
pub fn cross_ratio(z1: &ProjPoint<Complex64>, z2: &ProjPoint<Complex64>, z3: &ProjPoint<Complex64>, z4: &ProjPoint<Complex64>) -> Ext {
    let num = bracket(z1, z3) * bracket(z2, z4);
    let den = bracket(z1, z4) * bracket(z2, z3);
    if den.norm() <= 1e-300 {
        Ext::Infinity
    } else {
        Ext::Finite(num / den)
    }
}

/// `χ(a) = (a + α + s)/(a + α - s)`, `s² = (a - α)² + 4α(a - α)`: the
/// cross-ratio of the holes `∞`, `α` with the two `φ_a`-preimages of `α`
/// (d = 2, `P = z - α w`).
pub fn chi_formula(a: Complex64, alpha: Complex64) -> Complex64 {
    let s = ((a - alpha) * (a - alpha) + 4.0 * alpha * (a - alpha)).sqrt();
    (a + alpha + s) / (a + alpha - s)
}

fn sort_pts(v: &mut [ProjPoint<Complex64>]) {
    v.sort_by(|x, y| {
        let k = |p: &ProjPoint<Complex64>| p.affine().map_or((f64::INFINITY, 0.0), |z| (z.re, z.im));
        k(x).partial_cmp(&k(y)).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// For a point whose two deepest holes `A, B` tie and whose next depth level
/// holds exactly two holes `p, p'`: the cross-ratio `[A, B; p', p]`, with `A`
/// taken to be `∞` when `∞` is one of the two.
pub fn hole_pair_chi<S: Scalar>(f: &RatbarPoint<S>) -> Option<Complex64> {
    let mut hs: Vec<(ProjPoint<Complex64>, usize)> = f.holes().iter().map(|r| (r.point.approx(), r.mult)).collect();
    hs.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| y.0.is_infinity().cmp(&x.0.is_infinity())));
    if hs.len() < 4 || hs[0].1 != hs[1].1 || hs[2].1 == hs[0].1 {
        return None;
    }
    let next: Vec<ProjPoint<Complex64>> = hs[2..].iter().filter(|h| h.1 == hs[2].1).map(|h| h.0.clone()).collect();
    if next.len() != 2 {
        return None;
    }
    let (a, b) = (&hs[0].0, &hs[1].0);
    cross_ratio(a, b, &next[1], &next[0]).finite()
}

/// Cross-ratios of three marked points with each moving finite fixed point of
/// `φ_a`. Marked points: the critical point nearest 0, the root of `P` and
/// `∞` when `d = 2`; `∞` and the two smallest roots of `P` otherwise.
pub fn fixed_point_cross_ratios<S: Scalar>(c: &Counterexample<S>, a: &S) -> Result<Vec<Ext>, MaxentError> {
    let fa = f_a(c, a)?;
    let phi: RatMap<Complex64> = fa.phi().to_c64();
    let tol = Tol::default();
    let mut proots: Vec<ProjPoint<Complex64>> =
        roots(&c.p.to_c64(), &tol).map_err(crate::ratbar::RatbarError::from)?.iter().map(|r| r.point.approx()).collect();
    sort_pts(&mut proots);
    let marked: [ProjPoint<Complex64>; 3] = if c.d == 2 {
        let wr = phi.p.dz().mul(&phi.q).sub(&phi.p.mul(&phi.q.dz())).map_err(crate::ratbar::RatbarError::from)?;
        let mut crit: Vec<ProjPoint<Complex64>> =
            roots(&wr, &tol).map_err(crate::ratbar::RatbarError::from)?.iter().map(|r| r.point.approx()).collect();
        crit.sort_by(|x, y| x.chordal(&ProjPoint::zero()).partial_cmp(&y.chordal(&ProjPoint::zero())).unwrap());
        [crit[0].clone(), proots[0].clone(), ProjPoint::infinity()]
    } else {
        [ProjPoint::infinity(), proots[0].clone(), proots[1].clone()]
    };
    let fix = HomPoly::w().mul(&phi.p).sub(&HomPoly::z().mul(&phi.q)).map_err(crate::ratbar::RatbarError::from)?;
    let mut fps: Vec<ProjPoint<Complex64>> = roots(&fix, &tol)
        .map_err(crate::ratbar::RatbarError::from)?
        .iter()
        .map(|r| r.point.approx())
        .filter(|p| !p.is_infinity())
        .collect();
    sort_pts(&mut fps);
    Ok(fps.iter().map(|p| cross_ratio(&marked[0], &marked[1], &marked[2], p)).collect())
}

/// `[A, r₁; r₂, c]` for `h_a`: its deepest hole `A`, the two smallest holes
/// of the next level, and the constant value `c` of `φ`.
pub fn h_invariant<S: Scalar>(f: &RatbarPoint<S>) -> Option<Ext> {
    let c = f.phi().constant_value()?.to_c64();
    let mut hs: Vec<(ProjPoint<Complex64>, usize)> = f.holes().iter().map(|r| (r.point.approx(), r.mult)).collect();
    hs.sort_by(|x, y| y.1.cmp(&x.1));
    if hs.len() < 3 || hs[1].1 == hs[0].1 {
        return None;
    }
    let mut next: Vec<ProjPoint<Complex64>> = hs[1..].iter().filter(|h| h.1 == hs[1].1).map(|h| h.0.clone()).collect();
    if next.len() < 2 {
        return None;
    }
    sort_pts(&mut next);
    Some(cross_ratio(&hs[0].0, &next[0], &next[1], &c))
}

/// Sine of the angle between the coefficient vectors of `(P₁, Q₁)` and
/// `(P₂, Q₂)`: zero iff the pairs agree projectively.
pub fn projective_gap<S: Scalar, T: Scalar>(a: (&HomPoly<S>, &HomPoly<S>), b: (&HomPoly<T>, &HomPoly<T>)) -> f64 {
    let u: Vec<Complex64> = a.0.coeffs().iter().chain(a.1.coeffs()).map(|c| c.to_c64()).collect();
    let v: Vec<Complex64> = b.0.coeffs().iter().chain(b.1.coeffs()).map(|c| c.to_c64()).collect();
    if u.len() != v.len() {
        return 1.0;
    }
    let nu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    let nv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let ip: Complex64 = u.iter().zip(&v).map(|(x, y)| x * y.conj()).sum();
    (1.0 - ip.norm_sqr() / (nu * nv)).max(0.0).sqrt()
}
