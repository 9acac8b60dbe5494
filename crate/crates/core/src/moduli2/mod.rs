//! Degree-2 moduli: multipliers, Milnor coordinates on M̄₂ ≅ P², the
//! boundary family Λ_a, the limit families F_{q,τ,n} and P_{q,n}, and τ².

mod limit;
mod tau;

use num_complex::Complex64;
use num_integer::Integer;
use serde_json::{json, Value};
use thiserror::Error;

use crate::polyhom::{clustered_roots, uni, HomPoly, PolyError, ProjPoint, Pt, RootList, Scalar, Tol};
use crate::ratbar::{RatMap, RatbarError, RatbarPoint};

pub use limit::{
    classify_limit, class_signature, distinguish_classes, mhat_point, ClassSignature, LimitClass, MhatPoint,
};
pub use tau::{
    base_root, richardson_half, tau_squared, tau_squared_closed_form, tau_squared_numeric, DiskFamily, Ext, TauOpts,
};

/// Tolerance for the residue relation `σ₃ = σ₁ - 2`, relative to the size of the σ's.
pub const EPS_SIGMA: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ModuliError {
    #[error(transparent)]
    Ratbar(#[from] RatbarError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("not a degree-2 rational map")]
    NotDegreeTwo,
    #[error("point is not a stable boundary point of Ratbar_2")]
    NotStableBoundary,
    #[error("residue relation fails: |σ₃ - σ₁ + 2| = {0:e}")]
    Residue(f64),
    #[error("base point is not [Λ_ζ] for a primitive {0}-th root of unity")]
    NotOnLocus(usize),
    #[error("descriptor does not match the base point: {0}")]
    Mismatch(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::measure::MeasureError> for ModuliError {
    fn from(e: crate::measure::MeasureError) -> Self {
        ModuliError::Invalid(e.to_string())
    }
}

/// The three fixed-point multipliers of a quadratic map and their
/// elementary symmetric functions.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierTriple {
    pub values: [Complex64; 3],
    pub sigma: [Complex64; 3],
}

impl MultiplierTriple {
    pub fn from_values(v: [Complex64; 3]) -> Self {
        let s1 = v[0] + v[1] + v[2];
        let s2 = v[0] * v[1] + v[0] * v[2] + v[1] * v[2];
        let s3 = v[0] * v[1] * v[2];
        MultiplierTriple { values: v, sigma: [s1, s2, s3] }
    }

    /// `|σ₃ - (σ₁ - 2)|` relative to `max(1, |σᵢ|)`.
    pub fn residue_defect(&self) -> f64 {
        let [s1, s2, s3] = self.sigma;
        let scale = 1f64.max(s1.norm()).max(s2.norm()).max(s3.norm());
        (s3 - s1 + 2.0).norm() / scale
    }

    pub fn to_json(&self) -> Value {
        let c = |z: &Complex64| json!([z.re, z.im]);
        json!({
            "multipliers": self.values.iter().map(c).collect::<Vec<_>>(),
            "sigma": self.sigma.iter().map(c).collect::<Vec<_>>(),
        })
    }
}

/// Fixed-point multipliers of a degree-2 map given by its components.
pub fn map_multipliers(f: &RatMap<Complex64>) -> Result<MultiplierTriple, ModuliError> {
    if f.degree() != 2 {
        return Err(ModuliError::NotDegreeTwo);
    }
    let fix = HomPoly::w().mul(&f.p).sub(&HomPoly::z().mul(&f.q))?;
    if fix.max_abs() == 0.0 {
        return Err(ModuliError::NotDegreeTwo);
    }
    let mut vals = Vec::with_capacity(3);
    let at_inf = fix.w_power();
    let u = fix.dehomogenize();
    let finite = clustered_roots(&uni::trim(u))?;
    for (z0, m) in finite {
        if m > 1 {
            vals.extend(std::iter::repeat_n(Complex64::new(1.0, 0.0), m));
            continue;
        }
        let (p, q) = (f.p.dehomogenize(), f.q.dehomogenize());
        let (pv, qv) = (uni::eval(&p, &z0), uni::eval(&q, &z0));
        let (dp, dq) = (uni::eval(&uni::derivative(&p), &z0), uni::eval(&uni::derivative(&q), &z0));
        vals.push((dp * qv - pv * dq) / (qv * qv));
    }
    match at_inf {
        0 => {}
        1 => {
            // chart u = 1/z: g(u) = Q(1,u)/P(1,u)
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let (pv, qv) = (f.p.eval_xy(&one, &zero), f.q.eval_xy(&one, &zero));
            let (dp, dq) = (f.p.dw().eval_xy(&one, &zero), f.q.dw().eval_xy(&one, &zero));
            vals.push((dq * pv - qv * dp) / (pv * pv));
        }
        m => vals.extend(std::iter::repeat_n(Complex64::new(1.0, 0.0), m)),
    }
    if vals.len() != 3 {
        return Err(ModuliError::NotDegreeTwo);
    }
    let t = MultiplierTriple::from_values([vals[0], vals[1], vals[2]]);
    let defect = t.residue_defect();
    if defect > EPS_SIGMA {
        return Err(ModuliError::Residue(defect));
    }
    Ok(t)
}

/// Multipliers of `f ∈ Rat₂` (no holes).
pub fn multipliers<S: Scalar>(f: &RatbarPoint<S>) -> Result<MultiplierTriple, ModuliError> {
    if f.degree() != 2 || f.is_degenerate() {
        return Err(ModuliError::NotDegreeTwo);
    }
    map_multipliers(&f.phi().to_c64())
}

/// A point `(x₁:x₂:x₃)` of M̄₂ ≅ P²; `x₃ = 1` is the Milnor chart `(σ₁, σ₂)`
/// and `x₃ = 0` is the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuliPoint2 {
    pub x: [Complex64; 3],
}

impl ModuliPoint2 {
    pub fn new(x: [Complex64; 3]) -> Result<Self, ModuliError> {
        let k = if x[2] != Complex64::new(0.0, 0.0) {
            2
        } else if x[0] != Complex64::new(0.0, 0.0) {
            0
        } else if x[1] != Complex64::new(0.0, 0.0) {
            1
        } else {
            return Err(ModuliError::Invalid("zero homogeneous coordinates".into()));
        };
        let s = x[k];
        Ok(ModuliPoint2 { x: [x[0] / s, x[1] / s, x[2] / s] })
    }

    pub fn interior(s1: Complex64, s2: Complex64) -> Self {
        ModuliPoint2 { x: [s1, s2, Complex64::new(1.0, 0.0)] }
    }

    pub fn is_boundary(&self) -> bool {
        self.x[2] == Complex64::new(0.0, 0.0)
    }

    /// `(σ₁, σ₂)` off the boundary.
    pub fn chart(&self) -> Option<(Complex64, Complex64)> {
        (!self.is_boundary()).then(|| (self.x[0], self.x[1]))
    }

    /// Projective equality up to `tol`, via the 2×2 minors.
    pub fn same(&self, o: &ModuliPoint2, tol: f64) -> bool {
        let na = self.x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nb = o.x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (0..3).all(|i| (i + 1..3).all(|j| (self.x[i] * o.x[j] - self.x[j] * o.x[i]).norm() <= tol * na * nb))
    }

    /// Snap a numerically obtained point to the boundary when `|x₃|` is below `tol`.
    pub fn snapped(&self, tol: f64) -> Self {
        let n = self.x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if self.x[2].norm() <= tol * n {
            ModuliPoint2::new([self.x[0], self.x[1], Complex64::new(0.0, 0.0)]).unwrap_or_else(|_| self.clone())
        } else {
            self.clone()
        }
    }

    /// For a boundary point `(1 : s : 0)`, the pair `{a, 1/a}` with `a + 1/a = s`.
    pub fn boundary_parameter(&self) -> Option<(ProjPoint<Complex64>, ProjPoint<Complex64>)> {
        if !self.is_boundary() {
            return None;
        }
        if self.x[0].norm() == 0.0 {
            return Some((ProjPoint::zero(), ProjPoint::infinity()));
        }
        let s = self.x[1] / self.x[0];
        let r = (s * s - 4.0).sqrt();
        let a = (s + r) / 2.0;
        let b = (s - r) / 2.0;
        let pt = |v: Complex64| if v.norm() == 0.0 { ProjPoint::zero() } else { ProjPoint::finite(v) };
        Some((pt(a), pt(b)))
    }

    pub fn to_json(&self) -> Value {
        json!(self.x.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>())
    }

    pub fn from_json(v: &Value) -> Result<Self, ModuliError> {
        let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| ModuliError::Invalid("base must have 3 entries".into()))?;
        let mut x = [Complex64::new(0.0, 0.0); 3];
        for (k, e) in arr.iter().enumerate() {
            x[k] = tau::complex_from_json(e).map_err(ModuliError::Invalid)?;
        }
        ModuliPoint2::new(x)
    }
}

/// `(σ₁ : σ₂ : 1)` for `f ∈ Rat₂`; for a stable boundary point `[Λ_a]`, `(1 : a+1/a : 0)`.
pub fn milnor_point<S: Scalar>(f: &RatbarPoint<S>) -> Result<ModuliPoint2, ModuliError> {
    if f.degree() != 2 {
        return Err(ModuliError::NotDegreeTwo);
    }
    if !f.is_degenerate() {
        let m = multipliers(f)?;
        return Ok(ModuliPoint2::interior(m.sigma[0], m.sigma[1]));
    }
    use crate::stability::{classify, StabilityClass};
    if classify(f)?.class != StabilityClass::Stable {
        return Err(ModuliError::NotStableBoundary);
    }
    let phi = f.phi().to_c64();
    if phi.is_constant() {
        return Ok(ModuliPoint2 { x: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)] });
    }
    // φ is Möbius; its fixed-point multipliers are {a, 1/a}.
    let fix = HomPoly::w().mul(&phi.p).sub(&HomPoly::z().mul(&phi.q))?;
    let roots = crate::polyhom::roots(&fix, &Tol::default())?;
    let z0 = roots.iter().next().ok_or(ModuliError::NotStableBoundary)?.point.approx();
    let a = mobius_multiplier(&phi, &z0);
    Ok(boundary_point(&ProjPoint::finite(a)))
}

fn mobius_multiplier(phi: &RatMap<Complex64>, z0: &ProjPoint<Complex64>) -> Complex64 {
    // z ↦ (az+b)/(cz+d) has derivative det/(cz+d)².
    let [a, b] = [phi.p.coeffs()[0], phi.p.coeffs()[1]];
    let [c, d] = [phi.q.coeffs()[0], phi.q.coeffs()[1]];
    let det = a * d - b * c;
    match z0.affine() {
        Some(z) => {
            let den = c * z + d;
            det / (den * den)
        }
        // At ∞ the multiplier of z ↦ (az+b)/(cz+d) (with c = 0) is d/a.
        None => d / a,
    }
}

/// `[Λ_a] = (1 : a + 1/a : 0)`, written as `(a_z a_w : a_z² + a_w² : 0)` so that
/// `a` and `1/a` give identical coordinates.
pub fn boundary_point<S: Scalar>(a: &ProjPoint<S>) -> ModuliPoint2 {
    let (z, w) = (a.z().to_c64(), a.w().to_c64());
    ModuliPoint2::new([z * w, z * z + w * w, Complex64::new(0.0, 0.0)]).expect("nonzero")
}

fn lin<S: Scalar>(a: i64, b: i64) -> HomPoly<S> {
    HomPoly::linear(S::from_i64(a), S::from_i64(b))
}

/// The boundary representative `Λ_a ∈ Ratbar₂`.
pub fn lambda<S: Scalar>(a: &ProjPoint<S>) -> Result<RatbarPoint<S>, ModuliError> {
    let (z, w) = (HomPoly::<S>::z(), HomPoly::<S>::w());
    let zmw = lin::<S>(1, -1);
    let zpw = lin::<S>(1, 1);
    let (p, q) = match a.affine() {
        None => (zpw.mul(&zmw), HomPoly::zero(2)),
        Some(v) if v.is_zero() => (HomPoly::zero(2), zpw.mul(&zmw)),
        Some(v) if v.is_one() => (zpw.mul(&zmw), w.mul(&zmw)),
        Some(v) => (z.scale(v).mul(&zmw), w.mul(&zmw)),
    };
    Ok(RatbarPoint::normalize(p, q)?)
}

/// Largest exponent accepted by the closed-form constructors (degree 2ⁿ).
pub const MAX_ITERATE: usize = 12;

fn check_n(n: usize) -> Result<(), ModuliError> {
    if n == 0 || n > MAX_ITERATE {
        return Err(ModuliError::Invalid(format!("iterate index {n} outside 1..={MAX_ITERATE}")));
    }
    Ok(())
}

/// `Λ_aⁿ = (aⁿ z Π_{i<n} (z - w/aⁱ)^{2^{n-1-i}} : w Π ...)`, assembled from its
/// holes; falls back to iteration for `a ∈ {0, 1, ∞}`.
pub fn lambda_iterate<S: Scalar>(a: &ProjPoint<S>, n: usize) -> Result<RatbarPoint<S>, ModuliError> {
    check_n(n)?;
    let v = match a.affine() {
        Some(v) if !v.is_zero() && !v.is_one() => v.clone(),
        _ => return Ok(lambda(a)?.iterate(n)?),
    };
    let tol = Tol::default();
    let phi = RatMap::new(HomPoly::z().scale(&v.pow_u(n as u64)), HomPoly::w());
    let mut holes = RootList::default();
    for i in 0..n {
        holes.add(Pt::Native(ProjPoint::new(S::one(), v.pow_u(i as u64))?), 1 << (n - 1 - i), &tol);
    }
    Ok(RatbarPoint::from_factored(phi, holes, tol)?)
}

/// `(z^{2^{n-1}} w^{2^{n-1}} : 0)`, the common limit for `n < q`.
fn pole_pair<S: Scalar>(n: usize) -> Result<RatbarPoint<S>, ModuliError> {
    let k = 1usize << (n - 1);
    let mut holes = RootList::default();
    let tol = Tol::default();
    holes.add(Pt::Native(ProjPoint::zero()), k, &tol);
    holes.add(Pt::Native(ProjPoint::infinity()), k, &tol);
    Ok(RatbarPoint::from_factored(RatMap::constant(&ProjPoint::infinity()), holes, tol)?)
}

fn cyclic_family<S: Scalar>(q: usize, n: usize, top: RatbarPoint<S>) -> Result<RatbarPoint<S>, ModuliError> {
    let (m, k) = n.div_rem(&q);
    if m == 0 {
        return pole_pair(n);
    }
    let base = if m == 1 { top } else { top.iterate(m)? };
    if k == 0 {
        Ok(base)
    } else {
        Ok(pole_pair::<S>(k)?.compose(&base)?)
    }
}

fn check_qn(q: usize, n: usize) -> Result<(), ModuliError> {
    check_n(n)?;
    if q < 2 {
        return Err(ModuliError::Invalid("q must be at least 2".into()));
    }
    Ok(())
}

/// `F_{q,τ,q} = (z^{K-1} w^{K-1} (z² + τzw + w²) : z^K w^K)` with `K = 2^{q-1}`.
fn f_top<S: Scalar>(q: usize, tau: &S) -> Result<RatbarPoint<S>, ModuliError> {
    let k = (1usize << (q - 1)) - 1;
    let phi = RatMap::new(HomPoly::new(vec![S::one(), tau.clone(), S::one()]), HomPoly::monomial(2, 1, S::one()));
    let tol = Tol::default();
    let mut holes = RootList::default();
    holes.add(Pt::Native(ProjPoint::zero()), k, &tol);
    holes.add(Pt::Native(ProjPoint::infinity()), k, &tol);
    Ok(RatbarPoint::from_factored(phi, holes, tol)?)
}

/// `P_{q,q} = (z^K w^{K-1} (z + w) : z^K w^K)`.
fn p_top<S: Scalar>(q: usize) -> Result<RatbarPoint<S>, ModuliError> {
    let k = 1usize << (q - 1);
    let phi = RatMap::new(lin(1, 1), lin(0, 1));
    let tol = Tol::default();
    let mut holes = RootList::default();
    holes.add(Pt::Native(ProjPoint::zero()), k, &tol);
    holes.add(Pt::Native(ProjPoint::infinity()), k - 1, &tol);
    Ok(RatbarPoint::from_factored(phi, holes, tol)?)
}

/// Limit of `n`-th iterates along disks with finite `τ²`:
/// `(z^{2^{n-1}}w^{2^{n-1}} : 0)` for `n < q`, the closed form at `n = q`, and
/// `F_{q,τ,n mod q} ∘ F_{q,τ,q}^{⌊n/q⌋}` beyond.
pub fn f_family<S: Scalar>(q: usize, tau: &S, n: usize) -> Result<RatbarPoint<S>, ModuliError> {
    check_qn(q, n)?;
    if n < q {
        return pole_pair(n);
    }
    cyclic_family(q, n, f_top(q, tau)?)
}

/// Limit of `n`-th iterates along disks with `τ² = ∞`.
pub fn p_family<S: Scalar>(q: usize, n: usize) -> Result<RatbarPoint<S>, ModuliError> {
    check_qn(q, n)?;
    if n < q {
        return pole_pair(n);
    }
    cyclic_family(q, n, p_top(q)?)
}

/// A point of the indeterminacy set of the n-th iterate map.
#[derive(Clone, Debug, PartialEq)]
pub struct IndetPoint {
    pub q: usize,
    pub k: usize,
    pub zeta: Complex64,
    pub point: ModuliPoint2,
}

pub fn zeta(q: usize, k: usize) -> Complex64 {
    if q == 2 {
        return Complex64::new(-1.0, 0.0);
    }
    if q == 4 {
        return if k % 4 == 1 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64)
}

/// `{[Λ_ζ] : ζ primitive q-th root of unity, 2 ≤ q ≤ n}`, one entry per class
/// (`ζ ~ 1/ζ`, so `k ≤ q/2`).
pub fn indeterminacy_set(n: usize) -> Result<Vec<IndetPoint>, ModuliError> {
    if n < 2 {
        return Err(ModuliError::Invalid("n must be at least 2".into()));
    }
    let mut out = Vec::new();
    for q in 2..=n {
        for k in 1..=q / 2 {
            if k.gcd(&q) != 1 {
                continue;
            }
            let z = zeta(q, k);
            out.push(IndetPoint { q, k, zeta: z, point: boundary_point(&ProjPoint::finite(z)) });
        }
    }
    Ok(out)
}

/// `(q, k)` with `a = e^{2πik/q}`, `gcd(k,q) = 1`, if `a` is a root of unity of
/// order at most `max_q` within `tol`.
pub fn root_of_unity(a: Complex64, max_q: usize, tol: f64) -> Option<(usize, usize)> {
    if (a.norm() - 1.0).abs() > tol {
        return None;
    }
    let theta = (a.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
    for q in 1..=max_q {
        let k = (theta * q as f64).round();
        if (theta * q as f64 - k).abs() <= tol * q as f64 {
            let k = (k as usize) % q;
            if k.gcd(&q) == 1 || q == 1 {
                return Some((q, k));
            }
        }
    }
    None
}

/// Epstein's normal form `z((1-α)z + α(1-β)) / (β(1-α)z + (1-β))`: fixed
/// points 0, ∞, 1 with multipliers α, β, γ.
pub fn normal_form<S: Scalar>(alpha: &S, beta: &S) -> RatMap<S> {
    let one = S::one();
    let p = HomPoly::new(vec![one.clone() - alpha.clone(), alpha.clone() * (one.clone() - beta.clone()), S::zero()]);
    let q = HomPoly::new(vec![
        S::zero(),
        beta.clone() * (one.clone() - alpha.clone()),
        one.clone() - beta.clone(),
    ]);
    RatMap::new(p, q)
}

/// A representative of an interior point of M₂ with Milnor coordinates `(σ₁, σ₂)`.
pub fn interior_representative(s1: Complex64, s2: Complex64) -> Result<RatMap<Complex64>, ModuliError> {
    let cubic = [-(s1 - 2.0), s2, -s1, Complex64::new(1.0, 0.0)];
    let r = crate::polyhom::aberth(&cubic)?;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if (1.0 - r[i] * r[j]).norm() > 1e-6 {
            return Ok(normal_form(&r[i], &r[j]));
        }
    }
    Err(ModuliError::Invalid("no labeling with αβ ≠ 1".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhom::GaussRat;
    use crate::stability::{classify, StabilityClass};

    type E = GaussRat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(v: &[Complex64]) -> Vec<Complex64> {
        let mut v = v.to_vec();
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn multipliers_of_z_squared() {
        let f = RatbarPoint::<E>::parse("z^2", "w^2", None, &[]).unwrap();
        let m = multipliers(&f).unwrap();
        let v = sorted(&m.values);
        assert!((v[0]).norm() < 1e-12 && v[1].norm() < 1e-12 && (v[2] - 2.0).norm() < 1e-12);
        assert!((m.sigma[0] - 2.0).norm() < 1e-12);
        let p = milnor_point(&f).unwrap();
        assert!(p.same(&ModuliPoint2::interior(c(2.0, 0.0), c(0.0, 0.0)), 1e-12));
    }

    #[test]
    fn multipliers_of_inverse_square() {
        // 1/z²: fixed points are the cube roots of unity, each with multiplier -2.
        let f = RatbarPoint::<E>::parse("w^2", "z^2", None, &[]).unwrap();
        let m = multipliers(&f).unwrap();
        for v in m.values {
            assert!((v + 2.0).norm() < 1e-10, "{v}");
        }
        assert!(m.residue_defect() < 1e-12);
    }

    #[test]
    fn normal_form_multipliers() {
        let (a, b) = (c(0.3, 0.2), c(-1.5, 0.7));
        let m = map_multipliers(&normal_form(&a, &b)).unwrap();
        let g = (2.0 - a - b) / (1.0 - a * b);
        for want in [a, b, g] {
            assert!(m.values.iter().any(|v| (v - want).norm() < 1e-10));
        }
    }

    #[test]
    fn boundary_points() {
        let one = boundary_point(&ProjPoint::finite(E::one()));
        assert_eq!(one.x, [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        let a = c(0.37, -1.3);
        assert!(boundary_point(&ProjPoint::finite(a)).same(&boundary_point(&ProjPoint::new(c(1.0, 0.0), a).unwrap()), 1e-14));
        assert_eq!(boundary_point::<E>(&ProjPoint::zero()), boundary_point::<E>(&ProjPoint::infinity()));
        let (x, y) = boundary_point(&ProjPoint::finite(a)).boundary_parameter().unwrap();
        let (x, y) = (x.affine().copied().unwrap(), y.affine().copied().unwrap());
        assert!((x - a).norm() < 1e-12 || (y - a).norm() < 1e-12);
    }

    #[test]
    fn lambda_cases() {
        let l1 = lambda::<E>(&ProjPoint::finite(E::one())).unwrap();
        assert_eq!(l1.holes().len(), 1);
        let l0 = lambda::<E>(&ProjPoint::zero()).unwrap();
        assert_eq!(l0.holes().total(), 2);
        assert!(l0.phi().is_constant());
        for a in [E::from_ints(2, 0), E::one(), E::zero(), E::from_ints(0, 1)] {
            let l = lambda(&ProjPoint::finite(a)).unwrap();
            assert_eq!(classify(&l).unwrap().class, StabilityClass::Stable);
        }
        assert_eq!(classify(&lambda::<E>(&ProjPoint::infinity()).unwrap()).unwrap().class, StabilityClass::Stable);
        let l2 = lambda(&ProjPoint::finite(E::from_ints(2, 0))).unwrap();
        let mp = milnor_point(&l2).unwrap();
        assert!(mp.same(&boundary_point(&ProjPoint::finite(c(2.0, 0.0))), 1e-12));
    }

    #[test]
    fn lambda_iterate_matches_iteration() {
        let a = ProjPoint::finite(E::from_ints(2, 0));
        for n in 1..=4 {
            let closed = lambda_iterate(&a, n).unwrap();
            let it = lambda(&a).unwrap().iterate(n).unwrap();
            assert!(closed.proj_eq(&it), "n = {n}");
        }
        let expect = RatbarPoint::<E>::parse("4z(z-w)^2(z-w/2)", "w(z-w)^2(z-w/2)", None, &[]).unwrap();
        assert!(lambda_iterate(&a, 2).unwrap().proj_eq(&expect));
    }

    #[test]
    fn families_closed_forms() {
        let two = E::from_ints(2, 0);
        let f = f_family(2, &two, 2).unwrap();
        let want = RatbarPoint::<E>::parse("zw(z^2+2zw+w^2)", "z^2w^2", None, &[]).unwrap();
        assert!(f.proj_eq(&want));
        let p = p_family::<E>(2, 2).unwrap();
        let want = RatbarPoint::<E>::parse("z^2w(z+w)", "z^2w^2", None, &[]).unwrap();
        assert!(p.proj_eq(&want));
        let low = f_family(3, &two, 2).unwrap();
        assert!(low.proj_eq(&RatbarPoint::<E>::parse("z^2w^2", "0", None, &[]).unwrap()));
        assert_eq!(f_family(2, &two, 5).unwrap().degree(), 32);
    }

    #[test]
    fn indeterminacy_grows() {
        let i2 = indeterminacy_set(2).unwrap();
        assert_eq!(i2.len(), 1);
        assert!(i2[0].point.same(&ModuliPoint2::new([c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)]).unwrap(), 1e-15));
        assert_eq!(indeterminacy_set(3).unwrap().len(), 2);
        assert_eq!(indeterminacy_set(4).unwrap().len(), 3);
        assert_eq!(indeterminacy_set(6).unwrap().len(), 6);
        assert!(indeterminacy_set(1).is_err());
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(zeta(6, 5), 12, 1e-9), Some((6, 5)));
        assert_eq!(root_of_unity(c(-1.0, 0.0), 12, 1e-9), Some((2, 1)));
        assert_eq!(root_of_unity(c(2.0, 0.0), 12, 1e-9), None);
        assert_eq!(root_of_unity(Complex64::from_polar(1.0, 1.0), 12, 1e-9), None);
    }
}
