use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{uni, PolyError, Scalar, Tol};

/// A point of P¹ in canonical form: `(z:1)` or `(1:0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint<S> {
    z: S,
    w: S,
}

impl<S: Scalar> ProjPoint<S> {
    pub fn new(z: S, w: S) -> Result<Self, PolyError> {
        if w.is_zero() {
            if z.is_zero() {
                return Err(PolyError::ZeroPoint);
            }
            return Ok(Self::infinity());
        }
        if w.is_one() {
            return Ok(ProjPoint { z, w });
        }
        Ok(ProjPoint { z: z / w, w: S::one() })
    }

    pub fn finite(z: S) -> Self {
        ProjPoint { z, w: S::one() }
    }

    pub fn infinity() -> Self {
        ProjPoint { z: S::one(), w: S::zero() }
    }

    pub fn zero() -> Self {
        Self::finite(S::zero())
    }

    pub fn is_infinity(&self) -> bool {
        self.w.is_zero()
    }

    pub fn z(&self) -> &S {
        &self.z
    }

    pub fn w(&self) -> &S {
        &self.w
    }

    /// The affine coordinate, `None` at ∞.
    pub fn affine(&self) -> Option<&S> {
        if self.is_infinity() {
            None
        } else {
            Some(&self.z)
        }
    }

    pub fn to_c64(&self) -> ProjPoint<Complex64> {
        if self.is_infinity() {
            ProjPoint::infinity()
        } else {
            ProjPoint::finite(self.z.to_c64())
        }
    }
}

impl ProjPoint<Complex64> {
    /// Chordal distance `|z1 w2 - z2 w1| / (|(z1,w1)| |(z2,w2)|)`, in [0,1].
    pub fn chordal(&self, o: &ProjPoint<Complex64>) -> f64 {
        let (z1, w1) = self.bounded_rep();
        let (z2, w2) = o.bounded_rep();
        let num = (z1 * w2 - z2 * w1).norm();
        let n1 = (z1.norm_sqr() + w1.norm_sqr()).sqrt();
        let n2 = (z2.norm_sqr() + w2.norm_sqr()).sqrt();
        num / (n1 * n2)
    }

    /// Representative with both coordinates of modulus at most 1.
    fn bounded_rep(&self) -> (Complex64, Complex64) {
        if self.is_infinity() || !self.z.is_finite() {
            return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        }
        if self.z.norm() <= 1.0 {
            (self.z, self.w)
        } else {
            (Complex64::new(1.0, 0.0), self.w / self.z)
        }
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for ProjPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.z)
        }
    }
}

/// A point known either in the coefficient field of its polynomial or only
/// numerically (exact backend roots outside ℚ(i)).
#[derive(Clone, Debug, PartialEq)]
pub enum Pt<S> {
    Native(ProjPoint<S>),
    Approx(ProjPoint<Complex64>),
}

impl<S: Scalar> Pt<S> {
    pub fn approx(&self) -> ProjPoint<Complex64> {
        match self {
            Pt::Native(p) => p.to_c64(),
            Pt::Approx(p) => p.clone(),
        }
    }

    pub fn native(&self) -> Option<&ProjPoint<S>> {
        match self {
            Pt::Native(p) => Some(p),
            Pt::Approx(_) => None,
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(self, Pt::Native(_))
    }

    /// Point equality: exact for two exact native points, chordal tolerance otherwise.
    pub fn same(&self, o: &Pt<S>, tol: &Tol) -> bool {
        match (self, o) {
            (Pt::Native(a), Pt::Native(b)) if S::BACKEND == super::Backend::Exact => a == b,
            _ => self.approx().chordal(&o.approx()) <= tol.root,
        }
    }
}

/// Homogeneous polynomial in (z,w); `coeffs[i]` multiplies `z^(deg-i) w^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> HomPoly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a homogeneous polynomial needs degree+1 coefficients");
        HomPoly { coeffs }
    }

    pub fn zero(deg: usize) -> Self {
        HomPoly { coeffs: vec![S::zero(); deg + 1] }
    }

    pub fn constant(c: S) -> Self {
        HomPoly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `c · z^(deg-wpow) w^wpow`.
    pub fn monomial(deg: usize, wpow: usize, c: S) -> Self {
        let mut p = Self::zero(deg);
        p.coeffs[wpow] = c;
        p
    }

    pub fn z() -> Self {
        Self::linear(S::one(), S::zero())
    }

    pub fn w() -> Self {
        Self::linear(S::zero(), S::one())
    }

    /// `a z + b w`.
    pub fn linear(a: S, b: S) -> Self {
        HomPoly { coeffs: vec![a, b] }
    }

    /// The linear form vanishing at `pt`: `w0 z - z0 w`.
    pub fn vanishing_at(pt: &ProjPoint<S>) -> Self {
        Self::linear(pt.w().clone(), -pt.z().clone())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_c64(&self) -> HomPoly<Complex64> {
        HomPoly { coeffs: self.coeffs.iter().map(|c| c.to_c64()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_c64().norm()).fold(0.0, f64::max)
    }

    /// Largest power of `w` dividing the polynomial (multiplicity of the root ∞).
    pub fn w_power(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.degree())
    }

    /// Largest power of `z` dividing the polynomial (multiplicity of the root 0).
    pub fn z_power(&self) -> usize {
        self.coeffs.iter().rev().position(|c| !c.is_zero()).unwrap_or(self.degree())
    }

    /// `p(z,1)` as an ascending coefficient vector.
    pub fn dehomogenize(&self) -> Vec<S> {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// Homogenize an ascending univariate polynomial to degree `deg`.
    pub fn homogenize(u: &[S], deg: usize) -> Result<Self, PolyError> {
        let du = uni::degree(u).unwrap_or(0);
        if du > deg {
            return Err(PolyError::DegreeMismatch { expected: deg, found: du });
        }
        let mut c = vec![S::zero(); deg + 1];
        for (j, x) in u.iter().enumerate().take(du + 1) {
            c[deg - j] = x.clone();
        }
        Ok(HomPoly { coeffs: c })
    }

    /// Scale so that the first nonzero coefficient is 1.
    pub fn normalized(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                HomPoly { coeffs: self.coeffs.iter().map(|c| c.clone() / l.clone()).collect() }
            }
        }
    }

    pub fn leading_nonzero(&self) -> Option<&S> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &S) -> Self {
        HomPoly { coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        HomPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_same_degree(o)?;
        Ok(HomPoly {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_same_degree(o)?;
        Ok(HomPoly {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        })
    }

    fn check_same_degree(&self, o: &Self) -> Result<(), PolyError> {
        if self.degree() != o.degree() {
            return Err(PolyError::DegreeMismatch { expected: self.degree(), found: o.degree() });
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Self {
        HomPoly { coeffs: uni::mul(&self.coeffs, &o.coeffs) }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn product<'a>(items: impl IntoIterator<Item = &'a Self>) -> Self
    where
        S: 'a,
    {
        items.into_iter().fold(Self::one(), |acc, p| acc.mul(p))
    }

    /// Exact quotient `self / d`. The float backend accepts a remainder below
    /// `tol.div` relative to the dividend.
    pub fn divide_exact(&self, d: &Self, tol: &Tol) -> Result<Self, PolyError> {
        if d.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if d.degree() > self.degree() {
            return Err(PolyError::InexactDivision);
        }
        let out_deg = self.degree() - d.degree();
        if self.is_zero() {
            return Ok(Self::zero(out_deg));
        }
        let (q, r) = uni::divrem(&self.dehomogenize(), &d.dehomogenize());
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if !r.iter().all(|c| c.negligible(scale, tol.div)) {
            return Err(PolyError::InexactDivision);
        }
        Self::homogenize(&q, out_deg).map_err(|_| PolyError::InexactDivision)
    }

    /// `p(A, B)`; requires `deg A = deg B`.
    pub fn substitute(&self, a: &Self, b: &Self) -> Result<Self, PolyError> {
        if a.degree() != b.degree() {
            return Err(PolyError::DegreeMismatch { expected: a.degree(), found: b.degree() });
        }
        let n = self.degree();
        let e = a.degree();
        // Powers of A and B up to n.
        let mut apow = vec![Self::one()];
        let mut bpow = vec![Self::one()];
        for k in 1..=n {
            apow.push(apow[k - 1].mul(a));
            bpow.push(bpow[k - 1].mul(b));
        }
        let mut out = Self::zero(n * e);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = apow[n - i].mul(&bpow[i]);
            for (k, t) in term.coeffs.into_iter().enumerate() {
                out.coeffs[k] = out.coeffs[k].clone() + c.clone() * t;
            }
        }
        Ok(out)
    }

    /// Evaluation at `(x, y)`.
    pub fn eval_xy(&self, x: &S, y: &S) -> S {
        let mut acc = self.coeffs[0].clone();
        let mut ypow = S::one();
        for c in &self.coeffs[1..] {
            ypow = ypow * y.clone();
            acc = acc * x.clone() + c.clone() * ypow.clone();
        }
        acc
    }

    /// Value at the representative `(z:1)`, or `(1:0)` for ∞.
    pub fn eval(&self, pt: &ProjPoint<S>) -> S {
        self.eval_xy(pt.z(), pt.w())
    }

    /// Order of vanishing at `pt`. Float coefficients count a Taylor
    /// coefficient as zero when it is below `tol.mult` relative to the
    /// polynomial's size near `pt`.
    pub fn multiplicity_at(&self, pt: &ProjPoint<S>, tol: &Tol) -> usize {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if pt.is_infinity() {
            return self
                .coeffs
                .iter()
                .take_while(|c| c.negligible(scale, tol.mult))
                .count()
                .min(self.degree());
        }
        let x0 = pt.z();
        if x0.to_c64().norm() > 1.0 {
            // chart at ∞: swap z and w
            let swapped = HomPoly { coeffs: self.coeffs.iter().rev().cloned().collect() };
            return swapped.multiplicity_at(&ProjPoint::finite(S::one() / x0.clone()), tol);
        }
        let u = self.dehomogenize();
        let size: f64 = u.iter().map(|c| c.to_c64().norm()).sum::<f64>().max(f64::MIN_POSITIVE);
        let t = uni::taylor(&u, x0);
        t.iter().take_while(|c| c.negligible(size, tol.mult)).count().min(self.degree())
    }

    /// Multiplicity at a possibly approximate point.
    pub fn multiplicity_at_pt(&self, pt: &Pt<S>, tol: &Tol) -> usize {
        match pt {
            Pt::Native(p) => self.multiplicity_at(p, tol),
            Pt::Approx(p) => self.to_c64().multiplicity_at(p, tol),
        }
    }

    /// Homogeneous `∂/∂z`.
    pub fn dz(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::zero(0);
        }
        HomPoly {
            coeffs: (0..n).map(|i| self.coeffs[i].clone() * S::from_i64((n - i) as i64)).collect(),
        }
    }

    /// Homogeneous `∂/∂w`.
    pub fn dw(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::zero(0);
        }
        HomPoly {
            coeffs: (1..=n).map(|i| self.coeffs[i].clone() * S::from_i64(i as i64)).collect(),
        }
    }

    /// `self(z,w) · s` with `s` a polynomial of arbitrary degree; alias for [`mul`](Self::mul).
    pub fn times(&self, s: &Self) -> Self {
        self.mul(s)
    }

    /// True when `self` and `o` agree up to a nonzero scalar (tolerance for floats).
    pub fn proportional(&self, o: &Self, tol: &Tol) -> bool {
        proportional_vecs(&self.coeffs, &o.coeffs, tol)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HomPoly<T> {
        HomPoly { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

/// Projective equality of two coefficient vectors.
pub fn proportional_vecs<S: Scalar>(a: &[S], b: &[S], tol: &Tol) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale_a = a.iter().map(|c| c.to_c64().norm()).fold(0.0, f64::max);
    let scale_b = b.iter().map(|c| c.to_c64().norm()).fold(0.0, f64::max);
    let ia = a.iter().position(|c| !c.negligible(scale_a, tol.div));
    let ib = b.iter().position(|c| !c.negligible(scale_b, tol.div));
    let (Some(i), Some(j)) = (ia, ib) else {
        return ia.is_none() && ib.is_none();
    };
    if i != j {
        return false;
    }
    let lambda = b[i].clone() / a[i].clone();
    let lam_abs = lambda.to_c64().norm();
    a.iter()
        .zip(b)
        .all(|(x, y)| (x.clone() * lambda.clone() - y.clone()).negligible(scale_b.max(scale_a * lam_abs), tol.div))
}

impl<S: Scalar + fmt::Display> fmt::Display for HomPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let zp = n - i;
            let mono = match (zp, i) {
                (0, 0) => String::new(),
                (a, 0) => pow_str("z", a),
                (0, b) => pow_str("w", b),
                (a, b) => format!("{}*{}", pow_str("z", a), pow_str("w", b)),
            };
            let cs = c.to_string();
            let coef = if mono.is_empty() {
                format!("({cs})")
            } else if cs == "1" {
                String::new()
            } else if cs == "-1" {
                "-".into()
            } else {
                format!("({cs})*")
            };
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{coef}{mono}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn pow_str(v: &str, k: usize) -> String {
    if k == 1 {
        v.to_string()
    } else {
        format!("{v}^{k}")
    }
}
