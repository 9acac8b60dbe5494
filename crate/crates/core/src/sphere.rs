//! Stereographic identification of P¹ with the unit sphere. The point 0 sits
//! at the south pole `(0,0,-1)` and ∞ at the north pole `(0,0,1)`.

use num_complex::Complex64;

use crate::polyhom::ProjPoint;

pub type Vec3 = [f64; 3];

pub fn stereo(p: &ProjPoint<Complex64>) -> Vec3 {
    if p.is_infinity() {
        return [0.0, 0.0, 1.0];
    }
    let z = *p.z();
    let r2 = z.norm_sqr();
    if !r2.is_finite() || r2 > 1e300 {
        return [0.0, 0.0, 1.0];
    }
    let s = 1.0 + r2;
    [2.0 * z.re / s, 2.0 * z.im / s, (r2 - 1.0) / s]
}

pub fn stereo_inv(v: &Vec3) -> ProjPoint<Complex64> {
    let n = norm(v);
    let [x, y, t] = [v[0] / n, v[1] / n, v[2] / n];
    if t >= 1.0 - 1e-300 && x == 0.0 && y == 0.0 {
        return ProjPoint::infinity();
    }
    // z = (x + iy)/(1 - t), computed stably near the north pole through
    // (1 - t) = (x² + y²)/(1 + t).
    let den = if t > 0.0 { (x * x + y * y) / (1.0 + t) } else { 1.0 - t };
    if den == 0.0 {
        return ProjPoint::infinity();
    }
    ProjPoint::finite(Complex64::new(x / den, y / den))
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Chordal distance on P¹ (half the Euclidean distance of the sphere images).
pub fn chordal_v(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b)) / 2.0
}

/// The antipode `-1/z̄`.
pub fn antipode(p: &ProjPoint<Complex64>) -> ProjPoint<Complex64> {
    if p.is_infinity() {
        return ProjPoint::zero();
    }
    let z = *p.z();
    if z.norm_sqr() == 0.0 {
        return ProjPoint::infinity();
    }
    ProjPoint::finite(-1.0 / z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_and_equator() {
        assert_eq!(stereo(&ProjPoint::zero()), [0.0, 0.0, -1.0]);
        assert_eq!(stereo(&ProjPoint::infinity()), [0.0, 0.0, 1.0]);
        let v = stereo(&ProjPoint::finite(Complex64::from_polar(1.0, 0.7)));
        assert!(v[2].abs() < 1e-15);
    }

    #[test]
    fn inverse_roundtrip() {
        for z in [Complex64::new(0.3, -2.0), Complex64::new(1e5, 3.0), Complex64::new(-1e-7, 0.0)] {
            let p = ProjPoint::finite(z);
            let back = stereo_inv(&stereo(&p));
            assert!(p.chordal(&back) < 1e-14, "{z}");
        }
        assert!(stereo_inv(&[0.0, 0.0, 1.0]).is_infinity());
    }

    #[test]
    fn chordal_matches_projective_formula() {
        let a = ProjPoint::finite(Complex64::new(0.5, 1.0));
        let b = ProjPoint::finite(Complex64::new(-3.0, 0.25));
        assert!((a.chordal(&b) - chordal_v(&stereo(&a), &stereo(&b))).abs() < 1e-15);
    }
}
