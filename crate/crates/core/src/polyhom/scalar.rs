use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient backend tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend '{other}' (expected exact|float)")),
        }
    }
}

/// A complex coefficient field. Implemented by [`GaussRat`] (exact) and
/// [`Complex64`] (floating).
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// Exact zero test (for floats: the value is literally 0).
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
    /// Zero test relative to `scale`. Exact backends ignore `rel`.
    fn negligible(&self, scale: f64, rel: f64) -> bool;
    /// Parse one coefficient ("1/2+3/4 i", "-i", "2.5").
    fn parse_scalar(s: &str) -> Result<Self, String>;
    /// Lossless conversion for the float backend; `None` for exact.
    fn from_c64(c: Complex64) -> Option<Self>;
    /// Embed a Gaussian rational (rounded for the float backend).
    fn from_gauss(g: &GaussRat) -> Self;
    /// Storage size in bits; zero for fixed-size floats.
    fn height_bits(&self) -> u64 {
        0
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow_u(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// Gaussian rational `re + im·i` with arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn real(r: BigRational) -> Self {
        GaussRat::new(r, BigRational::zero())
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// The exact binary value of a float, or `None` for non-finite input.
    pub fn from_f64_exact(c: Complex64) -> Option<Self> {
        Some(GaussRat::new(
            BigRational::from_float(c.re)?,
            BigRational::from_float(c.im)?,
        ))
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerator/denominator: fall back to a scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return f.write_str(&fmt_rat(&self.re));
        }
        let im_abs = fmt_rat(&self.im.abs());
        let sign = if self.im.is_negative() { '-' } else { '+' };
        if self.re.is_zero() {
            let lead = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{lead}{im_abs} i")
        } else {
            write!(f, "{}{}{} i", fmt_rat(&self.re), sign, im_abs)
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // Decimal literal: read it exactly as a base-10 fraction.
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| format!("bad exponent in '{s}'"))?),
        None => (s, 0),
    };
    let neg = mantissa.starts_with('-');
    let body = mantissa.trim_start_matches(['+', '-']);
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(format!("bad number '{s}'"));
    }
    let digits = format!("{ip}{fp}");
    let mut n: BigInt = digits.parse().map_err(|_| format!("bad number '{s}'"))?;
    if neg {
        n = -n;
    }
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Split "a+b i" style text into (real text, imaginary text).
fn split_complex(s: &str) -> Result<(String, String), String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty coefficient".into());
    }
    if !t.ends_with('i') && !t.ends_with('j') {
        return Ok((t, "0".into()));
    }
    let body = &t[..t.len() - 1];
    // Find the sign separating real and imaginary parts (not an exponent sign).
    let bytes = body.as_bytes();
    let mut cut = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E' {
            cut = Some(k);
            break;
        }
    }
    let (re, im) = match cut {
        Some(k) => (body[..k].to_string(), body[k..].to_string()),
        None => ("0".to_string(), body.to_string()),
    };
    let im = match im.trim_end_matches('*') {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        x => x.to_string(),
    };
    Ok((re, im))
}

impl Scalar for GaussRat {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::from_ints(n, 0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }
    fn negligible(&self, _scale: f64, _rel: f64) -> bool {
        self.is_zero()
    }
    fn parse_scalar(s: &str) -> Result<Self, String> {
        let (re, im) = split_complex(s)?;
        Ok(GaussRat::new(parse_rational(&re)?, parse_rational(&im)?))
    }
    fn from_c64(_c: Complex64) -> Option<Self> {
        None
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.clone()
    }
    fn height_bits(&self) -> u64 {
        [&self.re, &self.im].iter().map(|r| r.numer().bits() + r.denom().bits()).sum()
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(self.re * o.re);
        }
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        GaussRat::new(re, im)
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, o: GaussRat) -> GaussRat {
        assert!(!o.is_zero(), "GaussRat division by zero");
        if o.im.is_zero() {
            return GaussRat::new(self.re / &o.re, self.im / &o.re);
        }
        let n = o.norm_sqr();
        let c = o.conj();
        let p = self * c;
        GaussRat::new(p.re / &n, p.im / &n)
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Serialize for GaussRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussRat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GaussRat::parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn negligible(&self, scale: f64, rel: f64) -> bool {
        self.norm() <= rel * scale
    }
    fn parse_scalar(s: &str) -> Result<Self, String> {
        let (re, im) = split_complex(s)?;
        let pf = |x: &str| -> Result<f64, String> {
            if x.contains('/') {
                Ok(rat_to_f64(&parse_rational(x)?))
            } else {
                x.parse::<f64>().map_err(|_| format!("bad number '{x}'"))
            }
        };
        Ok(Complex64::new(pf(&re)?, pf(&im)?))
    }
    fn from_c64(c: Complex64) -> Option<Self> {
        Some(c)
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.to_c64()
    }
}

/// Rational approximation of `x` by continued fractions, denominators up to `max_den`.
pub fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() <= tol * x.abs().max(1.0) {
        Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_arithmetic() {
        let a = GaussRat::parse_scalar("1/2+3/4 i").unwrap();
        let b = GaussRat::parse_scalar("-2i").unwrap();
        let p = a.clone() * b.clone();
        assert_eq!(p, GaussRat::parse_scalar("3/2-1 i").unwrap());
        assert_eq!((p / b).to_string(), a.to_string());
        assert_eq!(GaussRat::parse_scalar("0.25").unwrap(), GaussRat::ratio(1, 4));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "-3", "5/7", "1/2+3/4 i", "-1/3-2 i", "-i", "7 i"] {
            let v = GaussRat::parse_scalar(s).unwrap();
            let back = GaussRat::parse_scalar(&v.to_string()).unwrap();
            assert_eq!(v, back, "{s}");
        }
    }

    #[test]
    fn float_parse() {
        let c = Complex64::parse_scalar("1.5-2e-1i").unwrap();
        assert_eq!(c, Complex64::new(1.5, -0.2));
        assert_eq!(Complex64::parse_scalar("i").unwrap(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn continued_fraction_recovers_small_fractions() {
        let r = rational_approx(-7.0 / 13.0, 1_000_000, 1e-12).unwrap();
        assert_eq!(r, BigRational::new((-7).into(), 13.into()));
        assert!(rational_approx(std::f64::consts::PI, 100, 1e-12).is_none());
    }
}
