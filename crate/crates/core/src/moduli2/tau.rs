use num_complex::Complex64;
use serde_json::{json, Value};

use super::{
    boundary_point, map_multipliers, milnor_point, normal_form, zeta, ModuliError, ModuliPoint2,
};
use crate::polyhom::{aberth, poly_from_json, poly_to_json, scalar_from_json, HomPoly, ProjPoint};
use crate::ratbar::{RatMap, RatbarPoint};

/// A point of Ĉ = ℂ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ext {
    Finite(Complex64),
    Infinity,
}

impl Ext {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            Ext::Finite(z) => Some(*z),
            Ext::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinity)
    }

    /// `[re, im]`, or the string `"inf"`.
    pub fn to_json(&self) -> Value {
        match self {
            Ext::Finite(z) => json!([z.re, z.im]),
            Ext::Infinity => json!("inf"),
        }
    }

    pub fn from_json(v: &Value) -> Result<Ext, String> {
        if v.as_str().is_some_and(|s| s == "inf" || s == "∞") {
            return Ok(Ext::Infinity);
        }
        complex_from_json(v).map(Ext::Finite)
    }

    pub fn close(&self, o: &Ext, tol: f64) -> bool {
        match (self, o) {
            (Ext::Infinity, Ext::Infinity) => true,
            (Ext::Finite(a), Ext::Finite(b)) => (a - b).norm() <= tol * 1f64.max(a.norm()),
            _ => false,
        }
    }
}

pub(crate) fn complex_from_json(v: &Value) -> Result<Complex64, String> {
    scalar_from_json::<Complex64>(v)
}

/// A holomorphic disk `t ↦ [f_t]` in M̄₂ near its centre `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum DiskFamily {
    /// Normal form with multipliers `α(t)`, `β(t)` at 0 and ∞ (ascending
    /// coefficients in `t`).
    Nf { alpha: Vec<Complex64>, beta: Vec<Complex64> },
    /// The line `t ↦ (1 : -2 + at : bt)` through `[Λ₋₁]`.
    Line { a: Complex64, b: Complex64 },
    /// The conic `t ↦ (1 : ζ + 1/ζ + at : b²t²)`, `ζ = e^{2πik/q}`.
    Conic { q: usize, k: usize, a: Complex64, b: Complex64 },
    /// `f_t = (Σ tʲ Pⱼ : Σ tʲ Qⱼ)`.
    CoeffPath { p: Vec<HomPoly<Complex64>>, q: Vec<HomPoly<Complex64>> },
    /// `t ↦ [Λ_{a(t)}]`, entirely inside the boundary.
    Boundary { a: Vec<Complex64> },
}

fn horner(c: &[Complex64], t: f64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * t + x)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn c1(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl DiskFamily {
    /// `f_t(z) = (z² - 1)/(c(t) z² + 1)` with `c(t) = t - 1`.
    pub fn basilica() -> Self {
        let p = HomPoly::new(vec![c1(1.0), c1(0.0), c1(-1.0)]);
        let q0 = HomPoly::new(vec![c1(-1.0), c1(0.0), c1(1.0)]);
        let q1 = HomPoly::new(vec![c1(1.0), c1(0.0), c1(0.0)]);
        DiskFamily::CoeffPath { p: vec![p], q: vec![q0, q1] }
    }

    /// The normal-form family written out as a coefficient path.
    pub fn nf_as_coeff_path(alpha: &[Complex64], beta: &[Complex64]) -> Self {
        let one = vec![c1(1.0)];
        let om = |x: &[Complex64]| {
            let mut v: Vec<Complex64> = x.iter().map(|c| -c).collect();
            v[0] += 1.0;
            v
        };
        let (oma, omb) = (om(alpha), om(beta));
        let _ = one;
        // P = (1-α) z² + α(1-β) zw, Q = β(1-α) zw + (1-β) w²
        let pz2 = oma.clone();
        let pzw = poly_mul(alpha, &omb);
        let qzw = poly_mul(beta, &oma);
        let qw2 = omb;
        let len = pz2.len().max(pzw.len()).max(qzw.len()).max(qw2.len());
        let at = |v: &Vec<Complex64>, j: usize| v.get(j).copied().unwrap_or(c1(0.0));
        let mut p = Vec::new();
        let mut q = Vec::new();
        for j in 0..len {
            p.push(HomPoly::new(vec![at(&pz2, j), at(&pzw, j), c1(0.0)]));
            q.push(HomPoly::new(vec![c1(0.0), at(&qzw, j), at(&qw2, j)]));
        }
        DiskFamily::CoeffPath { p, q }
    }

    /// The rational map `f_t`, for descriptors that carry one.
    pub fn map_at(&self, t: f64) -> Option<RatMap<Complex64>> {
        match self {
            DiskFamily::Nf { alpha, beta } => Some(normal_form(&horner(alpha, t), &horner(beta, t))),
            DiskFamily::CoeffPath { p, q } => {
                let sum = |v: &[HomPoly<Complex64>]| {
                    let mut acc = HomPoly::zero(2);
                    let mut tp = 1.0;
                    for c in v {
                        acc = acc.add(&c.scale(&c1(tp))).expect("degree 2");
                        tp *= t;
                    }
                    acc
                };
                Some(RatMap::new(sum(p), sum(q)))
            }
            _ => None,
        }
    }

    /// Milnor point of `Δ(t)` for `t ≠ 0`.
    pub fn milnor_at(&self, t: f64) -> Result<ModuliPoint2, ModuliError> {
        match self {
            DiskFamily::Line { a, b } => ModuliPoint2::new([c1(1.0), c1(-2.0) + a * t, b * t]),
            DiskFamily::Conic { q, k, a, b } => {
                let z = zeta(*q, *k);
                ModuliPoint2::new([c1(1.0), z + 1.0 / z + a * t, b * b * t * t])
            }
            DiskFamily::Boundary { a } => Ok(boundary_point(&ProjPoint::finite(horner(a, t)))),
            DiskFamily::Nf { alpha, beta } => {
                let (al, be) = (horner(alpha, t), horner(beta, t));
                let eps = 1.0 - al * be;
                let s = 2.0 - al - be;
                // ε·(σ₁, σ₂, 1) with γ = s/ε
                ModuliPoint2::new([eps * (al + be) + s, eps * al * be + s * (al + be), eps])
            }
            DiskFamily::CoeffPath { .. } => {
                let m = map_multipliers(&self.map_at(t).expect("coefficient path"))?;
                Ok(ModuliPoint2::interior(m.sigma[0], m.sigma[1]))
            }
        }
    }

    /// The three multipliers of `f_t`, `t ≠ 0`.
    pub fn multipliers_at(&self, t: f64) -> Result<[Complex64; 3], ModuliError> {
        match self {
            DiskFamily::Nf { alpha, beta } => {
                let (al, be) = (horner(alpha, t), horner(beta, t));
                Ok([al, be, (2.0 - al - be) / (1.0 - al * be)])
            }
            DiskFamily::CoeffPath { .. } => Ok(map_multipliers(&self.map_at(t).expect("coefficient path"))?.values),
            DiskFamily::Boundary { .. } => Err(ModuliError::Invalid("boundary disk has no multipliers".into())),
            _ => {
                let x = self.milnor_at(t)?.x;
                cubic_roots(&x)
            }
        }
    }

    /// `Δ(0)`.
    pub fn base(&self) -> Result<ModuliPoint2, ModuliError> {
        match self {
            DiskFamily::Line { .. } => Ok(ModuliPoint2::new([c1(1.0), c1(-2.0), c1(0.0)])?),
            DiskFamily::Conic { q, k, .. } => Ok(boundary_point(&ProjPoint::finite(zeta(*q, *k)))),
            DiskFamily::Boundary { a } => Ok(boundary_point(&ProjPoint::finite(horner(a, 0.0)))),
            DiskFamily::Nf { alpha, beta } => {
                let (al, be) = (alpha[0], beta[0]);
                if (1.0 - al * be).norm() > 1e-12 {
                    return self.milnor_at(0.0);
                }
                Ok(boundary_point(&ProjPoint::finite(al)))
            }
            DiskFamily::CoeffPath { .. } => {
                let f0 = self.map_at(0.0).expect("coefficient path");
                if let Ok(f) = RatbarPoint::normalize(f0.p.clone(), f0.q.clone()) {
                    if f.degree() == 2 {
                        if let Ok(m) = milnor_point(&f) {
                            return Ok(m);
                        }
                    }
                }
                numeric_base(self)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let cj = |z: &Complex64| json!([z.re, z.im]);
        let cv = |v: &[Complex64]| v.iter().map(cj).collect::<Vec<_>>();
        match self {
            DiskFamily::Nf { alpha, beta } => json!({"kind": "nf", "alpha": cv(alpha), "beta": cv(beta)}),
            DiskFamily::Line { a, b } => json!({"kind": "line", "a": cj(a), "b": cj(b)}),
            DiskFamily::Conic { q, k, a, b } => json!({"kind": "conic", "q": q, "k": k, "a": cj(a), "b": cj(b)}),
            DiskFamily::CoeffPath { p, q } => json!({
                "kind": "coeff_path",
                "P": p.iter().map(poly_to_json).collect::<Vec<_>>(),
                "Q": q.iter().map(poly_to_json).collect::<Vec<_>>(),
            }),
            DiskFamily::Boundary { a } => json!({"kind": "boundary", "a": cv(a)}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, ModuliError> {
        let bad = |m: String| ModuliError::Invalid(m);
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing field 'kind'".into()))?;
        let field = |name: &str| v.get(name).ok_or_else(|| bad(format!("missing field '{name}'")));
        let cx = |name: &str| -> Result<Complex64, ModuliError> {
            complex_from_json(field(name)?).map_err(|e| bad(format!("field '{name}': {e}")))
        };
        let cxs = |name: &str| -> Result<Vec<Complex64>, ModuliError> {
            let f = field(name)?;
            let items: Vec<Value> = match f.as_array() {
                Some(a) if !a.is_empty() && !(a.len() == 2 && a.iter().all(Value::is_number)) => a.clone(),
                _ => vec![f.clone()],
            };
            items
                .iter()
                .map(|x| complex_from_json(x).map_err(|e| bad(format!("field '{name}': {e}"))))
                .collect()
        };
        let uint = |name: &str| -> Result<usize, ModuliError> {
            field(name)?.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("field '{name}' must be an integer")))
        };
        let polys = |name: &str| -> Result<Vec<HomPoly<Complex64>>, ModuliError> {
            let f = field(name)?;
            let items = match f.as_array() {
                Some(a) => a.clone(),
                None => vec![f.clone()],
            };
            items
                .iter()
                .map(|x| poly_from_json::<Complex64>(x, Some(2), &[]).map_err(|e| bad(format!("field '{name}': {e}"))))
                .collect()
        };
        match kind {
            "nf" => Ok(DiskFamily::Nf { alpha: cxs("alpha")?, beta: cxs("beta")? }),
            "line" => Ok(DiskFamily::Line { a: cx("a")?, b: cx("b")? }),
            "conic" => Ok(DiskFamily::Conic { q: uint("q")?, k: uint("k").unwrap_or(1), a: cx("a")?, b: cx("b")? }),
            "coeff_path" => Ok(DiskFamily::CoeffPath { p: polys("P")?, q: polys("Q")? }),
            "boundary" => Ok(DiskFamily::Boundary { a: cxs("a")? }),
            "basilica" => Ok(DiskFamily::basilica()),
            other => Err(bad(format!("field 'kind': unknown family '{other}'"))),
        }
    }
}

/// Roots of `x₃X³ - x₁X² + x₂X - (x₁ - 2x₃)`, the multiplier cubic in
/// homogeneous Milnor coordinates, polished by Newton steps.
fn cubic_roots(x: &[Complex64; 3]) -> Result<[Complex64; 3], ModuliError> {
    let u = [-(x[0] - 2.0 * x[2]), x[1], -x[0], x[2]];
    let r = aberth(&u)?;
    if r.len() != 3 {
        return Err(ModuliError::Invalid("multiplier cubic degenerates on the boundary".into()));
    }
    let f = |z: Complex64| ((u[3] * z + u[2]) * z + u[1]) * z + u[0];
    let df = |z: Complex64| (3.0 * u[3] * z + 2.0 * u[2]) * z + u[1];
    let mut out = [r[0], r[1], r[2]];
    for z in out.iter_mut() {
        for _ in 0..3 {
            let d = df(*z);
            if d.norm() == 0.0 {
                break;
            }
            *z -= f(*z) / d;
        }
    }
    Ok(out)
}

/// Parameters of the geometric grid `t_j = t₀ 2^{-j}`, `j = 0..=levels`.
#[derive(Clone, Copy, Debug)]
pub struct TauOpts {
    pub t0: f64,
    pub levels: usize,
    /// Required agreement of successive extrapolants, and of the two labelings.
    pub tol: f64,
}

impl Default for TauOpts {
    fn default() -> Self {
        TauOpts { t0: 1e-2, levels: 20, tol: 1e-6 }
    }
}

const MAX_COLS: usize = 8;

/// Richardson extrapolation to `t = 0` of samples at `t_j = t₀ 2^{-j}` for
/// expansions in powers of `t^{1/2}`. Returns the extrapolant with the
/// smallest change along its column, and that change.
pub fn richardson_half(vals: &[Complex64]) -> (Complex64, f64) {
    let n = vals.len();
    if n == 0 {
        return (Complex64::new(f64::NAN, 0.0), f64::INFINITY);
    }
    let mut prev: Vec<Complex64> = vals.to_vec();
    let mut best = (vals[n - 1], if n > 1 { (vals[n - 1] - vals[n - 2]).norm() } else { f64::INFINITY });
    for m in 1..MAX_COLS.min(n) {
        let f = 2f64.powf(m as f64 / 2.0);
        let cur: Vec<Complex64> = (1..prev.len()).map(|j| (f * prev[j] - prev[j - 1]) / (f - 1.0)).collect();
        for j in 1..cur.len() {
            let d = (cur[j] - cur[j - 1]).norm();
            if d < best.1 {
                best = (cur[j], d);
            }
        }
        prev = cur;
    }
    best
}

fn extrapolate_ext(seq: &[Complex64], tol: f64) -> Result<Ext, ModuliError> {
    let last = seq.last().map_or(0.0, |x| x.norm());
    let first = seq.first().map_or(0.0, |x| x.norm());
    if seq.iter().any(|x| !x.is_finite()) {
        return Ok(Ext::Infinity);
    }
    if last > 1.0 && last > 8.0 * first {
        let inv: Vec<Complex64> = seq.iter().map(|x| 1.0 / x).collect();
        let (v, err) = richardson_half(&inv);
        if v.norm() <= 1e-6 && err <= 1e-6 {
            return Ok(Ext::Infinity);
        }
        if err <= tol * v.norm() {
            return Ok(Ext::Finite(1.0 / v));
        }
        return Err(ModuliError::NoConvergence(format!("reciprocal sequence: change {err:e}")));
    }
    let (v, err) = richardson_half(seq);
    if err <= tol * 1f64.max(v.norm()) {
        Ok(Ext::Finite(v))
    } else {
        Err(ModuliError::NoConvergence(format!("extrapolation change {err:e} exceeds tolerance")))
    }
}

/// Fewest grid levels accepted before the sampling stops at a degenerate point.
const MIN_LEVELS: usize = 8;

/// `τ² = lim (α^q - 1)²/(1 - αβ)` from multipliers sampled on the grid. Both
/// labelings are extrapolated and must agree.
pub fn tau_squared_numeric(delta: &DiskFamily, q: usize, k: usize, opts: &TauOpts) -> Result<Ext, ModuliError> {
    let z = zeta(q, k);
    let zi = 1.0 / z;
    let mut ra = Vec::with_capacity(opts.levels + 1);
    let mut rb = Vec::with_capacity(opts.levels + 1);
    let mut prev: Option<(Complex64, Complex64)> = None;
    for j in 0..=opts.levels {
        let t = opts.t0 / 2f64.powi(j as i32);
        let m = match delta.multipliers_at(t) {
            Ok(m) if m.iter().all(|x| x.is_finite()) => m,
            // deep levels of a coefficient path run out of precision
            _ if j >= MIN_LEVELS => break,
            Ok(_) => return Err(ModuliError::NoConvergence(format!("multipliers not finite at t = {t:e}"))),
            Err(e) => return Err(e),
        };
        let (al, be) = label(&m, z, zi, prev);
        prev = Some((al, be));
        let eps = 1.0 - al * be;
        if eps.norm() < 1e-13 {
            if j >= MIN_LEVELS {
                break;
            }
            if eps.norm() == 0.0 {
                return Ok(Ext::Infinity);
            }
        }
        ra.push((al.powu(q as u32) - 1.0).powu(2) / eps);
        rb.push((be.powu(q as u32) - 1.0).powu(2) / eps);
    }
    let a = extrapolate_ext(&ra, opts.tol)?;
    let b = extrapolate_ext(&rb, opts.tol)?;
    if !a.close(&b, opts.tol) {
        return Err(ModuliError::NoConvergence(format!("labelings disagree: {a:?} vs {b:?}")));
    }
    Ok(a)
}

/// Pick the multipliers tending to `ζ` and `1/ζ`. When `ζ = 1/ζ` the pair is
/// labeled by continuity with the previous grid point, whose distance to `ζ`
/// shrinks by about `2^{-1/2}` per halving of `t`.
fn label(m: &[Complex64; 3], z: Complex64, zi: Complex64, prev: Option<(Complex64, Complex64)>) -> (Complex64, Complex64) {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| (m[i] - z).norm().partial_cmp(&(m[j] - z).norm()).unwrap());
    if (z - zi).norm() > 1e-9 {
        let a = idx[0];
        let b = (0..3).filter(|&i| i != a).min_by(|&i, &j| (m[i] - zi).norm().partial_cmp(&(m[j] - zi).norm()).unwrap()).unwrap();
        return (m[a], m[b]);
    }
    let (x, y) = (m[idx[0]], m[idx[1]]);
    match prev {
        Some((pa, _)) => {
            let guess = z + (pa - z) / 2f64.sqrt();
            if (x - guess).norm() <= (y - guess).norm() {
                (x, y)
            } else {
                (y, x)
            }
        }
        None => (x, y),
    }
}

/// `(q, k)` of the base point `[Λ_ζ]`, or `None` when the base is elsewhere.
/// Matched on `s = ζ + 1/ζ`, which is well conditioned even where `ζ` is not.
pub fn base_root(base: &ModuliPoint2) -> Option<(usize, usize)> {
    if !base.is_boundary() || base.x[0].norm() == 0.0 {
        return None;
    }
    let s = base.x[1] / base.x[0];
    for q in 2..=64usize {
        for k in 1..=q / 2 {
            if num_integer::Integer::gcd(&k, &q) != 1 {
                continue;
            }
            let z = zeta(q, k);
            if (s - (z + 1.0 / z)).norm() <= 1e-8 {
                return Some((q, k));
            }
        }
    }
    None
}

fn nf_symbolic(alpha: &[Complex64], beta: &[Complex64], q: usize) -> Ext {
    let one_minus_pow = |a: &[Complex64]| {
        let mut acc = vec![c1(1.0)];
        for _ in 0..q {
            acc = poly_mul(&acc, a);
        }
        acc[0] -= 1.0;
        poly_mul(&acc, &acc)
    };
    let mut eps: Vec<Complex64> = poly_mul(alpha, beta).iter().map(|c| -c).collect();
    eps[0] += 1.0;
    let ord = |v: &[Complex64]| {
        let scale = v.iter().map(|c| c.norm()).fold(1.0, f64::max);
        v.iter().position(|c| c.norm() > 1e-12 * scale)
    };
    let num = one_minus_pow(alpha);
    match (ord(&num), ord(&eps)) {
        (_, None) => Ext::Infinity,
        (None, Some(_)) => Ext::Finite(c1(0.0)),
        (Some(i), Some(j)) if i > j => Ext::Finite(c1(0.0)),
        (Some(i), Some(j)) if i < j => Ext::Infinity,
        (Some(i), Some(j)) => Ext::Finite(num[i] / eps[j]),
    }
}

/// Closed forms: `(b - a)/b` on the line `L_{(a:b)}` (q = 2) and
/// `-q²a²ζ³ / (b²(ζ² - 1)²(ζ - 1)²)` on the conic `C_{(a²:b²)}` (q > 2).
pub fn tau_squared_closed_form(delta: &DiskFamily, q: usize) -> Result<Ext, ModuliError> {
    match delta {
        DiskFamily::Line { a, b } => {
            if q != 2 {
                return Err(ModuliError::Mismatch(format!("lines describe the fiber over [Λ₋₁], not q = {q}")));
            }
            Ok(if b.norm() == 0.0 { Ext::Infinity } else { Ext::Finite((b - a) / b) })
        }
        DiskFamily::Conic { q: cq, k, a, b } => {
            if *cq != q || q < 3 {
                return Err(ModuliError::Mismatch(format!("conic for q = {cq} queried at q = {q}")));
            }
            if b.norm() == 0.0 {
                return Ok(Ext::Infinity);
            }
            let z = zeta(q, *k);
            let qq = (q * q) as f64;
            Ok(Ext::Finite(-qq * a * a * z.powu(3) / (b * b * (z * z - 1.0).powu(2) * (z - 1.0).powu(2))))
        }
        _ => Err(ModuliError::Mismatch("closed forms exist for lines and conics only".into())),
    }
}

/// `τ²(Δ)` at a base point `[Λ_ζ]`, ζ of order `q`.
pub fn tau_squared(delta: &DiskFamily, q: usize) -> Result<Ext, ModuliError> {
    tau_squared_with(delta, q, &TauOpts::default())
}

pub fn tau_squared_with(delta: &DiskFamily, q: usize, opts: &TauOpts) -> Result<Ext, ModuliError> {
    let base = delta.base()?;
    let (bq, k) = base_root(&base).ok_or(ModuliError::NotOnLocus(q))?;
    if bq != q {
        return Err(ModuliError::NotOnLocus(q));
    }
    match delta {
        DiskFamily::Line { .. } | DiskFamily::Conic { .. } => tau_squared_closed_form(delta, q),
        DiskFamily::Boundary { .. } => Ok(Ext::Infinity),
        DiskFamily::Nf { alpha, beta } => {
            let a = nf_symbolic(alpha, beta, q);
            let b = nf_symbolic(beta, alpha, q);
            if !a.close(&b, 1e-9) {
                return Err(ModuliError::NoConvergence(format!("labelings disagree: {a:?} vs {b:?}")));
            }
            Ok(a)
        }
        DiskFamily::CoeffPath { .. } => tau_squared_numeric(delta, q, k, opts),
    }
}

/// Limit of the Milnor point as `t → 0`, extrapolated coordinatewise in the
/// chart of the dominant coordinate and snapped to nearby boundary points.
fn numeric_base(delta: &DiskFamily) -> Result<ModuliPoint2, ModuliError> {
    let opts = TauOpts::default();
    let levels = 10;
    let pts: Vec<ModuliPoint2> =
        (0..=levels).map(|j| delta.milnor_at(opts.t0 / 2f64.powi(j))).collect::<Result<_, _>>()?;
    let last = &pts[levels as usize].x;
    let k = (0..3).max_by(|&i, &j| last[i].norm().partial_cmp(&last[j].norm()).unwrap()).unwrap();
    let mut x = [c1(0.0); 3];
    for (i, xi) in x.iter_mut().enumerate() {
        let seq: Vec<Complex64> = pts.iter().map(|p| p.x[i] / p.x[k]).collect();
        let (v, err) = richardson_half(&seq);
        if err > 1e-6 * 1f64.max(v.norm()) {
            return Err(ModuliError::NoConvergence(format!("base point coordinate {i}: change {err:e}")));
        }
        *xi = v;
    }
    let p = ModuliPoint2::new(x)?.snapped(1e-7);
    if let Some((q, kk)) = base_root(&p) {
        return Ok(boundary_point(&ProjPoint::finite(zeta(q, kk))));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn richardson_recovers_half_power_series() {
        let vals: Vec<Complex64> =
            (0..12).map(|j| 1e-2 / 2f64.powi(j)).map(|t: f64| c(3.0 + 2.0 * t.sqrt() - 5.0 * t + t.powf(1.5), 0.0)).collect();
        let (v, err) = richardson_half(&vals);
        assert!((v - 3.0).norm() < 1e-10 && err < 1e-8, "{v} {err}");
    }

    #[test]
    fn nf_tau_zero_and_infinite() {
        // α = -1 + t, β = -1 + 2t
        let d = DiskFamily::Nf { alpha: vec![c(-1.0, 0.0), c(1.0, 0.0)], beta: vec![c(-1.0, 0.0), c(2.0, 0.0)] };
        assert_eq!(tau_squared(&d, 2).unwrap(), Ext::Finite(c(0.0, 0.0)));
        // α = -1 + t, β = -1 - t - t²: ε = t³
        let d = DiskFamily::Nf { alpha: vec![c(-1.0, 0.0), c(1.0, 0.0)], beta: vec![c(-1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)] };
        assert_eq!(tau_squared(&d, 2).unwrap(), Ext::Infinity);
        // α = ζ + t, β = 1/ζ + 2t at q = 3
        let z = zeta(3, 1);
        let d = DiskFamily::Nf { alpha: vec![z, c(1.0, 0.0)], beta: vec![1.0 / z, c(2.0, 0.0)] };
        assert!(tau_squared(&d, 3).unwrap().close(&Ext::Finite(c(0.0, 0.0)), 1e-12));
        assert!(matches!(tau_squared(&d, 2), Err(ModuliError::NotOnLocus(2))));
    }

    #[test]
    fn closed_forms() {
        let l = |a: f64, b: f64| DiskFamily::Line { a: c(a, 0.0), b: c(b, 0.0) };
        assert_eq!(tau_squared(&l(0.0, 1.0), 2).unwrap(), Ext::Finite(c(1.0, 0.0)));
        assert_eq!(tau_squared(&l(1.0, 0.0), 2).unwrap(), Ext::Infinity);
        let conic = DiskFamily::Conic { q: 3, k: 1, a: c(0.0, 0.0), b: c(1.0, 0.0) };
        assert!(tau_squared(&conic, 3).unwrap().close(&Ext::Finite(c(0.0, 0.0)), 1e-15));
        assert!(tau_squared_closed_form(&l(0.0, 1.0), 3).is_err());
    }

    #[test]
    fn line_numeric_matches_closed_form() {
        let line = DiskFamily::Line { a: c(0.7, -0.2), b: c(1.3, 0.4) };
        let exact = tau_squared_closed_form(&line, 2).unwrap();
        let num = tau_squared_numeric(&line, 2, 1, &TauOpts::default()).unwrap();
        assert!(num.close(&exact, 1e-6), "{num:?} vs {exact:?}");
    }

    #[test]
    fn conic_numeric_matches_closed_form() {
        for (q, k) in [(3, 1), (4, 1), (5, 2)] {
            let conic = DiskFamily::Conic { q, k, a: c(0.6, 0.3), b: c(1.1, -0.5) };
            let exact = tau_squared_closed_form(&conic, q).unwrap();
            let num = tau_squared_numeric(&conic, q, k, &TauOpts::default()).unwrap();
            assert!(num.close(&exact, 1e-6), "q={q}: {num:?} vs {exact:?}");
        }
    }

    #[test]
    fn basilica_tau_is_one() {
        let d = DiskFamily::basilica();
        let base = d.base().unwrap();
        assert!(base.same(&ModuliPoint2::new([c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)]).unwrap(), 1e-9));
        let t2 = tau_squared(&d, 2).unwrap();
        assert!(t2.close(&Ext::Finite(c(1.0, 0.0)), 1e-6), "{t2:?}");
    }

    #[test]
    fn coeff_path_from_normal_form() {
        // α = -1 + st, β = -1 - st + et² gives τ² = 4s²/(e + s²).
        let (s, e) = (c(0.8, 0.1), c(0.5, -0.3));
        let d = DiskFamily::nf_as_coeff_path(&[c(-1.0, 0.0), s], &[c(-1.0, 0.0), -s, e]);
        let t2 = tau_squared(&d, 2).unwrap();
        let want = 4.0 * s * s / (e + s * s);
        assert!(t2.close(&Ext::Finite(want), 1e-6), "{t2:?} vs {want}");
    }

    #[test]
    fn json_roundtrip() {
        for d in [
            DiskFamily::basilica(),
            DiskFamily::Line { a: c(0.0, 0.0), b: c(1.0, 0.0) },
            DiskFamily::Conic { q: 3, k: 1, a: c(1.0, 0.0), b: c(2.0, 0.0) },
            DiskFamily::Nf { alpha: vec![c(-1.0, 0.0), c(1.0, 0.0)], beta: vec![c(-1.0, 0.0), c(2.0, 0.0)] },
            DiskFamily::Boundary { a: vec![c(-1.0, 0.0), c(1.0, 0.0)] },
        ] {
            assert_eq!(DiskFamily::from_json(&d.to_json()).unwrap(), d);
        }
        assert!(DiskFamily::from_json(&json!({"kind": "line", "a": 0})).unwrap_err().to_string().contains("'b'"));
    }
}
