//! Conformal barycenters of probability measures on S² and the normalization
//! `μ ↦ A_*μ` with `E(A_*μ) = 0`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::measure::{AtomicMeasure, PointCloud};
use crate::polyhom::ProjPoint;
use crate::ratbar::Mobius;
use crate::sphere::{self, chordal_v, dot, norm, stereo, stereo_inv, Vec3};

pub const EPS_UNIT: f64 = 1e-9;
pub const EPS_MASS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum BarycenterError {
    #[error("malformed measure: {0}")]
    Malformed(String),
    #[error("no convergence after {iterations} iterations (|E| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// A probability measure on the unit sphere: finitely many weighted unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMeasure {
    pub pts: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereMeasure {
    pub fn atomic(atoms: Vec<(Vec3, f64)>) -> Result<Self, BarycenterError> {
        let (pts, weights) = atoms.into_iter().unzip();
        Self::checked(pts, weights)
    }

    pub fn empirical(pts: Vec<Vec3>) -> Result<Self, BarycenterError> {
        let w = 1.0 / pts.len().max(1) as f64;
        let n = pts.len();
        Self::checked(pts, vec![w; n])
    }

    fn checked(pts: Vec<Vec3>, weights: Vec<f64>) -> Result<Self, BarycenterError> {
        if pts.is_empty() {
            return Err(BarycenterError::Malformed("empty measure".into()));
        }
        for (k, (v, m)) in pts.iter().zip(&weights).enumerate() {
            if (norm(v) - 1.0).abs() > EPS_UNIT {
                return Err(BarycenterError::Malformed(format!("point {k} is not a unit vector")));
            }
            if !(*m > 0.0) {
                return Err(BarycenterError::Malformed(format!("mass {k} is not positive")));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > EPS_MASS {
            return Err(BarycenterError::Malformed(format!("masses sum to {total}, not 1")));
        }
        Ok(SphereMeasure { pts, weights })
    }

    /// Stereographic image of a weighted point cloud, renormalized to mass 1.
    pub fn from_cloud(c: &PointCloud) -> Result<Self, BarycenterError> {
        let total: f64 = c.weights.iter().sum();
        if !(total > 0.0) {
            return Err(BarycenterError::Malformed("cloud has no mass".into()));
        }
        let pts = c.pts.iter().map(stereo).collect();
        let weights = c.weights.iter().map(|w| w / total).collect();
        Self::checked(pts, weights)
    }

    /// The listed atoms of a truncated atomic measure, renormalized.
    pub fn from_atomic(m: &AtomicMeasure) -> Result<Self, BarycenterError> {
        let mut c = m.to_cloud();
        c.tail = 0.0;
        Self::from_cloud(&c)
    }

    pub fn to_cloud(&self) -> PointCloud {
        PointCloud { pts: self.pts.iter().map(stereo_inv).collect(), weights: self.weights.clone(), tail: 0.0 }
    }

    pub fn pushforward(&self, a: &Mobius<Complex64>) -> SphereMeasure {
        SphereMeasure { pts: self.pts.iter().map(|v| apply_v(a, v)).collect(), weights: self.weights.clone() }
    }

    /// Coincident points merged, heaviest first.
    pub fn atoms(&self) -> Vec<(Vec3, f64)> {
        let mut order: Vec<usize> = (0..self.pts.len()).collect();
        order.sort_by(|&i, &j| self.pts[i].partial_cmp(&self.pts[j]).unwrap_or(std::cmp::Ordering::Equal));
        let mut out: Vec<(Vec3, f64)> = Vec::new();
        for i in order {
            match out.last_mut() {
                Some((p, m)) if chordal_v(p, &self.pts[i]) <= 1e-12 => *m += self.weights[i],
                _ => out.push((self.pts[i], self.weights[i])),
            }
        }
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// `[{v, mass}]` for atomic measures; `{points}` when the weights are uniform.
    pub fn to_json(&self) -> Value {
        let w0 = self.weights[0];
        if self.weights.iter().all(|w| *w == w0) && self.pts.len() > 1 {
            return json!({"points": self.pts});
        }
        json!(self.pts.iter().zip(&self.weights).map(|(v, m)| json!({"v": v, "mass": m})).collect::<Vec<_>>())
    }

    pub fn from_json(v: &Value) -> Result<Self, BarycenterError> {
        let bad = |m: String| BarycenterError::Malformed(m);
        let vec3 = |x: &Value, what: &str| -> Result<Vec3, BarycenterError> {
            let a = x.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad(format!("{what}: expected [x, y, z]")))?;
            let mut out = [0.0; 3];
            for (k, c) in a.iter().enumerate() {
                out[k] = c.as_f64().ok_or_else(|| bad(format!("{what}: coordinate {k} is not a number")))?;
            }
            Ok(out)
        };
        if let Some(pts) = v.get("points") {
            let arr = pts.as_array().ok_or_else(|| bad("field 'points' must be an array".into()))?;
            let pts = arr.iter().enumerate().map(|(k, x)| vec3(x, &format!("points[{k}]"))).collect::<Result<_, _>>()?;
            return Self::empirical(pts);
        }
        let arr = v.as_array().ok_or_else(|| bad("expected [{v, mass}] or {points}".into()))?;
        let mut atoms = Vec::new();
        for (k, a) in arr.iter().enumerate() {
            let p = vec3(a.get("v").ok_or_else(|| bad(format!("[{k}].v missing")))?, &format!("[{k}].v"))?;
            let m = a.get("mass").and_then(Value::as_f64).ok_or_else(|| bad(format!("[{k}].mass missing")))?;
            atoms.push((p, m));
        }
        Self::atomic(atoms)
    }
}

fn apply_v(a: &Mobius<Complex64>, v: &Vec3) -> Vec3 {
    stereo(&a.apply(&stereo_inv(v)))
}

/// `E(μ) = ∫ ζ dμ(ζ)`.
pub fn euclidean_center(mu: &SphereMeasure) -> Vec3 {
    mu.pts.iter().zip(&mu.weights).fold([0.0; 3], |acc, (v, w)| sphere::add(&acc, &sphere::scale(v, *w)))
}

#[derive(Clone, Copy, Debug)]
pub struct BcOpts {
    pub eps_bc: f64,
    pub eps_atom: f64,
    pub max_iter: usize,
    /// Largest hyperbolic translation length per step.
    pub max_step: f64,
}

impl Default for BcOpts {
    fn default() -> Self {
        BcOpts { eps_bc: 1e-10, eps_atom: 1e-6, max_iter: 500, max_step: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BcStatus {
    /// `A` with `E(A_*μ) ≈ 0`, normalized to determinant 1.
    Centered(Mobius<Complex64>),
    AtomObstruction { point: Vec3, mass: f64 },
    /// Two clusters of mass ≈ ½ each: the barycenter escapes to the boundary.
    Degenerate { a: Vec3, b: Vec3 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarycenterResult {
    pub status: BcStatus,
    pub iterations: usize,
    /// `|E|` of the final pushforward.
    pub residual: f64,
}

impl BarycenterResult {
    pub fn map(&self) -> Option<&Mobius<Complex64>> {
        match &self.status {
            BcStatus::Centered(m) => Some(m),
            _ => None,
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            BcStatus::Centered(_) => "Centered",
            BcStatus::AtomObstruction { .. } => "AtomObstruction",
            BcStatus::Degenerate { .. } => "Degenerate",
        }
    }

    pub fn to_json(&self) -> Value {
        let cj = |z: &Complex64| json!([z.re, z.im]);
        let mut v = json!({"status": self.status_name(), "iterations": self.iterations, "residual": self.residual});
        match &self.status {
            BcStatus::Centered(m) => v["mobius"] = json!([[cj(&m.a), cj(&m.b)], [cj(&m.c), cj(&m.d)]]),
            BcStatus::AtomObstruction { point, mass } => {
                v["point"] = json!(point);
                v["mass"] = json!(mass);
            }
            BcStatus::Degenerate { a, b } => v["clusters"] = json!([a, b]),
        }
        v
    }
}

/// Rotation of Ĉ taking the direction `u` to the north pole.
fn rotation_to_north(u: &Vec3) -> Mobius<Complex64> {
    let p = stereo_inv(u);
    match p.affine() {
        None => Mobius::identity(),
        Some(&z) => {
            let s = (1.0 + z.norm_sqr()).sqrt().recip();
            Mobius { a: z.conj() * s, b: Complex64::new(s, 0.0), c: Complex64::new(-s, 0.0), d: z * s }
        }
    }
}

/// Hyperbolic translation of length `|v|` pushing mass away from `v/|v|`.
fn boost(v: &Vec3) -> Mobius<Complex64> {
    let s = norm(v);
    if s == 0.0 {
        return Mobius::identity();
    }
    let r = rotation_to_north(&sphere::scale(v, 1.0 / s));
    let d = Mobius {
        a: Complex64::new((-s / 2.0).exp(), 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new((s / 2.0).exp(), 0.0),
    };
    r.inverse().compose(&d).compose(&r)
}

fn unimodular(m: &Mobius<Complex64>) -> Mobius<Complex64> {
    let s = m.det().sqrt().inv();
    Mobius { a: m.a * s, b: m.b * s, c: m.c * s, d: m.d * s }
}

/// Solve `(∫(I - xxᵀ) dμ) v = E`, the Newton step for `E(boost(v)_*μ) = 0`.
fn newton_step(mu: &SphereMeasure, e: &Vec3) -> Vec3 {
    let mut j = [[0.0; 3]; 3];
    for (x, w) in mu.pts.iter().zip(&mu.weights) {
        for r in 0..3 {
            for c in 0..3 {
                j[r][c] += w * (if r == c { 1.0 } else { 0.0 } - x[r] * x[c]);
            }
        }
    }
    for (r, row) in j.iter_mut().enumerate() {
        row[r] += 1e-14;
    }
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&j);
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut m = j;
        for r in 0..3 {
            m[r][k] = e[r];
        }
        *o = det3(&m) / d;
    }
    out
}

fn obstruction(mu: &SphereMeasure, eps: f64) -> Option<BcStatus> {
    let atoms = mu.atoms();
    let heavy: Vec<&(Vec3, f64)> = atoms.iter().filter(|a| a.1 >= 0.5 - eps).collect();
    match heavy.as_slice() {
        [] => None,
        [a] => Some(BcStatus::AtomObstruction { point: a.0, mass: a.1 }),
        [a, b, ..] => Some(BcStatus::Degenerate { a: a.0, b: b.0 }),
    }
}

/// Mass within chordal radius `r` of `c`.
fn cap_mass(mu: &SphereMeasure, c: &Vec3, r: f64) -> f64 {
    mu.pts.iter().zip(&mu.weights).filter(|(x, _)| chordal_v(x, c) <= r).map(|(_, w)| w).sum()
}

/// Damped Newton iteration on `E(A_*μ) = 0` over hyperbolic translations.
pub fn barycenter_normalize(mu: &SphereMeasure) -> Result<BarycenterResult, BarycenterError> {
    barycenter_normalize_with(mu, &BcOpts::default())
}

pub fn barycenter_normalize_with(mu: &SphereMeasure, opts: &BcOpts) -> Result<BarycenterResult, BarycenterError> {
    if let Some(status) = obstruction(mu, opts.eps_atom) {
        return Ok(BarycenterResult { status, iterations: 0, residual: norm(&euclidean_center(mu)) });
    }
    let mut total = Mobius::identity();
    let mut cur = mu.clone();
    let mut e = euclidean_center(&cur);
    for it in 0..opts.max_iter {
        let r = norm(&e);
        if r <= opts.eps_bc {
            return Ok(BarycenterResult { status: BcStatus::Centered(unimodular(&total)), iterations: it, residual: r });
        }
        let mut v = newton_step(&cur, &e);
        if !norm(&v).is_finite() || dot(&v, &e) <= 0.0 {
            v = sphere::scale(&e, 2.0 * r.min(0.999).atanh() / r);
        }
        let len = norm(&v);
        if len > opts.max_step {
            v = sphere::scale(&v, opts.max_step / norm(&v));
        }
        total = unimodular(&boost(&v).compose(&total));
        cur = mu.pushforward(&total);
        e = euclidean_center(&cur);
    }
    let r = norm(&e);
    // Stalled near the boundary: look for two antipodal clusters of mass ≈ ½.
    if r > 0.0 {
        let u = sphere::scale(&e, 1.0 / r);
        let anti = sphere::scale(&u, -1.0);
        let (ma, mb) = (cap_mass(&cur, &u, 0.1), cap_mass(&cur, &anti, 0.1));
        if ma >= 0.45 && mb >= 0.45 {
            let inv = total.inverse();
            return Ok(BarycenterResult {
                status: BcStatus::Degenerate { a: apply_v(&inv, &u), b: apply_v(&inv, &anti) },
                iterations: opts.max_iter,
                residual: r,
            });
        }
    }
    Err(BarycenterError::NoConvergence { iterations: opts.max_iter, residual: r })
}

/// Normalize a batch of measures in parallel.
pub fn normalize_all(mus: &[SphereMeasure], opts: &BcOpts) -> Vec<Result<BarycenterResult, BarycenterError>> {
    mus.par_iter().map(|m| barycenter_normalize_with(m, opts)).collect()
}

/// The normalized measure `A_*μ`, or `None` when the barycenter is undefined.
pub fn barycentered(mu: &SphereMeasure) -> Result<Option<SphereMeasure>, BarycenterError> {
    Ok(barycenter_normalize(mu)?.map().map(|a| mu.pushforward(a)))
}

/// Chordal radius of the smallest cap, centred at a support point, holding mass ≥ `m`.
pub fn smallest_cap_radius(mu: &SphereMeasure, m: f64, max_centers: usize) -> f64 {
    let step = (mu.pts.len() / max_centers.max(1)).max(1);
    let mut best = f64::INFINITY;
    for c in mu.pts.iter().step_by(step) {
        let mut d: Vec<(f64, f64)> = mu.pts.iter().zip(&mu.weights).map(|(x, w)| (chordal_v(x, c), *w)).collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut acc = 0.0;
        for (r, w) in d {
            acc += w;
            if acc >= m {
                best = best.min(r);
                break;
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
pub struct AnnulusOpts {
    /// Cluster mass threshold is `½ - eps`.
    pub eps: f64,
    /// Final cluster radius below which the clusters count as pinched.
    pub r_final: f64,
    /// Required shrink factor between the first and last measure.
    pub shrink: f64,
    pub max_centers: usize,
}

impl Default for AnnulusOpts {
    fn default() -> Self {
        AnnulusOpts { eps: 0.05, r_final: 0.05, shrink: 0.25, max_centers: 400 }
    }
}

/// Whether a sequence carries a cluster of mass ≥ ½ - ε whose enclosing cap
/// shrinks to a point, i.e. round annuli of growing modulus separate two
/// halves of the mass.
pub fn separating_annulus_test(seq: &[SphereMeasure]) -> bool {
    separating_annulus_test_with(seq, &AnnulusOpts::default())
}

pub fn separating_annulus_test_with(seq: &[SphereMeasure], opts: &AnnulusOpts) -> bool {
    let radii: Vec<f64> = seq.iter().map(|m| smallest_cap_radius(m, 0.5 - opts.eps, opts.max_centers)).collect();
    match (radii.first(), radii.last()) {
        (Some(&r0), Some(&rk)) if radii.len() >= 2 => rk <= opts.r_final && rk <= opts.shrink * r0.max(opts.r_final),
        _ => false,
    }
}

/// Sorted pairwise chordal distances among the `k` heaviest atoms: invariant
/// under rotations of the sphere.
pub fn rotation_invariant_summary(mu: &SphereMeasure, k: usize) -> Vec<f64> {
    let atoms = mu.atoms();
    let top: Vec<&Vec3> = atoms.iter().take(k).map(|a| &a.0).collect();
    let mut d = Vec::new();
    for i in 0..top.len() {
        for j in i + 1..top.len() {
            d.push(chordal_v(top[i], top[j]));
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    d
}

/// `A` is a rotation of the sphere when its unimodular matrix is unitary.
pub fn is_rotation(a: &Mobius<Complex64>, tol: f64) -> bool {
    let m = unimodular(a);
    let (p, q, r, s) = (m.a, m.b, m.c, m.d);
    let e1 = (p.norm_sqr() + q.norm_sqr() - 1.0).abs();
    let e2 = (r.norm_sqr() + s.norm_sqr() - 1.0).abs();
    let e3 = (p * r.conj() + q * s.conj()).norm();
    e1.max(e2).max(e3) <= tol
}

pub fn point_to_vec(p: &ProjPoint<Complex64>) -> Vec3 {
    stereo(p)
}
