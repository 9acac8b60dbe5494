//! Measures of maximal entropy by backward iteration, and weak-limit
//! experiments along degenerating families.

mod counter;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::barycenter::{barycenter_normalize, BarycenterError, BcStatus, SphereMeasure};
use crate::measure::{boundary_measure, weak_distance, AtomicMeasure, MeasureError, PointCloud, WeakOpts, DEFAULT_DEPTH};
use crate::moduli2::{base_root, f_family, interior_representative, tau_squared, DiskFamily, Ext, ModuliError, ModuliPoint2};
use crate::polyhom::{aberth, roots, HomPoly, ProjPoint, Scalar, Tol};
use crate::ratbar::{RatMap, RatbarError, RatbarPoint};
use crate::sphere::{self, stereo, stereo_inv};

pub use counter::{
    chi_formula, cross_ratio, default_p, degree_d_counterexample, f_a, f_an, fixed_point_cross_ratios, g_family,
    g_limit, h_a, h_family, h_invariant, hole_pair_chi, projective_gap, Counterexample,
};

#[derive(Debug, Error)]
pub enum MaxentError {
    #[error(transparent)]
    Ratbar(#[from] RatbarError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Barycenter(#[from] BarycenterError),
    #[error("map has holes; sampling needs a point of Rat_d")]
    HasHoles,
    #[error("degree {0} is below 2")]
    LowDegree(usize),
    #[error("backward orbit is stuck at an exceptional point")]
    Exceptional,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOpts {
    pub burn_in: usize,
    /// Independent backward walks; walk `k` draws from stream `k` of the seed.
    pub walks: usize,
}

impl Default for SampleOpts {
    fn default() -> Self {
        SampleOpts { burn_in: 50, walks: 32 }
    }
}

/// Samples approximating `μ_f`, reproducible from `(f, seed, counts)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    pub pts: Vec<ProjPoint<Complex64>>,
    pub seed: u64,
    pub burn_in: usize,
    pub n_samples: usize,
}

impl EmpiricalMeasure {
    pub fn to_cloud(&self) -> PointCloud {
        PointCloud::uniform(self.pts.clone())
    }

    pub fn to_sphere(&self) -> SphereMeasure {
        SphereMeasure { pts: self.pts.iter().map(stereo).collect(), weights: vec![1.0 / self.pts.len() as f64; self.pts.len()] }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "burn_in": self.burn_in,
            "n_samples": self.n_samples,
            "points": self.pts.iter().map(crate::measure::point_json).collect::<Vec<_>>(),
        })
    }
}

/// Preimages of `y` under `(p : q)`, listed with multiplicity.
fn preimages(p: &HomPoly<Complex64>, q: &HomPoly<Complex64>, y: &ProjPoint<Complex64>) -> Result<Vec<ProjPoint<Complex64>>, MaxentError> {
    let s = (y.z().norm_sqr() + y.w().norm_sqr()).sqrt();
    let (yz, yw) = (y.z() / s, y.w() / s);
    let c: Vec<Complex64> = p.coeffs().iter().zip(q.coeffs()).map(|(a, b)| yw * a - yz * b).collect();
    let d = c.len() - 1;
    let big = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let n_inf = c.iter().take_while(|x| x.norm() <= 1e-13 * big).count().min(d);
    // ascending coefficients of the affine part
    let u: Vec<Complex64> = c[n_inf..].iter().rev().copied().collect();
    let e = u.len() - 1;
    let mut out: Vec<ProjPoint<Complex64>> = (0..n_inf).map(|_| ProjPoint::infinity()).collect();
    match e {
        0 => {}
        1 => out.push(ProjPoint::finite(-u[0] / u[1])),
        2 => {
            let (a, b, cc) = (u[2], u[1], u[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let sgn = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
            let qq = -(b + sgn * disc) / 2.0;
            if qq.norm() == 0.0 {
                out.push(ProjPoint::zero());
                out.push(ProjPoint::zero());
            } else {
                out.push(ProjPoint::finite(qq / a));
                out.push(ProjPoint::finite(cc / qq));
            }
        }
        _ => out.extend(aberth(&u).map_err(RatbarError::from)?.into_iter().map(ProjPoint::finite)),
    }
    Ok(out)
}

fn random_point(rng: &mut ChaCha8Rng) -> ProjPoint<Complex64> {
    let h: f64 = rng.gen_range(-1.0..1.0);
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - h * h).sqrt();
    stereo_inv(&[r * th.cos(), r * th.sin(), h])
}

fn walk(
    p: &HomPoly<Complex64>,
    q: &HomPoly<Complex64>,
    seed: u64,
    k: usize,
    count: usize,
    burn_in: usize,
) -> Result<Vec<ProjPoint<Complex64>>, MaxentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    for _attempt in 0..5 {
        let mut x = random_point(&mut rng);
        let mut recent: Vec<ProjPoint<Complex64>> = Vec::new();
        for _ in 0..burn_in {
            let pre = preimages(p, q, &x)?;
            x = pre[rng.gen_range(0..pre.len())].clone();
            recent.push(x.clone());
        }
        let tail = &recent[recent.len().saturating_sub(10)..];
        if tail.len() >= 2 && tail.iter().all(|y| y.chordal(&tail[0]) <= 1e-9) {
            continue;
        }
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let pre = preimages(p, q, &x)?;
            x = pre[rng.gen_range(0..pre.len())].clone();
            out.push(x.clone());
        }
        return Ok(out);
    }
    Err(MaxentError::Exceptional)
}

/// Backward random iteration: each step picks one of the `d` preimages
/// (with multiplicity) uniformly.
pub fn sample_max_entropy<S: Scalar>(f: &RatbarPoint<S>, n_samples: usize, seed: u64) -> Result<EmpiricalMeasure, MaxentError> {
    sample_max_entropy_with(f, n_samples, seed, &SampleOpts::default())
}

pub fn sample_max_entropy_with<S: Scalar>(
    f: &RatbarPoint<S>,
    n_samples: usize,
    seed: u64,
    opts: &SampleOpts,
) -> Result<EmpiricalMeasure, MaxentError> {
    if f.is_degenerate() {
        return Err(MaxentError::HasHoles);
    }
    if f.degree() < 2 {
        return Err(MaxentError::LowDegree(f.degree()));
    }
    sample_map(&f.phi().to_c64(), n_samples, seed, opts)
}

fn sample_map(phi: &RatMap<Complex64>, n_samples: usize, seed: u64, opts: &SampleOpts) -> Result<EmpiricalMeasure, MaxentError> {
    let walks = opts.walks.max(1).min(n_samples.max(1));
    let chunks: Vec<Vec<ProjPoint<Complex64>>> = (0..walks)
        .into_par_iter()
        .map(|k| {
            let count = n_samples / walks + usize::from(k < n_samples % walks);
            walk(&phi.p, &phi.q, seed, k, count, opts.burn_in)
        })
        .collect::<Result<_, _>>()?;
    Ok(EmpiricalMeasure { pts: chunks.concat(), seed, burn_in: opts.burn_in, n_samples })
}

/// `f_*` of a cloud.
pub fn pushforward_cloud(phi: &RatMap<Complex64>, c: &PointCloud) -> Result<PointCloud, MaxentError> {
    let pts = c.pts.iter().map(|x| phi.eval(x)).collect::<Result<Vec<_>, _>>().map_err(RatbarError::from)?;
    Ok(PointCloud { pts, weights: c.weights.clone(), tail: c.tail })
}

/// Lévy distance between the laws of `|X - Y|` for independent `X, Y ~ μ`
/// and for `ν`. Invariant under rotations, and continuous for weak
/// convergence, so it compares barycentered measures modulo SO(3).
pub fn rotation_free_distance(mu: &SphereMeasure, nu: &SphereMeasure, seed: u64) -> f64 {
    let a = pair_law(mu, seed);
    let b = pair_law(nu, seed ^ 0x9e37_79b9);
    levy(&a, &b)
}

const PAIR_SAMPLES: usize = 200_000;

/// Sorted pair distances with cumulative weights.
fn pair_law(mu: &SphereMeasure, seed: u64) -> Vec<(f64, f64)> {
    let n = mu.pts.len();
    let mut v: Vec<(f64, f64)> = Vec::new();
    if n * n <= PAIR_SAMPLES {
        for i in 0..n {
            for j in 0..n {
                v.push((sphere::chordal_v(&mu.pts[i], &mu.pts[j]), mu.weights[i] * mu.weights[j]));
            }
        }
    } else {
        let mut cum = Vec::with_capacity(n);
        let mut acc = 0.0;
        for w in &mu.weights {
            acc += w;
            cum.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| {
            let u: f64 = rng.gen_range(0.0..acc);
            cum.partition_point(|c| *c < u).min(n - 1)
        };
        let w = 1.0 / PAIR_SAMPLES as f64;
        for _ in 0..PAIR_SAMPLES {
            let (i, j) = (draw(&mut rng), draw(&mut rng));
            v.push((sphere::chordal_v(&mu.pts[i], &mu.pts[j]), w));
        }
    }
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut acc = 0.0;
    for e in v.iter_mut() {
        acc += e.1;
        e.1 = acc;
    }
    v
}

fn cdf(law: &[(f64, f64)], x: f64) -> f64 {
    let k = law.partition_point(|e| e.0 <= x);
    if k == 0 {
        0.0
    } else {
        law[k - 1].1 / law.last().map_or(1.0, |e| e.1)
    }
}

fn levy(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let grid: Vec<f64> = a.iter().chain(b).map(|e| e.0).collect();
    let ok = |eps: f64| {
        grid.iter().all(|&x| {
            let (fa, fb) = (cdf(a, x), cdf(b, x));
            cdf(a, x - eps) - eps <= fb && fb <= cdf(a, x + eps) + eps && cdf(b, x - eps) - eps <= fa && fa <= cdf(b, x + eps) + eps
        })
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = (lo + hi) / 2.0;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Reciprocal of the smallest chordal distance between a root of `P` and a
/// root of `Q`: large near the boundary of Rat_d.
pub fn condition_number(phi: &RatMap<Complex64>) -> Result<f64, MaxentError> {
    let tol = Tol::default();
    let rp = roots(&phi.p, &tol).map_err(RatbarError::from)?;
    let rq = roots(&phi.q, &tol).map_err(RatbarError::from)?;
    let mut m = f64::INFINITY;
    for a in rp.iter() {
        for b in rq.iter() {
            m = m.min(a.point.approx().chordal(&b.point.approx()));
        }
    }
    Ok(if m == 0.0 { f64::INFINITY } else { 1.0 / m })
}

/// Condition number beyond which a grid point is not sampled.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub t: f64,
    pub distance: f64,
    pub barycenter_status: String,
    pub measure: EmpiricalMeasure,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    /// First grid value skipped by the condition-number guard.
    pub stopped_at: Option<f64>,
}

impl ExperimentReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("t,distance,barycenter_status\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.t, r.distance, r.barycenter_status));
        }
        s
    }

    /// Distances decrease along the grid, up to `allowed` inversions.
    pub fn monotone(&self, allowed: usize) -> bool {
        self.rows.windows(2).filter(|w| w[1].distance > w[0].distance).count() <= allowed
    }
}

fn map_at(family: &DiskFamily, t: f64) -> Result<RatMap<Complex64>, MaxentError> {
    family.map_at(t).ok_or_else(|| MaxentError::Invalid("family has no maps (boundary, line or conic descriptor)".into()))
}

/// The limit `f_0 = Δ(0)` as a point of Ratbar₂ and its truncated measure
/// with tail below 0.01.
/// The search starts at `depth_n` (default 6) and deepens in steps of 6.
pub fn predicted_limit(family: &DiskFamily, depth_n: Option<usize>) -> Result<AtomicMeasure, MaxentError> {
    let f0 = map_at(family, 0.0)?;
    let f = RatbarPoint::normalize(f0.p, f0.q)?;
    truncated_measure(&f, depth_n.unwrap_or(6))
}

fn truncated_measure<S: Scalar>(f: &RatbarPoint<S>, start: usize) -> Result<AtomicMeasure, MaxentError> {
    let mut depth = start.max(1);
    loop {
        let m = boundary_measure(f, depth)?;
        if m.tail_bound.to_f64() < 0.01 || depth >= DEFAULT_DEPTH {
            return Ok(m);
        }
        depth += 6;
    }
}

/// Samples `μ_{f_t}` along `t_grid` and measures the weak distance to the
/// atomic measure of the limit `f_0 ∉ I(2)`.
pub fn boundary_limit_experiment(
    family: &DiskFamily,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
    depth_n: Option<usize>,
) -> Result<ExperimentReport, MaxentError> {
    let limit = predicted_limit(family, depth_n)?.to_cloud();
    let mut rows = Vec::new();
    for &t in t_grid {
        let phi = map_at(family, t)?;
        if condition_number(&phi)? > MAX_CONDITION {
            return Ok(ExperimentReport { rows, stopped_at: Some(t) });
        }
        let m = sample_map(&phi, n_samples, seed, &SampleOpts::default())?;
        let distance = weak_distance(&m.to_cloud(), &limit, &WeakOpts::default());
        rows.push(ExperimentRow { t, distance, barycenter_status: "-".into(), measure: m });
    }
    Ok(ExperimentReport { rows, stopped_at: None })
}

/// Barycentered `μ_{f_t}` along the grid; the distance column is the
/// rotation-free distance to `reference` when one is given.
pub fn barycentered_experiment(
    family: &DiskFamily,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
    reference: Option<&SphereMeasure>,
) -> Result<(ExperimentReport, Vec<Option<SphereMeasure>>), MaxentError> {
    let mut rows = Vec::new();
    let mut normalized = Vec::new();
    for &t in t_grid {
        let phi = map_at(family, t)?;
        if condition_number(&phi)? > MAX_CONDITION {
            return Ok((ExperimentReport { rows, stopped_at: Some(t) }, normalized));
        }
        let m = sample_map(&phi, n_samples, seed, &SampleOpts::default())?;
        let mu = m.to_sphere();
        let (status, nu) = match barycenter_normalize(&mu) {
            Ok(r) => {
                let nu = r.map().map(|a| mu.pushforward(a));
                (r.status_name().to_string(), nu)
            }
            Err(BarycenterError::NoConvergence { .. }) => ("NoConvergence".to_string(), None),
            Err(e) => return Err(e.into()),
        };
        let distance = match (&nu, reference) {
            (Some(nu), Some(r)) => rotation_free_distance(nu, r, seed),
            _ => f64::NAN,
        };
        rows.push(ExperimentRow { t, distance, barycenter_status: status, measure: m });
        normalized.push(nu);
    }
    Ok((ExperimentReport { rows, stopped_at: None }, normalized))
}

/// The measure half of a point of X₂.
#[derive(Clone, Debug)]
pub enum X2Fiber {
    /// The barycentered measures escape every compact set.
    Infinity,
    Measure(SphereMeasure),
}

#[derive(Clone, Debug)]
pub struct X2Limit {
    pub base: ModuliPoint2,
    pub fiber: X2Fiber,
}

impl X2Limit {
    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.to_json(),
            "measure": match &self.fiber {
                X2Fiber::Infinity => json!("inf"),
                X2Fiber::Measure(m) => m.to_json(),
            },
        })
    }
}

/// Barycentered `μ_F` for `F_{q,τ,q}`, from its atoms with tail below 0.01.
pub fn barycentered_f_measure(q: usize, tau2: Complex64) -> Result<SphereMeasure, MaxentError> {
    let f = f_family(q, &tau2.sqrt(), q)?;
    let mu = SphereMeasure::from_atomic(&truncated_measure(&f, 6)?)?;
    let r = barycenter_normalize(&mu)?;
    match &r.status {
        BcStatus::Centered(a) => Ok(mu.pushforward(a)),
        _ => Err(MaxentError::Invalid(format!("μ_F for q = {q} has no barycenter ({})", r.status_name()))),
    }
}

/// Limit in `X₂ ⊂ M̄₂ × BCM/SO(3)` of the disk `Δ`. Interior bases are
/// sampled with `n_samples` points.
pub fn x2_limit(family: &DiskFamily, n_samples: usize, seed: u64) -> Result<X2Limit, MaxentError> {
    let base = family.base()?;
    if let Some((s1, s2)) = base.chart() {
        let f = match family.map_at(0.0) {
            Some(m) => m,
            None => interior_representative(s1, s2)?,
        };
        let mu = sample_map(&f, n_samples, seed, &SampleOpts::default())?.to_sphere();
        let r = barycenter_normalize(&mu)?;
        let a = r.map().ok_or_else(|| MaxentError::Invalid("sampled measure has no barycenter".into()))?;
        return Ok(X2Limit { fiber: X2Fiber::Measure(mu.pushforward(a)), base });
    }
    let fiber = match base_root(&base) {
        None => X2Fiber::Infinity,
        Some((q, _)) => match tau_squared(family, q)? {
            Ext::Infinity => X2Fiber::Infinity,
            Ext::Finite(t2) => X2Fiber::Measure(barycentered_f_measure(q, t2)?),
        },
    };
    Ok(X2Limit { base, fiber })
}

/// `f_t = (2z(z - w) : w(z - (1 + t)w)) → Λ₂` as `t → 0`.
pub fn lambda2_family() -> DiskFamily {
    let c = |x: f64| Complex64::new(x, 0.0);
    DiskFamily::CoeffPath {
        p: vec![HomPoly::new(vec![c(2.0), c(-2.0), c(0.0)])],
        q: vec![HomPoly::new(vec![c(0.0), c(1.0), c(-1.0)]), HomPoly::new(vec![c(0.0), c(0.0), c(-1.0)])],
    }
}

/// Normal-form family with `τ² = ∞` over `[Λ₋₁]`: `α = -1 + t`, `β = -1 - t - t²`.
pub fn parabolic_family() -> DiskFamily {
    let c = |x: f64| Complex64::new(x, 0.0);
    DiskFamily::nf_as_coeff_path(&[c(-1.0), c(1.0)], &[c(-1.0), c(-1.0), c(-1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb(p: &str, q: &str) -> RatbarPoint<Complex64> {
        RatbarPoint::parse(p, q, None, &[]).unwrap()
    }

    #[test]
    fn z_squared_lives_on_the_circle() {
        let m = sample_max_entropy(&rb("z^2", "w^2"), 4000, 7).unwrap();
        let near = m.pts.iter().filter(|p| p.affine().is_some_and(|z| (0.9..1.1).contains(&z.norm()))).count();
        assert!(near as f64 >= 0.99 * m.pts.len() as f64);
    }

    #[test]
    fn chebyshev_interval() {
        let m = sample_max_entropy(&rb("z^2 - 2w^2", "w^2"), 4000, 3).unwrap();
        assert!(m.pts.iter().all(|p| p.affine().is_some_and(|z| z.im.abs() < 1e-6 && z.re.abs() <= 2.0 + 1e-6)));
    }

    #[test]
    fn seed_determinism() {
        let f = rb("z^2 - w^2", "w^2");
        assert_eq!(sample_max_entropy(&f, 500, 11).unwrap(), sample_max_entropy(&f, 500, 11).unwrap());
        assert_ne!(sample_max_entropy(&f, 500, 11).unwrap(), sample_max_entropy(&f, 500, 12).unwrap());
    }

    #[test]
    fn exceptional_start_is_rejected_by_holes() {
        assert!(matches!(sample_max_entropy(&rb("z*w", "z^2"), 10, 0), Err(MaxentError::HasHoles)));
    }

    #[test]
    fn preimages_with_infinity() {
        // f = (z² : w²) over y = ∞: preimage ∞ twice
        let p = HomPoly::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let q = HomPoly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let pre = preimages(&p, &q, &ProjPoint::infinity()).unwrap();
        assert_eq!(pre.len(), 2);
        assert!(pre.iter().all(|x| x.is_infinity()));
    }

    #[test]
    fn levy_distance_basics() {
        let a = SphereMeasure::atomic(vec![([0.0, 0.0, 1.0], 0.5), ([0.0, 0.0, -1.0], 0.5)]).unwrap();
        let b = SphereMeasure::atomic(vec![([1.0, 0.0, 0.0], 0.5), ([-1.0, 0.0, 0.0], 0.5)]).unwrap();
        assert!(rotation_free_distance(&a, &b, 0) < 1e-6);
        let c = SphereMeasure::atomic(vec![([1.0, 0.0, 0.0], 0.5), ([0.0, 1.0, 0.0], 0.5)]).unwrap();
        assert!(rotation_free_distance(&a, &c, 0) > 0.1);
    }

    #[test]
    fn f_measures_have_barycenters() {
        for (q, t2) in [(2, 1.0), (2, 0.0), (3, 1.0)] {
            let mu = barycentered_f_measure(q, Complex64::new(t2, 0.0)).unwrap();
            assert!(sphere::norm(&crate::barycenter::euclidean_center(&mu)) <= 1e-10);
        }
    }
}
