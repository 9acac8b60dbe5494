use num_complex::Complex64;
use num_rational::BigRational;

use super::scalar::rational_approx;
use super::{uni, GaussRat, HomPoly, PolyError, ProjPoint, Pt, Scalar, Tol};

/// A root with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Root<S> {
    pub point: Pt<S>,
    pub mult: usize,
}

/// Projective roots with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct RootList<S> {
    pub entries: Vec<Root<S>>,
}

impl<S: Scalar> Default for RootList<S> {
    fn default() -> Self {
        RootList { entries: Vec::new() }
    }
}

impl<S: Scalar> RootList<S> {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|r| r.mult).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Root<S>> {
        self.entries.iter()
    }

    pub fn find(&self, pt: &Pt<S>, tol: &Tol) -> Option<&Root<S>> {
        self.entries.iter().find(|r| r.point.same(pt, tol))
    }

    pub fn mult_at(&self, pt: &Pt<S>, tol: &Tol) -> usize {
        self.find(pt, tol).map_or(0, |r| r.mult)
    }

    /// Add `mult` at `pt`, merging with an existing equal point. Native
    /// coordinates win over approximate ones when merging.
    pub fn add(&mut self, pt: Pt<S>, mult: usize, tol: &Tol) {
        if mult == 0 {
            return;
        }
        if let Some(r) = self.entries.iter_mut().find(|r| r.point.same(&pt, tol)) {
            r.mult += mult;
            if !r.point.is_native() && pt.is_native() {
                r.point = pt;
            }
        } else {
            self.entries.push(Root { point: pt, mult });
        }
    }

    pub fn merge(&mut self, other: RootList<S>, scale: usize, tol: &Tol) {
        for r in other.entries {
            self.add(r.point, r.mult * scale, tol);
        }
    }
}

/// Projective roots of `p` with multiplicity (∞ appears with multiplicity
/// `deg p - deg_z p`).
pub fn roots<S: Scalar>(p: &HomPoly<S>, tol: &Tol) -> Result<RootList<S>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let n = p.degree();
    let scale = p.max_abs();
    let c = p.coeffs();
    let a = c.iter().take_while(|x| x.negligible(scale, COEFF_ZERO)).count();
    let b = c.iter().rev().take_while(|x| x.negligible(scale, COEFF_ZERO)).count();
    let mut out = RootList::default();
    if a > 0 {
        out.entries.push(Root { point: Pt::Native(ProjPoint::infinity()), mult: a });
    }
    if b > 0 {
        out.entries.push(Root { point: Pt::Native(ProjPoint::zero()), mult: b });
    }
    if a + b >= n {
        return Ok(out);
    }
    // Ascending coefficients of the part free of the roots 0 and ∞.
    let core: Vec<S> = c[a..=n - b].iter().rev().cloned().collect();
    let found = match S::BACKEND {
        super::Backend::Exact => exact_core_roots(&core)?,
        super::Backend::Float => float_core_roots(&core)?,
    };
    for (pt, m) in found {
        out.add(pt, m, tol);
    }
    debug_assert_eq!(out.total(), n);
    Ok(out)
}

const COEFF_ZERO: f64 = 1e-13;

fn exact_core_roots<S: Scalar>(core: &[S]) -> Result<Vec<(Pt<S>, usize)>, PolyError> {
    let mut out = Vec::new();
    for (g, m) in uni::squarefree(core) {
        let deg = uni::degree(&g).unwrap_or(0);
        if deg == 1 {
            let r = -(g[0].clone() / g[1].clone());
            out.push((Pt::Native(ProjPoint::finite(r)), m));
            continue;
        }
        let g64: Vec<Complex64> = g.iter().map(|x| x.to_c64()).collect();
        for r in aberth(&g64)? {
            let pt = recognize::<S>(&g, r)
                .map(|x| Pt::Native(ProjPoint::finite(x)))
                .unwrap_or(Pt::Approx(ProjPoint::finite(r)));
            out.push((pt, m));
        }
    }
    Ok(out)
}

/// Try to identify a numerical root of `g` as an exact Gaussian rational.
fn recognize<S: Scalar>(g: &[S], r: Complex64) -> Option<S> {
    let re = rational_approx(r.re, 1_000_000, 1e-10)?;
    let im = if r.im.abs() < 1e-12 * r.norm().max(1.0) {
        BigRational::from_integer(0.into())
    } else {
        rational_approx(r.im, 1_000_000, 1e-10)?
    };
    let s = S::from_gauss(&GaussRat::new(re, im));
    if uni::eval(g, &s).is_zero() {
        Some(s)
    } else {
        None
    }
}

fn float_core_roots<S: Scalar>(core: &[S]) -> Result<Vec<(Pt<S>, usize)>, PolyError> {
    let u: Vec<Complex64> = core.iter().map(|x| x.to_c64()).collect();
    Ok(clustered_roots(&u)?
        .into_iter()
        .map(|(r, m)| {
            let s = S::from_c64(r).expect("float backend");
            (Pt::Native(ProjPoint::finite(s)), m)
        })
        .collect())
}

/// Roots of an ascending complex polynomial (nonzero leading coefficient),
/// grouped into clusters with multiplicity.
pub fn clustered_roots(u: &[Complex64]) -> Result<Vec<(Complex64, usize)>, PolyError> {
    let raw = aberth(u)?;
    let mut out = Vec::new();
    cluster(&raw, u, 0, &mut out);
    for (c, m) in out.iter_mut().filter(|x| x.1 == 1) {
        *c = polish(u, *c, *m);
    }
    Ok(out)
}

const LADDER: [f64; 10] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
const CENTROID_TOL: f64 = 1e-10;

fn cluster(pts: &[Complex64], u: &[Complex64], level: usize, out: &mut Vec<(Complex64, usize)>) {
    let rho = LADDER[level];
    for group in single_linkage(pts, rho) {
        if group.len() == 1 {
            out.push((group[0], 1));
            continue;
        }
        let m = group.len();
        let c = polish(u, group.iter().sum::<Complex64>() / m as f64, m);
        if level + 1 == LADDER.len() || looks_multiple(u, c, m) {
            out.push((c, m));
        } else {
            cluster(&group, u, level + 1, out);
        }
    }
}

fn single_linkage(pts: &[Complex64], rho: f64) -> Vec<Vec<Complex64>> {
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let nx = p[k];
            p[k] = r;
            k = nx;
        }
        r
    }
    let proj: Vec<ProjPoint<Complex64>> = pts.iter().map(|&z| ProjPoint::finite(z)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if proj[i].chordal(&proj[j]) <= rho {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(pts[i]),
            None => groups.push((r, vec![pts[i]])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Does `u` have an m-fold root at (or very near) `c`? Each low Taylor
/// coefficient must be small against the size of the terms that produce it.
fn looks_multiple(u: &[Complex64], c: Complex64, m: usize) -> bool {
    let t = uni::taylor(u, &c);
    if m >= t.len() || t[m].norm() == 0.0 {
        return false;
    }
    let r = c.norm();
    (0..m).all(|j| {
        let mut scale = 0.0;
        let mut binom = 1.0;
        for (i, ui) in u.iter().enumerate().skip(j) {
            scale += binom * ui.norm() * r.powi((i - j) as i32);
            binom = binom * (i + 1) as f64 / (i + 1 - j) as f64;
        }
        t[j].norm() <= CENTROID_TOL * scale
    })
}

/// Newton on the (m-1)-th derivative, which has a simple root at an m-fold root.
fn polish(u: &[Complex64], c: Complex64, m: usize) -> Complex64 {
    let mut d = u.to_vec();
    for _ in 1..m {
        d = uni::derivative(&d);
    }
    let dd = uni::derivative(&d);
    let mut z = c;
    for _ in 0..8 {
        let f = uni::eval(&d, &z);
        let fp = uni::eval(&dd, &z);
        if fp.norm() == 0.0 || !f.is_finite() {
            break;
        }
        let step = f / fp;
        if !step.is_finite() || step.norm() > 1e-3 * z.norm().max(1.0) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Aberth–Ehrlich simultaneous iteration. `u` is ascending with nonzero
/// leading and constant coefficients not required; returns `deg u` roots.
pub fn aberth(u: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
    let u = uni::trim(u.to_vec());
    let n = u.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-u[0] / u[1]]);
    }
    let du = uni::derivative(&u);
    let mut z = initial_guesses(&u);
    let mut done = vec![false; n];
    for _ in 0..2000 {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (f, fp) = eval_pair(&u, &du, z[k]);
            if f.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let ratio = f / fp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        s += 1.0 / diff;
                    }
                }
            }
            let corr = ratio / (1.0 - ratio * s);
            if !corr.is_finite() {
                // Nudge off a coincidence and retry next sweep.
                let s = z[k].norm().max(1.0);
                z[k] += Complex64::new(1e-8, 1e-8) * s;
                all = false;
                continue;
            }
            z[k] -= corr;
            if corr.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(z);
        }
    }
    // Clustered multiple roots can stall the stopping rule while already being
    // as accurate as double precision allows; accept them if residuals are small.
    let scale: f64 = u.iter().map(|c| c.norm()).sum();
    let ok = z.iter().all(|&x| {
        let r = x.norm().max(1.0);
        uni::eval(&u, &x).norm() <= 1e-6 * scale * r.powi(n as i32)
    });
    if ok {
        Ok(z)
    } else {
        Err(PolyError::NoConvergence("Aberth iteration".into()))
    }
}

fn eval_pair(u: &[Complex64], du: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    (uni::eval(u, &z), uni::eval(du, &z))
}

/// Starting points on circles whose radii come from the Newton polygon.
fn initial_guesses(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len() - 1;
    let logs: Vec<f64> = u
        .iter()
        .map(|c| if c.norm() > 0.0 { c.norm().ln() } else { f64::NEG_INFINITY })
        .collect();
    // Upper convex hull of (k, log|u_k|).
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if logs[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (j as f64 - i as f64) * (logs[k] - logs[i]) - (k as f64 - i as f64) * (logs[j] - logs[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut z = Vec::with_capacity(n);
    let offset = 0.4;
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let cnt = j - i;
        let r = ((logs[i] - logs[j]) / cnt as f64).exp();
        for m in 0..cnt {
            let ang = 2.0 * std::f64::consts::PI * m as f64 / cnt as f64 + offset + 0.1 * z.len() as f64;
            z.push(Complex64::from_polar(r, ang));
        }
    }
    // If u[0] == 0 the hull misses the low end: roots at 0.
    while z.len() < n {
        z.push(Complex64::new(1e-3, 1e-3) * (z.len() as f64 + 1.0));
    }
    z
}

/// Approximate gcd of float polynomials by matching root clusters within
/// `tol.root`; also valid (but slower than Euclid) for the exact backend.
pub fn gcd_by_roots<S: Scalar>(p: &HomPoly<S>, q: &HomPoly<S>, tol: &Tol) -> Result<HomPoly<S>, PolyError> {
    let rp = roots(p, tol)?;
    let rq = roots(q, tol)?;
    let mut g = HomPoly::one();
    for r in rp.iter() {
        let m = r.mult.min(rq.mult_at(&r.point, tol));
        if m == 0 {
            continue;
        }
        let lin = match &r.point {
            Pt::Native(pt) => HomPoly::vanishing_at(pt),
            Pt::Approx(_) => return Err(PolyError::NotRepresentable),
        };
        g = g.mul(&lin.pow(m as u64));
    }
    Ok(g.normalized())
}
