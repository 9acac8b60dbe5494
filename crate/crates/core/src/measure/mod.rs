//! Atomic measures `μ_f` of boundary points and their atom masses.
//!
//! Atoms of `μ_f` are the iterated preimages of the holes. Masses come in two
//! forms: partial sums over the preimage tree (always exact rationals, since
//! every tree weight is an integer over a power of `d`), and closed forms
//! obtained from the forward orbit of an atom when that orbit is eventually
//! periodic.

mod weak;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::polyhom::{ProjPoint, Pt, RootList, Scalar};
use crate::ratbar::{RatbarError, RatbarPoint};
use crate::sphere;

pub use weak::{weak_distance, PointCloud, WeakOpts};

/// Default truncation depth of the preimage tree and of orbit sums.
pub const DEFAULT_DEPTH: usize = 40;
/// Default cap on the number of tree nodes enumerated by [`boundary_measure`].
pub const DEFAULT_NODE_BUDGET: usize = 20_000;

/// Atoms of a truncated tree that get an orbit-closing check.
const CLOSED_FORM_ATOMS: usize = 256;
/// Exact orbit points taller than this many bits continue in floating point.
const HEIGHT_CAP: u64 = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Ratbar(#[from] RatbarError),
    #[error("map has no holes; its measure is not atomic")]
    NotBoundary,
    #[error("point lies in the indeterminacy locus I(d)")]
    Indeterminate,
    #[error("malformed measure: {0}")]
    Malformed(String),
}

/// A mass, exact when every point identification behind it was exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass {
    Exact(BigRational),
    Float(f64),
}

impl Mass {
    pub fn zero() -> Self {
        Mass::Exact(BigRational::zero())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Mass::Exact(BigRational::new(n.into(), d.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Mass::Exact(r) => rat_f64(r),
            Mass::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mass::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Mass::Exact(r) => Some(r),
            Mass::Float(_) => None,
        }
    }

    pub fn add(&self, o: &Mass) -> Mass {
        match (self, o) {
            (Mass::Exact(a), Mass::Exact(b)) => Mass::Exact(a + b),
            _ => Mass::Float(self.to_f64() + o.to_f64()),
        }
    }

    pub fn sub(&self, o: &Mass) -> Mass {
        match (self, o) {
            (Mass::Exact(a), Mass::Exact(b)) => Mass::Exact(a - b),
            _ => Mass::Float(self.to_f64() - o.to_f64()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Mass::Exact(r) => json!(r.to_string()),
            Mass::Float(x) => json!(x),
        }
    }

    pub fn from_json(v: &Value) -> Result<Mass, String> {
        match v {
            Value::String(s) => {
                let r = crate::polyhom::parse_rational(s)?;
                Ok(Mass::Exact(r))
            }
            Value::Number(n) => n.as_f64().map(Mass::Float).ok_or_else(|| "bad mass".into()),
            _ => Err("mass must be \"p/q\" or a number".into()),
        }
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mass::Exact(r) => write!(f, "{r}"),
            Mass::Float(x) => write!(f, "{x}"),
        }
    }
}

pub(crate) fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: ProjPoint<Complex64>,
    pub mass: Mass,
}

/// Finitely many atoms plus a bound on the mass not listed.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
    pub tail_bound: Mass,
    /// Depth of the preimage tree actually enumerated.
    pub depth: usize,
}

impl AtomicMeasure {
    /// Atoms are kept sorted by decreasing mass.
    pub fn new(mut atoms: Vec<Atom>, tail_bound: Mass, depth: usize) -> Self {
        atoms.sort_by(|a, b| b.mass.to_f64().partial_cmp(&a.mass.to_f64()).unwrap_or(std::cmp::Ordering::Equal));
        AtomicMeasure { atoms, tail_bound, depth }
    }

    pub fn total(&self) -> Mass {
        self.atoms.iter().fold(self.tail_bound.clone(), |acc, a| acc.add(&a.mass))
    }

    /// Mass of the atom at `p` (chordal tolerance `tol`), zero if absent.
    pub fn mass_at(&self, p: &ProjPoint<Complex64>, tol: f64) -> Mass {
        self.atoms.iter().find(|a| a.point.chordal(p) <= tol).map_or(Mass::zero(), |a| a.mass.clone())
    }

    pub fn max_atom(&self) -> Option<&Atom> {
        self.atoms.first()
    }

    pub fn to_cloud(&self) -> PointCloud {
        PointCloud {
            pts: self.atoms.iter().map(|a| a.point.clone()).collect(),
            weights: self.atoms.iter().map(|a| a.mass.to_f64()).collect(),
            tail: self.tail_bound.to_f64(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "atoms": self.atoms.iter().map(|a| json!({
                "point": point_json(&a.point),
                "mass": a.mass.to_json(),
            })).collect::<Vec<_>>(),
            "tail_bound": self.tail_bound.to_json(),
            "depth": self.depth,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, MeasureError> {
        let bad = |m: &str| MeasureError::Malformed(m.to_string());
        let atoms = v.get("atoms").and_then(Value::as_array).ok_or_else(|| bad("field 'atoms' missing"))?;
        let mut out = Vec::new();
        for (k, a) in atoms.iter().enumerate() {
            let pv = a.get("point").ok_or_else(|| bad(&format!("atoms[{k}].point missing")))?;
            let point = crate::ratbar::point_from_json::<Complex64>(pv)
                .map_err(|e| bad(&format!("atoms[{k}].point: {e}")))?;
            let mass = Mass::from_json(a.get("mass").ok_or_else(|| bad(&format!("atoms[{k}].mass missing")))?)
                .map_err(|e| bad(&format!("atoms[{k}].mass: {e}")))?;
            out.push(Atom { point, mass });
        }
        let tail = match v.get("tail_bound") {
            None => Mass::zero(),
            Some(t) => Mass::from_json(t).map_err(|e| bad(&format!("tail_bound: {e}")))?,
        };
        let depth = v.get("depth").and_then(Value::as_u64).unwrap_or(0) as usize;
        Ok(AtomicMeasure::new(out, tail, depth))
    }
}

pub fn point_json(p: &ProjPoint<Complex64>) -> Value {
    if p.is_infinity() {
        json!("inf")
    } else {
        json!([p.z().re, p.z().im])
    }
}

/// Mass at one point with an error bound; `error = 0` for closed forms.
#[derive(Clone, Debug, PartialEq)]
pub struct MassEstimate {
    pub value: Mass,
    pub error: f64,
    pub closed_form: bool,
}

fn check_defined<S: Scalar>(f: &RatbarPoint<S>) -> Result<(), MeasureError> {
    if f.in_indeterminacy() {
        return Err(MeasureError::Indeterminate);
    }
    Ok(())
}

fn tame<S: Scalar>(p: Pt<S>) -> Pt<S> {
    match &p {
        Pt::Native(x) if x.z().height_bits() > HEIGHT_CAP => Pt::Approx(x.to_c64()),
        _ => p,
    }
}

/// `μ_f({z}) = (1/d) Σ_n m_z(φⁿ) d_{φⁿ(z)}(f) / dⁿ`, summed along the forward
/// orbit of `z`. An eventually periodic orbit gives the exact value as a
/// geometric series; otherwise the sum stops after `depth_n` steps and the
/// remainder is bounded.
pub fn mass_at<S: Scalar>(f: &RatbarPoint<S>, z: &Pt<S>, depth_n: usize) -> Result<MassEstimate, MeasureError> {
    check_defined(f)?;
    let d = BigInt::from(f.degree());
    let delta = f.phi().degree();
    let tol = *f.tol();
    let mut exact = S::BACKEND == crate::polyhom::Backend::Exact;

    let mut xs: Vec<Pt<S>> = Vec::new();
    let mut terms: Vec<BigRational> = Vec::new();
    // m_z(φⁿ) for the current n.
    let mut ms: Vec<BigInt> = Vec::new();
    let mut m = BigInt::one();
    let mut dpow = BigInt::one();
    let mut x = f.snap_to_hole(z).unwrap_or_else(|| tame(z.clone()));
    for n in 0..=depth_n {
        exact &= x.is_native();
        terms.push(BigRational::new(&m * BigInt::from(f.depth_at(&x)), dpow.clone()));
        ms.push(m.clone());
        xs.push(x.clone());
        if n == depth_n {
            break;
        }
        m *= BigInt::from(f.phi().local_degree(&x, &tol).map_err(RatbarError::from)?);
        if m.is_zero() {
            // Constant φ: no later terms.
            let v = terms.iter().fold(BigRational::zero(), |a, t| a + t) / BigRational::from_integer(d.clone());
            return Ok(estimate(v, 0.0, true, exact));
        }
        dpow *= &d;
        let y = f.phi().eval_pt(&x).map_err(RatbarError::from)?;
        let y = f.snap_to_hole(&y).unwrap_or_else(|| tame(y));
        if let Some(j) = xs.iter().position(|p| p.same(&y, &tol)) {
            // Multiplier of the cycle in m and in dⁿ.
            let big_m = BigRational::new(m.clone(), ms[j].clone());
            let l = xs.len() - j;
            let ratio = big_m / BigRational::from_integer(num_traits::pow(d.clone(), l));
            let prefix: BigRational = terms[..j].iter().fold(BigRational::zero(), |a, t| a + t);
            let per: BigRational = terms[j..].iter().fold(BigRational::zero(), |a, t| a + t);
            let v = (prefix + per / (BigRational::one() - ratio)) / BigRational::from_integer(d.clone());
            exact &= y.is_native();
            return Ok(estimate(v, 0.0, true, exact));
        }
        x = y;
    }
    let v = terms.iter().fold(BigRational::zero(), |a, t| a + t) / BigRational::from_integer(d.clone());
    // Σ_{n>N} m_n D/d^{n+1} ≤ m_N·D_max·δ / (d^{N+1}(d-δ)).
    let dmax = f.holes().iter().map(|r| r.mult).max().unwrap_or(0) as f64;
    let df = f.degree() as f64;
    let dl = delta as f64;
    let err = if delta == 0 {
        0.0
    } else {
        let log = ms.last().map_or(0.0, big_log) + dmax.ln() + dl.ln()
            - (depth_n as f64 + 1.0) * df.ln()
            - (df - dl).ln();
        log.exp()
    };
    Ok(estimate(v, err, false, exact))
}

fn estimate(v: BigRational, err: f64, closed: bool, exact: bool) -> MassEstimate {
    MassEstimate {
        value: if exact { Mass::Exact(v.clone()) } else { Mass::Float(rat_f64(&v)) },
        error: err,
        closed_form: closed,
    }
}

fn big_log(m: &BigInt) -> f64 {
    let bits = m.bits();
    if bits < 1000 {
        m.to_f64().unwrap_or(f64::MAX).ln()
    } else {
        (bits as f64) * std::f64::consts::LN_2
    }
}

/// `d_z(fⁿ)/dⁿ`, a lower bound for `μ_f({z})` that increases with `n`.
pub fn mass_via_depths<S: Scalar>(f: &RatbarPoint<S>, z: &Pt<S>, n: usize) -> Result<BigRational, MeasureError> {
    check_defined(f)?;
    let dz = f.depth_of_iterate(z, n)?;
    let den = num_traits::pow(BigInt::from(f.degree()), n);
    Ok(BigRational::new(BigInt::from(dz), den))
}

/// Options for [`boundary_measure_with`].
#[derive(Clone, Copy, Debug)]
pub struct TreeOpts {
    pub depth_n: usize,
    pub node_budget: usize,
}

impl Default for TreeOpts {
    fn default() -> Self {
        TreeOpts { depth_n: DEFAULT_DEPTH, node_budget: DEFAULT_NODE_BUDGET }
    }
}

pub fn boundary_measure<S: Scalar>(f: &RatbarPoint<S>, depth_n: usize) -> Result<AtomicMeasure, MeasureError> {
    boundary_measure_with(f, TreeOpts { depth_n, ..TreeOpts::default() })
}

/// `μ_f` truncated to the preimage tree of depth `depth_n` (or less, if the
/// node budget runs out). Atoms whose orbit closes up get their exact mass;
/// the others keep their tree partial sums, and `tail_bound = 1 - Σ masses`.
pub fn boundary_measure_with<S: Scalar>(f: &RatbarPoint<S>, opts: TreeOpts) -> Result<AtomicMeasure, MeasureError> {
    if !f.is_degenerate() {
        return Err(MeasureError::NotBoundary);
    }
    check_defined(f)?;
    let d = BigInt::from(f.degree());
    let tol = *f.tol();
    let mut acc = PointMap::<S>::new(tol.root);
    let mut level: RootList<S> = f.holes().clone();
    let mut dpow = d.clone();
    let mut depth = 0;
    let mut nodes = level.len();
    loop {
        for r in level.iter() {
            acc.add(&r.point, BigRational::new(BigInt::from(r.mult), dpow.clone()), &tol);
        }
        if depth == opts.depth_n {
            break;
        }
        let next = preimage_level_fast(f, &level)?;
        if next.is_empty() || nodes + next.len() > opts.node_budget {
            break;
        }
        nodes += next.len();
        level = next;
        depth += 1;
        dpow *= &d;
    }

    let mut atoms = Vec::with_capacity(acc.items.len());
    let mut all_exact = true;
    let mut sum = Mass::zero();
    let mut items = acc.items;
    items.sort_by(|a, b| b.1.cmp(&a.1));
    for (k, (pt, partial)) in items.into_iter().enumerate() {
        // closed forms are looked for among the heaviest atoms only
        let closed = if k < CLOSED_FORM_ATOMS {
            // a float orbit near a repelling cycle can fake a closure; the
            // partial sum is a lower bound and catches that
            let lower = rat_f64(&partial) * (1.0 - 1e-9);
            Some(mass_at(f, &pt, opts.depth_n.max(2 * depth + 2))?)
                .filter(|e| e.closed_form && e.value.to_f64() >= lower)
        } else {
            None
        };
        let mass = closed.map_or(Mass::Exact(partial), |e| e.value);
        all_exact &= mass.is_exact();
        sum = sum.add(&mass);
        atoms.push(Atom { point: pt.approx(), mass });
    }
    let tail = match (&sum, all_exact) {
        (Mass::Exact(s), true) => Mass::Exact(BigRational::one() - s),
        _ => Mass::Float((1.0 - sum.to_f64()).max(0.0)),
    };
    Ok(AtomicMeasure::new(atoms, tail, depth))
}

/// One backward step of the tree with hashed deduplication.
fn preimage_level_fast<S: Scalar>(f: &RatbarPoint<S>, level: &RootList<S>) -> Result<RootList<S>, MeasureError> {
    let tol = *f.tol();
    let mut map = PointMap::<S>::new(tol.root);
    for r in level.iter() {
        for (y, m) in f.phi().preimages(&r.point, &tol).map_err(RatbarError::from)? {
            map.add(&y, BigRational::from_integer(BigInt::from(m * r.mult)), &tol);
        }
    }
    let mut out = RootList::default();
    for (pt, w) in map.items {
        let m = w.to_integer().to_usize().ok_or(RatbarError::Overflow)?;
        out.entries.push(crate::polyhom::Root { point: pt, mult: m });
    }
    Ok(out)
}

/// Points with accumulated weights, deduplicated through a grid on the sphere.
struct PointMap<S> {
    items: Vec<(Pt<S>, BigRational)>,
    grid: HashMap<[i64; 3], Vec<usize>>,
    cell: f64,
}

impl<S: Scalar> PointMap<S> {
    fn new(root_tol: f64) -> Self {
        PointMap { items: Vec::new(), grid: HashMap::new(), cell: (root_tol * 100.0).max(1e-9) }
    }

    fn key(&self, v: &sphere::Vec3) -> [i64; 3] {
        [(v[0] / self.cell).floor() as i64, (v[1] / self.cell).floor() as i64, (v[2] / self.cell).floor() as i64]
    }

    fn add(&mut self, p: &Pt<S>, w: BigRational, tol: &crate::polyhom::Tol) {
        let v = sphere::stereo(&p.approx());
        let k = self.key(&v);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let kk = [k[0] + dx, k[1] + dy, k[2] + dz];
                    if let Some(ids) = self.grid.get(&kk) {
                        for &i in ids {
                            if self.items[i].0.same(p, tol) {
                                let e = &mut self.items[i];
                                e.1 += w;
                                if !e.0.is_native() && p.is_native() {
                                    e.0 = p.clone();
                                }
                                return;
                            }
                        }
                    }
                }
            }
        }
        self.grid.entry(k).or_default().push(self.items.len());
        self.items.push((p.clone(), w));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhom::GaussRat;

    type E = GaussRat;

    fn rb(p: &str, q: &str) -> RatbarPoint<E> {
        RatbarPoint::parse(p, q, None, &[]).unwrap()
    }

    fn nat(n: i64, d: i64) -> Pt<E> {
        Pt::Native(ProjPoint::finite(E::ratio(n, d)))
    }

    fn inf() -> Pt<E> {
        Pt::Native(ProjPoint::infinity())
    }

    fn q(n: i64, d: i64) -> Mass {
        Mass::ratio(n, d)
    }

    #[test]
    fn h_example_masses() {
        let h = rb("zw", "z^2");
        assert_eq!(mass_at(&h, &nat(0, 1), 40).unwrap().value, q(2, 3));
        assert_eq!(mass_at(&h, &inf(), 40).unwrap().value, q(1, 3));
        let mu = boundary_measure(&h, 40).unwrap();
        assert_eq!(mu.atoms.len(), 2);
        assert_eq!(mu.tail_bound, Mass::zero());
        assert_eq!(mu.atoms[0].mass, q(2, 3));
        assert!(mu.atoms[0].point.z().norm() == 0.0 && !mu.atoms[0].point.is_infinity());
    }

    #[test]
    fn constant_phi_gives_hole_average() {
        // Λ_0 = (0 : (z+w)(z-w)).
        let l0 = rb("0", "(z+w)*(z-w)");
        let mu = boundary_measure(&l0, 10).unwrap();
        assert_eq!(mu.atoms.len(), 2);
        assert!(mu.atoms.iter().all(|a| a.mass == q(1, 2)));
        assert_eq!(mu.tail_bound, Mass::zero());
    }

    #[test]
    fn lambda_two_tree() {
        let l2 = rb("2z*(z-w)", "w*(z-w)");
        let mu = boundary_measure(&l2, 12).unwrap();
        assert_eq!(mu.atoms.len(), 13);
        for k in 0..=12u32 {
            let p = ProjPoint::finite(Complex64::new(0.5f64.powi(k as i32), 0.0));
            let want = BigRational::new(1.into(), BigInt::from(2u64.pow(k + 1)));
            assert_eq!(mu.mass_at(&p, 1e-12), Mass::Exact(want));
        }
        assert_eq!(mu.tail_bound, Mass::Exact(BigRational::new(1.into(), BigInt::from(2u64.pow(13)))));
        assert_eq!(mu.total(), Mass::Exact(BigRational::one()));
    }

    #[test]
    fn parabolic_limit_atoms() {
        // P_{2,2} = (z^2 w (z+w) : z^2 w^2).
        let p = rb("z^2*w*(z+w)", "z^2*w^2");
        assert_eq!(mass_at(&p, &inf(), 40).unwrap().value, q(1, 3));
        let e = mass_at(&p, &nat(-2, 1), 40).unwrap();
        assert_eq!(e.value, q(1, 32));
        assert!(!e.closed_form && e.error < 1e-20);
        let mu = boundary_measure(&p, 20).unwrap();
        assert_eq!(mu.mass_at(&ProjPoint::infinity(), 1e-12), q(1, 3));
        assert_eq!(mu.total(), Mass::Exact(BigRational::one()));
    }

    #[test]
    fn mass_via_depths_increases_to_half() {
        let f = rb("z^4*w", "z*w^4");
        let mut prev = BigRational::zero();
        for n in 1..=8 {
            let m = mass_via_depths(&f, &nat(0, 1), n).unwrap();
            let oracle = (BigRational::one() - BigRational::new(3.into(), 5.into()).pow(n as i32))
                / BigRational::from_integer(2.into());
            assert_eq!(m, oracle);
            assert!(m >= prev);
            prev = m;
        }
        assert_eq!(mass_at(&f, &nat(0, 1), 40).unwrap().value, q(1, 2));
    }

    #[test]
    fn rejects_non_boundary_and_indeterminate() {
        assert_eq!(boundary_measure(&rb("z^2", "w^2"), 5).unwrap_err(), MeasureError::NotBoundary);
        assert_eq!(boundary_measure(&rb("w*(z-w)", "0"), 5).unwrap_err(), MeasureError::Indeterminate);
    }

    #[test]
    fn json_roundtrip() {
        let mu = boundary_measure(&rb("zw", "z^2"), 10).unwrap();
        let back = AtomicMeasure::from_json(&mu.to_json()).unwrap();
        assert_eq!(back, mu);
    }
}
