//! GIT stability of points of Ratbar_d, read off from hole depths, and the
//! atom-mass criteria for stability of all iterates.

use std::cmp::Ordering;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::measure::{mass_at, Mass, MeasureError, DEFAULT_DEPTH};
use crate::polyhom::{Pt, RootList, Scalar};
use crate::ratbar::{pt_to_json, RatMap, RatbarError, RatbarPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    SemistableOnly,
    Unstable,
}

impl StabilityClass {
    pub fn name(&self) -> &'static str {
        match self {
            StabilityClass::Stable => "Stable",
            StabilityClass::SemistableOnly => "SemistableOnly",
            StabilityClass::Unstable => "Unstable",
        }
    }
}

/// A class with the hole that decided it (the deepest hole when nothing fails).
#[derive(Clone, Debug, PartialEq)]
pub struct Classification<S> {
    pub class: StabilityClass,
    pub witness_hole: Option<Pt<S>>,
    pub witness_depth: usize,
}

impl<S: Scalar> Classification<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "class": self.class.name(),
            "witness_hole": self.witness_hole.as_ref().map(pt_to_json),
            "witness_depth": self.witness_depth,
        })
    }
}

/// Depth bound check: every hole has depth ≤ `bound`, and holes of depth
/// exactly `bound` are not fixed by `φ`. Returns the first offending hole.
fn first_violation<S: Scalar>(
    holes: &RootList<S>,
    bound: u128,
    fixed: &dyn Fn(&Pt<S>) -> Result<bool, RatbarError>,
) -> Result<Option<(Pt<S>, usize)>, RatbarError> {
    for r in holes.iter() {
        let m = r.mult as u128;
        if m > bound || (m == bound && fixed(&r.point)?) {
            return Ok(Some((r.point.clone(), r.mult)));
        }
    }
    Ok(None)
}

fn classify_data<S: Scalar>(
    degree: u128,
    holes: &RootList<S>,
    fixed: &dyn Fn(&Pt<S>) -> Result<bool, RatbarError>,
) -> Result<Classification<S>, RatbarError> {
    let deepest = || {
        holes
            .iter()
            .max_by_key(|r| r.mult)
            .map(|r| (Some(r.point.clone()), r.mult))
            .unwrap_or((None, 0))
    };
    let done = |class, w: Option<(Pt<S>, usize)>| {
        let (witness_hole, witness_depth) = match w {
            Some((p, m)) => (Some(p), m),
            None => deepest(),
        };
        Classification { class, witness_hole, witness_depth }
    };
    if degree.is_multiple_of(2) {
        return Ok(match first_violation(holes, degree / 2, fixed)? {
            None => done(StabilityClass::Stable, None),
            Some(w) => done(StabilityClass::Unstable, Some(w)),
        });
    }
    if let Some(w) = first_violation(holes, degree.div_ceil(2), fixed)? {
        return Ok(done(StabilityClass::Unstable, Some(w)));
    }
    Ok(match first_violation(holes, (degree - 1) / 2, fixed)? {
        None => done(StabilityClass::Stable, None),
        Some(w) => done(StabilityClass::SemistableOnly, Some(w)),
    })
}

fn fixed_by<'a, S: Scalar>(
    phi: &'a RatMap<S>,
    n: usize,
    f: &'a RatbarPoint<S>,
) -> impl Fn(&Pt<S>) -> Result<bool, RatbarError> + 'a {
    move |h: &Pt<S>| {
        let mut x = h.clone();
        for _ in 0..n {
            x = phi.eval_pt(&x)?;
        }
        Ok(x.same(h, f.tol()))
    }
}

/// Stability of `f` from its holes: depth ≤ d/2 (even d), ≤ (d-1)/2 for
/// stable and ≤ (d+1)/2 for semistable (odd d), where a hole at the bound must
/// not be fixed by `φ_f`.
pub fn classify<S: Scalar>(f: &RatbarPoint<S>) -> Result<Classification<S>, RatbarError> {
    classify_data(f.degree() as u128, f.holes(), &fixed_by(f.phi(), 1, f))
}

/// Class of `fⁿ` from the holes of `f` and their preimages, without forming `fⁿ`.
pub fn classify_iterate<S: Scalar>(f: &RatbarPoint<S>, n: usize) -> Result<Classification<S>, RatbarError> {
    if f.in_indeterminacy() {
        return Err(RatbarError::Indeterminate);
    }
    let holes = f.iterate_holes(n)?;
    let dn = (f.degree() as u128).checked_pow(n as u32).ok_or(RatbarError::Overflow)?;
    classify_data(dn, &holes, &fixed_by(f.phi(), n, f))
}

/// Where a mass sits relative to ½, with the truncation error taken into account.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    Below,
    /// Equal to ½ (exactly, or as a truncated sum whose bound straddles ½).
    Equal,
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomCertificate<S> {
    pub witness: Option<Pt<S>>,
    pub max_mass: Mass,
    /// Bound on the mass missing from `max_mass` (0 for closed forms).
    pub error: f64,
    pub vs_half: Half,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IterateVerdict {
    /// Even d: `fⁿ` stable for all n iff max mass ≤ ½.
    Even { all_stable: bool },
    /// Odd d: semistable for all n iff max mass ≤ ½; max mass < ½ suffices
    /// for stability of all iterates. At exactly ½ stability is left open.
    Odd { all_semistable: bool, all_stable: Option<bool> },
}

/// Largest atom of `μ_f`. Masses away from holes are strictly smaller than
/// the mass at their image, so only the holes need to be examined.
pub fn max_atom<S: Scalar>(f: &RatbarPoint<S>, depth_n: usize) -> Result<AtomCertificate<S>, MeasureError> {
    let mut best: Option<(Pt<S>, Mass, f64)> = None;
    for r in f.holes().iter() {
        let e = mass_at(f, &r.point, depth_n)?;
        let better = match &best {
            None => true,
            Some((_, m, _)) => e.value.to_f64() > m.to_f64(),
        };
        if better {
            best = Some((r.point.clone(), e.value, e.error));
        }
    }
    let (witness, max_mass, error) = match best {
        Some((p, m, e)) => (Some(p), m, e),
        None => (None, Mass::zero(), 0.0),
    };
    let vs_half = compare_half(&max_mass, error);
    Ok(AtomCertificate { witness, max_mass, error, vs_half })
}

const FLOAT_EQ: f64 = 1e-10;

fn compare_half(m: &Mass, err: f64) -> Half {
    let half = BigRational::new(1.into(), 2.into());
    match m {
        Mass::Exact(r) => match r.cmp(&half) {
            Ordering::Greater => Half::Above,
            Ordering::Equal => Half::Equal,
            Ordering::Less if crate::measure::rat_f64(r) + err >= 0.5 => Half::Equal,
            Ordering::Less => Half::Below,
        },
        Mass::Float(x) => {
            if *x > 0.5 + FLOAT_EQ {
                Half::Above
            } else if *x + err + FLOAT_EQ >= 0.5 {
                Half::Equal
            } else {
                Half::Below
            }
        }
    }
}

pub fn all_iterates_stable<S: Scalar>(
    f: &RatbarPoint<S>,
) -> Result<(IterateVerdict, AtomCertificate<S>), MeasureError> {
    let cert = max_atom(f, DEFAULT_DEPTH)?;
    let le = cert.vs_half != Half::Above;
    let verdict = if f.degree().is_multiple_of(2) {
        IterateVerdict::Even { all_stable: le }
    } else {
        IterateVerdict::Odd {
            all_semistable: le,
            all_stable: match cert.vs_half {
                Half::Below => Some(true),
                Half::Above => Some(false),
                Half::Equal => None,
            },
        }
    };
    Ok((verdict, cert))
}

/// True iff `fⁿ` is stable; a stable iterate forces `f` itself to be stable.
pub fn continuity_certificate<S: Scalar>(f: &RatbarPoint<S>, n: usize) -> Result<bool, RatbarError> {
    let ok = classify_iterate(f, n)?.class == StabilityClass::Stable;
    if ok {
        assert_eq!(classify(f)?.class, StabilityClass::Stable, "stable iterate of an unstable point");
    }
    Ok(ok)
}
