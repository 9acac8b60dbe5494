use num_complex::Complex64;
use serde_json::{json, Value};

use super::tau::{base_root, tau_squared, Ext};
use super::{
    f_family, interior_representative, lambda_iterate, p_family, zeta, DiskFamily, ModuliError, ModuliPoint2,
};
use crate::polyhom::{ProjPoint, Pt, Tol};
use crate::ratbar::RatbarPoint;

/// The limit `lim_{t→0} [f_tⁿ]` in M̄_{2ⁿ}, with a representative in Ratbar_{2ⁿ}.
#[derive(Clone, Debug)]
pub enum LimitClass {
    /// `Φ_n` is continuous at the base: the limit is `[Δ(0)ⁿ]`.
    Regular { rep: RatbarPoint<Complex64> },
    /// The class of `F_{q,τ,n}`.
    F { q: usize, tau2: Complex64, rep: RatbarPoint<Complex64> },
    /// The class of `P_{q,n}` (`τ² = ∞`).
    P { q: usize, rep: RatbarPoint<Complex64> },
}

impl LimitClass {
    pub fn rep(&self) -> &RatbarPoint<Complex64> {
        match self {
            LimitClass::Regular { rep } | LimitClass::F { rep, .. } | LimitClass::P { rep, .. } => rep,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LimitClass::Regular { .. } => "Regular",
            LimitClass::F { .. } => "F",
            LimitClass::P { .. } => "P",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({"class": self.name(), "rep": self.rep().to_json()});
        match self {
            LimitClass::F { q, tau2, .. } => {
                v["q"] = json!(q);
                v["tau2"] = Ext::Finite(*tau2).to_json();
            }
            LimitClass::P { q, .. } => {
                v["q"] = json!(q);
                v["tau2"] = Ext::Infinity.to_json();
            }
            LimitClass::Regular { .. } => {}
        }
        v
    }
}

/// A point of the Deligne–Mumford-type compactification: a base in M̄₂ and,
/// over `[Λ_ζ]`, the fiber coordinate `τ² ∈ Ĉ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MhatPoint {
    pub base: ModuliPoint2,
    /// `(q, k, τ²)` when the base is `[Λ_ζ]` with `ζ = e^{2πik/q}`.
    pub fiber: Option<(usize, usize, Ext)>,
}

impl MhatPoint {
    pub fn to_json(&self) -> Value {
        match &self.fiber {
            None => json!({"base": self.base.to_json(), "q": null, "tau2": null}),
            Some((q, k, t)) => json!({"base": self.base.to_json(), "q": q, "k": k, "tau2": t.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, ModuliError> {
        let base = ModuliPoint2::from_json(v.get("base").ok_or_else(|| ModuliError::Invalid("missing field 'base'".into()))?)?;
        let fiber = match v.get("q").and_then(Value::as_u64) {
            None => None,
            Some(q) => {
                let k = v.get("k").and_then(Value::as_u64).unwrap_or(1) as usize;
                let t = Ext::from_json(v.get("tau2").unwrap_or(&Value::Null)).map_err(ModuliError::Invalid)?;
                Some((q as usize, k, t))
            }
        };
        Ok(MhatPoint { base, fiber })
    }

    /// `([f¹], ..., [f^{n_max}])` for any disk through this point.
    pub fn tuple(&self, n_max: usize) -> Result<Vec<LimitClass>, ModuliError> {
        (1..=n_max).map(|n| limit_from_data(&self.base, self.fiber, n, None)).collect()
    }
}

fn limit_from_data(
    base: &ModuliPoint2,
    fiber: Option<(usize, usize, Ext)>,
    n: usize,
    interior: Option<crate::ratbar::RatMap<Complex64>>,
) -> Result<LimitClass, ModuliError> {
    if let Some((s1, s2)) = base.chart() {
        let f0 = match interior {
            Some(m) => m,
            None => interior_representative(s1, s2)?,
        };
        let f = RatbarPoint::normalize(f0.p, f0.q)?;
        return Ok(LimitClass::Regular { rep: f.iterate(n)? });
    }
    match (base_root(base), fiber) {
        (Some((q, _)), Some((fq, _, t))) if q <= n => {
            if fq != q {
                return Err(ModuliError::Mismatch(format!("fiber over q = {fq} attached to a base of order {q}")));
            }
            Ok(match t {
                Ext::Finite(t2) => LimitClass::F { q, tau2: t2, rep: f_family(q, &t2.sqrt(), n)? },
                Ext::Infinity => LimitClass::P { q, rep: p_family(q, n)? },
            })
        }
        (Some((q, _)), None) if q <= n => Err(ModuliError::NotOnLocus(q)),
        (Some((q, k)), _) => Ok(LimitClass::Regular { rep: lambda_iterate(&ProjPoint::finite(zeta(q, k)), n)? }),
        (None, _) => {
            let (a, _) = base.boundary_parameter().expect("boundary point");
            Ok(LimitClass::Regular { rep: lambda_iterate(&a, n)? })
        }
    }
}

/// `lim [f_tⁿ]` for the disk `Δ`. Over `[Λ_ζ]` with `ζ` of order `q ≤ n` this
/// is `F_{q,τ,n}` with `τ` the principal root of `τ²(Δ)`, or `P_{q,n}`.
pub fn classify_limit(delta: &DiskFamily, n: usize) -> Result<LimitClass, ModuliError> {
    let base = delta.base()?;
    let fiber = match base_root(&base) {
        Some((q, k)) if q <= n => Some((q, k, tau_squared(delta, q)?)),
        _ => None,
    };
    let interior = if base.is_boundary() { None } else { delta.map_at(0.0) };
    limit_from_data(&base, fiber, n, interior)
}

/// `(base, q, τ²)`; the fiber is only determined once `N ≥ q`.
pub fn mhat_point(delta: &DiskFamily, n_max: usize) -> Result<MhatPoint, ModuliError> {
    let base = delta.base()?;
    let fiber = match base_root(&base) {
        Some((q, _)) if n_max < q => {
            return Err(ModuliError::Invalid(format!("N = {n_max} is too small to determine the fiber over q = {q}")))
        }
        Some((q, k)) => Some((q, k, tau_squared(delta, q)?)),
        None => None,
    };
    Ok(MhatPoint { base, fiber })
}

/// Conjugacy invariants of a limit representative: the sorted hole depths and,
/// when the two deepest holes `A, B` tie, `χ + 1/χ` for the cross-ratio
/// `χ = [A, B; p, p']` of the marked pair over them. On `F_{q,τ,n}` this is `τ² - 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSignature {
    pub depths: Vec<usize>,
    pub invariant: Option<Complex64>,
}

impl ClassSignature {
    pub fn to_json(&self) -> Value {
        json!({
            "depths": self.depths,
            "invariant": self.invariant.map(|c| json!([c.re, c.im])),
        })
    }
}

fn bracket(x: &ProjPoint<Complex64>, y: &ProjPoint<Complex64>) -> Complex64 {
    x.z() * y.w() - x.w() * y.z()
}

pub fn class_signature(f: &RatbarPoint<Complex64>) -> Result<ClassSignature, ModuliError> {
    let tol = *f.tol();
    let mut hs: Vec<(ProjPoint<Complex64>, usize)> = f.holes().iter().map(|r| (r.point.approx(), r.mult)).collect();
    hs.sort_by(|a, b| b.1.cmp(&a.1));
    let depths: Vec<usize> = hs.iter().map(|h| h.1).collect();
    let tied = hs.len() >= 2 && hs[0].1 == hs[1].1 && hs.get(2).is_none_or(|h| h.1 < hs[0].1);
    if !tied {
        return Ok(ClassSignature { depths, invariant: None });
    }
    let (a, b) = (hs[0].0.clone(), hs[1].0.clone());
    let marked = marked_pair(f, &a, &b, &hs, &tol)?;
    let invariant = marked.map(|(p, pp)| {
        let chi = bracket(&pp, &a) * bracket(&p, &b) / (bracket(&pp, &b) * bracket(&p, &a));
        chi + 1.0 / chi
    });
    Ok(ClassSignature { depths, invariant })
}

fn marked_pair(
    f: &RatbarPoint<Complex64>,
    a: &ProjPoint<Complex64>,
    b: &ProjPoint<Complex64>,
    hs: &[(ProjPoint<Complex64>, usize)],
    tol: &Tol,
) -> Result<Option<(ProjPoint<Complex64>, ProjPoint<Complex64>)>, ModuliError> {
    let near = |x: &ProjPoint<Complex64>, y: &ProjPoint<Complex64>| x.chordal(y) <= tol.root.sqrt();
    if f.phi().degree() == 2 {
        for target in [a, b] {
            let pre = f.phi().preimages(&Pt::Approx(target.clone()), tol)?;
            let pts: Vec<ProjPoint<Complex64>> =
                pre.iter().flat_map(|(p, m)| std::iter::repeat_n(p.approx(), *m)).collect();
            if pts.len() == 2 && !pts.iter().any(|p| near(p, a) || near(p, b)) {
                return Ok(Some((pts[0].clone(), pts[1].clone())));
            }
        }
        return Ok(None);
    }
    let next: Vec<&ProjPoint<Complex64>> = match hs.get(2) {
        Some(h) => hs[2..].iter().filter(|x| x.1 == h.1).map(|x| &x.0).collect(),
        None => return Ok(None),
    };
    Ok(match next.len() {
        1 => Some((next[0].clone(), next[0].clone())),
        2 => Some((next[0].clone(), next[1].clone())),
        _ => None,
    })
}

/// Whether two limit representatives are conjugate, by their signatures.
/// Decisive on the F and P families.
pub fn distinguish_classes(f: &RatbarPoint<Complex64>, g: &RatbarPoint<Complex64>) -> Result<bool, ModuliError> {
    if f.degree() != g.degree() {
        return Err(ModuliError::Mismatch(format!("degrees {} and {}", f.degree(), g.degree())));
    }
    let (a, b) = (class_signature(f)?, class_signature(g)?);
    if a.depths != b.depths {
        return Ok(false);
    }
    Ok(match (a.invariant, b.invariant) {
        (Some(x), Some(y)) => (x - y).norm() <= 1e-8 * 1f64.max(x.norm()),
        (None, None) => true,
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn signature_recovers_tau_squared() {
        for tau in [c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.7)] {
            for (q, n) in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 5)] {
                let f = f_family(q, &tau, n).unwrap();
                let s = class_signature(&f).unwrap();
                let inv = s.invariant.expect("tied deepest holes");
                assert!((inv - (tau * tau - 2.0)).norm() < 1e-7, "τ={tau} q={q} n={n}: {inv}");
            }
        }
    }

    #[test]
    fn f_and_p_are_told_apart() {
        let f0 = f_family(2, &c(0.0, 0.0), 3).unwrap();
        let f1 = f_family(2, &c(1.0, 0.0), 3).unwrap();
        let fm = f_family(2, &c(-1.0, 0.0), 3).unwrap();
        let p = p_family::<Complex64>(2, 3).unwrap();
        assert!(!distinguish_classes(&f0, &f1).unwrap());
        assert!(distinguish_classes(&f1, &fm).unwrap());
        assert!(!distinguish_classes(&f1, &p).unwrap());
        assert!(distinguish_classes(&p, &p).unwrap());
    }

    #[test]
    fn basilica_limit_is_f_with_tau_one() {
        let d = DiskFamily::basilica();
        match classify_limit(&d, 2).unwrap() {
            LimitClass::F { q, tau2, rep } => {
                assert_eq!(q, 2);
                assert!((tau2 - 1.0).norm() < 1e-6);
                assert_eq!(rep.degree(), 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(classify_limit(&d, 1).unwrap(), LimitClass::Regular { .. }));
    }

    #[test]
    fn mhat_needs_enough_iterates() {
        let conic = DiskFamily::Conic { q: 3, k: 1, a: c(1.0, 0.0), b: c(1.0, 0.0) };
        assert!(mhat_point(&conic, 2).is_err());
        let m = mhat_point(&conic, 3).unwrap();
        assert_eq!(MhatPoint::from_json(&m.to_json()).unwrap(), m);
        let t = m.tuple(4).unwrap();
        assert_eq!(t.iter().map(LimitClass::name).collect::<Vec<_>>(), ["Regular", "Regular", "F", "F"]);
    }
}
