use proptest::prelude::*;

use degen::barycenter::{barycenter_normalize, is_rotation, SphereMeasure};
use degen::measure::boundary_measure;
use degen::polyhom::{GaussRat, HomPoly, Scalar};
use degen::ratbar::{Mobius, RatbarPoint};
use degen::stability::{classify, classify_iterate, StabilityClass};
use num_complex::Complex64;

type E = GaussRat;

fn e(n: i64) -> E {
    E::from_i64(n)
}

/// Holes drawn from a small pool (so depths repeat) times a random reduced part.
fn point() -> impl Strategy<Value = RatbarPoint<E>> {
    (1usize..=3)
        .prop_flat_map(|d| (Just(d), 0..=d))
        .prop_flat_map(|(d, h)| {
            let k = d - h;
            (
                prop::collection::vec(-2i64..=2, h),
                prop::collection::vec(-3i64..=3, k + 1),
                prop::collection::vec(-3i64..=3, k + 1),
            )
        })
        .prop_filter_map("zero pair", |(roots, p, q)| {
            let mut hp = HomPoly::<E>::one();
            for r in roots {
                // r = 2 stands for the hole at ∞
                let lin = if r == 2 { HomPoly::w() } else { HomPoly::linear(e(1), e(-r)) };
                hp = hp.mul(&lin);
            }
            let (p, q) = (HomPoly::new(p.into_iter().map(e).collect()), HomPoly::new(q.into_iter().map(e).collect()));
            if p.is_zero() && q.is_zero() {
                return None;
            }
            RatbarPoint::normalize(hp.mul(&p), hp.mul(&q)).ok()
        })
}

fn mobius() -> impl Strategy<Value = Mobius<E>> {
    prop::array::uniform4(-3i64..=3).prop_filter_map("singular", |m| Mobius::new(e(m[0]), e(m[1]), e(m[2]), e(m[3])).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_invariants(f in point()) {
        let phi = f.phi();
        prop_assert_eq!(f.h().degree() + phi.degree(), f.degree());
        prop_assert_eq!(f.holes().total(), f.h().degree());
        prop_assert_eq!(f.p().mul(&phi.q), f.q().mul(&phi.p));
    }

    #[test]
    fn json_round_trip(f in point()) {
        let back = RatbarPoint::<E>::from_json(&f.to_json(), &[]).unwrap();
        prop_assert!(back.proj_eq(&f));
        prop_assert_eq!(back.to_json(), f.to_json());
    }

    #[test]
    fn classification_is_conjugation_invariant(f in point(), a in mobius()) {
        let g = f.conjugate(&a).unwrap();
        prop_assert_eq!(classify(&g).unwrap().class, classify(&f).unwrap().class);
    }

    #[test]
    fn stable_iterate_needs_stable_point(f in point(), n in 1usize..=3) {
        prop_assume!(!f.in_indeterminacy());
        if classify_iterate(&f, n).unwrap().class == StabilityClass::Stable {
            prop_assert_eq!(classify(&f).unwrap().class, StabilityClass::Stable);
        }
    }

    #[test]
    fn iterate_degree_and_hole_count(f in point(), n in 1usize..=3) {
        prop_assume!(!f.in_indeterminacy());
        let it = f.iterate(n).unwrap();
        prop_assert_eq!(it.degree(), f.degree().pow(n as u32));
        prop_assert_eq!(it.holes().total() + it.phi().degree(), it.degree());
    }

    #[test]
    fn boundary_measures_are_probability_measures(f in point()) {
        prop_assume!(f.is_degenerate() && !f.in_indeterminacy());
        let mu = boundary_measure(&f, 24).unwrap();
        let total = mu.total().to_f64();
        prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
        prop_assert!(mu.atoms.iter().all(|a| a.mass.to_f64() > 0.0));
    }

    #[test]
    fn mobius_inverse_and_composition(a in mobius(), b in mobius()) {
        let id = a.compose(&a.inverse());
        prop_assert!(id.b.is_zero() && id.c.is_zero() && id.a == id.d);
        let p = degen::polyhom::ProjPoint::finite(E::ratio(1, 3));
        let lhs = a.compose(&b).apply(&p);
        let rhs = a.apply(&b.apply(&p));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn barycenter_is_equivariant(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.5f64..1.5), 3..8),
        m in prop::array::uniform4((-2.0f64..2.0, -2.0f64..2.0)),
    ) {
        let atoms: Vec<([f64; 3], f64)> = pts
            .iter()
            .filter_map(|&(x, y, z, w)| {
                let n = (x * x + y * y + z * z).sqrt();
                (n > 0.1).then(|| ([x / n, y / n, z / n], w))
            })
            .collect();
        prop_assume!(atoms.len() >= 3);
        let s: f64 = atoms.iter().map(|a| a.1).sum();
        let mu = SphereMeasure::atomic(atoms.iter().map(|&(v, w)| (v, w / s)).collect()).unwrap();
        prop_assume!(mu.atoms().first().is_some_and(|a| a.1 < 0.45));
        let c = |(re, im): (f64, f64)| Complex64::new(re, im);
        let a = Mobius::new(c(m[0]), c(m[1]), c(m[2]), c(m[3]));
        prop_assume!(a.as_ref().is_ok_and(|a| a.det().norm() > 0.1));
        let a = a.unwrap();
        let r0 = barycenter_normalize(&mu).unwrap();
        let r1 = barycenter_normalize(&mu.pushforward(&a)).unwrap();
        let (m0, m1) = (r0.map().unwrap(), r1.map().unwrap());
        prop_assert!(is_rotation(&m1.compose(&a).compose(&m0.inverse()), 1e-7));
    }
}
