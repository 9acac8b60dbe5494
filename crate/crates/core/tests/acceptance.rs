//! The ten acceptance criteria, one PASS/FAIL line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use degen::barycenter::{barycenter_normalize, is_rotation, separating_annulus_test, BcStatus, SphereMeasure};
use degen::maxent::{
    barycentered_experiment, barycentered_f_measure, boundary_limit_experiment, chi_formula, f_an,
    fixed_point_cross_ratios, h_a, h_invariant, hole_pair_chi, lambda2_family, parabolic_family, Counterexample,
};
use degen::measure::{boundary_measure, mass_at, Mass};
use degen::moduli2::{
    class_signature, classify_limit, f_family, lambda, lambda_iterate, p_family, tau_squared, tau_squared_closed_form,
    tau_squared_numeric, zeta, DiskFamily, Ext, LimitClass, TauOpts,
};
use degen::polyhom::{GaussRat, HomPoly, ProjPoint, Pt, Scalar, Tol};
use degen::ratbar::{Mobius, RatbarPoint};
use degen::sphere::Vec3;
use degen::stability::{classify, classify_iterate, StabilityClass};

type E = GaussRat;
type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn e(n: i64) -> E {
    E::from_i64(n)
}

fn rb(p: &str, q: &str) -> RatbarPoint<E> {
    RatbarPoint::parse(p, q, None, &[]).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, t0: Instant, what: &str) -> Result<(), String> {
    let el = t0.elapsed();
    ensure(el <= limit, || format!("{what} took {el:?} (limit {limit:?})"))
}

fn depth<S: Scalar>(f: &RatbarPoint<S>, p: &ProjPoint<S>) -> usize {
    f.holes().mult_at(&Pt::Native(p.clone()), &Tol::default())
}

fn c1() -> Outcome {
    let t0 = Instant::now();
    let h = rb("zw", "z^2");
    let mu = boundary_measure(&h, 40).map_err(|e| e.to_string())?;
    ensure(mu.tail_bound == Mass::zero() && mu.atoms.len() == 2, || format!("μ_h = {mu:?}"))?;
    ensure(mu.mass_at(&ProjPoint::zero(), 1e-12) == Mass::ratio(2, 3), || "μ_h(0) ≠ 2/3".into())?;
    ensure(mu.mass_at(&ProjPoint::infinity(), 1e-12) == Mass::ratio(1, 3), || "μ_h(∞) ≠ 1/3".into())?;
    within(Duration::from_secs(1), t0, "μ_h")?;
    let t0 = Instant::now();
    let h2 = h.iterate(2).map_err(|e| e.to_string())?;
    ensure(h2.p() == &HomPoly::monomial(4, 1, e(1)) && h2.q() == &HomPoly::monomial(4, 2, e(1)), || format!("h² = {:?}", h2.to_json()))?;
    ensure(classify(&h).unwrap().class == StabilityClass::Stable, || "h not stable".into())?;
    ensure(classify(&h2).unwrap().class == StabilityClass::Unstable, || "h² not unstable".into())?;
    within(Duration::from_secs(1), t0, "h²")?;
    Ok("μ_h = ⅔δ₀ + ⅓δ_∞, h² = (z³w:z²w²), Stable → Unstable".into())
}

fn c2() -> Outcome {
    let f = rb("z^4 w", "z w^4");
    let zero = Pt::Native(ProjPoint::zero());
    for n in 1..=6u32 {
        let want = (5u128.pow(n) - 3u128.pow(n)) / 2;
        let got = f.depth_of_iterate(&zero, n as usize).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("d₀(f^{n}) = {got}, want {want}"))?;
        if n <= 3 {
            let fnn = f.iterate(n as usize).unwrap();
            ensure(depth(&fnn, &ProjPoint::zero()) as u128 == want, || format!("d₀ of formed f^{n}"))?;
        }
    }
    for q in [3usize, 5] {
        let z = ProjPoint::finite(zeta(q, 1));
        let lam = lambda(&z).map_err(|e| e.to_string())?;
        for n in 1..q {
            let ln = lambda_iterate(&z, n).map_err(|e| e.to_string())?;
            for l in 0..n {
                let p = ProjPoint::finite(zeta(q, 1).powi(-(l as i32)));
                let want = 1usize << (n - 1 - l);
                ensure(depth(&ln, &p) == want, || format!("q={q} n={n} l={l}: depth {}", depth(&ln, &p)))?;
                let via_orbit = lam.depth_of_iterate(&Pt::Native(p), n).unwrap();
                ensure(via_orbit == want as u128, || format!("q={q} n={n} l={l}: orbit depth {via_orbit}"))?;
            }
        }
        let lq = lambda_iterate(&z, q).unwrap();
        let one = ProjPoint::finite(c(1.0, 0.0));
        ensure(depth(&lq, &one) == 1 << (q - 1), || format!("d₁(Λ_ζ^{q}) = {}", depth(&lq, &one)))?;
    }
    Ok("d₀(fⁿ) = (5ⁿ−3ⁿ)/2 for n ≤ 6; Λ_ζ depths for q = 3, 5".into())
}

fn lambda_stable<S: Scalar>(a: &ProjPoint<S>, q: usize) -> Result<(), String> {
    let lam = lambda(a).map_err(|e| e.to_string())?;
    for n in 1..=8 {
        let st = classify_iterate(&lam, n).map_err(|e| e.to_string())?.class == StabilityClass::Stable;
        ensure(st == (n < q), || format!("Λ_ζ^{n}, q={q}: stable = {st}"))?;
    }
    Ok(())
}

fn c3() -> Outcome {
    lambda_stable(&ProjPoint::finite(e(-1)), 2)?;
    lambda_stable(&ProjPoint::finite(E::i()), 4)?;
    for q in [3, 6] {
        lambda_stable(&ProjPoint::finite(zeta(q, 1)), q)?;
    }
    for q in [2, 3] {
        for n in 1..=8 {
            for tau in 0..=2 {
                let f = f_family::<E>(q, &e(tau), n).map_err(|e| e.to_string())?;
                let st = classify(&f).unwrap().class == StabilityClass::Stable;
                ensure(st == (n >= q), || format!("F_{{{q},{tau},{n}}} stable = {st}"))?;
            }
            let p = p_family::<E>(q, n).map_err(|e| e.to_string())?;
            let st = classify(&p).unwrap().class == StabilityClass::Stable;
            ensure(st == (n >= q), || format!("P_{{{q},{n}}} stable = {st}"))?;
        }
    }
    Ok("Λ_ζⁿ (q = 2, 3, 4, 6), F and P tables for n ≤ 8".into())
}

fn c4() -> Outcome {
    for q in [2usize, 3] {
        let (a, b) = ((1i64 << (q - 1)) - 1, (1i64 << q) - 1);
        for tau in 0..=2 {
            let f = f_family::<E>(q, &e(tau), q).unwrap();
            for p in [ProjPoint::zero(), ProjPoint::infinity()] {
                let m = mass_at(&f, &Pt::Native(p.clone()), 40).map_err(|e| e.to_string())?;
                ensure(m.closed_form && m.value == Mass::ratio(a, b), || format!("q={q} τ={tau}: mass {:?}", m.value))?;
            }
            for m in 1..=2u32 {
                let fm = f_family::<E>(q, &e(tau), q * m as usize).unwrap();
                let want = (a as i128 * ((1i128 << (q as u32 * m)) - 1) / b as i128) as usize;
                let got = depth(&fm, &ProjPoint::zero());
                ensure(got == want, || format!("d₀(F_{{{q},{tau},{}}}) = {got}, want {want}", q * m as usize))?;
            }
        }
    }
    Ok("μ_F(0) = μ_F(∞) = (2^{q−1}−1)/(2^q−1); d₀(F_{q,τ,qm}) closed form".into())
}

/// Normal-form disk `α = -1 + st`, `β = -1 - st + et²`, whose `τ²` at `[Λ₋₁]`
/// is `4s²/(e + s²)`.
fn nf_line(s: Complex64, e: Complex64) -> DiskFamily {
    DiskFamily::nf_as_coeff_path(&[c(-1.0, 0.0), s], &[c(-1.0, 0.0), -s, e])
}

fn c5() -> Outcome {
    let samples = [
        (c(0.0, 0.0), c(1.0, 0.0)),
        (c(1.0, 0.0), c(1.0, 0.0)),
        (c(1.0, 0.0), c(0.0, 0.0)),
        (c(1.0, 0.0), c(2.0, 0.0)),
        (c(-1.0, 0.0), c(1.0, 0.0)),
        (c(0.7, -0.2), c(1.3, 0.4)),
        (c(2.0, 1.0), c(0.5, 0.0)),
        (c(0.0, 1.0), c(1.0, 1.0)),
        (c(3.0, 0.0), c(-1.0, 0.5)),
        (c(0.25, 0.0), c(-0.75, 0.0)),
    ];
    for (a, b) in samples {
        let exact = tau_squared_closed_form(&DiskFamily::Line { a, b }, 2).map_err(|e| e.to_string())?;
        // the disk in normal-form coordinates with the same τ²
        let (s, ee) = if b.norm() == 0.0 {
            (c(1.0, 0.0), c(-1.0, 0.0))
        } else if (b - a).norm() == 0.0 {
            (c(0.0, 0.0), c(1.0, 0.0))
        } else {
            (c(1.0, 0.0), (3.0 * b + a) / (b - a))
        };
        let num = tau_squared(&nf_line(s, ee), 2).map_err(|e| format!("({a}:{b}): {e}"))?;
        ensure(num.close(&exact, 1e-6), || format!("line ({a}:{b}): numeric {num:?} vs {exact:?}"))?;
        if (b - a).norm() != 0.0 && b.norm() != 0.0 {
            let on_line = tau_squared_numeric(&DiskFamily::Line { a, b }, 2, 1, &TauOpts::default()).map_err(|e| e.to_string())?;
            ensure(on_line.close(&exact, 1e-6), || format!("Milnor line ({a}:{b}): {on_line:?} vs {exact:?}"))?;
        }
    }
    let (a, b) = (c(0.6, 0.3), c(1.1, -0.5));
    let conic = DiskFamily::Conic { q: 3, k: 1, a, b };
    let exact = tau_squared_closed_form(&conic, 3).map_err(|e| e.to_string())?;
    let num = tau_squared_numeric(&conic, 3, 1, &TauOpts::default()).map_err(|e| e.to_string())?;
    ensure(num.close(&exact, 1e-6), || format!("conic: numeric {num:?} vs {exact:?}"))?;
    let z = zeta(3, 1);
    let literal = -9.0 * a * a * z.powu(3) / (b * b * (z * z - 1.0) * (z - 1.0).powu(2));
    println!(
        "INFO conic at q=3: numeric {:.9}, corrected closed form {:.9}, literal display -q²a²ζ³/(b²(ζ²-1)(ζ-1)²) {:.9}",
        num.finite().unwrap(),
        exact.finite().unwrap(),
        literal
    );
    let t2 = tau_squared(&DiskFamily::basilica(), 2).map_err(|e| e.to_string())?;
    ensure(t2.close(&Ext::Finite(c(1.0, 0.0)), 1e-6), || format!("basilica τ² = {t2:?}"))?;
    Ok(format!("line ×10, conic q=3, basilica τ² = {:.9}", t2.finite().unwrap()))
}

fn c6() -> Outcome {
    let families = [
        ("τ²=0", nf_line(c(0.0, 0.0), c(1.0, 0.0)), Ext::Finite(c(0.0, 0.0))),
        ("τ²=1", nf_line(c(1.0, 0.0), c(3.0, 0.0)), Ext::Finite(c(1.0, 0.0))),
        ("basilica", DiskFamily::basilica(), Ext::Finite(c(1.0, 0.0))),
        ("τ²=∞", parabolic_family(), Ext::Infinity),
    ];
    for (name, fam, want) in &families {
        for n in 2..=4 {
            let lim = classify_limit(fam, n).map_err(|e| format!("{name} n={n}: {e}"))?;
            let sig = class_signature(lim.rep()).map_err(|e| e.to_string())?;
            match (want, &lim) {
                (Ext::Finite(t2), LimitClass::F { q: 2, tau2, rep }) => {
                    ensure((tau2 - t2).norm() < 1e-6, || format!("{name} n={n}: τ² = {tau2}"))?;
                    let inv = sig.invariant.ok_or_else(|| format!("{name} n={n}: no invariant"))?;
                    ensure((inv - (t2 - 2.0)).norm() < 1e-6, || format!("{name} n={n}: χ+1/χ = {inv}"))?;
                    let model = f_family::<Complex64>(2, &t2.sqrt(), n).unwrap();
                    let msig = class_signature(&model).unwrap();
                    ensure(msig.depths == sig.depths && rep.degree() == 1 << n, || format!("{name} n={n}: depths {:?} vs {:?}", sig.depths, msig.depths))?;
                    ensure((msig.invariant.unwrap() - (t2 - 2.0)).norm() < 1e-8, || format!("{name} n={n}: model invariant"))?;
                }
                (Ext::Infinity, LimitClass::P { q: 2, rep }) => {
                    let model = p_family::<Complex64>(2, n).unwrap();
                    let msig = class_signature(&model).unwrap();
                    ensure(msig.depths == sig.depths && rep.degree() == 1 << n, || format!("{name} n={n}: depths {:?} vs {:?}", sig.depths, msig.depths))?;
                    let f1 = f_family::<Complex64>(2, &c(1.0, 0.0), n).unwrap();
                    ensure(class_signature(&f1).unwrap().depths != sig.depths, || format!("{name} n={n}: P looks like F"))?;
                }
                _ => return Err(format!("{name} n={n}: got {}", lim.name())),
            }
        }
    }
    Ok("τ² ∈ {0, 1, ∞} at q = 2, n = 2..4 match F/P by invariant and depths".into())
}

type Pair = (Vec<E>, Vec<E>);

fn mul(a: &[E], b: &[E]) -> Vec<E> {
    let mut out = vec![e(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn add(a: &[E], b: &[E]) -> Vec<E> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

/// `P(A, B)` by expanding every monomial `c_i A^{d-i} B^i`.
fn substitute(p: &[E], a: &[E], b: &[E]) -> Vec<E> {
    let d = p.len() - 1;
    let k = a.len() - 1;
    let pow = |x: &[E], m: usize| (0..m).fold(vec![e(1)], |acc, _| mul(&acc, x));
    let mut out = vec![e(0); d * k + 1];
    for (i, ci) in p.iter().enumerate() {
        let term: Vec<E> = mul(&pow(a, d - i), &pow(b, i)).into_iter().map(|x| x * ci.clone()).collect();
        out = add(&out, &term);
    }
    out
}

fn naive_iterate(f: &Pair, n: usize) -> Pair {
    let mut cur = f.clone();
    for _ in 1..n {
        cur = (substitute(&f.0, &cur.0, &cur.1), substitute(&f.1, &cur.0, &cur.1));
    }
    cur
}

fn projectively_equal(u: &[E], v: &[E]) -> bool {
    u.len() == v.len()
        && (0..u.len()).all(|i| (i + 1..u.len()).all(|j| u[i].clone() * v[j].clone() == u[j].clone() * v[i].clone()))
}

fn random_point(rng: &mut ChaCha8Rng) -> RatbarPoint<E> {
    let roots: [Option<E>; 6] = [Some(e(0)), Some(e(1)), Some(e(-1)), Some(E::ratio(1, 2)), Some(E::i()), None];
    loop {
        let d = rng.gen_range(1..=3usize);
        let h = rng.gen_range(0..=d);
        let mut hp = HomPoly::<E>::one();
        for _ in 0..h {
            let r = &roots[rng.gen_range(0..roots.len())];
            let lin = match r {
                Some(x) => HomPoly::linear(e(1), -x.clone()),
                None => HomPoly::w(),
            };
            hp = hp.mul(&lin);
        }
        let k = d - h;
        let coeffs = |rng: &mut ChaCha8Rng| (0..=k).map(|_| e(rng.gen_range(-3..=3))).collect::<Vec<_>>();
        let (p, q) = (HomPoly::new(coeffs(rng)), HomPoly::new(coeffs(rng)));
        if p.is_zero() && q.is_zero() {
            continue;
        }
        let Ok(f) = RatbarPoint::normalize(hp.mul(&p), hp.mul(&q)) else { continue };
        if !f.in_indeterminacy() {
            return f;
        }
    }
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut depths = std::collections::BTreeSet::new();
    for k in 0..100 {
        let f = random_point(&mut rng);
        for r in f.holes().iter() {
            depths.insert(r.mult);
        }
        let pair = (f.p().coeffs().to_vec(), f.q().coeffs().to_vec());
        for n in 1..=3 {
            let it = f.iterate(n).map_err(|e| format!("sample {k}: {e}"))?;
            let (a, b) = naive_iterate(&pair, n);
            let u: Vec<E> = it.p().coeffs().iter().chain(it.q().coeffs()).cloned().collect();
            let v: Vec<E> = a.into_iter().chain(b).collect();
            ensure(projectively_equal(&u, &v), || format!("sample {k} ({}) n={n}", f.to_json()))?;
        }
    }
    Ok(format!("100 random points, n ≤ 3, hole depths seen {depths:?}"))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn c8() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let n = rng.gen_range(3..=9);
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let mu = SphereMeasure::atomic((0..n).map(|i| (random_unit(&mut rng), w[i])).collect()).unwrap();
        let mut g = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let a = Mobius::new(g(), g(), g(), g()).unwrap();
        let r0 = barycenter_normalize(&mu).map_err(|e| e.to_string())?;
        let r1 = barycenter_normalize(&mu.pushforward(&a)).map_err(|e| e.to_string())?;
        let (Some(m0), Some(m1)) = (r0.map(), r1.map()) else {
            return Err(format!("pair {k}: {} / {}", r0.status_name(), r1.status_name()));
        };
        // C(A_*μ) = A(C(μ)) up to rotation: M₁ A M₀⁻¹ ∈ SO(3)
        let rot = m1.compose(&a).compose(&m0.inverse());
        ensure(is_rotation(&rot, 1e-8), || format!("pair {k}: M₁AM₀⁻¹ is not a rotation"))?;
        worst = worst.max(r0.residual).max(r1.residual);
    }
    let poles = SphereMeasure::atomic(vec![([0.0, 0.0, 1.0], 0.5), ([0.0, 0.0, -1.0], 0.5)]).unwrap();
    let r = barycenter_normalize(&poles).unwrap();
    ensure(matches!(r.status, BcStatus::Degenerate { .. }), || format!("½δ_N+½δ_S: {}", r.status_name()))?;
    let oct: Vec<Vec3> = vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let s3 = 1.0 / 3f64.sqrt();
    let cube: Vec<Vec3> = (0..8).map(|i| [if i & 1 == 0 { s3 } else { -s3 }, if i & 2 == 0 { s3 } else { -s3 }, if i & 4 == 0 { s3 } else { -s3 }]).collect();
    let tet: Vec<Vec3> = vec![[s3, s3, s3], [s3, -s3, -s3], [-s3, s3, -s3], [-s3, -s3, s3]];
    let ring: Vec<Vec3> = (0..12).map(|k| {
        let th = std::f64::consts::PI * k as f64 / 6.0;
        [th.cos(), th.sin(), 0.0]
    }).collect();
    for (name, pts) in [("octahedron", oct), ("cube", cube), ("tetrahedron", tet), ("equator", ring)] {
        let r = barycenter_normalize(&SphereMeasure::empirical(pts).unwrap()).unwrap();
        let m = r.map().ok_or_else(|| format!("{name}: {}", r.status_name()))?;
        ensure(is_rotation(m, 1e-12), || format!("{name}: normalization is not the identity"))?;
    }
    within(Duration::from_secs(5), t0, "barycenter suite")?;
    Ok(format!("20 equivariant pairs (worst residual {worst:.1e}), poles Degenerate, symmetric sets fixed"))
}

const GRID: [f64; 6] = [0.5, 0.2, 0.1, 0.05, 0.02, 0.01];

fn majority(name: &str, run: impl Fn(u64) -> Result<(bool, String), String>) -> Result<String, String> {
    let mut wins = 0;
    let mut notes = Vec::new();
    for seed in [11u64, 12, 13] {
        let t0 = Instant::now();
        let (ok, note) = run(seed)?;
        within(Duration::from_secs(60), t0, name)?;
        wins += usize::from(ok);
        notes.push(note);
    }
    ensure(wins >= 2, || format!("{name}: {wins}/3 seeds ({})", notes.join("; ")))?;
    Ok(format!("{name} {wins}/3 [{}]", notes.join(", ")))
}

fn c9() -> Outcome {
    let lam = majority("Λ₂", |seed| {
        let r = boundary_limit_experiment(&lambda2_family(), &GRID, 10_000, seed, None).map_err(|e| e.to_string())?;
        let last = r.rows.last().map_or(f64::INFINITY, |r| r.distance);
        Ok((last <= 0.1 && r.monotone(1), format!("{last:.4}")))
    })?;
    let reference = barycentered_f_measure(2, c(1.0, 0.0)).map_err(|e| e.to_string())?;
    let bas = majority("basilica", |seed| {
        let (r, _) = barycentered_experiment(&DiskFamily::basilica(), &GRID, 10_000, seed, Some(&reference))
            .map_err(|e| e.to_string())?;
        let last = r.rows.last().map_or(f64::INFINITY, |r| r.distance);
        Ok((last <= 0.1, format!("{last:.4}")))
    })?;
    let par = majority("τ²=∞", |seed| {
        let (_, nus) = barycentered_experiment(&parabolic_family(), &GRID, 10_000, seed, None).map_err(|e| e.to_string())?;
        let seq: Vec<SphereMeasure> = nus.into_iter().flatten().collect();
        let ok = separating_annulus_test(&seq);
        Ok((ok, ok.to_string()))
    })?;
    Ok(format!("{lam}; {bas}; {par}"))
}

fn c10() -> Outcome {
    let h = Counterexample::<E>::default_h(5).map_err(|e| e.to_string())?;
    let mut invariants = Vec::new();
    for a in 0..=2 {
        let f = h_a(&h, &e(a)).map_err(|e| e.to_string())?;
        let mu = boundary_measure(&f, 40).map_err(|e| e.to_string())?;
        ensure(mu.tail_bound == Mass::zero() && mu.atoms.len() == 4, || format!("μ_h_{a} = {:?}", mu.to_json()))?;
        ensure(mu.mass_at(&ProjPoint::infinity(), 1e-12) == Mass::ratio(2, 5), || format!("a={a}: μ(∞)"))?;
        for r in [-1.0, -2.0, -3.0] {
            ensure(mu.mass_at(&ProjPoint::finite(c(r, 0.0)), 1e-12) == Mass::ratio(1, 5), || format!("a={a}: μ({r})"))?;
        }
        let inv = h_invariant(&f).and_then(|x| x.finite()).ok_or("no invariant")?;
        // [∞, r₁; r₂, a] = (r₁ - a)/(r₁ - r₂) with r₁ = -3, r₂ = -2
        let want = (-3.0 - a as f64) / (-3.0 + 2.0);
        ensure((inv - want).norm() < 1e-8, || format!("h_{a} invariant {inv} vs {want}"))?;
        invariants.push(inv);
    }
    ensure(distinct(&invariants), || format!("h invariants {invariants:?}"))?;

    let alpha = c(1.0, 0.0);
    let g2 = Counterexample::<E>::g(2, HomPoly::linear(e(1), e(-1))).map_err(|e| e.to_string())?;
    let mut d2 = Vec::new();
    let mut chis = Vec::new();
    for a in 0..=2 {
        let ac = c(a as f64, 0.0);
        let got = fixed_point_cross_ratios(&g2, &e(a)).map_err(|e| e.to_string())?;
        // marked (0, α, ∞), moving fixed point aα/(a + α)
        let fp = ac * alpha / (ac + alpha);
        let want = if fp.norm() == 0.0 { Ext::Infinity } else { Ext::Finite((fp - alpha) / fp) };
        ensure(got.len() == 1 && got[0].close(&want, 1e-8), || format!("d=2 a={a}: {got:?} vs {want:?}"))?;
        d2.push(got[0]);
        let chi = chi_formula(ac, alpha);
        let sym = chi + 1.0 / chi;
        let f3 = f_an(&g2, &e(a), 3).map_err(|e| e.to_string())?;
        match hole_pair_chi(&f3) {
            Some(x) => ensure((x + 1.0 / x - sym).norm() < 1e-8, || format!("a={a}: χ {x} vs {chi}"))?,
            None => ensure((chi - 1.0).norm() < 1e-12, || format!("a={a}: preimages collide but χ = {chi}"))?,
        }
        chis.push(sym);
    }
    ensure(distinct_ext(&d2) && distinct(&chis), || format!("d=2 data {d2:?} {chis:?}"))?;

    let g3 = Counterexample::<E>::default_g(3).map_err(|e| e.to_string())?;
    let mut d3 = Vec::new();
    for a in 0..=2 {
        let af = a as f64;
        let got = fixed_point_cross_ratios(&g3, &e(a)).map_err(|e| e.to_string())?;
        // (3 + a)z² - (2 + 3a)z + 2a = 0; marked (∞, 1, 2) gives z - 1
        let (qa, qb, qc) = (c(3.0 + af, 0.0), c(-(2.0 + 3.0 * af), 0.0), c(2.0 * af, 0.0));
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        let mut want = [(-qb + disc) / (2.0 * qa) - 1.0, (-qb - disc) / (2.0 * qa) - 1.0];
        want.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
        ensure(got.len() == 2, || format!("d=3 a={a}: {got:?}"))?;
        for (g, w) in got.iter().zip(&want) {
            ensure(g.close(&Ext::Finite(*w), 1e-8), || format!("d=3 a={a}: {got:?} vs {want:?}"))?;
        }
        d3.push(got[0]);
    }
    ensure(distinct_ext(&d3), || format!("d=3 data {d3:?}"))?;
    Ok(format!("μ_h_a fixed, h invariants {:?}, χ+1/χ {:?}", invariants.iter().map(|x| x.re).collect::<Vec<_>>(), chis.iter().map(|x| x.re).collect::<Vec<_>>()))
}

fn distinct(v: &[Complex64]) -> bool {
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| (v[i] - v[j]).norm() > 1e-6))
}

fn distinct_ext(v: &[Ext]) -> bool {
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| !v[i].close(&v[j], 1e-6)))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact values", c1),
        ("depth formulas", c2),
        ("stability tables", c3),
        ("measure closed forms", c4),
        ("tau-squared closed forms", c5),
        ("iterate-limit classification", c6),
        ("iterate oracle equivalence", c7),
        ("barycenter suite", c8),
        ("weak-limit experiments", c9),
        ("separation witness", c10),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match res {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({:.2?})", k + 1, t0.elapsed()),
            Err(msg) => {
                println!("FAIL {:>2} {name}: {msg} ({:.2?})", k + 1, t0.elapsed());
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
