use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use degen::barycenter::{
    barycenter_normalize_with, separating_annulus_test, BarycenterError, BcOpts, BcStatus, SphereMeasure,
};
use degen::maxent::{
    barycentered_experiment, barycentered_f_measure, boundary_limit_experiment, f_a, f_an,
    fixed_point_cross_ratios, g_family, g_limit, h_a, h_family, h_invariant, hole_pair_chi,
    sample_max_entropy, Counterexample, MaxentError,
};
use degen::measure::{boundary_measure, mass_at, AtomicMeasure, MeasureError, DEFAULT_DEPTH};
use degen::moduli2::{
    base_root, classify_limit, f_family, indeterminacy_set, lambda_iterate, milnor_point, mhat_point, multipliers,
    p_family, tau_squared, boundary_point, DiskFamily, Ext, ModuliError,
};
use degen::polyhom::{poly_to_json, Backend, GaussRat, PolyError, Pt, Scalar, Tol};
use degen::ratbar::{point_from_json, pt_to_json, RatbarError, RatbarPoint};
use degen::stability::{classify, classify_iterate};

#[derive(Parser, Debug)]
#[command(name = "degen", version, about = "Degenerations of rational maps: iteration, measures, moduli limits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Coefficient backend.
    #[arg(long, global = true, env = "BD_DEFAULT_BACKEND", default_value = "exact")]
    backend: Backend,
    /// Root clustering tolerance (float backend).
    #[arg(long, global = true)]
    tol_root: Option<f64>,
    /// Barycenter residual tolerance.
    #[arg(long, global = true)]
    tol_bc: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout; an invocation record is
    /// written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct MapArg {
    /// `{"degree"?, "P", "Q"}` inline, or a path to such a file.
    #[arg(long)]
    map: String,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    /// nf | line | conic | coeff_path | basilica | boundary, or a JSON
    /// descriptor (inline or path).
    #[arg(long)]
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Order of the root of unity (conic descriptor, or override for τ²).
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Coefficients of α(t), lowest order first, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Split a pair (P:Q) into holes and the reduced map.
    Normalize(MapArg),
    /// n-th iterate in the closure of Rat_d.
    Iterate {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// GIT stability of f, or of its n-th iterate.
    Classify {
        #[command(flatten)]
        map: MapArg,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Atomic measure of maximal entropy of a boundary point.
    Measure {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Report only the mass at this point ("inf", "1/2", "[re,im]").
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Milnor coordinates and multipliers of a degree-2 point.
    Milnor(MapArg),
    /// Λ_a and its iterates.
    Lambda {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// The limit families F_{q,τ,n} and P_{q,n}.
    Family {
        /// F or P.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        tau: String,
    },
    /// Membership in I(d) for a map, or the indeterminacy set of Φ_n.
    Indeterminacy {
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// τ² of a holomorphic disk at its boundary point.
    Tau2(FamilyArgs),
    /// Limit class of the n-th iterates along a disk.
    Limit {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
    },
    /// Limit point in the compactification by iterates up to n_max.
    Mhat {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Conformal barycenter of a sphere measure or of μ_f.
    Barycenter {
        #[arg(long, conflicts_with = "map")]
        measure: Option<String>,
        #[arg(long)]
        map: Option<String>,
    },
    /// Backward-iteration samples of μ_f for f without holes.
    Sample {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 10_000)]
        n_samples: usize,
    },
    /// Weak-limit experiment along a t-grid; writes CSV.
    Experiment {
        /// `{family, t_grid, n_samples, seed, depth_n?, mode?}`, inline or path.
        #[arg(long)]
        config: String,
    },
    /// The degenerating families g_{a,t} (kind g) or h_{a,t} (kind h).
    Counterexample {
        #[arg(long, default_value = "g")]
        kind: String,
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        a: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        t: String,
        /// Also report the limit of the n-th iterates (kind g).
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Malformed(String),
    Domain(String),
    NoConvergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::Domain(_) => 2,
            CliError::NoConvergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Malformed(m) | CliError::Domain(m) | CliError::NoConvergence(m) => m,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::NoConvergence(_) => CliError::NoConvergence(e.to_string()),
            PolyError::InexactDivision | PolyError::NotRepresentable => CliError::Domain(e.to_string()),
            _ => CliError::Malformed(e.to_string()),
        }
    }
}

impl From<RatbarError> for CliError {
    fn from(e: RatbarError) -> Self {
        match e {
            RatbarError::Poly(p) => p.into(),
            RatbarError::BothZero | RatbarError::Invalid(_) | RatbarError::SingularMobius => {
                CliError::Malformed(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Ratbar(r) => r.into(),
            MeasureError::Malformed(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<ModuliError> for CliError {
    fn from(e: ModuliError) -> Self {
        match e {
            ModuliError::Ratbar(r) => r.into(),
            ModuliError::Poly(p) => p.into(),
            ModuliError::NoConvergence(_) => CliError::NoConvergence(e.to_string()),
            ModuliError::Invalid(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<BarycenterError> for CliError {
    fn from(e: BarycenterError) -> Self {
        match e {
            BarycenterError::Malformed(_) => CliError::Malformed(e.to_string()),
            BarycenterError::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
        }
    }
}

impl From<MaxentError> for CliError {
    fn from(e: MaxentError) -> Self {
        match e {
            MaxentError::Ratbar(r) => r.into(),
            MaxentError::Measure(m) => m.into(),
            MaxentError::Moduli(m) => m.into(),
            MaxentError::Barycenter(b) => b.into(),
            MaxentError::Invalid(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

type Res<T> = Result<T, CliError>;

/// Inline JSON, or the contents of a file.
fn load_json(arg: &str, field: &str) -> Res<Value> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| CliError::Malformed(format!("--{field}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("--{field}: {e}")))
}

fn tol(g: &Global) -> Tol {
    let mut t = Tol::default();
    if let Some(r) = g.tol_root {
        t.root = r;
    }
    t
}

fn read_map<S: Scalar>(arg: &str, g: &Global) -> Res<RatbarPoint<S>> {
    let v = load_json(arg, "map")?;
    let f = RatbarPoint::<S>::from_json(&v, &[]).map_err(|e| CliError::Malformed(format!("--map: {e}")))?;
    Ok(if g.tol_root.is_some() { f.with_tol(tol(g)) } else { f })
}

fn scalar<S: Scalar>(s: &str, field: &str) -> Res<S> {
    S::parse_scalar(s).map_err(|e| CliError::Malformed(format!("--{field}: {e}")))
}

/// "inf", a coefficient string, or a JSON `[re, im]`.
fn point<S: Scalar>(s: &str, field: &str) -> Res<degen::polyhom::ProjPoint<S>> {
    let v = serde_json::from_str::<Value>(s).unwrap_or_else(|_| Value::String(s.to_string()));
    let v = if v.is_number() { Value::String(s.to_string()) } else { v };
    point_from_json(&v).map_err(|e| CliError::Malformed(format!("--{field}: {e}")))
}

fn family(f: &FamilyArgs) -> Res<DiskFamily> {
    let s = |x: &Option<String>, name: &str| -> Res<Value> {
        x.as_ref().map(|v| Value::String(v.clone())).ok_or_else(|| CliError::Malformed(format!("--{name} is required")))
    };
    let list = |x: &Option<String>, name: &str| -> Res<Value> {
        let v = x.as_ref().ok_or_else(|| CliError::Malformed(format!("--{name} is required")))?;
        Ok(Value::Array(v.split(',').map(|c| Value::String(c.trim().to_string())).collect()))
    };
    let v = match f.family.as_str() {
        "line" => json!({"kind": "line", "a": s(&f.a, "a")?, "b": s(&f.b, "b")?}),
        "conic" => json!({"kind": "conic", "q": f.q.unwrap_or(3), "k": f.k.unwrap_or(1), "a": s(&f.a, "a")?, "b": s(&f.b, "b")?}),
        "nf" => json!({"kind": "nf", "alpha": list(&f.alpha, "alpha")?, "beta": list(&f.beta, "beta")?}),
        "boundary" => json!({"kind": "boundary", "a": list(&f.a, "a")?}),
        "basilica" => json!({"kind": "basilica"}),
        other => load_json(other, "family")?,
    };
    Ok(DiskFamily::from_json(&v)?)
}

fn family_q(f: &FamilyArgs, delta: &DiskFamily) -> Res<usize> {
    if let (Some(q), false) = (f.q, f.family == "conic") {
        return Ok(q);
    }
    if let DiskFamily::Conic { q, .. } = delta {
        return Ok(*q);
    }
    let base = delta.base()?;
    base_root(&base).map(|(q, _)| q).ok_or_else(|| CliError::Domain("base point is not [Λ_ζ] for a root of unity ζ".into()))
}

fn bc_opts(g: &Global) -> BcOpts {
    let mut o = BcOpts::default();
    if let Some(e) = g.tol_bc {
        o.eps_bc = e;
    }
    o
}

fn normalize<S: Scalar>(m: &str, g: &Global) -> Res<Value> {
    let f = read_map::<S>(m, g)?;
    Ok(json!({
        "degree": f.degree(),
        "P": poly_to_json(f.p()),
        "Q": poly_to_json(f.q()),
        "H": poly_to_json(f.h()),
        "phi": {"P": poly_to_json(&f.phi().p), "Q": poly_to_json(&f.phi().q)},
        "holes": f.holes_json(),
        "in_indeterminacy": f.in_indeterminacy(),
    }))
}

fn iterate<S: Scalar>(m: &str, n: usize, g: &Global) -> Res<Value> {
    let f = read_map::<S>(m, g)?.iterate(n)?;
    let mut v = f.to_json();
    v["holes"] = f.holes_json();
    Ok(v)
}

fn classify_cmd<S: Scalar>(m: &str, n: Option<usize>, g: &Global) -> Res<Value> {
    let f = read_map::<S>(m, g)?;
    Ok(match n {
        None => classify(&f)?.to_json(),
        Some(n) => classify_iterate(&f, n)?.to_json(),
    })
}

fn measure_cmd<S: Scalar>(m: &str, depth: usize, at: Option<&str>, g: &Global) -> Res<Value> {
    let f = read_map::<S>(m, g)?;
    match at {
        None => Ok(boundary_measure(&f, depth)?.to_json()),
        Some(p) => {
            let z = Pt::Native(point::<S>(p, "at")?);
            let e = mass_at(&f, &z, depth)?;
            Ok(json!({"point": pt_to_json(&z), "mass": e.value.to_json(), "error": e.error, "closed_form": e.closed_form}))
        }
    }
}

fn milnor_cmd<S: Scalar>(m: &str, g: &Global) -> Res<Value> {
    let f = read_map::<S>(m, g)?;
    let x = milnor_point(&f)?;
    let mult = if f.is_degenerate() { Value::Null } else { multipliers(&f)?.to_json() };
    Ok(json!({"point": x.to_json(), "boundary": x.is_boundary(), "multipliers": mult}))
}

fn lambda_cmd<S: Scalar>(a: &str, n: usize) -> Res<Value> {
    let a = point::<S>(a, "a")?;
    let f = lambda_iterate(&a, n)?;
    let mut v = f.to_json();
    v["holes"] = f.holes_json();
    v["class"] = json!(classify(&f)?.class.name());
    v["moduli_point"] = boundary_point(&a).to_json();
    Ok(v)
}

fn family_cmd<S: Scalar>(kind: &str, q: usize, n: usize, tau: &str) -> Res<Value> {
    let f = match kind {
        "F" | "f" => f_family::<S>(q, &scalar(tau, "tau")?, n)?,
        "P" | "p" => p_family::<S>(q, n)?,
        other => return Err(CliError::Malformed(format!("--kind: expected F or P, found '{other}'"))),
    };
    let mut v = f.to_json();
    v["holes"] = f.holes_json();
    v["class"] = json!(classify(&f)?.class.name());
    Ok(v)
}

fn indeterminacy_cmd<S: Scalar>(map: Option<&str>, n: Option<usize>, g: &Global) -> Res<Value> {
    match (map, n) {
        (Some(m), _) => Ok(json!({"in_indeterminacy": read_map::<S>(m, g)?.in_indeterminacy()})),
        (None, Some(n)) => Ok(Value::Array(
            indeterminacy_set(n)?
                .iter()
                .map(|p| json!({"q": p.q, "k": p.k, "zeta": [p.zeta.re, p.zeta.im], "point": p.point.to_json()}))
                .collect(),
        )),
        (None, None) => Err(CliError::Malformed("one of --map or --n is required".into())),
    }
}

fn barycenter_cmd<S: Scalar>(measure: Option<&str>, map: Option<&str>, g: &Global) -> Res<Value> {
    let mu = match (measure, map) {
        (Some(m), _) => {
            let v = load_json(m, "measure")?;
            match v.get("atoms") {
                Some(_) => SphereMeasure::from_atomic(&AtomicMeasure::from_json(&v)?)?,
                None => SphereMeasure::from_json(&v)?,
            }
        }
        (None, Some(m)) => {
            let f = read_map::<S>(m, g)?;
            SphereMeasure::from_atomic(&boundary_measure(&f, DEFAULT_DEPTH)?)?
        }
        (None, None) => return Err(CliError::Malformed("one of --measure or --map is required".into())),
    };
    let r = barycenter_normalize_with(&mu, &bc_opts(g))?;
    let mut v = r.to_json();
    if let BcStatus::Centered(a) = &r.status {
        v["normalized"] = mu.pushforward(a).to_json();
    }
    Ok(v)
}

fn sample_cmd<S: Scalar>(m: &str, n: usize, g: &Global) -> Res<Value> {
    let f = read_map::<S>(m, g)?;
    Ok(sample_max_entropy(&f, n, g.seed)?.to_json())
}

fn counterexample_cmd<S: Scalar>(kind: &str, d: usize, a: &str, t: &str, n: Option<usize>) -> Res<Value> {
    let (a, t) = (scalar::<S>(a, "a")?, scalar::<S>(t, "t")?);
    let with_class = |f: &RatbarPoint<S>| -> Res<Value> {
        let mut v = f.to_json();
        v["holes"] = f.holes_json();
        v["class"] = json!(classify(f)?.class.name());
        Ok(v)
    };
    let ext = |e: &Ext| e.to_json();
    match kind {
        "g" => {
            let c = Counterexample::<S>::default_g(d)?;
            let fa = f_a(&c, &a)?;
            let mut v = json!({
                "P": poly_to_json(&c.p),
                "g_at": with_class(&g_family(&c, &a, &t)?)?,
                "g": with_class(&g_limit(&c)?)?,
                "f_a": with_class(&fa)?,
                "mass_inf": mass_at(&fa, &Pt::Native(degen::polyhom::ProjPoint::infinity()), DEFAULT_DEPTH)?.value.to_json(),
                "fixed_point_cross_ratios": fixed_point_cross_ratios(&c, &a)?.iter().map(ext).collect::<Vec<_>>(),
            });
            if let Some(n) = n {
                let fan = f_an(&c, &a, n)?;
                v["f_an"] = with_class(&fan)?;
                v["hole_pair_chi"] = hole_pair_chi(&fan).map_or(Value::Null, |c| json!([c.re, c.im]));
            }
            Ok(v)
        }
        "h" => {
            let c = Counterexample::<S>::default_h(d)?;
            let ha = h_a(&c, &a)?;
            Ok(json!({
                "P": poly_to_json(&c.p),
                "h_at": with_class(&h_family(&c, &a, &t)?)?,
                "h_a": with_class(&ha)?,
                "measure": boundary_measure(&ha, DEFAULT_DEPTH)?.to_json(),
                "invariant": h_invariant(&ha).as_ref().map_or(Value::Null, ext),
            }))
        }
        other => Err(CliError::Malformed(format!("--kind: expected g or h, found '{other}'"))),
    }
}

#[derive(Deserialize)]
struct ExperimentConfig {
    family: Value,
    t_grid: Vec<f64>,
    #[serde(default = "default_samples")]
    n_samples: usize,
    #[serde(default)]
    seed: u64,
    depth_n: Option<usize>,
    /// boundary (default) | barycentered
    mode: Option<String>,
}

fn default_samples() -> usize {
    10_000
}

/// CSV body plus a JSON summary for stderr.
fn experiment_cmd(config: &str) -> Res<(String, Value)> {
    let v = load_json(config, "config")?;
    let c: ExperimentConfig = serde_json::from_value(v).map_err(|e| CliError::Malformed(format!("--config: {e}")))?;
    let delta = match &c.family {
        Value::String(s) if s == "basilica" => DiskFamily::basilica(),
        Value::String(s) if s == "lambda2" => degen::maxent::lambda2_family(),
        Value::String(s) if s == "parabolic" => degen::maxent::parabolic_family(),
        other => DiskFamily::from_json(other)?,
    };
    match c.mode.as_deref().unwrap_or("boundary") {
        "boundary" => {
            let r = boundary_limit_experiment(&delta, &c.t_grid, c.n_samples, c.seed, c.depth_n)?;
            let last = r.rows.last().map(|r| r.distance);
            Ok((r.csv(), json!({"final_distance": last, "monotone": r.monotone(1), "stopped_at": r.stopped_at})))
        }
        "barycentered" => {
            let reference = match base_root(&delta.base()?) {
                Some((q, _)) => match tau_squared(&delta, q)? {
                    Ext::Finite(t2) => Some(barycentered_f_measure(q, t2)?),
                    Ext::Infinity => None,
                },
                None => None,
            };
            let (r, nus) = barycentered_experiment(&delta, &c.t_grid, c.n_samples, c.seed, reference.as_ref())?;
            let seq: Vec<SphereMeasure> = nus.into_iter().flatten().collect();
            let last = r.rows.last().map(|r| r.distance).filter(|d| d.is_finite());
            Ok((
                r.csv(),
                json!({"final_distance": last, "separating_annulus": separating_annulus_test(&seq), "stopped_at": r.stopped_at}),
            ))
        }
        other => Err(CliError::Malformed(format!("field 'mode': unknown mode '{other}'"))),
    }
}

macro_rules! dispatch {
    ($g:expr, $f:ident($($arg:expr),*)) => {
        match $g.backend {
            Backend::Exact => $f::<GaussRat>($($arg),*),
            Backend::Float => $f::<Complex64>($($arg),*),
        }
    };
}

fn run(cli: &Cli) -> Res<String> {
    let g = &cli.global;
    let v = match &cli.cmd {
        Cmd::Normalize(m) => dispatch!(g, normalize(&m.map, g))?,
        Cmd::Iterate { map, n } => dispatch!(g, iterate(&map.map, *n, g))?,
        Cmd::Classify { map, n } => dispatch!(g, classify_cmd(&map.map, *n, g))?,
        Cmd::Measure { map, depth, at } => dispatch!(g, measure_cmd(&map.map, *depth, at.as_deref(), g))?,
        Cmd::Milnor(m) => dispatch!(g, milnor_cmd(&m.map, g))?,
        Cmd::Lambda { a, n } => dispatch!(g, lambda_cmd(a, *n))?,
        Cmd::Family { kind, q, n, tau } => dispatch!(g, family_cmd(kind, *q, *n, tau))?,
        Cmd::Indeterminacy { map, n } => dispatch!(g, indeterminacy_cmd(map.as_deref(), *n, g))?,
        Cmd::Tau2(f) => {
            let delta = family(f)?;
            let q = family_q(f, &delta)?;
            json!({"q": q, "tau2": tau_squared(&delta, q)?.to_json()})
        }
        Cmd::Limit { family: f, n } => classify_limit(&family(f)?, *n)?.to_json(),
        Cmd::Mhat { family: f, n_max } => {
            let p = mhat_point(&family(f)?, *n_max)?;
            let tuple: Vec<Value> = p.tuple(*n_max)?.iter().map(|c| json!(c.name())).collect();
            json!({"point": p.to_json(), "tuple": tuple})
        }
        Cmd::Barycenter { measure, map } => dispatch!(g, barycenter_cmd(measure.as_deref(), map.as_deref(), g))?,
        Cmd::Sample { map, n_samples } => dispatch!(g, sample_cmd(&map.map, *n_samples, g))?,
        Cmd::Experiment { config } => {
            let (csv, summary) = experiment_cmd(config)?;
            eprintln!("{summary}");
            return Ok(csv);
        }
        Cmd::Counterexample { kind, d, a, t, n } => dispatch!(g, counterexample_cmd(kind, *d, a, t, *n))?,
    };
    Ok(format!("{v}\n"))
}

fn write_out(path: &Path, body: &str) -> Res<()> {
    let io = |e: std::io::Error| CliError::Malformed(format!("--out: {e}"));
    fs::write(path, body).map_err(io)?;
    let record = json!({"argv": std::env::args().collect::<Vec<_>>(), "version": env!("CARGO_PKG_VERSION")});
    let mut rec = path.as_os_str().to_owned();
    rec.push(".invocation.json");
    fs::write(PathBuf::from(rec), format!("{record}\n")).map_err(io)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = run(&cli).and_then(|body| match &cli.global.out {
        Some(p) => write_out(p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    });
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
