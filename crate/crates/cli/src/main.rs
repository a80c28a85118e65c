//! gbk: command-line front end for the Grassmann geometry toolkit.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical violation was found,
//! 2 input error, 3 numeric failure.

mod expr;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use gbk_core::cones::{self, lo_cone_frames, CoassocProfile};
use gbk_core::grassmann::{self, GrassmannPoint, SOrthogonalPair};
use gbk_core::graph::{self, GraphMap};
use gbk_core::numeric::Jet2;
use gbk_core::region::{build_phi, RegionSpec};
use gbk_core::GeoError;
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gbk", version, about = "Numerical geometry of oriented Grassmann manifolds")]
struct Cli {
    /// Report format: json or csv.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// RNG seed for sampled checks (GBK_SEED overrides).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PairArgs {
    /// JSON frame file for P: {"n":..,"m":..,"frame":[[..]]} (row-major).
    #[arg(long)]
    p: PathBuf,
    /// JSON frame file for Q.
    #[arg(long)]
    q: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Jordan angles, w and distance between two planes.
    Jordan {
        #[command(flatten)]
        pair: PairArgs,
        /// Angle tolerance for the S-orthogonality verdict.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// S-map and polar coordinates of S relative to an S-orthogonal pair.
    Smap {
        #[command(flatten)]
        pair: PairArgs,
        /// JSON frame file for S.
        #[arg(long)]
        s: PathBuf,
    },
    /// Region membership, level-set value and gradient collinearity at S.
    RegionCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        s: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = -2.5)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.5)]
        theta_max: f64,
        #[arg(long, default_value_t = 1.0)]
        mu0: f64,
    },
    /// Volume and slope hypothesis check over a sampled box.
    GraphCheck {
        /// Registry key: affine, holomorphic-sq, lawson-osserman, coassociative(C).
        #[arg(long, conflicts_with_all = ["expr", "table"])]
        example: Option<String>,
        /// Semicolon-separated component expressions in x1..xn.
        #[arg(long)]
        expr: Option<String>,
        /// CSV table of samples: x1..xn,f1..fm per row (needs --n and --m).
        #[arg(long, conflicts_with = "expr")]
        table: Option<PathBuf>,
        /// Domain dimension (inferred from expressions when omitted).
        #[arg(long)]
        n: Option<usize>,
        /// Codomain dimension (table input only).
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated lower corner of the sampling box.
        #[arg(long)]
        lo: Option<String>,
        /// Comma-separated upper corner of the sampling box.
        #[arg(long)]
        hi: Option<String>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 10.0)]
        beta0: f64,
        #[arg(long, default_value_t = 2.9)]
        beta1: f64,
        /// Component index of the slope bound (1-based, f^alpha).
        #[arg(long, default_value_t = 1)]
        alpha: usize,
        /// Coordinate index of the slope bound (1-based, x^i).
        #[arg(long = "i", default_value_t = 1)]
        coord: usize,
        /// Extra sample points, comma-separated (repeatable).
        #[arg(long)]
        critical: Vec<String>,
    },
    /// Verify a named identity on sampled data.
    Verify {
        /// One of: pluck, lo-constants, level-set, dw, delta-w, rank, subhar3.
        identity: String,
        /// Graph registry key for the graph identities.
        #[arg(long, default_value = "holomorphic-sq")]
        example: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Reproduce the Lawson-Osserman cone constants on sampled points.
    LoCone {
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Rigidity hypothesis scan of a sphere immersion's normal Gauss map.
    Rigidity {
        /// Sphere registry key: clifford-torus or equator(k).
        #[arg(long)]
        sphere: String,
        /// Optional frame file for P (defaults to the normal plane at the first sample).
        #[arg(long)]
        p: Option<PathBuf>,
        /// Optional frame file for Q (defaults to an S-orthogonal partner of P).
        #[arg(long)]
        q: Option<PathBuf>,
        /// Explicit parameter points, comma-separated (repeatable).
        #[arg(long)]
        param: Vec<String>,
        /// Number of random parameter samples when --param is not given.
        #[arg(long, default_value_t = 25)]
        count: usize,
        /// Use the rank <= 2 threshold (0) instead of 1/9.
        #[arg(long)]
        rank_le_2: bool,
    },
}

enum CliError {
    Input(String),
    Numeric(String),
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::Numeric(_) | GeoError::OutsideChart(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(Value, bool), CliError>;

fn load_frame(path: &Path) -> Result<GrassmannPoint, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!("{}: line {}: {e}", path.display(), e.line()))
    })
}

fn parse_vec(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| CliError::Input(format!("bad {what} {text:?}: {e}")))
}

fn cmd_jordan(pair: &PairArgs, tol: f64) -> CmdResult {
    let p = load_frame(&pair.p)?;
    let q = load_frame(&pair.q)?;
    let jd = grassmann::jordan_angles(&p, &q)?;
    let w = grassmann::w_function(&p, &q)?;
    let d = grassmann::distance(&p, &q)?;
    let (s_orth, diag) = grassmann::is_s_orthogonal(&p, &q, tol)?;
    let report = json!({
        "n": p.n(), "m": p.m(),
        "angles": jd.angles,
        "w": w,
        "distance": d,
        "s_orthogonal": s_orth,
        "dim_intersection": diag.dim_intersection,
    });
    Ok((report, true))
}

fn cmd_smap(pair: &PairArgs, s_path: &Path) -> CmdResult {
    let p = load_frame(&pair.p)?;
    let q = load_frame(&pair.q)?;
    let s = load_frame(s_path)?;
    let so_pair = SOrthogonalPair::new(&p, &q)?;
    let (x1, x2) = so_pair.s_map(&s)?;
    let polar = match so_pair.polar(&s) {
        Ok((r, theta)) => json!({"r": r, "theta": theta, "on_deleted_radius": false}),
        Err(GeoError::Domain(_)) => json!({"r": Value::Null, "theta": Value::Null, "on_deleted_radius": true}),
        Err(e) => return Err(e.into()),
    };
    Ok((json!({"s_map": [x1, x2], "polar": polar}), true))
}

#[allow(clippy::too_many_arguments)]
fn cmd_region_check(
    pair: &PairArgs,
    s_path: &Path,
    c: f64,
    delta: f64,
    theta_min: f64,
    theta_max: f64,
    mu0: f64,
) -> CmdResult {
    let p = load_frame(&pair.p)?;
    let q = load_frame(&pair.q)?;
    let s = load_frame(s_path)?;
    let spec = RegionSpec::new(&p, &q, c, delta, (theta_min, theta_max))?;
    let membership = spec.in_region(&s);
    let (c2, c3) = spec.transition_constants();
    let mut report = json!({
        "c": c, "delta": delta,
        "inside": membership.inside,
        "r": membership.r,
        "theta": membership.theta,
        "on_deleted_radius": membership.on_deleted_radius,
        "transition_constants": {"c2": c2, "c3": c3},
    });
    let mut pass = membership.inside;
    if membership.inside {
        let (t, w) = spec.check_level(&s)?;
        let col = spec.gradient_collinearity(&s)?;
        let level_ok = (w - (c + delta)).abs() < 1e-8;
        let col_ok = col.cosine > 1.0 - 1e-6;
        pass = level_ok && col_ok;
        let h = if c > 1.0 / 3.0 {
            let phi = build_phi(c)?;
            Some(spec.h_value(&phi, &s, t, mu0)?)
        } else {
            None
        };
        let obj = report.as_object_mut().expect("object report");
        obj.insert("level".into(), json!({"t": t, "w": w, "target": c + delta, "ok": level_ok}));
        obj.insert(
            "collinearity".into(),
            json!({"cosine": col.cosine, "ratio": col.ratio, "tan_theta_minus_t": col.tan_theta_minus_t, "ok": col_ok}),
        );
        obj.insert("h".into(), json!(h));
    }
    report
        .as_object_mut()
        .expect("object report")
        .insert("pass".into(), json!(pass));
    Ok((report, pass))
}

fn graph_from_args(
    example: &Option<String>,
    expr_src: &Option<String>,
    table: &Option<PathBuf>,
    n: Option<usize>,
    m: Option<usize>,
) -> Result<GraphMap, CliError> {
    if let Some(key) = example {
        return Ok(graph::registry(key)?);
    }
    if let Some(src) = expr_src {
        let components = expr::parse_components(src).map_err(CliError::Input)?;
        if components.is_empty() {
            return Err(CliError::Input("no component expressions given".into()));
        }
        let used = components.iter().map(|e| e.max_var()).max().unwrap_or(0);
        let n = n.unwrap_or(used);
        if used > n {
            return Err(CliError::Input(format!(
                "expressions use x{used} but the domain dimension is {n}"
            )));
        }
        if n == 0 {
            return Err(CliError::Input("expressions use no variables; pass --n".into()));
        }
        let m = components.len();
        let components = Arc::new(components);
        let eval = move |x: &[Jet2]| -> Vec<Jet2> {
            components.iter().map(|e| e.eval(x)).collect()
        };
        return Ok(GraphMap::analytic(n, m, Arc::new(eval)));
    }
    if let Some(path) = table {
        let (n, m) = match (n, m) {
            (Some(n), Some(m)) => (n, m),
            _ => return Err(CliError::Input("--table needs --n and --m".into())),
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals = parse_vec(line, "table row")
                .map_err(|e| match e {
                    CliError::Input(msg) => {
                        CliError::Input(format!("{}: line {}: {msg}", path.display(), lineno + 1))
                    }
                    other => other,
                })?;
            if vals.len() != n + m {
                return Err(CliError::Input(format!(
                    "{}: line {}: expected {} values, found {}",
                    path.display(),
                    lineno + 1,
                    n + m,
                    vals.len()
                )));
            }
            rows.push((vals[..n].to_vec(), vals[n..].to_vec()));
        }
        return Ok(GraphMap::from_table(n, m, rows)?);
    }
    Err(CliError::Input(
        "one of --example, --expr or --table is required".into(),
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_graph_check(
    f: &GraphMap,
    lo: &Option<String>,
    hi: &Option<String>,
    count: usize,
    beta0: f64,
    beta1: f64,
    alpha: usize,
    coord: usize,
    critical: &[String],
) -> CmdResult {
    let n = f.n();
    let lo = match lo {
        Some(text) => parse_vec(text, "--lo")?,
        None => vec![-2.0; n],
    };
    let hi = match hi {
        Some(text) => parse_vec(text, "--hi")?,
        None => vec![2.0; n],
    };
    if alpha == 0 || coord == 0 {
        return Err(CliError::Input("--alpha and --i are 1-based".into()));
    }
    let critical: Vec<Vec<f64>> = critical
        .iter()
        .map(|t| parse_vec(t, "--critical"))
        .collect::<Result<_, _>>()?;
    let report = graph::check_bernstein_hypotheses(
        f,
        &lo,
        &hi,
        count,
        &critical,
        beta0,
        beta1,
        alpha - 1,
        coord - 1,
    )?;
    let witnesses: Vec<&graph::BernsteinSample> =
        report.violations.iter().map(|&i| &report.samples[i]).collect();
    let pass = report.pass;
    let value = json!({
        "beta0": report.beta0,
        "beta1": report.beta1,
        "beta1_admissible": report.beta1_admissible,
        "alpha": alpha,
        "i": coord,
        "sample_count": report.samples.len(),
        "min_required_beta1": report.min_required_beta1,
        "max_required_beta1": report.max_required_beta1,
        "delta_pass": report.delta_pass,
        "slope_pass": report.slope_pass,
        "pass": report.pass,
        "witnesses": witnesses,
    });
    Ok((value, pass))
}

fn lo_sample(r: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        let radius = r.gen_range(0.2..5.0);
        let x: Vec<f64> = dir.iter().map(|v| v / norm * radius).collect();
        if (x[0] * x[0] + x[1] * x[1]).sqrt() > 1e-3 && (x[2] * x[2] + x[3] * x[3]).sqrt() > 1e-3 {
            return x;
        }
    }
}

fn cmd_lo_cone(points: usize, seed: u64) -> CmdResult {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let profile = CoassocProfile::lawson_osserman();
    let lo = graph::registry("lawson-osserman")?;
    let mut rows = Vec::with_capacity(points);
    let mut worst_w: f64 = 0.0;
    let mut worst_delta: f64 = 0.0;
    for _ in 0..points {
        let x = lo_sample(&mut r);
        let frames = lo_cone_frames(&x, &profile)?;
        let geo = graph::geometry_at(&lo, &x)?;
        worst_w = worst_w.max((frames.w - 1.0 / 9.0).abs());
        worst_delta = worst_delta.max((geo.delta_f - 9.0).abs());
        rows.push(json!({
            "x": x,
            "w": frames.w,
            "delta_f": geo.delta_f,
            "angles": frames.angles,
            "h_norm": geo.h_norm(),
        }));
    }
    let j = lo.jacobian(&[0.0, 0.0, 1.0, 0.0])?;
    let slope = j[(0, 1)];
    let pass = worst_w < 1e-8 && worst_delta < 1e-7;
    let value = json!({
        "points": points,
        "worst_w_deviation": worst_w,
        "worst_delta_deviation": worst_delta,
        "slope_at_critical_point": slope,
        "slope_bound_factor": (1.0 + slope * slope).sqrt(),
        "pass": pass,
        "rows": rows,
    });
    Ok((value, pass))
}

fn verify_rows(
    rows: Vec<Value>,
    worst: f64,
    tol: f64,
    extra: Option<(&str, Value)>,
) -> CmdResult {
    let pass = worst <= tol;
    let mut value = json!({
        "worst_residual": worst,
        "tolerance": tol,
        "pass": pass,
        "rows": rows,
    });
    if let Some((k, v)) = extra {
        value.as_object_mut().expect("object").insert(k.into(), v);
    }
    Ok((value, pass))
}

fn cmd_verify(identity: &str, example: &str, points: usize, seed: u64) -> CmdResult {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    match identity {
        "pluck" => {
            let coord = GrassmannPoint::coordinate_plane(4, 3);
            let a_vec = coord.plucker().clone();
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for k in 0..points.max(1) {
                let mut frame_rows: Vec<Vec<f64>> = Vec::new();
                for _ in 0..7 {
                    frame_rows.push((0..7).map(|_| r.gen_range(-1.0..1.0)).collect());
                }
                let full = grassmann::from_basis(
                    &frame_rows[..4].iter().cloned().collect::<Vec<_>>(),
                )?;
                let e_frame = full.frame().clone();
                let comp = grassmann::orthonormal_complement(&e_frame);
                let na: DVector<f64> = comp.row(0).transpose();
                let nb: DVector<f64> = comp.row(1).transpose();
                let pairing = |subs: &[(usize, &DVector<f64>)]| -> Result<f64, GeoError> {
                    let mv = grassmann::wedge_with_replacements(&e_frame, subs)?;
                    gbk_core::multivector::inner(&mv, &a_vec)
                };
                let w0 = pairing(&[])?;
                let term = w0 * pairing(&[(0, &na), (1, &nb)])?
                    - pairing(&[(0, &na)])? * pairing(&[(1, &nb)])?
                    + pairing(&[(0, &nb)])? * pairing(&[(1, &na)])?;
                worst = worst.max(term.abs());
                rows.push(json!({"sample": k, "residual": term.abs()}));
            }
            verify_rows(rows, worst, 1e-10, None)
        }
        "lo-constants" => {
            let profile = CoassocProfile::lawson_osserman();
            let lo = graph::registry("lawson-osserman")?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for _ in 0..points.max(1) {
                let x = lo_sample(&mut r);
                let frames = lo_cone_frames(&x, &profile)?;
                let geo = graph::geometry_at(&lo, &x)?;
                let res = (frames.w - 1.0 / 9.0)
                    .abs()
                    .max((geo.delta_f - 9.0).abs() / 9.0);
                worst = worst.max(res);
                rows.push(json!({"x": x, "w": frames.w, "delta_f": geo.delta_f}));
            }
            verify_rows(rows, worst, 1e-8, None)
        }
        "level-set" => {
            let p = GrassmannPoint::coordinate_plane(2, 2);
            let q = grassmann::from_basis(&[
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
            ])?;
            let spec = RegionSpec::new(&p, &q, 0.4, 0.05, (-2.5, 1.5))?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for _ in 0..points.max(1) {
                let theta: f64 = r.gen_range(-0.9..0.9);
                let phi_angle: f64 = r.gen_range(0.0..(0.52f64.acos()));
                let s = grassmann::from_basis(&[
                    vec![theta.cos(), 0.0, theta.sin(), 0.0],
                    vec![0.0, phi_angle.cos(), 0.0, phi_angle.sin()],
                ])?;
                let (t, w) = spec.check_level(&s)?;
                let col = spec.gradient_collinearity(&s)?;
                let res = (w - 0.45).abs().max(1.0 - col.cosine);
                worst = worst.max(res);
                rows.push(json!({"t": t, "w": w, "cosine": col.cosine}));
            }
            verify_rows(rows, worst, 1e-6, None)
        }
        "dw" | "delta-w" | "rank" | "subhar3" => {
            let f = graph::registry(example)?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            let mut skipped = 0usize;
            for _ in 0..points.max(1) {
                let x: Vec<f64> = (0..f.n()).map(|_| r.gen_range(-1.2..1.2)).collect();
                if x.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.3 {
                    skipped += 1;
                    continue;
                }
                let outcome: Result<(f64, Value), GeoError> = match identity {
                    "dw" => graph::verify_dw(&f, &x).map(|res| (res, json!({"x": x, "residual": res}))),
                    "delta-w" => graph::verify_delta_w(&f, &x, graph::DEFAULT_LAP_STEP)
                        .map(|res| (res, json!({"x": x, "residual": res}))),
                    "rank" => graph::verify_rank_inequality(&f, &x, graph::DEFAULT_LAP_STEP).map(
                        |(lhs, rhs, ok)| {
                            let slack = ((lhs - rhs) / (1.0 + rhs.abs())).max(0.0);
                            (slack, json!({"x": x, "lhs": lhs, "rhs": rhs, "ok": ok}))
                        },
                    ),
                    _ => graph::verify_subhar3(&f, &x, 0.01, graph::DEFAULT_LAP_STEP).map(|rep| {
                        let slack = if rep.ok { 0.0 } else { rep.lhs };
                        (slack, json!({"x": x, "lhs": rep.lhs, "b_norm2": rep.b_norm2, "c1_est": rep.c1_est, "ok": rep.ok}))
                    }),
                };
                match outcome {
                    Ok((res, row)) => {
                        worst = worst.max(res);
                        rows.push(row);
                    }
                    Err(GeoError::Precondition(_)) => skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            if rows.is_empty() {
                return Err(CliError::Numeric(
                    "no sample satisfied the identity's preconditions".into(),
                ));
            }
            let tol = match identity {
                "dw" => 1e-4,
                "delta-w" | "rank" => 1e-3,
                _ => 1e-6,
            };
            verify_rows(rows, worst, tol, Some(("skipped", json!(skipped))))
        }
        other => Err(CliError::Input(format!(
            "unknown identity {other:?}; expected pluck, lo-constants, level-set, dw, delta-w, rank or subhar3"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_rigidity(
    sphere: &str,
    p_path: &Option<PathBuf>,
    q_path: &Option<PathBuf>,
    params: &[String],
    count: usize,
    rank_le_2: bool,
    seed: u64,
) -> CmdResult {
    let imm = cones::sphere_registry(sphere)?;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let sample_params: Vec<Vec<f64>> = if params.is_empty() {
        (0..count)
            .map(|_| (0..imm.k()).map(|_| r.gen_range(0.2..2.9)).collect())
            .collect()
    } else {
        params
            .iter()
            .map(|t| parse_vec(t, "--param"))
            .collect::<Result<_, _>>()?
    };
    if sample_params.is_empty() {
        return Err(CliError::Input("no parameter samples".into()));
    }
    let p = match p_path {
        Some(path) => load_frame(path)?,
        None => cones::normal_gauss_map(&imm, &sample_params[0])?,
    };
    let q = match q_path {
        Some(path) => load_frame(path)?,
        None => {
            let comp = grassmann::orthonormal_complement(p.frame());
            let mut rows: Vec<Vec<f64>> = (0..p.n())
                .map(|i| p.frame().row(i).iter().copied().collect())
                .collect();
            rows[0] = comp.row(0).iter().copied().collect();
            grassmann::from_basis(&rows)?
        }
    };
    let report = cones::check_rigidity_hypothesis(&imm, &p, &q, &sample_params, rank_le_2)?;
    let pass = report.pass;
    Ok((serde_json::to_value(&report).expect("serializable report"), pass))
}

/// Flatten a JSON report to CSV: scalar fields as key,value lines, then one
/// table per array-of-objects field.
fn to_csv(value: &Value) -> String {
    let mut out = String::new();
    let obj = match value.as_object() {
        Some(o) => o,
        None => return value.to_string(),
    };
    for (k, v) in obj {
        if !matches!(v, Value::Array(items) if items.iter().all(|i| i.is_object())) {
            out.push_str(&format!("{k},{v}\n"));
        }
    }
    for (k, v) in obj {
        if let Value::Array(items) = v {
            if items.is_empty() || !items.iter().all(|i| i.is_object()) {
                continue;
            }
            out.push('\n');
            out.push_str(&format!("# {k}\n"));
            let headers: Vec<&String> = items[0].as_object().expect("object row").keys().collect();
            out.push_str(&headers.iter().map(|h| h.as_str()).collect::<Vec<_>>().join(","));
            out.push('\n');
            for item in items {
                let row = item.as_object().expect("object row");
                let line: Vec<String> = headers
                    .iter()
                    .map(|h| row.get(*h).map(|v| v.to_string()).unwrap_or_default())
                    .collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
    }
    out
}

fn emit(value: &Value, format: &str, output: &Option<PathBuf>) -> Result<(), CliError> {
    let text = match format {
        "json" => serde_json::to_string_pretty(value).expect("serializable report"),
        "csv" => to_csv(value),
        other => return Err(CliError::Input(format!("unknown format {other:?}"))),
    };
    match output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            // Tolerate a closed stdout (e.g. piping into `head`).
            match writeln!(std::io::stdout(), "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Input(format!("stdout: {e}"))),
                Ok(()) => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match std::env::var("GBK_SEED") {
        Ok(text) => match text.parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                eprintln!("error: GBK_SEED must be an unsigned integer, got {text:?}");
                return ExitCode::from(2);
            }
        },
        Err(_) => cli.seed,
    };
    let result: CmdResult = match &cli.command {
        Command::Jordan { pair, tol } => cmd_jordan(pair, *tol),
        Command::Smap { pair, s } => cmd_smap(pair, s),
        Command::RegionCheck {
            pair,
            s,
            c,
            delta,
            theta_min,
            theta_max,
            mu0,
        } => cmd_region_check(pair, s, *c, *delta, *theta_min, *theta_max, *mu0),
        Command::GraphCheck {
            example,
            expr,
            table,
            n,
            m,
            lo,
            hi,
            count,
            beta0,
            beta1,
            alpha,
            coord,
            critical,
        } => graph_from_args(example, expr, table, *n, *m).and_then(|f| {
            cmd_graph_check(&f, lo, hi, *count, *beta0, *beta1, *alpha, *coord, critical)
        }),
        Command::Verify {
            identity,
            example,
            points,
        } => cmd_verify(identity, example, *points, seed),
        Command::LoCone { points } => cmd_lo_cone(*points, seed),
        Command::Rigidity {
            sphere,
            p,
            q,
            param,
            count,
            rank_le_2,
        } => cmd_rigidity(sphere, p, q, param, *count, *rank_le_2, seed),
    };
    match result {
        Ok((value, pass)) => {
            if let Err(CliError::Input(msg)) = emit(&value, &cli.format, &cli.output) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}
