//! Command-line front end: reads a group spec file, runs one analysis stage
//! and renders a report as text, JSON or CSV.
//!
//! Every report starts with the tool version, the SHA-256 of the spec file,
//! the seed, tolerances and caps. Nothing time-dependent is written, so equal
//! configurations give byte-identical output. The integrity basis is cached
//! under `ORBITSCOPE_CACHE_DIR` when that variable is set, keyed by the spec
//! hash and the caps.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dynamics::{gradient_field, integrate, orbit_space_consistency, project_trajectory, MONOTONICITY_SLACK};
use crate::error::{Error, Result};
use crate::group::{element_order_profile, FiniteGroupRep, GroupSpec, DEFAULT_MAX_ORDER, DEFAULT_SUBGROUP_CAP};
use crate::invariants::{compute_mib, is_coregular, molien_series, p_matrix, IntegrityBasis};
use crate::landau::{check_stability, linspace, minimize, sweep, CoeffKind, LandauModel, MinimizeOptions};
use crate::poly::{Polynomial, VarKind};
use crate::rational::format_q;
use crate::reduction::{reduce, verify_reduction, GradedPotential, ReductionContext};
use crate::strata::{lattice_from_types, principal_critical_orbits, symmetry_types_seeded, DEFAULT_SEED};

pub const CACHE_ENV: &str = "ORBITSCOPE_CACHE_DIR";

#[derive(Debug, Clone, Parser)]
#[command(name = "orbitscope", version, about = "Invariants, strata and Landau symmetry breaking for finite linear group actions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Order, Cayley-table check and subgroup count.
    Group,
    /// Molien series, minimal integrity basis, relations and P-matrix.
    Invariants,
    /// Symmetry types, isotropy lattice and principal critical orbits.
    Strata,
    /// Critical points at one parameter point, or a phase diagram with --sweep.
    Landau,
    /// Poincaré reduction of the model with numeric verification.
    Reduce,
    /// Gradient-flow trajectory of the model.
    Flow,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Group => "group",
            Command::Invariants => "invariants",
            Command::Strata => "strata",
            Command::Landau => "landau",
            Command::Reduce => "reduce",
            Command::Flow => "flow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad value in {s:?}"))?;
    Ok((name.trim().to_string(), v))
}

fn parse_sweep(s: &str) -> std::result::Result<SweepSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, lo, hi, steps] = parts.as_slice() else {
        return Err(format!("expected NAME:LO:HI:STEPS, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in {s:?}"));
    Ok(SweepSpec {
        name: name.trim().to_string(),
        lo: num(lo)?,
        hi: num(hi)?,
        steps: steps.trim().parse().map_err(|_| format!("bad step count in {s:?}"))?,
    })
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Group spec file (JSON with "dim", "generators", "name").
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Highest x-degree searched for basis generators (default |G|).
    #[arg(long, global = true)]
    pub degree_cap: Option<usize>,
    /// Highest x-degree searched for relations (default twice the top basis degree).
    #[arg(long, global = true)]
    pub relation_cap: Option<usize>,
    /// x-degree of the generic Landau polynomial when --model is absent.
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    /// Parameter value, repeatable.
    #[arg(long = "param", global = true, value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// One-parameter sweep for `landau`.
    #[arg(long, global = true, value_parser = parse_sweep)]
    pub sweep: Option<SweepSpec>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Symmetry-classification tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Directory that receives a copy of the report.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Landau polynomial such as "a*J1 + J1^2 + c*J2 + J2^2".
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Parameter names to treat as critical, repeatable.
    #[arg(long, global = true)]
    pub critical: Vec<String>,
    /// Truncation x-degree for `reduce` (default: the model's top x-degree).
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Initial state for `flow`, comma separated.
    #[arg(long, global = true)]
    pub x0: Option<String>,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, global = true, default_value_t = 1e-2)]
    pub dt: f64,
}

/// A rendered analysis.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub header: Value,
    pub result: Value,
    pub text: String,
    pub csv: Option<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = json!({ "orbitscope": self.header, "command": self.command, "result": self.result });
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => format!("{}{}", self.header_lines(), self.text),
            Format::Csv => match &self.csv {
                Some(c) => format!("{}{}", self.header_lines(), c),
                None => format!("{}{}", self.header_lines(), self.text),
            },
        }
    }

    fn header_lines(&self) -> String {
        let mut s = format!("# orbitscope {} {}\n", self.header["version"].as_str().unwrap_or(""), self.command);
        for key in ["spec_name", "spec_sha256", "seed", "tolerances", "caps"] {
            s.push_str(&format!("# {key}: {}\n", compact(&self.header[key])));
        }
        s
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Context {
    opts: Options,
    spec: GroupSpec,
    sha: String,
    rep: FiniteGroupRep,
}

impl Context {
    fn load(opts: &Options) -> Result<Self> {
        let path = opts.spec.as_ref().ok_or_else(|| Error::Parse {
            what: "arguments".into(),
            message: "--spec PATH is required".into(),
        })?;
        let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse {
            what: "group spec".into(),
            message: e.to_string(),
        })?;
        let spec = GroupSpec::from_json(&text)?;
        let rep = spec.build(DEFAULT_MAX_ORDER)?;
        Ok(Context {
            opts: opts.clone(),
            spec,
            sha: hex(&Sha256::digest(&bytes)),
            rep,
        })
    }

    fn header(&self, extra_caps: Value) -> Value {
        let mut caps = json!({
            "max_order": DEFAULT_MAX_ORDER,
            "subgroup_cap": DEFAULT_SUBGROUP_CAP,
            "degree_cap": self.opts.degree_cap,
            "relation_cap": self.opts.relation_cap,
            "ell": self.opts.ell,
        });
        if let (Value::Object(c), Value::Object(e)) = (&mut caps, extra_caps) {
            c.extend(e);
        }
        json!({
            "tool": "orbitscope",
            "version": env!("CARGO_PKG_VERSION"),
            "spec_name": self.spec.name,
            "spec_sha256": self.sha,
            "seed": self.opts.seed,
            "tolerances": {
                "symmetry": self.opts.tol,
                "gradient": MinimizeOptions::default().grad_tol,
                "cluster": MinimizeOptions::default().cluster_tol,
                "monotonicity": MONOTONICITY_SLACK,
            },
            "caps": caps,
        })
    }

    fn cache_path(&self) -> Option<PathBuf> {
        let dir = std::env::var_os(CACHE_ENV)?;
        let cap = |c: Option<usize>| c.map_or("auto".to_string(), |v| v.to_string());
        Some(Path::new(&dir).join(format!(
            "mib-{}-d{}-r{}.json",
            self.sha,
            cap(self.opts.degree_cap),
            cap(self.opts.relation_cap)
        )))
    }

    fn load_cached(&self, path: &Path) -> Option<IntegrityBasis> {
        let v: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
        let polys = |key: &str, kind: VarKind, n: usize| -> Option<Vec<Polynomial>> {
            v[key].as_array()?.iter().map(|s| Polynomial::parse(s.as_str()?, kind, n).ok()).collect()
        };
        let basis = polys("basis", VarKind::X, self.rep.dim())?;
        let relations = polys("relations", VarKind::J, basis.len())?;
        let cap = v["relation_cap"].as_u64()? as usize;
        IntegrityBasis::restore(basis, relations, cap, v["complete"].as_bool()?).ok()
    }

    /// The integrity basis, from the cache when possible.
    fn basis(&self) -> Result<IntegrityBasis> {
        let path = self.cache_path();
        if let Some(b) = path.as_deref().and_then(|p| self.load_cached(p)) {
            return Ok(b);
        }
        let mut basis = compute_mib(&self.rep, self.opts.degree_cap)?;
        if let Some(cap) = self.opts.relation_cap {
            basis = basis.with_relation_cap(cap);
        }
        if let Some(p) = path {
            let v = json!({
                "basis": basis.basis().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "relations": basis.relations().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "relation_cap": basis.relation_cap(),
                "complete": basis.is_complete(),
            });
            // the cache is an optimization; an unwritable directory is not an error
            let _ = p.parent().map(fs::create_dir_all);
            let _ = fs::write(&p, serde_json::to_string_pretty(&v).expect("serializes"));
        }
        Ok(basis)
    }

    fn model(&self, basis: &IntegrityBasis) -> Result<LandauModel> {
        let mut model = match &self.opts.model {
            Some(text) => {
                let critical: Vec<&str> = self.opts.critical.iter().map(String::as_str).collect();
                LandauModel::parse(&self.rep, basis, text, &critical)?
            }
            None => LandauModel::build_generic(&self.rep, basis, self.opts.ell),
        };
        if self.opts.model.is_none() && !self.opts.critical.is_empty() {
            for p in model.params().to_vec() {
                model.set_kind(&p.name, CoeffKind::Generic)?;
            }
            for name in &self.opts.critical {
                model.set_kind(name, CoeffKind::Critical)?;
            }
        }
        Ok(model)
    }

    fn lambda(&self, model: &LandauModel) -> Result<Vec<f64>> {
        let pairs: Vec<(&str, f64)> = self.opts.params.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        model.lambda(&pairs)
    }

    fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            seed: self.opts.seed,
            symmetry_tol: self.opts.tol,
            ..MinimizeOptions::default()
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.10}")).collect();
    format!("({})", parts.join(", "))
}

fn cmd_group(ctx: &Context) -> Result<Report> {
    let rep = &ctx.rep;
    let subgroups = rep.all_subgroups(DEFAULT_SUBGROUP_CAP)?;
    let cayley_ok = rep.verify_tables();
    let profile = element_order_profile(rep);
    let metric = rep.invariant_metric();
    let eta: Vec<Vec<String>> = metric.eta().to_rows().iter().map(|r| r.iter().map(format_q).collect()).collect();
    let mut text = format!(
        "dimension: {}\norder: {}\ngenerators: {}\ncayley table check: {}\nsubgroups: {}\n",
        rep.dim(),
        rep.order(),
        ctx.spec.generators.len(),
        if cayley_ok { "passed" } else { "FAILED" },
        subgroups.len()
    );
    text.push_str("element orders:");
    for (o, c) in &profile {
        text.push_str(&format!(" {o}:{c}"));
    }
    text.push_str(&format!("\ninvariant metric: {}\n", eta.iter().map(|r| format!("[{}]", r.join(", "))).collect::<Vec<_>>().join(" ")));
    Ok(Report {
        command: "group",
        header: ctx.header(json!({})),
        result: json!({
            "dim": rep.dim(),
            "order": rep.order(),
            "generators": ctx.spec.generators.len(),
            "cayley_check": cayley_ok,
            "subgroups": subgroups.len(),
            "element_orders": profile,
            "invariant_metric": eta,
        }),
        text,
        csv: None,
    })
}

fn cmd_invariants(ctx: &Context) -> Result<Report> {
    let basis = ctx.basis()?;
    let horizon = basis.relation_cap().max(basis.max_degree());
    let molien = molien_series(&ctx.rep, horizon);
    let p = p_matrix(&ctx.rep, &basis)?;
    let coregular = is_coregular(&basis);
    let mut text = format!("molien series (degrees 0..={horizon}): {:?}\n", molien.coefficients());
    text.push_str(&format!("degrees: {:?}\ncomplete: {}\ncoregular: {}\nbasis:\n", basis.degrees(), basis.is_complete(), coregular));
    for (i, b) in basis.basis().iter().enumerate() {
        text.push_str(&format!("  J{} = {}\n", i + 1, b));
    }
    text.push_str(&format!("relations (x-degree <= {}):\n", basis.relation_cap()));
    if basis.relations().is_empty() {
        text.push_str("  (none)\n");
    }
    for r in basis.relations() {
        text.push_str(&format!("  {r} = 0\n"));
    }
    text.push_str("P-matrix:\n");
    for (i, row) in p.entries().iter().enumerate() {
        for (h, e) in row.iter().enumerate().skip(i) {
            text.push_str(&format!("  P{}{} = {}\n", i + 1, h + 1, e));
        }
    }
    Ok(Report {
        command: "invariants",
        header: ctx.header(json!({ "relation_cap_used": basis.relation_cap(), "molien_degree": horizon })),
        result: json!({
            "molien": molien.coefficients(),
            "degrees": basis.degrees(),
            "complete": basis.is_complete(),
            "coregular": coregular,
            "basis": basis.basis().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "relations": basis.relations().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "pmatrix": p.entries().iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        text,
        csv: None,
    })
}

fn cmd_strata(ctx: &Context) -> Result<Report> {
    let types = symmetry_types_seeded(&ctx.rep, ctx.opts.seed)?;
    let lattice = lattice_from_types(types);
    let rays = principal_critical_orbits(&ctx.rep)?;
    let mut text = String::from("symmetry types:\n");
    let mut csv = String::from("type_id,order,fix_dim,realized,conjugates,principal\n");
    for t in &lattice.types {
        let principal = lattice.principal == Some(t.id);
        text.push_str(&format!(
            "  {} realized={} conjugates={}{}\n",
            t.label(),
            t.realized,
            t.conjugates.len(),
            if principal { " principal" } else { "" }
        ));
        csv.push_str(&format!("{},{},{},{},{},{}\n", t.id, t.order, t.fix_dim, t.realized, t.conjugates.len(), principal));
    }
    text.push_str("hasse edges:");
    for (a, b) in &lattice.hasse {
        text.push_str(&format!(" T{a}<T{b}"));
    }
    text.push_str("\nprincipal critical rays:\n");
    if rays.rays.is_empty() {
        text.push_str("  (none)\n");
    }
    for r in &rays.rays {
        let dir: Vec<String> = r.direction.iter().map(format_q).collect();
        text.push_str(&format!("  T{} direction ({}) orbit size {}\n", r.type_id, dir.join(", "), r.orbit_size));
    }
    Ok(Report {
        command: "strata",
        header: ctx.header(json!({})),
        result: json!({ "lattice": lattice, "rays": rays.rays }),
        text,
        csv: Some(csv),
    })
}

fn cmd_landau(ctx: &Context) -> Result<Report> {
    let basis = ctx.basis()?;
    let model = ctx.model(&basis)?;
    let opts = ctx.minimize_options();
    let n = ctx.rep.dim();
    if let Some(sw) = &ctx.opts.sweep {
        let grid = linspace(sw.lo, sw.hi, sw.steps);
        let fixed: Vec<(&str, f64)> = ctx.opts.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let bisect = 1e-9;
        let diagram = sweep(&model, &sw.name, &grid, &fixed, &opts, bisect)?;
        let mut text = format!("model: {model}\nsweep {} over [{}, {}] with {} points\n", sw.name, sw.lo, sw.hi, sw.steps);
        for r in &diagram.rows {
            match (&r.type_label, r.min_value, &r.location) {
                (Some(l), Some(v), Some(x)) => text.push_str(&format!("  {:+.6}  {l}  min {v:.10}  at {}\n", r.value, fmt_vec(x))),
                _ => text.push_str(&format!("  {:+.6}  error {}\n", r.value, r.error.as_deref().unwrap_or("?"))),
            }
        }
        text.push_str("transitions:\n");
        if diagram.transitions.is_empty() {
            text.push_str("  (none)\n");
        }
        for t in &diagram.transitions {
            text.push_str(&format!("  T{} -> T{} at {:.9} (bracket [{:.9}, {:.9}])\n", t.from_type, t.to_type, t.estimate, t.lo, t.hi));
        }
        return Ok(Report {
            command: "landau",
            header: ctx.header(json!({ "bisect_width": bisect, "ell": model.degree_x(), "starts": opts.starts })),
            result: json!({ "model": model.to_string(), "diagram": diagram }),
            text,
            csv: Some(diagram.to_csv(n)),
        });
    }
    let lambda = ctx.lambda(&model)?;
    let stability = check_stability(&model, &lambda, 1e2, 64, ctx.opts.seed);
    let points = minimize(&model, &lambda, &opts)?;
    let mut text = format!("model: {model}\nlambda: {}\nstable at infinity: {}\ncritical points:\n", fmt_vec(&lambda), stability.stable);
    let mut csv = String::from("kind,type_id,type,value,orbit_size");
    for i in 1..=n {
        csv.push_str(&format!(",x{i}"));
    }
    csv.push('\n');
    for p in &points {
        text.push_str(&format!(
            "  {:<8} {}  value {:.10}  orbit {}  at {}\n",
            p.kind(),
            p.symmetry.label(),
            p.value,
            p.orbit_size,
            fmt_vec(&p.location)
        ));
        csv.push_str(&format!("{},{},\"{}\",{},{}", p.kind(), p.symmetry.id, p.symmetry.label(), p.value, p.orbit_size));
        for c in &p.location {
            csv.push_str(&format!(",{c}"));
        }
        csv.push('\n');
    }
    Ok(Report {
        command: "landau",
        header: ctx.header(json!({ "ell": model.degree_x(), "starts": opts.starts })),
        result: json!({ "model": model.to_string(), "lambda": lambda, "stability": stability, "critical_points": points }),
        text,
        csv: Some(csv),
    })
}

fn sample_lambdas(g: &GradedPotential, seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            g.params()
                .iter()
                .map(|p| match p.kind {
                    CoeffKind::Critical => rng.random_range(-0.5..0.5),
                    CoeffKind::Generic => {
                        let m: f64 = rng.random_range(0.5..1.5);
                        if rng.random::<bool>() { m } else { -m }
                    }
                })
                .collect()
        })
        .collect()
}

/// Random points of norm `radius`, `radius/2`, ... so that they differ even in one dimension.
fn sample_points(n: usize, seed: u64, count: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..count)
        .map(|k| {
            let radius = radius / (1 << k) as f64;
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
            v.into_iter().map(|a| a * radius / norm).collect()
        })
        .collect()
}

fn cmd_reduce(ctx: &Context) -> Result<Report> {
    let basis = ctx.basis()?;
    let model = ctx.model(&basis)?;
    let truncation = ctx.opts.truncation.unwrap_or(model.degree_x());
    let rctx = ReductionContext::new(&ctx.rep, &basis)?;
    let g = GradedPotential::from_model(&model);
    let report = reduce(&g, truncation, &rctx)?;
    let lambdas = if ctx.opts.params.is_empty() {
        sample_lambdas(&g, ctx.opts.seed, 3)
    } else {
        vec![ctx.lambda(&model)?]
    };
    let points = sample_points(ctx.rep.dim(), ctx.opts.seed, 2, 0.3);
    let verification = verify_reduction(&g, &report, &rctx, &lambdas, &points)?;
    let text = format!("{}{}", report.render(), verification.render());
    let names = |v: &[(usize, crate::poly::Monomial)]| -> Vec<Value> {
        v.iter()
            .map(|(d, m)| {
                let p = crate::reduction::RPoly::monomial(VarKind::J, m.clone(), crate::ratfn::RatFn::constant(num_traits::One::one()));
                json!({ "degree": d, "monomial": report.reduced.render_poly(&p) })
            })
            .collect()
    };
    let mut csv = String::from("lambda,point,slope");
    for s in &verification.scales {
        csv.push_str(&format!(",residual_s{s}"));
    }
    csv.push('\n');
    for c in &verification.cases {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        csv.push_str(&format!(
            "{},{},{}",
            join(&c.lambda),
            join(&c.point),
            c.slope.map_or("exact".to_string(), |s| s.to_string())
        ));
        for r in &c.residuals {
            csv.push_str(&format!(",{r:e}"));
        }
        csv.push('\n');
    }
    Ok(Report {
        command: "reduce",
        header: ctx.header(json!({ "truncation": truncation })),
        result: json!({
            "original": report.original.to_string(),
            "reduced": report.reduced.to_string(),
            "generators": report.generators.iter().map(|g| json!({
                "degree": g.degree,
                "h": report.reduced.render_poly(&g.h),
            })).collect::<Vec<_>>(),
            "removed_terms": names(&report.removed_terms),
            "surviving_terms": names(&report.survivors),
            "non_removable": names(&report.non_removable),
            "filtration_preserved": report.filtration_preserved(),
            "violations": report.violations,
            "residual_degree": report.residual_degree,
            "verification": verification,
        }),
        text,
        csv: Some(csv),
    })
}

fn cmd_flow(ctx: &Context) -> Result<Report> {
    let basis = ctx.basis()?;
    let model = ctx.model(&basis)?;
    let lambda = ctx.lambda(&model)?;
    let n = ctx.rep.dim();
    let x0: Vec<f64> = match &ctx.opts.x0 {
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::Parse {
                    what: "--x0".into(),
                    message: format!("bad number {t:?}"),
                })
            })
            .collect::<Result<_>>()?,
        None => sample_points(n, ctx.opts.seed, 1, 0.5).remove(0),
    };
    let field = gradient_field(&model, &lambda);
    let traj = integrate(&field, &x0, ctx.opts.t_end, ctx.opts.dt)?;
    let consistency = orbit_space_consistency(&field, &traj);
    let projected = project_trajectory(&basis, &traj);
    let pot = field.potential();
    let end = traj.last();
    let end_grad = pot.gradient(end).iter().map(|g| g * g).sum::<f64>().sqrt();
    let text = format!(
        "model: {model}\nlambda: {}\nx0: {}\nsteps: {} (dt {}, t_end {})\nfinal state: {}\nfinal J: {}\nfinal value: {:.12}\nfinal |grad|: {:.3e}\nretried steps: {}\norbit-space residual: {:.3e}\norbit-space energy monotone: {}\n",
        fmt_vec(&lambda),
        fmt_vec(&x0),
        traj.len() - 1,
        ctx.opts.dt,
        ctx.opts.t_end,
        fmt_vec(end),
        fmt_vec(projected.j_states.last().expect("nonempty")),
        pot.value(end),
        end_grad,
        traj.retried_steps,
        consistency.max_residual,
        consistency.energy_monotone
    );
    Ok(Report {
        command: "flow",
        header: ctx.header(json!({ "dt": ctx.opts.dt, "t_end": ctx.opts.t_end })),
        result: json!({
            "model": model.to_string(),
            "lambda": lambda,
            "x0": x0,
            "trajectory": traj,
            "orbit_space": projected,
            "consistency": consistency,
            "final_gradient_norm": end_grad,
        }),
        text,
        csv: Some(traj.to_csv(pot)),
    })
}

/// Runs one command and returns the report in the requested format; with
/// `--out` the same bytes are also written to `<out>/<command>.<ext>`.
pub fn run(cli: &Cli) -> Result<String> {
    let ctx = Context::load(&cli.opts)?;
    let report = match cli.command {
        Command::Group => cmd_group(&ctx)?,
        Command::Invariants => cmd_invariants(&ctx)?,
        Command::Strata => cmd_strata(&ctx)?,
        Command::Landau => cmd_landau(&ctx)?,
        Command::Reduce => cmd_reduce(&ctx)?,
        Command::Flow => cmd_flow(&ctx)?,
    };
    let out = report.render(cli.opts.format);
    if let Some(dir) = &cli.opts.out {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{}.{}", cli.command.name(), cli.opts.format.ext()));
        fs::write(&path, &out).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(out)
}

/// `{"error":{"module":…,"code":…,"message":…}}`.
pub fn error_record(module: &str, code: &str, message: &str) -> String {
    json!({ "error": { "module": module, "code": code, "message": message } }).to_string()
}

/// Process entry point: returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", error_record("cli", "Usage", e.to_string().trim()));
            return 2;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("{}", error_record(e.module(), e.code(), &e.to_string()));
            1
        }
    }
}
