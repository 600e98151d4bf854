//! Subcommand dispatch: each command reads what it needs from the problem
//! file, runs one toolkit operation and returns verdicts, results and any
//! theorem violations.

use std::time::Instant;

use peakstate::algebra::{block_decompose, generate_cstar, OperatorSubspace};
use peakstate::certify::*;
use peakstate::linalg::{c, op_norm, CMat};
use peakstate::numrange::*;
use peakstate::rng::{gaussian_matrix, trial_rng, Gen};
use peakstate::states::{DensityState, PureState};
use peakstate::{Error, Tolerances};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::problem::{is_input_error, parse_matrix, Problem, ProblemError, StateDecl};
use crate::report::{self, complex, density, matrix, num, nums, vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Cstar,
    Blocks,
    #[value(name = "pep-scan")]
    PepScan,
    Extension,
    Excision,
    #[value(name = "peak-support")]
    PeakSupport,
    #[value(name = "peak-state")]
    PeakState,
    Detect,
    Boundary,
    Pinnacle,
    #[value(name = "block-pinnacle")]
    BlockPinnacle,
    Convexity,
    Derivcheck,
    Numrange,
    Ellipse,
    Specfree,
    Warv,
    Chain,
    #[value(name = "m23-probe")]
    M23Probe,
}

impl Command {
    pub const ALL: [(Command, &'static str); 19] = [
        (Command::Cstar, "cstar"),
        (Command::Blocks, "blocks"),
        (Command::PepScan, "pep-scan"),
        (Command::Extension, "extension"),
        (Command::Excision, "excision"),
        (Command::PeakSupport, "peak-support"),
        (Command::PeakState, "peak-state"),
        (Command::Detect, "detect"),
        (Command::Boundary, "boundary"),
        (Command::Pinnacle, "pinnacle"),
        (Command::BlockPinnacle, "block-pinnacle"),
        (Command::Convexity, "convexity"),
        (Command::Derivcheck, "derivcheck"),
        (Command::Numrange, "numrange"),
        (Command::Ellipse, "ellipse"),
        (Command::Specfree, "specfree"),
        (Command::Warv, "warv"),
        (Command::Chain, "chain"),
        (Command::M23Probe, "m23-probe"),
    ];

    pub fn name(self) -> &'static str {
        Command::ALL.iter().find(|(c, _)| *c == self).map(|(_, n)| *n).unwrap()
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.iter().find(|(_, n)| *n == s).map(|(c, _)| *c)
    }
}

#[derive(Debug, Clone, Default, PartialEq, clap::Args)]
pub struct Flags {
    /// Base seed; trial i uses splitmix64(seed ^ splitmix64(i)).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random directions for scans.
    #[arg(long)]
    pub directions: Option<usize>,
    /// Singleton threshold for extension widths.
    #[arg(long = "tol-width")]
    pub tol_width: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

impl Flags {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        if let Some(s) = self.seed {
            m.insert("seed".into(), json!(s));
        }
        if let Some(d) = self.directions {
            m.insert("directions".into(), json!(d));
        }
        if let Some(t) = self.tol_width {
            m.insert("tol-width".into(), num(t));
        }
        if let Some(a) = self.alpha {
            m.insert("alpha".into(), num(a));
        }
        if let Some(t) = self.trials {
            m.insert("trials".into(), json!(t));
        }
        Value::Object(m)
    }

    /// Flags as written in a manifest entry.
    pub fn from_json(v: &Value) -> Result<Flags, String> {
        let obj = match v {
            Value::Null => return Ok(Flags::default()),
            Value::Object(o) => o,
            _ => return Err("flags must be an object".into()),
        };
        let mut f = Flags::default();
        for (k, x) in obj {
            let bad = || format!("flag {k} has an invalid value {x}");
            match k.as_str() {
                "seed" => f.seed = Some(x.as_u64().ok_or_else(bad)?),
                "directions" => f.directions = Some(x.as_u64().ok_or_else(bad)? as usize),
                "trials" => f.trials = Some(x.as_u64().ok_or_else(bad)? as usize),
                "tol-width" | "tol_width" => f.tol_width = Some(x.as_f64().filter(|t| *t > 0.0).ok_or_else(bad)?),
                "alpha" => f.alpha = Some(x.as_f64().filter(|a| *a > 0.0).ok_or_else(bad)?),
                _ => return Err(format!("unknown flag {k}")),
            }
        }
        Ok(f)
    }
}

#[derive(Debug)]
pub enum CmdError {
    Problem(ProblemError),
    Core(Error),
    Usage(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Problem(_) | CmdError::Usage(_) => 2,
            CmdError::Core(e) if is_input_error(e) => 2,
            CmdError::Core(Error::MarginViolation(_)) => 1,
            CmdError::Core(_) => 3,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CmdError::Problem(p) => p.kind().into(),
            CmdError::Usage(_) => "UsageError".into(),
            CmdError::Core(e) => format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_owned(),
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Problem(e) => write!(f, "{e}"),
            CmdError::Core(e) => write!(f, "{e}"),
            CmdError::Usage(s) => write!(f, "{s}"),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Core(e)
    }
}

impl From<ProblemError> for CmdError {
    fn from(e: ProblemError) -> Self {
        CmdError::Problem(e)
    }
}

type CmdResult<T> = Result<T, CmdError>;

#[derive(Debug, Default)]
pub struct Outcome {
    pub verdict: Map<String, Value>,
    pub results: Map<String, Value>,
    pub violations: Vec<String>,
    pub exit: i32,
}

impl Outcome {
    fn verdict(mut self, k: &str, v: Value) -> Self {
        self.verdict.insert(k.into(), v);
        self
    }

    fn result(mut self, k: &str, v: Value) -> Self {
        self.results.insert(k.into(), v);
        self
    }

    fn exit_if(mut self, negative: bool) -> Self {
        self.exit = negative as i32;
        self
    }
}

struct Ctx<'a> {
    problem: Option<&'a Problem>,
    flags: &'a Flags,
    tol: Tolerances,
    seed: u64,
}

fn usage<T>(msg: impl Into<String>) -> CmdResult<T> {
    Err(CmdError::Usage(msg.into()))
}

fn field_err(field: &str, msg: impl Into<String>) -> CmdError {
    CmdError::Problem(ProblemError::Schema { field: format!("params.{field}"), msg: msg.into() })
}

impl<'a> Ctx<'a> {
    fn problem(&self) -> CmdResult<&'a Problem> {
        self.problem.ok_or_else(|| CmdError::Usage("this command needs a problem file".into()))
    }

    fn param(&self, key: &str) -> Option<&'a Value> {
        self.problem.and_then(|p| p.params.get(key))
    }

    fn param_f64(&self, key: &str) -> CmdResult<Option<f64>> {
        match self.param(key) {
            None => Ok(None),
            Some(v) => v.as_f64().filter(|x| x.is_finite()).map(Some).ok_or_else(|| field_err(key, "expected a number")),
        }
    }

    fn param_usize(&self, key: &str) -> CmdResult<Option<usize>> {
        match self.param(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(|x| Some(x as usize)).ok_or_else(|| field_err(key, "expected a nonnegative integer")),
        }
    }

    fn param_reals(&self, key: &str) -> CmdResult<Option<Vec<f64>>> {
        match self.param(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| field_err(key, "expected an array of numbers")))
                .collect::<CmdResult<Vec<_>>>()
                .map(Some),
            Some(_) => Err(field_err(key, "expected an array of numbers")),
        }
    }

    fn param_name(&self, key: &str) -> CmdResult<Option<&'a str>> {
        match self.param(key) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| field_err(key, "expected a name")),
        }
    }

    fn directions(&self, default: usize) -> CmdResult<usize> {
        Ok(self.flags.directions.or(self.param_usize("directions")?).unwrap_or(default))
    }

    fn trials(&self, default: usize) -> CmdResult<usize> {
        Ok(self.flags.trials.or(self.param_usize("trials")?).unwrap_or(default))
    }

    fn alpha(&self) -> CmdResult<f64> {
        let a = self.flags.alpha.or(self.param_f64("alpha")?).unwrap_or(0.5);
        if !(a > 0.0) {
            return Err(field_err("alpha", "must be positive"));
        }
        Ok(a)
    }

    fn rng(&self, index: u64) -> Gen {
        trial_rng(self.seed, index)
    }

    /// `params.subspace`, or the only subspace declared.
    fn subspace(&self) -> CmdResult<(&'a str, &'a OperatorSubspace)> {
        let p = self.problem()?;
        let name = match self.param_name("subspace")? {
            Some(n) => n,
            None if p.subspaces.len() == 1 => p.subspaces.keys().next().unwrap().as_str(),
            None => return Err(field_err("subspace", "required when the file declares several subspaces")),
        };
        let (k, d) = p
            .subspaces
            .get_key_value(name)
            .ok_or_else(|| ProblemError::Unresolved { field: "params.subspace".into(), name: name.into() })?;
        Ok((k.as_str(), &d.space))
    }

    fn state_decl(&self) -> CmdResult<(&'a str, &'a StateDecl)> {
        let p = self.problem()?;
        let name = match self.param_name("state")? {
            Some(n) => n,
            None if p.states.len() == 1 => p.states.keys().next().unwrap().as_str(),
            None => return Err(field_err("state", "required when the file declares several states")),
        };
        let (k, s) = p
            .states
            .get_key_value(name)
            .ok_or_else(|| ProblemError::Unresolved { field: "params.state".into(), name: name.into() })?;
        Ok((k.as_str(), s))
    }

    fn pure_state(&self) -> CmdResult<(&'a str, PureState)> {
        match self.state_decl()? {
            (n, StateDecl::Vector(p)) => Ok((n, p.clone())),
            (n, StateDecl::Density(_)) => usage(format!("state {n} must be given as a vector for this command")),
        }
    }

    fn density_state(&self) -> CmdResult<(&'a str, DensityState)> {
        let (n, s) = self.state_decl()?;
        Ok((n, s.density()))
    }

    fn named_matrix(&self, field: &str, name: &str) -> CmdResult<&'a CMat> {
        self.problem()?
            .matrices
            .get(name)
            .ok_or_else(|| CmdError::Problem(ProblemError::Unresolved { field: field.into(), name: name.into() }))
    }

    fn element(&self) -> CmdResult<Option<(&'a str, &'a CMat)>> {
        match self.param_name("element")? {
            None => Ok(None),
            Some(n) => Ok(Some((n, self.named_matrix("params.element", n)?))),
        }
    }

    fn k_states(&self) -> CmdResult<Vec<DensityState>> {
        let p = self.problem()?;
        match self.param("K") {
            None => Ok(vec![]),
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let name = v.as_str().ok_or_else(|| field_err(&format!("K[{i}]"), "expected a state name"))?;
                    p.states.get(name).map(StateDecl::density).ok_or_else(|| {
                        CmdError::Problem(ProblemError::Unresolved { field: format!("params.K[{i}]"), name: name.into() })
                    })
                })
                .collect(),
            Some(_) => Err(field_err("K", "expected an array of state names")),
        }
    }

    /// Entries are matrix names or inline matrices of any square size.
    fn matrix_list(&self, key: &str) -> CmdResult<Option<Vec<CMat>>> {
        match self.param(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let field = format!("params.{key}[{i}]");
                    match v {
                        Value::String(n) => self.named_matrix(&field, n).cloned(),
                        _ => Ok(parse_matrix(v, &field)?),
                    }
                })
                .collect::<CmdResult<Vec<_>>>()
                .map(Some),
            Some(_) => Err(field_err(key, "expected an array of matrix names or matrices")),
        }
    }

    fn tuple(&self) -> CmdResult<Vec<CMat>> {
        if let Some(t) = self.matrix_list("tuple")? {
            if t.is_empty() {
                return Err(field_err("tuple", "must not be empty"));
            }
            return Ok(t);
        }
        match self.element()? {
            Some((_, m)) => Ok(vec![m.clone()]),
            None => Err(field_err("tuple", "required (or params.element)")),
        }
    }
}

/// Runs one command and assembles its report. Returns the report and the
/// process exit code.
pub fn run(cmd: Command, problem: Result<Option<&Problem>, ProblemError>, flags: &Flags) -> (Value, i32) {
    let start = Instant::now();
    let mut top = Map::new();
    top.insert("command".into(), json!(cmd.name()));
    top.insert("flags".into(), flags.to_json());
    let flags_bytes = flags.to_json().to_string();
    let problem = match problem {
        Ok(p) => p,
        Err(e) => {
            let err = CmdError::Problem(e);
            return finish(top, None, Err(err), &Tolerances::default(), 0, start);
        }
    };
    let digest = report::digest(&[cmd.name().as_bytes(), problem.map(|p| p.bytes.as_slice()).unwrap_or(&[]), flags_bytes.as_bytes()]);
    top.insert("inputs_digest".into(), json!(digest));
    if let Some(p) = problem {
        top.insert("dim".into(), json!(p.dim));
        top.insert("warnings".into(), json!(p.warnings));
    }
    let mut tol = Tolerances::default();
    let pre = |problem: Option<&Problem>| -> CmdResult<(u64, Option<f64>)> {
        let ctx = Ctx { problem, flags, tol, seed: 0 };
        let seed = match (flags.seed, ctx.param("seed")) {
            (Some(s), _) => s,
            (None, Some(v)) => v.as_u64().ok_or_else(|| field_err("seed", "expected an unsigned integer"))?,
            (None, None) => 0,
        };
        Ok((seed, flags.tol_width.or(ctx.param_f64("tol_width")?)))
    };
    let (seed, tw) = match pre(problem) {
        Ok(x) => x,
        Err(e) => return finish(top, problem, Err(e), &tol, 0, start),
    };
    if let Some(w) = tw {
        if !(w > 0.0) {
            return finish(top, problem, Err(field_err("tol_width", "must be positive")), &tol, seed, start);
        }
        tol.width = w;
    }
    let ctx = Ctx { problem, flags, tol, seed };
    let out = dispatch(cmd, &ctx);
    finish(top, problem, out, &tol, seed, start)
}

fn finish(
    mut top: Map<String, Value>,
    problem: Option<&Problem>,
    out: CmdResult<Outcome>,
    tol: &Tolerances,
    seed: u64,
    start: Instant,
) -> (Value, i32) {
    let _ = problem;
    top.insert("seed".into(), json!(seed));
    top.insert("tolerances".into(), report::tolerances(tol));
    let code = match out {
        Ok(o) => {
            let code = o.exit;
            top.insert("verdict".into(), Value::Object(o.verdict));
            top.insert("results".into(), Value::Object(o.results));
            top.insert("theorem_violations".into(), json!(o.violations));
            code
        }
        Err(e) => {
            let code = e.exit_code();
            top.insert("error".into(), json!({"kind": e.kind(), "message": e.to_string()}));
            top.insert("theorem_violations".into(), json!([]));
            code
        }
    };
    top.insert("exit_code".into(), json!(code));
    top.insert("wall_time_s".into(), num(start.elapsed().as_secs_f64()));
    (Value::Object(top), code)
}

fn dispatch(cmd: Command, ctx: &Ctx) -> CmdResult<Outcome> {
    match cmd {
        Command::Cstar => cstar(ctx),
        Command::Blocks => blocks(ctx),
        Command::PepScan => pep(ctx),
        Command::Extension => extension(ctx),
        Command::Excision => excision(ctx),
        Command::PeakSupport => peak_support(ctx),
        Command::PeakState => peak_state(ctx),
        Command::Detect => detect(ctx),
        Command::Boundary => boundary(ctx),
        Command::Pinnacle => pinnacle(ctx),
        Command::BlockPinnacle => block(ctx),
        Command::Convexity => convexity(ctx),
        Command::Derivcheck => derivcheck(ctx),
        Command::Numrange => numrange(ctx),
        Command::Ellipse => ellipse(ctx),
        Command::Specfree => specfree(ctx),
        Command::Warv => warv(ctx),
        Command::Chain => chain(ctx),
        Command::M23Probe => m23(ctx),
    }
}

fn subspace_info(m: &OperatorSubspace) -> Value {
    json!({
        "dim": m.dim(),
        "ambient_dim": m.ambient_dim(),
        "unital": m.unital,
        "selfadjoint": m.selfadjoint,
        "algebra": m.algebra_closed,
    })
}

fn cstar(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let decl = &ctx.problem()?.subspaces[name];
    let b = generate_cstar(m);
    Ok(Outcome::default()
        .result("declared", json!({"basis": decl.basis, "unital": decl.unital, "algebra": decl.algebra}))
        .verdict("cstar_dim", json!(b.dim()))
        .verdict("equals_full_matrix_algebra", json!(b.dim() == m.ambient_dim().pow(2)))
        .result("subspace", json!(name))
        .result("m", subspace_info(m))
        .result("block_dims", json!(b.blocks.block_dims))
        .result("multiplicities", json!(b.blocks.multiplicities)))
}

fn blocks(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let b = generate_cstar(m);
    let d = block_decompose(&b);
    let dim_check: usize = d.block_dims.iter().map(|k| k * k).sum();
    Ok(Outcome::default()
        .verdict("blocks", json!(d.block_dims.len()))
        .verdict("dimension_consistent", json!(dim_check == b.dim()))
        .result("subspace", json!(name))
        .result("block_dims", json!(d.block_dims))
        .result("multiplicities", json!(d.multiplicities))
        .result("central_projections", Value::Array(d.central_projections.iter().map(matrix).collect()))
        .exit_if(dim_check != b.dim()))
}

fn pep(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let dirs = ctx.directions(64)?;
    let r = pep_scan(m, dirs, &mut ctx.rng(0), &ctx.tol)?;
    let mut out = Outcome::default()
        .verdict("pass", json!(r.pass()))
        .verdict("evidence", json!("sampled exposed pure states"))
        .result("subspace", json!(name))
        .result("directions", json!(r.directions))
        .result("exposed", json!(r.exposed))
        .result("degenerate_directions", json!(r.degenerate))
        .result("unique", json!(r.passes))
        .result("max_width", num(r.max_width))
        .result(
            "failures",
            Value::Array(r.failures.iter().map(|f| json!({"state": vector(&f.state), "width": num(f.width)})).collect()),
        )
        .exit_if(!r.pass());
    if m.ambient_dim() == 2 && m.dim() == 2 && !r.pass() {
        out.violations.push(format!(
            "a 2-dimensional unital subspace of M_2 has {} exposed pure states without unique extension",
            r.failures.len()
        ));
    }
    Ok(out)
}

fn extension(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let (sname, w) = ctx.density_state()?;
    let r = unique_extension_check(m, &w, &ctx.tol)?;
    Ok(Outcome::default()
        .verdict("unique", json!(r.unique))
        .verdict("width", num(r.width))
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("witness_state", density(&r.witness_state))
        .result("second_state", r.second_state.as_ref().map(density).unwrap_or(Value::Null))
        .result("witness_residual", num(r.witness_residual))
        .result("face_rank", json!(r.detail.face_rank))
        .result("face_dim", json!(r.detail.face_dim))
        .result("converged", json!(r.detail.converged))
        .exit_if(!r.unique))
}

fn excision(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let r = excision_check(a, &w, &ctx.tol)?;
    let mut out = Outcome::default()
        .verdict("exists", json!(r.exists))
        .verdict("distance", num(r.distance))
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("support", matrix(&r.support))
        .result("excising_element", r.excising_element.as_ref().map(matrix).unwrap_or(Value::Null))
        .result("residual", num(r.residual))
        .result("omega_of_e", num(r.omega_of_e))
        .exit_if(!r.exists);
    if r.exists && r.residual > ctx.tol.excision {
        out.violations.push(format!("constant excising element leaves residual {:.3e}", r.residual));
    }
    Ok(out)
}

fn peak_support(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let samples = ctx.param_usize("samples")?.unwrap_or(16);
    let r = peak_support_check(a, &w, samples, &mut ctx.rng(0), &ctx.tol)?;
    let mut out = Outcome::default()
        .verdict("exists", json!(r.is_some()))
        .result("subspace", json!(name))
        .result("state", json!(sname));
    if let Some(p) = &r {
        out = out
            .result("a", matrix(&p.a))
            .result("omega_of_a", num(p.omega_of_a))
            .result("max_norm_off_support", num(p.max_norm))
            .result("projections_tested", json!(p.projections_tested));
    }
    Ok(out.exit_if(r.is_none()))
}

fn peak_json(v: &PeakVerdict) -> Value {
    json!({
        "peak": v.peak,
        "eigenspace_dim": v.eigenspace_dim,
        "overlap": num(v.overlap),
        "compression_residual": num(v.compression_residual),
    })
}

fn peak_state(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let (ename, a) = ctx.element()?.ok_or_else(|| field_err("element", "required"))?;
    let v = peak_state_check(m, &w, a, &ctx.tol)?;
    Ok(Outcome::default()
        .verdict("peak", json!(v.peak))
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("element", json!(ename))
        .result("detail", peak_json(&v))
        .exit_if(!v.peak))
}

fn detect(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let budget = ctx.param_usize("budget")?.unwrap_or(16);
    let d = detectable_check(m, &w, budget, &mut ctx.rng(0), &ctx.tol)?;
    let mut out = Outcome::default().result("subspace", json!(name)).result("state", json!(sname));
    match &d {
        Detection::Detected { a, verdict, method } => {
            let bd = boundary_rep_check(m, &w, &ctx.tol)?;
            out = out
                .verdict("detected", json!(true))
                .result("witness", matrix(a))
                .result("method", json!(method))
                .result("peak", peak_json(verdict))
                .result("density_rank", json!(w.density().rank()))
                .result("boundary", json!(bd.boundary))
                .result("boundary_width", num(bd.width));
            if !bd.boundary {
                out.violations.push(format!("detected state fails the boundary check (width {:.3e})", bd.width));
            }
        }
        Detection::Unknown { attempts } => {
            out = out.verdict("detected", json!("unknown")).result("attempts", json!(attempts)).exit_if(true);
        }
    }
    Ok(out)
}

fn boundary(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, m) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let v = boundary_rep_check(m, &w, &ctx.tol)?;
    Ok(Outcome::default()
        .verdict("boundary", json!(v.boundary))
        .verdict("width", num(v.width))
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("gns_dim", json!(v.gns_dim))
        .result("face_dim", json!(v.face_dim))
        .exit_if(!v.boundary))
}

fn pinnacle_json(c: &PinnacleCertificate) -> Value {
    json!({
        "a": matrix(&c.a),
        "b": matrix(&c.b),
        "alpha": num(c.alpha),
        "epsilon": num(c.epsilon),
        "delta": num(c.delta),
        "kappa": num(c.kappa),
        "gamma": num(c.gamma),
        "omega_of_a_star_a": num(c.omega_value),
        "norm": num(c.norm),
        "max_K": num(c.max_k),
        "one_minus_max_K": num(c.one_minus_max_k),
        "norm_slack": num(c.norm_slack),
        "unique_extension": c.unique_extension,
        "lmi_achieved": num(c.lmi_achieved),
        "lmi_target": num(c.lmi_target),
        "K_size": c.k_size,
    })
}

fn pinnacle(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let k = ctx.k_states()?;
    let alpha = ctx.alpha()?;
    let b = generate_cstar(a);
    let unique = unique_extension_check_in(a, &b, &w.density(), &ctx.tol)?.unique;
    let base = Outcome::default()
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("unique_extension", json!(unique));
    match pinnacle_construct_in(a, &b, &w, &k, alpha, Some(unique), &ctx.tol) {
        Ok(c) => Ok(base.verdict("constructed", json!(true)).result("certificate", pinnacle_json(&c))),
        Err(Error::MarginViolation(msg)) => {
            let mut out = base.verdict("constructed", json!(false)).result("margin_violation", json!(msg)).exit_if(true);
            if unique {
                out.violations.push(format!("unique extension but the pinnacle margins fail: {msg}"));
            }
            Ok(out)
        }
        Err(e) => Err(e.into()),
    }
}

fn block(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let alpha = ctx.alpha()?;
    let b = generate_cstar(a);
    let blocks: Vec<usize> = match ctx.param("blocks") {
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| x.as_u64().map(|k| k as usize).ok_or_else(|| field_err("blocks", "expected block indices")))
            .collect::<CmdResult<_>>()?,
        Some(_) => return Err(field_err("blocks", "expected an array of block indices")),
        None => {
            let own = b.block_of(w.xi());
            (0..b.blocks.block_dims.len()).filter(|&k| Some(k) != own).collect()
        }
    };
    match block_pinnacle(a, &w, &blocks, alpha, &ctx.tol) {
        Ok(p) => {
            let conv = match p.convexity {
                ConvexityStatus::Certified { min_eig } => json!({"status": "certified", "min_eig": num(min_eig)}),
                ConvexityStatus::NotChecked { min_eig } => json!({"status": "not certified", "min_eig": num(min_eig)}),
            };
            Ok(Outcome::default()
                .verdict("constructed", json!(true))
                .result("subspace", json!(name))
                .result("state", json!(sname))
                .result("a", matrix(&p.a))
                .result("epsilon", num(p.epsilon))
                .result("omega_of_a_star_a", num(p.omega_value))
                .result("norm", num(p.norm))
                .result("alpha", num(alpha))
                .result(
                    "block_norms",
                    Value::Array(p.block_norms.iter().map(|&(k, x)| json!({"block": k, "norm": num(x)})).collect()),
                )
                .result("min_singular_value", num(p.min_singular_value))
                .result("omega_block", json!(p.omega_block))
                .result("convexity", conv))
        }
        Err(Error::MarginViolation(msg)) => {
            let mut out = Outcome::default().verdict("constructed", json!(false)).result("margin_violation", json!(msg));
            out.violations.push(format!("block pinnacle margins fail: {msg}"));
            Ok(out.exit_if(true))
        }
        Err(e) => Err(e.into()),
    }
}

fn convexity(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a_sp) = ctx.subspace()?;
    let (sname, psi) = ctx.density_state()?;
    let (ename, a) = ctx.element()?.ok_or_else(|| field_err("element", "required"))?;
    let grid = ctx.param_reals("t_grid")?.unwrap_or_else(default_t_grid);
    let r = a_convexity_check(a_sp, a, &psi, &grid, &ctx.tol)?;
    let (status, detail) = match r {
        Convexity::CertifiedConvex { min_eig } => ("CertifiedConvex", json!({"min_eig": num(min_eig)})),
        Convexity::SampledConvex { min_eig, min_second_difference } => (
            "SampledConvex",
            json!({"min_eig": num(min_eig), "min_second_difference": num(min_second_difference)}),
        ),
        Convexity::NonConvexWitness { min_eig, t, second_difference } => (
            "NonConvexWitness",
            json!({"min_eig": num(min_eig), "t": num(t), "second_difference": num(second_difference)}),
        ),
        Convexity::Inconclusive { min_eig, min_second_difference } => (
            "Inconclusive",
            json!({"min_eig": num(min_eig), "min_second_difference": num(min_second_difference)}),
        ),
    };
    Ok(Outcome::default()
        .verdict("status", json!(status))
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("element", json!(ename))
        .result("t_grid_points", json!(grid.len()))
        .result("detail", detail)
        .exit_if(r.non_convex()))
}

fn deriv_json(r: &DerivReport) -> Value {
    json!({
        "kappa": num(r.kappa),
        "max_rel_err": num(r.max_rel_err),
        "derivatives_ok": r.derivatives_ok,
        "bound_ok": r.bound_ok,
        "samples": r.samples.iter().map(|s| json!({
            "t": num(s.t),
            "f": num(s.f),
            "d1": num(s.d1),
            "d1_fd": num(s.d1_fd),
            "d2": num(s.d2),
            "d2_fd": num(s.d2_fd),
            "bound": s.bound.map(|(lhs, rhs)| json!({"lhs": num(lhs), "rhs": num(rhs)})).unwrap_or(Value::Null),
        })).collect::<Vec<_>>(),
    })
}

fn derivcheck(ctx: &Ctx) -> CmdResult<Outcome> {
    if let Some((ename, a)) = ctx.element()? {
        let (sname, psi) = ctx.density_state()?;
        let ts = ctx.param_reals("t_samples")?.unwrap_or_else(|| vec![0.1, 0.5, 1.0]);
        let r = expderiv_check(a, &psi, &ts, &ctx.tol)?;
        let mut out = Outcome::default()
            .verdict("pass", json!(r.pass()))
            .verdict("max_rel_err", num(r.max_rel_err))
            .result("element", json!(ename))
            .result("state", json!(sname))
            .result("check", deriv_json(&r))
            .exit_if(!r.pass());
        if !r.pass() {
            out.violations.push("derivative formulas or the quadratic bound fail".into());
        }
        return Ok(out);
    }
    let n = match ctx.param_usize("dim")? {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(field_err("dim", "must be positive")),
        None => 3,
    };
    let trials = ctx.trials(100)?;
    let max_norm = ctx.param_f64("max_norm")?.unwrap_or(2.0);
    let (mut max_err, mut failures) = (0.0f64, Vec::new());
    let mut worst_bound = 0.0f64;
    for i in 0..trials {
        let mut rng = ctx.rng(i as u64);
        let g = gaussian_matrix(n, &mut rng);
        let a = &g * c(rng.gen_range(0.0..1.0) * max_norm / op_norm(&g), 0.0);
        let psi = DensityState::random(n, &mut rng);
        let ts = [rng.gen_range(0.0..1.0), 0.1, 0.5, 1.0];
        let r = expderiv_check(&a, &psi, &ts, &ctx.tol)?;
        max_err = max_err.max(r.max_rel_err);
        for s in &r.samples {
            if let Some((lhs, rhs)) = s.bound {
                if rhs > 0.0 {
                    worst_bound = worst_bound.max(lhs / rhs);
                }
            }
        }
        if !r.pass() {
            failures.push(json!({"trial": i, "max_rel_err": num(r.max_rel_err), "bound_ok": r.bound_ok}));
        }
    }
    let pass = failures.is_empty();
    let mut out = Outcome::default()
        .verdict("pass", json!(pass))
        .verdict("max_rel_err", num(max_err))
        .result("dim", json!(n))
        .result("trials", json!(trials))
        .result("max_norm", num(max_norm))
        .result("worst_bound_ratio", num(worst_bound))
        .result("failures", Value::Array(failures.clone()))
        .exit_if(!pass);
    if !pass {
        out.violations.push(format!("{} trials fail the derivative formulas or the quadratic bound", failures.len()));
    }
    Ok(out)
}

fn numrange(ctx: &Ctx) -> CmdResult<Outcome> {
    let b = ctx.tuple()?;
    let mut out = Outcome::default().result("tuple_len", json!(b.len()));
    if let Some(u) = ctx.param_reals("u")? {
        let (v, psi) = support_function(&b, &u)?;
        let point: Vec<Value> = b.iter().map(|x| complex(psi.eval(x))).collect();
        out = out.verdict("support_value", num(v)).result("maximizer", vector(&psi)).result("point", Value::Array(point));
    }
    if b.len() == 1 && b[0].nrows() == 2 {
        let form = match m2_canonical_form(&b[0])? {
            M2Canonical::Degenerate => json!({"degenerate": true}),
            M2Canonical::Form { t, gamma, scale, shift, residual, .. } => json!({
                "degenerate": false,
                "t": num(t),
                "gamma": num(gamma),
                "scale": complex(scale),
                "shift": complex(shift),
                "residual": num(residual),
            }),
        };
        out = out.result("canonical_form", form);
    }
    let dirs = ctx.directions(64)?;
    match jnr_sphere_check(&b, dirs, &mut ctx.rng(0), &ctx.tol) {
        Ok(r) => {
            out = out
                .verdict("sphere", json!(r.verdict()))
                .result("contraction_margin", num(r.contraction_margin))
                .result("exposed", json!(r.exposed))
                .result("degenerate_directions", json!(r.degenerate))
                .result("on_sphere", json!(r.passes))
                .result(
                    "sphere_failures",
                    Value::Array(
                        r.failures
                            .iter()
                            .map(|f| {
                                json!({"direction": nums(&f.direction), "point": f.point.iter().map(|&z| complex(z)).collect::<Vec<_>>(), "modulus": num(f.modulus)})
                            })
                            .collect(),
                    ),
                )
                .exit_if(!r.pass());
        }
        Err(Error::HypothesisFailed(msg)) => {
            out = out.verdict("sphere", json!("not applicable")).result("sphere_skipped", json!(msg));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn ellipse(ctx: &Ctx) -> CmdResult<Outcome> {
    let one = |t: f64, gamma: f64, beta: f64| -> CmdResult<(EllipseMaximizer, f64)> {
        let m = m2_exposed_maximizer(t, gamma, beta)?;
        let (v, _) = support_function(&[canonical_matrix(t, gamma)], &[beta.cos(), -beta.sin()])?;
        Ok((m, v))
    };
    const AGREE: f64 = 1e-9;
    match (ctx.param_f64("t")?, ctx.param_f64("gamma")?, ctx.param_f64("beta")?) {
        (Some(t), Some(gamma), Some(beta)) => {
            let (m, v) = one(t, gamma, beta)?;
            let err = (m.value - v).abs();
            let mut out = Outcome::default()
                .verdict("agrees", json!(err <= AGREE))
                .verdict("value", num(m.value))
                .result("alpha_star", num(m.alpha_star))
                .result("s_star", num(m.s_star))
                .result("C", num(m.c))
                .result("eigen_oracle", num(v))
                .result("abs_error", num(err))
                .result("agreement_tol", num(AGREE))
                .exit_if(err > AGREE);
            if err > AGREE {
                out.violations.push(format!("closed-form maximum off by {err:.3e}"));
            }
            Ok(out)
        }
        (None, None, None) => {
            let trials = ctx.trials(1000)?;
            let mut max_err = 0.0f64;
            for i in 0..trials {
                let mut rng = ctx.rng(i as u64);
                let tau = 2.0 * std::f64::consts::PI;
                let (t, g, b) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..tau), rng.gen_range(0.0..tau));
                let (m, v) = one(t, g, b)?;
                max_err = max_err.max((m.value - v).abs());
            }
            let mut out = Outcome::default()
                .verdict("agrees", json!(max_err <= AGREE))
                .verdict("max_abs_error", num(max_err))
                .result("trials", json!(trials))
                .result("agreement_tol", num(AGREE))
                .exit_if(max_err > AGREE);
            if max_err > AGREE {
                out.violations.push(format!("closed-form maximum off by up to {max_err:.3e}"));
            }
            Ok(out)
        }
        _ => Err(field_err("t", "give all of t, gamma, beta or none of them")),
    }
}

fn specfree(ctx: &Ctx) -> CmdResult<Outcome> {
    let pencil = ctx.matrix_list("pencil")?.ok_or_else(|| field_err("pencil", "required"))?;
    let point = ctx.matrix_list("point")?.ok_or_else(|| field_err("point", "required"))?;
    let d = FreeSpectrahedron::new(pencil)?;
    let r = free_spectrahedron_member(&d, &point, &ctx.tol)?;
    Ok(Outcome::default()
        .verdict("member", json!(r.member))
        .verdict("margin", num(r.margin))
        .result("pencil_size", json!(d.block_size()))
        .result("pencil_len", json!(d.len()))
        .result("level", json!(point[0].nrows()))
        .result("dagger_symmetric", json!(if d.real_coefficients() { "yes (real coefficients, sufficient only)" } else { "not established" }))
        .exit_if(!r.member))
}

fn warv(ctx: &Ctx) -> CmdResult<Outcome> {
    let b = ctx.tuple()?;
    let dirs = ctx.directions(64)?;
    let r = warv_verify(&b, dirs, &mut ctx.rng(0), &ctx.tol)?;
    let pass = r.pass(&ctx.tol);
    let mut out = Outcome::default()
        .verdict("pass", json!(pass))
        .verdict("evidence", json!(r.sphere.verdict()))
        .result("exposed_points", json!(r.points.len()))
        .result("d_dim", json!(r.d_dim))
        .result("max_residual", num(r.max_residual))
        .result("max_width", num(r.max_width))
        .result(
            "points",
            Value::Array(
                r.points
                    .iter()
                    .map(|p| {
                        json!({
                            "state": vector(&p.state),
                            "values": p.values.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
                            "unique": p.unique,
                            "width": num(p.width),
                            "left_residual": num(p.left_residual),
                            "two_sided_residual": num(p.two_sided_residual),
                        })
                    })
                    .collect(),
            ),
        )
        .exit_if(!pass);
    if !pass {
        out.violations.push(format!(
            "exposed sphere point without unique multiplicative extension (residual {:.3e})",
            r.max_residual
        ));
    }
    Ok(out)
}

fn chain(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a) = ctx.subspace()?;
    let (sname, w) = ctx.pure_state()?;
    let k = ctx.k_states()?;
    let alpha = ctx.alpha()?;
    let r = chain_check(a, &w, &k, alpha, &mut ctx.rng(0), &ctx.tol)?;
    let pin = match &r.pinnacle {
        Ok(c) => json!({"constructed": true, "certificate": pinnacle_json(c)}),
        Err(msg) => json!({"constructed": false, "error": msg}),
    };
    let mut out = Outcome::default()
        .verdict("consistent", json!(r.violations.is_empty()))
        .verdict("excision", json!(r.excision))
        .verdict("peak_support", json!(r.peak_support))
        .verdict("unique_extension", json!(r.unique))
        .verdict("pinnacle", json!(r.pinnacle.is_ok()))
        .verdict("unique_without_excision", json!(r.iii_without_i))
        .result("subspace", json!(name))
        .result("state", json!(sname))
        .result("distance", num(r.distance))
        .result("excision_residual", num(r.excision_residual))
        .result("width", num(r.width))
        .result("pinnacle", pin)
        .exit_if(!r.violations.is_empty());
    out.violations = r.violations.clone();
    Ok(out)
}

fn m23(ctx: &Ctx) -> CmdResult<Outcome> {
    let (name, a) = ctx.subspace()?;
    let trials = ctx.trials(100)?;
    let r = m23_density_probe(a, trials, &mut ctx.rng(0), &ctx.tol)?;
    let hyp = match &r.hypotheses {
        Hypotheses::Verified => json!("verified"),
        Hypotheses::NotChecked(why) => json!(format!("not checked: {why}")),
    };
    let mut out = Outcome::default()
        .verdict("min_ratio", num(r.min_ratio))
        .verdict("hypotheses", hyp)
        .result("subspace", json!(name))
        .result("trials", json!(r.trials))
        .result("exhausted", json!(r.exhausted))
        .result("max_eta", num(r.max_eta))
        .result("theorem_violation_count", json!(r.theorem_violations))
        .exit_if(r.theorem_violations > 0);
    if r.theorem_violations > 0 {
        out.violations.push(format!("{} elements of E whose state is not a peak state", r.theorem_violations));
    }
    Ok(out)
}
