//! Command dispatch and deterministic reports.

use serde::Serialize;
use serde_json::{json, Value};

use crate::blowup::iterate;
use crate::builtin;
use crate::error::{Error, Result};
use crate::hull::hull_vertices;
use crate::limits::{in_x0min, in_zmin, limit_p, support_profile};
use crate::loci::{Locus, ZMIN};
use crate::point::ProjPoint;
use crate::rational::Rat;
use crate::recursion::{analyse, audit_delta, hat_classify, Membership};
use crate::rep::Character;
use crate::sample::Sampler;
use crate::scenario::{load, Overrides, Scenario};
use crate::stability::{adapted_window, gm_direction, kirwan_beta, minplus_classify, torus_classify, AdaptedWindow};
use crate::text;
use crate::unipotent::SweepAnswer;

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Weights,
    Window,
    Classify,
    HatClassify,
    Recursion,
    Strata,
    Blowup,
    Example(String),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::Window => "window",
            Command::Classify => "classify",
            Command::HatClassify => "hat-classify",
            Command::Recursion => "recursion",
            Command::Strata => "strata",
            Command::Blowup => "blowup",
            Command::Example(_) => "example",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Steps {
    #[default]
    Auto,
    Limit(usize),
}

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub point: Option<String>,
    pub chi: Option<String>,
    pub steps: Steps,
    pub check: bool,
    pub overrides: Overrides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Every verdict the command exists to produce is Indeterminate.
    Indeterminate,
    /// An example check failed.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Indeterminate => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioInfo {
    pub name: Option<String>,
    pub hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub scenario: ScenarioInfo,
    pub seed: u64,
    pub samples: usize,
    pub scale: i64,
    pub status: Status,
    pub warnings: Vec<String>,
    pub result: Value,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl Report {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("serialisable")
    }

    pub fn emit(&self, f: Format) -> String {
        let v = self.to_value();
        match f {
            Format::Json => serde_json::to_string_pretty(&v).expect("serialisable") + "\n",
            Format::Text => text::to_text(&v),
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Validation(_)
        | Error::Dimension(_)
        | Error::Precondition(_)
        | Error::UnknownPoint(_)
        | Error::UnknownLocus(_)
        | Error::TrivialUnipotent
        | Error::DirectionRequired
        | Error::TangentDirection => 2,
        _ => 1,
    }
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serialisable")
}

fn parse_chi(sc: &Scenario, s: &str) -> Result<Character> {
    let c = Character::parse_csv(s)?;
    if c.0.len() != sc.rep.rank() {
        return Err(Error::Validation(format!("--chi needs {} entries", sc.rep.rank())));
    }
    Ok(c)
}

fn need_point<'a>(sc: &'a Scenario, flags: &Flags) -> Result<(&'a str, &'a ProjPoint)> {
    let name = flags
        .point
        .as_deref()
        .ok_or_else(|| Error::Validation("this command needs --point NAME".into()))?;
    let (k, p) = sc
        .points
        .get_key_value(name)
        .ok_or_else(|| Error::UnknownPoint(name.to_string()))?;
    Ok((k.as_str(), p))
}

/// χ0 + (ε/2)·e_{G_m}: a rational character inside the well-adapted window.
pub fn probe_character(sc: &Scenario, w: &AdaptedWindow) -> Character {
    let half = w.epsilon() * Rat::new(1, 2);
    let e = gm_direction(&sc.rep);
    Character(sc.chi0.0.iter().zip(&e).map(|(c, d)| c + &(&half * d)).collect())
}

fn window_value(sc: &Scenario) -> Value {
    match adapted_window(&sc.rep, Some(&sc.chi0)) {
        Ok(w) => json!({
            "low": w.low,
            "high": w.high,
            "well_adapted_high": w.well_adapted_high,
            "epsilon": w.epsilon(),
            "chi0": w.chi0,
            "probe": probe_character(sc, &w),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn weights_cmd(sc: &Scenario) -> Result<Value> {
    let rep = &sc.rep;
    let mut distinct: Vec<Vec<Rat>> = Vec::new();
    for w in rep.weights() {
        let r: Vec<Rat> = w.iter().map(|&a| Rat::from_int(a)).collect();
        if !distinct.contains(&r) {
            distinct.push(r);
        }
    }
    let vertices: Vec<&Vec<Rat>> = hull_vertices(&distinct)?.into_iter().map(|i| &distinct[i]).collect();
    Ok(json!({
        "rank": rep.rank(),
        "gm_component": rep.gm_component(),
        "dim": rep.dim(),
        "ladder": rep.weight_ladder().values,
        "window": window_value(sc),
        "distinct_weights": distinct.len(),
        "hull_vertices": vertices,
    }))
}

fn window_cmd(sc: &Scenario) -> Result<Value> {
    let w = adapted_window(&sc.rep, Some(&sc.chi0))?;
    Ok(json!({
        "scale": sc.scale,
        "ladder": sc.rep.weight_ladder().values,
        "low": w.low,
        "high": w.high,
        "well_adapted_high": w.well_adapted_high,
        "epsilon": w.epsilon(),
        "chi0": w.chi0,
        "probe": probe_character(sc, &w),
    }))
}

fn zmin_sweep(sc: &Scenario, x: &ProjPoint) -> Result<SweepAnswer> {
    let Locus::Linear(z) = sc.catalog.get(ZMIN)? else {
        return Err(Error::Internal("Zmin entry is not linear".into()));
    };
    sc.u.in_sweep(x, z, &sc.rep, sc.seed)
}

fn classify_cmd(sc: &Scenario, flags: &Flags) -> Result<(Value, Status)> {
    let (name, x) = need_point(sc, flags)?;
    let rep = &sc.rep;
    let torus = match &flags.chi {
        Some(s) => json!({ "mode": "at_chi", "chi": parse_chi(sc, s)?, "hm": torus_classify(x, rep, &parse_chi(sc, s)?)? }),
        None => json!({ "mode": "min_plus", "chi0": sc.chi0, "hm": minplus_classify(x, rep, &sc.chi0)? }),
    };
    let stab = sc.u.stab_dim(x, rep);
    let sweep = zmin_sweep(sc, x)?;
    let status = if sweep.is_indeterminate() { Status::Indeterminate } else { Status::Ok };
    Ok((
        json!({
            "point": name,
            "coordinates": x,
            "support": support_profile(x, rep),
            "in_x0min": in_x0min(x, rep),
            "in_zmin": in_zmin(x, rep),
            "limit": limit_p(x, rep),
            "stab_dim": stab.dim,
            "stab_kernel": stab.kernel_basis,
            "in_u_zmin": sweep,
            "torus": torus,
        }),
        status,
    ))
}

fn hat_cmd(sc: &Scenario, flags: &Flags) -> Result<(Value, Status)> {
    let (name, x) = need_point(sc, flags)?;
    let an = analyse(sc)?;
    let v = hat_classify(sc, &an, x)?;
    let status = if v.hat_u_hat == Membership::Indeterminate && v.hat_h_hat == Membership::Indeterminate {
        Status::Indeterminate
    } else {
        Status::Ok
    };
    Ok((
        json!({
            "point": name,
            "coordinates": x,
            "trace": an.trace,
            "verdict": v,
        }),
        status,
    ))
}

fn recursion_cmd(sc: &Scenario) -> Result<Value> {
    let an = analyse(sc)?;
    Ok(json!({
        "ladder": sc.rep.weight_ladder().values,
        "d_min": an.dims.d_min,
        "d_max": an.dims.d_max,
        "d_min_witness": an.dims.d_min_witness,
        "d_max_witness": an.dims.d_max_witness,
        "cstar": an.dims.d_max == 0,
        "audits": an.dims.audits,
        "trace": an.trace,
    }))
}

fn strata_cmd(sc: &Scenario, flags: &Flags) -> Result<Value> {
    let rep = &sc.rep;
    let chi = match &flags.chi {
        Some(s) => parse_chi(sc, s)?,
        None => match sc.character("chi") {
            Some(c) => c,
            None => probe_character(sc, &adapted_window(rep, Some(&sc.chi0))?),
        },
    };
    if let Some(name) = &flags.point {
        let x = sc.point(name)?;
        let beta = kirwan_beta(x, rep, &chi, &sc.inner)?;
        let hm = torus_classify(x, rep, &chi)?;
        return Ok(json!({ "chi": chi, "point": name, "beta": beta, "verdict": hm.verdict }));
    }
    // β over coordinate points and seeded sparse samples
    let mut s = Sampler::fork(sc.seed, 21);
    let mut found: Vec<(Vec<Rat>, Rat, usize)> = Vec::new();
    let mut pts: Vec<ProjPoint> = Vec::new();
    for b in 0..rep.dim() {
        let mut v = vec![Rat::zero(); rep.dim()];
        v[b] = Rat::one();
        pts.push(ProjPoint::from_embedded_in(rep, v)?);
    }
    for _ in 0..sc.samples {
        pts.push(s.sparse_point(rep));
    }
    for p in &pts {
        let b = kirwan_beta(p, rep, &chi, &sc.inner)?;
        match found.iter_mut().find(|(v, _, _)| *v == b.beta) {
            Some(e) => e.2 += 1,
            None => found.push((b.beta, b.norm_sq, 1)),
        }
    }
    found.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let strata: Vec<Value> = found
        .into_iter()
        .map(|(b, n, c)| json!({ "beta": b, "norm_sq": n, "hits": c }))
        .collect();
    Ok(json!({ "chi": chi, "sampled_points": pts.len(), "strata": strata }))
}

fn blowup_cmd(sc: &Scenario, flags: &Flags) -> Result<Value> {
    let r = iterate(sc, sc.samples)?;
    if let Steps::Limit(n) = flags.steps {
        if r.steps.len() > n {
            return Err(Error::Unsupported(format!("{} steps needed, limit is {n}", r.steps.len())));
        }
    }
    Ok(to_json(&r))
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

fn checks_ex61(sc: &Scenario) -> Result<Vec<Check>> {
    let rep = &sc.rep;
    let mut out = Vec::new();
    let z = sc.point("z_min")?;
    out.push(check("stab_dim_z_min", sc.u.stab_dim(z, rep).dim == 0, "stabiliser of z_min is trivial"));
    let v = weights_cmd(sc)?;
    let n = v["hull_vertices"].as_array().map_or(0, Vec::len);
    out.push(check("hexagon", n == 6, format!("{n} hull vertices among the torus weights")));
    let w = adapted_window(rep, Some(&sc.chi0))?;
    out.push(check(
        "window",
        w.low == Rat::from_int(-3) && w.high == Rat::from_int(-2),
        format!("({}, {})", w.low, w.high),
    ));
    let d = zmin_sweep(sc, sc.point("diagonal")?)?;
    let o = zmin_sweep(sc, sc.point("off_line")?)?;
    out.push(check("sweep_diagonal", d.is_yes(), "p = q on L lies in U·Z_min"));
    out.push(check("sweep_off_line", o.is_no(), "p = q off L is not in U·Z_min"));
    // X⁰_min ⇔ z1 ≠ 0 ≠ z2, a ≠ 0
    let mut s = Sampler::fork(sc.seed, 31);
    let mut agree = true;
    for _ in 0..sc.samples.max(64) {
        let x = s.sparse_point(rep);
        let f = x.factors().expect("factored");
        let expect = !f[0][2].is_zero() && !f[1][2].is_zero() && !f[2][0].is_zero();
        agree &= in_x0min(&x, rep) == expect;
    }
    out.push(check("x0min_coordinates", agree, "X⁰_min is z1 ≠ 0 ≠ z2, a ≠ 0 on samples"));
    let an = analyse(sc)?;
    out.push(check(
        "cstar",
        an.dims.d_max == 0 && an.dims.d_min == 0,
        format!("d_min = {}, d_max = {}", an.dims.d_min, an.dims.d_max),
    ));
    Ok(out)
}

fn checks_ex62(sc: &Scenario) -> Result<Vec<Check>> {
    let rep = &sc.rep;
    let mut out = Vec::new();
    let ladder = rep.weight_ladder().values;
    out.push(check("ladder", ladder == vec![-2, 1, 4, 7], format!("{ladder:?}")));
    let w = adapted_window(rep, Some(&sc.chi0))?;
    out.push(check(
        "window",
        w.low == Rat::from_int(-2) && w.high == Rat::from_int(1),
        format!("({}, {})", w.low, w.high),
    ));
    let yc = sc.u.stab_dim(sc.point("y_center")?, rep).dim;
    let zg = sc.u.stab_dim(sc.point("z_generic")?, rep).dim;
    out.push(check("stab_dims", yc == 1 && zg == 0, format!("p = q = r: {yc}, generic: {zg}")));
    let an = analyse(sc)?;
    out.push(check("d_max", an.dims.d_max == 1, format!("d_max = {}", an.dims.d_max)));
    let a = audit_delta(sc, 1, sc.samples)?;
    out.push(check(
        "delta_audit",
        a.passed,
        format!("{} inside, {} outside", a.inside_checked, a.outside_checked),
    ));
    let r = iterate(sc, sc.samples)?;
    out.push(check("one_blowup_step", r.steps.len() == 1, format!("{} steps", r.steps.len())));
    out.push(check("cstar_after_blowup", r.cstar_holds, "post-step audit"));
    Ok(out)
}

fn example_cmd(which: &str, flags: &Flags) -> Result<(Scenario, Value, Status)> {
    let text = builtin::builtin(which)
        .ok_or_else(|| Error::Validation(format!("unknown example {which}; choose from {}", builtin::NAMES.join(", "))))?;
    let sc = load(text, &flags.overrides)?;
    if !flags.check {
        let v: Value = serde_json::from_str(text).expect("builtin scenarios are valid JSON");
        return Ok((sc, json!({ "example": which, "scenario": v }), Status::Ok));
    }
    let checks = match builtin::canonical(which) {
        Some("ex61") => checks_ex61(&sc)?,
        Some("ex62") => checks_ex62(&sc)?,
        _ => return Err(Error::Unsupported(format!("example {which} has no checks"))),
    };
    let status = if checks.iter().all(|c| c.passed) { Status::Ok } else { Status::Failed };
    Ok((sc, json!({ "example": which, "checks": checks }), status))
}

fn report(cmd: &Command, sc: &Scenario, result: Value, status: Status) -> Report {
    Report {
        command: cmd.name().to_string(),
        scenario: ScenarioInfo {
            name: sc.file.name.clone(),
            hash: sc.hash.clone(),
        },
        seed: sc.seed,
        samples: sc.samples,
        scale: sc.scale,
        status,
        warnings: sc.warnings.clone(),
        result,
    }
}

/// Runs a command on scenario text (ignored for `example`).
pub fn run(cmd: &Command, scenario_text: Option<&str>, flags: &Flags) -> Result<Report> {
    if let Command::Example(which) = cmd {
        let (sc, v, st) = example_cmd(which, flags)?;
        return Ok(report(cmd, &sc, v, st));
    }
    let text = scenario_text.ok_or_else(|| Error::Validation("--scenario FILE is required".into()))?;
    let sc = load(text, &flags.overrides)?;
    let (v, st) = match cmd {
        Command::Weights => (weights_cmd(&sc)?, Status::Ok),
        Command::Window => (window_cmd(&sc)?, Status::Ok),
        Command::Classify => classify_cmd(&sc, flags)?,
        Command::HatClassify => hat_cmd(&sc, flags)?,
        Command::Recursion => (recursion_cmd(&sc)?, Status::Ok),
        Command::Strata => (strata_cmd(&sc, flags)?, Status::Ok),
        Command::Blowup => (blowup_cmd(&sc, flags)?, Status::Ok),
        Command::Example(_) => unreachable!(),
    };
    Ok(report(cmd, &sc, v, st))
}
