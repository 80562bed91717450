//! Stabiliser surveys, Δ audits, the (r_j, δ_j) recursion and
//! hat-stability verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{hull_position, HullPosition};
use crate::limits::{in_x0min, limit_p, support_profile, truncate};
use crate::loci::{Locus, ParamLocus};
use crate::point::ProjPoint;
use crate::poly::SystemAnswer;
use crate::rational::Rat;
use crate::sample::Sampler;
use crate::scenario::Scenario;
use crate::unipotent::SweepAnswer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    No,
    Indeterminate,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::Yes
        } else {
            Membership::No
        }
    }

    pub fn and(self, other: Membership) -> Membership {
        use Membership::*;
        match (self, other) {
            (No, _) | (_, No) => No,
            (Yes, Yes) => Yes,
            _ => Indeterminate,
        }
    }

    pub fn not(self) -> Membership {
        match self {
            Membership::Yes => Membership::No,
            Membership::No => Membership::Yes,
            Membership::Indeterminate => Membership::Indeterminate,
        }
    }
}

impl From<&SweepAnswer> for Membership {
    fn from(a: &SweepAnswer) -> Self {
        match a {
            SweepAnswer::Yes { .. } => Membership::Yes,
            SweepAnswer::No { .. } => Membership::No,
            SweepAnswer::Indeterminate { .. } => Membership::Indeterminate,
        }
    }
}

impl From<&SystemAnswer> for Membership {
    fn from(a: &SystemAnswer) -> Self {
        match a {
            SystemAnswer::Yes { .. } => Membership::Yes,
            SystemAnswer::No { .. } => Membership::No,
            SystemAnswer::Indeterminate { .. } => Membership::Indeterminate,
        }
    }
}

/// Stream ids keep independent random audits from sharing draws.
mod stream {
    pub const SURVEY: u64 = 1;
    pub const AUDIT_IN: u64 = 2;
    pub const AUDIT_OUT: u64 = 3;
}

/// A sample with its stabiliser dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabSample {
    pub point: ProjPoint,
    pub stab_dim: usize,
}

/// Generic samples of Z_((r)) for every ladder value r, plus samples of the
/// declared Δ loci.
#[derive(Clone, Debug)]
pub struct Survey {
    pub by_level: BTreeMap<i64, Vec<StabSample>>,
    pub declared: Vec<StabSample>,
}

/// Per-factor coordinate caps whose total weight stays ≤ r; only maximal
/// cap tuples are returned.
fn cap_tuples(sc: &Scenario, r: i64) -> Vec<Vec<i64>> {
    let rep = &sc.rep;
    let levels: Vec<Vec<i64>> = (0..rep.factors().len())
        .map(|f| {
            let mut v: Vec<i64> = (0..rep.factors()[f].ncoords()).map(|i| rep.factor_gm_contribution(f, i)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for lv in &levels {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..lv.len()).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    let total = |t: &[usize]| -> i64 { t.iter().enumerate().map(|(f, &k)| levels[f][k]).sum() };
    tuples
        .iter()
        .filter(|t| total(t) <= r)
        .filter(|t| {
            (0..t.len()).all(|f| {
                t[f] + 1 >= levels[f].len() || {
                    let mut u = (*t).clone();
                    u[f] += 1;
                    total(&u) > r
                }
            })
        })
        .map(|t| t.iter().enumerate().map(|(f, &k)| levels[f][k]).collect())
        .collect()
}

/// Generic point of Z_((r)) with the given per-factor caps.
fn capped_point(sc: &Scenario, caps: &[i64], s: &mut Sampler) -> ProjPoint {
    let rep = &sc.rep;
    let f = (0..rep.factors().len())
        .map(|fi| {
            (0..rep.factors()[fi].ncoords())
                .map(|i| {
                    if rep.factor_gm_contribution(fi, i) <= caps[fi] {
                        s.nonzero_rat()
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect();
    ProjPoint::from_factors(f).expect("minimal coordinates are nonzero")
}

pub fn sample_locus(sc: &Scenario, l: &Locus, s: &mut Sampler) -> Result<ProjPoint> {
    match l {
        Locus::Linear(lin) => lin.sample(&sc.rep, s),
        Locus::Param(p) => p.sample(&sc.rep, s),
        Locus::Sweep { base } => {
            let Locus::Linear(lin) = sc.catalog.get(base)? else {
                return Err(Error::Validation(format!("sweep base {base} is not linear")));
            };
            let b = lin.sample(&sc.rep, s)?;
            let params: Vec<Rat> = (0..sc.u.dim()).map(|_| s.rat()).collect();
            sc.u.exp_action(&params, &b, &sc.rep)
        }
    }
}

pub fn locus_contains(sc: &Scenario, l: &Locus, x: &ProjPoint) -> Result<Membership> {
    match l {
        Locus::Linear(lin) => Ok(Membership::from_bool(lin.contains(x, &sc.rep)?)),
        Locus::Param(p) => Ok(Membership::from_bool(p.contains(x, &sc.rep)?)),
        Locus::Sweep { base } => {
            let Locus::Linear(lin) = sc.catalog.get(base)? else {
                return Err(Error::Validation(format!("sweep base {base} is not linear")));
            };
            Ok((&sc.u.in_sweep(x, lin, &sc.rep, sc.seed)?).into())
        }
    }
}

impl Survey {
    pub fn new(sc: &Scenario) -> Result<Self> {
        let mut s = Sampler::fork(sc.seed, stream::SURVEY);
        let mut by_level = BTreeMap::new();
        for &r in &sc.rep.weight_ladder().values {
            let tuples = cap_tuples(sc, r);
            let per = (sc.samples / tuples.len().max(1)).max(4);
            let mut v = Vec::new();
            for caps in &tuples {
                for _ in 0..per {
                    let p = capped_point(sc, caps, &mut s);
                    let d = sc.u.stab_dim(&p, &sc.rep).dim;
                    v.push(StabSample { point: p, stab_dim: d });
                }
            }
            by_level.insert(r, v);
        }
        let mut declared = Vec::new();
        for name in sc.catalog.declared_delta.values() {
            let l = sc.catalog.get(name)?;
            for _ in 0..sc.samples.min(16) {
                let p = sample_locus(sc, l, &mut s)?;
                let d = sc.u.stab_dim(&p, &sc.rep).dim;
                declared.push(StabSample { point: p, stab_dim: d });
            }
        }
        Ok(Survey { by_level, declared })
    }

    /// All samples lying in Z_((r)).
    fn in_zr<'a>(&'a self, sc: &'a Scenario, r: i64) -> impl Iterator<Item = &'a StabSample> + 'a {
        let w0 = sc.rep.weight_ladder().min();
        self.by_level
            .iter()
            .filter(move |(&lvl, _)| lvl <= r)
            .flat_map(|(_, v)| v.iter())
            .chain(self.declared.iter().filter(move |s| {
                let p = support_profile(&s.point, &sc.rep);
                p.min_weight == w0 && p.max_weight <= r
            }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaAudit {
    pub delta: u32,
    pub locus: String,
    pub inside_checked: usize,
    pub outside_checked: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<StabSample>,
}

/// Samples inside the declared Δ^{≥δ} must have stabiliser dimension ≥ δ;
/// sampled points of X⁰_min outside it must have dimension < δ.
pub fn audit_delta(sc: &Scenario, delta: u32, n: usize) -> Result<DeltaAudit> {
    let (name, l) = sc
        .catalog
        .delta(delta)
        .ok_or_else(|| Error::UnknownLocus(format!("no declaration for δ = {delta}")))?;
    let mut s_in = Sampler::fork(sc.seed ^ delta as u64, stream::AUDIT_IN);
    let mut s_out = Sampler::fork(sc.seed ^ delta as u64, stream::AUDIT_OUT);
    let mut audit = DeltaAudit {
        delta,
        locus: name.to_string(),
        inside_checked: 0,
        outside_checked: 0,
        passed: true,
        counterexample: None,
    };
    for _ in 0..n {
        let p = sample_locus(sc, l, &mut s_in)?;
        let d = sc.u.stab_dim(&p, &sc.rep).dim;
        audit.inside_checked += 1;
        if (d as u32) < delta {
            audit.passed = false;
            audit.counterexample = Some(StabSample { point: p, stab_dim: d });
            return Ok(audit);
        }
    }
    let mut tries = 0;
    while audit.outside_checked < n && tries < 20 * n {
        tries += 1;
        let p = match tries % 4 {
            0 => s_out.generic_point(&sc.rep),
            1 => s_out.zmin_point(&sc.rep),
            2 => s_out.sparse_point(&sc.rep),
            _ => {
                // a locus point with one factor replaced
                let q = sample_locus(sc, l, &mut s_out)?;
                let mut f = q.factors().expect("factored").to_vec();
                let k = s_out.index(f.len());
                f[k] = s_out.generic_vector(f[k].len());
                ProjPoint::from_factors(f)?
            }
        };
        if !in_x0min(&p, &sc.rep) || locus_contains(sc, l, &p)? != Membership::No {
            continue;
        }
        let d = sc.u.stab_dim(&p, &sc.rep).dim;
        audit.outside_checked += 1;
        if d as u32 >= delta {
            audit.passed = false;
            audit.counterexample = Some(StabSample { point: p, stab_dim: d });
            return Ok(audit);
        }
    }
    Ok(audit)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeDims {
    pub d_min: usize,
    pub d_max: usize,
    pub d_min_witness: ProjPoint,
    pub d_max_witness: ProjPoint,
    pub audits: Vec<DeltaAudit>,
}

pub fn extreme_stab_dims(sc: &Scenario, survey: &Survey) -> Result<ExtremeDims> {
    let mut audits = Vec::new();
    for &d in sc.catalog.declared_delta.keys() {
        let a = audit_delta(sc, d, sc.samples)?;
        if !a.passed {
            return Err(Error::Audit(format!(
                "declared locus {} for Δ^{{≥{d}}} fails the stabiliser audit",
                a.locus
            )));
        }
        audits.push(a);
    }
    let wmax = sc.rep.weight_ladder().max();
    let generic: Vec<&StabSample> = survey.in_zr(sc, wmax).collect();
    let lo = generic.iter().min_by_key(|s| s.stab_dim).ok_or_else(|| Error::Internal("empty survey".into()))?;
    let hi = generic.iter().max_by_key(|s| s.stab_dim).expect("nonempty");
    Ok(ExtremeDims {
        d_min: lo.stab_dim,
        d_max: hi.stab_dim,
        d_min_witness: lo.point.clone(),
        d_max_witness: hi.point.clone(),
        audits,
    })
}

/// Least ladder value r with a sample of Z_((r)) of stabiliser dimension ≤ δ.
pub fn r_of_delta(sc: &Scenario, survey: &Survey, delta: usize) -> Option<(i64, ProjPoint)> {
    sc.rep.weight_ladder().values.iter().find_map(|&r| {
        survey
            .in_zr(sc, r)
            .find(|s| s.stab_dim <= delta)
            .map(|s| (r, s.point.clone()))
    })
}

/// Least stabiliser dimension among samples of Z_((r)).
pub fn delta_of_r(sc: &Scenario, survey: &Survey, r: i64) -> Option<usize> {
    survey.in_zr(sc, r).map(|s| s.stab_dim).min()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub r: i64,
    pub delta: usize,
    /// A point of Z_((r)) realising the step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ProjPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub steps: Vec<TraceStep>,
    pub j: usize,
    pub d_min: usize,
    pub d_max: usize,
}

pub fn recursion_trace(sc: &Scenario, survey: &Survey, dims: &ExtremeDims) -> Result<RecursionTrace> {
    let w0 = sc.rep.weight_ladder().min();
    let mut steps = vec![TraceStep {
        r: w0,
        delta: dims.d_max,
        witness: Some(dims.d_max_witness.clone()),
    }];
    while steps.last().expect("nonempty").delta > dims.d_min {
        let prev = steps.last().expect("nonempty").clone();
        let (r, w) = r_of_delta(sc, survey, prev.delta - 1)
            .ok_or_else(|| Error::Internal(format!("no sample with stabiliser dimension ≤ {}", prev.delta - 1)))?;
        let delta = delta_of_r(sc, survey, r).expect("r has a witness");
        if delta >= prev.delta || r < prev.r {
            return Err(Error::Internal(format!(
                "recursion is not monotone: ({}, {}) followed by ({r}, {delta})",
                prev.r, prev.delta
            )));
        }
        steps.push(TraceStep {
            r,
            delta,
            witness: Some(w),
        });
    }
    Ok(RecursionTrace {
        j: steps.len() - 1,
        d_min: dims.d_min,
        d_max: dims.d_max,
        steps,
    })
}

/// Everything `hat_classify` needs that depends only on the scenario.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub survey: Survey,
    pub dims: ExtremeDims,
    pub trace: RecursionTrace,
}

pub fn analyse(sc: &Scenario) -> Result<Analysis> {
    let survey = Survey::new(sc)?;
    let dims = extreme_stab_dims(sc, &survey)?;
    let trace = recursion_trace(sc, &survey, &dims)?;
    Ok(Analysis { survey, dims, trace })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JetMethod {
    /// Δ^{>δ} is empty because δ = d_max.
    Empty,
    /// r = ω_0: p(Δ^{>δ}) = Z_min ∩ Δ^{>δ}, decided by the stabiliser of p(x).
    LimitStabiliser,
    /// Truncated image of a catalog parametrization, solved exactly.
    Catalog,
    /// No usable declaration.
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetCheck {
    pub j: usize,
    pub r: i64,
    pub delta: usize,
    pub method: JetMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locus: Option<String>,
    /// Whether the truncated jet lies in the truncated image of Δ^{>δ}.
    pub in_image: Membership,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SystemAnswer>,
    /// Stabiliser dimension of the truncated jet; reported for reference
    /// only, since no theorem ties it to image membership.
    pub heuristic_truncation_stab_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatVerdict {
    pub in_x0min: bool,
    /// x has a nonzero component of weight exactly r_j for every j.
    pub jets_present: bool,
    pub jets: Vec<JetCheck>,
    pub mumford_u: Membership,
    /// p(x) is stable on Z_min for the complementary torus.
    pub limit_r_stable: bool,
    pub mumford_h: Membership,
    /// X^{ŝ,U} and X^{ŝ,H}: equal to the Mumford loci when d_min = 0, else empty.
    pub hat_u: Membership,
    pub hat_h: Membership,
    /// x ∈ U · Z_min, decided as x ∈ U · p(x).
    pub in_u_zmin: SweepAnswer,
    pub hat_u_hat: Membership,
    pub hat_h_hat: Membership,
}

/// R-stability of p(x) ∈ Z_min for the complementary torus T0.
pub fn limit_r_stable(sc: &Scenario, x: &ProjPoint) -> Result<bool> {
    let rep = &sc.rep;
    if rep.rank() == 1 {
        return Ok(true);
    }
    let p = limit_p(x, rep);
    let g = rep.gm_component();
    let mut pts: Vec<Vec<Rat>> = Vec::new();
    for b in p.support(rep) {
        let w: Vec<Rat> = (0..rep.rank())
            .filter(|&k| k != g)
            .map(|k| Rat::from_int(rep.weight(b)[k]) - &sc.chi0.0[k])
            .collect();
        if !pts.contains(&w) {
            pts.push(w);
        }
    }
    Ok(hull_position(&pts)?.0 == HullPosition::Interior)
}

pub fn hat_classify(sc: &Scenario, an: &Analysis, x: &ProjPoint) -> Result<HatVerdict> {
    let rep = &sc.rep;
    let trace = &an.trace;
    if trace.d_min > 0 && !sc.file.options.mumford_stable {
        return Err(Error::Unsupported(format!(
            "generic stabilisers have dimension {} > 0; set options.mumford_stable to classify Mumford-hat stability",
            trace.d_min
        )));
    }
    let in0 = in_x0min(x, rep);
    if !in0 {
        return Ok(HatVerdict {
            in_x0min: false,
            jets_present: false,
            jets: Vec::new(),
            mumford_u: Membership::No,
            limit_r_stable: false,
            mumford_h: Membership::No,
            hat_u: Membership::No,
            hat_h: Membership::No,
            in_u_zmin: SweepAnswer::No {
                level: 0,
                system: vec!["point lies outside X⁰_min".into()],
            },
            hat_u_hat: Membership::No,
            hat_h_hat: Membership::No,
        });
    }
    let emb = x.embedded(rep);
    let jets_present = trace
        .steps
        .iter()
        .all(|st| (0..rep.dim()).any(|b| !emb[b].is_zero() && rep.gm_weight(b) == st.r));
    let w0 = rep.weight_ladder().min();
    let mut jets = Vec::new();
    for (j, st) in trace.steps.iter().enumerate() {
        let y = truncate(x, rep, st.r).expect("x ∈ X⁰_min has weight ω_0");
        let heuristic = sc.u.stab_dim(&y, rep).dim;
        let mut check = JetCheck {
            j,
            r: st.r,
            delta: st.delta,
            method: JetMethod::Unavailable,
            locus: None,
            in_image: Membership::Indeterminate,
            solver: None,
            heuristic_truncation_stab_dim: heuristic,
        };
        if st.delta >= trace.d_max {
            check.method = JetMethod::Empty;
            check.in_image = Membership::No;
        } else if st.r == w0 {
            check.method = JetMethod::LimitStabiliser;
            check.in_image = Membership::from_bool(sc.u.stab_dim(&limit_p(x, rep), rep).dim > st.delta);
        } else if let Some((name, l)) = sc.catalog.delta(st.delta as u32 + 1) {
            let param: Option<ParamLocus> = match l {
                Locus::Linear(lin) => Some(lin.to_param(rep)),
                Locus::Param(p) => Some(p.clone()),
                Locus::Sweep { .. } => None,
            };
            check.locus = Some(name.to_string());
            if let Some(p) = param {
                let ans = p.truncated_image_contains(&y, rep, st.r, sc.seed)?;
                check.method = JetMethod::Catalog;
                check.in_image = (&ans).into();
                check.solver = Some(ans);
            }
        }
        jets.push(check);
    }
    let avoid = jets
        .iter()
        .fold(Membership::Yes, |acc, c| acc.and(c.in_image.not()));
    let mumford_u = Membership::from_bool(jets_present).and(avoid);
    let r_stable = limit_r_stable(sc, x)?;
    let mumford_h = mumford_u.and(Membership::from_bool(r_stable));
    let (hat_u, hat_h) = if trace.d_min == 0 {
        (mumford_u, mumford_h)
    } else {
        (Membership::No, Membership::No)
    };
    let p = limit_p(x, rep);
    let in_u_zmin = sc.u.in_orbit(x, &p, rep, sc.seed)?;
    let outside = Membership::from(&in_u_zmin).not();
    Ok(HatVerdict {
        in_x0min: true,
        jets_present,
        jets,
        mumford_u,
        limit_r_stable: r_stable,
        mumford_h,
        hat_u,
        hat_h,
        in_u_zmin,
        hat_u_hat: hat_u.and(outside),
        hat_h_hat: hat_h.and(outside),
    })
}
