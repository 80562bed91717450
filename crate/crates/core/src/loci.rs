//! Declared loci: linear conditions per factor, affine parametrizations and
//! U-sweeps of other entries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::in_x0min;
use crate::linalg::{nullspace, QMat};
use crate::point::ProjPoint;
use crate::poly::{solve_staged, Poly, SystemAnswer};
use crate::rational::Rat;
use crate::rep::RepSpace;
use crate::sample::Sampler;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorConditions {
    pub factor: usize,
    /// Each row is a linear form that must vanish on the factor's coordinates.
    pub rows: Vec<Vec<Rat>>,
}

/// Product of linear subspaces, with groups of factors forced to coincide.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearLocus {
    #[serde(default)]
    pub conditions: Vec<FactorConditions>,
    #[serde(default)]
    pub coincide: Vec<Vec<usize>>,
    /// Intersect with X⁰_min (an open condition).
    #[serde(default)]
    pub within_x0min: bool,
}

/// One affine chart: coordinate i of factor f is `c0 + Σ c_k s_k`, stored
/// as `[c0, c1, ..., cn]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamChart {
    pub params: usize,
    pub factors: Vec<Vec<Vec<Rat>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamLocus {
    pub charts: Vec<ParamChart>,
    #[serde(default)]
    pub within_x0min: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Locus {
    Linear(LinearLocus),
    Param(ParamLocus),
    /// U · base, where base names another catalog entry.
    Sweep { base: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusCatalog {
    #[serde(default)]
    pub entries: BTreeMap<String, Locus>,
    /// δ ↦ name of the entry claimed to equal Δ^{≥δ}.
    #[serde(default)]
    pub declared_delta: BTreeMap<u32, String>,
}

pub const ZMIN: &str = "Zmin";

impl LocusCatalog {
    pub fn get(&self, name: &str) -> Result<&Locus> {
        self.entries.get(name).ok_or_else(|| Error::UnknownLocus(name.to_string()))
    }

    pub fn delta(&self, delta: u32) -> Option<(&str, &Locus)> {
        let name = self.declared_delta.get(&delta)?;
        self.entries.get(name).map(|l| (name.as_str(), l))
    }

    /// Adds the linear description of Z_min unless one is declared.
    pub fn with_zmin(mut self, rep: &RepSpace) -> Self {
        self.entries
            .entry(ZMIN.to_string())
            .or_insert_with(|| Locus::Linear(zmin_locus(rep)));
        self
    }

    pub fn validate(&self, rep: &RepSpace) -> Result<()> {
        for (name, l) in &self.entries {
            match l {
                Locus::Linear(lin) => lin.validate(rep).map_err(|e| prefix(name, e))?,
                Locus::Param(p) => p.validate(rep).map_err(|e| prefix(name, e))?,
                Locus::Sweep { base } => {
                    match self.entries.get(base) {
                        Some(Locus::Linear(_)) => {}
                        Some(_) => {
                            return Err(Error::Validation(format!(
                                "locus {name}: sweep base {base} must be a linear locus"
                            )))
                        }
                        None => return Err(Error::UnknownLocus(format!("{base} (sweep base of {name})"))),
                    }
                }
            }
        }
        for (d, name) in &self.declared_delta {
            if !self.entries.contains_key(name) {
                return Err(Error::UnknownLocus(format!("{name} (declared for δ = {d})")));
            }
        }
        Ok(())
    }
}

fn prefix(name: &str, e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::Validation(format!("locus {name}: {m}")),
        other => other,
    }
}

/// Z_min as the product of per-factor minimal-weight coordinate spans.
pub fn zmin_locus(rep: &RepSpace) -> LinearLocus {
    let conditions = rep
        .factors()
        .iter()
        .enumerate()
        .filter_map(|(f, spec)| {
            let n = spec.ncoords();
            let lo = (0..n).map(|i| rep.factor_gm_contribution(f, i)).min()?;
            let rows: Vec<Vec<Rat>> = (0..n)
                .filter(|&i| rep.factor_gm_contribution(f, i) != lo)
                .map(|i| unit(n, i))
                .collect();
            (!rows.is_empty()).then_some(FactorConditions { factor: f, rows })
        })
        .collect();
    LinearLocus {
        conditions,
        coincide: Vec::new(),
        within_x0min: false,
    }
}

fn unit(n: usize, i: usize) -> Vec<Rat> {
    (0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect()
}

impl LinearLocus {
    pub fn validate(&self, rep: &RepSpace) -> Result<()> {
        let nf = rep.factors().len();
        for c in &self.conditions {
            if c.factor >= nf {
                return Err(Error::Validation(format!("condition on missing factor {}", c.factor)));
            }
            let n = rep.factors()[c.factor].ncoords();
            if c.rows.iter().any(|r| r.len() != n) {
                return Err(Error::Validation(format!("condition row length differs from {n} on factor {}", c.factor)));
            }
            // G_m-invariance: each form involves a single weight.
            for r in &c.rows {
                let ws: Vec<i64> = (0..n).filter(|&i| !r[i].is_zero()).map(|i| rep.factor_gm_weight(c.factor, i)).collect();
                if ws.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Validation(format!(
                        "condition on factor {} mixes G_m weights, so the locus is not G_m-invariant",
                        c.factor
                    )));
                }
            }
        }
        for g in &self.coincide {
            let Some(&f0) = g.first() else { continue };
            if g.iter().any(|&f| f >= nf) {
                return Err(Error::Validation("coincidence group names a missing factor".into()));
            }
            for &f in g {
                let (a, b) = (&rep.factors()[f0], &rep.factors()[f]);
                if a.ncoords() != b.ncoords() || (0..a.ncoords()).any(|i| a.coord_weight(i) != b.coord_weight(i)) {
                    return Err(Error::Validation(format!(
                        "factors {f0} and {f} are identified but carry different weights"
                    )));
                }
            }
        }
        Ok(())
    }

    fn rows_for(&self, f: usize) -> Vec<&Vec<Rat>> {
        self.conditions.iter().filter(|c| c.factor == f).flat_map(|c| c.rows.iter()).collect()
    }

    /// Each factor's coincidence representative.
    fn representative(&self, f: usize) -> usize {
        self.coincide
            .iter()
            .find(|g| g.contains(&f))
            .and_then(|g| g.iter().min().copied())
            .unwrap_or(f)
    }

    /// Conditions of all factors sharing `f`'s representative.
    fn group_rows(&self, rep: &RepSpace, f: usize) -> Vec<Vec<Rat>> {
        let r = self.representative(f);
        (0..rep.factors().len())
            .filter(|&g| self.representative(g) == r)
            .flat_map(|g| self.rows_for(g).into_iter().cloned())
            .collect()
    }

    /// Basis of the allowed vectors for factor `f` (shared by its group).
    pub fn factor_span(&self, rep: &RepSpace, f: usize) -> Vec<Vec<Rat>> {
        let n = rep.factors()[f].ncoords();
        let rows = self.group_rows(rep, f);
        if rows.is_empty() {
            return (0..n).map(|i| unit(n, i)).collect();
        }
        nullspace(&QMat::from_rows(&rows).expect("uniform rows"))
    }

    pub fn contains(&self, x: &ProjPoint, rep: &RepSpace) -> Result<bool> {
        let fx = x
            .factors()
            .ok_or_else(|| Error::Precondition("linear locus membership needs a point in factor form".into()))?;
        for c in &self.conditions {
            for r in &c.rows {
                if !crate::rational::dot(r, &fx[c.factor]).is_zero() {
                    return Ok(false);
                }
            }
        }
        for g in &self.coincide {
            if g.windows(2).any(|w| !crate::point::proportional(&fx[w[0]], &fx[w[1]])) {
                return Ok(false);
            }
        }
        Ok(!self.within_x0min || in_x0min(x, rep))
    }

    pub fn sample(&self, rep: &RepSpace, s: &mut Sampler) -> Result<ProjPoint> {
        for _ in 0..200 {
            let mut chosen: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
            let mut factors = Vec::with_capacity(rep.factors().len());
            for f in 0..rep.factors().len() {
                let r = self.representative(f);
                if let Some(v) = chosen.get(&r) {
                    factors.push(v.clone());
                    continue;
                }
                let span = self.factor_span(rep, f);
                let v = s
                    .combination(&span)
                    .ok_or_else(|| Error::Validation(format!("linear locus is empty on factor {f}")))?;
                chosen.insert(r, v.clone());
                factors.push(v);
            }
            let p = ProjPoint::from_factors(factors)?;
            if !self.within_x0min || in_x0min(&p, rep) {
                return Ok(p);
            }
        }
        Err(Error::Validation("linear locus has no sampled point in X⁰_min".into()))
    }

    /// Covering by echelon charts of each group's projective span.
    pub fn to_param(&self, rep: &RepSpace) -> ParamLocus {
        let nf = rep.factors().len();
        let reps: Vec<usize> = {
            let mut v: Vec<usize> = (0..nf).map(|f| self.representative(f)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let spans: Vec<Vec<Vec<Rat>>> = reps.iter().map(|&r| self.factor_span(rep, r)).collect();
        // chart choice per group: index of the leading coefficient
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for sp in &spans {
            choices = choices
                .into_iter()
                .flat_map(|c| {
                    (0..sp.len()).map(move |j| {
                        let mut c = c.clone();
                        c.push(j);
                        c
                    })
                })
                .collect();
        }
        let charts = choices
            .into_iter()
            .map(|choice| {
                // params: for group g with lead j, coefficients of basis k > j are free
                let mut offsets = Vec::with_capacity(spans.len());
                let mut total = 0;
                for (g, sp) in spans.iter().enumerate() {
                    offsets.push(total);
                    total += sp.len() - 1 - choice[g];
                }
                let factors = (0..nf)
                    .map(|f| {
                        let g = reps.binary_search(&self.representative(f)).expect("present");
                        let sp = &spans[g];
                        let lead = choice[g];
                        let n = rep.factors()[f].ncoords();
                        (0..n)
                            .map(|i| {
                                let mut form = vec![Rat::zero(); total + 1];
                                form[0] = sp[lead][i].clone();
                                for (k, b) in sp.iter().enumerate().skip(lead + 1) {
                                    form[1 + offsets[g] + (k - lead - 1)] = b[i].clone();
                                }
                                form
                            })
                            .collect()
                    })
                    .collect();
                ParamChart { params: total, factors }
            })
            .collect();
        ParamLocus {
            charts,
            within_x0min: self.within_x0min,
        }
    }
}

impl ParamChart {
    fn coord_poly(&self, f: usize, i: usize) -> Poly {
        let form = &self.factors[f][i];
        Poly::affine(&form[0], &form[1..])
    }

    pub fn eval(&self, s: &[Rat]) -> Option<ProjPoint> {
        let f: Vec<Vec<Rat>> = self
            .factors
            .iter()
            .map(|fac| {
                fac.iter()
                    .map(|form| &form[0] + &crate::rational::dot(&form[1..], s))
                    .collect()
            })
            .collect();
        ProjPoint::from_factors(f).ok()
    }
}

impl ParamLocus {
    pub fn validate(&self, rep: &RepSpace) -> Result<()> {
        if self.charts.is_empty() {
            return Err(Error::Validation("parametrized locus has no charts".into()));
        }
        for (ci, c) in self.charts.iter().enumerate() {
            if c.factors.len() != rep.factors().len() {
                return Err(Error::Validation(format!("chart {ci}: expected {} factors", rep.factors().len())));
            }
            for (f, fac) in c.factors.iter().enumerate() {
                if fac.len() != rep.factors()[f].ncoords() {
                    return Err(Error::Validation(format!("chart {ci}: factor {f} has the wrong coordinate count")));
                }
                if fac.iter().any(|form| form.len() != c.params + 1) {
                    return Err(Error::Validation(format!(
                        "chart {ci}: affine forms must have {} entries",
                        c.params + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact membership: per chart, proportionality is affine in the
    /// parameters once a nonzero coordinate of x is fixed.
    pub fn contains(&self, x: &ProjPoint, rep: &RepSpace) -> Result<bool> {
        let fx = x
            .factors()
            .ok_or_else(|| Error::Precondition("parametrized locus membership needs factor form".into()))?;
        if self.within_x0min && !in_x0min(x, rep) {
            return Ok(false);
        }
        for c in &self.charts {
            let mut eqs = Vec::new();
            let mut open = Vec::new();
            for (f, v) in fx.iter().enumerate() {
                let k = v.iter().position(|a| !a.is_zero()).expect("nonzero factor");
                let pk = c.coord_poly(f, k);
                open.push(pk.clone());
                for (j, vj) in v.iter().enumerate() {
                    if j != k {
                        eqs.push(c.coord_poly(f, j).scale(&v[k]).sub(&pk.scale(vj)));
                    }
                }
            }
            let w = vec![1; c.params];
            if let SystemAnswer::Yes { .. } = solve_staged(c.params, &w, &eqs, &open, 0) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn sample(&self, rep: &RepSpace, s: &mut Sampler) -> Result<ProjPoint> {
        for _ in 0..200 {
            let c = &self.charts[s.index(self.charts.len())];
            let params = s.vector(c.params);
            if let Some(p) = c.eval(&params) {
                if !self.within_x0min || in_x0min(&p, rep) {
                    return Ok(p);
                }
            }
        }
        Err(Error::Validation("parametrized locus produced no usable sample".into()))
    }

    /// Decides y ∈ p^((r))(locus) for y = truncate(x, r) of some x ∈ X⁰_min.
    pub fn truncated_image_contains(&self, y: &ProjPoint, rep: &RepSpace, r: i64, seed: u64) -> Result<SystemAnswer> {
        let emb = y.embedded(rep);
        let w0 = rep.weight_ladder().min();
        if (0..rep.dim()).any(|b| !emb[b].is_zero() && rep.gm_weight(b) > r) {
            return Err(Error::Precondition(format!("target has support above weight {r}")));
        }
        let Some(k) = (0..rep.dim()).find(|&b| !emb[b].is_zero() && rep.gm_weight(b) == w0) else {
            return Err(Error::Precondition("target has no ω_0 component".into()));
        };
        let mut pending: Option<SystemAnswer> = None;
        let mut last_no: Option<SystemAnswer> = None;
        for c in &self.charts {
            let n = c.params;
            let coord: Vec<Vec<Poly>> = (0..c.factors.len())
                .map(|f| (0..c.factors[f].len()).map(|i| c.coord_poly(f, i)).collect())
                .collect();
            let t = |b: usize| -> Poly {
                let mut p = Poly::constant(n, Rat::one());
                for (f, &i) in rep.basis()[b].iter().enumerate() {
                    p = p.mul(&coord[f][i]);
                    if p.is_zero() {
                        break;
                    }
                }
                p
            };
            let tk = t(k);
            if tk.is_zero() {
                last_no = Some(SystemAnswer::No {
                    level: 0,
                    system: vec!["chart never reaches the target's leading coordinate".into()],
                });
                continue;
            }
            let eqs: Vec<Poly> = (0..rep.dim())
                .filter(|&b| b != k && rep.gm_weight(b) <= r)
                .map(|b| t(b).scale(&emb[k]).sub(&tk.scale(&emb[b])))
                .collect();
            let w = vec![1; n];
            match solve_staged(n, &w, &eqs, &[tk], seed) {
                ans @ SystemAnswer::Yes { .. } => return Ok(ans),
                ans @ SystemAnswer::No { .. } => last_no = Some(ans),
                ans @ SystemAnswer::Indeterminate { .. } => pending = Some(ans),
            }
        }
        Ok(pending.or(last_no).unwrap_or(SystemAnswer::No {
            level: 0,
            system: vec!["no charts".into()],
        }))
    }
}
