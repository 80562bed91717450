//! Pointwise chart model of blowing up a U-invariant linear center.
//!
//! Points of the blow-up are either off the center, or pairs (y, [n]) with
//! y on the center and n a normal class in T_y / T_yC. Tangent vectors live
//! in the product of standard affine charts, one per factor, anchored at the
//! first coordinate of minimal G_m weight in the support of y.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{in_x0min, limit_p, support_profile};
use crate::linalg::{nullspace, rank_of, rref, QMat};
use crate::loci::{zmin_locus, LinearLocus, Locus};
use crate::point::ProjPoint;
use crate::rational::Rat;
use crate::recursion::{analyse, Analysis};
use crate::rep::RepSpace;
use crate::sample::Sampler;
use crate::scenario::Scenario;
use crate::unipotent::{GradedUnipotent, StabReport};

/// Product-of-charts bookkeeping at one base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    /// Per factor, the coordinate set to 1.
    pub anchors: Vec<usize>,
}

impl Chart {
    pub fn at(y: &ProjPoint, rep: &RepSpace) -> Result<Chart> {
        let fy = factored(y)?;
        let anchors = fy
            .iter()
            .enumerate()
            .map(|(f, v)| {
                let lo = (0..v.len())
                    .filter(|&i| !v[i].is_zero())
                    .map(|i| rep.factor_gm_contribution(f, i))
                    .min()
                    .expect("nonzero factor");
                (0..v.len())
                    .find(|&i| !v[i].is_zero() && rep.factor_gm_contribution(f, i) == lo)
                    .expect("attained")
            })
            .collect();
        Ok(Chart { anchors })
    }

    fn offsets(&self, rep: &RepSpace) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.anchors.len());
        let mut acc = 0;
        for s in rep.factors() {
            off.push(acc);
            acc += s.ncoords() - 1;
        }
        off
    }

    pub fn dim(&self, rep: &RepSpace) -> usize {
        rep.factors().iter().map(|s| s.ncoords() - 1).sum()
    }

    /// Position of coordinate i of factor f, `None` for the anchor.
    fn slot(&self, rep: &RepSpace, f: usize, i: usize) -> Option<usize> {
        let k = self.anchors[f];
        match i.cmp(&k) {
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Less => Some(self.offsets(rep)[f] + i),
            std::cmp::Ordering::Greater => Some(self.offsets(rep)[f] + i - 1),
        }
    }

    /// (factor, coordinate) of every chart slot.
    fn slots(&self, rep: &RepSpace) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (f, s) in rep.factors().iter().enumerate() {
            for i in 0..s.ncoords() {
                if i != self.anchors[f] {
                    out.push((f, i));
                }
            }
        }
        out
    }

    /// Relative G_m weight of each slot: coordinate weight minus anchor weight.
    pub fn slot_weights(&self, rep: &RepSpace) -> Vec<i64> {
        self.slots(rep)
            .into_iter()
            .map(|(f, i)| rep.factor_gm_contribution(f, i) - rep.factor_gm_contribution(f, self.anchors[f]))
            .collect()
    }

    /// Affine coordinates of x; `None` if some anchor coordinate vanishes.
    pub fn coords(&self, x: &ProjPoint, rep: &RepSpace) -> Option<Vec<Rat>> {
        let fx = x.factors()?;
        let mut out = Vec::with_capacity(self.dim(rep));
        for (f, v) in fx.iter().enumerate() {
            let a = &v[self.anchors[f]];
            if a.is_zero() {
                return None;
            }
            for (i, c) in v.iter().enumerate() {
                if i != self.anchors[f] {
                    out.push(c / a);
                }
            }
        }
        Some(out)
    }

    /// Tangent vector at y of the curve y + t·dir, in chart coordinates.
    pub fn tangent(&self, y: &ProjPoint, dir: &[Vec<Rat>], rep: &RepSpace) -> Result<Vec<Rat>> {
        let fy = factored(y)?;
        if dir.len() != fy.len() || dir.iter().zip(fy).any(|(d, v)| d.len() != v.len()) {
            return Err(Error::Dimension("direction must have one vector per factor, sized like the point".into()));
        }
        let mut out = vec![Rat::zero(); self.dim(rep)];
        for (f, (v, d)) in fy.iter().zip(dir).enumerate() {
            let k = self.anchors[f];
            let yk = &v[k];
            let yk2 = yk * yk;
            for i in 0..v.len() {
                if let Some(s) = self.slot(rep, f, i) {
                    out[s] = (&(&d[i] * yk) - &(&v[i] * &d[k])) / &yk2;
                }
            }
        }
        Ok(out)
    }
}

fn factored(x: &ProjPoint) -> Result<&[Vec<Rat>]> {
    x.factors()
        .ok_or_else(|| Error::Precondition("blow-up charts need points in factor form".into()))
}

/// A smooth, U-invariant linear center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterSpec {
    pub name: String,
    pub locus: LinearLocus,
}

impl CenterSpec {
    pub fn from_catalog(sc: &Scenario, name: &str) -> Result<Self> {
        match sc.catalog.get(name)? {
            Locus::Linear(l) => Ok(CenterSpec {
                name: name.to_string(),
                locus: l.clone(),
            }),
            _ => Err(Error::Unsupported(format!(
                "center {name} is not a linear locus; only linear centers are modelled"
            ))),
        }
    }

    /// Membership in the closed linear locus, ignoring the X⁰_min restriction.
    pub fn closure_contains(&self, x: &ProjPoint, rep: &RepSpace) -> Result<bool> {
        let closed = LinearLocus {
            within_x0min: false,
            ..self.locus.clone()
        };
        closed.contains(x, rep)
    }

    /// Basis of T_yC in the chart at y: the chart jacobian.
    pub fn tangent_basis(&self, y: &ProjPoint, chart: &Chart, rep: &RepSpace) -> Result<Vec<Vec<Rat>>> {
        if !self.closure_contains(y, rep)? {
            return Err(Error::Precondition(format!("point is not on the center {}", self.name)));
        }
        let n = chart.dim(rep);
        let mut eqs: Vec<Vec<Rat>> = Vec::new();
        for c in &self.locus.conditions {
            for r in &c.rows {
                let mut e = vec![Rat::zero(); n];
                for (i, ri) in r.iter().enumerate() {
                    if let Some(s) = chart.slot(rep, c.factor, i) {
                        e[s] = ri.clone();
                    }
                }
                eqs.push(e);
            }
        }
        for g in &self.locus.coincide {
            for w in g.windows(2) {
                if chart.anchors[w[0]] != chart.anchors[w[1]] {
                    return Err(Error::Internal("identified factors anchored differently".into()));
                }
                for i in 0..rep.factors()[w[0]].ncoords() {
                    if let (Some(a), Some(b)) = (chart.slot(rep, w[0], i), chart.slot(rep, w[1], i)) {
                        let mut e = vec![Rat::zero(); n];
                        e[a] = Rat::one();
                        e[b] = -Rat::one();
                        eqs.push(e);
                    }
                }
            }
        }
        if eqs.is_empty() {
            return Ok((0..n).map(|i| unit(n, i)).collect());
        }
        Ok(nullspace(&QMat::from_rows(&eqs)?))
    }
}

fn unit(n: usize, i: usize) -> Vec<Rat> {
    (0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect()
}

/// Canonical representative of the class of `v` in (T / W) up to scalars:
/// reduce against the echelon form of W, then make the leading entry 1.
/// `None` if v ∈ W.
fn normal_form(v: &[Rat], w: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    let mut v = v.to_vec();
    if !w.is_empty() {
        let (e, pivots) = rref(&QMat::from_rows(w).expect("uniform"));
        for (r, &p) in pivots.iter().enumerate() {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, y) in v.iter_mut().zip(e.row(r)) {
                    *x -= &(&c * y);
                }
            }
        }
    }
    let lead = v.iter().find(|x| !x.is_zero())?.clone();
    Some(v.iter().map(|x| x / &lead).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlowupChartPoint {
    OffCenter {
        point: ProjPoint,
    },
    Exceptional {
        base: ProjPoint,
        chart: Chart,
        /// Reduced modulo T_yC and scaled to leading entry 1.
        normal: Vec<Rat>,
    },
}

impl BlowupChartPoint {
    pub fn blow_down(&self) -> &ProjPoint {
        match self {
            BlowupChartPoint::OffCenter { point } => point,
            BlowupChartPoint::Exceptional { base, .. } => base,
        }
    }

    pub fn same(&self, other: &BlowupChartPoint, rep: &RepSpace) -> bool {
        match (self, other) {
            (BlowupChartPoint::OffCenter { point: a }, BlowupChartPoint::OffCenter { point: b }) => a.proj_eq(b, rep),
            (
                BlowupChartPoint::Exceptional { base: a, normal: n, chart: c },
                BlowupChartPoint::Exceptional { base: b, normal: m, chart: d },
            ) => a.proj_eq(b, rep) && c == d && n == m,
            _ => false,
        }
    }
}

pub fn lift_point(x: &ProjPoint, c: &CenterSpec, rep: &RepSpace) -> Result<BlowupChartPoint> {
    if c.closure_contains(x, rep)? {
        return Err(Error::DirectionRequired);
    }
    Ok(BlowupChartPoint::OffCenter { point: x.clone() })
}

/// The point (y, [dir]) of the exceptional divisor; `dir` holds one
/// homogeneous-coordinate vector per factor.
pub fn exceptional_point(y: &ProjPoint, dir: &[Vec<Rat>], c: &CenterSpec, rep: &RepSpace) -> Result<BlowupChartPoint> {
    let chart = Chart::at(y, rep)?;
    let t = chart.tangent(y, dir, rep)?;
    exceptional_from_chart(y, &t, chart, c, rep)
}

/// Same as `exceptional_point` with the direction already in chart coordinates.
pub fn exceptional_from_chart(y: &ProjPoint, t: &[Rat], chart: Chart, c: &CenterSpec, rep: &RepSpace) -> Result<BlowupChartPoint> {
    let tc = c.tangent_basis(y, &chart, rep)?;
    let normal = normal_form(t, &tc).ok_or(Error::TangentDirection)?;
    Ok(BlowupChartPoint::Exceptional {
        base: y.clone(),
        chart,
        normal,
    })
}

/// Jacobian at a of the vector field of the Lie element s in the chart.
fn field_jacobian(u: &GradedUnipotent, s: &[Rat], a: &[Rat], chart: &Chart, rep: &RepSpace) -> QMat {
    let n = chart.dim(rep);
    let mut d = QMat::zeros(n, n);
    let slots = chart.slots(rep);
    for f in 0..rep.factors().len() {
        let m = u.lie_element(f, s);
        if m.is_zero() {
            continue;
        }
        let k = chart.anchors[f];
        let nc = rep.factors()[f].ncoords();
        let v: Vec<Rat> = (0..nc)
            .map(|i| match chart.slot(rep, f, i) {
                None => Rat::one(),
                Some(p) => a[p].clone(),
            })
            .collect();
        let avk = crate::rational::dot(m.row(k), &v);
        for i in (0..nc).filter(|&i| i != k) {
            let pi = chart.slot(rep, f, i).expect("non-anchor");
            for j in (0..nc).filter(|&j| j != k) {
                let pj = chart.slot(rep, f, j).expect("non-anchor");
                let mut e = &m[(i, j)] - &(&m[(k, j)] * &v[i]);
                if i == j {
                    e -= &avk;
                }
                d[(pi, pj)] = e;
            }
        }
        debug_assert!(slots.iter().filter(|(g, _)| *g == f).count() == nc - 1);
    }
    d
}

/// Vector field of the Lie element s at the chart point a.
fn field_at(u: &GradedUnipotent, s: &[Rat], a: &[Rat], chart: &Chart, rep: &RepSpace) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); chart.dim(rep)];
    for f in 0..rep.factors().len() {
        let m = u.lie_element(f, s);
        let k = chart.anchors[f];
        let nc = rep.factors()[f].ncoords();
        let v: Vec<Rat> = (0..nc)
            .map(|i| match chart.slot(rep, f, i) {
                None => Rat::one(),
                Some(p) => a[p].clone(),
            })
            .collect();
        let av = m.mul_vec(&v);
        for i in (0..nc).filter(|&i| i != k) {
            out[chart.slot(rep, f, i).expect("non-anchor")] = &av[i] - &(&av[k] * &v[i]);
        }
    }
    out
}

/// U-invariance of the center at y: every generator field is tangent to C
/// there, and stabiliser differentials preserve T_yC.
pub fn audit_center_at(y: &ProjPoint, u: &GradedUnipotent, c: &CenterSpec, rep: &RepSpace) -> Result<()> {
    let chart = Chart::at(y, rep)?;
    let a = chart.coords(y, rep).expect("anchors are nonzero");
    let tc = c.tangent_basis(y, &chart, rep)?;
    let r = rank_of(&tc);
    for g in 0..u.dim() {
        let mut s = vec![Rat::zero(); u.dim()];
        s[g] = Rat::one();
        let mut with = tc.clone();
        with.push(field_at(u, &s, &a, &chart, rep));
        if rank_of(&with) > r {
            return Err(Error::Audit(format!("center {} is not invariant under generator {g}", c.name)));
        }
    }
    for k in u.stab_dim(y, rep).kernel_basis {
        let d = field_jacobian(u, &k, &a, &chart, rep);
        let mut with = tc.clone();
        with.extend(tc.iter().map(|t| d.mul_vec(t)));
        if rank_of(&with) > r {
            return Err(Error::Audit(format!("stabiliser of a center point does not preserve the tangent space of {}", c.name)));
        }
    }
    Ok(())
}

/// Stabiliser dimension upstairs. For (y, [n]): Lie elements s of stab_U(y)
/// with dX_s(n) ∈ ⟨n⟩ + T_yC.
pub fn induced_stab_dim(bp: &BlowupChartPoint, u: &GradedUnipotent, c: &CenterSpec, rep: &RepSpace) -> Result<StabReport> {
    let (y, chart, n) = match bp {
        BlowupChartPoint::OffCenter { point } => return Ok(u.stab_dim(point, rep)),
        BlowupChartPoint::Exceptional { base, chart, normal } => (base, chart, normal),
    };
    audit_center_at(y, u, c, rep)?;
    let a = chart.coords(y, rep).expect("anchors are nonzero");
    let base = u.stab_dim(y, rep).kernel_basis;
    if base.is_empty() {
        return Ok(StabReport {
            dim: 0,
            kernel_basis: Vec::new(),
        });
    }
    let mut w = c.tangent_basis(y, chart, rep)?;
    w.push(n.clone());
    let images: Vec<Vec<Rat>> = base.iter().map(|k| field_jacobian(u, k, &a, chart, rep).mul_vec(n)).collect();
    // columns: images then W; kernel restricted to the image coefficients
    let dim = chart.dim(rep);
    let cols: Vec<Vec<Rat>> = images.iter().chain(w.iter()).cloned().collect();
    let m = QMat::from_cols(&cols, dim)?;
    let coeffs: Vec<Vec<Rat>> = nullspace(&m).into_iter().map(|v| v[..base.len()].to_vec()).collect();
    let lie: Vec<Vec<Rat>> = coeffs
        .iter()
        .map(|c| {
            let mut s = vec![Rat::zero(); u.dim()];
            for (ci, k) in c.iter().zip(&base) {
                for (x, y) in s.iter_mut().zip(k) {
                    *x += &(ci * y);
                }
            }
            s
        })
        .filter(|s| s.iter().any(|x| !x.is_zero()))
        .collect();
    let kernel_basis = if lie.is_empty() {
        Vec::new()
    } else {
        let (e, piv) = rref(&QMat::from_rows(&lie)?);
        (0..piv.len()).map(|r| e.row(r).to_vec()).collect()
    };
    Ok(StabReport {
        dim: kernel_basis.len(),
        kernel_basis,
    })
}

/// Weight of a G_m-fixed point of the blow-up for the linearisation
/// L − εE with ε arbitrarily small; compared lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EpsWeight {
    pub main: i64,
    pub exceptional: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupLimit {
    pub limit: BlowupChartPoint,
    pub weight: EpsWeight,
    /// The starting point is outside X⁰_min, so the limit leaves the region
    /// where the charts model the completion.
    pub escapes_chart: bool,
}

/// Least relative weight e whose component of v is outside W.
fn lowest_outside(v: &[Rat], weights: &[i64], w: &[Vec<Rat>]) -> Option<(i64, Vec<Rat>)> {
    let mut es: Vec<i64> = weights.to_vec();
    es.sort_unstable();
    es.dedup();
    es.into_iter().find_map(|e| {
        let part: Vec<Rat> = v
            .iter()
            .zip(weights)
            .map(|(x, &we)| if we == e { x.clone() } else { Rat::zero() })
            .collect();
        normal_form(&part, w).map(|n| (e, n))
    })
}

/// Limit as t → 0 under G_m with the lexicographic ε-weights.
pub fn blowup_limit(bp: &BlowupChartPoint, c: &CenterSpec, rep: &RepSpace) -> Result<BlowupLimit> {
    let x = bp.blow_down();
    let y = limit_p(x, rep);
    let main = support_profile(&y, rep).min_weight;
    let escapes_chart = !in_x0min(x, rep);
    if !c.closure_contains(&y, rep)? {
        return Ok(BlowupLimit {
            limit: BlowupChartPoint::OffCenter { point: y },
            weight: EpsWeight { main, exceptional: 0 },
            escapes_chart,
        });
    }
    let chart = Chart::at(&y, rep)?;
    let tc = c.tangent_basis(&y, &chart, rep)?;
    let weights = chart.slot_weights(rep);
    let v = match bp {
        BlowupChartPoint::OffCenter { point } => {
            let ax = chart.coords(point, rep).expect("same anchors as the limit");
            let ay = chart.coords(&y, rep).expect("anchors are nonzero");
            ax.iter().zip(&ay).map(|(p, q)| p - q).collect::<Vec<_>>()
        }
        BlowupChartPoint::Exceptional { chart: ch, normal, .. } => {
            if *ch != chart {
                return Err(Error::Internal("exceptional point anchored away from its limit".into()));
            }
            normal.clone()
        }
    };
    let (e, n) = lowest_outside(&v, &weights, &tc).ok_or_else(|| Error::Internal("limit direction lies in the center".into()))?;
    Ok(BlowupLimit {
        limit: BlowupChartPoint::Exceptional { base: y, chart, normal: n },
        weight: EpsWeight { main, exceptional: e },
        escapes_chart,
    })
}

/// Least weight of the normal space at y.
fn min_normal_weight(y: &ProjPoint, chart: &Chart, c: &CenterSpec, rep: &RepSpace) -> Result<Option<i64>> {
    let tc = c.tangent_basis(y, chart, rep)?;
    let weights = chart.slot_weights(rep);
    let n = chart.dim(rep);
    let mut best: Option<i64> = None;
    for (i, &e) in weights.iter().enumerate() {
        if normal_form(&unit(n, i), &tc).is_some() {
            best = Some(best.map_or(e, |b| b.min(e)));
        }
    }
    Ok(best)
}

/// Membership in Z_(1): G_m-fixed with minimal lexicographic weight.
pub fn in_z1(bp: &BlowupChartPoint, c: &CenterSpec, rep: &RepSpace) -> Result<bool> {
    let lim = blowup_limit(bp, c, rep)?;
    if !lim.limit.same(bp, rep) || lim.weight.main != rep.weight_ladder().min() {
        return Ok(false);
    }
    match bp {
        BlowupChartPoint::OffCenter { .. } => Ok(true),
        BlowupChartPoint::Exceptional { base, chart, .. } => {
            Ok(min_normal_weight(base, chart, c, rep)? == Some(lim.weight.exceptional))
        }
    }
}

/// Membership in the upstairs X⁰_min: the limit lies in Z_(1).
pub fn in_x0min_hat(bp: &BlowupChartPoint, c: &CenterSpec, rep: &RepSpace) -> Result<bool> {
    let lim = blowup_limit(bp, c, rep)?;
    in_z1(&lim.limit, c, rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpstairsSample {
    pub point: BlowupChartPoint,
    pub stab_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepAudit {
    pub name: String,
    pub checked: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<UpstairsSample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub center: String,
    pub d_max_before: usize,
    pub d_max_after: usize,
    pub audits: Vec<StepAudit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterateReport {
    pub steps: Vec<StepReport>,
    /// Every sampled point of the final Z_min has trivial stabiliser.
    pub cstar_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopped: Option<String>,
}

const STREAM_BLOWUP: u64 = 11;

fn audit(name: &str, samples: &[UpstairsSample], ok: impl Fn(&UpstairsSample) -> bool) -> StepAudit {
    let bad = samples.iter().find(|s| !ok(s)).cloned();
    StepAudit {
        name: name.to_string(),
        checked: samples.len(),
        passed: bad.is_none(),
        counterexample: bad,
    }
}

/// Random chart direction at y supported on slots of relative weight 0,
/// i.e. tangent to Z_min.
fn zmin_direction(chart: &Chart, rep: &RepSpace, s: &mut Sampler) -> Vec<Rat> {
    chart
        .slot_weights(rep)
        .into_iter()
        .map(|e| if e == 0 { s.rat() } else { Rat::zero() })
        .collect()
}

/// Exceptional points over Z_min ∩ C with normals tangent to Z_min: the
/// exceptional part of the proper transform of Z_min.
pub fn sample_exceptional_over_zmin(sc: &Scenario, c: &CenterSpec, n: usize, s: &mut Sampler) -> Result<Vec<BlowupChartPoint>> {
    let rep = &sc.rep;
    let mut over = zmin_locus(rep);
    over.conditions.extend(c.locus.conditions.iter().cloned());
    over.coincide = c.locus.coincide.clone();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 50 * n {
        tries += 1;
        let y = over.sample(rep, s)?;
        let chart = Chart::at(&y, rep)?;
        let t = zmin_direction(&chart, rep, s);
        match exceptional_from_chart(&y, &t, chart, c, rep) {
            Ok(p) => out.push(p),
            Err(Error::TangentDirection) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// One blow-up along the declared Δ^{≥d_max}, audited on `n` samples.
fn blowup_step(sc: &Scenario, an: &Analysis, n: usize) -> Result<StepReport> {
    let rep = &sc.rep;
    let d_max = an.dims.d_max;
    let name = match &sc.file.options.blowup_center {
        Some(n) => n.as_str(),
        None => {
            sc.catalog
                .delta(d_max as u32)
                .ok_or_else(|| Error::UnknownLocus(format!("no declared Δ^{{≥{d_max}}} to blow up")))?
                .0
        }
    };
    let c = CenterSpec::from_catalog(sc, name)?;
    let mut s = Sampler::fork(sc.seed, STREAM_BLOWUP);
    let stab = |p: BlowupChartPoint| -> Result<UpstairsSample> {
        let d = induced_stab_dim(&p, &sc.u, &c, rep)?.dim;
        Ok(UpstairsSample { point: p, stab_dim: d })
    };

    // Z_(1): off-center points of Z_min and exceptional points tangent to Z_min.
    let mut z1 = Vec::new();
    for p in sample_exceptional_over_zmin(sc, &c, n / 2, &mut s)? {
        z1.push(stab(p)?);
    }
    let mut tries = 0;
    while z1.len() < n && tries < 50 * n {
        tries += 1;
        let x = s.zmin_point(rep);
        if !c.closure_contains(&x, rep)? {
            z1.push(stab(lift_point(&x, &c, rep)?)?);
        }
    }

    // X⁰ upstairs: off-center points of X⁰_min and exceptional points over
    // C ∩ X⁰_min, kept when their limit lands in Z_(1).
    let mut x0 = Vec::new();
    let Locus::Linear(lin) = sc.catalog.get(name)? else { unreachable!() };
    tries = 0;
    while x0.len() < n && tries < 50 * n {
        tries += 1;
        let p = if tries % 2 == 0 {
            let x = if tries % 4 == 0 { s.sparse_point(rep) } else { s.generic_point(rep) };
            if !in_x0min(&x, rep) || c.closure_contains(&x, rep)? {
                continue;
            }
            lift_point(&x, &c, rep)?
        } else {
            let y = lin.sample(rep, &mut s)?;
            let chart = Chart::at(&y, rep)?;
            let mut t = s.vector(chart.dim(rep));
            if tries % 3 == 0 {
                // drop the weight-0 part so the limit moves up the ladder
                for (x, e) in t.iter_mut().zip(chart.slot_weights(rep)) {
                    if e == 0 {
                        *x = Rat::zero();
                    }
                }
            }
            match exceptional_from_chart(&y, &t, chart, &c, rep) {
                Ok(p) => p,
                Err(Error::TangentDirection) => continue,
                Err(e) => return Err(e),
            }
        };
        if in_x0min_hat(&p, &c, rep)? {
            x0.push(stab(p)?);
        }
    }

    // The center must sit inside Δ^{≥d_max} downstairs.
    let mut center = Vec::new();
    for _ in 0..n {
        let y = lin.sample(rep, &mut s)?;
        let d = sc.u.stab_dim(&y, rep).dim;
        center.push(UpstairsSample { point: BlowupChartPoint::OffCenter { point: y }, stab_dim: d });
    }

    let d_max_after = z1.iter().chain(&x0).map(|u| u.stab_dim).max().unwrap_or(0);
    let mut audits = vec![
        audit("center_in_delta", &center, |u| u.stab_dim >= d_max),
        audit("z1_membership", &z1, |u| in_z1(&u.point, &c, rep).unwrap_or(false)),
        audit("stabiliser_drop", &x0, |u| u.stab_dim < d_max),
        audit("cstar_on_z1", &z1, |u| u.stab_dim == 0),
    ];
    let bound: Vec<UpstairsSample> = x0.iter().chain(&z1).cloned().collect();
    audits.push(audit("bounded_by_blow_down", &bound, |u| {
        u.stab_dim <= sc.u.stab_dim(u.point.blow_down(), rep).dim
    }));
    if d_max_after >= d_max {
        let worst = x0.iter().chain(&z1).max_by_key(|u| u.stab_dim).expect("nonempty");
        return Err(Error::Audit(format!(
            "blowing up {name} did not lower d_max ({d_max} → {d_max_after}); counterexample {}",
            serde_json::to_string(&worst.point).expect("serialisable")
        )));
    }
    Ok(StepReport {
        step: 1,
        center: name.to_string(),
        d_max_before: d_max,
        d_max_after,
        audits,
    })
}

/// Blow up until (ℭ*) holds on the audit set. Only one level is modelled:
/// a second step would need a center declared on the blown-up space.
pub fn iterate(sc: &Scenario, n: usize) -> Result<IterateReport> {
    let an = analyse(sc)?;
    if an.dims.d_min > 0 {
        return Err(Error::Unsupported(format!(
            "generic stabilisers have dimension {} > 0; the blow-up procedure needs d_min = 0",
            an.dims.d_min
        )));
    }
    if an.dims.d_max == 0 {
        return Ok(IterateReport {
            steps: Vec::new(),
            cstar_holds: true,
            stopped: None,
        });
    }
    let step = blowup_step(sc, &an, n)?;
    let cstar = step.d_max_after == 0 && step.audits.iter().all(|a| a.passed);
    let stopped = (step.d_max_after > 0).then(|| {
        format!(
            "d_max is {} after one blow-up; further steps need a center declared on the blown-up space",
            step.d_max_after
        )
    });
    Ok(IterateReport {
        steps: vec![step],
        cstar_holds: cstar,
        stopped,
    })
}
