//! Graded unipotent groups acting factor-wise: exact exponentials,
//! stabiliser dimensions, sweep and orbit membership.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::in_x0min;
use crate::linalg::{in_span, nullspace, rank, QMat};
use crate::loci::LinearLocus;
use crate::point::ProjPoint;
use crate::poly::{solve_staged, Poly, SystemAnswer};
use crate::rational::Rat;
use crate::rep::RepSpace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// One square block per factor, acting on that factor's own
    /// coordinates. An empty list stands for the zero block.
    pub matrix_blocks: Vec<Vec<Vec<Rat>>>,
    /// G_m weight ℓ of the generator.
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentSpec {
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub stages: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct GradedUnipotent {
    blocks: Vec<Vec<QMat>>,
    weights: Vec<u32>,
    stages: Vec<Vec<usize>>,
    symbolic: OnceLock<Vec<Vec<Vec<Poly>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabReport {
    pub dim: usize,
    pub kernel_basis: Vec<Vec<Rat>>,
}

/// Outcome of a sweep or orbit query. `params` are Lie-algebra coordinates
/// s with x = exp(Σ s_i ξ_i) · base_point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum SweepAnswer {
    Yes { params: Vec<Rat>, base_point: ProjPoint },
    No { level: u32, system: Vec<String> },
    Indeterminate { free_dim: usize, residual: Vec<String> },
}

impl SweepAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, SweepAnswer::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, SweepAnswer::No { .. })
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self, SweepAnswer::Indeterminate { .. })
    }
}

impl GradedUnipotent {
    pub fn from_spec(spec: &UnipotentSpec, rep: &RepSpace) -> Result<Self> {
        let nf = rep.factors().len();
        let mut blocks = Vec::with_capacity(spec.generators.len());
        for (g, gen) in spec.generators.iter().enumerate() {
            if gen.weight < 1 {
                return Err(Error::Validation(format!("generator {g}: grading weight must be ≥ 1")));
            }
            if gen.matrix_blocks.len() != nf {
                return Err(Error::Validation(format!(
                    "generator {g}: expected {nf} matrix blocks, found {}",
                    gen.matrix_blocks.len()
                )));
            }
            let mut per = Vec::with_capacity(nf);
            for (f, b) in gen.matrix_blocks.iter().enumerate() {
                let n = rep.factors()[f].ncoords();
                let m = if b.is_empty() {
                    QMat::zeros(n, n)
                } else {
                    if b.len() != n || b.iter().any(|r| r.len() != n) {
                        return Err(Error::Validation(format!(
                            "generator {g}: block for factor {f} must be {n}×{n}"
                        )));
                    }
                    QMat::from_rows(b)?
                };
                if rep.factors()[f].twist > 1 && !m.is_zero() {
                    return Err(Error::Validation(format!(
                        "generator {g}: factor {f} has twist > 1 and must carry the zero block"
                    )));
                }
                for r in 0..n {
                    for c in 0..n {
                        if m[(r, c)].is_zero() {
                            continue;
                        }
                        let lift = rep.factor_gm_weight(f, r) - rep.factor_gm_weight(f, c);
                        if lift != gen.weight as i64 {
                            let mut multi = vec![0usize; nf];
                            multi[f] = c;
                            return Err(Error::Validation(format!(
                                "generator {g} fails the grading check at basis element {} \
                                 (factor {f}, entry ({r},{c}) raises G_m weight by {lift}, expected {})",
                                rep.index_of(&multi),
                                gen.weight
                            )));
                        }
                    }
                }
                per.push(m);
            }
            blocks.push(per);
        }
        let u = GradedUnipotent {
            blocks,
            weights: spec.generators.iter().map(|g| g.weight).collect(),
            stages: if spec.stages.is_empty() {
                vec![(0..spec.generators.len()).collect()]
            } else {
                spec.stages.clone()
            },
            symbolic: OnceLock::new(),
        };
        u.validate_stages()?;
        Ok(u)
    }

    fn validate_stages(&self) -> Result<()> {
        let n = self.dim();
        let mut seen = vec![false; n];
        for st in &self.stages {
            for &g in st {
                if g >= n || seen[g] {
                    return Err(Error::Validation(format!("stages must partition the generators (index {g})")));
                }
                seen[g] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Validation("stages must cover every generator".into()));
        }
        let stage_of = |g: usize| self.stages.iter().position(|s| s.contains(&g)).expect("covered");
        let flat = |g: usize| -> Vec<Rat> { self.blocks[g].iter().flat_map(|m| m.row_vecs().concat()).collect() };
        for a in 0..n {
            for b in a + 1..n {
                let (sa, sb) = (stage_of(a), stage_of(b));
                // [u, u^(k)] ⊆ u^(k), and ⊆ u^(k+1) inside one stage
                let floor = if sa == sb { sa + 1 } else { sa.max(sb) };
                let span: Vec<Vec<Rat>> = (0..n).filter(|&g| stage_of(g) >= floor).map(flat).collect();
                let br: Vec<Rat> = self.blocks[a]
                    .iter()
                    .zip(&self.blocks[b])
                    .flat_map(|(x, y)| x.mul(y).add(&y.mul(x).scale(&-Rat::one())).row_vecs().concat())
                    .collect();
                if br.iter().all(Rat::is_zero) {
                    continue;
                }
                if span.is_empty() || !in_span(&br, &span) {
                    return Err(Error::Validation(format!(
                        "bracket of generators {a} and {b} leaves the stage filtration"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn stages(&self) -> &[Vec<usize>] {
        &self.stages
    }

    pub fn block(&self, g: usize, f: usize) -> &QMat {
        &self.blocks[g][f]
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(QMat::is_zero))
    }

    /// Σ s_g ξ_g on factor f.
    pub fn lie_element(&self, f: usize, params: &[Rat]) -> QMat {
        let n = self.blocks.first().map_or(0, |b| b[f].rows());
        let mut m = QMat::zeros(n, n);
        for (g, s) in params.iter().enumerate() {
            if !s.is_zero() {
                m = m.add(&self.blocks[g][f].scale(s));
            }
        }
        m
    }

    /// exp(Σ s_g ξ_g) on factor f; the series stops at nilpotency.
    pub fn exp_factor(&self, f: usize, params: &[Rat]) -> QMat {
        let m = self.lie_element(f, params);
        let n = m.rows();
        let mut out = QMat::identity(n);
        let mut term = QMat::identity(n);
        for k in 1..=n {
            term = term.mul(&m).scale(&Rat::new(1, k as i64));
            if term.is_zero() {
                break;
            }
            out = out.add(&term);
        }
        out
    }

    pub fn exp_action(&self, params: &[Rat], x: &ProjPoint, rep: &RepSpace) -> Result<ProjPoint> {
        if params.len() != self.dim() {
            return Err(Error::Dimension(format!("expected {} parameters", self.dim())));
        }
        let mats: Vec<QMat> = (0..rep.factors().len()).map(|f| self.exp_factor(f, params)).collect();
        if let Some(fx) = x.factors() {
            let moved = fx.iter().zip(&mats).map(|(v, m)| m.mul_vec(v)).collect();
            return ProjPoint::from_factors(moved);
        }
        let mut v = x.embedded(rep).to_vec();
        for (f, m) in mats.iter().enumerate() {
            v = apply_on_factor(rep, f, m, &v);
        }
        ProjPoint::from_embedded_in(rep, v)
    }

    /// ξ_g acting on V as a derivation of the tensor product.
    pub fn lie_apply(&self, g: usize, v: &[Rat], rep: &RepSpace) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); v.len()];
        for f in 0..rep.factors().len() {
            let m = &self.blocks[g][f];
            if m.is_zero() {
                continue;
            }
            let w = apply_on_factor(rep, f, m, v);
            for (o, x) in out.iter_mut().zip(w) {
                *o += &x;
            }
        }
        out
    }

    pub fn stab_dim(&self, x: &ProjPoint, rep: &RepSpace) -> StabReport {
        let v = x.embedded(rep);
        let cols: Vec<Vec<Rat>> = (0..self.dim()).map(|g| self.lie_apply(g, v, rep)).collect();
        let m = tangent_matrix(v, &cols);
        let kernel_basis = nullspace(&m);
        StabReport {
            dim: kernel_basis.len(),
            kernel_basis,
        }
    }

    /// Per factor, the matrix exp(Σ t_g ξ_g) with polynomial entries.
    fn symbolic_exp(&self) -> &Vec<Vec<Vec<Poly>>> {
        self.symbolic.get_or_init(|| {
            let n = self.dim();
            let nf = self.blocks.first().map_or(0, Vec::len);
            (0..nf)
                .map(|f| {
                    let size = self.blocks[0][f].rows();
                    let m: Vec<Vec<Poly>> = (0..size)
                        .map(|r| {
                            (0..size)
                                .map(|c| {
                                    let coeffs: Vec<Rat> = (0..n).map(|g| self.blocks[g][f][(r, c)].clone()).collect();
                                    Poly::affine(&Rat::zero(), &coeffs)
                                })
                                .collect()
                        })
                        .collect();
                    let ident = |r: usize, c: usize| Poly::constant(n, if r == c { Rat::one() } else { Rat::zero() });
                    let mut out: Vec<Vec<Poly>> = (0..size).map(|r| (0..size).map(|c| ident(r, c)).collect()).collect();
                    let mut term = out.clone();
                    for k in 1..=size {
                        term = poly_mat_mul(&term, &m);
                        let inv = Rat::new(1, k as i64);
                        for row in term.iter_mut() {
                            for e in row.iter_mut() {
                                *e = e.scale(&inv);
                            }
                        }
                        if term.iter().all(|r| r.iter().all(Poly::is_zero)) {
                            break;
                        }
                        for (orow, trow) in out.iter_mut().zip(&term) {
                            for (o, t) in orow.iter_mut().zip(trow) {
                                *o = o.add(t);
                            }
                        }
                    }
                    out
                })
                .collect()
        })
    }

    /// Coordinates of exp(Σ t ξ)·x per factor as polynomials in t.
    pub fn moved_factors(&self, x: &[Vec<Rat>]) -> Vec<Vec<Poly>> {
        let sym = self.symbolic_exp();
        x.iter()
            .enumerate()
            .map(|(f, v)| {
                sym[f]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(v)
                            .fold(Poly::zero(self.dim()), |acc, (p, c)| acc.add(&p.scale(c)))
                    })
                    .collect()
            })
            .collect()
    }

    /// Decides whether some u ∈ U moves x into `base`.
    pub fn in_sweep(&self, x: &ProjPoint, base: &LinearLocus, rep: &RepSpace, seed: u64) -> Result<SweepAnswer> {
        let fx = x
            .factors()
            .ok_or_else(|| Error::Precondition("sweep membership needs a point in factor form".into()))?;
        if base.within_x0min && !in_x0min(x, rep) {
            return Ok(SweepAnswer::No {
                level: 0,
                system: vec!["point lies outside X⁰_min, which U preserves".into()],
            });
        }
        let y = self.moved_factors(fx);
        let mut eqs = Vec::new();
        for c in &base.conditions {
            for r in &c.rows {
                let p = y[c.factor]
                    .iter()
                    .zip(r)
                    .fold(Poly::zero(self.dim()), |acc, (p, a)| acc.add(&p.scale(a)));
                eqs.push(p);
            }
        }
        for g in &base.coincide {
            for w in g.windows(2) {
                let (a, b) = (&y[w[0]], &y[w[1]]);
                for i in 0..a.len() {
                    for j in i + 1..a.len() {
                        eqs.push(a[i].mul(&b[j]).sub(&a[j].mul(&b[i])));
                    }
                }
            }
        }
        let ans = solve_staged(self.dim(), &self.weights, &eqs, &[], seed);
        self.finish(ans, x, rep, |b| base.contains(b, rep))
    }

    /// Decides x ∈ U · y.
    pub fn in_orbit(&self, x: &ProjPoint, y: &ProjPoint, rep: &RepSpace, seed: u64) -> Result<SweepAnswer> {
        let (fx, fy) = match (x.factors(), y.factors()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Precondition("orbit membership needs points in factor form".into())),
        };
        let moved = self.moved_factors(fy);
        let mut eqs = Vec::new();
        for (v, m) in fx.iter().zip(&moved) {
            let k = v.iter().position(|c| !c.is_zero()).expect("nonzero factor");
            for j in 0..v.len() {
                if j != k {
                    eqs.push(m[j].scale(&v[k]).sub(&m[k].scale(&v[j])));
                }
            }
        }
        let ans = solve_staged(self.dim(), &self.weights, &eqs, &[], seed);
        match ans {
            SystemAnswer::Yes { values } => {
                let image = self.exp_action(&values, y, rep)?;
                if !image.proj_eq(x, rep) {
                    return Err(Error::Internal("orbit solution does not reproduce the point".into()));
                }
                Ok(SweepAnswer::Yes {
                    params: values,
                    base_point: y.clone(),
                })
            }
            SystemAnswer::No { level, system } => Ok(SweepAnswer::No { level, system }),
            SystemAnswer::Indeterminate { free_dim, residual } => Ok(SweepAnswer::Indeterminate { free_dim, residual }),
        }
    }

    fn finish(
        &self,
        ans: SystemAnswer,
        x: &ProjPoint,
        rep: &RepSpace,
        contains: impl Fn(&ProjPoint) -> Result<bool>,
    ) -> Result<SweepAnswer> {
        match ans {
            SystemAnswer::Yes { values } => {
                let b = self.exp_action(&values, x, rep)?;
                if !contains(&b)? {
                    return Err(Error::Internal("sweep solution misses the base locus".into()));
                }
                let params: Vec<Rat> = values.iter().map(|t| -t).collect();
                if !self.exp_action(&params, &b, rep)?.proj_eq(x, rep) {
                    return Err(Error::Internal("sweep parameters do not reproduce the point".into()));
                }
                Ok(SweepAnswer::Yes { params, base_point: b })
            }
            SystemAnswer::No { level, system } => Ok(SweepAnswer::No { level, system }),
            SystemAnswer::Indeterminate { free_dim, residual } => Ok(SweepAnswer::Indeterminate { free_dim, residual }),
        }
    }
}

fn poly_mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = a.len();
    let nv = a.first().and_then(|r| r.first()).map_or(0, Poly::nvars);
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    (0..n).fold(Poly::zero(nv), |acc, k| {
                        if a[r][k].is_zero() || b[k][c].is_zero() {
                            acc
                        } else {
                            acc.add(&a[r][k].mul(&b[k][c]))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// Applies `m` to tensor slot `f` of an embedded vector.
pub fn apply_on_factor(rep: &RepSpace, f: usize, m: &QMat, v: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); v.len()];
    for (b, multi) in rep.basis().iter().enumerate() {
        if v[b].is_zero() {
            continue;
        }
        let c = multi[f];
        let mut target = multi.clone();
        for r in 0..m.rows() {
            let e = &m[(r, c)];
            if e.is_zero() {
                continue;
            }
            target[f] = r;
            out[rep.index_of(&target)] += &(e * &v[b]);
        }
    }
    out
}

/// Rows: coordinates of w − (w_k / v_k)·v with k dropped, for each
/// column w; this is the differential of the affine chart v_k ≠ 0.
pub fn tangent_matrix(v: &[Rat], cols: &[Vec<Rat>]) -> QMat {
    let k = v.iter().position(|c| !c.is_zero()).expect("nonzero point");
    let rows = v.len() - 1;
    let mut m = QMat::zeros(rows, cols.len());
    for (j, w) in cols.iter().enumerate() {
        let ratio = &w[k] / &v[k];
        let mut r = 0;
        for i in 0..v.len() {
            if i == k {
                continue;
            }
            m[(r, j)] = &w[i] - &(&ratio * &v[i]);
            r += 1;
        }
    }
    m
}

/// Dimension of U minus the rank of s ↦ Σ s ξ · v mod v.
pub fn orbit_dim(u: &GradedUnipotent, x: &ProjPoint, rep: &RepSpace) -> usize {
    let v = x.embedded(rep);
    let cols: Vec<Vec<Rat>> = (0..u.dim()).map(|g| u.lie_apply(g, v, rep)).collect();
    rank(&tangent_matrix(v, &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{build_rep, FactorSpec};

    fn r(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter().map(|row| row.iter().map(|&x| Rat::from_int(x)).collect()).collect()
    }

    /// P² with weights (0,1,2) and the generator e_1 ↦ e_2.
    fn ladder() -> (RepSpace, GradedUnipotent) {
        let rep = build_rep(&[FactorSpec::proj(vec![vec![0], vec![1], vec![2]])], 0).unwrap();
        let spec = UnipotentSpec {
            generators: vec![GeneratorSpec {
                matrix_blocks: vec![r(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]])],
                weight: 1,
            }],
            stages: vec![],
        };
        let u = GradedUnipotent::from_spec(&spec, &rep).unwrap();
        (rep, u)
    }

    #[test]
    fn grading_violation_is_named() {
        let rep = build_rep(&[FactorSpec::proj(vec![vec![0], vec![1], vec![2]])], 0).unwrap();
        let spec = UnipotentSpec {
            generators: vec![GeneratorSpec {
                matrix_blocks: vec![r(&[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]])],
                weight: 1,
            }],
            stages: vec![],
        };
        let err = GradedUnipotent::from_spec(&spec, &rep).unwrap_err();
        assert!(matches!(err, Error::Validation(m) if m.contains("generator 0") && m.contains("basis element 0")));
    }

    #[test]
    fn exp_is_finite_and_exact() {
        let (rep, u) = ladder();
        let x = ProjPoint::from_ints(&[&[1, 2, 0]]);
        let y = u.exp_action(&[Rat::from_int(3)], &x, &rep).unwrap();
        assert!(y.proj_eq(&ProjPoint::from_ints(&[&[1, 2, 6]]), &rep));
        assert!(u.exp_action(&[Rat::zero()], &x, &rep).unwrap().proj_eq(&x, &rep));
    }

    #[test]
    fn stabiliser_dimension_drops_off_the_kernel() {
        let (rep, u) = ladder();
        assert_eq!(u.stab_dim(&ProjPoint::from_ints(&[&[1, 0, 5]]), &rep).dim, 1);
        assert_eq!(u.stab_dim(&ProjPoint::from_ints(&[&[1, 1, 5]]), &rep).dim, 0);
    }

    #[test]
    fn orbit_membership() {
        let (rep, u) = ladder();
        let y = ProjPoint::from_ints(&[&[1, 2, 0]]);
        let x = ProjPoint::from_ints(&[&[1, 2, 7]]);
        match u.in_orbit(&x, &y, &rep, 0).unwrap() {
            SweepAnswer::Yes { params, .. } => assert_eq!(params, vec![Rat::new(7, 2)]),
            other => panic!("{other:?}"),
        }
        let z = ProjPoint::from_ints(&[&[1, 3, 7]]);
        assert!(u.in_orbit(&z, &y, &rep, 0).unwrap().is_no());
    }

    #[test]
    fn sweep_into_hyperplane() {
        let (rep, u) = ladder();
        let base = LinearLocus {
            conditions: vec![crate::loci::FactorConditions {
                factor: 0,
                rows: r(&[&[0, 0, 1]]),
            }],
            ..Default::default()
        };
        let x = ProjPoint::from_ints(&[&[1, 2, 7]]);
        let ans = u.in_sweep(&x, &base, &rep, 0).unwrap();
        assert!(ans.is_yes());
        let x = ProjPoint::from_ints(&[&[1, 0, 7]]);
        assert!(u.in_sweep(&x, &base, &rep, 0).unwrap().is_no());
    }
}
