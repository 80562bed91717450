//! Linearised representation data for products of projective spaces.
//!
//! A point of X = ∏ P(V_f) embeds in V = ⊗ V_f by multiplying factor
//! coordinates. The torus T̂ acts diagonally on every factor; one coordinate
//! of its character lattice is the grading G_m.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Proj,
    ProjDual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub kind: FactorKind,
    /// Projective dimension; the factor has `dim + 1` homogeneous coordinates.
    pub dim: usize,
    #[serde(default = "one")]
    pub twist: u32,
    /// Torus weight of each homogeneous coordinate of the primal space.
    /// Dual factors act through the negatives of these.
    pub weights: Vec<Vec<i64>>,
}

fn one() -> u32 {
    1
}

impl FactorSpec {
    pub fn proj(weights: Vec<Vec<i64>>) -> Self {
        FactorSpec {
            kind: FactorKind::Proj,
            dim: weights.len().saturating_sub(1),
            twist: 1,
            weights,
        }
    }

    pub fn proj_dual(weights: Vec<Vec<i64>>) -> Self {
        FactorSpec {
            kind: FactorKind::ProjDual,
            dim: weights.len().saturating_sub(1),
            twist: 1,
            weights,
        }
    }

    pub fn with_twist(mut self, twist: u32) -> Self {
        self.twist = twist;
        self
    }

    pub fn ncoords(&self) -> usize {
        self.dim + 1
    }

    /// Weight with which the torus acts on coordinate `i` of this factor.
    pub fn coord_weight(&self, i: usize) -> Vec<i64> {
        match self.kind {
            FactorKind::Proj => self.weights[i].clone(),
            FactorKind::ProjDual => self.weights[i].iter().map(|w| -w).collect(),
        }
    }
}

/// The weight decomposition of V under T̂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSpace {
    factors: Vec<FactorSpec>,
    rank: usize,
    gm_component: usize,
    scale: i64,
    basis: Vec<Vec<usize>>,
    weights: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightLadder {
    pub values: Vec<i64>,
}

impl WeightLadder {
    pub fn min(&self) -> i64 {
        self.values[0]
    }

    pub fn max(&self) -> i64 {
        *self.values.last().expect("ladder is nonempty")
    }

    /// Least ladder value strictly above `w`.
    pub fn next_above(&self, w: i64) -> Option<i64> {
        self.values.iter().copied().find(|&v| v > w)
    }
}

/// A rational character of T̂.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character(pub Vec<Rat>);

impl Character {
    pub fn zero(rank: usize) -> Self {
        Character(vec![Rat::zero(); rank])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Character(v.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn gm(&self, rep: &RepSpace) -> &Rat {
        &self.0[rep.gm_component()]
    }

    pub fn scaled(&self, c: &Rat) -> Character {
        Character(self.0.iter().map(|x| x * c).collect())
    }

    pub fn parse_csv(s: &str) -> Result<Self> {
        let v: Result<Vec<Rat>> = s.split(',').map(|t| t.parse()).collect();
        Ok(Character(v?))
    }
}

pub fn build_rep(factors: &[FactorSpec], gm_component: usize) -> Result<RepSpace> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Validation("at least one factor is required".into()))?;
    let rank = first
        .weights
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Validation("factor 0 has no coordinate weights".into()))?;
    for (fi, f) in factors.iter().enumerate() {
        if f.dim < 1 {
            return Err(Error::Validation(format!("factor {fi}: dim must be at least 1")));
        }
        if f.twist < 1 {
            return Err(Error::Validation(format!("factor {fi}: twist must be at least 1")));
        }
        if f.weights.len() != f.dim + 1 {
            return Err(Error::Validation(format!(
                "factor {fi}: expected {} coordinate weights, found {}",
                f.dim + 1,
                f.weights.len()
            )));
        }
        if let Some((ci, _)) = f.weights.iter().enumerate().find(|(_, w)| w.len() != rank) {
            return Err(Error::Validation(format!(
                "factor {fi} coordinate {ci}: inconsistent torus rank (expected {rank})"
            )));
        }
    }
    if gm_component >= rank {
        return Err(Error::Validation(format!(
            "gm_component {gm_component} out of range for torus rank {rank}"
        )));
    }
    let mut rep = RepSpace {
        factors: factors.to_vec(),
        rank,
        gm_component,
        scale: 1,
        basis: Vec::new(),
        weights: Vec::new(),
    };
    rep.basis = cartesian(&factors.iter().map(FactorSpec::ncoords).collect::<Vec<_>>());
    rep.weights = rep.basis.iter().map(|m| rep.weight_of(m)).collect();
    Ok(rep)
}

fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

impl RepSpace {
    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gm_component(&self) -> usize {
        self.gm_component
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn weight(&self, b: usize) -> &[i64] {
        &self.weights[b]
    }

    pub fn gm_weight(&self, b: usize) -> i64 {
        self.weights[b][self.gm_component]
    }

    /// Weight of a basis multi-index: scale · Σ_f twist_f · w_f(i_f).
    pub fn weight_of(&self, multi: &[usize]) -> Vec<i64> {
        let mut w = vec![0i64; self.rank];
        for (f, &i) in self.factors.iter().zip(multi) {
            let cw = f.coord_weight(i);
            for (acc, x) in w.iter_mut().zip(cw) {
                *acc += self.scale * f.twist as i64 * x;
            }
        }
        w
    }

    /// G_m weight of coordinate `i` of factor `f`, unscaled and untwisted.
    pub fn factor_gm_weight(&self, f: usize, i: usize) -> i64 {
        self.factors[f].coord_weight(i)[self.gm_component]
    }

    /// Contribution of coordinate `i` of factor `f` to embedded G_m weights.
    pub fn factor_gm_contribution(&self, f: usize, i: usize) -> i64 {
        self.scale * self.factors[f].twist as i64 * self.factor_gm_weight(f, i)
    }

    /// Mixed-radix index of a multi-index in the basis ordering.
    pub fn index_of(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for (f, &i) in self.factors.iter().zip(multi) {
            idx = idx * f.ncoords() + i;
        }
        idx
    }

    pub fn weight_ladder(&self) -> WeightLadder {
        let set: BTreeSet<i64> = (0..self.dim()).map(|b| self.gm_weight(b)).collect();
        WeightLadder {
            values: set.into_iter().collect(),
        }
    }

    /// Models L^{⊗c}: every weight is multiplied by `c`.
    pub fn scale_linearisation(&self, c: i64) -> Result<RepSpace> {
        if c < 1 {
            return Err(Error::Precondition(format!("scale factor must be ≥ 1, got {c}")));
        }
        let mut out = self.clone();
        out.scale *= c;
        out.weights = out.basis.iter().map(|m| out.weight_of(m)).collect();
        Ok(out)
    }

    /// Appends a factor (used by the X × P¹ construction).
    pub fn with_factor(&self, f: FactorSpec) -> Result<RepSpace> {
        let mut factors = self.factors.clone();
        factors.push(f);
        let mut rep = build_rep(&factors, self.gm_component)?;
        rep.scale = self.scale;
        rep.weights = rep.basis.iter().map(|m| rep.weight_of(m)).collect();
        Ok(rep)
    }
}
