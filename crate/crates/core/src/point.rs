//! Points of a product of projective spaces.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::rep::RepSpace;

/// A point of X ⊆ P(V), kept in factor form when decomposable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "PointRepr", into = "PointRepr")]
pub struct ProjPoint {
    factors: Option<Vec<Vec<Rat>>>,
    embedded: OnceLock<Vec<Rat>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Factored(Vec<Vec<Rat>>),
    Embedded { embedded: Vec<Rat> },
}

impl From<PointRepr> for ProjPoint {
    fn from(r: PointRepr) -> Self {
        match r {
            PointRepr::Factored(f) => ProjPoint::from_factors_unchecked(f),
            PointRepr::Embedded { embedded } => ProjPoint::from_embedded_unchecked(embedded),
        }
    }
}

impl From<ProjPoint> for PointRepr {
    fn from(p: ProjPoint) -> Self {
        match p.factors {
            Some(f) => PointRepr::Factored(f),
            None => PointRepr::Embedded {
                embedded: p.embedded.get().cloned().unwrap_or_default(),
            },
        }
    }
}

impl ProjPoint {
    pub fn from_factors(factors: Vec<Vec<Rat>>) -> Result<Self> {
        if let Some(i) = factors.iter().position(|v| v.iter().all(Rat::is_zero)) {
            return Err(Error::Validation(format!("factor {i} of the point is the zero vector")));
        }
        Ok(Self::from_factors_unchecked(factors))
    }

    fn from_factors_unchecked(factors: Vec<Vec<Rat>>) -> Self {
        ProjPoint {
            factors: Some(factors),
            embedded: OnceLock::new(),
        }
    }

    pub fn from_ints(factors: &[&[i64]]) -> Self {
        Self::from_factors(
            factors
                .iter()
                .map(|f| f.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
        .expect("nonzero factors")
    }

    pub fn from_embedded(v: Vec<Rat>) -> Result<Self> {
        if v.iter().all(Rat::is_zero) {
            return Err(Error::Validation("embedded point is the zero vector".into()));
        }
        Ok(Self::from_embedded_unchecked(v))
    }

    fn from_embedded_unchecked(v: Vec<Rat>) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(v);
        ProjPoint {
            factors: None,
            embedded: cell,
        }
    }

    /// Recovers factor form when the embedded vector is a pure tensor.
    pub fn from_embedded_in(rep: &RepSpace, v: Vec<Rat>) -> Result<Self> {
        let p = Self::from_embedded(v)?;
        Ok(match try_factor(rep, p.embedded_raw()) {
            Some(f) => Self::from_factors_unchecked(f),
            None => p,
        })
    }

    pub fn factors(&self) -> Option<&[Vec<Rat>]> {
        self.factors.as_deref()
    }

    pub fn factor(&self, f: usize) -> &[Rat] {
        &self.factors.as_ref().expect("point is in factor form")[f]
    }

    pub fn is_factored(&self) -> bool {
        self.factors.is_some()
    }

    fn embedded_raw(&self) -> &[Rat] {
        self.embedded.get().expect("embedded vector present")
    }

    /// Vector in the basis of `rep`: products of factor coordinates.
    pub fn embedded(&self, rep: &RepSpace) -> &[Rat] {
        self.embedded.get_or_init(|| {
            let f = self.factors.as_ref().expect("either factors or embedding is set");
            rep.basis()
                .iter()
                .map(|m| {
                    let mut v = Rat::one();
                    for (fi, &i) in m.iter().enumerate() {
                        let c = &f[fi][i];
                        if c.is_zero() {
                            return Rat::zero();
                        }
                        v = v * c;
                    }
                    v
                })
                .collect()
        })
    }

    pub fn support(&self, rep: &RepSpace) -> Vec<usize> {
        self.embedded(rep)
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Projective equality via vanishing 2×2 minors.
    pub fn proj_eq(&self, other: &ProjPoint, rep: &RepSpace) -> bool {
        match (&self.factors, &other.factors) {
            (Some(a), Some(b)) => a.len() == b.len() && a.iter().zip(b).all(|(u, v)| proportional(u, v)),
            _ => proportional(self.embedded(rep), other.embedded(rep)),
        }
    }
}

impl Eq for ProjPoint {}

impl PartialEq for ProjPoint {
    /// Literal equality of the stored representation; use `proj_eq` for
    /// projective comparison.
    fn eq(&self, other: &Self) -> bool {
        match (&self.factors, &other.factors) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.embedded.get() == other.embedded.get(),
            _ => false,
        }
    }
}

/// u ∝ v for nonzero vectors of equal length.
pub fn proportional(u: &[Rat], v: &[Rat]) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let Some(k) = u.iter().position(|x| !x.is_zero()) else {
        return v.iter().all(Rat::is_zero);
    };
    if v[k].is_zero() {
        return false;
    }
    (0..u.len()).all(|i| &u[i] * &v[k] == &v[i] * &u[k])
}

fn try_factor(rep: &RepSpace, emb: &[Rat]) -> Option<Vec<Vec<Rat>>> {
    let star = emb.iter().position(|x| !x.is_zero())?;
    let mstar = &rep.basis()[star];
    let factors: Vec<Vec<Rat>> = rep
        .factors()
        .iter()
        .enumerate()
        .map(|(f, spec)| {
            (0..spec.ncoords())
                .map(|i| {
                    let mut m = mstar.clone();
                    m[f] = i;
                    emb[rep.index_of(&m)].clone()
                })
                .collect()
        })
        .collect();
    let candidate = ProjPoint::from_factors_unchecked(factors.clone());
    if proportional(candidate.embedded(rep), emb) {
        Some(factors)
    } else {
        None
    }
}
