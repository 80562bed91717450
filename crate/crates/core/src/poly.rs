//! Sparse multivariate polynomials over ℚ and a staged affine solver for
//! polynomial systems whose unknowns carry positive grading weights.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{solve_affine, AffineSubspace, QMat, Solution};
use crate::rational::Rat;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, Rat::one());
        p
    }

    /// c + Σ coeffs_i · x_i
    pub fn affine(constant: &Rat, coeffs: &[Rat]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::constant(n, constant.clone());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Rat::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest Σ weight_i · e_i over the monomials.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().zip(weights).map(|(a, w)| a * w).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.clone();
                for (xi, &k) in x.iter().zip(e) {
                    if k > 0 {
                        v = v * xi.pow(k);
                    }
                }
                v
            })
            .sum()
    }

    /// Constant term and linear coefficients; `None` if degree > 1.
    pub fn as_linear(&self) -> Option<(Rat, Vec<Rat>)> {
        if self.degree() > 1 {
            return None;
        }
        let mut c0 = Rat::zero();
        let mut lin = vec![Rat::zero(); self.nvars];
        for (e, c) in &self.terms {
            match e.iter().position(|&k| k == 1) {
                Some(i) => lin[i] = c.clone(),
                None => c0 = c.clone(),
            }
        }
        Some((c0, lin))
    }

    /// Substitutes x = base + Σ_j dirs_j · y_j, producing a polynomial in y.
    pub fn substitute_affine(&self, space: &AffineSubspace) -> Poly {
        let k = space.dim();
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<Rat> = space.directions.iter().map(|d| d[i].clone()).collect();
                Poly::affine(&space.basepoint[i], &coeffs)
            })
            .collect();
        let mut out = Poly::zero(k);
        for (e, c) in &self.terms {
            let mut m = Poly::constant(k, c.clone());
            for (i, &pw) in e.iter().enumerate() {
                for _ in 0..pw {
                    m = m.mul(&images[i]);
                }
            }
            out = out.add(&m);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*s{i}")?,
                    _ => write!(f, "*s{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Outcome of the staged solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum SystemAnswer {
    /// A verified assignment of the unknowns.
    Yes { values: Vec<Rat> },
    /// The affine system at `level` is inconsistent.
    No { level: u32, system: Vec<String> },
    /// Equations remained nonlinear in the still-free unknowns.
    Indeterminate { free_dim: usize, residual: Vec<String> },
}

/// Solves `equations = 0` (and `nonvanishing ≠ 0`) by grading level.
///
/// Equations are processed in order of weighted degree. At each level every
/// equation that is affine in the still-free unknowns is solved exactly and
/// substituted; equations that stay nonlinear are carried forward and retried
/// once later levels have pinned more unknowns.
pub fn solve_staged(
    nvars: usize,
    weights: &[u32],
    equations: &[Poly],
    nonvanishing: &[Poly],
    seed: u64,
) -> SystemAnswer {
    let mut by_level: BTreeMap<u32, Vec<Poly>> = BTreeMap::new();
    for eq in equations {
        if eq.is_zero() {
            continue;
        }
        by_level.entry(eq.weighted_degree(weights)).or_default().push(eq.clone());
    }
    let mut space = AffineSubspace::whole(nvars);
    let mut active: Vec<Poly> = Vec::new();
    let mut last_level = 0;
    for (level, eqs) in by_level {
        last_level = level;
        active.extend(eqs.iter().map(|e| e.substitute_affine(&space)));
        loop {
            active.retain(|p| !p.is_zero());
            if let Some(bad) = active.iter().find(|p| p.degree() == 0) {
                return SystemAnswer::No {
                    level,
                    system: vec![format!("{bad} = 0")],
                };
            }
            let (linear, rest): (Vec<Poly>, Vec<Poly>) =
                active.drain(..).partition(|p| p.degree() <= 1);
            active = rest;
            if linear.is_empty() {
                break;
            }
            let k = space.dim();
            let mut rows = Vec::with_capacity(linear.len());
            let mut rhs = Vec::with_capacity(linear.len());
            for p in &linear {
                let (c0, lin) = p.as_linear().expect("degree checked");
                rows.push(lin);
                rhs.push(-c0);
            }
            let a = QMat::from_rows(&rows).expect("uniform width");
            let a = if rows.is_empty() { QMat::zeros(0, k) } else { a };
            match solve_affine(&a, &rhs).expect("dimensions agree") {
                Solution::Empty => {
                    return SystemAnswer::No {
                        level,
                        system: linear.iter().map(|p| format!("{p} = 0")).collect(),
                    };
                }
                Solution::Affine(sub) => {
                    active = active.iter().map(|p| p.substitute_affine(&sub)).collect();
                    space = compose(&space, &sub);
                }
            }
        }
    }
    active.retain(|p| !p.is_zero());
    if !active.is_empty() {
        return SystemAnswer::Indeterminate {
            free_dim: space.dim(),
            residual: active.iter().map(|p| format!("{p} = 0")).collect(),
        };
    }
    let open: Vec<Poly> = nonvanishing.iter().map(|p| p.substitute_affine(&space)).collect();
    if open.iter().any(Poly::is_zero) {
        return SystemAnswer::No {
            level: last_level,
            system: vec!["solution family lies in an excluded locus".into()],
        };
    }
    let k = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut choice = vec![Rat::zero(); k];
    for _ in 0..64 {
        if open.iter().all(|p| !p.eval(&choice).is_zero()) {
            return SystemAnswer::Yes {
                values: space.at(&choice),
            };
        }
        choice = (0..k).map(|_| Rat::from_int(rng.gen_range(-20..=20))).collect();
    }
    SystemAnswer::Indeterminate {
        free_dim: k,
        residual: vec!["could not find a point avoiding the excluded locus".into()],
    }
}

/// outer ∘ inner: x = outer.base + outer.dirs · (inner.base + inner.dirs · z)
fn compose(outer: &AffineSubspace, inner: &AffineSubspace) -> AffineSubspace {
    let basepoint = outer.at(&inner.basepoint);
    let directions = inner
        .directions
        .iter()
        .map(|d| {
            let mut v = vec![Rat::zero(); outer.ambient];
            for (c, od) in d.iter().zip(&outer.directions) {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(od) {
                    *x += c * y;
                }
            }
            v
        })
        .collect();
    AffineSubspace {
        basepoint,
        directions,
        ambient: outer.ambient,
    }
}
