//! Hilbert–Mumford verdicts for the torus T̂, adapted windows, the min+
//! twist and Kirwan indices β.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{cone_position, cone_separator, hull_position, hull_vertices, HullPosition, HullWitness};
use crate::linalg::{rank_of, solve_affine, QMat, Solution};
use crate::point::ProjPoint;
use crate::rational::Rat;
use crate::rep::{Character, RepSpace};

/// Largest number of hull vertices `kirwan_beta` enumerates faces over.
pub const MAX_BETA_VERTICES: usize = 12;
pub const MAX_BETA_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Verdict {
    pub fn from_position(p: HullPosition) -> Self {
        match p {
            HullPosition::Interior => Verdict::Stable,
            HullPosition::Boundary => Verdict::StrictlySemistable,
            HullPosition::Outside => Verdict::Unstable,
        }
    }

    pub fn is_semistable(self) -> bool {
        self != Verdict::Unstable
    }
}

/// Outcome of the infinitesimal G_m tie-break, present only when the origin
/// is on the hull boundary at χ0 itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieBreak {
    /// Position of the G_m direction relative to the cone spanned by the
    /// shifted weights.
    pub direction: HullPosition,
    /// For an unstable tie-break: f ≥ 0 on the shifted weights and f(e) = −1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HMVerdict {
    pub verdict: Verdict,
    /// Distinct support weights minus the character.
    pub weights: Vec<Vec<Rat>>,
    pub witness: HullWitness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<TieBreak>,
}

/// Distinct weights of the support of `x`, shifted by −χ.
pub fn shifted_support(x: &ProjPoint, rep: &RepSpace, chi: &Character) -> Result<Vec<Vec<Rat>>> {
    if chi.0.len() != rep.rank() {
        return Err(Error::Dimension(format!(
            "character has {} entries, torus rank is {}",
            chi.0.len(),
            rep.rank()
        )));
    }
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for b in x.support(rep) {
        let w: Vec<Rat> = rep.weight(b).iter().zip(&chi.0).map(|(&a, c)| Rat::from_int(a) - c).collect();
        if !out.contains(&w) {
            out.push(w);
        }
    }
    Ok(out)
}

pub fn torus_classify(x: &ProjPoint, rep: &RepSpace, chi: &Character) -> Result<HMVerdict> {
    let weights = shifted_support(x, rep, chi)?;
    let (pos, witness) = hull_position(&weights)?;
    Ok(HMVerdict {
        verdict: Verdict::from_position(pos),
        weights,
        witness,
        tie_break: None,
    })
}

/// Unit vector of the grading coordinate.
pub fn gm_direction(rep: &RepSpace) -> Vec<Rat> {
    (0..rep.rank())
        .map(|k| if k == rep.gm_component() { Rat::one() } else { Rat::zero() })
        .collect()
}

/// Verdict at χ0 + η·e_{G_m} for all sufficiently small η > 0.
///
/// With b_w = w − χ0 the shifted points are b_w − η e. If 0 is strictly
/// inside or outside conv(b) nothing changes for small η; on the boundary the
/// answer is the position of e relative to cone(b), the tangent cone of the
/// hull at 0.
pub fn minplus_classify(x: &ProjPoint, rep: &RepSpace, chi0: &Character) -> Result<HMVerdict> {
    let w0 = rep.weight_ladder().min();
    if chi0.0.len() == rep.rank() && *chi0.gm(rep) != Rat::from_int(w0) {
        return Err(Error::Precondition(format!(
            "min+ twist needs χ0 restricted to G_m equal to ω_0 = {w0}, got {}",
            chi0.gm(rep)
        )));
    }
    let weights = shifted_support(x, rep, chi0)?;
    let (pos, witness) = hull_position(&weights)?;
    if pos != HullPosition::Boundary {
        return Ok(HMVerdict {
            verdict: Verdict::from_position(pos),
            weights,
            witness,
            tie_break: None,
        });
    }
    let e = gm_direction(rep);
    let direction = cone_position(&weights, &e)?;
    let functional = if direction == HullPosition::Outside {
        cone_separator(&weights, &e)?
    } else {
        None
    };
    Ok(HMVerdict {
        verdict: Verdict::from_position(direction),
        weights,
        witness,
        tie_break: Some(TieBreak { direction, functional }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedWindow {
    pub low: Rat,
    pub high: Rat,
    pub well_adapted_high: Rat,
    /// The base character χ0 the ε computation ran along.
    pub chi0: Character,
}

impl AdaptedWindow {
    pub fn epsilon(&self) -> Rat {
        &self.well_adapted_high - &self.low
    }
}

/// Default χ0: zero on T0, ω_0 on G_m.
pub fn default_chi0(rep: &RepSpace) -> Character {
    let mut c = Character::zero(rep.rank());
    c.0[rep.gm_component()] = Rat::from_int(rep.weight_ladder().min());
    c
}

/// Subset count above which the wall enumeration refuses to run.
const MAX_WALL_SUBSETS: usize = 2_000_000;

pub fn adapted_window(rep: &RepSpace, chi0: Option<&Character>) -> Result<AdaptedWindow> {
    let ladder = rep.weight_ladder();
    if ladder.values.len() < 2 {
        return Err(Error::TrivialUnipotent);
    }
    let low = Rat::from_int(ladder.min());
    let high = Rat::from_int(ladder.values[1]);
    let chi0 = chi0.cloned().unwrap_or_else(|| default_chi0(rep));
    if chi0.0.len() != rep.rank() {
        return Err(Error::Dimension("χ0 length differs from torus rank".into()));
    }
    if *chi0.gm(rep) != low {
        return Err(Error::Precondition("χ0 restricted to G_m must equal ω_0".into()));
    }
    let mut distinct: Vec<Vec<Rat>> = Vec::new();
    for b in 0..rep.dim() {
        let w: Vec<Rat> = rep.weight(b).iter().map(|&a| Rat::from_int(a)).collect();
        if !distinct.contains(&w) {
            distinct.push(w);
        }
    }
    let d = rep.rank();
    let e = gm_direction(rep);
    let mut eps = &high - &low;
    let mut count = 0usize;
    for_each_subset(distinct.len(), d, &mut |s: &[usize]| -> Result<()> {
        count += 1;
        if count > MAX_WALL_SUBSETS {
            return Err(Error::ScaleExceeded("too many weight subsets for wall enumeration".into()));
        }
        let pts: Vec<&Vec<Rat>> = s.iter().map(|&i| &distinct[i]).collect();
        if !affinely_independent(&pts) {
            return Ok(());
        }
        if let Some(eta) = line_meets_affine_hull(&chi0.0, &e, &pts)? {
            if eta.is_positive() && eta < eps {
                eps = eta;
            }
        }
        Ok(())
    })?;
    Ok(AdaptedWindow {
        well_adapted_high: &low + &eps,
        low,
        high,
        chi0,
    })
}

/// Calls `f` on every subset of {0..n} with 1..=k elements, in lexicographic order.
fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        for i in start..n {
            cur.push(i);
            f(cur)?;
            if cur.len() < k {
                rec(i + 1, n, k, cur, f)?;
            }
            cur.pop();
        }
        Ok(())
    }
    rec(0, n, k, &mut Vec::new(), f)
}

fn affinely_independent(pts: &[&Vec<Rat>]) -> bool {
    if pts.len() <= 1 {
        return true;
    }
    let diffs: Vec<Vec<Rat>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0].iter()).map(|(a, b)| a - b).collect())
        .collect();
    rank_of(&diffs) == diffs.len()
}

/// The η at which c + η e meets aff(pts), if that is a single point.
fn line_meets_affine_hull(c: &[Rat], e: &[Rat], pts: &[&Vec<Rat>]) -> Result<Option<Rat>> {
    let d = c.len();
    let k = pts.len();
    // unknowns a_1..a_k, η: Σ a_i p_i − η e = c, Σ a_i = 1
    let mut a = QMat::zeros(d + 1, k + 1);
    let mut b: Vec<Rat> = c.to_vec();
    b.push(Rat::one());
    for (i, p) in pts.iter().enumerate() {
        for r in 0..d {
            a[(r, i)] = p[r].clone();
        }
        a[(d, i)] = Rat::one();
    }
    for r in 0..d {
        a[(r, k)] = -&e[r];
    }
    match solve_affine(&a, &b)? {
        Solution::Empty => Ok(None),
        Solution::Affine(s) => {
            if s.directions.iter().any(|v| !v[k].is_zero()) {
                Ok(None)
            } else {
                Ok(Some(s.basepoint[k].clone()))
            }
        }
    }
}

/// Positive-definite rational inner product on the character space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerProduct(pub QMat);

impl InnerProduct {
    pub fn identity(d: usize) -> Self {
        InnerProduct(QMat::identity(d))
    }

    pub fn apply(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let qv = self.0.mul_vec(v);
        u.iter().zip(&qv).map(|(a, b)| a * b).sum()
    }

    /// Symmetric and positive definite (Sylvester's criterion).
    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if m.rows() != m.cols() {
            return Err(Error::Validation("inner product must be square".into()));
        }
        let n = m.rows();
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Validation("inner product must be symmetric".into()));
                }
            }
        }
        for k in 1..=n {
            let minor: Vec<Vec<Rat>> = (0..k).map(|i| (0..k).map(|j| m[(i, j)].clone()).collect()).collect();
            if !determinant(minor).is_positive() {
                return Err(Error::Validation("inner product must be positive definite".into()));
            }
        }
        Ok(())
    }
}

fn determinant(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for j in c..n {
                let sub = &f * &a[c][j];
                a[r][j] -= &sub;
            }
        }
    }
    det
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaIndex {
    pub beta: Vec<Rat>,
    pub norm_sq: Rat,
}

impl BetaIndex {
    pub fn is_zero(&self) -> bool {
        self.beta.iter().all(Rat::is_zero)
    }
}

/// Nearest point to 0 of conv(support weights − χ) under `q`.
pub fn kirwan_beta(x: &ProjPoint, rep: &RepSpace, chi: &Character, q: &InnerProduct) -> Result<BetaIndex> {
    let weights = shifted_support(x, rep, chi)?;
    nearest_point(&weights, q)
}

/// Exact nearest point of conv(points) to the origin, by face enumeration
/// over the hull vertices.
pub fn nearest_point(points: &[Vec<Rat>], q: &InnerProduct) -> Result<BetaIndex> {
    let d = points.first().map_or(0, Vec::len);
    if q.0.rows() != d {
        return Err(Error::Dimension("inner product size differs from weight dimension".into()));
    }
    if d > MAX_BETA_DIM {
        return Err(Error::ScaleExceeded(format!("weight dimension {d} exceeds {MAX_BETA_DIM}")));
    }
    let verts: Vec<Vec<Rat>> = hull_vertices(points)?.into_iter().map(|i| points[i].clone()).collect();
    if verts.len() > MAX_BETA_VERTICES {
        return Err(Error::ScaleExceeded(format!(
            "{} hull vertices exceed the exact enumeration limit {MAX_BETA_VERTICES}",
            verts.len()
        )));
    }
    let mut found: Option<Vec<Rat>> = None;
    for_each_subset(verts.len(), d + 1, &mut |s: &[usize]| -> Result<()> {
        if found.is_some() {
            return Ok(());
        }
        let pts: Vec<&Vec<Rat>> = s.iter().map(|&i| &verts[i]).collect();
        if !affinely_independent(&pts) {
            return Ok(());
        }
        let Some(beta) = project_origin(&pts, q)? else {
            return Ok(());
        };
        let optimal = verts.iter().all(|w| {
            let diff: Vec<Rat> = w.iter().zip(&beta).map(|(a, b)| a - b).collect();
            !q.apply(&beta, &diff).is_negative()
        });
        if optimal {
            found = Some(beta);
        }
        Ok(())
    })?;
    let beta = found.ok_or_else(|| Error::Internal("no face realises the nearest point".into()))?;
    let norm_sq = q.apply(&beta, &beta);
    Ok(BetaIndex { beta, norm_sq })
}

/// Orthogonal projection of 0 onto aff(pts) when it lies in conv(pts).
fn project_origin(pts: &[&Vec<Rat>], q: &InnerProduct) -> Result<Option<Vec<Rat>>> {
    let k = pts.len();
    // Σ a_i = 1 and ⟨Σ a_i p_i, p_j − p_0⟩ = 0 for j ≥ 1.
    let mut a = QMat::zeros(k, k);
    let mut b = vec![Rat::zero(); k];
    for i in 0..k {
        a[(0, i)] = Rat::one();
    }
    b[0] = Rat::one();
    for j in 1..k {
        let dj: Vec<Rat> = pts[j].iter().zip(pts[0].iter()).map(|(x, y)| x - y).collect();
        for i in 0..k {
            a[(j, i)] = q.apply(pts[i], &dj);
        }
    }
    match solve_affine(&a, &b)? {
        Solution::Affine(s) if s.directions.is_empty() => {
            if s.basepoint.iter().any(Rat::is_negative) {
                return Ok(None);
            }
            let d = pts[0].len();
            let beta = (0..d)
                .map(|r| pts.iter().zip(&s.basepoint).map(|(p, c)| &p[r] * c).sum())
                .collect();
            Ok(Some(beta))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rvec;
    use crate::rep::{build_rep, FactorSpec};

    fn line_rep(ws: &[i64]) -> RepSpace {
        build_rep(&[FactorSpec::proj(ws.iter().map(|&w| vec![w]).collect())], 0).unwrap()
    }

    #[test]
    fn single_weight_at_character_is_strictly_semistable() {
        let rep = line_rep(&[0, 3]);
        let x = ProjPoint::from_ints(&[&[0, 1]]);
        let v = torus_classify(&x, &rep, &Character::from_ints(&[3])).unwrap();
        assert_eq!(v.verdict, Verdict::StrictlySemistable);
    }

    #[test]
    fn min_plus_on_one_dimensional_ladder() {
        let rep = line_rep(&[0, 2]);
        let chi0 = Character::from_ints(&[0]);
        let fixed = ProjPoint::from_ints(&[&[1, 0]]);
        assert_eq!(minplus_classify(&fixed, &rep, &chi0).unwrap().verdict, Verdict::Unstable);
        let moving = ProjPoint::from_ints(&[&[1, 1]]);
        assert_eq!(minplus_classify(&moving, &rep, &chi0).unwrap().verdict, Verdict::Stable);
        assert!(minplus_classify(&fixed, &rep, &Character::from_ints(&[1])).is_err());
    }

    #[test]
    fn window_for_two_weight_ladder() {
        let rep = line_rep(&[0, 5]);
        let w = adapted_window(&rep, None).unwrap();
        assert_eq!((w.low, w.high.clone(), w.well_adapted_high), (Rat::zero(), Rat::from_int(5), Rat::from_int(5)));
    }

    #[test]
    fn window_rejects_trivial_ladder() {
        let rep = line_rep(&[2, 2]);
        assert_eq!(adapted_window(&rep, None), Err(Error::TrivialUnipotent));
    }

    #[test]
    fn beta_examples() {
        let q1 = InnerProduct::identity(1);
        assert!(nearest_point(&[rvec(&[-1]), rvec(&[2])], &q1).unwrap().is_zero());
        assert_eq!(nearest_point(&[rvec(&[2])], &q1).unwrap().beta, rvec(&[2]));
        let q2 = InnerProduct::identity(2);
        let b = nearest_point(&[rvec(&[2, 0]), rvec(&[0, 2]), rvec(&[2, 2])], &q2).unwrap();
        assert_eq!(b.beta, rvec(&[1, 1]));
        assert_eq!(b.norm_sq, Rat::from_int(2));
    }

    #[test]
    fn beta_respects_inner_product() {
        // Under diag(1,4) the segment (2,0)–(0,2) is closest at a/(a+b) weighting.
        let q = InnerProduct(QMat::from_ints(&[&[1, 0], &[0, 4]]));
        let b = nearest_point(&[rvec(&[2, 0]), rvec(&[0, 2])], &q).unwrap();
        assert_eq!(b.beta, vec![Rat::new(8, 5), Rat::new(2, 5)]);
    }

    #[test]
    fn inner_product_validation() {
        assert!(InnerProduct(QMat::from_ints(&[&[1, 2], &[2, 1]])).validate().is_err());
        assert!(InnerProduct(QMat::from_ints(&[&[2, 1], &[1, 2]])).validate().is_ok());
    }
}
