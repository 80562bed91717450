//! Exact position of the origin relative to convex hulls and cones, via a
//! two-phase simplex over ℚ with Bland's rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank_of, QMat};
use crate::rational::{dot, Rat};

/// Largest ambient dimension accepted by `hull_position`.
pub const MAX_HULL_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

/// Minimizes `c·x` subject to `a·x = b`, `x ≥ 0`.
pub fn simplex(a: &QMat, b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    // Tableau columns: n structural + m artificial.
    let width = n + m;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rat> = a.row(i).iter().map(|x| if flip { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        t.push(row);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let phase1_cost: Vec<Rat> = (0..width).map(|j| if j >= n { Rat::one() } else { Rat::zero() }).collect();
    run_simplex(&mut t, &mut rhs, &mut basis, &phase1_cost, width);
    let infeasibility: Rat = basis
        .iter()
        .zip(&rhs)
        .filter(|(&bj, _)| bj >= n)
        .map(|(_, r)| r.clone())
        .sum();
    if !infeasibility.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut rhs, &mut basis, i, j);
                i += 1;
            } else {
                t.remove(i);
                rhs.remove(i);
                basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    let mut cost: Vec<Rat> = c.to_vec();
    cost.extend((0..m).map(|_| Rat::zero()));
    // Artificial columns may not re-enter.
    if !run_simplex(&mut t, &mut rhs, &mut basis, &cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (r, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = rhs[r].clone();
        }
    }
    let value = dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Returns false when unbounded. Only columns `< allowed` may enter.
fn run_simplex(
    t: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    cost: &[Rat],
    allowed: usize,
) -> bool {
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut rc = cost[j].clone();
            for (r, &bj) in basis.iter().enumerate() {
                if !cost[bj].is_zero() && !t[r][j].is_zero() {
                    rc -= &(&cost[bj] * &t[r][j]);
                }
            }
            rc.is_negative()
        });
        let Some(j) = entering else {
            return true;
        };
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..t.len() {
            if !t[r][j].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &t[r][j];
            let better = match &leave {
                None => true,
                Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        pivot(t, rhs, basis, r, j);
    }
}

fn pivot(t: &mut [Vec<Rat>], rhs: &mut [Rat], basis: &mut [usize], r: usize, j: usize) {
    let inv = t[r][j].recip();
    for x in t[r].iter_mut() {
        if !x.is_zero() {
            *x = &*x * &inv;
        }
    }
    rhs[r] = &rhs[r] * &inv;
    let prow = t[r].clone();
    let prhs = rhs[r].clone();
    for i in 0..t.len() {
        if i == r || t[i][j].is_zero() {
            continue;
        }
        let f = t[i][j].clone();
        for (x, p) in t[i].iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &(&f * p);
            }
        }
        rhs[i] -= &(&f * &prhs);
    }
    basis[r] = j;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullPosition {
    Interior,
    Boundary,
    Outside,
}

/// Evidence for a `HullPosition`.
///
/// Interior: strictly positive convex coefficients summing to 1 with
/// Σ μ_i w_i = 0 (and the points span). Outside: a functional that is
/// strictly positive on every point. Boundary: a convex combination equal to
/// 0 together with a nonzero functional that is nonnegative on every point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullWitness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combination: Option<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<Rat>>,
}

fn check_points(points: &[Vec<Rat>]) -> Result<usize> {
    let d = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Precondition("empty weight set".into()))?;
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Dimension("weights of differing dimension".into()));
    }
    if d > MAX_HULL_DIM {
        return Err(Error::ScaleExceeded(format!("hull dimension {d} exceeds {MAX_HULL_DIM}")));
    }
    Ok(d)
}

/// Position of the origin relative to conv(points).
pub fn hull_position(points: &[Vec<Rat>]) -> Result<(HullPosition, HullWitness)> {
    let d = check_points(points)?;
    let n = points.len();
    // μ_i = ν_i + t with ν ≥ 0, t ≥ 0; maximize t.
    // rows: Σ μ_i = 1, then Σ μ_i w_i = 0 coordinatewise.
    let mut a = QMat::zeros(d + 1, n + 1);
    let mut b = vec![Rat::zero(); d + 1];
    b[0] = Rat::one();
    for (i, p) in points.iter().enumerate() {
        a[(0, i)] = Rat::one();
        for k in 0..d {
            a[(k + 1, i)] = p[k].clone();
        }
    }
    a[(0, n)] = Rat::from_int(n as i64);
    for k in 0..d {
        a[(k + 1, n)] = points.iter().map(|p| &p[k]).sum();
    }
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = -Rat::one();
    match simplex(&a, &b, &c) {
        LpOutcome::Infeasible => {
            let f = separating_functional(points, d)?;
            Ok((
                HullPosition::Outside,
                HullWitness {
                    combination: None,
                    functional: Some(f),
                },
            ))
        }
        LpOutcome::Unbounded => Err(Error::Internal("bounded hull LP reported unbounded".into())),
        LpOutcome::Optimal { x, .. } => {
            let t = x[n].clone();
            let mu: Vec<Rat> = x[..n].iter().map(|v| v + &t).collect();
            let spans = rank_of(points) == d;
            if t.is_positive() && spans {
                Ok((
                    HullPosition::Interior,
                    HullWitness {
                        combination: Some(mu),
                        functional: None,
                    },
                ))
            } else {
                let f = supporting_functional(points, d, spans)?;
                Ok((
                    HullPosition::Boundary,
                    HullWitness {
                        combination: Some(mu),
                        functional: Some(f),
                    },
                ))
            }
        }
    }
}

/// f with f(w) ≥ 1 for every w (exists iff 0 ∉ conv).
fn separating_functional(points: &[Vec<Rat>], d: usize) -> Result<Vec<Rat>> {
    let n = points.len();
    // variables: f⁺ (d), f⁻ (d), slack s (n); f·w − s = 1
    let mut a = QMat::zeros(n, 2 * d + n);
    for (i, p) in points.iter().enumerate() {
        for k in 0..d {
            a[(i, k)] = p[k].clone();
            a[(i, d + k)] = -&p[k];
        }
        a[(i, 2 * d + i)] = -Rat::one();
    }
    let b = vec![Rat::one(); n];
    let c = vec![Rat::zero(); 2 * d + n];
    match simplex(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => Ok((0..d).map(|k| &x[k] - &x[d + k]).collect()),
        _ => Err(Error::Internal("no separating functional for an outside origin".into())),
    }
}

/// Nonzero f with f(w) ≥ 0 for every w.
fn supporting_functional(points: &[Vec<Rat>], d: usize, spans: bool) -> Result<Vec<Rat>> {
    if !spans {
        let m = QMat::from_rows(points).expect("uniform");
        return nullspace(&m)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal("rank deficit without normal vector".into()));
    }
    let n = points.len();
    // f·w − s = 0, Σ s = 1
    let mut a = QMat::zeros(n + 1, 2 * d + n);
    for (i, p) in points.iter().enumerate() {
        for k in 0..d {
            a[(i, k)] = p[k].clone();
            a[(i, d + k)] = -&p[k];
        }
        a[(i, 2 * d + i)] = -Rat::one();
        a[(n, 2 * d + i)] = Rat::one();
    }
    let mut b = vec![Rat::zero(); n + 1];
    b[n] = Rat::one();
    let c = vec![Rat::zero(); 2 * d + n];
    match simplex(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => Ok((0..d).map(|k| &x[k] - &x[d + k]).collect()),
        _ => Err(Error::Internal("no supporting functional for a boundary origin".into())),
    }
}

/// Checks a witness against the claimed position by exact evaluation.
pub fn verify_witness(points: &[Vec<Rat>], pos: HullPosition, w: &HullWitness) -> bool {
    let d = points.first().map_or(0, Vec::len);
    let combo_ok = |mu: &Vec<Rat>, strict: bool| {
        mu.len() == points.len()
            && mu.iter().all(|m| if strict { m.is_positive() } else { !m.is_negative() })
            && mu.iter().sum::<Rat>() == Rat::one()
            && (0..d).all(|k| points.iter().zip(mu).map(|(p, m)| &p[k] * m).sum::<Rat>().is_zero())
    };
    match pos {
        HullPosition::Interior => {
            w.combination.as_ref().is_some_and(|mu| combo_ok(mu, true)) && rank_of(points) == d
        }
        HullPosition::Outside => w
            .functional
            .as_ref()
            .is_some_and(|f| points.iter().all(|p| dot(f, p).is_positive())),
        HullPosition::Boundary => {
            w.combination.as_ref().is_some_and(|mu| combo_ok(mu, false))
                && w.functional.as_ref().is_some_and(|f| {
                    f.iter().any(|x| !x.is_zero()) && points.iter().all(|p| !dot(f, p).is_negative())
                })
        }
    }
}

/// Whether `target` lies in conv(points).
pub fn in_hull(points: &[Vec<Rat>], target: &[Rat]) -> Result<bool> {
    let shifted: Vec<Vec<Rat>> = points
        .iter()
        .map(|p| p.iter().zip(target).map(|(a, b)| a - b).collect())
        .collect();
    Ok(hull_position(&shifted)?.0 != HullPosition::Outside)
}

/// Indices of the distinct points that are vertices of conv(points).
pub fn hull_vertices(points: &[Vec<Rat>]) -> Result<Vec<usize>> {
    check_points(points)?;
    let mut distinct: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !distinct.iter().any(|&j| &points[j] == p) {
            distinct.push(i);
        }
    }
    let mut out = Vec::new();
    for &i in &distinct {
        let others: Vec<Vec<Rat>> = distinct.iter().filter(|&&j| j != i).map(|&j| points[j].clone()).collect();
        if others.is_empty() || !in_hull(&others, &points[i])? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Position of `target` relative to the cone generated by `gens`:
/// Interior means target = Σ λ_i g_i with every λ_i > 0 and the generators
/// span the ambient space.
pub fn cone_position(gens: &[Vec<Rat>], target: &[Rat]) -> Result<HullPosition> {
    let d = target.len();
    if gens.is_empty() {
        return Ok(if target.iter().all(Rat::is_zero) {
            HullPosition::Boundary
        } else {
            HullPosition::Outside
        });
    }
    if gens.iter().any(|g| g.len() != d) {
        return Err(Error::Dimension("cone generators of differing dimension".into()));
    }
    let n = gens.len();
    // λ_i = ν_i + t, 0 ≤ t ≤ 1 (slack u); maximize t.
    let mut a = QMat::zeros(d + 1, n + 2);
    let mut b: Vec<Rat> = target.to_vec();
    b.push(Rat::one());
    for (i, g) in gens.iter().enumerate() {
        for k in 0..d {
            a[(k, i)] = g[k].clone();
        }
    }
    for k in 0..d {
        a[(k, n)] = gens.iter().map(|g| &g[k]).sum();
    }
    a[(d, n)] = Rat::one();
    a[(d, n + 1)] = Rat::one();
    let mut c = vec![Rat::zero(); n + 2];
    c[n] = -Rat::one();
    match simplex(&a, &b, &c) {
        LpOutcome::Infeasible => Ok(HullPosition::Outside),
        LpOutcome::Unbounded => Err(Error::Internal("bounded cone LP reported unbounded".into())),
        LpOutcome::Optimal { x, .. } => {
            if x[n].is_positive() && rank_of(gens) == d {
                Ok(HullPosition::Interior)
            } else {
                Ok(HullPosition::Boundary)
            }
        }
    }
}

/// f with f(g) ≥ 0 on every generator and f(target) = −1; `None` when the
/// target lies in the cone.
pub fn cone_separator(gens: &[Vec<Rat>], target: &[Rat]) -> Result<Option<Vec<Rat>>> {
    let d = target.len();
    let n = gens.len();
    // variables f⁺, f⁻, slack per generator
    let mut a = QMat::zeros(n + 1, 2 * d + n);
    let mut b = vec![Rat::zero(); n + 1];
    for (i, g) in gens.iter().enumerate() {
        for k in 0..d {
            a[(i, k)] = g[k].clone();
            a[(i, d + k)] = -&g[k];
        }
        a[(i, 2 * d + i)] = -Rat::one();
    }
    for k in 0..d {
        a[(n, k)] = target[k].clone();
        a[(n, d + k)] = -&target[k];
    }
    b[n] = -Rat::one();
    let c = vec![Rat::zero(); 2 * d + n];
    Ok(match simplex(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => Some((0..d).map(|k| &x[k] - &x[d + k]).collect()),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rvec;

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter().map(|p| rvec(p)).collect()
    }

    #[test]
    fn one_dimensional_cases() {
        let (pos, w) = hull_position(&pts(&[&[-1], &[1]])).unwrap();
        assert_eq!(pos, HullPosition::Interior);
        assert!(verify_witness(&pts(&[&[-1], &[1]]), pos, &w));
        let (pos, w) = hull_position(&pts(&[&[1], &[2]])).unwrap();
        assert_eq!(pos, HullPosition::Outside);
        assert!(verify_witness(&pts(&[&[1], &[2]]), pos, &w));
        let (pos, _) = hull_position(&pts(&[&[0], &[2]])).unwrap();
        assert_eq!(pos, HullPosition::Boundary);
    }

    #[test]
    fn degenerate_segment_through_origin_is_boundary() {
        let p = pts(&[&[-1, -1], &[1, 1]]);
        let (pos, w) = hull_position(&p).unwrap();
        assert_eq!(pos, HullPosition::Boundary);
        assert!(verify_witness(&p, pos, &w));
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(hull_position(&[]).is_err());
    }

    #[test]
    fn simplex_small_lp() {
        // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = QMat::from_ints(&[&[1, 2, 1, 0], &[3, 1, 0, 1]]);
        let out = simplex(&a, &rvec(&[4, 6]), &rvec(&[-1, -1, 0, 0]));
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, Rat::new(-14, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_lp() {
        let a = QMat::from_ints(&[&[1, -1]]);
        assert_eq!(simplex(&a, &rvec(&[0]), &rvec(&[-1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn square_vertices() {
        let p = pts(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[2, 0]]);
        assert_eq!(hull_vertices(&p).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn cone_cases() {
        let g = pts(&[&[1, 0], &[0, 1]]);
        assert_eq!(cone_position(&g, &rvec(&[1, 1])).unwrap(), HullPosition::Interior);
        assert_eq!(cone_position(&g, &rvec(&[1, 0])).unwrap(), HullPosition::Boundary);
        assert_eq!(cone_position(&g, &rvec(&[-1, 1])).unwrap(), HullPosition::Outside);
        let f = cone_separator(&g, &rvec(&[-1, 1])).unwrap().unwrap();
        assert!(g.iter().all(|v| !dot(&f, v).is_negative()));
        assert_eq!(dot(&f, &rvec(&[-1, 1])), -Rat::one());
        assert!(cone_separator(&g, &rvec(&[1, 1])).unwrap().is_none());
    }
}
