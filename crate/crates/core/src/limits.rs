//! The limit map p(x) = lim_{t→0} t·x, jet truncations and the loci
//! Z_min, X⁰_min and Z_((r)).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::point::ProjPoint;
use crate::rational::Rat;
use crate::rep::RepSpace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportProfile {
    pub min_weight: i64,
    pub max_weight: i64,
    pub present_weights: BTreeSet<i64>,
}

pub fn support_profile(x: &ProjPoint, rep: &RepSpace) -> SupportProfile {
    let present_weights: BTreeSet<i64> = x.support(rep).into_iter().map(|b| rep.gm_weight(b)).collect();
    SupportProfile {
        min_weight: *present_weights.first().expect("nonzero point"),
        max_weight: *present_weights.last().expect("nonzero point"),
        present_weights,
    }
}

/// Projection onto the minimal present G_m weight space.
pub fn limit_p(x: &ProjPoint, rep: &RepSpace) -> ProjPoint {
    if let Some(factors) = x.factors() {
        let limited = factors
            .iter()
            .enumerate()
            .map(|(f, v)| {
                let lo = (0..v.len())
                    .filter(|&i| !v[i].is_zero())
                    .map(|i| rep.factor_gm_contribution(f, i))
                    .min()
                    .expect("nonzero factor");
                v.iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if rep.factor_gm_contribution(f, i) == lo {
                            c.clone()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        return ProjPoint::from_factors(limited).expect("min-weight part is nonzero");
    }
    let lo = support_profile(x, rep).min_weight;
    truncate(x, rep, lo).expect("minimal weight is present")
}

/// Projection onto weight components ≤ r; `None` when that is zero.
pub fn truncate(x: &ProjPoint, rep: &RepSpace, r: i64) -> Option<ProjPoint> {
    let prof = support_profile(x, rep);
    if r < prof.min_weight {
        return None;
    }
    if r >= prof.max_weight {
        return Some(x.clone());
    }
    let v: Vec<Rat> = x
        .embedded(rep)
        .iter()
        .enumerate()
        .map(|(b, c)| if rep.gm_weight(b) <= r { c.clone() } else { Rat::zero() })
        .collect();
    Some(ProjPoint::from_embedded_in(rep, v).expect("truncation is nonzero"))
}

pub fn in_zmin(x: &ProjPoint, rep: &RepSpace) -> bool {
    let prof = support_profile(x, rep);
    let w0 = rep.weight_ladder().min();
    prof.min_weight == w0 && prof.max_weight == w0
}

pub fn in_x0min(x: &ProjPoint, rep: &RepSpace) -> bool {
    support_profile(x, rep).min_weight == rep.weight_ladder().min()
}

pub fn in_zr(x: &ProjPoint, rep: &RepSpace, r: i64) -> bool {
    let prof = support_profile(x, rep);
    prof.min_weight == rep.weight_ladder().min() && prof.max_weight <= r
}

/// Action of a torus element given by one nonzero rational per character
/// coordinate; acts factor-wise on factored points.
pub fn act_torus(x: &ProjPoint, rep: &RepSpace, t: &[Rat]) -> Result<ProjPoint> {
    let scalar = |w: &[i64]| -> Rat {
        let mut s = Rat::one();
        for (tk, &wk) in t.iter().zip(w) {
            if wk >= 0 {
                s = s * tk.pow(wk as u32);
            } else {
                s = s * tk.recip().pow((-wk) as u32);
            }
        }
        s
    };
    if let Some(factors) = x.factors() {
        let moved = factors
            .iter()
            .enumerate()
            .map(|(f, v)| {
                v.iter()
                    .enumerate()
                    .map(|(i, c)| c * scalar(&rep.factors()[f].coord_weight(i)))
                    .collect()
            })
            .collect();
        return ProjPoint::from_factors(moved);
    }
    let v = x
        .embedded(rep)
        .iter()
        .enumerate()
        .map(|(b, c)| c * scalar(rep.weight(b)))
        .collect();
    ProjPoint::from_embedded_in(rep, v)
}

/// Action of t ∈ G_m through the grading coordinate.
pub fn act_gm(x: &ProjPoint, rep: &RepSpace, t: &Rat) -> Result<ProjPoint> {
    let mut ts = vec![Rat::one(); rep.rank()];
    ts[rep.gm_component()] = t.clone();
    act_torus(x, rep, &ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{build_rep, FactorSpec};

    fn ladder_rep() -> RepSpace {
        build_rep(&[FactorSpec::proj(vec![vec![0], vec![1], vec![2]])], 0).unwrap()
    }

    #[test]
    fn truncation_edges() {
        let rep = ladder_rep();
        let x = ProjPoint::from_ints(&[&[1, 2, 3]]);
        assert!(truncate(&x, &rep, -1).is_none());
        assert!(truncate(&x, &rep, 5).unwrap().proj_eq(&x, &rep));
        assert!(truncate(&x, &rep, 0).unwrap().proj_eq(&limit_p(&x, &rep), &rep));
        let t1 = truncate(&x, &rep, 1).unwrap();
        assert!(t1.proj_eq(&ProjPoint::from_ints(&[&[1, 2, 0]]), &rep));
    }

    #[test]
    fn loci_membership() {
        let rep = ladder_rep();
        let z = ProjPoint::from_ints(&[&[4, 0, 0]]);
        assert!(in_zmin(&z, &rep) && in_x0min(&z, &rep));
        let x = ProjPoint::from_ints(&[&[1, 0, 1]]);
        assert!(!in_zmin(&x, &rep) && in_x0min(&x, &rep));
        assert!(!in_zr(&x, &rep, 1) && in_zr(&x, &rep, 2));
        let y = ProjPoint::from_ints(&[&[0, 1, 1]]);
        assert!(!in_x0min(&y, &rep));
    }

    #[test]
    fn limit_is_idempotent_and_gm_invariant() {
        let rep = ladder_rep();
        let x = ProjPoint::from_ints(&[&[3, -1, 7]]);
        let p = limit_p(&x, &rep);
        assert!(limit_p(&p, &rep).proj_eq(&p, &rep));
        let tx = act_gm(&x, &rep, &Rat::new(2, 3)).unwrap();
        assert!(limit_p(&tx, &rep).proj_eq(&p, &rep));
    }
}
