//! Seeded random rationals and points.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::point::ProjPoint;
use crate::rational::Rat;
use crate::rep::RepSpace;

/// Numerators and denominators are drawn from [−BOUND, BOUND].
pub const BOUND: i64 = 20;

pub const DEFAULT_SAMPLES: usize = 64;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derived stream, so that independent audits do not share draws.
    pub fn fork(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn u64(&mut self) -> u64 {
        self.rng.gen()
    }

    pub fn rat(&mut self) -> Rat {
        let num = self.int(-BOUND, BOUND);
        let mut den = 0;
        while den == 0 {
            den = self.int(-BOUND, BOUND);
        }
        Rat::new(num, den)
    }

    pub fn nonzero_rat(&mut self) -> Rat {
        loop {
            let r = self.rat();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn vector(&mut self, n: usize) -> Vec<Rat> {
        (0..n).map(|_| self.rat()).collect()
    }

    /// All entries nonzero.
    pub fn generic_vector(&mut self, n: usize) -> Vec<Rat> {
        (0..n).map(|_| self.nonzero_rat()).collect()
    }

    /// Random combination of `basis` with nonzero coefficients; `None` if
    /// the basis is empty.
    pub fn combination(&mut self, basis: &[Vec<Rat>]) -> Option<Vec<Rat>> {
        let n = basis.first()?.len();
        loop {
            let mut v = vec![Rat::zero(); n];
            for b in basis {
                let c = self.nonzero_rat();
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &c * y;
                }
            }
            if v.iter().any(|x| !x.is_zero()) {
                return Some(v);
            }
        }
    }

    /// A point with every coordinate of every factor nonzero.
    pub fn generic_point(&mut self, rep: &RepSpace) -> ProjPoint {
        let f = rep.factors().iter().map(|s| self.generic_vector(s.ncoords())).collect();
        ProjPoint::from_factors(f).expect("nonzero entries")
    }

    /// A point whose factor coordinates vanish independently with
    /// probability about 1/3, so that special strata get hit too.
    pub fn sparse_point(&mut self, rep: &RepSpace) -> ProjPoint {
        let f = rep
            .factors()
            .iter()
            .map(|s| loop {
                let v: Vec<Rat> = (0..s.ncoords())
                    .map(|_| if self.int(0, 2) == 0 { Rat::zero() } else { self.nonzero_rat() })
                    .collect();
                if v.iter().any(|x| !x.is_zero()) {
                    break v;
                }
            })
            .collect();
        ProjPoint::from_factors(f).expect("nonzero factors")
    }

    /// Generic point of the ω_0 weight space: Z_min is the product of the
    /// per-factor minimal-weight coordinate spans.
    pub fn zmin_point(&mut self, rep: &RepSpace) -> ProjPoint {
        let f = (0..rep.factors().len())
            .map(|fi| {
                let n = rep.factors()[fi].ncoords();
                let lo = (0..n).map(|i| rep.factor_gm_contribution(fi, i)).min().expect("nonempty");
                (0..n)
                    .map(|i| {
                        if rep.factor_gm_contribution(fi, i) == lo {
                            self.nonzero_rat()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        ProjPoint::from_factors(f).expect("nonzero minimal part")
    }
}
