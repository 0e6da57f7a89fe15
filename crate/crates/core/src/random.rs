//! Seeded random instances.
//!
//! Streams come from ChaCha8 seeded with a 64-bit value, so they are the
//! same on every platform. Trial `i` of a run with master seed `s` draws from
//! its own stream seeded with [`trial_seed`]`(s, i)`; results therefore do
//! not depend on how trials are scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{Lattice, Subspace};
use crate::matrix::Matrix;
use crate::relation::Relation;
use crate::scalar::{PadicContext, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub p: u64,
    pub n: usize,
    /// Exponent bound `B`: diagonal exponents are drawn from `[-B, B]`.
    pub bound: u32,
    pub trials: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            seed: 0,
            p: 2,
            n: 2,
            bound: 3,
            trials: 100,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index)
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, index))
}

fn int(x: u64) -> Scalar {
    Scalar::from_int(x as i64)
}

/// A random matrix invertible over `O_p`: permutation · unit diagonal ·
/// upper unitriangular · lower unitriangular, entries below `p^B`.
pub fn random_unimodular<R: Rng>(ctx: &PadicContext, n: usize, bound: u32, rng: &mut R) -> Matrix {
    let p = ctx.p();
    let top = p.pow(bound);

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pm = Matrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        pm[(i, j)] = Scalar::one();
    }

    let units: Vec<Scalar> = (0..n)
        .map(|_| loop {
            let u = rng.gen_range(1..=top);
            if u % p != 0 {
                break int(u);
            }
        })
        .collect();
    let dm = Matrix::diagonal(units);

    let mut upper = Matrix::identity(n);
    let mut lower = Matrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            upper[(i, j)] = int(rng.gen_range(0..top));
            lower[(j, i)] = int(rng.gen_range(0..top));
        }
    }
    &(&(&pm * &dm) * &upper) * &lower
}

/// `U₁ · diag(p^d_i) · U₂` with `d_i` uniform in `[-B, B]`.
pub fn random_invertible<R: Rng>(ctx: &PadicContext, n: usize, bound: u32, rng: &mut R) -> Matrix {
    let b = bound as i64;
    let u1 = random_unimodular(ctx, n, bound, rng);
    let d = Matrix::diagonal((0..n).map(|_| ctx.power(rng.gen_range(-b..=b))).collect());
    let u2 = random_unimodular(ctx, n, bound, rng);
    &(&u1 * &d) * &u2
}

pub fn random_lattice<R: Rng>(ctx: &PadicContext, n: usize, bound: u32, rng: &mut R) -> Lattice {
    Lattice::from_generator_matrix(*ctx, &random_invertible(ctx, n, bound, rng)).expect("invertible")
}

pub fn random_relation<R: Rng>(ctx: &PadicContext, n: usize, bound: u32, rng: &mut R) -> Relation {
    Relation::new(random_lattice(ctx, 2 * n, bound, rng)).expect("even dimension")
}

/// A random `j`-dimensional subspace spanned by small integer vectors
/// scaled by random powers of `p`.
pub fn random_subspace<R: Rng>(ctx: &PadicContext, n: usize, j: usize, rng: &mut R) -> Subspace {
    loop {
        let cols: Vec<Vec<Scalar>> = (0..j)
            .map(|_| {
                let shift = ctx.power(rng.gen_range(-2..=2));
                (0..n)
                    .map(|_| &Scalar::from_int(rng.gen_range(-4..=4)) * &shift)
                    .collect()
            })
            .collect();
        if let Ok(w) = Subspace::from_vectors(n, &cols) {
            return w;
        }
    }
}

/// A random nonzero vector with entries `c / p^s`.
pub fn random_vector<R: Rng>(ctx: &PadicContext, n: usize, rng: &mut R) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..n)
            .map(|_| &Scalar::from_int(rng.gen_range(-20..=20)) * &ctx.power(rng.gen_range(-3..=3)))
            .collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvr::is_unimodular;

    #[test]
    fn zero_bound_gives_the_standard_lattice() {
        let ctx = PadicContext::new(3).unwrap();
        for i in 0..20 {
            let mut rng = trial_rng(11, i);
            assert_eq!(random_lattice(&ctx, 3, 0, &mut rng), Lattice::standard(ctx, 3));
            assert_eq!(random_relation(&ctx, 2, 0, &mut rng), Relation::standard(ctx, 2));
        }
    }

    #[test]
    fn streams_are_deterministic() {
        let ctx = PadicContext::new(2).unwrap();
        let a = random_lattice(&ctx, 3, 3, &mut trial_rng(7, 4));
        let b = random_lattice(&ctx, 3, 3, &mut trial_rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(trial_seed(7, 4), trial_seed(7, 5));
        assert_ne!(trial_seed(7, 4), trial_seed(8, 4));
    }

    #[test]
    fn fixed_seed_golden() {
        // pins the stream: a change here means recorded seeds no longer replay
        assert_eq!(trial_seed(0, 0), 12_035_550_249_420_947_055);
    }

    #[test]
    fn unimodular_and_window() {
        let ctx = PadicContext::new(5).unwrap();
        for i in 0..20 {
            let mut rng = trial_rng(3, i);
            assert!(is_unimodular(&ctx, &random_unimodular(&ctx, 4, 2, &mut rng)));
            let l = random_lattice(&ctx, 3, 2, &mut rng);
            assert!(l.window_radius() <= 2);
            assert_eq!(l.dual().dual(), l);
            assert!(random_relation(&ctx, 2, 2, &mut rng).sandwich_holds());
        }
    }
}
