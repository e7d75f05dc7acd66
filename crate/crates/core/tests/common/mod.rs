#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semired::dvr_linalg::random_scalar;
use semired::lattice_model::KRep;
use semired::quiver::{Quiver, Representation};
use semired::{Backend, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn backends() -> Vec<Backend> {
    vec![
        Backend::p_adic(2).unwrap(),
        Backend::p_adic(3).unwrap(),
        Backend::p_adic(5).unwrap(),
        Backend::t_adic(2).unwrap(),
        Backend::t_adic(3).unwrap(),
    ]
}

pub fn backend(rng: &mut ChaCha8Rng) -> Backend {
    let all = backends();
    all[rng.gen_range(0..all.len())]
}

pub fn quiver(rng: &mut ChaCha8Rng) -> Quiver {
    match rng.gen_range(0..3) {
        0 => Quiver::kronecker(),
        1 => Quiver::a2(),
        _ => Quiver::loop_with_tail(),
    }
}

/// A random representation with integral arrows of small dimension.
pub fn rep(rng: &mut ChaCha8Rng, b: &Backend, max_dim: usize) -> KRep {
    let q = quiver(rng);
    let dims: Vec<usize> = (0..q.vertices()).map(|_| rng.gen_range(1..=max_dim)).collect();
    let maps = q
        .arrows()
        .iter()
        .map(|&(s, t)| Matrix::from_fn(dims[t], dims[s], |_, _| random_scalar(b, rng, 0, 2, 0.3)))
        .collect();
    Representation::new(*b, q, dims, maps).unwrap()
}
