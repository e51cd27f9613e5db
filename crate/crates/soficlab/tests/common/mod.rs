#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soficlab::rational::rat;
use soficlab::{
    build_sft, Alphabet, BlockCode, MarkovMeasure, Matrix, Model, Rational, SftSpace,
    StochasticMatrix,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

pub fn load(name: &str) -> Model {
    Model::load(fixture(name)).unwrap()
}

pub const FIXTURES: [&str; 7] = [
    "figblack1_2",
    "figblack1_3",
    "shin",
    "walters",
    "exliftone",
    "ex_nosofics",
    "semigroup_wps",
];

/// A random 1-step chain on an irreducible SFT with a surjective 1-block code.
pub struct Instance {
    pub x: SftSpace,
    pub code: BlockCode,
    pub mu: MarkovMeasure,
}

pub fn random_adjacency(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        adj[i][(i + 1) % n] = true;
        for j in 0..n {
            if rng.gen_bool(density) {
                adj[i][j] = true;
            }
        }
    }
    adj
}

pub fn random_stochastic(rng: &mut ChaCha8Rng, adj: &[Vec<bool>]) -> StochasticMatrix {
    let n = adj.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let w: Vec<i64> = (0..n)
            .map(|j| if adj[i][j] { rng.gen_range(1..=4) } else { 0 })
            .collect();
        let total: i64 = w.iter().sum();
        for j in 0..n {
            m.set(i, j, rat(w[j], total));
        }
    }
    StochasticMatrix::new(m).unwrap()
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let m = rng.gen_range(2..=n.min(3));
    let adj = random_adjacency(&mut rng, n, 0.4);
    let x = build_sft(Alphabet::numbered(n), adj.clone()).unwrap();
    let map: Vec<usize> = (0..n)
        .map(|i| if i < m { i } else { rng.gen_range(0..m) })
        .collect();
    let names = ["a", "b", "c"][..m].to_vec();
    let code = BlockCode::one_block(&x, Alphabet::new(names).unwrap(), map).unwrap();
    let p = random_stochastic(&mut rng, &adj);
    let mu = MarkovMeasure::new(x.clone(), 1, p).unwrap();
    Instance { x, code, mu }
}

/// A random irreducible nonnegative rational matrix.
pub fn random_irreducible(seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let adj = random_adjacency(&mut rng, n, 0.5);
    Matrix::from_fn(n, n, |i, j| {
        if adj[i][j] {
            rat(rng_entry(seed, i, j), 4)
        } else {
            Rational::from_integer(0.into())
        }
    })
}

fn rng_entry(seed: u64, i: usize, j: usize) -> i64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64) << 32) ^ (j as u64 + 1));
    rng.gen_range(1..=12)
}
