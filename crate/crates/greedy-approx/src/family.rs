//! Deterministic test families for estimator and suite runs.
//!
//! Every random object flows from one ChaCha stream seeded by a caller-chosen
//! integer, so a (family, seed) pair fully determines every instance that an
//! estimator will visit and every report can be replayed byte for byte.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sparse::{Index, IndexSet, SparseVector};

/// Index pools, seeded vectors, and set-size caps from which the estimators
/// enumerate their instances.
#[derive(Clone, Debug)]
pub struct Family {
    pub pool: Vec<Index>,
    pub vectors: Vec<SparseVector>,
    pub max_set_size: usize,
    /// When present, set-pair estimators test exactly these pairs instead of
    /// enumerating subsets of the pool.
    pub set_pairs: Option<Vec<(IndexSet, IndexSet)>>,
    pub seed: u64,
    pub description: String,
}

/// Probability that a pool index carries a coefficient in a seeded vector.
const FILL_PROBABILITY: f64 = 0.75;

fn seeded_vectors(pool: &[Index], count: usize, rng: &mut ChaCha8Rng) -> Vec<SparseVector> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut entries: Vec<(Index, f64)> = Vec::new();
        for n in pool {
            if rng.gen_bool(FILL_PROBABILITY) {
                entries.push((n.clone(), rng.gen_range(-1.0..=1.0)));
            }
        }
        let x = SparseVector::from_entries(entries);
        if !x.is_zero() {
            out.push(x);
        }
    }
    out
}

impl Family {
    /// Pool {1..dim} with `count` seeded vectors; coefficients lie in [−1,1].
    pub fn standard(dim: u64, count: usize, max_set_size: usize, seed: u64) -> Self {
        let pool: Vec<Index> = (1..=dim).map(Index::from_u64).collect();
        Self::on_pool(
            pool,
            count,
            max_set_size,
            seed,
            format!("dense pool 1..={dim}, {count} seeded vectors, sets ≤ {max_set_size}"),
        )
    }

    /// Pool {2^1..2^half} ∪ {3^1..3^half}: supports straddling the two
    /// magnitude classes of the two-class rearrangement norm.
    pub fn power_classes(half: u32, count: usize, max_set_size: usize, seed: u64) -> Self {
        let mut pool: IndexSet = (1..=half).map(Index::pow2).collect();
        pool.extend((1..=half).map(Index::pow3));
        Self::on_pool(
            pool.into_iter().collect(),
            count,
            max_set_size,
            seed,
            format!("powers of 2 and 3 up to exponent {half}, {count} seeded vectors, sets ≤ {max_set_size}"),
        )
    }

    pub fn on_pool(
        pool: Vec<Index>,
        count: usize,
        max_set_size: usize,
        seed: u64,
        description: String,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors = seeded_vectors(&pool, count, &mut rng);
        Family {
            pool,
            vectors,
            max_set_size,
            set_pairs: None,
            seed,
            description,
        }
    }

    /// A family that tests exactly the given set pairs.
    pub fn of_pairs(pairs: Vec<(IndexSet, IndexSet)>, seed: u64, description: String) -> Self {
        let mut pool: IndexSet = IndexSet::new();
        for (a, b) in &pairs {
            pool.extend(a.iter().cloned());
            pool.extend(b.iter().cloned());
        }
        Family {
            pool: pool.into_iter().collect(),
            vectors: Vec::new(),
            max_set_size: 0,
            set_pairs: Some(pairs),
            seed,
            description,
        }
    }

    /// Append alternating ±1 vectors of every length up to `dim`, the family
    /// that drives partial-sum and projection norms apart on non-lattice
    /// spaces.
    pub fn with_alternating(mut self, dim: u64) -> Self {
        for len in 1..=dim {
            let entries =
                (1..=len).map(|n| (Index::from_u64(n), if n % 2 == 1 { 1.0 } else { -1.0 }));
            self.vectors.push(SparseVector::from_entries(entries));
        }
        self.description
            .push_str(&format!(", plus alternating ±1 vectors up to length {dim}"));
        self
    }

    /// A fresh RNG stream for derived draws (sign sampling and the like),
    /// decoupled from the vector stream.
    pub fn derived_rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.rotate_left(17))
    }
}

/// Strictly increasing random index sequences, for harmonic-bound sampling.
/// Steps are drawn in {1..max_step}; the sequence starts at or above `start`.
pub fn seeded_increasing_sequence(
    len: usize,
    start: u64,
    max_step: u64,
    rng: &mut ChaCha8Rng,
) -> Vec<Index> {
    let mut out = Vec::with_capacity(len);
    let mut current = start + rng.gen_range(0..=max_step);
    for _ in 0..len {
        out.push(Index::from_u64(current));
        current += rng.gen_range(1..=max_step);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_deterministic() {
        let a = Family::standard(8, 20, 2, 7);
        let b = Family::standard(8, 20, 2, 7);
        assert_eq!(a.vectors, b.vectors);
        let c = Family::standard(8, 20, 2, 8);
        assert_ne!(a.vectors, c.vectors);
        assert_eq!(a.pool.len(), 8);
        assert!(a.vectors.iter().all(|x| !x.is_zero()));
        assert!(a.vectors.iter().all(|x| x.sup_norm() <= 1.0));
    }

    #[test]
    fn power_pool_straddles_both_classes() {
        let f = Family::power_classes(5, 4, 2, 0);
        assert_eq!(f.pool.len(), 10);
        assert!(f.pool.contains(&Index::pow2(5)));
        assert!(f.pool.contains(&Index::pow3(5)));
    }

    #[test]
    fn increasing_sequences_increase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seq = seeded_increasing_sequence(32, 1, 9, &mut rng);
        assert_eq!(seq.len(), 32);
        for w in seq.windows(2) {
            assert!(w[0] < w[1]);
        }
        let mut rng2 = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(seq, seeded_increasing_sequence(32, 1, 9, &mut rng2));
    }
}
