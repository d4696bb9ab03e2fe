//! Seeded random instances.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::strings::{apply_duplication, ContractionStep, Symbol, TokenString};

/// An instance obtained by duplicating an exemplar source.
#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub source: TokenString,
    pub target: TokenString,
    /// The duplications applied to `source`, in order.
    pub duplications: Vec<ContractionStep>,
}

/// Exemplar source over symbols `0..source_len`, then `dups` uniformly random
/// duplications. The number of duplications bounds the distance.
pub fn duplication_instance(rng: &mut impl Rng, source_len: usize, dups: usize) -> GeneratedInstance {
    assert!(source_len > 0, "source must be non-empty");
    let source: TokenString = (0..source_len as u32).map(Symbol).collect();
    let mut target = source.clone();
    let mut duplications = Vec::with_capacity(dups);
    for _ in 0..dups {
        let start = rng.gen_range(0..target.len());
        let half_len = rng.gen_range(1..=target.len() - start);
        let step = ContractionStep::new(start, half_len);
        target = apply_duplication(&target, step).expect("in-bounds duplication");
        duplications.push(step);
    }
    GeneratedInstance {
        source,
        target,
        duplications,
    }
}

/// Uniform string of `len` symbols over `0..alphabet`.
pub fn random_string(rng: &mut impl Rng, len: usize, alphabet: u32) -> TokenString {
    (0..len).map(|_| Symbol(rng.gen_range(0..alphabet))).collect()
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
