//! Counter-based random streams.
//!
//! Every population and every sample of a replicated experiment gets its own
//! ChaCha8 stream addressed by `(seed, population, sample)`, so results never
//! depend on the order in which worker threads pick up cells.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved for each sample inside a population stream (2^36).
const SAMPLE_WORD_SHIFT: u32 = 36;

/// Stream used to generate population `population`.
pub fn population_stream(seed: u64, population: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(population);
    rng
}

/// Stream used to draw sample `sample` from population `population`.
///
/// Sample streams live in disjoint word ranges of the population's ChaCha
/// stream; the range starting at word zero belongs to population generation.
pub fn sample_stream(seed: u64, population: u64, sample: u64) -> ChaCha8Rng {
    assert!(sample < (1 << 31), "sample index out of range");
    let mut rng = population_stream(seed, population);
    rng.set_word_pos(u128::from(sample + 1) << SAMPLE_WORD_SHIFT);
    rng
}
