//! Fixtures shared by the criterion benches.

use toolreward_core::synth::{generate_universe, plant_corpus, ErrorMix, PlantedCorpus};

/// A corpus mixing every planted behaviour, so that benches exercise each
/// parser outcome and matching path.
pub fn mixed_corpus(n: usize) -> PlantedCorpus {
    let universe = generate_universe(11, 24, 4).expect("fixture universe");
    let mix: ErrorMix = "extraneous-text=0.1,invalid-json=0.1,wrong-name=0.1,wrong-arg-value=0.1,missing-arg=0.1,extra-call=0.1"
        .parse()
        .expect("fixture mix");
    plant_corpus(&universe, 12, n, &mix).expect("fixture corpus")
}
