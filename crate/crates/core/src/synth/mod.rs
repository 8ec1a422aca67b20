//! Synthetic tool universes and planted-error corpora.

mod planted;
mod universe;

pub use planted::{plant_corpus, ErrorMix, ErrorTag, PlantedCorpus, PlantedRecord};
pub use universe::{
    generate_universe, generate_universe_with, CallTemplate, QueryTemplate, SynthUniverse, UniverseOptions,
};
