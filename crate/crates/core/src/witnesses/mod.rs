//! Encoder/decoder pairs whose domain is a bad event. A codec that roundtrips
//! on its whole domain is injective there, which is the counting step every
//! encoding argument rests on.

mod clique;
pub mod domain;
mod inssort;
mod runs;
mod urns;

pub use clique::{find_clique_or_independent_set, CliqueCodec, Graph, VertexEncoding, MAX_FINDER_VERTICES};
pub use inssort::{
    insertion_sort_profile, insertion_sort_reconstruct, inversion_profile, InsSortCodec, Permutation, SwapProfile,
};
pub use runs::{first_run, RunsCodec};
pub use urns::{UrnsCodec, UrnsWitness};

use crate::bitcodes::BitString;
use crate::error::Result;

pub trait WitnessCodec {
    type Input: PartialEq;

    fn encode(&self, x: &Self::Input) -> Result<BitString>;

    fn decode(&self, codeword: &BitString) -> Result<Self::Input>;
}

/// Outcome of pushing a set of inputs through `encode` then `decode`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Roundtrip {
    /// Inputs that had a witness and were encoded.
    pub domain: u64,
    /// Inputs skipped because they are outside the bad event.
    pub skipped: u64,
    pub failures: u64,
    /// Distinct codewords produced; equals `domain` when the code is injective.
    pub distinct: u64,
}

/// Roundtrips every input, counting inputs without a witness separately.
pub fn roundtrip<C, I>(codec: &C, inputs: I) -> Roundtrip
where
    C: WitnessCodec,
    I: IntoIterator<Item = C::Input>,
{
    let mut report = Roundtrip::default();
    let mut seen = std::collections::HashSet::new();
    for x in inputs {
        match codec.encode(&x) {
            Err(crate::Error::NoWitness(_)) => report.skipped += 1,
            Err(_) => {
                report.domain += 1;
                report.failures += 1;
            }
            Ok(c) => {
                report.domain += 1;
                if codec.decode(&c).ok().as_ref() != Some(&x) {
                    report.failures += 1;
                }
                seen.insert(c);
            }
        }
    }
    report.distinct = seen.len() as u64;
    report
}
