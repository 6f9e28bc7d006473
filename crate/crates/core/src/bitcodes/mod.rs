//! Bit strings, prefix-free integer codes, code tables and combinatorial ranks.

mod bitstring;
mod integer;
mod rank;
mod table;

pub use bitstring::{BitReader, BitString, PackedBits};
pub use integer::{
    bitlen, fixed_decode, fixed_encode, fixed_encode_into, fixed_width, EliasDelta, EliasGamma, EliasOmega,
    IntegerCode, Unary, UniversalCode,
};
pub use rank::{binomial, composition_count, composition_rank, composition_unrank, subset_rank, subset_unrank};
pub use table::{
    bernoulli_codeword_length, kraft_sum, shannon_fano_build, CodeTable, FiniteDensity, KraftFamily, MASS_TOLERANCE,
};
