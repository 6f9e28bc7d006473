use std::collections::BTreeMap;

use encbound::bitcodes::{BitString, IntegerCode};
use encbound::experiments::RngSpec;
use encbound::witnesses::{
    domain, roundtrip, CliqueCodec, Graph, InsSortCodec, Roundtrip, RunsCodec, UrnsCodec, VertexEncoding, WitnessCodec,
    MAX_FINDER_VERTICES,
};
use encbound::{Error, Result};
use serde_json::{json, Value};

pub const CODECS: [(&str, &str); 8] = [
    ("unary", "unary integer code; exhaustive over [0, max]"),
    ("elias-gamma", "Elias gamma; exhaustive over [1, max]"),
    ("elias-delta", "Elias delta; exhaustive over [1, max]"),
    ("elias-omega", "Elias omega; exhaustive over [1, max]"),
    ("runs", "n-bit strings with a run of t ones (n, t); exhaustive n <= 24"),
    ("urns", "n balls in n urns, some urn with t balls (n, t); exhaustive n <= 7"),
    ("clique", "graphs with a t-clique or t-independent set (n, t, encoding); exhaustive n <= 7"),
    ("inssort", "permutations by insertion sort swaps (n); exhaustive n <= 9"),
];

pub const MODES: [&str; 4] = ["roundtrip-exhaustive", "roundtrip-random", "encode", "decode"];

pub const DEFAULT_MAX: u64 = 65_536;
const MAX_EXHAUSTIVE_INTEGER: u64 = 1 << 24;
const MAX_RANDOM_UNARY: u64 = 1 << 16;

/// Parsed `k=v` codec parameters.
pub struct CodecParams(BTreeMap<String, String>);

impl CodecParams {
    pub fn new(map: BTreeMap<String, String>) -> Self {
        CodecParams(map)
    }

    fn check_known(&self, id: &str, known: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Error::arg(
                "params",
                format!("codec `{id}` takes no parameter `{k}` (known: {})", known.join(", ")),
            )),
            None => Ok(()),
        }
    }

    fn uint(&self, name: &'static str, default: Option<u64>) -> Result<u64> {
        match self.0.get(name) {
            Some(v) => v.parse().map_err(|_| Error::arg(name, format!("`{v}` is not a non-negative integer"))),
            None => default.ok_or_else(|| Error::arg(name, "is required")),
        }
    }

    fn encoding(&self) -> Result<VertexEncoding> {
        match self.0.get("encoding").map(String::as_str) {
            None | Some("indices") => Ok(VertexEncoding::Indices),
            Some("subset-rank") => Ok(VertexEncoding::SubsetRank),
            Some(other) => Err(Error::arg("encoding", format!("`{other}` is not indices or subset-rank"))),
        }
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

fn cap(name: &str, value: u64, limit: u64, what: &str) -> Result<()> {
    if value > limit {
        return Err(Error::range(value, format!("{name} <= {limit} for {what}")));
    }
    Ok(())
}

/// A witness codec chosen at runtime, with its parameters checked.
enum Codec {
    Integer(IntegerCode),
    Runs(RunsCodec, usize),
    Urns(UrnsCodec, usize),
    Clique(CliqueCodec, usize),
    InsSort(InsSortCodec, usize),
}

impl Codec {
    fn new(id: &str, p: &CodecParams, mode: &str) -> Result<Self> {
        if let Some(code) = IntegerCode::from_name(id) {
            let known: &[&str] = match mode {
                "roundtrip-exhaustive" | "roundtrip-random" => &["max"],
                _ => &[],
            };
            p.check_known(id, known)?;
            return Ok(Codec::Integer(code));
        }
        let n = |p: &CodecParams| p.uint("n", None).map(|n| n as usize);
        match id {
            "runs" => {
                p.check_known(id, &["n", "t"])?;
                Ok(Codec::Runs(RunsCodec::new(n(p)?, p.uint("t", None)? as usize)?, n(p)?))
            }
            "urns" => {
                p.check_known(id, &["n", "t"])?;
                Ok(Codec::Urns(UrnsCodec::new(n(p)?, p.uint("t", None)? as usize)?, n(p)?))
            }
            "clique" => {
                p.check_known(id, &["n", "t", "encoding"])?;
                cap("n", n(p)? as u64, MAX_FINDER_VERTICES as u64, "the clique finder")?;
                Ok(Codec::Clique(CliqueCodec::new(n(p)?, p.uint("t", None)? as usize, p.encoding()?)?, n(p)?))
            }
            "inssort" => {
                p.check_known(id, &["n"])?;
                Ok(Codec::InsSort(InsSortCodec::new(n(p)?)?, n(p)?))
            }
            _ => {
                let ids: Vec<_> = CODECS.iter().map(|c| c.0).collect();
                Err(Error::arg("codec", format!("unknown id `{id}` (valid: {})", ids.join(", "))))
            }
        }
    }
}

/// Roundtrip counts for integer codes, where every value is in the domain.
fn integer_roundtrip(code: IntegerCode, values: impl Iterator<Item = u64>) -> Result<Roundtrip> {
    let mut rt = Roundtrip::default();
    let mut seen = std::collections::HashSet::new();
    for v in values {
        rt.domain += 1;
        let c = code.encode(v)?;
        if code.decode_exact(&c).ok() != Some(v) {
            rt.failures += 1;
        }
        seen.insert(c);
    }
    rt.distinct = seen.len() as u64;
    Ok(rt)
}

pub fn roundtrip_exhaustive(id: &str, p: &CodecParams) -> Result<Roundtrip> {
    match Codec::new(id, p, "roundtrip-exhaustive")? {
        Codec::Integer(code) => {
            let max = p.uint("max", Some(DEFAULT_MAX))?;
            cap("max", max, MAX_EXHAUSTIVE_INTEGER, "exhaustive mode")?;
            integer_roundtrip(code, code.min_value()..=max)
        }
        Codec::Runs(c, n) => {
            cap("n", n as u64, 24, "exhaustive mode")?;
            Ok(roundtrip(&c, domain::bit_strings(n)))
        }
        Codec::Urns(c, n) => {
            cap("n", n as u64, 7, "exhaustive mode")?;
            Ok(roundtrip(&c, domain::urn_assignments(n)))
        }
        Codec::Clique(c, n) => {
            cap("n", n as u64, 7, "exhaustive mode")?;
            Ok(roundtrip(&c, domain::graphs(n)))
        }
        Codec::InsSort(c, n) => {
            cap("n", n as u64, 9, "exhaustive mode")?;
            Ok(roundtrip(&c, domain::permutations(n)))
        }
    }
}

pub fn roundtrip_random(id: &str, p: &CodecParams, trials: u64, seed: u64) -> Result<Roundtrip> {
    let rng = RngSpec::new(seed);
    let streams = (0..trials).map(|i| rng.stream(i));
    match Codec::new(id, p, "roundtrip-random")? {
        Codec::Integer(code) => {
            let default = if code == IntegerCode::Unary { MAX_RANDOM_UNARY } else { u64::MAX };
            let max = p.uint("max", Some(default))?;
            if code == IntegerCode::Unary {
                cap("max", max, MAX_RANDOM_UNARY, "unary")?;
            }
            let lo = code.min_value();
            if max < lo {
                return Err(Error::range(max, format!(">= {lo}")));
            }
            // Draw a bit length first so small and large values both show up.
            let top = 64 - max.leading_zeros();
            integer_roundtrip(
                code,
                streams.map(|mut g| {
                    use rand::Rng;
                    let b = g.gen_range(1..=top.max(1));
                    let hi = if b >= 64 { u64::MAX } else { (1u64 << b) - 1 };
                    g.gen_range(lo..=hi.min(max))
                }),
            )
        }
        Codec::Runs(c, n) => Ok(roundtrip(&c, streams.map(|mut g| domain::random_bit_string(n, &mut g)))),
        Codec::Urns(c, n) => Ok(roundtrip(&c, streams.map(|mut g| domain::random_urn_assignment(n, &mut g)))),
        Codec::Clique(c, n) => Ok(roundtrip(&c, streams.map(|mut g| domain::random_graph(n, 0.5, &mut g)))),
        Codec::InsSort(c, n) => Ok(roundtrip(&c, streams.map(|mut g| domain::random_permutation(n, &mut g)))),
    }
}

fn parse_list(input: &str) -> Result<Vec<u64>> {
    input
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::arg("input", format!("`{s}` is not a non-negative integer"))))
        .collect()
}

fn parse_bits(input: &str) -> Result<BitString> {
    input.trim().parse()
}

fn join(values: impl IntoIterator<Item = impl ToString>, sep: &str) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep)
}

/// Encodes one input, written as the decoder prints it: integers (a
/// concatenated stream when several are given), a bit string for runs and
/// clique (upper triangle, row-major), a comma list for urns and inssort.
pub fn encode(id: &str, p: &CodecParams, input: &str) -> Result<BitString> {
    match Codec::new(id, p, "encode")? {
        Codec::Integer(code) => {
            let values = parse_list(input)?;
            if values.is_empty() {
                return Err(Error::arg("input", "no values to encode"));
            }
            code.encode_stream(&values)
        }
        Codec::Runs(c, _) => c.encode(&parse_bits(input)?),
        Codec::Urns(c, _) => c.encode(&parse_list(input)?.into_iter().map(|u| u as usize).collect()),
        Codec::Clique(c, n) => c.encode(&Graph::from_upper_bits(n, &parse_bits(input)?)?),
        Codec::InsSort(c, _) => {
            let sigma = parse_list(input)?
                .into_iter()
                .map(|v| u32::try_from(v).map_err(|_| Error::range(v, "< 2^32")))
                .collect::<Result<Vec<u32>>>()?;
            c.encode(&sigma)
        }
    }
}

pub fn decode(id: &str, p: &CodecParams, bits: &BitString) -> Result<String> {
    match Codec::new(id, p, "decode")? {
        Codec::Integer(code) => Ok(join(code.decode_stream(bits)?, " ")),
        Codec::Runs(c, _) => Ok(c.decode(bits)?.to_string()),
        Codec::Urns(c, _) => Ok(join(c.decode(bits)?, ",")),
        Codec::Clique(c, _) => Ok(c.decode(bits)?.upper_bits().to_string()),
        Codec::InsSort(c, _) => Ok(join(c.decode(bits)?, ",")),
    }
}
