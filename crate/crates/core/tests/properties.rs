use encbound::bitcodes::{bernoulli_codeword_length, shannon_fano_build, BitString, FiniteDensity, KraftFamily};
use encbound::bounds::{
    bst_height_constant_check, chernoff_basic, chernoff_kl, linear_probing_threshold, moser_tail, ramsey_threshold,
    runs_threshold, urns_threshold,
};
use encbound::entropy::{
    binary_entropy, entropy_bound_near_half, entropy_bound_near_zero, kl_divergence, log_binomial,
};
use encbound::experiments::{gen_bounded_overlap_cnf, moser_solve, LinearProbingTable, RngSpec};
use encbound::ledger::{compose, nonuniform_tail, random_partial_code, uniform_tail, Component, LengthFunction};
use encbound::witnesses::{domain, CliqueCodec, InsSortCodec, RunsCodec, UrnsCodec, VertexEncoding, WitnessCodec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn component() -> impl Strategy<Value = Component> {
    prop_oneof![
        (0u32..20).prop_map(|b| Component::Uniform { label: "u".into(), log2_size: b as f64 }),
        (1u128..5000).prop_map(|d| Component::FixedWidth { label: "f".into(), domain_size: d }),
        prop_oneof![Just(KraftFamily::Unary), Just(KraftFamily::EliasGamma), Just(KraftFamily::EliasDelta)]
            .prop_map(|family| Component::Integer { label: "i".into(), family }),
    ]
}

fn length_function() -> impl Strategy<Value = LengthFunction> {
    proptest::collection::vec(component(), 0..4).prop_map(LengthFunction::new)
}

proptest! {
    #[test]
    fn entropy_bounds(a in 1e-9f64..1.0 - 1e-9, e in 1e-9f64..1.0 - 1e-9) {
        prop_assert!(binary_entropy(a).unwrap() <= entropy_bound_near_zero(a).unwrap() + 1e-12);
        prop_assert!(binary_entropy((1.0 + e) / 2.0).unwrap() < entropy_bound_near_half(e).unwrap());
    }

    #[test]
    fn kl_is_nonnegative(p in 0.0f64..=1.0, q in 1e-6f64..1.0 - 1e-6) {
        let d = kl_divergence(p, q).unwrap();
        prop_assert!(d >= -1e-12);
        prop_assert!(kl_divergence(q, q).unwrap().abs() <= 1e-12);
        if (p - q).abs() > 1e-3 {
            prop_assert!(d > 1e-12);
        }
    }

    #[test]
    fn log_binomial_below_entropy(n in 2u64..=200, k_frac in 0.0f64..1.0) {
        let k = 1 + ((n - 1) as f64 * k_frac) as u64;
        prop_assume!(k < n);
        prop_assert!(log_binomial(n, k) <= n as f64 * binary_entropy(k as f64 / n as f64).unwrap() + 1e-9);
    }

    #[test]
    fn compose_associates_and_multiplies(a in length_function(), b in length_function(), c in length_function()) {
        let left = compose(&compose(&a, &b), &c);
        let right = compose(&a, &compose(&b, &c));
        prop_assert_eq!(&left, &right);
        let product = a.kraft_sum().exact.unwrap() * b.kraft_sum().exact.unwrap() * c.kraft_sum().exact.unwrap();
        prop_assert_eq!(left.kraft_sum().exact.unwrap(), product);
    }

    #[test]
    fn uniform_and_nonuniform_tails_agree(log_x in 0.0f64..100.0, len in 0.0f64..120.0) {
        let (u, n) = (uniform_tail(log_x, len).unwrap(), nonuniform_tail(log_x, len).unwrap());
        prop_assert_eq!(u.probability, n.probability);
        prop_assert_eq!(u.savings, n.savings);
    }

    #[test]
    fn short_codewords_are_scarce(seed: u64, universe in 1usize..400) {
        let table = random_partial_code(&mut ChaCha8Rng::seed_from_u64(seed), universe);
        for k in 0..=12 {
            prop_assert!(table.count_at_most(k) <= 1 << k);
        }
    }

    #[test]
    fn shannon_fano_lengths(weights in proptest::collection::vec(1u32..10_000, 1..60)) {
        let total: f64 = weights.iter().map(|&w| w as f64).sum();
        let density = FiniteDensity::new(weights.iter().map(|&w| w as f64 / total).collect()).unwrap();
        let table = shannon_fano_build(&density).unwrap();
        prop_assert!(table.kraft_sum() <= 1.0 + 1e-12);
        for x in 0..density.len() {
            prop_assert_eq!(table.length(x), (1.0 / density.mass(x)).log2().ceil());
        }
    }

    #[test]
    fn bernoulli_length_is_entropy(bits in proptest::collection::vec(any::<bool>(), 2..300)) {
        let x = BitString::from_bits(bits.iter().copied());
        let (k, n) = (x.count_ones(), x.len());
        prop_assume!(k > 0 && k < n);
        let alpha = k as f64 / n as f64;
        let len = bernoulli_codeword_length(&x, alpha).unwrap();
        prop_assert!((len - n as f64 * binary_entropy(alpha).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn runs_codec_roundtrips(n in 1usize..300, t_frac in 0.0f64..=1.0, seed: u64) {
        let t = (n as f64 * t_frac / 4.0) as usize;
        let codec = RunsCodec::new(n, t).unwrap();
        let mut x = domain::random_bit_string(n, &mut ChaCha8Rng::seed_from_u64(seed));
        // Plant a run so the input is always a witness.
        let at = (seed as usize) % (n - t + 1);
        let mut bits: Vec<bool> = x.iter().collect();
        bits[at..at + t].iter_mut().for_each(|b| *b = true);
        x = BitString::from_bits(bits);
        let c = codec.encode(&x).unwrap();
        prop_assert_eq!(c.len(), codec.codeword_len());
        prop_assert_eq!(codec.decode(&c).unwrap(), x);
    }

    #[test]
    fn urns_codec_roundtrips(n in 2usize..64, seed: u64) {
        let b = domain::random_urn_assignment(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut load = vec![0usize; n];
        b.iter().for_each(|&u| load[u] += 1);
        let t = *load.iter().max().unwrap();
        let codec = UrnsCodec::new(n, t).unwrap();
        let c = codec.encode(&b).unwrap();
        prop_assert_eq!(c.len(), codec.codeword_len());
        prop_assert_eq!(codec.decode(&c).unwrap(), b);
    }

    #[test]
    fn clique_codec_roundtrips(n in 2usize..16, t_frac in 0.0f64..=1.0, rank: bool, seed: u64) {
        let t = 1 + ((n - 1) as f64 * t_frac / 3.0) as usize;
        let enc = if rank { VertexEncoding::SubsetRank } else { VertexEncoding::Indices };
        let codec = CliqueCodec::new(n, t, enc).unwrap();
        let g = domain::random_graph(n, 0.5, &mut ChaCha8Rng::seed_from_u64(seed));
        if let Ok(c) = codec.encode(&g) {
            prop_assert_eq!(c.len(), codec.codeword_len());
            prop_assert_eq!(codec.decode(&c).unwrap(), g);
        }
    }

    #[test]
    fn inssort_codec_roundtrips(n in 1usize..=26, seed: u64) {
        let codec = InsSortCodec::new(n).unwrap();
        let sigma = domain::random_permutation(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = encbound::witnesses::inversion_profile(&sigma).unwrap().total();
        let c = codec.encode(&sigma).unwrap();
        prop_assert_eq!(c.len(), codec.codeword_len(m));
        prop_assert_eq!(codec.decode(&c).unwrap(), sigma);
    }

    #[test]
    fn thresholds_grow_with_savings(n in 3u64..1_000_000, s in 0.0f64..60.0, ds in 0.0f64..20.0) {
        let t = |b: encbound::ledger::TailBound| b.threshold.unwrap();
        prop_assert!(t(runs_threshold(n, s).unwrap()) <= t(runs_threshold(n, s + ds).unwrap()));
        prop_assert!(t(ramsey_threshold(n, s).unwrap()) <= t(ramsey_threshold(n, s + ds).unwrap()));
        prop_assert!(t(urns_threshold(n, s).unwrap()) <= t(urns_threshold(n, s + ds).unwrap()));
        prop_assert!(t(moser_tail(n % 500 + 1, s).unwrap()) <= t(moser_tail(n % 500 + 1, s + ds).unwrap()));
        let c = 3.0 + (n % 20) as f64;
        prop_assert!(t(linear_probing_threshold(c, s).unwrap()) <= t(linear_probing_threshold(c, s + ds).unwrap()));
        prop_assert_eq!(runs_threshold(n, s).unwrap().probability, (-s).exp2());
    }

    #[test]
    fn bounds_are_probabilities(s in -50.0f64..50.0) {
        let b = encbound::ledger::TailBound::from_savings("x", s);
        prop_assert!((0.0..=1.0).contains(&b.probability));
        prop_assert_eq!(b.clamped, s < 0.0);
    }

    #[test]
    fn kl_dominates_basic_at_half(n in 1u64..10_000, eps in 0.0f64..=1.0) {
        let kl = chernoff_kl(n, 0.5, eps / 2.0).unwrap().probability;
        let basic = chernoff_basic(n, eps).unwrap().probability;
        prop_assert!(kl <= basic * (1.0 + 1e-12));
    }

    #[test]
    fn bst_check_is_monotone(c in 4.82f64..30.0, dc in 0.0f64..5.0) {
        prop_assert!(bst_height_constant_check(c).unwrap().0 <= bst_height_constant_check(c + dc).unwrap().0 + 1e-12);
    }

    #[test]
    fn linear_probing_finds_every_key(n in 1usize..300, c in 1.0f64..6.0, seed: u64) {
        let m = (c * n as f64).ceil() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hash: Vec<u32> = (0..n).map(|_| rng.gen_range(0..m as u32)).collect();
        let table = LinearProbingTable::build(m, hash).unwrap();
        for x in 0..n {
            prop_assert!(table.search(x).is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moser_assignments_satisfy(k in 4usize..9, m in 1usize..60, seed: u64) {
        let r = (1usize << (k - 3)) - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = gen_bounded_overlap_cnf(k, m, r.min(2 * k), &mut rng).unwrap();
        let run = moser_solve(&phi, &mut rng).unwrap();
        prop_assert!(phi.evaluate(&run.assignment));
    }

    #[test]
    fn simulators_replay(seed: u64) {
        let p = |kv: &[(&str, f64)]| kv.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for (id, kv) in [("urns", p(&[("n", 50.0)])), ("ramsey", p(&[("n", 8.0)])), ("percolation", p(&[("side", 4.0)]))] {
            let a = encbound::experiments::run_experiment(id, &kv, Some(30), seed).unwrap();
            let b = encbound::experiments::run_experiment(id, &kv, Some(30), seed).unwrap();
            prop_assert_eq!(encbound::experiments::to_json(&a).replace(&format!("\"wall_ms\":{}", a.wall_ms), ""),
                            encbound::experiments::to_json(&b).replace(&format!("\"wall_ms\":{}", b.wall_ms), ""));
        }
        let rng = RngSpec::new(seed);
        prop_assert_eq!(rng.stream(3).gen::<u64>(), RngSpec::new(seed).stream(3).gen::<u64>());
    }
}
