mod common;

use std::collections::BTreeSet;

use cocite::ingest::{
    self, filter_corpus, normalize_field, parse_cited_ref, CitedRefKey, DocType, YearRange,
};
use cocite::metrics::{betweenness, geometric_mean, normalize_values, pearson, NormalizationMode};
use cocite::network::{
    count_cocitations, count_slice_citations, merge_slices, slice_corpus, slice_network,
    SelectionThreshold,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn segment() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("MARSHALL BJ".to_string()),
        Just("o'brien  k.".to_string()),
        Just("1984".to_string()),
        Just("19x4".to_string()),
        Just("LANCET".to_string()),
        Just("J BIOL CHEM.".to_string()),
        Just("PROCEEDINGS OF THE NATIONAL ACADEMY".to_string()),
        Just("V1".to_string()),
        Just("v 23".to_string()),
        Just("P1311".to_string()),
        Just("p 12.".to_string()),
        Just("DOI 10.1016/0140-6736".to_string()),
        Just(String::new()),
        "[A-Za-z0-9 .]{0,12}",
    ]
}

fn corpus_seed() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 0usize..60)
}

proptest! {
    #[test]
    fn normalize_field_is_idempotent(raw in "\\PC{0,30}") {
        let once = normalize_field(&raw);
        prop_assert_eq!(normalize_field(&once), once);
    }

    #[test]
    fn printed_key_parses_back(parts in prop::collection::vec(segment(), 1..7)) {
        let raw = parts.join(", ");
        if let Ok(key) = parse_cited_ref(&raw) {
            prop_assert_eq!(key.normalized(), key.clone());
            let printed = key.to_string();
            prop_assert_eq!(parse_cited_ref(&printed).unwrap(), key);
        }
    }

    #[test]
    fn ndjson_round_trip((seed, n) in corpus_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, n, &key_pool(12), (1990, 1999));
        let text = ingest::to_ndjson(&corpus).unwrap();
        prop_assert_eq!(ingest::from_ndjson(&text).unwrap(), corpus);
    }

    #[test]
    fn filtering_is_idempotent_and_shrinks((seed, n) in corpus_seed(), lo in 1988i32..2000, span in 0i32..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, n, &key_pool(8), (1990, 1999));
        let types = BTreeSet::from([DocType::Article]);
        let range = YearRange::new(lo, lo + span).unwrap();
        let once = filter_corpus(&corpus, &types, range);
        prop_assert!(once.len() <= corpus.len());
        prop_assert_eq!(filter_corpus(&once, &types, range), once.clone());
        prop_assert!(once.records().iter().all(|r| r.year.is_some_and(|y| range.contains(y))));
    }

    #[test]
    fn rings_conserve_citations((seed, n) in corpus_seed(), len in 1u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, n, &key_pool(10), (1990, 1999));
        let Ok(slices) = slice_corpus(&corpus, len) else { return Ok(()) };
        let counted: u64 = slices
            .iter()
            .flat_map(|&s| count_slice_citations(&corpus, s).into_values())
            .flat_map(|ring| ring.into_values())
            .map(u64::from)
            .sum();
        let incidences: usize = corpus
            .records()
            .iter()
            .filter(|r| r.year.is_some())
            .map(|r| r.cited_refs.iter().collect::<BTreeSet<_>>().len())
            .sum();
        prop_assert_eq!(counted, incidences as u64);
    }

    #[test]
    fn each_record_adds_one_per_pair((seed, n) in corpus_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = key_pool(10);
        let corpus = random_corpus(&mut rng, n, &pool, (1990, 1999));
        let Ok(slices) = slice_corpus(&corpus, 100) else { return Ok(()) };
        let all: BTreeSet<CitedRefKey> = pool.into_iter().collect();
        let edges = count_cocitations(&corpus, slices[0], &all);
        let total: u64 = edges.values().map(|e| u64::from(e.cocite_count)).sum();
        let expected: usize = corpus
            .records()
            .iter()
            .filter(|r| r.year.is_some())
            .map(|r| {
                let k = r.cited_refs.iter().collect::<BTreeSet<_>>().len();
                k * k.saturating_sub(1) / 2
            })
            .sum();
        prop_assert_eq!(total, expected as u64);
    }

    #[test]
    fn merging_is_associative((seed, n) in corpus_seed(), top in 1u32..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, n, &key_pool(12), (1990, 1998));
        let Ok(slices) = slice_corpus(&corpus, 3) else { return Ok(()) };
        let threshold = SelectionThreshold::top_n(top).unwrap();
        let nets: Vec<_> = slices.iter().enumerate().map(|(i, &s)| slice_network(&corpus, s, i, threshold)).collect();
        let flat = merge_slices(&nets);
        if nets.len() >= 2 {
            let (head, tail) = nets.split_at(1);
            let right = merge_slices(&[head[0].clone(), merge_slices(tail)]);
            let (init, last) = nets.split_at(nets.len() - 1);
            let left = merge_slices(&[merge_slices(init), last[0].clone()]);
            prop_assert_eq!(&flat, &right);
            prop_assert_eq!(&flat, &left);
        }
    }

    #[test]
    fn betweenness_ignores_labels(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.4);
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(p.as_mut_slice(), &mut rng);
            p
        };
        let mut relabeled = vec![Vec::new(); n];
        for (v, nbrs) in g.iter().enumerate() {
            relabeled[perm[v]] = nbrs.iter().map(|&w| perm[w]).collect();
        }
        let a = betweenness(&g);
        let b = betweenness(&relabeled);
        for v in 0..n {
            prop_assert!((a[v] - b[perm[v]]).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_nodes_only_rescale(seed in any::<u64>(), n in 3usize..8, extra in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.5);
        let mut padded = g.clone();
        padded.extend(std::iter::repeat_with(Vec::new).take(extra));
        let a = betweenness(&g);
        let b = betweenness(&padded);
        let m = n + extra;
        let factor = ((n - 1) * (n - 2)) as f64 / ((m - 1) * (m - 2)) as f64;
        for v in 0..n {
            prop_assert!((b[v] - a[v] * factor).abs() < 1e-12);
        }
        prop_assert!(b[n..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn disconnected_graphs_match_enumeration(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.3);
        for (a, b) in betweenness(&g).iter().zip(brute_betweenness(&g)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_mean_bounded_and_monotone(values in prop::collection::vec(0.0f64..=1.0, 1..4), bump in 0.0f64..0.5, at in 0usize..4) {
        let g = geometric_mean(&values);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12);
        let mut raised = values.clone();
        let i = at % raised.len();
        raised[i] = (raised[i] + bump).min(1.0);
        prop_assert!(geometric_mean(&raised) >= g - 1e-12);
    }

    #[test]
    fn max_normalization_ignores_scale(values in prop::collection::vec(0.0f64..1e4, 1..20), scale in 1e-3f64..1e3) {
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let a = normalize_values(&values, NormalizationMode::Max);
        let b = normalize_values(&scaled, NormalizationMode::Max);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(x));
        }
        if values.iter().any(|&v| v > 0.0) {
            prop_assert!(a.contains(&1.0));
        }
    }

    #[test]
    fn pearson_is_bounded_and_symmetric(x in prop::collection::vec(-1e3f64..1e3, 2..30), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = x.iter().map(|_| rand::Rng::random_range(&mut rng, -1e3..1e3)).collect();
        match (pearson(&x, &y), two_pass_pearson(&x, &y)) {
            (Some(r), Some(t)) => {
                prop_assert!((-1.0..=1.0).contains(&r));
                prop_assert!((r - t).abs() < 1e-9);
                prop_assert!((pearson(&y, &x).unwrap() - r).abs() < 1e-12);
            }
            (None, None) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }
}
