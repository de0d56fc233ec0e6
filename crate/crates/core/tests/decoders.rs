use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spandep::{
    count_trees, decode, enumerate_projective, extract_headed_spans, tree_score, Algorithm,
    Component, Oracle, ProjectiveTree, RootMode, ScoreSet,
};

const ALL: [Component; 4] = [Component::Sib, Component::Span, Component::Left, Component::Right];

fn random_scores(n: usize, rng: &mut ChaCha8Rng) -> ScoreSet {
    ScoreSet::filled_with(n, &ALL, || rng.gen_range(-1.0..1.0)).unwrap()
}

/// Uniform over multiples of 2^-20 in (-1, 1): sums of a few hundred such
/// values are exact in f64, so objective values can be compared with `==`.
fn dyadic_scores(n: usize, rng: &mut ChaCha8Rng) -> ScoreSet {
    ScoreSet::filled_with(n, &ALL, || {
        rng.gen_range(-(1i64 << 20) + 1..1i64 << 20) as f64 / (1u64 << 20) as f64
    })
    .unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Independent tree counts from the split recurrence: `sub[b]` counts single
/// subtrees over b words, `seq[m]` sequences of adjacent subtrees over m words.
fn recurrence_counts(n: usize) -> (Vec<u128>, Vec<u128>) {
    let mut sub = vec![0u128; n + 1];
    let mut seq = vec![0u128; n + 1];
    seq[0] = 1;
    for len in 1..=n {
        sub[len] = (1..=len).map(|h| seq[h - 1] * seq[len - h]).sum();
        seq[len] = (1..=len).map(|b| sub[b] * seq[len - b]).sum();
    }
    (sub, seq)
}

#[test]
fn recurrence_reference_values() {
    let (sub, seq) = recurrence_counts(8);
    assert_eq!(&sub[1..], &[1, 2, 7, 30, 143, 728, 3876, 21318]);
    assert_eq!(&seq[1..], &[1, 3, 12, 55, 273, 1428, 7752, 43263]);
}

#[test]
fn enumeration_and_chart_counts_agree_with_recurrence() {
    let (sub, seq) = recurrence_counts(16);
    for n in 1..=8 {
        let single = enumerate_projective(n, RootMode::Single).unwrap().count() as u128;
        let multi = enumerate_projective(n, RootMode::Multi).unwrap().count() as u128;
        assert_eq!(single, sub[n]);
        assert_eq!(multi, seq[n]);
    }
    for n in 1..=16 {
        for a in Algorithm::ALL {
            assert_eq!(count_trees(a, n, RootMode::Single).unwrap(), sub[n], "{a} n={n}");
            assert_eq!(count_trees(a, n, RootMode::Multi).unwrap(), seq[n], "{a} n={n}");
        }
    }
}

#[test]
fn decoders_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for mode in [RootMode::Single, RootMode::Multi] {
        for n in 1..=7 {
            let oracle = Oracle::new(n, mode).unwrap();
            for _ in 0..20 {
                let s = random_scores(n, &mut rng);
                for a in Algorithm::ALL {
                    let want = oracle.argmax(&s, a).unwrap();
                    let got = decode(a, &s, mode).unwrap();
                    assert!(close(got.score, want.score), "{a} {mode:?} n={n}");
                    assert_eq!(got.tree, want.tree, "{a} {mode:?} n={n}");
                    let rescored = tree_score(&got.tree, &s, a).unwrap();
                    assert!(close(rescored, got.score));
                }
            }
        }
    }
}

#[test]
fn first_order_two_word_example() {
    let mut s = ScoreSet::zeros(2, &[]).unwrap();
    s.set_arc(0, 1, 5.0);
    s.set_arc(0, 2, 1.0);
    s.set_arc(1, 2, 3.0);
    s.set_arc(2, 1, 0.0);
    let r = decode(Algorithm::Eisner1o, &s, RootMode::Single).unwrap();
    assert_eq!(r.tree.heads(), &[0, 1]);
    assert_eq!(r.score, 8.0);
}

fn figure_one_indicator_scores() -> (ProjectiveTree, ScoreSet) {
    let gold = ProjectiveTree::new(vec![2, 3, 0, 5, 3], RootMode::Single).unwrap();
    let mut s = ScoreSet::zeros(5, &ALL).unwrap();
    for (i, &h) in gold.heads().iter().enumerate() {
        s.set_arc(h, i + 1, 1.0);
    }
    for sp in extract_headed_spans(&gold) {
        s.set_span(sp.h, sp.l, sp.r, 1.0);
        s.set_left(sp.h, sp.l, 0.5);
        s.set_right(sp.h, sp.r, 0.5);
    }
    (gold, s)
}

#[test]
fn figure_one_indicator_decoding() {
    let (gold, s) = figure_one_indicator_scores();
    let r = decode(Algorithm::EisnerSattaSpan, &s, RootMode::Single).unwrap();
    assert_eq!(r.tree, gold);
    assert_eq!(r.score, 10.0);
    for a in [Algorithm::EisnerHeadsplit, Algorithm::Eisner2oHeadsplit] {
        let r = decode(a, &s, RootMode::Single).unwrap();
        assert_eq!(r.tree, gold);
        assert_eq!(r.score, 10.0);
    }
}

fn zeroed(s: &ScoreSet, component: Component) -> ScoreSet {
    s.clone().with_zero_component(component)
}

#[test]
fn reduction_chain_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mode in [RootMode::Single, RootMode::Multi] {
        for _ in 0..30 {
            let s = dyadic_scores(8, &mut rng);
            let first = decode(Algorithm::Eisner1o, &s, mode).unwrap().score;

            let no_span = zeroed(&s, Component::Span);
            let es = decode(Algorithm::EisnerSattaSpan, &no_span, mode).unwrap().score;
            assert_eq!(es, first);

            let no_bounds = zeroed(&zeroed(&s, Component::Left), Component::Right);
            let hs = decode(Algorithm::EisnerHeadsplit, &no_bounds, mode).unwrap().score;
            assert_eq!(hs, first);

            let no_sib = zeroed(&s, Component::Sib);
            let hs = decode(Algorithm::EisnerHeadsplit, &no_sib, mode).unwrap().score;
            let so = decode(Algorithm::Eisner2oHeadsplit, &no_sib, mode).unwrap().score;
            assert_eq!(so, hs);
        }
    }
}

#[test]
fn span_built_from_boundaries_matches_headsplit() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 1..=7 {
        for _ in 0..10 {
            let mut s = random_scores(n, &mut rng);
            for h in 1..=n {
                for l in 0..h {
                    for r in h..=n {
                        s.set_span(h, l, r, s.left(h, l) + s.right(h, r));
                    }
                }
            }
            let a = decode(Algorithm::EisnerSattaSpan, &s, RootMode::Single).unwrap();
            let b = decode(Algorithm::EisnerHeadsplit, &s, RootMode::Single).unwrap();
            assert!(close(a.score, b.score));
        }
    }
}

#[test]
fn larger_sentences_decode_to_valid_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [12, 25, 40] {
        let s = random_scores(n, &mut rng);
        for a in Algorithm::ALL {
            for mode in [RootMode::Single, RootMode::Multi] {
                let r = decode(a, &s, mode).unwrap();
                assert!(spandep::validate_tree(r.tree.heads(), n, mode));
                assert!(close(tree_score(&r.tree, &s, a).unwrap(), r.score));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Every tree has n arcs, so shifting all arc scores leaves the argmax alone.
    #[test]
    fn arc_shift_preserves_argmax(seed in any::<u64>(), n in 2usize..9, shift in -5i32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = dyadic_scores(n, &mut rng);
        let mut shifted = s.clone();
        for h in 0..=n {
            for d in 1..=n {
                if h != d {
                    shifted.set_arc(h, d, s.arc(h, d) + shift as f64);
                }
            }
        }
        for a in Algorithm::ALL {
            let x = decode(a, &s, RootMode::Single).unwrap();
            let y = decode(a, &shifted, RootMode::Single).unwrap();
            prop_assert_eq!(&x.tree, &y.tree);
            prop_assert_eq!(x.score + (n as f64) * shift as f64, y.score);
        }
    }

    #[test]
    fn decoded_score_dominates_every_tree(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scores(n, &mut rng);
        for a in Algorithm::ALL {
            let best = decode(a, &s, RootMode::Multi).unwrap().score;
            for t in enumerate_projective(n, RootMode::Multi).unwrap() {
                prop_assert!(tree_score(&t, &s, a).unwrap() <= best + 1e-9);
            }
        }
    }
}
