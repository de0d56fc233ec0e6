//! Exact argmax decoders over projective trees.
//!
//! Every decoder is a deduction system filled bottom-up over spans. The same
//! chart code runs in two modes: max-plus with backpointers for decoding, and
//! (+, ×) over unit weights for counting derivations. Ties are broken
//! deterministically in favour of the smaller split point, then the rule
//! tried first.

mod chart;
mod eisner1o;
mod eisner2o;
mod eisner_satta;
mod headsplit;

use crate::error::{Error, Result};
use crate::model::{Algorithm, ProjectiveTree, RootMode, ScoreSet};

use chart::{Factors, Unit};

/// Result of a max-plus decode.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub tree: ProjectiveTree,
    /// Objective value of `tree`, as accumulated in the chart.
    pub score: f64,
}

/// Decodes with `algorithm`, checking that its components are present.
pub fn decode(algorithm: Algorithm, s: &ScoreSet, root_mode: RootMode) -> Result<DecodeResult> {
    s.require(algorithm)?;
    let n = s.n();
    let (score, heads) = match algorithm {
        Algorithm::Eisner1o => {
            let chart = eisner1o::fill(s, n, root_mode);
            (chart.goal.0, chart.backtrack())
        }
        Algorithm::EisnerSattaSpan => {
            let chart = eisner_satta::fill(s, n, root_mode);
            (chart.goal.0, chart.backtrack())
        }
        Algorithm::EisnerHeadsplit => {
            let chart = headsplit::fill(s, n, root_mode);
            (chart.goal.0, chart.backtrack())
        }
        Algorithm::Eisner2oHeadsplit => {
            let chart = eisner2o::fill(s, n, root_mode);
            (chart.goal.0, chart.backtrack())
        }
    };
    Ok(DecodeResult {
        tree: ProjectiveTree::from_heads_unchecked(heads),
        score,
    })
}

/// Argmax of the arc-factored objective.
pub fn decode_eisner_1o(s: &ScoreSet, root_mode: RootMode) -> Result<DecodeResult> {
    decode(Algorithm::Eisner1o, s, root_mode)
}

/// Argmax of arcs plus whole headed spans, in O(n^4) time.
pub fn decode_eisner_satta_span(s: &ScoreSet, root_mode: RootMode) -> Result<DecodeResult> {
    decode(Algorithm::EisnerSattaSpan, s, root_mode)
}

/// Argmax of arcs plus left and right span boundaries, in O(n^3) time.
pub fn decode_eisner_headsplit(s: &ScoreSet, root_mode: RootMode) -> Result<DecodeResult> {
    decode(Algorithm::EisnerHeadsplit, s, root_mode)
}

/// Argmax of arcs, adjacent siblings and span boundaries, in O(n^3) time.
pub fn decode_eisner_2o_headsplit(s: &ScoreSet, root_mode: RootMode) -> Result<DecodeResult> {
    decode(Algorithm::Eisner2oHeadsplit, s, root_mode)
}

/// Number of derivations of a full tree in `algorithm`'s deduction system
/// for a sentence of `n` words. Each projective tree has exactly one
/// derivation, so this is also the number of projective trees.
///
/// Panics if the count does not fit in a `u128` (n beyond roughly 70).
pub fn count_trees(algorithm: Algorithm, n: usize, root_mode: RootMode) -> Result<u128> {
    if n == 0 {
        return Err(Error::EmptySentence);
    }
    Ok(count_with(&Unit, algorithm, n, root_mode))
}

fn count_with<F: Factors<W = chart::Count>>(
    f: &F,
    algorithm: Algorithm,
    n: usize,
    root_mode: RootMode,
) -> u128 {
    match algorithm {
        Algorithm::Eisner1o => eisner1o::fill(f, n, root_mode).goal.0,
        Algorithm::EisnerSattaSpan => eisner_satta::fill(f, n, root_mode).goal.0,
        Algorithm::EisnerHeadsplit => headsplit::fill(f, n, root_mode).goal.0,
        Algorithm::Eisner2oHeadsplit => eisner2o::fill(f, n, root_mode).goal.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Component;

    const ALL_COMPONENTS: [Component; 4] =
        [Component::Sib, Component::Span, Component::Left, Component::Right];

    #[test]
    fn single_word() {
        let mut s = ScoreSet::zeros(1, &ALL_COMPONENTS).unwrap();
        s.set_arc(0, 1, 0.5);
        s.set_span(1, 0, 1, 0.25);
        s.set_left(1, 0, 2.0);
        s.set_right(1, 1, 4.0);
        for mode in [RootMode::Single, RootMode::Multi] {
            assert_eq!(decode_eisner_1o(&s, mode).unwrap().score, 0.5);
            assert_eq!(decode_eisner_satta_span(&s, mode).unwrap().score, 0.75);
            assert_eq!(decode_eisner_headsplit(&s, mode).unwrap().score, 6.5);
            assert_eq!(decode_eisner_2o_headsplit(&s, mode).unwrap().score, 6.5);
            for a in Algorithm::ALL {
                assert_eq!(decode(a, &s, mode).unwrap().tree.heads(), &[0]);
            }
        }
    }

    #[test]
    fn two_words_first_order() {
        let mut s = ScoreSet::zeros(2, &[]).unwrap();
        s.set_arc(0, 1, 5.0);
        s.set_arc(0, 2, 1.0);
        s.set_arc(1, 2, 3.0);
        s.set_arc(2, 1, 0.0);
        let r = decode_eisner_1o(&s, RootMode::Single).unwrap();
        assert_eq!(r.tree.heads(), &[0, 1]);
        assert_eq!(r.score, 8.0);
        // With several roots allowed, 0 -> 1 and 0 -> 2 (6.0) still loses.
        let r = decode_eisner_1o(&s, RootMode::Multi).unwrap();
        assert_eq!(r.tree.heads(), &[0, 1]);
    }

    #[test]
    fn counts_for_small_n() {
        for a in Algorithm::ALL {
            assert_eq!(count_trees(a, 1, RootMode::Single).unwrap(), 1);
            assert_eq!(count_trees(a, 2, RootMode::Single).unwrap(), 2);
            assert_eq!(count_trees(a, 2, RootMode::Multi).unwrap(), 3);
            assert!(count_trees(a, 0, RootMode::Single).is_err());
        }
    }

    #[test]
    fn missing_components_rejected() {
        let s = ScoreSet::zeros(3, &[]).unwrap();
        assert!(decode_eisner_satta_span(&s, RootMode::Single).is_err());
        assert!(decode_eisner_headsplit(&s, RootMode::Single).is_err());
        assert!(decode_eisner_2o_headsplit(&s, RootMode::Single).is_err());
    }

    #[test]
    fn single_child_heads_never_read_sibling_scores() {
        // A chain has no sibling pairs, so poisoning every sibling cell must
        // not change the score of the chain when it is forced.
        let n = 5;
        let mut s = ScoreSet::filled_with(n, &ALL_COMPONENTS, || 0.0).unwrap();
        for (h, i, o) in crate::model::sibling_triples(n) {
            s.set_sib(h, i, o, -1e6);
        }
        for d in 1..=n {
            s.set_arc(d - 1, d, 10.0);
        }
        let r = decode_eisner_2o_headsplit(&s, RootMode::Single).unwrap();
        assert_eq!(r.tree.heads(), &[0, 1, 2, 3, 4]);
        assert_eq!(r.score, 50.0);
    }
}
