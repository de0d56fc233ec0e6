//! Factor extraction: the arcs, headed spans and sibling pairs a tree is
//! scored by.

use crate::error::{Error, Result};
use crate::model::{Algorithm, HeadedSpan, ProjectiveTree, ScoreSet};

/// The units a tree is scored by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// `(head, dependent)`, ordered by dependent.
    pub arcs: Vec<(usize, usize)>,
    /// One headed span per word, ordered by head word.
    pub spans: Vec<HeadedSpan>,
    /// `(head, inner, outer)` adjacent same-side modifier pairs.
    pub sibling_pairs: Vec<(usize, usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(tree: &ProjectiveTree) -> Self {
        TreeDecomposition {
            arcs: tree.heads().iter().enumerate().map(|(i, &h)| (h, i + 1)).collect(),
            spans: extract_headed_spans(tree),
            sibling_pairs: extract_sibling_pairs(tree),
        }
    }

    /// Objective value of the decomposed tree. The caller guarantees the
    /// needed components exist.
    pub fn score(&self, s: &ScoreSet, algorithm: Algorithm) -> f64 {
        let mut total: f64 = self.arcs.iter().map(|&(h, d)| s.arc(h, d)).sum();
        match algorithm {
            Algorithm::Eisner1o => {}
            Algorithm::EisnerSattaSpan => {
                total += self.spans.iter().map(|sp| s.span(sp.h, sp.l, sp.r)).sum::<f64>();
            }
            Algorithm::EisnerHeadsplit => {
                total += self.boundary_total(s);
            }
            Algorithm::Eisner2oHeadsplit => {
                total += self
                    .sibling_pairs
                    .iter()
                    .map(|&(h, i, o)| s.sib(h, i, o))
                    .sum::<f64>();
                total += self.boundary_total(s);
            }
        }
        total
    }

    fn boundary_total(&self, s: &ScoreSet) -> f64 {
        self.spans
            .iter()
            .map(|sp| s.left(sp.h, sp.l) + s.right(sp.h, sp.r))
            .sum()
    }
}

/// Headed span `(l, r, h)` of every word: words `l + 1..=r` are exactly the
/// descendants of `h`, itself included.
pub fn extract_headed_spans(tree: &ProjectiveTree) -> Vec<HeadedSpan> {
    let n = tree.n();
    let mut lo: Vec<usize> = (0..=n).collect();
    let mut hi: Vec<usize> = (0..=n).collect();
    for d in 1..=n {
        let mut a = tree.head(d);
        while a != 0 {
            lo[a] = lo[a].min(d);
            hi[a] = hi[a].max(d);
            a = tree.head(a);
        }
    }
    (1..=n)
        .map(|h| HeadedSpan {
            l: lo[h] - 1,
            r: hi[h],
            h,
        })
        .collect()
}

/// Adjacent same-side modifier pairs `(head, inner, outer)`, moving outward
/// from each head.
pub fn extract_sibling_pairs(tree: &ProjectiveTree) -> Vec<(usize, usize, usize)> {
    let n = tree.n();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for d in 1..=n {
        children[tree.head(d)].push(d);
    }
    let mut pairs = Vec::new();
    for (h, deps) in children.iter().enumerate() {
        let split = deps.partition_point(|&d| d < h);
        let (left, right) = deps.split_at(split);
        for w in left.windows(2).rev() {
            pairs.push((h, w[1], w[0]));
        }
        for w in right.windows(2) {
            pairs.push((h, w[0], w[1]));
        }
    }
    pairs
}

/// Value of `tree` under the objective maximized by `algorithm`.
pub fn tree_score(tree: &ProjectiveTree, s: &ScoreSet, algorithm: Algorithm) -> Result<f64> {
    if tree.n() != s.n() {
        return Err(Error::LengthMismatch {
            expected: s.n(),
            actual: tree.n(),
        });
    }
    s.require(algorithm)?;
    Ok(TreeDecomposition::new(tree).score(s, algorithm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Component, RootMode};

    fn tree(heads: &[usize]) -> ProjectiveTree {
        ProjectiveTree::new(heads.to_vec(), RootMode::Multi).unwrap()
    }

    fn span(l: usize, r: usize, h: usize) -> HeadedSpan {
        HeadedSpan { l, r, h }
    }

    #[test]
    fn figure_one_spans() {
        let spans = extract_headed_spans(&tree(&[2, 3, 0, 5, 3]));
        assert_eq!(
            spans,
            vec![span(0, 1, 1), span(0, 2, 2), span(0, 5, 3), span(3, 4, 4), span(3, 5, 5)]
        );
    }

    #[test]
    fn single_word_span() {
        assert_eq!(extract_headed_spans(&tree(&[0])), vec![span(0, 1, 1)]);
    }

    #[test]
    fn sibling_pairs() {
        // Only child: nothing.
        assert!(extract_sibling_pairs(&tree(&[0, 1])).is_empty());
        // Figure 1: the verb's children sit on opposite sides.
        assert!(extract_sibling_pairs(&tree(&[2, 3, 0, 5, 3])).is_empty());
        // Word 5 has left children 3 and 4; 4 is closer.
        let pairs = extract_sibling_pairs(&tree(&[2, 3, 5, 5, 0]));
        assert_eq!(pairs, vec![(5, 4, 3)]);
        // Three right children of the root under multi-root.
        let pairs = extract_sibling_pairs(&tree(&[0, 0, 0]));
        assert_eq!(pairs, vec![(0, 1, 2), (0, 2, 3)]);
        // Three left children.
        let pairs = extract_sibling_pairs(&tree(&[4, 4, 4, 0]));
        assert_eq!(pairs, vec![(4, 3, 2), (4, 2, 1)]);
    }

    #[test]
    fn zero_scores_give_zero() {
        let t = tree(&[2, 3, 0, 5, 3]);
        let s = ScoreSet::zeros(
            5,
            &[Component::Sib, Component::Span, Component::Left, Component::Right],
        )
        .unwrap();
        for a in Algorithm::ALL {
            assert_eq!(tree_score(&t, &s, a).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_word_span_model() {
        let mut s = ScoreSet::zeros(1, &[Component::Span]).unwrap();
        s.set_arc(0, 1, 1.5);
        s.set_span(1, 0, 1, -0.25);
        let v = tree_score(&tree(&[0]), &s, Algorithm::EisnerSattaSpan).unwrap();
        assert_eq!(v, 1.25);
    }

    #[test]
    fn missing_component_and_length_errors() {
        let s = ScoreSet::zeros(2, &[]).unwrap();
        assert!(tree_score(&tree(&[0, 1]), &s, Algorithm::EisnerHeadsplit).is_err());
        assert!(tree_score(&tree(&[0]), &s, Algorithm::Eisner1o).is_err());
    }
}
