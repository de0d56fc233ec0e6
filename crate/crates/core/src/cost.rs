//! Hamming-cost augmentation for loss-augmented decoding.
//!
//! For every tree `y'`, decoding the augmented table maximizes
//! `s(y') + Δ(y', gold)`, where `Δ` counts the scored units of `y'` absent
//! from the gold tree, weighted per unit kind. Arcs, spans and boundaries
//! occur exactly `n` times in every tree, so their costs are charged by
//! lowering the gold cells; that shifts every tree by the same `offset`.
//! Sibling pairs vary in number between trees and are charged on the
//! non-gold cells instead.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{sibling_triples, Algorithm, Component, ProjectiveTree, ScoreSet};
use crate::tree_ops::TreeDecomposition;

/// Cost of one mismatched unit, per kind. Left and right boundaries are
/// independent units; a headed span is one unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostConfig {
    pub arc: f64,
    pub span: f64,
    pub left: f64,
    pub right: f64,
    pub sibling: f64,
}

impl CostConfig {
    /// Unit cost for every kind `algorithm` scores, zero elsewhere.
    pub fn for_model(algorithm: Algorithm) -> Self {
        let unit = |c| if algorithm.uses(c) { 1.0 } else { 0.0 };
        CostConfig {
            arc: 1.0,
            span: unit(Component::Span),
            left: unit(Component::Left),
            right: unit(Component::Right),
            sibling: unit(Component::Sib),
        }
    }

    pub fn validate(&self, algorithm: Algorithm) -> Result<()> {
        let kinds = [
            (Component::Arc, self.arc),
            (Component::Span, self.span),
            (Component::Left, self.left),
            (Component::Right, self.right),
            (Component::Sib, self.sibling),
        ];
        for (component, cost) in kinds {
            if !(cost >= 0.0 && cost.is_finite()) {
                return Err(Error::InvalidCost(format!(
                    "{component} cost must be a nonnegative number, got {cost}"
                )));
            }
            if cost != 0.0 && !algorithm.uses(component) {
                return Err(Error::InvalidCost(format!(
                    "{algorithm} does not score {component} units"
                )));
            }
        }
        Ok(())
    }
}

/// An augmented score table.
#[derive(Clone, Debug)]
pub struct Augmented {
    pub scores: ScoreSet,
    /// Augmented objective of any tree `y'` equals
    /// `tree_score(y') + Δ(y', gold) + offset`.
    pub offset: f64,
}

/// Builds the loss-augmented table for `gold`.
pub fn augment(
    s: &ScoreSet,
    gold: &ProjectiveTree,
    cfg: &CostConfig,
    algorithm: Algorithm,
) -> Result<Augmented> {
    s.require(algorithm)?;
    cfg.validate(algorithm)?;
    if gold.n() != s.n() {
        return Err(Error::LengthMismatch {
            expected: s.n(),
            actual: gold.n(),
        });
    }
    let n = s.n();
    let gold = TreeDecomposition::new(gold);
    let mut out = s.clone().restricted_to(algorithm);
    let mut per_word = cfg.arc;

    for &(h, d) in &gold.arcs {
        out.set_arc(h, d, out.arc(h, d) - cfg.arc);
    }
    if algorithm.uses(Component::Span) {
        per_word += cfg.span;
        for sp in &gold.spans {
            out.set_span(sp.h, sp.l, sp.r, out.span(sp.h, sp.l, sp.r) - cfg.span);
        }
    }
    if algorithm.uses(Component::Left) {
        per_word += cfg.left + cfg.right;
        for sp in &gold.spans {
            out.set_left(sp.h, sp.l, out.left(sp.h, sp.l) - cfg.left);
            out.set_right(sp.h, sp.r, out.right(sp.h, sp.r) - cfg.right);
        }
    }
    if algorithm.uses(Component::Sib) && cfg.sibling != 0.0 {
        let gold_pairs: HashSet<_> = gold.sibling_pairs.iter().copied().collect();
        for (h, inner, outer) in sibling_triples(n) {
            if !gold_pairs.contains(&(h, inner, outer)) {
                out.set_sib(h, inner, outer, out.sib(h, inner, outer) + cfg.sibling);
            }
        }
    }
    Ok(Augmented {
        scores: out,
        offset: -(n as f64) * per_word,
    })
}

/// Weighted count of the units of `pred` that `gold` lacks, over the unit
/// kinds `algorithm` scores.
pub fn hamming(
    pred: &TreeDecomposition,
    gold: &TreeDecomposition,
    cfg: &CostConfig,
    algorithm: Algorithm,
) -> f64 {
    fn missing<T: Eq + std::hash::Hash + Copy>(pred: &[T], gold: &[T]) -> usize {
        let gold: HashSet<T> = gold.iter().copied().collect();
        pred.iter().filter(|u| !gold.contains(u)).count()
    }
    let mut delta = cfg.arc * missing(&pred.arcs, &gold.arcs) as f64;
    if algorithm.uses(Component::Span) {
        delta += cfg.span * missing(&pred.spans, &gold.spans) as f64;
    }
    if algorithm.uses(Component::Left) {
        let lefts = |d: &TreeDecomposition| d.spans.iter().map(|s| (s.h, s.l)).collect::<Vec<_>>();
        let rights =
            |d: &TreeDecomposition| d.spans.iter().map(|s| (s.h, s.r)).collect::<Vec<_>>();
        delta += cfg.left * missing(&lefts(pred), &lefts(gold)) as f64;
        delta += cfg.right * missing(&rights(pred), &rights(gold)) as f64;
    }
    if algorithm.uses(Component::Sib) {
        delta += cfg.sibling * missing(&pred.sibling_pairs, &gold.sibling_pairs) as f64;
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::decode;
    use crate::model::RootMode;
    use crate::tree_ops::tree_score;

    fn tree(heads: &[usize]) -> ProjectiveTree {
        ProjectiveTree::new(heads.to_vec(), RootMode::Single).unwrap()
    }

    #[test]
    fn default_costs_follow_the_model() {
        let c = CostConfig::for_model(Algorithm::EisnerSattaSpan);
        assert_eq!((c.arc, c.span, c.left, c.sibling), (1.0, 1.0, 0.0, 0.0));
        let c = CostConfig::for_model(Algorithm::Eisner2oHeadsplit);
        assert_eq!((c.span, c.left, c.right, c.sibling), (0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn rejects_costs_on_unscored_kinds() {
        let mut c = CostConfig::for_model(Algorithm::Eisner1o);
        c.span = 1.0;
        assert!(c.validate(Algorithm::Eisner1o).is_err());
        let mut c = CostConfig::for_model(Algorithm::Eisner1o);
        c.arc = -1.0;
        assert!(c.validate(Algorithm::Eisner1o).is_err());
    }

    #[test]
    fn gold_has_zero_cost() {
        let gold = tree(&[2, 3, 0, 5, 3]);
        let d = TreeDecomposition::new(&gold);
        for a in Algorithm::ALL {
            assert_eq!(hamming(&d, &d, &CostConfig::for_model(a), a), 0.0);
        }
    }

    #[test]
    fn one_moved_arc_costs_one_arc() {
        let gold = TreeDecomposition::new(&tree(&[2, 3, 0, 5, 3]));
        // "a" attaches to "reads" instead of "book".
        let pred = TreeDecomposition::new(&tree(&[2, 3, 0, 3, 3]));
        let cfg = CostConfig::for_model(Algorithm::Eisner1o);
        assert_eq!(hamming(&pred, &gold, &cfg, Algorithm::Eisner1o), 1.0);
        // The span of "book" shrinks too: one arc, one span.
        let cfg = CostConfig::for_model(Algorithm::EisnerSattaSpan);
        assert_eq!(hamming(&pred, &gold, &cfg, Algorithm::EisnerSattaSpan), 2.0);
        // Only the left boundary of "book" moves.
        let cfg = CostConfig::for_model(Algorithm::EisnerHeadsplit);
        assert_eq!(hamming(&pred, &gold, &cfg, Algorithm::EisnerHeadsplit), 2.0);
        // "reads" gains the right-sibling pair (3, 4, 5).
        let cfg = CostConfig::for_model(Algorithm::Eisner2oHeadsplit);
        assert_eq!(hamming(&pred, &gold, &cfg, Algorithm::Eisner2oHeadsplit), 3.0);
    }

    #[test]
    fn zero_scores_make_the_augmented_argmax_maximize_cost() {
        let gold = tree(&[2, 0, 2]);
        for a in Algorithm::ALL {
            let s = ScoreSet::zeros(3, a.components()).unwrap();
            let cfg = CostConfig::for_model(a);
            let aug = augment(&s, &gold, &cfg, a).unwrap();
            let r = decode(a, &aug.scores, RootMode::Single).unwrap();
            let delta = hamming(
                &TreeDecomposition::new(&r.tree),
                &TreeDecomposition::new(&gold),
                &cfg,
                a,
            );
            assert!(delta > 0.0);
            assert_eq!(r.score, delta + aug.offset);
            assert_eq!(tree_score(&r.tree, &s, a).unwrap(), 0.0);
        }
    }
}
