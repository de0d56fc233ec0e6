//! Sentences, trees, headed spans and the dense score container shared by
//! every decoder.
//!
//! Indexing follows one convention throughout the crate: words are numbered
//! `1..=n` and position `0` is the artificial root. Fenceposts are numbered
//! `0..=n`; fencepost `k` sits between word `k` and word `k + 1`, so the
//! interval `(l, r]` covers words `l + 1..=r`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four decoders, each maximizing a different tree objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    /// First-order Eisner: arcs only.
    Eisner1o,
    /// Modified Eisner-Satta: arcs plus whole headed spans, O(n^4).
    EisnerSattaSpan,
    /// Modified Eisner: arcs plus independent left/right span boundaries, O(n^3).
    EisnerHeadsplit,
    /// Modified second-order Eisner: arcs, adjacent siblings and span boundaries, O(n^3).
    Eisner2oHeadsplit,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Eisner1o,
        Algorithm::EisnerSattaSpan,
        Algorithm::EisnerHeadsplit,
        Algorithm::Eisner2oHeadsplit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Eisner1o => "eisner1o",
            Algorithm::EisnerSattaSpan => "eisner-satta-span",
            Algorithm::EisnerHeadsplit => "eisner-headsplit",
            Algorithm::Eisner2oHeadsplit => "eisner2o-headsplit",
        }
    }

    /// Score components read by this decoder.
    pub fn components(self) -> &'static [Component] {
        match self {
            Algorithm::Eisner1o => &[Component::Arc],
            Algorithm::EisnerSattaSpan => &[Component::Arc, Component::Span],
            Algorithm::EisnerHeadsplit => &[Component::Arc, Component::Left, Component::Right],
            Algorithm::Eisner2oHeadsplit => &[
                Component::Arc,
                Component::Sib,
                Component::Left,
                Component::Right,
            ],
        }
    }

    pub fn uses(self, component: Component) -> bool {
        self.components().contains(&component)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "eisner1o" | "eisner-1o" => Ok(Algorithm::Eisner1o),
            "eisner-satta-span" => Ok(Algorithm::EisnerSattaSpan),
            "eisner-headsplit" => Ok(Algorithm::EisnerHeadsplit),
            "eisner2o-headsplit" | "eisner-2o-headsplit" => Ok(Algorithm::Eisner2oHeadsplit),
            _ => Err(Error::UnknownAlgorithm(s.to_owned())),
        }
    }
}

/// Set of score components a decoder needs, looked up by identifier.
pub fn score_components_required(algorithm: &str) -> Result<BTreeSet<Component>> {
    let algorithm: Algorithm = algorithm.parse()?;
    Ok(algorithm.components().iter().copied().collect())
}

/// One table of a [`ScoreSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    Arc,
    Sib,
    Span,
    Left,
    Right,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::Arc => "arc",
            Component::Sib => "sib",
            Component::Span => "span",
            Component::Left => "left",
            Component::Right => "right",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether the root may take more than one dependent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootMode {
    #[default]
    Single,
    Multi,
}

impl FromStr for RootMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(RootMode::Single),
            "multi" => Ok(RootMode::Multi),
            _ => Err(Error::InvalidConfig(format!("unknown root mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Token {
    pub form: String,
    pub upos: String,
    pub xpos: String,
    pub gold_head: Option<usize>,
    pub gold_label: Option<String>,
}

impl Token {
    pub fn new(form: impl Into<String>, upos: impl Into<String>) -> Self {
        let upos = upos.into();
        Token {
            form: form.into(),
            xpos: upos.clone(),
            upos,
            gold_head: None,
            gold_label: None,
        }
    }
}

/// A sentence of syntactic words. Word `i` is `tokens[i - 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }

    /// Number of words, excluding the root.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Word `i` (1-based).
    pub fn word(&self, i: usize) -> &Token {
        &self.tokens[i - 1]
    }

    /// Gold heads when every token carries one.
    pub fn gold_heads(&self) -> Option<Vec<usize>> {
        self.tokens.iter().map(|t| t.gold_head).collect()
    }

    /// The gold tree, if present, well formed and projective under `root_mode`.
    pub fn gold_tree(&self, root_mode: RootMode) -> Option<ProjectiveTree> {
        ProjectiveTree::new(self.gold_heads()?, root_mode).ok()
    }
}

/// A rooted projective dependency tree as a head vector: `heads[i - 1]` is
/// the head of word `i`, and `0` denotes the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveTree {
    heads: Vec<usize>,
}

impl ProjectiveTree {
    pub fn new(heads: Vec<usize>, root_mode: RootMode) -> Result<Self> {
        check_tree(&heads, root_mode).map_err(Error::InvalidTree)?;
        Ok(ProjectiveTree { heads })
    }

    pub(crate) fn from_heads_unchecked(heads: Vec<usize>) -> Self {
        debug_assert!(check_tree(&heads, RootMode::Multi).is_ok(), "{heads:?}");
        ProjectiveTree { heads }
    }

    pub fn n(&self) -> usize {
        self.heads.len()
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    /// Head of word `d` (1-based).
    pub fn head(&self, d: usize) -> usize {
        self.heads[d - 1]
    }

    /// Dependents of `h` in increasing position order.
    pub fn children(&self, h: usize) -> Vec<usize> {
        (1..=self.n()).filter(|&d| self.head(d) == h).collect()
    }

    pub fn into_heads(self) -> Vec<usize> {
        self.heads
    }
}

/// True iff `heads` encodes a rooted, acyclic, projective tree over `n`
/// words (single root unless `root_mode` is [`RootMode::Multi`]).
pub fn validate_tree(heads: &[usize], n: usize, root_mode: RootMode) -> bool {
    heads.len() == n && check_tree(heads, root_mode).is_ok()
}

fn check_tree(heads: &[usize], root_mode: RootMode) -> std::result::Result<(), String> {
    let n = heads.len();
    if n == 0 {
        return Err("tree has no words".into());
    }
    for (i, &h) in heads.iter().enumerate() {
        let d = i + 1;
        if h > n {
            return Err(format!("head {h} of word {d} is out of range"));
        }
        if h == d {
            return Err(format!("word {d} is its own head"));
        }
    }
    let roots = heads.iter().filter(|&&h| h == 0).count();
    if roots == 0 {
        return Err("no word is attached to the root".into());
    }
    if root_mode == RootMode::Single && roots > 1 {
        return Err(format!("{roots} words are attached to the root"));
    }
    // Every word must reach the root within n steps.
    for start in 1..=n {
        let mut cur = start;
        let mut steps = 0;
        while cur != 0 {
            cur = heads[cur - 1];
            steps += 1;
            if steps > n {
                return Err(format!("word {start} lies on a cycle"));
            }
        }
    }
    let dominates = |h: usize, mut d: usize| {
        while d != 0 {
            if d == h {
                return true;
            }
            d = heads[d - 1];
        }
        h == 0
    };
    for (i, &h) in heads.iter().enumerate() {
        let d = i + 1;
        let (lo, hi) = if h < d { (h, d) } else { (d, h) };
        for k in lo + 1..hi {
            if !dominates(h, k) {
                return Err(format!("arc {h} -> {d} is not projective"));
            }
        }
    }
    Ok(())
}

/// A word together with the fencepost interval `(l, r]` its subtree covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeadedSpan {
    pub l: usize,
    pub r: usize,
    pub h: usize,
}

impl HeadedSpan {
    pub fn new(l: usize, r: usize, h: usize) -> Result<Self> {
        if l < h && h <= r {
            Ok(HeadedSpan { l, r, h })
        } else {
            Err(Error::IndexOutOfRange(format!(
                "headed span ({l}, {r}, {h}) needs l < h <= r"
            )))
        }
    }
}

/// A tree with one label per word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTree {
    pub tree: ProjectiveTree,
    pub labels: Vec<String>,
}

impl LabeledTree {
    pub fn new(tree: ProjectiveTree, labels: Vec<String>) -> Result<Self> {
        if labels.len() != tree.n() {
            return Err(Error::LengthMismatch {
                expected: tree.n(),
                actual: labels.len(),
            });
        }
        Ok(LabeledTree { tree, labels })
    }
}

/// Dense score tables for one sentence of `n` words.
///
/// Only structurally valid cells are ever read: dependents are words
/// `1..=n`, span and boundary heads are words, and sibling triples satisfy
/// `outer < inner < h` or `h < inner < outer`. Sibling scores are addressed as
/// `(head, inner, outer)` where `inner` is the modifier closer to the head.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreSet {
    n: usize,
    arc: Vec<f64>,
    sib: Option<Vec<f64>>,
    span: Option<Vec<f64>>,
    left: Option<Vec<f64>>,
    right: Option<Vec<f64>>,
}

impl ScoreSet {
    /// All-zero tables for the requested components. The arc table is always
    /// present.
    pub fn zeros(n: usize, components: &[Component]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySentence);
        }
        let m = n + 1;
        let mut s = ScoreSet {
            n,
            arc: vec![0.0; m * m],
            sib: None,
            span: None,
            left: None,
            right: None,
        };
        for &c in components {
            match c {
                Component::Arc => {}
                Component::Sib => s.sib = Some(vec![0.0; m * m * m]),
                Component::Span => s.span = Some(vec![0.0; n * m * m]),
                Component::Left => s.left = Some(vec![0.0; n * m]),
                Component::Right => s.right = Some(vec![0.0; n * m]),
            }
        }
        Ok(s)
    }

    /// Tables for `components` whose valid cells are drawn from `sample`, in
    /// a fixed cell order (arc, sib, span, left, right; row-major within each).
    pub fn filled_with(
        n: usize,
        components: &[Component],
        mut sample: impl FnMut() -> f64,
    ) -> Result<Self> {
        let mut s = Self::zeros(n, components)?;
        for h in 0..=n {
            for d in 1..=n {
                if h != d {
                    s.set_arc(h, d, sample());
                }
            }
        }
        if s.sib.is_some() {
            for (h, inner, outer) in sibling_triples(n) {
                s.set_sib(h, inner, outer, sample());
            }
        }
        if s.span.is_some() {
            for h in 1..=n {
                for l in 0..h {
                    for r in h..=n {
                        s.set_span(h, l, r, sample());
                    }
                }
            }
        }
        if s.left.is_some() {
            for h in 1..=n {
                for l in 0..h {
                    s.set_left(h, l, sample());
                }
            }
        }
        if s.right.is_some() {
            for h in 1..=n {
                for r in h..=n {
                    s.set_right(h, r, sample());
                }
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has(&self, component: Component) -> bool {
        match component {
            Component::Arc => true,
            Component::Sib => self.sib.is_some(),
            Component::Span => self.span.is_some(),
            Component::Left => self.left.is_some(),
            Component::Right => self.right.is_some(),
        }
    }

    /// Checks that every component `algorithm` reads is present.
    pub fn require(&self, algorithm: Algorithm) -> Result<()> {
        match algorithm.components().iter().find(|&&c| !self.has(c)) {
            Some(&component) => Err(Error::MissingComponent {
                algorithm,
                component,
            }),
            None => Ok(()),
        }
    }

    /// Drops the tables `algorithm` does not read.
    pub fn restricted_to(mut self, algorithm: Algorithm) -> Self {
        if !algorithm.uses(Component::Sib) {
            self.sib = None;
        }
        if !algorithm.uses(Component::Span) {
            self.span = None;
        }
        if !algorithm.uses(Component::Left) {
            self.left = None;
        }
        if !algorithm.uses(Component::Right) {
            self.right = None;
        }
        self
    }

    /// Adds or replaces a zero-filled component.
    pub fn with_zero_component(mut self, component: Component) -> Self {
        let m = self.n + 1;
        let n = self.n;
        match component {
            Component::Arc => self.arc = vec![0.0; m * m],
            Component::Sib => self.sib = Some(vec![0.0; m * m * m]),
            Component::Span => self.span = Some(vec![0.0; n * m * m]),
            Component::Left => self.left = Some(vec![0.0; n * m]),
            Component::Right => self.right = Some(vec![0.0; n * m]),
        }
        self
    }

    #[inline]
    fn arc_index(&self, h: usize, d: usize) -> usize {
        debug_assert!(h <= self.n && (1..=self.n).contains(&d) && h != d);
        h * (self.n + 1) + d
    }

    // Stored as [h][outer][inner] so the inner index is contiguous.
    #[inline]
    fn sib_index(&self, h: usize, inner: usize, outer: usize) -> usize {
        debug_assert!(
            (outer < inner && inner < h || h < inner && inner < outer) && outer >= 1,
            "invalid sibling triple ({h}, {inner}, {outer})"
        );
        let m = self.n + 1;
        (h * m + outer) * m + inner
    }

    #[inline]
    fn span_index(&self, h: usize, l: usize, r: usize) -> usize {
        debug_assert!(l < h && h <= r && r <= self.n, "invalid span ({l}, {r}, {h})");
        let m = self.n + 1;
        ((h - 1) * m + l) * m + r
    }

    #[inline]
    fn boundary_index(&self, h: usize, k: usize) -> usize {
        debug_assert!((1..=self.n).contains(&h) && k <= self.n);
        (h - 1) * (self.n + 1) + k
    }

    #[inline]
    pub fn arc(&self, h: usize, d: usize) -> f64 {
        self.arc[self.arc_index(h, d)]
    }

    pub fn set_arc(&mut self, h: usize, d: usize, score: f64) {
        let i = self.arc_index(h, d);
        self.arc[i] = score;
    }

    /// Sibling score for head `h` taking `outer` right after `inner`.
    ///
    /// Panics if the sibling table is absent.
    #[inline]
    pub fn sib(&self, h: usize, inner: usize, outer: usize) -> f64 {
        let i = self.sib_index(h, inner, outer);
        self.sib.as_ref().expect("sibling scores absent")[i]
    }

    pub fn set_sib(&mut self, h: usize, inner: usize, outer: usize, score: f64) {
        let i = self.sib_index(h, inner, outer);
        self.sib.as_mut().expect("sibling scores absent")[i] = score;
    }

    /// Score of word `h` heading the interval `(l, r]`.
    #[inline]
    pub fn span(&self, h: usize, l: usize, r: usize) -> f64 {
        let i = self.span_index(h, l, r);
        self.span.as_ref().expect("span scores absent")[i]
    }

    pub fn set_span(&mut self, h: usize, l: usize, r: usize, score: f64) {
        let i = self.span_index(h, l, r);
        self.span.as_mut().expect("span scores absent")[i] = score;
    }

    /// Score of fencepost `l` being the left boundary of word `h`'s span.
    #[inline]
    pub fn left(&self, h: usize, l: usize) -> f64 {
        let i = self.boundary_index(h, l);
        self.left.as_ref().expect("left boundary scores absent")[i]
    }

    pub fn set_left(&mut self, h: usize, l: usize, score: f64) {
        let i = self.boundary_index(h, l);
        self.left.as_mut().expect("left boundary scores absent")[i] = score;
    }

    /// Score of fencepost `r` being the right boundary of word `h`'s span.
    #[inline]
    pub fn right(&self, h: usize, r: usize) -> f64 {
        let i = self.boundary_index(h, r);
        self.right.as_ref().expect("right boundary scores absent")[i]
    }

    pub fn set_right(&mut self, h: usize, r: usize, score: f64) {
        let i = self.boundary_index(h, r);
        self.right.as_mut().expect("right boundary scores absent")[i] = score;
    }

    /// True if every valid cell of every present table is finite.
    pub fn is_finite(&self) -> bool {
        let n = self.n;
        let arcs_ok = (0..=n).all(|h| (1..=n).all(|d| h == d || self.arc(h, d).is_finite()));
        let sib_ok = self.sib.is_none()
            || sibling_triples(n).all(|(h, i, o)| self.sib(h, i, o).is_finite());
        let span_ok = self.span.is_none()
            || (1..=n).all(|h| (0..h).all(|l| (h..=n).all(|r| self.span(h, l, r).is_finite())));
        let left_ok =
            self.left.is_none() || (1..=n).all(|h| (0..h).all(|l| self.left(h, l).is_finite()));
        let right_ok =
            self.right.is_none() || (1..=n).all(|h| (h..=n).all(|r| self.right(h, r).is_finite()));
        arcs_ok && sib_ok && span_ok && left_ok && right_ok
    }
}

/// Every valid `(head, inner, outer)` sibling triple for a sentence of `n`
/// words, root included as a head.
pub fn sibling_triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=n).flat_map(move |h| {
        let left = (1..h).flat_map(move |inner| (1..inner).map(move |outer| (h, inner, outer)));
        let right = (h + 1..=n)
            .flat_map(move |inner| (inner + 1..=n).map(move |outer| (h, inner, outer)));
        left.chain(right)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word_tree_is_valid() {
        assert!(validate_tree(&[0], 1, RootMode::Single));
    }

    #[test]
    fn figure_tree_is_valid() {
        assert!(validate_tree(&[2, 3, 0, 5, 3], 5, RootMode::Single));
    }

    #[test]
    fn projective_and_crossing_trees() {
        assert!(validate_tree(&[2, 0, 2, 2], 4, RootMode::Single));
        // Arcs 3 -> 1 and 4 -> 2 cross.
        assert!(!validate_tree(&[3, 4, 4, 0], 4, RootMode::Single));
        assert!(!validate_tree(&[3, 4, 1, 0], 4, RootMode::Single));
    }

    #[test]
    fn rejects_cycles_self_loops_and_bad_lengths() {
        assert!(!validate_tree(&[2, 1], 2, RootMode::Single));
        assert!(!validate_tree(&[1, 0], 2, RootMode::Single));
        assert!(!validate_tree(&[0, 3], 2, RootMode::Single));
        assert!(!validate_tree(&[0], 2, RootMode::Single));
        assert!(!validate_tree(&[], 0, RootMode::Single));
    }

    #[test]
    fn root_mode_controls_multiple_roots() {
        assert!(!validate_tree(&[0, 0], 2, RootMode::Single));
        assert!(validate_tree(&[0, 0], 2, RootMode::Multi));
        // Multi-root trees must still be projective.
        assert!(!validate_tree(&[0, 4, 0, 0], 4, RootMode::Multi));
    }

    #[test]
    fn components_per_algorithm() {
        use Component::*;
        let set = |s: &str| score_components_required(s).unwrap();
        assert_eq!(set("eisner1o"), [Arc].into());
        assert_eq!(set("eisner_satta_span"), [Arc, Span].into());
        assert_eq!(set("eisner_headsplit"), [Arc, Left, Right].into());
        assert_eq!(set("eisner2o_headsplit"), [Arc, Sib, Left, Right].into());
        assert!(matches!(
            score_components_required("cky"),
            Err(Error::UnknownAlgorithm(_))
        ));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }

    #[test]
    fn sibling_triples_are_valid_and_complete() {
        let n = 5;
        let triples: Vec<_> = sibling_triples(n).collect();
        let mut brute = Vec::new();
        for h in 0..=n {
            for i in 1..=n {
                for o in 1..=n {
                    if o < i && i < h || h < i && i < o {
                        brute.push((h, i, o));
                    }
                }
            }
        }
        let mut sorted = triples.clone();
        sorted.sort();
        brute.sort();
        assert_eq!(sorted, brute);
    }

    #[test]
    fn score_accessors_address_distinct_cells() {
        let mut counter = 0.0;
        let s = ScoreSet::filled_with(
            4,
            &[Component::Sib, Component::Span, Component::Left, Component::Right],
            || {
                counter += 1.0;
                counter
            },
        )
        .unwrap();
        let mut seen = std::collections::HashSet::new();
        for (h, i, o) in sibling_triples(4) {
            assert!(seen.insert(s.sib(h, i, o) as i64));
        }
        for h in 1..=4 {
            for l in 0..h {
                for r in h..=4 {
                    assert!(seen.insert(s.span(h, l, r) as i64));
                }
            }
        }
        assert!(s.is_finite());
    }

    #[test]
    fn missing_component_is_reported() {
        let s = ScoreSet::zeros(3, &[]).unwrap();
        assert!(s.require(Algorithm::Eisner1o).is_ok());
        assert!(matches!(
            s.require(Algorithm::EisnerSattaSpan),
            Err(Error::MissingComponent {
                component: Component::Span,
                ..
            })
        ));
    }
}
