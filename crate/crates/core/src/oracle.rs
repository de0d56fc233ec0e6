//! Exhaustive enumeration of projective trees, used as ground truth for the
//! decoders.
//!
//! Trees are built by recursive interval construction: a subtree over an
//! interval picks its head, and each side of the head is partitioned into a
//! sequence of adjacent child subtrees. Shapes depend only on interval
//! length, so they are built once per length and shifted into place.

use crate::decoders::DecodeResult;
use crate::error::{Error, Result};
use crate::model::{Algorithm, ProjectiveTree, RootMode, ScoreSet};
use crate::tree_ops::TreeDecomposition;

pub const MAX_ENUMERATION_N: usize = 10;

/// Marks the root(s) of a forest shape.
const OPEN: u8 = u8::MAX;

/// Fixed-width shapes over `len` words. Each entry holds, per word, the
/// offset of its head within the shape or [`OPEN`].
struct Shapes {
    len: usize,
    data: Vec<u8>,
}

impl Shapes {
    fn count(&self) -> usize {
        if self.len == 0 {
            self.data.len()
        } else {
            self.data.len() / self.len
        }
    }

    fn get(&self, i: usize) -> &[u8] {
        &self.data[i * self.len..(i + 1) * self.len]
    }
}

struct ShapeTable {
    /// Single subtrees (exactly one open word) by length.
    subtrees: Vec<Shapes>,
    /// Sequences of adjacent subtrees by length.
    forests: Vec<Shapes>,
}

impl ShapeTable {
    fn new(n: usize) -> Self {
        let mut table = ShapeTable {
            subtrees: vec![Shapes { len: 0, data: Vec::new() }],
            // The empty forest: one entry of width zero.
            forests: vec![Shapes { len: 0, data: vec![0] }],
        };
        for len in 1..=n {
            let sub = table.build_subtrees(len);
            table.subtrees.push(sub);
            let forest = table.build_forests(len);
            table.forests.push(forest);
        }
        table
    }

    fn forest_count(&self, len: usize) -> usize {
        if len == 0 {
            1
        } else {
            self.forests[len].count()
        }
    }

    fn forest(&self, len: usize, i: usize) -> &[u8] {
        if len == 0 {
            &[]
        } else {
            self.forests[len].get(i)
        }
    }

    fn build_subtrees(&self, len: usize) -> Shapes {
        let mut data = Vec::new();
        for h in 0..len {
            let right_len = len - h - 1;
            for a in 0..self.forest_count(h) {
                for b in 0..self.forest_count(right_len) {
                    for &x in self.forest(h, a) {
                        data.push(if x == OPEN { h as u8 } else { x });
                    }
                    data.push(OPEN);
                    for &x in self.forest(right_len, b) {
                        data.push(if x == OPEN { h as u8 } else { x + h as u8 + 1 });
                    }
                }
            }
        }
        Shapes { len, data }
    }

    fn build_forests(&self, len: usize) -> Shapes {
        let mut data = Vec::new();
        for first in 1..=len {
            let rest = len - first;
            let subs = &self.subtrees[first];
            for a in 0..subs.count() {
                for b in 0..self.forest_count(rest) {
                    data.extend_from_slice(subs.get(a));
                    for &x in self.forest(rest, b) {
                        data.push(if x == OPEN { OPEN } else { x + first as u8 });
                    }
                }
            }
        }
        Shapes { len, data }
    }
}

/// Every projective tree over `n` words, each exactly once, in a fixed order.
pub struct TreeEnumeration {
    n: usize,
    shapes: Shapes,
    next: usize,
}

impl Iterator for TreeEnumeration {
    type Item = ProjectiveTree;

    fn next(&mut self) -> Option<ProjectiveTree> {
        if self.next >= self.shapes.count() {
            return None;
        }
        let heads = self
            .shapes
            .get(self.next)
            .iter()
            .map(|&x| if x == OPEN { 0 } else { x as usize + 1 })
            .collect();
        self.next += 1;
        debug_assert_eq!(self.n, self.shapes.len);
        Some(ProjectiveTree::from_heads_unchecked(heads))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.shapes.count() - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for TreeEnumeration {}

/// All projective trees over `n` words under `root_mode`. `n` must lie in
/// `1..=10`.
pub fn enumerate_projective(n: usize, root_mode: RootMode) -> Result<TreeEnumeration> {
    if !(1..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::EnumerationGuard(n));
    }
    let mut table = ShapeTable::new(n);
    let shapes = match root_mode {
        RootMode::Single => table.subtrees.swap_remove(n),
        RootMode::Multi => table.forests.swap_remove(n),
    };
    Ok(TreeEnumeration {
        n,
        shapes,
        next: 0,
    })
}

/// Enumerated trees with their decompositions, reusable across score sets.
pub struct Oracle {
    n: usize,
    trees: Vec<(ProjectiveTree, TreeDecomposition)>,
}

impl Oracle {
    pub fn new(n: usize, root_mode: RootMode) -> Result<Self> {
        let trees = enumerate_projective(n, root_mode)?
            .map(|t| {
                let d = TreeDecomposition::new(&t);
                (t, d)
            })
            .collect();
        Ok(Oracle { n, trees })
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> impl Iterator<Item = &ProjectiveTree> {
        self.trees.iter().map(|(t, _)| t)
    }

    /// The first enumerated tree of maximal score.
    pub fn argmax(&self, s: &ScoreSet, algorithm: Algorithm) -> Result<DecodeResult> {
        if s.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: s.n(),
            });
        }
        s.require(algorithm)?;
        let mut best: Option<(usize, f64)> = None;
        for (i, (_, d)) in self.trees.iter().enumerate() {
            let v = d.score(s, algorithm);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        let (i, score) = best.expect("at least one tree");
        Ok(DecodeResult {
            tree: self.trees[i].0.clone(),
            score,
        })
    }

    /// Scores of every enumerated tree, in enumeration order.
    pub fn scores(&self, s: &ScoreSet, algorithm: Algorithm) -> Vec<f64> {
        self.trees.iter().map(|(_, d)| d.score(s, algorithm)).collect()
    }
}

/// Maximizes `algorithm`'s objective by scoring every projective tree.
pub fn brute_force_argmax(
    s: &ScoreSet,
    algorithm: Algorithm,
    root_mode: RootMode,
) -> Result<DecodeResult> {
    Oracle::new(s.n(), root_mode)?.argmax(s, algorithm)
}
