//! Sparse linear scoring: feature templates, weights, and the score tables
//! they induce.

pub mod features;

use std::io::{BufRead, Write};

use fnv::FnvHashMap;

use crate::decoders::decode;
use crate::error::{Error, Result};
use crate::model::{
    sibling_triples, Algorithm, Component, LabeledTree, ProjectiveTree, RootMode, ScoreSet, Sentence,
};
use crate::tree_ops::TreeDecomposition;

pub use features::{
    featurize_arc, featurize_boundary, featurize_sibling, featurize_span, FeatureId,
    FeatureVector, Featurizer, Side,
};

pub type Weights = FnvHashMap<FeatureId, f64>;

const MODEL_MAGIC: &str = "spandep-linear-model";
const MODEL_VERSION: u32 = 1;

/// Weights for structure scoring plus one weight map per dependency label.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub algorithm: Algorithm,
    pub weights: Weights,
    pub labels: Vec<String>,
    pub label_weights: Vec<Weights>,
}

impl LinearModel {
    pub fn new(algorithm: Algorithm, labels: Vec<String>) -> Self {
        let label_weights = vec![Weights::default(); labels.len()];
        LinearModel {
            algorithm,
            weights: Weights::default(),
            labels,
            label_weights,
        }
    }

    #[inline]
    pub fn weight(&self, id: FeatureId) -> f64 {
        self.weights.get(&id).copied().unwrap_or(0.0)
    }

    fn dot(&self, ids: &[FeatureId]) -> f64 {
        ids.iter().map(|id| self.weight(*id)).sum()
    }

    /// Best label for each arc of `tree`; `_` when the model has no labels.
    pub fn predict_labels(&self, x: &Sentence, tree: &ProjectiveTree) -> Vec<String> {
        let f = Featurizer::new(x);
        let mut ids = Vec::new();
        (1..=tree.n())
            .map(|d| {
                ids.clear();
                f.arc(tree.head(d), d, &mut ids);
                self.best_label(&ids)
                    .map_or_else(|| "_".to_owned(), |l| self.labels[l].clone())
            })
            .collect()
    }

    /// Index of the highest-scoring label for an arc's features; ties go to
    /// the earlier label.
    pub fn best_label(&self, arc_features: &[FeatureId]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (l, w) in self.label_weights.iter().enumerate() {
            let v: f64 = arc_features.iter().map(|id| w.get(id).copied().unwrap_or(0.0)).sum();
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((l, v));
            }
        }
        best.map(|(l, _)| l)
    }

    /// Textual dump: a header, the label inventory, then one line per
    /// nonzero weight, sorted by key.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{MODEL_MAGIC} {MODEL_VERSION}")?;
        writeln!(w, "algorithm {}", self.algorithm)?;
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(w, "label {i} {label}")?;
        }
        let mut entries: Vec<_> = self.weights.iter().filter(|(_, &v)| v != 0.0).collect();
        entries.sort_unstable_by_key(|(k, _)| **k);
        for (k, v) in entries {
            writeln!(w, "w {k:016x} {v:e}")?;
        }
        for (l, weights) in self.label_weights.iter().enumerate() {
            let mut entries: Vec<_> = weights.iter().filter(|(_, &v)| v != 0.0).collect();
            entries.sort_unstable_by_key(|(k, _)| **k);
            for (k, v) in entries {
                writeln!(w, "l {l} {k:016x} {v:e}")?;
            }
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let err = |line: usize, message: String| Error::ModelFile {
            line: line + 1,
            message,
        };
        let (_, header) = lines.next().ok_or_else(|| err(0, "empty model file".into()))?;
        let header = header?;
        match header.split_once(' ') {
            Some((MODEL_MAGIC, v)) if v == MODEL_VERSION.to_string() => {}
            _ => return Err(err(0, format!("unsupported header `{header}`"))),
        }
        let mut model: Option<LinearModel> = None;
        for (i, line) in lines {
            let line = line?;
            let fields: Vec<&str> = line.split(' ').collect();
            let parse_key = |s: &str| {
                u64::from_str_radix(s, 16).map_err(|e| err(i, format!("bad feature id: {e}")))
            };
            let parse_weight =
                |s: &str| s.parse::<f64>().map_err(|e| err(i, format!("bad weight: {e}")));
            match (fields.as_slice(), model.as_mut()) {
                (["algorithm", name], None) => {
                    model = Some(LinearModel::new(name.parse()?, Vec::new()));
                }
                (["label", idx, name], Some(m)) => {
                    if idx.parse::<usize>().ok() != Some(m.labels.len()) {
                        return Err(err(i, format!("label index {idx} out of order")));
                    }
                    m.labels.push((*name).to_owned());
                    m.label_weights.push(Weights::default());
                }
                (["w", key, value], Some(m)) => {
                    m.weights.insert(parse_key(key)?, parse_weight(value)?);
                }
                (["l", idx, key, value], Some(m)) => {
                    let l: usize = idx
                        .parse()
                        .ok()
                        .filter(|&l| l < m.labels.len())
                        .ok_or_else(|| err(i, format!("unknown label index {idx}")))?;
                    m.label_weights[l].insert(parse_key(key)?, parse_weight(value)?);
                }
                ([""], _) => {}
                _ => return Err(err(i, format!("unexpected line `{line}`"))),
            }
        }
        model.ok_or_else(|| err(1, "missing algorithm line".into()))
    }
}

/// Score tables for `x` holding exactly the components `algorithm` reads,
/// each valid cell the dot product of its features with the model weights.
pub fn build_scores(x: &Sentence, m: &LinearModel, algorithm: Algorithm) -> Result<ScoreSet> {
    let n = x.len();
    let f = Featurizer::new(x);
    let mut s = ScoreSet::zeros(n, algorithm.components())?;
    let mut ids = Vec::with_capacity(64);
    for h in 0..=n {
        for d in 1..=n {
            if h != d {
                ids.clear();
                f.arc(h, d, &mut ids);
                s.set_arc(h, d, m.dot(&ids));
            }
        }
    }
    if algorithm.uses(Component::Sib) {
        for (h, inner, outer) in sibling_triples(n) {
            ids.clear();
            f.sibling(h, inner, outer, &mut ids);
            s.set_sib(h, inner, outer, m.dot(&ids));
        }
    }
    if algorithm.uses(Component::Span) {
        for h in 1..=n {
            for l in 0..h {
                for r in h..=n {
                    ids.clear();
                    f.span(h, l, r, &mut ids);
                    s.set_span(h, l, r, m.dot(&ids));
                }
            }
        }
    }
    if algorithm.uses(Component::Left) {
        for h in 1..=n {
            for l in 0..h {
                ids.clear();
                f.boundary(h, l, Side::Left, &mut ids);
                s.set_left(h, l, m.dot(&ids));
            }
            for r in h..=n {
                ids.clear();
                f.boundary(h, r, Side::Right, &mut ids);
                s.set_right(h, r, m.dot(&ids));
            }
        }
    }
    Ok(s)
}

/// Decodes `x` with the model's algorithm and labels the result. Also
/// returns the tree's score.
pub fn parse(x: &Sentence, m: &LinearModel, root_mode: RootMode) -> Result<(LabeledTree, f64)> {
    let s = build_scores(x, m, m.algorithm)?;
    let r = decode(m.algorithm, &s, root_mode)?;
    let labels = m.predict_labels(x, &r.tree);
    Ok((LabeledTree { tree: r.tree, labels }, r.score))
}

/// Adds `scale` times the feature counts of every unit `algorithm` scores in
/// `tree` to `acc`.
pub fn accumulate_tree_features(
    f: &Featurizer,
    tree: &TreeDecomposition,
    algorithm: Algorithm,
    scale: f64,
    acc: &mut Weights,
) {
    let mut ids = Vec::with_capacity(64);
    for &(h, d) in &tree.arcs {
        f.arc(h, d, &mut ids);
    }
    if algorithm.uses(Component::Sib) {
        for &(h, inner, outer) in &tree.sibling_pairs {
            f.sibling(h, inner, outer, &mut ids);
        }
    }
    for sp in &tree.spans {
        if algorithm.uses(Component::Span) {
            f.span(sp.h, sp.l, sp.r, &mut ids);
        }
        if algorithm.uses(Component::Left) {
            f.boundary(sp.h, sp.l, Side::Left, &mut ids);
            f.boundary(sp.h, sp.r, Side::Right, &mut ids);
        }
    }
    for id in ids {
        *acc.entry(id).or_insert(0.0) += scale;
    }
}
