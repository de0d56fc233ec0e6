//! Projective dependency parsing with joint arc-factored and headed-span
//! objectives.
//!
//! ```
//! use spandep::{decode, Algorithm, Component, RootMode, ScoreSet};
//!
//! let mut s = ScoreSet::zeros(3, &[Component::Left, Component::Right])?;
//! s.set_arc(0, 2, 1.0);
//! s.set_arc(2, 1, 1.0);
//! s.set_arc(2, 3, 1.0);
//! let best = decode(Algorithm::EisnerHeadsplit, &s, RootMode::Single)?;
//! assert_eq!(best.tree.heads(), &[2, 0, 2]);
//! # Ok::<(), spandep::Error>(())
//! ```

pub mod bench;
pub mod conllu;
pub mod cost;
pub mod decoders;
pub mod error;
pub mod eval;
pub mod model;
pub mod oracle;
pub mod scorefile;
pub mod scorer;
pub mod trainer;
pub mod tree_ops;

pub use conllu::{read_conllu, write_conllu, ConlluDocument, ConlluSentence};
pub use cost::{augment, hamming, Augmented, CostConfig};
pub use decoders::{
    count_trees, decode, decode_eisner_1o, decode_eisner_2o_headsplit, decode_eisner_headsplit,
    decode_eisner_satta_span, DecodeResult,
};
pub use error::{Error, Result};
pub use eval::{attach_previous_uas, evaluate, evaluate_trees, EvalReport, PunctPolicy};
pub use model::{
    score_components_required, validate_tree, Algorithm, Component, HeadedSpan, LabeledTree,
    ProjectiveTree, RootMode, ScoreSet, Sentence, Token,
};
pub use oracle::{brute_force_argmax, enumerate_projective, Oracle, TreeEnumeration};
pub use scorer::{build_scores, parse, FeatureVector, LinearModel};
pub use trainer::{hinge_step, train, EpochStats, TrainConfig, TrainOutcome};
pub use tree_ops::{
    extract_headed_spans, extract_sibling_pairs, tree_score, TreeDecomposition,
};
