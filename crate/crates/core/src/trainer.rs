//! Max-margin training of the linear scorer with averaged subgradient steps.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::{augment, CostConfig};
use crate::decoders::decode;
use crate::error::{Error, Result};
use crate::eval::{evaluate_trees, EvalReport, PunctPolicy};
use crate::model::{Algorithm, ProjectiveTree, RootMode, Sentence};
use crate::scorer::{accumulate_tree_features, build_scores, parse, Featurizer, LinearModel, Weights};
use crate::tree_ops::{tree_score, TreeDecomposition};

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub cost: CostConfig,
    pub shuffle: bool,
    /// Evaluate on the dev set every this many epochs (and after the last).
    pub eval_every: usize,
    pub root_mode: RootMode,
    pub punct: PunctPolicy,
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: 1.0,
            seed: 1,
            algorithm,
            cost: CostConfig::for_model(algorithm),
            shuffle: true,
            eval_every: 1,
            root_mode: RootMode::Single,
            punct: PunctPolicy::ScoreAll,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidConfig("eval cadence must be at least 1".into()));
        }
        self.cost.validate(self.algorithm)
    }
}

/// Hinge loss of one sentence and the weight change that would fix it.
struct Violation {
    loss: f64,
    /// `lr * (phi(gold) - phi(pred))`, present when `loss > 0`.
    delta: Option<Weights>,
}

fn violation(x: &Sentence, gold: &ProjectiveTree, m: &LinearModel, cfg: &TrainConfig) -> Result<Violation> {
    let alg = cfg.algorithm;
    let s = build_scores(x, m, alg)?;
    let aug = augment(&s, gold, &cfg.cost, alg)?;
    let pred = decode(alg, &aug.scores, cfg.root_mode)?;
    if pred.tree == *gold {
        return Ok(Violation { loss: 0.0, delta: None });
    }
    // pred.score = s(pred) + cost(pred) + offset
    let loss = (pred.score - aug.offset - tree_score(gold, &s, alg)?).max(0.0);
    if loss == 0.0 {
        return Ok(Violation { loss, delta: None });
    }
    let f = Featurizer::new(x);
    let mut delta = Weights::default();
    let lr = cfg.learning_rate;
    accumulate_tree_features(&f, &TreeDecomposition::new(gold), alg, lr, &mut delta);
    accumulate_tree_features(&f, &TreeDecomposition::new(&pred.tree), alg, -lr, &mut delta);
    delta.retain(|_, v| *v != 0.0);
    Ok(Violation {
        loss,
        delta: Some(delta),
    })
}

/// One loss-augmented step on `(x, gold)`: returns the hinge loss before the
/// update and updates `m` in place when the loss is positive.
pub fn hinge_step(x: &Sentence, gold: &ProjectiveTree, m: &mut LinearModel, cfg: &TrainConfig) -> Result<f64> {
    let v = violation(x, gold, m, cfg)?;
    for (k, d) in v.delta.into_iter().flatten() {
        *m.weights.entry(k).or_insert(0.0) += d;
    }
    Ok(v.loss)
}

/// Current weights plus the running sum needed to recover their average.
#[derive(Default)]
struct Averaged {
    w: Weights,
    u: Weights,
}

impl Averaged {
    fn add(&mut self, k: u64, d: f64, step: f64) {
        *self.w.entry(k).or_insert(0.0) += d;
        *self.u.entry(k).or_insert(0.0) += step * d;
    }

    fn average(&self, step: f64) -> Weights {
        self.w
            .iter()
            .map(|(k, &w)| (*k, w - self.u.get(k).copied().unwrap_or(0.0) / step))
            .filter(|(_, v)| *v != 0.0)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub dev: Option<EvalReport>,
    pub elapsed: Duration,
}

impl EpochStats {
    pub fn log_line(&self) -> String {
        let dev = match &self.dev {
            Some(r) => format!("dev_uas={:.2} dev_las={:.2}", r.uas, r.las),
            None => "dev_uas=- dev_las=-".to_owned(),
        };
        format!(
            "epoch={} loss={:.4} {dev} elapsed={:.1}s",
            self.epoch,
            self.mean_loss,
            self.elapsed.as_secs_f64()
        )
    }
}

pub struct TrainOutcome {
    pub model: LinearModel,
    pub epochs: Vec<EpochStats>,
    /// Epoch whose averaged weights were returned.
    pub best_epoch: usize,
    /// Training sentences without a usable projective gold tree.
    pub skipped: usize,
}

/// Parses every sentence of `dev` with `m` and scores the result.
pub fn evaluate_model(m: &LinearModel, dev: &[Sentence], root_mode: RootMode, punct: PunctPolicy) -> Result<EvalReport> {
    let preds = dev
        .iter()
        .map(|x| parse(x, m, root_mode).map(|(t, _)| t))
        .collect::<Result<Vec<_>>>()?;
    evaluate_trees(dev, &preds, punct)
}

struct Example<'a> {
    x: &'a Sentence,
    gold: ProjectiveTree,
    labels: Vec<usize>,
}

/// Trains on the projective sentences of `corpus`. With a dev set, returns
/// the averaged weights of the evaluated epoch with the best dev UAS
/// (earliest on ties); otherwise those after the last epoch. `on_epoch`
/// sees each epoch's statistics as they are produced.
pub fn train(
    corpus: &[Sentence],
    dev: Option<&[Sentence]>,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let label_set: BTreeSet<&str> = corpus
        .iter()
        .flat_map(|x| x.tokens.iter().filter_map(|t| t.gold_label.as_deref()))
        .collect();
    let labels: Vec<String> = label_set.iter().map(|l| l.to_string()).collect();
    let mut examples = Vec::new();
    for x in corpus {
        let gold = x.gold_tree(cfg.root_mode);
        let lab: Option<Vec<usize>> = x
            .tokens
            .iter()
            .map(|t| t.gold_label.as_deref().and_then(|l| labels.binary_search_by(|p| p.as_str().cmp(l)).ok()))
            .collect();
        if let Some(gold) = gold {
            examples.push(Example {
                x,
                gold,
                labels: lab.unwrap_or_default(),
            });
        }
    }
    let skipped = corpus.len() - examples.len();
    if examples.is_empty() {
        return Err(Error::NoProjectiveSentences);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut model = LinearModel::new(cfg.algorithm, labels.clone());
    let mut structure = Averaged::default();
    let mut label_avg: Vec<Averaged> = labels.iter().map(|_| Averaged::default()).collect();
    let mut step = 1.0;
    let mut stats = Vec::new();
    let mut best: Option<(f64, usize, LinearModel)> = None;
    let start = Instant::now();
    let mut ids = Vec::new();

    let snapshot = |structure: &Averaged, label_avg: &[Averaged], step: f64| LinearModel {
        algorithm: cfg.algorithm,
        weights: structure.average(step),
        labels: labels.clone(),
        label_weights: label_avg.iter().map(|a| a.average(step)).collect(),
    };

    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut total_loss = 0.0;
        for &i in &order {
            let ex = &examples[i];
            model.weights = std::mem::take(&mut structure.w);
            let v = violation(ex.x, &ex.gold, &model, cfg);
            structure.w = std::mem::take(&mut model.weights);
            let v = v?;
            total_loss += v.loss;
            for (k, d) in v.delta.into_iter().flatten() {
                structure.add(k, d, step);
            }

            if !ex.labels.is_empty() {
                let f = Featurizer::new(ex.x);
                for d in 1..=ex.x.len() {
                    ids.clear();
                    f.arc(ex.gold.head(d), d, &mut ids);
                    let want = ex.labels[d - 1];
                    let got = best_label_augmented(&label_avg, &ids, want);
                    if got != want {
                        for &k in &ids {
                            label_avg[want].add(k, cfg.learning_rate, step);
                            label_avg[got].add(k, -cfg.learning_rate, step);
                        }
                    }
                }
            }
            step += 1.0;
        }
        let mean_loss = total_loss / examples.len() as f64;
        let evaluate_now = epoch % cfg.eval_every == 0 || epoch == cfg.epochs;
        let mut dev_report = None;
        if let (Some(dev), true) = (dev, evaluate_now) {
            let m = snapshot(&structure, &label_avg, step);
            let r = evaluate_model(&m, dev, cfg.root_mode, cfg.punct)?;
            if best.as_ref().is_none_or(|(uas, _, _)| r.uas > *uas) {
                best = Some((r.uas, epoch, m));
            }
            dev_report = Some(r);
        }
        let s = EpochStats {
            epoch,
            mean_loss,
            dev: dev_report,
            elapsed: start.elapsed(),
        };
        on_epoch(&s);
        stats.push(s);
    }
    let (model, best_epoch) = match best {
        Some((_, e, m)) => (m, e),
        None => (snapshot(&structure, &label_avg, step), cfg.epochs),
    };
    Ok(TrainOutcome {
        model,
        epochs: stats,
        best_epoch,
        skipped,
    })
}

/// Multiclass hinge: the label maximizing score plus a unit cost on every
/// label other than `gold`.
fn best_label_augmented(label_avg: &[Averaged], ids: &[u64], gold: usize) -> usize {
    let mut best = (gold, f64::NEG_INFINITY);
    for (l, a) in label_avg.iter().enumerate() {
        let mut v: f64 = ids.iter().map(|k| a.w.get(k).copied().unwrap_or(0.0)).sum();
        if l != gold {
            v += 1.0;
        }
        if v > best.1 {
            best = (l, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::hamming;
    use crate::model::Token;

    fn sentence(words: &[(&str, &str, usize, &str)]) -> Sentence {
        Sentence::new(
            words
                .iter()
                .map(|&(f, p, h, l)| Token {
                    gold_head: Some(h),
                    gold_label: Some(l.into()),
                    ..Token::new(f, p)
                })
                .collect(),
        )
    }

    fn example() -> Sentence {
        sentence(&[
            ("She", "PRON", 2, "nsubj"),
            ("reads", "VERB", 0, "root"),
            ("a", "DET", 4, "det"),
            ("book", "NOUN", 2, "obj"),
            (".", "PUNCT", 2, "punct"),
        ])
    }

    #[test]
    fn zero_model_loss_is_the_cost() {
        let x = example();
        let gold = x.gold_tree(RootMode::Single).unwrap();
        for a in Algorithm::ALL {
            let cfg = TrainConfig::new(a);
            let mut m = LinearModel::new(a, Vec::new());
            let s = build_scores(&x, &m, a).unwrap();
            let aug = augment(&s, &gold, &cfg.cost, a).unwrap();
            let pred = decode(a, &aug.scores, RootMode::Single).unwrap();
            let delta = hamming(
                &TreeDecomposition::new(&pred.tree),
                &TreeDecomposition::new(&gold),
                &cfg.cost,
                a,
            );
            let loss = hinge_step(&x, &gold, &mut m, &cfg).unwrap();
            assert!(loss > 0.0);
            assert_eq!(loss, delta, "{a}");
            assert!(!m.weights.is_empty());
        }
    }

    #[test]
    fn separated_example_gives_no_update() {
        let x = example();
        let gold = x.gold_tree(RootMode::Single).unwrap();
        let cfg = TrainConfig::new(Algorithm::Eisner1o);
        let mut m = LinearModel::new(Algorithm::Eisner1o, Vec::new());
        let mut phi = Weights::default();
        accumulate_tree_features(
            &Featurizer::new(&x),
            &TreeDecomposition::new(&gold),
            Algorithm::Eisner1o,
            100.0,
            &mut phi,
        );
        m.weights = phi;
        let before = m.clone();
        assert_eq!(hinge_step(&x, &gold, &mut m, &cfg).unwrap(), 0.0);
        assert_eq!(m, before);
    }

    #[test]
    fn repeated_steps_fit_one_sentence() {
        let x = example();
        let gold = x.gold_tree(RootMode::Single).unwrap();
        for a in Algorithm::ALL {
            let cfg = TrainConfig::new(a);
            let mut m = LinearModel::new(a, Vec::new());
            let mut losses = Vec::new();
            for _ in 0..50 {
                losses.push(hinge_step(&x, &gold, &mut m, &cfg).unwrap());
                if *losses.last().unwrap() == 0.0 {
                    break;
                }
            }
            assert_eq!(*losses.last().unwrap(), 0.0, "{a}: {losses:?}");
            assert!(losses.iter().all(|&l| l >= 0.0));
        }
    }

    #[test]
    fn training_is_deterministic_and_fits_a_singleton() {
        let corpus = vec![example()];
        let mut cfg = TrainConfig::new(Algorithm::Eisner2oHeadsplit);
        cfg.epochs = 20;
        let a = train(&corpus, Some(&corpus), &cfg, |_| {}).unwrap();
        let b = train(&corpus, Some(&corpus), &cfg, |_| {}).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.epochs.last().unwrap().mean_loss, 0.0);
        let r = evaluate_model(&a.model, &corpus, RootMode::Single, PunctPolicy::ScoreAll).unwrap();
        assert_eq!((r.uas, r.las), (100.0, 100.0));
    }

    #[test]
    fn skips_unusable_sentences() {
        // Crossing arcs 1 -> 3 and 2 -> 4.
        let crossing = sentence(&[
            ("a", "X", 0, "root"),
            ("b", "X", 1, "x"),
            ("c", "X", 1, "x"),
            ("d", "X", 2, "x"),
        ]);
        let cfg = TrainConfig::new(Algorithm::Eisner1o);
        assert!(matches!(
            train(std::slice::from_ref(&crossing), None, &cfg, |_| {}),
            Err(Error::NoProjectiveSentences)
        ));
        let out = train(&[crossing, example()], None, &cfg, |_| {}).unwrap();
        assert_eq!(out.skipped, 1);
        assert!(matches!(train(&[], None, &cfg, |_| {}), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = TrainConfig::new(Algorithm::Eisner1o);
        cfg.epochs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig::new(Algorithm::Eisner1o);
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
    }
}
