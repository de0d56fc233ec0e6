//! Attachment scores.

use std::fmt;
use std::str::FromStr;

use crate::conllu::ConlluDocument;
use crate::error::{Error, Result};
use crate::model::{LabeledTree, Sentence};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PunctPolicy {
    #[default]
    ScoreAll,
    /// Skip words whose UPOS is `PUNCT`.
    ExcludePunct,
}

impl PunctPolicy {
    pub fn name(self) -> &'static str {
        match self {
            PunctPolicy::ScoreAll => "score-all",
            PunctPolicy::ExcludePunct => "exclude-punct",
        }
    }
}

impl fmt::Display for PunctPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PunctPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "score-all" => Ok(PunctPolicy::ScoreAll),
            "exclude-punct" => Ok(PunctPolicy::ExcludePunct),
            _ => Err(Error::InvalidConfig(format!("unknown punctuation policy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub uas: f64,
    pub las: f64,
    pub correct_heads: usize,
    pub correct_labeled: usize,
    pub total: usize,
    pub policy: PunctPolicy,
}

impl EvalReport {
    fn from_counts(correct_heads: usize, correct_labeled: usize, total: usize, policy: PunctPolicy) -> Self {
        let pct = |c: usize| if total == 0 { 0.0 } else { 100.0 * c as f64 / total as f64 };
        EvalReport {
            uas: pct(correct_heads),
            las: pct(correct_labeled),
            correct_heads,
            correct_labeled,
            total,
            policy,
        }
    }

    /// `key=value` lines for scripts.
    pub fn key_values(&self) -> String {
        format!(
            "uas={:.4}\nlas={:.4}\ncorrect_heads={}\ncorrect_labeled={}\ntotal={}\npunct={}\n",
            self.uas, self.las, self.correct_heads, self.correct_labeled, self.total, self.policy
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Metric   Correct    Total    Score")?;
        writeln!(f, "UAS    {:>9} {:>8} {:>8.2}", self.correct_heads, self.total, self.uas)?;
        writeln!(f, "LAS    {:>9} {:>8} {:>8.2}", self.correct_labeled, self.total, self.las)?;
        write!(f, "punctuation: {}", self.policy)
    }
}

/// Compares the HEAD and DEPREL columns of `pred` against `gold`. Both
/// documents must hold the same sentences with the same word forms. Gold
/// words without a head are not scored.
pub fn evaluate(gold: &ConlluDocument, pred: &ConlluDocument, policy: PunctPolicy) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::Misaligned(format!(
            "{} gold sentences, {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let (mut heads, mut labeled, mut total) = (0, 0, 0);
    for (s, (g, p)) in gold.sentences.iter().zip(&pred.sentences).enumerate() {
        let (g, p) = (&g.sentence.tokens, &p.sentence.tokens);
        if g.len() != p.len() {
            return Err(Error::Misaligned(format!(
                "sentence {}: {} gold words, {} predicted",
                s + 1,
                g.len(),
                p.len()
            )));
        }
        for (i, (gt, pt)) in g.iter().zip(p).enumerate() {
            if gt.form != pt.form {
                return Err(Error::Misaligned(format!(
                    "sentence {}, word {}: `{}` vs `{}`",
                    s + 1,
                    i + 1,
                    gt.form,
                    pt.form
                )));
            }
            if gt.gold_head.is_none() || (policy == PunctPolicy::ExcludePunct && gt.upos == "PUNCT") {
                continue;
            }
            total += 1;
            if gt.gold_head == pt.gold_head {
                heads += 1;
                if gt.gold_label == pt.gold_label {
                    labeled += 1;
                }
            }
        }
    }
    Ok(EvalReport::from_counts(heads, labeled, total, policy))
}

/// Scores predicted trees directly against the gold annotation of `gold`.
pub fn evaluate_trees(gold: &[Sentence], pred: &[LabeledTree], policy: PunctPolicy) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::Misaligned(format!(
            "{} gold sentences, {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let (mut heads, mut labeled, mut total) = (0, 0, 0);
    for (s, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.tree.n() {
            return Err(Error::Misaligned(format!(
                "sentence {}: {} gold words, {} predicted",
                s + 1,
                g.len(),
                p.tree.n()
            )));
        }
        for (i, t) in g.tokens.iter().enumerate() {
            if t.gold_head.is_none() || (policy == PunctPolicy::ExcludePunct && t.upos == "PUNCT") {
                continue;
            }
            total += 1;
            if t.gold_head == Some(p.tree.head(i + 1)) {
                heads += 1;
                if t.gold_label.as_deref() == Some(p.labels[i].as_str()) {
                    labeled += 1;
                }
            }
        }
    }
    Ok(EvalReport::from_counts(heads, labeled, total, policy))
}

/// UAS of attaching every word to its left neighbour (the first word to the
/// root).
pub fn attach_previous_uas(gold: &ConlluDocument, policy: PunctPolicy) -> f64 {
    let (mut correct, mut total) = (0usize, 0usize);
    for s in &gold.sentences {
        for (i, t) in s.sentence.tokens.iter().enumerate() {
            if t.gold_head.is_none() || (policy == PunctPolicy::ExcludePunct && t.upos == "PUNCT") {
                continue;
            }
            total += 1;
            correct += usize::from(t.gold_head == Some(i));
        }
    }
    if total == 0 {
        0.0
    } else {
        100.0 * correct as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::read_conllu;

    fn sentence(heads: &[usize], labels: &[&str]) -> String {
        let mut out = String::new();
        for (i, (h, l)) in heads.iter().zip(labels).enumerate() {
            let upos = if *l == "punct" { "PUNCT" } else { "X" };
            out.push_str(&format!("{}\tw{i}\t_\t{upos}\t_\t_\t{h}\t{l}\t_\t_\n", i + 1));
        }
        out.push('\n');
        out
    }

    #[test]
    fn identical_documents_score_100() {
        let doc = read_conllu(&sentence(&[2, 0, 2], &["nsubj", "root", "punct"])).unwrap();
        let r = evaluate(&doc, &doc, PunctPolicy::ScoreAll).unwrap();
        assert_eq!((r.uas, r.las, r.total), (100.0, 100.0, 3));
    }

    #[test]
    fn one_wrong_head_in_ten() {
        let labels = ["a"; 10];
        let gold: Vec<usize> = (0..10).collect();
        let mut pred = gold.clone();
        pred[5] = 3;
        let g = read_conllu(&sentence(&gold, &labels)).unwrap();
        let p = read_conllu(&sentence(&pred, &labels)).unwrap();
        let r = evaluate(&g, &p, PunctPolicy::ScoreAll).unwrap();
        assert_eq!(r.uas, 90.0);
        assert_eq!(r.las, 90.0);
    }

    #[test]
    fn punctuation_policy() {
        let g = read_conllu(&sentence(&[2, 0, 2], &["nsubj", "root", "punct"])).unwrap();
        let p = read_conllu(&sentence(&[2, 0, 1], &["nsubj", "root", "punct"])).unwrap();
        let all = evaluate(&g, &p, PunctPolicy::ScoreAll).unwrap();
        assert_eq!((all.correct_heads, all.total), (2, 3));
        let no_punct = evaluate(&g, &p, PunctPolicy::ExcludePunct).unwrap();
        assert_eq!((no_punct.correct_heads, no_punct.total), (2, 2));
        assert_eq!(no_punct.uas, 100.0);
    }

    #[test]
    fn misalignment() {
        let g = read_conllu(&sentence(&[2, 0], &["a", "b"])).unwrap();
        let p = read_conllu(&sentence(&[0], &["b"])).unwrap();
        assert!(matches!(evaluate(&g, &p, PunctPolicy::ScoreAll), Err(Error::Misaligned(_))));
    }

    #[test]
    fn trees_score_like_documents() {
        let g = read_conllu(&sentence(&[2, 0, 2], &["nsubj", "root", "punct"])).unwrap();
        let p = read_conllu(&sentence(&[2, 0, 2], &["obj", "root", "x"])).unwrap();
        let by_doc = evaluate(&g, &p, PunctPolicy::ScoreAll).unwrap();
        let sentences: Vec<_> = g.sentences.iter().map(|s| s.sentence.clone()).collect();
        let trees: Vec<_> = p.sentences.iter().map(|s| s.gold.clone().unwrap()).collect();
        let by_tree = evaluate_trees(&sentences, &trees, PunctPolicy::ScoreAll).unwrap();
        assert_eq!(by_doc, by_tree);
        assert_eq!((by_doc.correct_heads, by_doc.correct_labeled), (3, 1));
    }

    #[test]
    fn baseline() {
        let g = read_conllu(&sentence(&[0, 1, 2, 2], &["a"; 4])).unwrap();
        assert_eq!(attach_previous_uas(&g, PunctPolicy::ScoreAll), 75.0);
    }

    #[test]
    fn report_formats() {
        let g = read_conllu(&sentence(&[2, 0], &["a", "b"])).unwrap();
        let r = evaluate(&g, &g, PunctPolicy::ScoreAll).unwrap();
        assert!(r.key_values().contains("uas=100.0000\n"));
        assert!(r.to_string().starts_with("Metric"));
    }
}
