//! CoNLL-U reading and writing.
//!
//! Every input line is kept with its original terminator, so a document
//! writes back byte for byte. Only the HEAD and DEPREL columns of syntactic
//! word lines are ever rewritten.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{LabeledTree, ProjectiveTree, RootMode, Sentence, Token};

const COLUMNS: usize = 10;
const HEAD: usize = 6;
const DEPREL: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineKind {
    Comment,
    /// A syntactic word; the payload is its 1-based index.
    Word(usize),
    /// Multiword-token range (`3-4`) or empty node (`5.1`), kept verbatim.
    Passthrough,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub kind: LineKind,
    pub text: String,
    /// `"\n"`, `"\r\n"`, or empty for a final unterminated line.
    pub eol: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConlluSentence {
    pub lines: Vec<Line>,
    /// Blank lines following the sentence, verbatim.
    pub trailer: String,
    pub sentence: Sentence,
    /// Gold annotation when every word has a head, the heads form a
    /// projective tree and every word has a label.
    pub gold: Option<LabeledTree>,
}

impl ConlluSentence {
    pub fn comments(&self) -> impl Iterator<Item = &str> {
        self.lines
            .iter()
            .filter(|l| l.kind == LineKind::Comment)
            .map(|l| l.text.as_str())
    }

    /// The value of a `# key = value` comment.
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.comments().find_map(|c| {
            let (k, v) = c.trim_start_matches('#').split_once('=')?;
            (k.trim() == key).then(|| v.trim())
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConlluDocument {
    /// Blank lines before the first sentence, verbatim.
    pub leading: String,
    pub sentences: Vec<ConlluSentence>,
}

impl ConlluDocument {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

fn split_lines(text: &str) -> impl Iterator<Item = (&str, &str)> {
    text.split_inclusive('\n').map(|raw| {
        if let Some(body) = raw.strip_suffix("\r\n") {
            (body, "\r\n")
        } else if let Some(body) = raw.strip_suffix('\n') {
            (body, "\n")
        } else {
            (raw, "")
        }
    })
}

struct Builder {
    lines: Vec<Line>,
    tokens: Vec<Token>,
    first_line: usize,
}

impl Builder {
    fn new(first_line: usize) -> Self {
        Builder {
            lines: Vec::new(),
            tokens: Vec::new(),
            first_line,
        }
    }

    fn finish(self, trailer: String) -> Result<ConlluSentence> {
        if self.tokens.is_empty() {
            return Err(Error::Conllu {
                line: self.first_line,
                message: "sentence has no syntactic words".into(),
            });
        }
        let n = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.gold_head.is_some_and(|h| h > n) {
                let line = self
                    .lines
                    .iter()
                    .position(|l| l.kind == LineKind::Word(i + 1))
                    .map_or(self.first_line, |p| self.first_line + p);
                return Err(Error::Conllu {
                    line,
                    message: format!("HEAD {} exceeds sentence length {n}", t.gold_head.unwrap()),
                });
            }
        }
        let sentence = Sentence::new(self.tokens);
        let gold = sentence.gold_tree(RootMode::Multi).and_then(|tree| {
            let labels: Option<Vec<String>> =
                sentence.tokens.iter().map(|t| t.gold_label.clone()).collect();
            LabeledTree::new(tree, labels?).ok()
        });
        Ok(ConlluSentence {
            lines: self.lines,
            trailer,
            sentence,
            gold,
        })
    }
}

fn parse_word(fields: &[&str], expected_id: usize, line: usize) -> Result<Token> {
    let err = |message: String| Error::Conllu { line, message };
    let id: usize = fields[0]
        .parse()
        .map_err(|_| err(format!("invalid ID `{}`", fields[0])))?;
    if id != expected_id {
        return Err(err(format!("expected word ID {expected_id}, found {id}")));
    }
    let gold_head = match fields[HEAD] {
        "_" => None,
        h => Some(
            h.parse::<usize>()
                .map_err(|_| err(format!("HEAD `{h}` is not an integer")))?,
        ),
    };
    if gold_head == Some(id) {
        return Err(err(format!("word {id} is its own head")));
    }
    let gold_label = match fields[DEPREL] {
        "_" => None,
        l => Some(l.to_owned()),
    };
    Ok(Token {
        form: fields[1].to_owned(),
        upos: fields[3].to_owned(),
        xpos: fields[4].to_owned(),
        gold_head,
        gold_label,
    })
}

/// Parses a CoNLL-U document. Line numbers in errors are 1-based.
pub fn read_conllu(text: &str) -> Result<ConlluDocument> {
    let mut doc = ConlluDocument::default();
    let mut current: Option<Builder> = None;
    let mut blank = String::new();

    for (i, (body, eol)) in split_lines(text).enumerate() {
        let line = i + 1;
        if body.trim().is_empty() {
            blank.push_str(body);
            blank.push_str(eol);
            continue;
        }
        if !blank.is_empty() {
            match current.take() {
                Some(b) => doc.sentences.push(b.finish(std::mem::take(&mut blank))?),
                None => doc.leading = std::mem::take(&mut blank),
            }
        }
        let b = current.get_or_insert_with(|| Builder::new(line));
        let kind = if body.starts_with('#') {
            if !b.tokens.is_empty() {
                return Err(Error::Conllu {
                    line,
                    message: "comment inside a sentence body".into(),
                });
            }
            LineKind::Comment
        } else {
            let fields: Vec<&str> = body.split('\t').collect();
            if fields.len() != COLUMNS {
                return Err(Error::Conllu {
                    line,
                    message: format!("expected {COLUMNS} tab-separated columns, found {}", fields.len()),
                });
            }
            if fields[0].contains(['-', '.']) {
                LineKind::Passthrough
            } else {
                let token = parse_word(&fields, b.tokens.len() + 1, line)?;
                b.tokens.push(token);
                LineKind::Word(b.tokens.len())
            }
        };
        b.lines.push(Line {
            kind,
            text: body.to_owned(),
            eol: eol.to_owned(),
        });
    }
    match current {
        Some(b) => doc.sentences.push(b.finish(blank)?),
        None => doc.leading = blank,
    }
    Ok(doc)
}

fn replace_columns(text: &str, head: usize, label: &str) -> String {
    let mut out = String::with_capacity(text.len() + 4);
    for (c, field) in text.split('\t').enumerate() {
        if c > 0 {
            out.push('\t');
        }
        match c {
            HEAD => write!(out, "{head}").unwrap(),
            DEPREL => out.push_str(label),
            _ => out.push_str(field),
        }
    }
    out
}

/// Serializes `doc`, replacing HEAD and DEPREL with `predictions` when given.
pub fn write_conllu(doc: &ConlluDocument, predictions: Option<&[LabeledTree]>) -> Result<String> {
    if let Some(p) = predictions {
        if p.len() != doc.len() {
            return Err(Error::Misaligned(format!(
                "{} predictions for {} sentences",
                p.len(),
                doc.len()
            )));
        }
    }
    let mut out = doc.leading.clone();
    for (s, cs) in doc.sentences.iter().enumerate() {
        let pred = predictions.map(|p| &p[s]);
        if let Some(p) = pred {
            if p.tree.n() != cs.sentence.len() {
                return Err(Error::LengthMismatch {
                    expected: cs.sentence.len(),
                    actual: p.tree.n(),
                });
            }
        }
        for line in &cs.lines {
            match (&line.kind, pred) {
                (LineKind::Word(i), Some(p)) => {
                    out.push_str(&replace_columns(&line.text, p.tree.head(*i), &p.labels[i - 1]))
                }
                _ => out.push_str(&line.text),
            }
            out.push_str(&line.eol);
        }
        out.push_str(&cs.trailer);
    }
    Ok(out)
}

/// Unlabeled prediction with every label set to `_`.
pub fn unlabeled(tree: ProjectiveTree) -> LabeledTree {
    let labels = vec!["_".to_owned(); tree.n()];
    LabeledTree { tree, labels }
}
