//! JSON-lines score files: one object per sentence.
//!
//! ```text
//! {"n": 2, "arc": [[0,5,1],[0,0,3],[0,0,0]], "span": [[1,0,2,1.5]]}
//! ```
//!
//! `arc` is dense `(n+1) x (n+1)` indexed `[head][dependent]`; column 0 and
//! the diagonal are ignored. `left` and `right` are dense `n x (n+1)`
//! indexed `[head - 1][fencepost]`. `sib` (`[h, inner, outer, score]`) and
//! `span` (`[h, l, r, score]`) are sparse; unlisted cells are zero.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sibling_triples, Component, ScoreSet};

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    n: usize,
    arc: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sib: Option<Vec<(usize, usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    span: Option<Vec<(usize, usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<Vec<Vec<f64>>>,
}

fn check_dense(name: &str, rows: &[Vec<f64>], nrows: usize, ncols: usize) -> std::result::Result<(), String> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(format!("`{name}` must be {nrows} rows of {ncols} numbers"));
    }
    Ok(())
}

impl Record {
    fn into_scores(self) -> std::result::Result<ScoreSet, String> {
        let n = self.n;
        if n == 0 {
            return Err("`n` must be at least 1".into());
        }
        let mut comps = Vec::new();
        if self.sib.is_some() {
            comps.push(Component::Sib);
        }
        if self.span.is_some() {
            comps.push(Component::Span);
        }
        if self.left.is_some() {
            comps.push(Component::Left);
        }
        if self.right.is_some() {
            comps.push(Component::Right);
        }
        let mut s = ScoreSet::zeros(n, &comps).map_err(|e| e.to_string())?;
        check_dense("arc", &self.arc, n + 1, n + 1)?;
        for (h, row) in self.arc.iter().enumerate() {
            for (d, &v) in row.iter().enumerate().skip(1) {
                if h != d {
                    s.set_arc(h, d, v);
                }
            }
        }
        for &(h, inner, outer, v) in self.sib.iter().flatten() {
            let valid = outer >= 1
                && outer <= n
                && (outer < inner && inner < h || h < inner && inner < outer);
            if !valid {
                return Err(format!("invalid sibling triple [{h}, {inner}, {outer}]"));
            }
            s.set_sib(h, inner, outer, v);
        }
        for &(h, l, r, v) in self.span.iter().flatten() {
            if !(l < h && h <= r && r <= n) {
                return Err(format!("invalid span [{h}, {l}, {r}]"));
            }
            s.set_span(h, l, r, v);
        }
        if let Some(rows) = &self.left {
            check_dense("left", rows, n, n + 1)?;
            for h in 1..=n {
                for l in 0..h {
                    s.set_left(h, l, rows[h - 1][l]);
                }
            }
        }
        if let Some(rows) = &self.right {
            check_dense("right", rows, n, n + 1)?;
            for h in 1..=n {
                for r in h..=n {
                    s.set_right(h, r, rows[h - 1][r]);
                }
            }
        }
        Ok(s)
    }

    fn from_scores(s: &ScoreSet) -> Self {
        let n = s.n();
        let arc = (0..=n)
            .map(|h| (0..=n).map(|d| if d == 0 || d == h { 0.0 } else { s.arc(h, d) }).collect())
            .collect();
        let sib = s.has(Component::Sib).then(|| {
            sibling_triples(n)
                .map(|(h, i, o)| (h, i, o, s.sib(h, i, o)))
                .filter(|t| t.3 != 0.0)
                .collect()
        });
        let span = s.has(Component::Span).then(|| {
            let mut v = Vec::new();
            for h in 1..=n {
                for l in 0..h {
                    for r in h..=n {
                        if s.span(h, l, r) != 0.0 {
                            v.push((h, l, r, s.span(h, l, r)));
                        }
                    }
                }
            }
            v
        });
        let left = s.has(Component::Left).then(|| {
            (1..=n)
                .map(|h| (0..=n).map(|l| if l < h { s.left(h, l) } else { 0.0 }).collect())
                .collect()
        });
        let right = s.has(Component::Right).then(|| {
            (1..=n)
                .map(|h| (0..=n).map(|r| if r >= h { s.right(h, r) } else { 0.0 }).collect())
                .collect()
        });
        Record {
            n,
            arc,
            sib,
            span,
            left,
            right,
        }
    }
}

/// Parses one score record.
pub fn parse_score_line(line: &str, line_no: usize) -> Result<ScoreSet> {
    let err = |message: String| Error::ScoreFile {
        line: line_no,
        message,
    };
    let record: Record = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
    record.into_scores().map_err(err)
}

/// Reads every non-blank line of a score file.
pub fn read_scores<R: BufRead>(r: R) -> Result<Vec<ScoreSet>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(parse_score_line(&line, i + 1)?);
        }
    }
    Ok(out)
}

pub fn write_score_line<W: Write>(mut w: W, s: &ScoreSet) -> Result<()> {
    serde_json::to_writer(&mut w, &Record::from_scores(s)).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn minimal_record() {
        let s = parse_score_line(r#"{"n": 2, "arc": [[0,5,1],[0,0,3],[0,0,0]]}"#, 1).unwrap();
        assert_eq!((s.arc(0, 1), s.arc(0, 2), s.arc(1, 2), s.arc(2, 1)), (5.0, 1.0, 3.0, 0.0));
        assert!(!s.has(Component::Span));
    }

    #[test]
    fn sparse_cells_default_to_zero() {
        let line = r#"{"n": 3, "arc": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            "span": [[2,0,3,1.5]], "sib": [[1,2,3,-2]]}"#
            .replace('\n', "");
        let s = parse_score_line(&line, 1).unwrap();
        assert_eq!(s.span(2, 0, 3), 1.5);
        assert_eq!(s.span(2, 1, 2), 0.0);
        assert_eq!(s.sib(1, 2, 3), -2.0);
        assert_eq!(s.sib(0, 1, 2), 0.0);
    }

    #[test]
    fn rejects_bad_records() {
        let bad = [
            r#"{"n": 2, "arc": [[0,1],[0,0]]}"#,
            r#"{"n": 1, "arc": [[0,1],[0,0]], "span": [[1,1,1,0]]}"#,
            r#"{"n": 1, "arc": [[0,1],[0,0]], "bogus": 1}"#,
            r#"{"n": 0, "arc": [[0]]}"#,
            "not json",
        ];
        for (i, line) in bad.iter().enumerate() {
            assert!(
                matches!(parse_score_line(line, i + 1), Err(Error::ScoreFile { line, .. }) if line == i + 1),
                "{line}"
            );
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let all = [Component::Sib, Component::Span, Component::Left, Component::Right];
        let s = ScoreSet::filled_with(4, &all, || rng.gen_range(-1.0..1.0)).unwrap();
        let mut buf = Vec::new();
        write_score_line(&mut buf, &s).unwrap();
        write_score_line(&mut buf, &s).unwrap();
        let back = read_scores(buf.as_slice()).unwrap();
        assert_eq!(back, vec![s.clone(), s]);
    }
}
