//! Hashed sparse feature templates for arcs, span boundaries, headed spans
//! and sibling pairs.

use std::hash::Hasher;

use fnv::FnvHasher;

use crate::error::{Error, Result};
use crate::model::Sentence;

pub type FeatureId = u64;

/// Number of fixed arc templates; in-between POS features come on top.
pub const ARC_TEMPLATES: usize = 36;
pub const BOUNDARY_TEMPLATES: usize = 11;
pub const SPAN_TEMPLATES: usize = 9;
pub const SIBLING_TEMPLATES: usize = 8;

/// Sparse multiset of feature ids, sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureVector {
    entries: Vec<(FeatureId, u32)>,
}

impl FeatureVector {
    pub fn from_ids(mut ids: Vec<FeatureId>) -> Self {
        ids.sort_unstable();
        let mut entries: Vec<(FeatureId, u32)> = Vec::with_capacity(ids.len());
        for id in ids {
            match entries.last_mut() {
                Some((last, count)) if *last == id => *count += 1,
                _ => entries.push((id, 1)),
            }
        }
        FeatureVector { entries }
    }

    /// Number of distinct features.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, id: FeatureId) -> u32 {
        self.entries
            .binary_search_by_key(&id, |&(f, _)| f)
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, u32)> + '_ {
        self.entries.iter().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn hash_str(prefix: u8, s: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write_u8(prefix);
    h.write(s.as_bytes());
    h.finish()
}

#[inline]
fn feat(template: u8, parts: &[u64]) -> FeatureId {
    let mut h = FnvHasher::default();
    h.write_u8(template);
    for &p in parts {
        h.write_u64(p);
    }
    h.finish()
}

fn dist_bin(d: usize) -> u64 {
    match d {
        0..=5 => d as u64,
        6..=10 => 6,
        11..=20 => 7,
        _ => 8,
    }
}

/// Per-sentence lookup of hashed forms and tags over positions `0..=n + 1`
/// (root, words, end of sentence). Sentences without POS tags use their
/// forms in place of tags.
pub struct Featurizer {
    n: usize,
    form: Vec<u64>,
    pos: Vec<u64>,
    pad: u64,
}

impl Featurizer {
    pub fn new(x: &Sentence) -> Self {
        let n = x.len();
        let has_pos = x.tokens.iter().all(|t| !t.upos.is_empty() && t.upos != "_");
        let mut form = Vec::with_capacity(n + 2);
        let mut pos = Vec::with_capacity(n + 2);
        form.push(hash_str(b'f', "<root>"));
        pos.push(hash_str(b'p', "<root>"));
        for t in &x.tokens {
            form.push(hash_str(b'f', &t.form.to_lowercase()));
            pos.push(if has_pos {
                hash_str(b'p', &t.upos)
            } else {
                hash_str(b'p', &t.form.to_lowercase())
            });
        }
        form.push(hash_str(b'f', "<eos>"));
        pos.push(hash_str(b'p', "<eos>"));
        Featurizer {
            n,
            form,
            pos,
            pad: hash_str(b'p', "<pad>"),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn p(&self, i: isize) -> u64 {
        if i < 0 || i as usize > self.n + 1 {
            self.pad
        } else {
            self.pos[i as usize]
        }
    }

    #[inline]
    fn f(&self, i: usize) -> u64 {
        self.form[i]
    }

    pub fn check_arc(&self, h: usize, d: usize) -> Result<()> {
        if h > self.n || d == 0 || d > self.n || h == d {
            return Err(Error::IndexOutOfRange(format!("arc {h} -> {d} with n = {}", self.n)));
        }
        Ok(())
    }

    pub fn check_boundary(&self, h: usize, k: usize, side: Side) -> Result<()> {
        let ok = (1..=self.n).contains(&h)
            && match side {
                Side::Left => k < h,
                Side::Right => h <= k && k <= self.n,
            };
        if !ok {
            return Err(Error::IndexOutOfRange(format!(
                "{side:?} boundary {k} for head {h} with n = {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn check_span(&self, h: usize, l: usize, r: usize) -> Result<()> {
        if !(l < h && h <= r && r <= self.n) {
            return Err(Error::IndexOutOfRange(format!(
                "span ({l}, {r}, {h}) with n = {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn check_sibling(&self, h: usize, inner: usize, outer: usize) -> Result<()> {
        let ok = h <= self.n
            && outer >= 1
            && outer <= self.n
            && (outer < inner && inner < h || h < inner && inner < outer);
        if !ok {
            return Err(Error::IndexOutOfRange(format!(
                "sibling ({h}, {inner}, {outer}) with n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Arc features for `h -> d`.
    pub fn arc(&self, h: usize, d: usize, out: &mut Vec<FeatureId>) {
        let dir = (h < d) as u64;
        let dd = dir << 8 | dist_bin(h.abs_diff(d));
        let (hf, hp, df, dp) = (self.f(h), self.pos[h], self.f(d), self.pos[d]);
        let (hi, di) = (h as isize, d as isize);
        let (hp_l, hp_r) = (self.p(hi - 1), self.p(hi + 1));
        let (dp_l, dp_r) = (self.p(di - 1), self.p(di + 1));
        let templates: [(u8, [u64; 4]); 18] = [
            (0, [0, 0, 0, 0]),
            (1, [hf, hp, 0, 0]),
            (2, [hf, 0, 0, 0]),
            (3, [hp, 0, 0, 0]),
            (4, [df, dp, 0, 0]),
            (5, [df, 0, 0, 0]),
            (6, [dp, 0, 0, 0]),
            (7, [hf, hp, df, dp]),
            (8, [hp, df, dp, 0]),
            (9, [hf, df, dp, 0]),
            (10, [hf, hp, dp, 0]),
            (11, [hf, hp, df, 0]),
            (12, [hf, df, 0, 0]),
            (13, [hp, dp, 0, 0]),
            (14, [hp, hp_r, dp_l, dp]),
            (15, [hp_l, hp, dp_l, dp]),
            (16, [hp, hp_r, dp, dp_r]),
            (17, [hp_l, hp, dp, dp_r]),
        ];
        for (t, parts) in templates {
            out.push(feat(t, &[dir, parts[0], parts[1], parts[2], parts[3]]));
            out.push(feat(t | 0x80, &[dd, parts[0], parts[1], parts[2], parts[3]]));
        }
        let (lo, hi) = if h < d { (h, d) } else { (d, h) };
        for b in lo + 1..hi {
            out.push(feat(18, &[dir, hp, self.pos[b], dp]));
        }
    }

    /// Features for fencepost `k` being the `side` boundary of `h`'s span.
    pub fn boundary(&self, h: usize, k: usize, side: Side, out: &mut Vec<FeatureId>) {
        let s = match side {
            Side::Left => 0u64,
            Side::Right => 1,
        };
        let wb = dist_bin(h.abs_diff(k));
        let (hf, hp) = (self.f(h), self.pos[h]);
        let (lp, rp) = (self.pos[k], self.pos[k + 1]);
        let (lf, rf) = (self.f(k), self.f(k + 1));
        let templates: [(u8, [u64; 4]); BOUNDARY_TEMPLATES] = [
            (32, [wb, 0, 0, 0]),
            (33, [hp, lp, rp, 0]),
            (34, [hf, lp, rp, 0]),
            (35, [hp, lp, 0, 0]),
            (36, [hp, rp, 0, 0]),
            (37, [lp, rp, 0, 0]),
            (38, [hp, lf, 0, 0]),
            (39, [hp, rf, 0, 0]),
            (40, [hp, wb, 0, 0]),
            (41, [hf, wb, 0, 0]),
            (42, [hp, lp, rp, wb]),
        ];
        for (t, parts) in templates {
            out.push(feat(t, &[s, parts[0], parts[1], parts[2], parts[3]]));
        }
    }

    /// Features for `h` heading the interval `(l, r]`.
    pub fn span(&self, h: usize, l: usize, r: usize, out: &mut Vec<FeatureId>) {
        let wb = dist_bin(r - l);
        let (hf, hp) = (self.f(h), self.pos[h]);
        let (lo, li) = (self.pos[l], self.pos[l + 1]);
        let (ri, ro) = (self.pos[r], self.pos[r + 1]);
        let lb = dist_bin(h - l);
        let rb = dist_bin(r - h);
        let templates: [(u8, [u64; 5]); SPAN_TEMPLATES] = [
            (64, [wb, 0, 0, 0, 0]),
            (65, [hp, lo, li, 0, 0]),
            (66, [hp, ri, ro, 0, 0]),
            (67, [hp, lo, ro, 0, 0]),
            (68, [hp, li, ri, 0, 0]),
            (69, [hf, wb, 0, 0, 0]),
            (70, [hp, wb, 0, 0, 0]),
            (71, [hp, lo, li, ri, ro]),
            (72, [hp, lb, rb, 0, 0]),
        ];
        for (t, parts) in templates {
            out.push(feat(t, &parts));
        }
    }

    /// Features for `h` taking `outer` right after `inner` on one side.
    pub fn sibling(&self, h: usize, inner: usize, outer: usize, out: &mut Vec<FeatureId>) {
        let dir = (h < outer) as u64;
        let (hf, hp) = (self.f(h), self.pos[h]);
        let (inf, ip) = (self.f(inner), self.pos[inner]);
        let (of, op) = (self.f(outer), self.pos[outer]);
        let db = dist_bin(inner.abs_diff(outer));
        let templates: [(u8, [u64; 4]); SIBLING_TEMPLATES] = [
            (96, [hp, ip, op, 0]),
            (97, [ip, op, 0, 0]),
            (98, [hf, ip, op, 0]),
            (99, [hp, inf, op, 0]),
            (100, [hp, ip, of, 0]),
            (101, [inf, of, 0, 0]),
            (102, [hp, ip, op, db]),
            (103, [ip, op, db, 0]),
        ];
        for (t, parts) in templates {
            out.push(feat(t, &[dir, parts[0], parts[1], parts[2], parts[3]]));
        }
    }
}

pub fn featurize_arc(x: &Sentence, h: usize, d: usize) -> Result<FeatureVector> {
    let f = Featurizer::new(x);
    f.check_arc(h, d)?;
    let mut ids = Vec::new();
    f.arc(h, d, &mut ids);
    Ok(FeatureVector::from_ids(ids))
}

pub fn featurize_boundary(x: &Sentence, h: usize, k: usize, side: Side) -> Result<FeatureVector> {
    let f = Featurizer::new(x);
    f.check_boundary(h, k, side)?;
    let mut ids = Vec::new();
    f.boundary(h, k, side, &mut ids);
    Ok(FeatureVector::from_ids(ids))
}

pub fn featurize_span(x: &Sentence, h: usize, l: usize, r: usize) -> Result<FeatureVector> {
    let f = Featurizer::new(x);
    f.check_span(h, l, r)?;
    let mut ids = Vec::new();
    f.span(h, l, r, &mut ids);
    Ok(FeatureVector::from_ids(ids))
}

pub fn featurize_sibling(
    x: &Sentence,
    h: usize,
    inner: usize,
    outer: usize,
) -> Result<FeatureVector> {
    let f = Featurizer::new(x);
    f.check_sibling(h, inner, outer)?;
    let mut ids = Vec::new();
    f.sibling(h, inner, outer, &mut ids);
    Ok(FeatureVector::from_ids(ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Token;
    use std::collections::HashSet;

    fn sentence() -> Sentence {
        let words = [
            ("The", "DET"),
            ("child", "NOUN"),
            ("reads", "VERB"),
            ("a", "DET"),
            ("book", "NOUN"),
        ];
        Sentence::new(words.iter().map(|&(f, p)| Token::new(f, p)).collect())
    }

    #[test]
    fn arc_features_are_deterministic_and_directed() {
        let x = sentence();
        assert_eq!(featurize_arc(&x, 3, 2).unwrap(), featurize_arc(&x, 3, 2).unwrap());
        assert_ne!(featurize_arc(&x, 3, 2).unwrap(), featurize_arc(&x, 2, 3).unwrap());
    }

    #[test]
    fn arc_feature_count_is_bounded_by_templates() {
        let x = sentence();
        for h in 0..=5 {
            for d in 1..=5 {
                if h == d {
                    continue;
                }
                let between: HashSet<_> = (h.min(d) + 1..h.max(d))
                    .map(|b| x.word(b).upos.clone())
                    .collect();
                let fv = featurize_arc(&x, h, d).unwrap();
                assert!(fv.len() <= ARC_TEMPLATES + between.len(), "{h} -> {d}");
                let total: u32 = fv.iter().map(|(_, c)| c).sum();
                assert_eq!(total as usize, ARC_TEMPLATES + h.abs_diff(d) - 1);
            }
        }
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let x = sentence();
        assert!(featurize_arc(&x, 2, 2).is_err());
        assert!(featurize_arc(&x, 6, 1).is_err());
        assert!(featurize_arc(&x, 1, 0).is_err());
        assert!(featurize_boundary(&x, 3, 3, Side::Left).is_err());
        assert!(featurize_boundary(&x, 3, 2, Side::Right).is_err());
        assert!(featurize_span(&x, 3, 3, 5).is_err());
        assert!(featurize_sibling(&x, 3, 1, 2).is_err());
    }

    #[test]
    fn boundary_span_and_sibling_features() {
        let x = sentence();
        // Determinism.
        assert_eq!(
            featurize_span(&x, 3, 0, 5).unwrap(),
            featurize_span(&x, 3, 0, 5).unwrap()
        );
        // Direction: the same fencepost as left vs right boundary differs.
        assert_ne!(
            featurize_boundary(&x, 3, 2, Side::Left).unwrap(),
            featurize_boundary(&x, 2, 2, Side::Right).unwrap()
        );
        assert_ne!(
            featurize_sibling(&x, 3, 4, 5).unwrap(),
            featurize_sibling(&x, 3, 2, 1).unwrap()
        );
        // Size.
        assert!(featurize_boundary(&x, 3, 0, Side::Left).unwrap().len() <= BOUNDARY_TEMPLATES);
        assert!(featurize_span(&x, 3, 0, 5).unwrap().len() <= SPAN_TEMPLATES);
        assert!(featurize_sibling(&x, 0, 1, 2).unwrap().len() <= SIBLING_TEMPLATES);
    }

    #[test]
    fn untagged_sentences_fall_back_to_forms() {
        let mut x = sentence();
        for t in &mut x.tokens {
            t.upos = "_".into();
        }
        let fv = featurize_arc(&x, 3, 2).unwrap();
        assert!(!fv.is_empty());
        assert_ne!(fv, featurize_arc(&sentence(), 3, 2).unwrap());
    }
}
