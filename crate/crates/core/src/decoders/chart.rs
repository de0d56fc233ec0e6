//! Chart cells and the two weight domains the decoders run in.

use crate::model::ScoreSet;

/// Marks a cell without a recorded derivation.
pub(crate) const NO_BP: u32 = u32::MAX;

/// The (⊕, ⊗) pair a chart is filled with.
pub(crate) trait Weight: Copy {
    fn zero() -> Self;
    fn one() -> Self;
    fn times(self, rhs: Self) -> Self;
    /// Folds `cand` into the accumulator. Returns true when `cand` becomes the
    /// new best derivation, which only ever happens under max-plus.
    fn offer(&mut self, cand: Self) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct MaxPlus(pub f64);

impl Weight for MaxPlus {
    #[inline]
    fn zero() -> Self {
        MaxPlus(f64::NEG_INFINITY)
    }

    #[inline]
    fn one() -> Self {
        MaxPlus(0.0)
    }

    #[inline]
    fn times(self, rhs: Self) -> Self {
        MaxPlus(self.0 + rhs.0)
    }

    // Strict comparison keeps the first maximum seen.
    #[inline]
    fn offer(&mut self, cand: Self) -> bool {
        if cand.0 > self.0 {
            *self = cand;
            true
        } else {
            false
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Count(pub u128);

impl Weight for Count {
    #[inline]
    fn zero() -> Self {
        Count(0)
    }

    #[inline]
    fn one() -> Self {
        Count(1)
    }

    #[inline]
    fn times(self, rhs: Self) -> Self {
        Count(self.0.checked_mul(rhs.0).expect("derivation count overflows u128"))
    }

    #[inline]
    fn offer(&mut self, cand: Self) -> bool {
        self.0 = self.0.checked_add(cand.0).expect("derivation count overflows u128");
        false
    }
}

/// Source of factor weights for a chart.
pub(crate) trait Factors {
    type W: Weight;
    fn arc(&self, h: usize, d: usize) -> Self::W;
    fn sib(&self, h: usize, inner: usize, outer: usize) -> Self::W;
    fn span(&self, h: usize, l: usize, r: usize) -> Self::W;
    fn left(&self, h: usize, l: usize) -> Self::W;
    fn right(&self, h: usize, r: usize) -> Self::W;
}

impl Factors for ScoreSet {
    type W = MaxPlus;

    #[inline]
    fn arc(&self, h: usize, d: usize) -> MaxPlus {
        MaxPlus(ScoreSet::arc(self, h, d))
    }

    #[inline]
    fn sib(&self, h: usize, inner: usize, outer: usize) -> MaxPlus {
        MaxPlus(ScoreSet::sib(self, h, inner, outer))
    }

    #[inline]
    fn span(&self, h: usize, l: usize, r: usize) -> MaxPlus {
        MaxPlus(ScoreSet::span(self, h, l, r))
    }

    #[inline]
    fn left(&self, h: usize, l: usize) -> MaxPlus {
        MaxPlus(ScoreSet::left(self, h, l))
    }

    #[inline]
    fn right(&self, h: usize, r: usize) -> MaxPlus {
        MaxPlus(ScoreSet::right(self, h, r))
    }
}

/// Every factor has weight one: the chart counts derivations.
pub(crate) struct Unit;

impl Factors for Unit {
    type W = Count;

    fn arc(&self, _: usize, _: usize) -> Count {
        Count(1)
    }

    fn sib(&self, _: usize, _: usize, _: usize) -> Count {
        Count(1)
    }

    fn span(&self, _: usize, _: usize, _: usize) -> Count {
        Count(1)
    }

    fn left(&self, _: usize, _: usize) -> Count {
        Count(1)
    }

    fn right(&self, _: usize, _: usize) -> Count {
        Count(1)
    }
}

/// Square table of items `[i][j]` with a split-point backpointer per cell.
pub(crate) struct Table<W> {
    m: usize,
    val: Vec<W>,
    bp: Vec<u32>,
}

impl<W: Weight> Table<W> {
    pub fn new(m: usize) -> Self {
        Table {
            m,
            val: vec![W::zero(); m * m],
            bp: vec![NO_BP; m * m],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> W {
        self.val[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, w: W, bp: u32) {
        self.val[i * self.m + j] = w;
        self.bp[i * self.m + j] = bp;
    }

    #[inline]
    pub fn bp(&self, i: usize, j: usize) -> usize {
        let bp = self.bp[i * self.m + j];
        debug_assert_ne!(bp, NO_BP, "no backpointer at ({i}, {j})");
        bp as usize
    }
}

/// Cubic table of items `[a][b][c]`.
pub(crate) struct Cube<W> {
    m: usize,
    val: Vec<W>,
    bp: Vec<u32>,
}

impl<W: Weight> Cube<W> {
    pub fn new(m: usize, with_bp: bool) -> Self {
        Cube {
            m,
            val: vec![W::zero(); m * m * m],
            bp: if with_bp { vec![NO_BP; m * m * m] } else { Vec::new() },
        }
    }

    #[inline]
    fn index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.m + b) * self.m + c
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> W {
        self.val[self.index(a, b, c)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, w: W, bp: u32) {
        let i = self.index(a, b, c);
        self.val[i] = w;
        if !self.bp.is_empty() {
            self.bp[i] = bp;
        }
    }

    #[inline]
    pub fn bp(&self, a: usize, b: usize, c: usize) -> usize {
        let bp = self.bp[self.index(a, b, c)];
        debug_assert_ne!(bp, NO_BP, "no backpointer at ({a}, {b}, {c})");
        bp as usize
    }
}

/// Head vector under construction during backtracking.
pub(crate) struct Heads(Vec<usize>);

impl Heads {
    pub fn new(n: usize) -> Self {
        Heads(vec![usize::MAX; n])
    }

    #[inline]
    pub fn attach(&mut self, h: usize, d: usize) {
        debug_assert_eq!(self.0[d - 1], usize::MAX, "word {d} attached twice");
        self.0[d - 1] = h;
    }

    pub fn finish(self) -> Vec<usize> {
        debug_assert!(self.0.iter().all(|&h| h != usize::MAX));
        self.0
    }
}
