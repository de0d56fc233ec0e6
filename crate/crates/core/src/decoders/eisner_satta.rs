//! Modified Eisner-Satta over headed triangles with hook items.
//!
//! `T[i][h][j]` is an open triangle: head `h` with some of its dependents,
//! covering words `i..=j`. FINISH closes it by adding `span(h, i - 1, j)`;
//! only closed triangles can become dependents. A hook `H[h][i][j]` (with `h`
//! outside `i..=j`) is the best closed triangle over `i..=j` already linked
//! to the external head `h`:
//!
//! ```text
//! H[h][i][j] = max_c  Tc[i][c][j] + arc(h, c)          (L-LINK / R-LINK)
//! T[h][h][j] = max_k  T[h][h][k] + H[h][k+1][j]        (R-COMB)
//! T[i][h][j] = max_k  H[h][i][k-1] + T[k][h][j]        (L-COMB, i < h)
//! ```
//!
//! Maximizing over the dependent's head inside the hook keeps every rule at
//! four free indices. Right dependents are collected before left ones, so a
//! tree has exactly one derivation.

use super::chart::{Cube, Factors, Heads, Weight, NO_BP};
use crate::model::RootMode;

pub(crate) struct Chart<W> {
    n: usize,
    root_mode: RootMode,
    /// Open triangles, `[i][h][j]`.
    open: Cube<W>,
    /// Hooks, `[h][i][j]`.
    hooks: Cube<W>,
    pub goal: W,
}

pub(crate) fn fill<F: Factors>(f: &F, n: usize, root_mode: RootMode) -> Chart<F::W> {
    let m = n + 1;
    let mut open: Cube<F::W> = Cube::new(m, true);
    let mut closed = Cube::new(m, false);
    let mut hooks = Cube::new(m, true);
    let multi = root_mode == RootMode::Multi;

    for w in 0..n {
        for i in 1..=n - w {
            let j = i + w;
            for h in i..=j {
                let (best, arg) = if w == 0 {
                    (F::W::one(), NO_BP)
                } else if h == i {
                    let mut best = F::W::zero();
                    let mut arg = NO_BP;
                    for k in h..j {
                        if best.offer(open.get(h, h, k).times(hooks.get(h, k + 1, j))) {
                            arg = k as u32;
                        }
                    }
                    (best, arg)
                } else {
                    let mut best = F::W::zero();
                    let mut arg = NO_BP;
                    for k in i + 1..=h {
                        if best.offer(hooks.get(h, i, k - 1).times(open.get(k, h, j))) {
                            arg = k as u32;
                        }
                    }
                    (best, arg)
                };
                open.set(i, h, j, best, arg);
                closed.set(i, h, j, best.times(f.span(h, i - 1, j)), NO_BP);
            }

            // Hooks from every outside head onto the finished span i..=j.
            let root_heads = if multi || (i == 1 && j == n) { 0..1 } else { 0..0 };
            let heads = root_heads.chain(1..i).chain(j + 1..=n);
            for h in heads {
                let mut best = F::W::zero();
                let mut arg = NO_BP;
                for c in i..=j {
                    if best.offer(closed.get(i, c, j).times(f.arc(h, c))) {
                        arg = c as u32;
                    }
                }
                hooks.set(h, i, j, best, arg);
            }
        }
    }

    let goal = if multi {
        // The root is an open right triangle that never finishes.
        open.set(0, 0, 0, F::W::one(), NO_BP);
        for j in 1..=n {
            let mut best = F::W::zero();
            let mut arg = NO_BP;
            for k in 0..j {
                if best.offer(open.get(0, 0, k).times(hooks.get(0, k + 1, j))) {
                    arg = k as u32;
                }
            }
            open.set(0, 0, j, best, arg);
        }
        open.get(0, 0, n)
    } else {
        hooks.get(0, 1, n)
    };

    Chart {
        n,
        root_mode,
        open,
        hooks,
        goal,
    }
}

enum Item {
    Open(usize, usize, usize),
    Hook(usize, usize, usize),
}

impl<W: Weight> Chart<W> {
    pub fn backtrack(&self) -> Vec<usize> {
        let n = self.n;
        let mut heads = Heads::new(n);
        let mut stack = vec![match self.root_mode {
            RootMode::Single => Item::Hook(0, 1, n),
            RootMode::Multi => Item::Open(0, 0, n),
        }];
        while let Some(item) = stack.pop() {
            match item {
                Item::Open(i, h, j) if i == j => debug_assert_eq!(h, i),
                Item::Open(i, h, j) if i == h => {
                    let k = self.open.bp(i, h, j);
                    stack.push(Item::Open(h, h, k));
                    stack.push(Item::Hook(h, k + 1, j));
                }
                Item::Open(i, h, j) => {
                    let k = self.open.bp(i, h, j);
                    stack.push(Item::Hook(h, i, k - 1));
                    stack.push(Item::Open(k, h, j));
                }
                Item::Hook(h, i, j) => {
                    let c = self.hooks.bp(h, i, j);
                    heads.attach(h, c);
                    stack.push(Item::Open(i, c, j));
                }
            }
        }
        heads.finish()
    }
}
