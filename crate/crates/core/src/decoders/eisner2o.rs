//! Modified second-order (sibling) Eisner with head-split span scores.
//!
//! Extends the head-split chart with box items `S[i][j]`: a closed right
//! triangle of `i` next to a closed left triangle of `j` (COMB). A head's
//! first dependent on a side is linked from its length-one open triangle;
//! every later dependent is linked through a box spanning it and the
//! previous (inner) dependent, paying `sib(head, inner, outer)`.

use super::chart::{Factors, Heads, Table, Weight, NO_BP};
use crate::model::RootMode;

pub(crate) struct Chart<W> {
    n: usize,
    root_mode: RootMode,
    cr_open: Table<W>,
    cl_open: Table<W>,
    ir: Table<W>,
    il: Table<W>,
    boxes: Table<W>,
    pub goal: W,
    goal_bp: u32,
}

pub(crate) fn fill<F: Factors>(f: &F, n: usize, root_mode: RootMode) -> Chart<F::W> {
    let m = n + 1;
    let mut cr_open = Table::new(m);
    let mut cl_open = Table::new(m);
    let mut cr_closed = Table::new(m);
    let mut cl_closed = Table::new(m);
    let mut ir: Table<F::W> = Table::new(m);
    let mut il = Table::new(m);
    let mut boxes = Table::new(m);
    let first = match root_mode {
        RootMode::Single => 1,
        RootMode::Multi => 0,
    };
    if first == 0 {
        cr_open.set(0, 0, F::W::one(), NO_BP);
    }
    for i in 1..=n {
        cr_open.set(i, i, F::W::one(), NO_BP);
        cl_open.set(i, i, F::W::one(), NO_BP);
        cr_closed.set(i, i, F::W::one().times(f.right(i, i)), NO_BP);
        cl_closed.set(i, i, F::W::one().times(f.left(i, i - 1)), NO_BP);
    }
    for w in 1..n + 1 - first {
        for i in first..=n - w {
            let j = i + w;

            // COMB: box between two words, never involving the root.
            if i > 0 {
                let mut best = F::W::zero();
                let mut arg = NO_BP;
                for k in i..j {
                    if best.offer(cr_closed.get(i, k).times(cl_closed.get(k + 1, j))) {
                        arg = k as u32;
                    }
                }
                boxes.set(i, j, best, arg);
            }

            // i -> j. Backpointer i marks the first-child R-LINK; r > i marks
            // R-LINK-2 with inner sibling r.
            let arc = f.arc(i, j);
            let mut best = F::W::one().times(cl_closed.get(i + 1, j)).times(arc);
            let mut arg = i as u32;
            for r in i + 1..j {
                let cand = ir
                    .get(i, r)
                    .times(boxes.get(r, j))
                    .times(arc)
                    .times(f.sib(i, r, j));
                if best.offer(cand) {
                    arg = r as u32;
                }
            }
            ir.set(i, j, best, arg);

            // j -> i. Backpointer j marks the first-child L-LINK; i < r < j
            // marks L-LINK-2 with inner sibling r.
            if i > 0 {
                let arc = f.arc(j, i);
                let mut best = F::W::zero();
                let mut arg = NO_BP;
                for r in i + 1..j {
                    let cand = boxes
                        .get(i, r)
                        .times(il.get(r, j))
                        .times(arc)
                        .times(f.sib(j, r, i));
                    if best.offer(cand) {
                        arg = r as u32;
                    }
                }
                let first_child = cr_closed.get(i, j - 1).times(F::W::one()).times(arc);
                if best.offer(first_child) {
                    arg = j as u32;
                }
                il.set(i, j, best, arg);
            }

            // R-COMB
            let mut best = F::W::zero();
            let mut arg = NO_BP;
            for k in i + 1..=j {
                if best.offer(ir.get(i, k).times(cr_closed.get(k, j))) {
                    arg = k as u32;
                }
            }
            cr_open.set(i, j, best, arg);

            if i > 0 {
                // L-COMB
                let mut best = F::W::zero();
                let mut arg = NO_BP;
                for k in i..j {
                    if best.offer(cl_closed.get(i, k).times(il.get(k, j))) {
                        arg = k as u32;
                    }
                }
                cl_open.set(i, j, best, arg);

                cr_closed.set(i, j, cr_open.get(i, j).times(f.right(i, j)), NO_BP);
                cl_closed.set(i, j, cl_open.get(i, j).times(f.left(j, i - 1)), NO_BP);
            }
        }
    }

    let (goal, goal_bp) = match root_mode {
        RootMode::Single => {
            let mut best = F::W::zero();
            let mut arg = NO_BP;
            for h in 1..=n {
                let cand = cl_closed.get(1, h).times(cr_closed.get(h, n)).times(f.arc(0, h));
                if best.offer(cand) {
                    arg = h as u32;
                }
            }
            (best, arg)
        }
        RootMode::Multi => (cr_open.get(0, n), NO_BP),
    };

    Chart {
        n,
        root_mode,
        cr_open,
        cl_open,
        ir,
        il,
        boxes,
        goal,
        goal_bp,
    }
}

enum Item {
    CrOpen(usize, usize),
    ClOpen(usize, usize),
    Ir(usize, usize),
    Il(usize, usize),
    Box(usize, usize),
}

impl<W: Weight> Chart<W> {
    pub fn backtrack(&self) -> Vec<usize> {
        let n = self.n;
        let mut heads = Heads::new(n);
        let mut stack = Vec::new();
        match self.root_mode {
            RootMode::Single => {
                let h = self.goal_bp as usize;
                heads.attach(0, h);
                stack.push(Item::ClOpen(1, h));
                stack.push(Item::CrOpen(h, n));
            }
            RootMode::Multi => stack.push(Item::CrOpen(0, n)),
        }
        while let Some(item) = stack.pop() {
            match item {
                Item::CrOpen(i, j) | Item::ClOpen(i, j) if i == j => {}
                Item::CrOpen(i, j) => {
                    let k = self.cr_open.bp(i, j);
                    stack.push(Item::Ir(i, k));
                    stack.push(Item::CrOpen(k, j));
                }
                Item::ClOpen(i, j) => {
                    let k = self.cl_open.bp(i, j);
                    stack.push(Item::ClOpen(i, k));
                    stack.push(Item::Il(k, j));
                }
                Item::Box(i, j) => {
                    let k = self.boxes.bp(i, j);
                    stack.push(Item::CrOpen(i, k));
                    stack.push(Item::ClOpen(k + 1, j));
                }
                Item::Ir(i, j) => {
                    heads.attach(i, j);
                    let r = self.ir.bp(i, j);
                    if r == i {
                        stack.push(Item::ClOpen(i + 1, j));
                    } else {
                        stack.push(Item::Ir(i, r));
                        stack.push(Item::Box(r, j));
                    }
                }
                Item::Il(i, j) => {
                    heads.attach(j, i);
                    let r = self.il.bp(i, j);
                    if r == j {
                        stack.push(Item::CrOpen(i, j - 1));
                    } else {
                        stack.push(Item::Box(i, r));
                        stack.push(Item::Il(r, j));
                    }
                }
            }
        }
        heads.finish()
    }
}
