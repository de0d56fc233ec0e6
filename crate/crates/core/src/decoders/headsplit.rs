//! Modified Eisner with head-split span scores.
//!
//! Complete items come in two kinds. An open triangle may still take
//! dependents on its side; a closed triangle has absorbed the head's span
//! boundary score for that side (R-FINISH adds `right(h, j)`, L-FINISH adds
//! `left(h, i - 1)`) and is the only kind that can attach to a head. The head
//! side of a link is always open.

use super::chart::{Factors, Heads, Table, Weight, NO_BP};
use crate::model::RootMode;

pub(crate) struct Chart<W> {
    n: usize,
    root_mode: RootMode,
    cr_open: Table<W>,
    cl_open: Table<W>,
    ir: Table<W>,
    il: Table<W>,
    pub goal: W,
    goal_bp: u32,
}

pub(crate) fn fill<F: Factors>(f: &F, n: usize, root_mode: RootMode) -> Chart<F::W> {
    let m = n + 1;
    let mut cr_open = Table::new(m);
    let mut cl_open = Table::new(m);
    let mut cr_closed = Table::new(m);
    let mut cl_closed = Table::new(m);
    let mut ir = Table::new(m);
    let mut il = Table::new(m);
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

            // R-LINK: open right triangle of i, closed left triangle of j.
            let mut best = F::W::zero();
            let mut arg = NO_BP;
            for k in i..j {
                let cand = cr_open.get(i, k).times(cl_closed.get(k + 1, j)).times(f.arc(i, j));
                if best.offer(cand) {
                    arg = k as u32;
                }
            }
            ir.set(i, j, best, arg);

            // L-LINK: closed right triangle of i, open left triangle of j.
            if i > 0 {
                let mut best = F::W::zero();
                let mut arg = NO_BP;
                for k in i..j {
                    let cand =
                        cr_closed.get(i, k).times(cl_open.get(k + 1, j)).times(f.arc(j, i));
                    if best.offer(cand) {
                        arg = k as u32;
                    }
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
        goal,
        goal_bp,
    }
}

enum Item {
    CrOpen(usize, usize),
    ClOpen(usize, usize),
    Ir(usize, usize),
    Il(usize, usize),
}

impl<W: Weight> Chart<W> {
    pub fn backtrack(&self) -> Vec<usize> {
        let n = self.n;
        let mut heads = Heads::new(n);
        let mut stack = Vec::new();
        // A closed triangle derives only from the open triangle with the same
        // extent, so backtracking walks open items.
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
                Item::Ir(i, j) => {
                    heads.attach(i, j);
                    let k = self.ir.bp(i, j);
                    stack.push(Item::CrOpen(i, k));
                    stack.push(Item::ClOpen(k + 1, j));
                }
                Item::Il(i, j) => {
                    heads.attach(j, i);
                    let k = self.il.bp(i, j);
                    stack.push(Item::CrOpen(i, k));
                    stack.push(Item::ClOpen(k + 1, j));
                }
            }
        }
        heads.finish()
    }
}
