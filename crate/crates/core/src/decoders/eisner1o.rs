//! First-order Eisner over complete (triangle) and incomplete (trapezoid)
//! items. Positions are words `1..=n`; the root enters either through a
//! final attachment (single root) or as an ordinary right-facing head at
//! position 0 (multi root).

use super::chart::{Factors, Heads, Table, Weight, NO_BP};
use crate::model::RootMode;

pub(crate) struct Chart<W> {
    n: usize,
    root_mode: RootMode,
    /// Head `i`, covering `i..=j`, no further right dependents.
    cr: Table<W>,
    /// Head `j`, covering `i..=j`, no further left dependents.
    cl: Table<W>,
    /// Arc `i -> j` with `j`'s left side still to be closed.
    ir: Table<W>,
    /// Arc `j -> i`.
    il: Table<W>,
    pub goal: W,
    goal_bp: u32,
}

pub(crate) fn fill<F: Factors>(f: &F, n: usize, root_mode: RootMode) -> Chart<F::W> {
    let m = n + 1;
    let mut cr = Table::new(m);
    let mut cl = Table::new(m);
    let mut ir = Table::new(m);
    let mut il = Table::new(m);
    let first = match root_mode {
        RootMode::Single => 1,
        RootMode::Multi => 0,
    };
    for i in first..=n {
        cr.set(i, i, F::W::one(), NO_BP);
        cl.set(i, i, F::W::one(), NO_BP);
    }
    for w in 1..n + 1 - first {
        for i in first..=n - w {
            let j = i + w;
            let mut best_r = F::W::zero();
            let mut arg_r = NO_BP;
            let mut best_l = F::W::zero();
            let mut arg_l = NO_BP;
            for k in i..j {
                let inside = cr.get(i, k).times(cl.get(k + 1, j));
                if best_r.offer(inside.times(f.arc(i, j))) {
                    arg_r = k as u32;
                }
                if i > 0 && best_l.offer(inside.times(f.arc(j, i))) {
                    arg_l = k as u32;
                }
            }
            ir.set(i, j, best_r, arg_r);
            if i > 0 {
                il.set(i, j, best_l, arg_l);
            }

            let mut best = F::W::zero();
            let mut arg = NO_BP;
            for k in i + 1..=j {
                if best.offer(ir.get(i, k).times(cr.get(k, j))) {
                    arg = k as u32;
                }
            }
            cr.set(i, j, best, arg);

            if i > 0 {
                let mut best = F::W::zero();
                let mut arg = NO_BP;
                for k in i..j {
                    if best.offer(cl.get(i, k).times(il.get(k, j))) {
                        arg = k as u32;
                    }
                }
                cl.set(i, j, best, arg);
            }
        }
    }

    let (goal, goal_bp) = match root_mode {
        RootMode::Single => {
            let mut best = F::W::zero();
            let mut arg = NO_BP;
            for h in 1..=n {
                let cand = cl.get(1, h).times(cr.get(h, n)).times(f.arc(0, h));
                if best.offer(cand) {
                    arg = h as u32;
                }
            }
            (best, arg)
        }
        RootMode::Multi => (cr.get(0, n), NO_BP),
    };

    Chart {
        n,
        root_mode,
        cr,
        cl,
        ir,
        il,
        goal,
        goal_bp,
    }
}

enum Item {
    Cr(usize, usize),
    Cl(usize, usize),
    Ir(usize, usize),
    Il(usize, usize),
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
                stack.push(Item::Cl(1, h));
                stack.push(Item::Cr(h, n));
            }
            RootMode::Multi => stack.push(Item::Cr(0, n)),
        }
        while let Some(item) = stack.pop() {
            match item {
                Item::Cr(i, j) if i == j => {}
                Item::Cl(i, j) if i == j => {}
                Item::Cr(i, j) => {
                    let k = self.cr.bp(i, j);
                    stack.push(Item::Ir(i, k));
                    stack.push(Item::Cr(k, j));
                }
                Item::Cl(i, j) => {
                    let k = self.cl.bp(i, j);
                    stack.push(Item::Cl(i, k));
                    stack.push(Item::Il(k, j));
                }
                Item::Ir(i, j) => {
                    heads.attach(i, j);
                    let k = self.ir.bp(i, j);
                    stack.push(Item::Cr(i, k));
                    stack.push(Item::Cl(k + 1, j));
                }
                Item::Il(i, j) => {
                    heads.attach(j, i);
                    let k = self.il.bp(i, j);
                    stack.push(Item::Cr(i, k));
                    stack.push(Item::Cl(k + 1, j));
                }
            }
        }
        heads.finish()
    }
}
