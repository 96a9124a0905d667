// SPDX-License-Identifier: Apache-2.0

//! Conflict-driven clause learning solver.
//!
//! - two watched literals with blocker literals
//! - first-UIP conflict analysis with recursive clause minimization
//! - VSIDS decision heuristic with phase saving
//! - restarts driven by recent learnt-clause LBD against the global average
//! - periodic learnt clause reduction ranked by LBD and activity

use std::collections::VecDeque;
use std::ops::Not;
use std::time::Instant;

use super::{Budget, SatError, Stats, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// Literal encoded as `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(negated))
    }

    pub fn pos(var: Var) -> Lit {
        Lit::new(var, false)
    }

    pub fn neg(var: Var) -> Lit {
        Lit::new(var, true)
    }

    /// From a non-zero DIMACS literal.
    pub fn from_dimacs(lit: i32) -> Lit {
        debug_assert!(lit != 0);
        Lit::new(Var(lit.unsigned_abs() - 1), lit < 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = (self.var().0 + 1) as i32;
        if self.is_neg() {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

type CRef = u32;

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Indexed max-heap over variable activities.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    index: Vec<i32>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.index.resize(n, -1);
    }

    fn contains(&self, v: u32) -> bool {
        self.index[v as usize] >= 0
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.index[self.heap[i] as usize] = i as i32;
            i = parent;
        }
        self.heap[i] = v;
        self.index[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[child] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.index[self.heap[i] as usize] = i as i32;
            i = child;
        }
        self.heap[i] = v;
        self.index[v as usize] = i as i32;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.index[v as usize] = i as i32;
        self.up(i, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.index[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.index[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    // 1 1 2 1 1 2 4 1 1 2 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartPolicy {
    /// Luby sequence scaled by the given number of conflicts.
    Luby(u64),
    /// Restart when recent learnt clauses have a worse LBD than average.
    Glucose,
}

const LBD_WINDOW: usize = 50;
const TRAIL_WINDOW: usize = 5000;
const RESTART_K: f64 = 0.8;
const BLOCK_R: f64 = 1.4;
const FIRST_REDUCE: u64 = 2000;
const REDUCE_INC: u64 = 300;
const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f32 = 0.999;

#[derive(Debug)]
pub struct Solver {
    clauses: Vec<Clause>,
    originals: Vec<Vec<Lit>>,
    learnts: Vec<CRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    lbd_queue: VecDeque<u32>,
    lbd_queue_sum: u64,
    trail_queue: VecDeque<usize>,
    trail_queue_sum: usize,
    lbd_sum: f64,
    lbd_count: u64,
    next_reduce: u64,
    reductions: u64,
    restart: RestartPolicy,
    model: Vec<bool>,
    stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            clauses: Vec::new(),
            originals: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            lbd_queue: VecDeque::with_capacity(LBD_WINDOW),
            lbd_queue_sum: 0,
            trail_queue: VecDeque::with_capacity(TRAIL_WINDOW),
            trail_queue_sum: 0,
            lbd_sum: 0.0,
            lbd_count: 0,
            next_reduce: FIRST_REDUCE,
            reductions: 0,
            restart: RestartPolicy::Luby(100),
            model: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn set_restart_policy(&mut self, p: RestartPolicy) {
        self.restart = p;
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.originals.len()
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as u32;
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.phase.push(false);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v, &self.activity);
        Var(v)
    }

    /// Makes sure variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var().0 as usize] {
            LBool::Undef => LBool::Undef,
            LBool::True if !l.is_neg() => LBool::True,
            LBool::False if l.is_neg() => LBool::True,
            _ => LBool::False,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<CRef>) {
        let v = l.var().0 as usize;
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_neg() { LBool::False } else { LBool::True };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause. Returns `false` once the clause set is known to be
    /// unsatisfiable. Variables are created on demand.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if let Some(max) = lits.iter().map(|l| l.var().0 as usize).max() {
            self.reserve_vars(max + 1);
        }
        self.originals.push(lits.to_vec());
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if c.iter().any(|&l| self.value(l) == LBool::True) {
            return true;
        }
        c.retain(|&l| self.value(l) != LBool::False);
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(c, false, 0);
                true
            }
        }
    }

    pub fn add_dimacs_clause(&mut self, lits: &[i32]) -> bool {
        let c: Vec<Lit> = lits.iter().map(|&l| Lit::from_dimacs(l)).collect();
        self.add_clause(&c)
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> CRef {
        let cref = self.clauses.len() as CRef;
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != LBool::False {
                        let lits = &mut self.clauses[cref].lits;
                        lits.swap(1, k);
                        self.watches[lits[1].code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl);
            self.refresh_lbd(confl);
            let start = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().0 as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().0 as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            let v = lit.var().0 as usize;
            self.seen[v] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[v].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();

        // Recursive minimization.
        let abstract_levels = learnt[1..]
            .iter()
            .fold(0u32, |acc, l| acc | 1 << (self.level[l.var().0 as usize] & 31));
        let mut to_clear: Vec<Lit> = learnt.clone();
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let v = l.var().0 as usize;
            if self.reason[v].is_none() || !self.lit_redundant(l, abstract_levels, &mut to_clear) {
                kept.push(l);
            }
        }
        for l in to_clear {
            self.seen[l.var().0 as usize] = false;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().0 as usize] > self.level[learnt[max_i].var().0 as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().0 as usize]
        };
        (learnt, bt)
    }

    fn lit_redundant(&mut self, p: Lit, abstract_levels: u32, to_clear: &mut Vec<Lit>) -> bool {
        let mut stack = vec![p];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var().0 as usize].expect("checked by caller") as usize;
            for k in 1..self.clauses[cref].lits.len() {
                let l = self.clauses[cref].lits[k];
                let v = l.var().0 as usize;
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v].is_some() && (1u32 << (self.level[v] & 31)) & abstract_levels != 0 {
                    self.seen[v] = true;
                    stack.push(l);
                    to_clear.push(l);
                } else {
                    for l in to_clear.drain(top..) {
                        self.seen[l.var().0 as usize] = false;
                    }
                    return false;
                }
            }
        }
        true
    }

    fn refresh_lbd(&mut self, cref: CRef) {
        let c = &self.clauses[cref as usize];
        if !c.learnt || c.lbd <= 2 {
            return;
        }
        let lbd = self.compute_lbd(&c.lits);
        let c = &mut self.clauses[cref as usize];
        if lbd + 1 < c.lbd {
            c.lbd = lbd;
        }
    }

    fn push_lbd(&mut self, lbd: u32) {
        if self.lbd_queue.len() == LBD_WINDOW {
            self.lbd_queue_sum -= u64::from(self.lbd_queue.pop_front().unwrap());
        }
        self.lbd_queue.push_back(lbd);
        self.lbd_queue_sum += u64::from(lbd);
        self.lbd_sum += f64::from(lbd);
        self.lbd_count += 1;
    }

    /// Postpones a restart when the assignment is much larger than usual,
    /// which suggests the search is close to a model.
    fn maybe_block_restart(&mut self) {
        let t = self.trail.len();
        if self.trail_queue.len() == TRAIL_WINDOW {
            self.trail_queue_sum -= self.trail_queue.pop_front().unwrap();
        }
        self.trail_queue.push_back(t);
        self.trail_queue_sum += t;
        if self.stats.conflicts > 10_000
            && self.lbd_queue.len() == LBD_WINDOW
            && self.trail_queue.len() == TRAIL_WINDOW
            && t as f64 > BLOCK_R * self.trail_queue_sum as f64 / TRAIL_WINDOW as f64
        {
            self.lbd_queue.clear();
            self.lbd_queue_sum = 0;
        }
    }

    fn should_restart(&self) -> bool {
        self.lbd_queue.len() == LBD_WINDOW
            && self.lbd_queue_sum as f64 / LBD_WINDOW as f64 * RESTART_K > self.lbd_sum / self.lbd_count as f64
    }

    fn compute_lbd(&self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var().0 as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var().0 as usize;
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.phase[v] = !l.is_neg();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == LBool::Undef {
                return Some(Lit::new(Var(v), !self.phase[v as usize]));
            }
        }
        None
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let v = c.lits[0].var().0 as usize;
        self.reason[v] == Some(cref) && self.value(c.lits[0]) == LBool::True
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<CRef> = self.learnts.clone();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(
                ca.activity
                    .partial_cmp(&cb.activity)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
        });
        let target = cands.len() / 2;
        let mut removed = 0;
        for &cref in &cands {
            if removed >= target {
                break;
            }
            let c = &self.clauses[cref as usize];
            if c.lbd <= 2 || c.lits.len() <= 2 || self.locked(cref) {
                continue;
            }
            let c = &mut self.clauses[cref as usize];
            c.deleted = true;
            c.lits = Vec::new();
            removed += 1;
        }
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
        self.stats.deleted_clauses += removed as u64;
    }

    fn out_of_budget(&self, budget: &Budget, start_conflicts: u64) -> bool {
        if let Some(max) = budget.conflicts {
            if self.stats.conflicts - start_conflicts >= max {
                return true;
            }
        }
        matches!(budget.deadline, Some(d) if Instant::now() >= d)
    }

    fn search(&mut self, budget: &Budget, start_conflicts: u64, limit: u64) -> Option<Status> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(Status::Unsat);
                }
                self.maybe_block_restart();
                let (learnt, bt) = self.analyze(confl);
                let lbd = self.compute_lbd(&learnt);
                self.push_lbd(lbd);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if self.stats.conflicts.is_multiple_of(64) && self.out_of_budget(budget, start_conflicts) {
                    return Some(Status::Timeout);
                }
            } else {
                let restart = match self.restart {
                    RestartPolicy::Luby(_) => conflicts >= limit,
                    RestartPolicy::Glucose => self.should_restart(),
                };
                if restart {
                    self.lbd_queue.clear();
                    self.lbd_queue_sum = 0;
                    self.cancel_until(0);
                    return None;
                }
                if self.stats.conflicts >= self.next_reduce {
                    self.reductions += 1;
                    self.next_reduce = self.stats.conflicts + FIRST_REDUCE + REDUCE_INC * self.reductions;
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => return Some(Status::Sat),
                    Some(l) => {
                        self.stats.decisions += 1;
                        if self.stats.decisions.is_multiple_of(4096) && self.out_of_budget(budget, start_conflicts) {
                            return Some(Status::Timeout);
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, None);
                    }
                }
            }
        }
    }

    /// Solves the current clause set. A `Sat` answer has its model checked
    /// against every clause ever added.
    pub fn solve(&mut self, budget: &Budget) -> Result<Status, SatError> {
        let started = Instant::now();
        self.model.clear();
        if !self.ok {
            return Ok(Status::Unsat);
        }
        self.cancel_until(0);
        if self.out_of_budget(budget, self.stats.conflicts) {
            return Ok(Status::Timeout);
        }
        let start_conflicts = self.stats.conflicts;
        let mut restarts = 0u64;
        let status = loop {
            let limit = match self.restart {
                RestartPolicy::Luby(base) => luby(restarts) * base,
                RestartPolicy::Glucose => u64::MAX,
            };
            restarts += 1;
            if let Some(s) = self.search(budget, start_conflicts, limit) {
                break s;
            }
            self.stats.restarts += 1;
            if self.out_of_budget(budget, start_conflicts) {
                break Status::Timeout;
            }
        };
        if status == Status::Sat {
            self.model = self.assigns.iter().map(|&a| a == LBool::True).collect();
            if let Some(i) = self
                .originals
                .iter()
                .position(|c| !c.iter().any(|&l| self.model_lit(l)))
            {
                return Err(SatError::InvalidModel { clause: i });
            }
        }
        self.cancel_until(0);
        self.stats.solve_time += started.elapsed();
        Ok(status)
    }

    fn model_lit(&self, l: Lit) -> bool {
        self.model[l.var().0 as usize] != l.is_neg()
    }

    /// Model of the last `Sat` answer, one entry per variable.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    pub fn model_value(&self, v: Var) -> bool {
        self.model[v.0 as usize]
    }
}
