//! Machinery shared by the process calculi: a canonical form modulo
//! structural congruence, and one-step interaction with bounded
//! unfolding of replication.
//!
//! The canonical form is locally nameless. Every parallel level owns a
//! group of restricted names and every guard owns a group of bound names;
//! a bound occurrence is written as (groups outward, position). Within a
//! level, restrictions are floated to the front, unused ones are dropped,
//! and threads are sorted. Positions of restricted names are assigned by
//! first occurrence after sorting threads by their shape with those names
//! blanked out; threads whose shapes tie are tried in every order (up to a
//! cap) and the least result is kept. This is sound, i.e. equal canonical
//! forms always denote congruent processes, and it identifies the
//! congruent processes met in practice.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::explore::{self, Bounds, Graph};
use crate::name::{FreshSupply, Name, NameSubstitution};
use crate::trace::{Status, Step, Trace};

/// Opaque tag ignored by comparisons.
#[derive(Clone, Copy, Debug)]
pub struct Tag(u32);

impl PartialEq for Tag {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Tag {}
impl PartialOrd for Tag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Tag {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

/// A name occurrence in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CName {
    Bound {
        up: u32,
        idx: u32,
    },
    Free(Name),
    #[doc(hidden)]
    Pending {
        level: u32,
        k: u32,
    },
    #[doc(hidden)]
    Hole(Tag),
}

/// A guard in canonical form (an input/output prefix, a pattern).
pub trait Prefix: Clone + Ord + fmt::Debug {
    /// Size of the binder group the guard opens over its body.
    fn binders(&self) -> u32;
    fn map_names(&self, f: &mut dyn FnMut(&CName) -> CName) -> Self;
    fn for_each_name(&self, f: &mut dyn FnMut(&CName));
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Thread<P> {
    Ok,
    Repl(Box<Canon<P>>),
    Guard(P, Box<Canon<P>>),
}

/// `ν(n₀…)(t₀ | t₁ | …)` with the threads sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Canon<P> {
    pub nres: u32,
    pub threads: Vec<Thread<P>>,
}

/// The top of a named process, one constructor at a time.
pub enum View<'a, T: Process> {
    Nil,
    Ok,
    Par(&'a T, &'a T),
    Repl(&'a T),
    Res(&'a Name, &'a T),
    Guard(&'a T::Action, &'a T),
}

/// A process calculus with parallel composition, restriction,
/// replication, success and a single kind of guarded thread.
pub trait Process: Clone + Ord + fmt::Display {
    type Action: Clone;
    type Prefix: Prefix;
    /// Rule name recorded in traces for an interaction.
    const RULE: &'static str;

    fn view(&self) -> View<'_, Self>;
    fn nil() -> Self;
    fn ok() -> Self;
    fn par(a: Self, b: Self) -> Self;
    fn repl(p: Self) -> Self;
    fn res(n: Name, p: Self) -> Self;
    fn guard(a: Self::Action, body: Self) -> Self;

    /// The canonical guard and the names it binds, in binder order.
    fn canon_action(a: &Self::Action, resolve: &mut dyn FnMut(&Name) -> CName) -> (Self::Prefix, Vec<Name>);
    fn named_action(p: &Self::Prefix, resolve: &mut dyn FnMut(&CName) -> Name, binders: &[Name]) -> Self::Action;

    /// Every name occurring anywhere.
    fn names(&self) -> BTreeSet<Name>;
    fn free_names(&self) -> BTreeSet<Name>;
    /// Capture-avoiding renaming of free names.
    fn rename(&self, sigma: &NameSubstitution) -> Self;

    /// The continuations produced when two guarded threads interact.
    fn interact(a: &Self, b: &Self) -> Option<(Self, Self)>;

    /// Barbs of a guard, each with the names that must be free for it to
    /// be observable.
    fn guard_barbs(a: &Self::Action) -> Vec<(String, Vec<Name>)>;
}

pub fn par_all<T: Process>(ps: impl IntoIterator<Item = T>) -> T {
    ps.into_iter().reduce(T::par).unwrap_or_else(T::nil)
}

pub fn res_all<T: Process>(names: impl IntoIterator<Item = Name>, body: T) -> T {
    let names: Vec<Name> = names.into_iter().collect();
    names.into_iter().rev().fold(body, |p, n| T::res(n, p))
}

enum Group {
    Bound(Vec<Name>),
    Pending { level: u32, active: Vec<(Name, u32)> },
}

struct Env {
    groups: Vec<Group>,
    levels: u32,
}

impl Env {
    fn resolve(&self, n: &Name) -> CName {
        for (d, g) in self.groups.iter().rev().enumerate() {
            match g {
                Group::Bound(names) => {
                    if let Some(i) = names.iter().rposition(|x| x == n) {
                        return CName::Bound { up: d as u32, idx: i as u32 };
                    }
                }
                Group::Pending { level, active } => {
                    if let Some(&(_, k)) = active.iter().rev().find(|(x, _)| x == n) {
                        return CName::Pending { level: *level, k };
                    }
                }
            }
        }
        CName::Free(n.clone())
    }

    fn top_pending(&mut self) -> &mut Vec<(Name, u32)> {
        match self.groups.last_mut() {
            Some(Group::Pending { active, .. }) => active,
            _ => unreachable!("restrictions are collected into a level group"),
        }
    }
}

/// Permutations tried per level before giving up on exhaustive tie-breaking.
const TIE_CAP: usize = 720;

pub fn canonicalize<T: Process>(p: &T) -> Canon<T::Prefix> {
    let mut env = Env { groups: Vec::new(), levels: 0 };
    canon_level(p, &mut env)
}

fn canon_level<T: Process>(p: &T, env: &mut Env) -> Canon<T::Prefix> {
    let level = env.levels;
    env.levels += 1;
    env.groups.push(Group::Pending { level, active: Vec::new() });
    let mut threads = Vec::new();
    let mut count = 0;
    collect(p, env, &mut threads, &mut count);
    env.groups.pop();
    finish_level(threads, level)
}

fn collect<T: Process>(p: &T, env: &mut Env, threads: &mut Vec<Thread<T::Prefix>>, count: &mut u32) {
    match p.view() {
        View::Nil => {}
        View::Ok => threads.push(Thread::Ok),
        View::Par(a, b) => {
            collect(a, env, threads, count);
            collect(b, env, threads, count);
        }
        View::Res(n, q) => {
            let k = *count;
            *count += 1;
            env.top_pending().push((n.clone(), k));
            collect(q, env, threads, count);
            env.top_pending().pop();
        }
        View::Repl(q) => threads.push(Thread::Repl(Box::new(canon_level(q, env)))),
        View::Guard(a, q) => {
            let (prefix, binders) = T::canon_action(a, &mut |n| env.resolve(n));
            env.groups.push(Group::Bound(binders));
            let body = canon_level(q, env);
            env.groups.pop();
            threads.push(Thread::Guard(prefix, Box::new(body)));
        }
    }
}

/// Applies `f(name, distance)` to every occurrence, where `distance` is
/// the number of groups between the occurrence and the threads' level.
fn map_thread<P: Prefix>(t: &Thread<P>, d: u32, f: &mut dyn FnMut(&CName, u32) -> CName) -> Thread<P> {
    match t {
        Thread::Ok => Thread::Ok,
        Thread::Repl(b) => Thread::Repl(Box::new(map_canon(b, d + 1, f))),
        Thread::Guard(p, b) => {
            let p2 = p.map_names(&mut |c| f(c, d));
            Thread::Guard(p2, Box::new(map_canon(b, d + 2, f)))
        }
    }
}

fn map_canon<P: Prefix>(c: &Canon<P>, d: u32, f: &mut dyn FnMut(&CName, u32) -> CName) -> Canon<P> {
    Canon { nres: c.nres, threads: c.threads.iter().map(|t| map_thread(t, d, f)).collect() }
}

fn visit_thread<P: Prefix>(t: &Thread<P>, f: &mut dyn FnMut(&CName)) {
    match t {
        Thread::Ok => {}
        Thread::Repl(b) => b.threads.iter().for_each(|t| visit_thread(t, f)),
        Thread::Guard(p, b) => {
            p.for_each_name(f);
            b.threads.iter().for_each(|t| visit_thread(t, f));
        }
    }
}

fn sort_thread<P: Prefix>(t: &mut Thread<P>) {
    match t {
        Thread::Ok => {}
        Thread::Repl(b) | Thread::Guard(_, b) => sort_canon(b),
    }
}

fn sort_canon<P: Prefix>(c: &mut Canon<P>) {
    c.threads.iter_mut().for_each(sort_thread);
    c.threads.sort();
}

fn finish_level<P: Prefix>(threads: Vec<Thread<P>>, level: u32) -> Canon<P> {
    let mut shapes: Vec<(Thread<P>, usize)> = threads
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut s = map_thread(t, 0, &mut |c, _| match c {
                CName::Pending { level: l, k } if *l == level => CName::Hole(Tag(*k)),
                _ => c.clone(),
            });
            sort_thread(&mut s);
            (s, i)
        })
        .collect();
    shapes.sort_by(|a, b| a.0.cmp(&b.0));

    // tie groups whose members differ concretely are worth permuting
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < shapes.len() {
        let mut j = i + 1;
        while j < shapes.len() && shapes[j].0 == shapes[i].0 {
            j += 1;
        }
        let distinct = (i + 1..j).any(|m| threads[shapes[m].1] != threads[shapes[i].1]);
        if distinct {
            groups.push((i, j));
        }
        i = j;
    }

    let mut best: Option<Canon<P>> = None;
    let mut order: Vec<usize> = (0..shapes.len()).collect();
    let mut tried = 0;
    loop {
        let cand = assign(&threads, &shapes, &order, level);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        tried += 1;
        if tried >= TIE_CAP || !next_order(&mut order, &groups) {
            break;
        }
    }
    best.unwrap_or(Canon { nres: 0, threads: Vec::new() })
}

/// Advances to the next combination of permutations within tie groups.
fn next_order(order: &mut [usize], groups: &[(usize, usize)]) -> bool {
    for &(lo, hi) in groups {
        if next_permutation(&mut order[lo..hi]) {
            return true;
        }
        // wrapped around to sorted order; carry into the next group
    }
    false
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

fn assign<P: Prefix>(threads: &[Thread<P>], shapes: &[(Thread<P>, usize)], order: &[usize], level: u32) -> Canon<P> {
    let mut perm: Vec<Option<u32>> = Vec::new();
    let mut next = 0u32;
    for &o in order {
        visit_thread(&shapes[o].0, &mut |c| {
            if let CName::Hole(Tag(k)) = c {
                let k = *k as usize;
                if perm.len() <= k {
                    perm.resize(k + 1, None);
                }
                if perm[k].is_none() {
                    perm[k] = Some(next);
                    next += 1;
                }
            }
        });
    }
    let mut out: Vec<Thread<P>> = order
        .iter()
        .map(|&o| {
            let mut t = map_thread(&threads[shapes[o].1], 0, &mut |c, d| match c {
                CName::Pending { level: l, k } if *l == level => {
                    CName::Bound { up: d, idx: perm[*k as usize].expect("every used restriction occurs") }
                }
                _ => c.clone(),
            });
            sort_thread(&mut t);
            t
        })
        .collect();
    out.sort();
    Canon { nres: next, threads: out }
}

/// Regenerates a named process with bound names `v'0`, `v'1`, … in
/// traversal order, skipping names that occur free.
pub fn to_named<T: Process>(c: &Canon<T::Prefix>) -> T {
    let mut free = BTreeSet::new();
    c.threads.iter().for_each(|t| {
        visit_thread(t, &mut |n| {
            if let CName::Free(x) = n {
                free.insert(x.clone());
            }
        })
    });
    let mut supply = FreshSupply::avoiding(&free);
    named_canon::<T>(c, &mut Vec::new(), &mut supply)
}

fn lookup(env: &[Vec<Name>], c: &CName) -> Name {
    match c {
        CName::Bound { up, idx } => env[env.len() - 1 - *up as usize][*idx as usize].clone(),
        CName::Free(n) => n.clone(),
        CName::Pending { .. } | CName::Hole(_) => unreachable!("only present during canonicalisation"),
    }
}

fn named_canon<T: Process>(c: &Canon<T::Prefix>, env: &mut Vec<Vec<Name>>, supply: &mut FreshSupply) -> T {
    let names: Vec<Name> = (0..c.nres).map(|_| supply.fresh_base("v")).collect();
    env.push(names.clone());
    let threads: Vec<T> = c
        .threads
        .iter()
        .map(|t| match t {
            Thread::Ok => T::ok(),
            Thread::Repl(b) => T::repl(named_canon::<T>(b, env, supply)),
            Thread::Guard(p, b) => {
                let binders: Vec<Name> = (0..p.binders()).map(|_| supply.fresh_base("v")).collect();
                let action = T::named_action(p, &mut |n| lookup(env, n), &binders);
                env.push(binders);
                let body = named_canon::<T>(b, env, supply);
                env.pop();
                T::guard(action, body)
            }
        })
        .collect();
    env.pop();
    res_all(names, par_all(threads))
}

/// The ≡-canonical named representative.
pub fn normal_form<T: Process>(p: &T) -> T {
    to_named(&canonicalize(p))
}

/// Restricted names and threads of a canonical named process.
pub fn flatten<T: Process>(p: &T) -> (Vec<Name>, Vec<T>) {
    fn go<T: Process>(p: &T, res: &mut Vec<Name>, threads: &mut Vec<T>) {
        match p.view() {
            View::Nil => {}
            View::Par(a, b) => {
                go(a, res, threads);
                go(b, res, threads);
            }
            View::Res(n, q) => {
                res.push(n.clone());
                go(q, res, threads);
            }
            _ => threads.push(p.clone()),
        }
    }
    let (mut res, mut threads) = (Vec::new(), Vec::new());
    go(p, &mut res, &mut threads);
    (res, threads)
}

/// Identifies one participant of an interaction: the top-level thread,
/// which unfolding of it (0 for a plain thread), and the thread within
/// that unfolding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Participant {
    pub thread: usize,
    pub copy: usize,
    pub inner: usize,
}

#[derive(Clone, Debug)]
pub struct Interaction<T> {
    pub left: Participant,
    pub right: Participant,
    /// ≡-canonical result.
    pub result: T,
}

impl<T> Interaction<T> {
    pub fn path(&self) -> Vec<usize> {
        let (l, r) = (self.left, self.right);
        vec![l.thread, l.copy, l.inner, r.thread, r.copy, r.inner]
    }
}

struct Entry<T> {
    who: Participant,
    proc: T,
}

/// All interactions of a canonical named process. Each replicated thread
/// may be unfolded up to `repl_budget` times for a single step.
pub fn interactions<T: Process>(p: &T, repl_budget: usize) -> Vec<Interaction<T>> {
    let (restricted, threads) = flatten(p);
    let mut supply = FreshSupply::avoiding(&p.names());
    let mut copies: Vec<Vec<(Vec<Name>, Vec<T>)>> = vec![Vec::new(); threads.len()];
    let mut pool: Vec<Entry<T>> = Vec::new();
    for (i, t) in threads.iter().enumerate() {
        match t.view() {
            View::Guard(..) => pool.push(Entry { who: Participant { thread: i, copy: 0, inner: 0 }, proc: t.clone() }),
            View::Repl(body) => {
                let (res, inner) = flatten(body);
                for c in 1..=repl_budget {
                    let sigma: NameSubstitution = res.iter().map(|n| (n.clone(), supply.fresh(n))).collect();
                    let ts: Vec<T> = inner.iter().map(|t| t.rename(&sigma)).collect();
                    for (j, t) in ts.iter().enumerate() {
                        if matches!(t.view(), View::Guard(..)) {
                            pool.push(Entry { who: Participant { thread: i, copy: c, inner: j }, proc: t.clone() });
                        }
                    }
                    copies[i].push((res.iter().map(|n| sigma.apply(n)).collect(), ts));
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            let (x, y) = (pool[a].who, pool[b].who);
            if redundant(x, y) {
                continue;
            }
            let Some((ca, cb)) = T::interact(&pool[a].proc, &pool[b].proc) else { continue };
            let result = assemble(&restricted, &threads, &copies, x, y, ca, cb);
            out.push(Interaction { left: x, right: y, result: normal_form(&result) });
        }
    }
    out
}

/// Pairs that repeat another pair up to renaming of unfoldings: a later
/// unfolding is only used alongside an earlier one of the same thread.
fn redundant(x: Participant, y: Participant) -> bool {
    let later = |p: Participant, q: Participant| p.copy >= 2 && !(q.thread == p.thread && q.copy == p.copy - 1);
    later(x, y) || later(y, x)
}

fn assemble<T: Process>(
    restricted: &[Name],
    threads: &[T],
    copies: &[Vec<(Vec<Name>, Vec<T>)>],
    x: Participant,
    y: Participant,
    ca: T,
    cb: T,
) -> T {
    let consumed = |p: Participant| p == x || p == y;
    let mut names: Vec<Name> = restricted.to_vec();
    let mut out: Vec<T> = Vec::new();
    for (i, t) in threads.iter().enumerate() {
        if !consumed(Participant { thread: i, copy: 0, inner: 0 }) || !matches!(t.view(), View::Guard(..)) {
            out.push(t.clone());
        }
    }
    let mut used: Vec<(usize, usize)> = [x, y].iter().filter(|p| p.copy > 0).map(|p| (p.thread, p.copy)).collect();
    used.dedup();
    for (i, c) in used {
        let (res, ts) = &copies[i][c - 1];
        names.extend(res.iter().cloned());
        for (j, t) in ts.iter().enumerate() {
            if !consumed(Participant { thread: i, copy: c, inner: j }) {
                out.push(t.clone());
            }
        }
    }
    out.push(ca);
    out.push(cb);
    res_all(names, par_all(out))
}

/// Whether an unguarded success is present, looking through replication.
pub fn has_success<T: Process>(p: &T) -> bool {
    match p.view() {
        View::Ok => true,
        View::Par(a, b) => has_success(a) || has_success(b),
        View::Res(_, q) | View::Repl(q) => has_success(q),
        View::Nil | View::Guard(..) => false,
    }
}

/// Observable capabilities: `ok` for success plus every barb of an
/// unguarded thread (looking through replication) whose names are free.
pub fn barbs<T: Process>(p: &T) -> BTreeSet<String> {
    fn go<T: Process>(t: &T, free: &BTreeSet<Name>, out: &mut BTreeSet<String>) {
        match t.view() {
            View::Ok => {
                out.insert("ok".into());
            }
            View::Guard(a, _) => {
                for (label, names) in T::guard_barbs(a) {
                    if names.iter().all(|n| free.contains(n)) {
                        out.insert(label);
                    }
                }
            }
            View::Par(a, b) => {
                go(a, free, out);
                go(b, free, out);
            }
            View::Res(_, q) | View::Repl(q) => go(q, free, out),
            View::Nil => {}
        }
    }
    // bound names of a canonical named process are pairwise distinct and
    // distinct from its free names, so freeness decides observability
    let q = normal_form(p);
    let free = q.free_names();
    let mut out = BTreeSet::new();
    go(&q, &free, &mut out);
    out
}

/// Settings for exploring a process' reduction graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProcessBounds {
    pub depth: usize,
    pub max_states: usize,
    pub repl_budget: usize,
}

impl Default for ProcessBounds {
    fn default() -> Self {
        Self { depth: 6, max_states: 20_000, repl_budget: 2 }
    }
}

/// Bounded reachability over ≡-canonical states. `normalize` is applied
/// to every state (e.g. to collapse copies of a replicated machine).
pub fn explore_process<T: Process>(p: &T, bounds: ProcessBounds, normalize: &dyn Fn(T) -> T) -> Graph<T> {
    let init = normalize(normal_form(p));
    explore::explore(init, Bounds::new(bounds.depth, bounds.max_states), |s| {
        interactions(s, bounds.repl_budget).into_iter().map(|i| normalize(i.result)).collect()
    })
}

/// Success verdict within bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Success {
    Reached,
    /// The whole state space was explored without reaching success.
    Never,
    /// Success was not reached, but exploration was cut off.
    NotWithinBounds,
}

/// Follows the first interaction at each step (threads in canonical
/// order), stopping at a normal form, after `max_steps`, or on a repeat.
pub fn reduce_process<T: Process>(p: &T, repl_budget: usize, max_steps: usize) -> Trace<T> {
    let mut cur = normal_form(p);
    let mut seen = BTreeSet::from([cur.clone()]);
    let mut steps = Vec::new();
    let status = loop {
        let Some(i) = interactions(&cur, repl_budget).into_iter().next() else { break Status::NormalForm };
        if steps.len() == max_steps {
            break Status::Cutoff;
        }
        cur = i.result.clone();
        steps.push(Step { rule: T::RULE.into(), path: i.path(), result: i.result });
        if !seen.insert(cur.clone()) {
            break Status::Cycle;
        }
    };
    Trace { initial: p.clone(), steps, status }
}

/// Replays one recorded step: the interaction at `path` in the canonical
/// form of `p`.
pub fn step_at<T: Process>(p: &T, path: &[usize], repl_budget: usize) -> Option<T> {
    interactions(&normal_form(p), repl_budget).into_iter().find(|i| i.path() == path).map(|i| i.result)
}

pub fn succeeds<T: Process>(p: &T, bounds: ProcessBounds) -> Success {
    let g = explore_process(p, bounds, &|q| q);
    if g.states.iter().any(has_success) {
        Success::Reached
    } else if g.is_complete() {
        Success::Never
    } else {
        Success::NotWithinBounds
    }
}
