//! The equivalence used where a translated term should behave like
//! another: canonical equality after discarding administrative debris,
//! backed by a bounded weak barbed bisimulation game.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cpc::{self, CpcProcess};
use crate::explore::Graph;
use crate::name::{Name, NameSubstitution};
use crate::pi::{PiAction, PiProcess};
use crate::process::{self, explore_process, flatten, normal_form, par_all, res_all, Process, ProcessBounds};

/// A process calculus the oracle knows how to tidy.
pub trait Tidy: Process {
    /// Removes behaviourally invisible debris left by administrative
    /// steps, returning a canonical representative.
    fn tidy(&self) -> Self;
}

impl Tidy for PiProcess {
    fn tidy(&self) -> Self {
        pi_admin(self)
    }
}

impl Tidy for CpcProcess {
    fn tidy(&self) -> Self {
        cpc::collapse_machine(self)
    }
}

fn subject(p: &PiProcess) -> Option<&Name> {
    match p {
        PiProcess::Act(a, _) => Some(a.subject()),
        PiProcess::Repl(q) => subject(q),
        _ => None,
    }
}

fn inputs_on(p: &PiProcess, y: &Name) -> bool {
    match p {
        PiProcess::Nil | PiProcess::Ok => false,
        PiProcess::Par(a, b) => inputs_on(a, y) || inputs_on(b, y),
        PiProcess::Repl(q) | PiProcess::Res(_, q) => inputs_on(q, y),
        PiProcess::Act(PiAction::In(ch, _), q) => ch == y || inputs_on(q, y),
        PiProcess::Act(PiAction::Out(..), q) => inputs_on(q, y),
    }
}

/// `!y(w).x̄⟨w⟩` as `(y, x)`.
fn forwarder(p: &PiProcess) -> Option<(&Name, &Name)> {
    let PiProcess::Repl(q) = p else { return None };
    let PiProcess::Act(PiAction::In(y, w), k) = &**q else { return None };
    let PiProcess::Act(PiAction::Out(x, w2), rest) = &**k else { return None };
    (w == w2 && x != w && x != y && **rest == PiProcess::Nil).then_some((y, x))
}

/// `ā⟨y⟩.!y(…)` with `y` restricted and used nowhere else: the server
/// cannot be reached before the output, so it may stand beside it.
fn guarded_server(p: &PiProcess) -> Option<(&Name, &PiProcess)> {
    let PiProcess::Act(PiAction::Out(a, y), k) = p else { return None };
    let PiProcess::Repl(q) = &**k else { return None };
    let PiProcess::Act(PiAction::In(s, _), _) = &**q else { return None };
    (s == y && a != y).then_some((y, k))
}

/// Administrative normalisation for π, up to a fixed point:
///
/// * a top-level thread whose subject is restricted and occurs in no
///   other thread can never fire, and is dropped;
/// * a private server guarded only by the output that publishes its
///   name is moved beside that output;
/// * a private forwarder `!y(w).x̄⟨w⟩`, where nothing else ever inputs
///   on `y`, is inlined by renaming `y` to `x` everywhere else.
///
/// Both are sound for processes that use received names only to send
/// on, which is the discipline of Milner's encoding.
pub fn pi_admin(p: &PiProcess) -> PiProcess {
    let mut cur = normal_form(p);
    'outer: loop {
        let (res, threads) = flatten(&cur);
        let private: BTreeSet<&Name> = res.iter().collect();
        for (i, t) in threads.iter().enumerate() {
            let others = || threads.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, u)| u);
            let unused_elsewhere = |n: &Name| private.contains(n) && others().all(|u| !u.free_names().contains(n));
            if subject(t).is_some_and(unused_elsewhere) {
                let rest: Vec<PiProcess> = others().cloned().collect();
                cur = normal_form(&res_all(res.clone(), par_all(rest)));
                continue 'outer;
            }
            if let (Some((y, server)), PiProcess::Act(out, _)) = (guarded_server(t), t) {
                if unused_elsewhere(y) {
                    let mut rest: Vec<PiProcess> = others().cloned().collect();
                    rest.push(PiProcess::Act(out.clone(), Box::new(PiProcess::Nil)));
                    rest.push(server.clone());
                    cur = normal_form(&res_all(res.clone(), par_all(rest)));
                    continue 'outer;
                }
            }
            if let Some((y, x)) = forwarder(t) {
                if private.contains(y) && others().all(|u| !inputs_on(u, y)) {
                    let sigma = NameSubstitution::single(y.clone(), x.clone());
                    let rest: Vec<PiProcess> = others().map(|u| u.rename(&sigma)).collect();
                    let names: Vec<Name> = res.iter().filter(|n| *n != y).cloned().collect();
                    cur = normal_form(&res_all(names, par_all(rest)));
                    continue 'outer;
                }
            }
        }
        return cur;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    CanonicalEquality,
    BoundedWeakBarbedBisim,
}

/// Settings of the equivalence check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceOracle {
    /// Rounds of the bisimulation game.
    pub depth: usize,
    pub repl_budget: usize,
    pub mode: OracleMode,
    /// State cap for the explorations the game is played on.
    pub max_states: usize,
}

impl Default for EquivalenceOracle {
    fn default() -> Self {
        Self { depth: 6, repl_budget: 2, mode: OracleMode::BoundedWeakBarbedBisim, max_states: 4_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimVerdict {
    /// No difference shows within the configured number of rounds.
    EquivalentToDepth(usize),
    Distinguished(Witness),
    /// One of the explorations was cut off by the state cap.
    Inconclusive,
}

/// How two processes were told apart: after the given moves, one side
/// can weakly exhibit a barb the other cannot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub barb: String,
    /// Round at which the difference appeared (0 = immediately).
    pub round: usize,
}

/// Weak barbs per state: every barb reachable through zero or more
/// steps.
fn weak_barbs<T: Process>(g: &Graph<T>) -> Vec<BTreeSet<String>> {
    let strong: Vec<BTreeSet<String>> = g.states.iter().map(process::barbs).collect();
    let reach = weak_reach(g);
    reach.iter().map(|r| r.iter().flat_map(|&j| strong[j].iter().cloned()).collect()).collect()
}

/// Reflexive-transitive successor sets.
fn weak_reach<T>(g: &Graph<T>) -> Vec<BTreeSet<usize>> {
    (0..g.states.len())
        .map(|i| {
            let mut seen = BTreeSet::from([i]);
            let mut stack = vec![i];
            while let Some(k) = stack.pop() {
                for &j in &g.edges[k] {
                    if seen.insert(j) {
                        stack.push(j);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Bounded weak barbed bisimulation: refines the full relation between
/// the two explored graphs `depth` times and asks whether the initial
/// states are still related.
pub fn bounded_bisim<T: Tidy>(p: &T, q: &T, oracle: EquivalenceOracle) -> BisimVerdict {
    let bounds = ProcessBounds { depth: usize::MAX, max_states: oracle.max_states, repl_budget: oracle.repl_budget };
    let gp = explore_process(p, bounds, &|s: T| s.tidy());
    let gq = explore_process(q, bounds, &|s: T| s.tidy());
    let (bp, bq) = (weak_barbs(&gp), weak_barbs(&gq));
    let (rp, rq) = (weak_reach(&gp), weak_reach(&gq));
    if !gp.is_complete() || !gq.is_complete() {
        // unexpanded states look stuck, so neither answer could be trusted
        return BisimVerdict::Inconclusive;
    }
    let (np, nq) = (gp.states.len(), gq.states.len());
    // rel[i][j]: related so far; differing weak barbs separate at round 0
    let mut rel: Vec<Vec<bool>> = (0..np).map(|i| (0..nq).map(|j| bp[i] == bq[j]).collect()).collect();
    if !rel[0][0] {
        let barb = bp[0].symmetric_difference(&bq[0]).next().cloned().unwrap_or_default();
        return BisimVerdict::Distinguished(Witness { barb, round: 0 });
    }
    for round in 1..=oracle.depth {
        let mut next = rel.clone();
        let mut changed = false;
        for i in 0..np {
            for j in 0..nq {
                if !rel[i][j] {
                    continue;
                }
                let forth = gp.edges[i].iter().all(|&i2| rq[j].iter().any(|&j2| rel[i2][j2]));
                let back = gq.edges[j].iter().all(|&j2| rp[i].iter().any(|&i2| rel[i2][j2]));
                if !(forth && back) {
                    next[i][j] = false;
                    changed = true;
                }
            }
        }
        rel = next;
        if !rel[0][0] {
            return BisimVerdict::Distinguished(Witness { barb: first_difference(&bp, &bq, &rp, &rq), round });
        }
        if !changed {
            break;
        }
    }
    BisimVerdict::EquivalentToDepth(oracle.depth)
}

/// A barb that some reachable state of one side has and no reachable
/// state of the other has, as a readable witness.
fn first_difference(bp: &[BTreeSet<String>], bq: &[BTreeSet<String>], rp: &[BTreeSet<usize>], rq: &[BTreeSet<usize>]) -> String {
    let sets =
        |b: &[BTreeSet<String>], r: &BTreeSet<usize>| -> BTreeSet<BTreeSet<String>> { r.iter().map(|&k| b[k].clone()).collect() };
    let (sp, sq) = (sets(bp, &rp[0]), sets(bq, &rq[0]));
    sp.symmetric_difference(&sq)
        .next()
        .map(|s| {
            let mut v: Vec<String> = s.iter().cloned().collect();
            v.sort();
            alloc::format!("{{{}}}", v.join(", "))
        })
        .unwrap_or_default()
}

/// Equivalence classes of target processes keyed by tidy canonical form.
#[derive(Clone, Debug, Default)]
pub struct ClassSet<T: Ord> {
    keys: BTreeMap<T, usize>,
}

impl<T: Tidy> ClassSet<T> {
    pub fn new() -> Self {
        Self { keys: BTreeMap::new() }
    }

    /// Adds `p` as a representative of class `label`.
    pub fn insert(&mut self, p: &T, label: usize) {
        self.keys.insert(p.tidy(), label);
    }

    /// The class of an already tidied state.
    pub fn class_of(&self, tidy: &T) -> Option<usize> {
        self.keys.get(tidy).copied()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpc::sf_machine;
    use crate::pi::parse;

    fn pi(s: &str) -> PiProcess {
        parse(s).unwrap()
    }

    #[test]
    fn admin_drops_dead_servers_and_inlines_forwarders() {
        assert_eq!(pi_admin(&pi("new y. !y(w).x<w>.0 | a<b>.0")), normal_form(&pi("a<b>.0")));
        assert_eq!(pi_admin(&pi("new y. (!y(w).x<w>.0 | c<y>.0)")), normal_form(&pi("c<x>.0")));
        // an input elsewhere on y keeps the forwarder
        let kept = pi("new y. (!y(w).x<w>.0 | c<y>.0 | y(z).0)");
        assert_eq!(pi_admin(&kept), normal_form(&kept));
    }

    #[test]
    fn bisim_basics() {
        let o = EquivalenceOracle::default();
        let p = pi("a<b>.0 | a(x).ok");
        assert_eq!(bounded_bisim(&p, &p, o), BisimVerdict::EquivalentToDepth(6));
        assert_eq!(
            bounded_bisim(&PiProcess::Ok, &PiProcess::Nil, o),
            BisimVerdict::Distinguished(Witness { barb: "ok".into(), round: 0 })
        );
        // the τ-step is invisible to weak bisimulation
        assert!(matches!(bounded_bisim(&pi("new a. (a<b>.0 | a(x).ok)"), &PiProcess::Ok, o), BisimVerdict::EquivalentToDepth(_)));
        // but a choice that commits early is not
        let early = pi("new a. (a<b>.0 | a(x).c<x>.0 | a(x).d<x>.0)");
        let late = pi("new a. (a<b>.0 | a(x).c<x>.0) | new a. (a<b>.0 | a(x).d<x>.0)");
        assert!(matches!(bounded_bisim(&early, &late, o), BisimVerdict::Distinguished(_)));
    }

    #[test]
    fn machine_copies_are_equivalent() {
        let o = EquivalenceOracle::default();
        let two = CpcProcess::new_par(sf_machine(), sf_machine());
        assert!(matches!(bounded_bisim(&two, &sf_machine(), o), BisimVerdict::EquivalentToDepth(_)));
    }
}
