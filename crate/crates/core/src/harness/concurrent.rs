//! Suites for the encodings into π and CPC.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::calculus::{CalculusId, Term};
use crate::comb::{CalculusDef, CombTerm};
use crate::cpc::{self, CpcProcess, Pattern};
use crate::encodings::{self, Encoding};
use crate::explore::{Bounds, Graph};
use crate::harness::gen::TermGenerator;
use crate::harness::oracle::{bounded_bisim, BisimVerdict, OracleMode, Tidy};
use crate::harness::report::SuiteReport;
use crate::harness::sequential::{comb_subterms, fresh_renaming, generate};
use crate::harness::suites::{fixture_lines, parse_terms, tally, CheckConfig, CheckError, Outcome, Suite};
use crate::lambda::{LambdaTerm, Mode};
use crate::name::{Name, NameSubstitution};
use crate::pi::{self, PiAction, PiProcess};
use crate::process::{self, explore_process, flatten, interactions, normal_form, par_all, Process, Success};

/// Administrative steps allowed per source term: `base + per_node · size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AdminBound {
    pub base: usize,
    pub per_node: usize,
}

impl AdminBound {
    pub fn allows(self, steps: usize, size: usize) -> bool {
        steps <= self.base + self.per_node * size
    }
}

/// Measured on the default corpora: Milner's encoding needs at most 8
/// administrative steps at size 7, the machine encodings exactly two per
/// application node plus one or two.
pub const ADMIN_BOUND: AdminBound = AdminBound { base: 2, per_node: 2 };

pub const PI_CORPUS: &str = include_str!("../../fixtures/pi_corpus.txt");
pub const SF_CASES: &str = include_str!("../../fixtures/sf_cases.txt");

/// A result channel not free in the source.
fn result_channel(free: &BTreeSet<Name>) -> Name {
    (0..)
        .map(|k| Name::user(&if k == 0 { "c".into() } else { format!("c{k}") }))
        .find(|c| !free.contains(c))
        .expect("some name is free")
}

/// The longest run of steps that do not move a path to a new class.
/// `class[i]` is the source reduct state `i` stands for, if any; steps
/// into unclassified states keep the previous class.
pub fn admin_steps(g: &Graph<impl Ord>, class: &[Option<usize>]) -> usize {
    fn go(
        g_edges: &[Vec<usize>],
        class: &[Option<usize>],
        i: usize,
        last: Option<usize>,
        memo: &mut BTreeMap<(usize, Option<usize>), usize>,
    ) -> usize {
        if let Some(&v) = memo.get(&(i, last)) {
            return v;
        }
        let mut best = 0;
        for &j in &g_edges[i] {
            let next = class[j].or(last);
            let cost = usize::from(next == last);
            best = best.max(cost + go(g_edges, class, j, next, memo));
        }
        memo.insert((i, last), best);
        best
    }
    go(&g.edges, class, 0, class[0], &mut BTreeMap::new())
}

/// Reverse correspondence on one target graph: classified states must
/// stand for source reducts, and every state must still be able to reach
/// a classified one.
fn reverse_check<T: Ord + core::fmt::Display>(g: &Graph<T>, class: &[Result<Option<usize>, String>]) -> Outcome {
    for (s, c) in g.states.iter().zip(class) {
        if let Err(other) = c {
            return Outcome::Fail(format!("target state `{s}` reads back as `{other}`, which is not a source reduct"));
        }
    }
    let reach = g.can_reach(|i| matches!(class[i], Ok(Some(_))));
    match reach.iter().position(|ok| !ok) {
        None => Outcome::Pass,
        Some(_) if !g.is_complete() => Outcome::Inconclusive,
        Some(i) => Outcome::Fail(format!("target state `{}` can no longer reach any source reduct", g.states[i])),
    }
}

fn cycle_check<T: Ord>(g: &Graph<T>) -> Option<Outcome> {
    if !g.is_complete() {
        return Some(Outcome::Inconclusive);
    }
    g.has_cycle().then(|| Outcome::Fail("the target reduction graph has a cycle".into()))
}

pub(crate) fn run(enc: &Encoding, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport, CheckError> {
    match enc.source {
        CalculusId::Lambda | CalculusId::LambdaV => milner_suite(enc, suite, cfg),
        CalculusId::Pi => pi_suite(enc, suite, cfg),
        _ => machine_suite(enc, suite, cfg),
    }
}

// ---------------------------------------------------------------- λv → π

struct Milner<'a> {
    enc: &'a Encoding,
    cfg: &'a CheckConfig,
}

impl Milner<'_> {
    fn encode(&self, t: &LambdaTerm, c: &Name) -> PiProcess {
        match encodings::translate(self.enc, &Term::Lambda(t.clone()), c, self.cfg.mutation) {
            Ok(Term::Pi(p)) => p,
            other => unreachable!("λ into π: {other:?}"),
        }
    }

    fn source_graph(&self, t: &LambdaTerm, cfg: &CheckConfig) -> Graph<LambdaTerm> {
        t.explore(Mode::CallByValue, Bounds::new(cfg.max_steps, cfg.max_states))
    }

    fn target_graph(&self, t: &LambdaTerm, c: &Name, cfg: &CheckConfig) -> Graph<PiProcess> {
        explore_process(&self.encode(t, c), cfg.process_bounds(), &|s: PiProcess| s.tidy())
    }

    /// The source state a target state stands for: its read-back, or a
    /// match with a tidied translation. `Err` carries a read-back that is
    /// no source state at all.
    fn classify(&self, g: &Graph<PiProcess>, src: &Graph<LambdaTerm>, c: &Name) -> Vec<Result<Option<usize>, String>> {
        let images: BTreeMap<PiProcess, usize> =
            src.states.iter().enumerate().map(|(i, s)| (self.encode(s, c).tidy(), i)).collect();
        g.states
            .iter()
            .map(|s| {
                if let Some(&i) = images.get(s) {
                    return Ok(Some(i));
                }
                match encodings::milner_read_back(s, c) {
                    None => Ok(None),
                    Some(t) => src.find(&t.canonical()).map(Some).ok_or_else(|| t.to_string()),
                }
            })
            .collect()
    }

    fn correspondence(&self, t: &LambdaTerm, cfg: &CheckConfig) -> Outcome {
        let src = self.source_graph(t, cfg);
        if !src.is_complete() {
            return Outcome::Inconclusive;
        }
        let c = result_channel(&t.free_vars());
        for i in 0..src.len() {
            let g = self.target_graph(&src.states[i], &c, cfg);
            let class = self.classify(&g, &src, &c);
            for &j in &src.edges[i] {
                if !class.contains(&Ok(Some(j))) {
                    return if g.is_complete() {
                        Outcome::Fail(format!(
                            "the translation of `{}` never reaches the class of its reduct `{}`",
                            src.states[i], src.states[j]
                        ))
                    } else {
                        Outcome::Inconclusive
                    };
                }
            }
            if i > 0 {
                continue;
            }
            match reverse_check(&g, &class) {
                Outcome::Pass => {}
                other => return other,
            }
            // the value: confirm the class member against its translation
            if self.cfg.mode == OracleMode::BoundedWeakBarbedBisim {
                for v in src.terminals() {
                    let Some(k) = class.iter().position(|k| *k == Ok(Some(v))) else {
                        return if g.is_complete() {
                            Outcome::Fail(format!("the translation never reaches the class of the value `{}`", src.states[v]))
                        } else {
                            Outcome::Inconclusive
                        };
                    };
                    match bounded_bisim(&g.states[k], &self.encode(&src.states[v], &c), cfg.oracle()) {
                        BisimVerdict::EquivalentToDepth(_) => {}
                        BisimVerdict::Distinguished(w) => {
                            return Outcome::Fail(format!(
                                "the state reading back as `{}` is distinguished from its translation by barb {} at round {}",
                                src.states[v], w.barb, w.round
                            ))
                        }
                        BisimVerdict::Inconclusive => return Outcome::Inconclusive,
                    }
                }
            }
        }
        Outcome::Pass
    }

    fn divergence(&self, t: &LambdaTerm, cfg: &CheckConfig) -> Outcome {
        let src = self.source_graph(t, cfg);
        if !src.is_complete() {
            return Outcome::Inconclusive;
        }
        if src.has_cycle() {
            // a diverging source may have a diverging translation
            return Outcome::Pass;
        }
        let c = result_channel(&t.free_vars());
        let g = self.target_graph(t, &c, cfg);
        if let Some(o) = cycle_check(&g) {
            return o;
        }
        let class: Vec<Option<usize>> = self.classify(&g, &src, &c).into_iter().map(|k| k.ok().flatten()).collect();
        let admin = admin_steps(&g, &class);
        if ADMIN_BOUND.allows(admin, t.size()) {
            Outcome::Pass
        } else {
            Outcome::Fail(format!(
                "{admin} administrative steps exceed {} + {}·{}",
                ADMIN_BOUND.base,
                ADMIN_BOUND.per_node,
                t.size()
            ))
        }
    }

    fn parallelisation(&self, t: &LambdaTerm) -> Outcome {
        let c = result_channel(&t.free_vars());
        for s in lambda_apps(t) {
            let LambdaTerm::App(f, a) = s else { unreachable!() };
            let p = self.encode(s, &c);
            let Some(parts) = encodings::parallel_parts(&p) else {
                return Outcome::Fail(format!("⟦{s}⟧_c is not of the form ν n₁ ν n₂ (ap | A | B)"));
            };
            let (n1, n2) = (parts.left_chan.clone(), parts.right_chan.clone());
            let expected = PiProcess::new_res(
                n1.clone(),
                PiProcess::new_res(
                    n2.clone(),
                    par_all([encodings::milner_ap(&c, &n1, &n2), self.encode(f, &n1), self.encode(a, &n2)]),
                ),
            );
            if normal_form(&expected) != normal_form(&p) {
                return Outcome::Fail(format!("⟦{s}⟧_c differs from ν n₁ ν n₂ (ap(c,n₁,n₂) | ⟦{f}⟧_n₁ | ⟦{a}⟧_n₂)"));
            }
        }
        Outcome::Pass
    }

    fn name_invariance(&self, t: &LambdaTerm) -> Outcome {
        let mut avoid = t.names();
        let c = result_channel(&avoid);
        avoid.insert(c.clone());
        let sigma = fresh_renaming(&t.free_vars(), &avoid);
        let l = normal_form(&self.encode(&t.rename(&sigma), &c));
        let r = normal_form(&self.encode(t, &c).rename(&sigma));
        if l == r {
            Outcome::Pass
        } else {
            Outcome::Fail("renaming free names does not commute with the translation".into())
        }
    }
}

fn lambda_apps(t: &LambdaTerm) -> Vec<&LambdaTerm> {
    let mut out = Vec::new();
    fn go<'a>(t: &'a LambdaTerm, out: &mut Vec<&'a LambdaTerm>) {
        match t {
            LambdaTerm::Var(_) => {}
            LambdaTerm::Abs(_, b) => go(b, out),
            LambdaTerm::App(f, a) => {
                out.push(t);
                go(f, out);
                go(a, out);
            }
        }
    }
    go(t, &mut out);
    out
}

fn milner_suite(enc: &Encoding, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport, CheckError> {
    let m = Milner { enc, cfg };
    let items: Vec<LambdaTerm> = match &cfg.terms {
        Some(ts) => parse_terms(CalculusId::LambdaV, ts)?
            .into_iter()
            .map(|t| match t {
                Term::Lambda(t) => t,
                _ => unreachable!("parsed as λ"),
            })
            .collect(),
        None if suite == Suite::NameInvariance => {
            let mut g = TermGenerator::new(CalculusId::LambdaV, 7, cfg.seed).open();
            generate(cfg.size_or(30), || g.lambda(), |t| !t.is_closed())
        }
        None => {
            // closed and normalizing, so each has a value normal form; there
            // are few closed non-values this small, so values make up the rest
            let n = cfg.size_or(30);
            let normalizing = |t: &LambdaTerm| {
                let src = m.source_graph(t, cfg);
                src.is_complete() && !src.has_cycle()
            };
            let mut g = TermGenerator::new(CalculusId::LambdaV, 7, cfg.seed);
            let mut terms = generate(n, || g.lambda().canonical(), |t| !t.is_value() && normalizing(t));
            let mut g = TermGenerator::new(CalculusId::LambdaV, 7, cfg.seed ^ 0x7a1e);
            terms.extend(generate(n - terms.len(), || g.lambda().canonical(), |t| t.is_value()));
            terms
        }
    };
    let rerun = matches!(suite, Suite::OperationalCorrespondence | Suite::DivergenceReflection);
    Ok(tally(
        suite,
        enc,
        cfg,
        &items,
        |t| t.to_string(),
        |t, cfg| match suite {
            Suite::OperationalCorrespondence => m.correspondence(t, cfg),
            Suite::DivergenceReflection => m.divergence(t, cfg),
            Suite::Parallelisation => m.parallelisation(t),
            _ => m.name_invariance(t),
        },
        rerun,
    ))
}

// ------------------------------------------------------- SF/SK → CPC

struct MachineEnc<'a> {
    enc: &'a Encoding,
    cfg: &'a CheckConfig,
    def: CalculusDef,
    machine: Vec<CpcProcess>,
    machine_nf: Vec<CpcProcess>,
}

impl<'a> MachineEnc<'a> {
    fn new(enc: &'a Encoding, cfg: &'a CheckConfig) -> Self {
        let machine = encodings::machine_cases(enc, cfg.mutation_for(enc));
        let machine_nf = machine.iter().map(normal_form).collect();
        let def = enc.source.combinatory().expect("combinatory source");
        Self { enc, cfg, def, machine, machine_nf }
    }

    fn ops(&self) -> &'static [&'static str] {
        if self.enc.source == CalculusId::Sk {
            &["S", "K"]
        } else {
            &["S", "F"]
        }
    }

    fn encode(&self, t: &CombTerm, c: &Name) -> CpcProcess {
        match encodings::translate(self.enc, &Term::Comb(t.clone()), c, self.cfg.mutation) {
            Ok(Term::Cpc(p)) => p,
            other => unreachable!("combinatory into CPC: {other:?}"),
        }
    }

    fn source_graph(&self, t: &CombTerm, cfg: &CheckConfig) -> Graph<CombTerm> {
        self.def.explore(t, Bounds::new(cfg.max_steps, cfg.max_states))
    }

    fn target_graph(&self, t: &CombTerm, c: &Name, cfg: &CheckConfig) -> Graph<CpcProcess> {
        explore_process(&self.encode(t, c), cfg.process_bounds(), &|s: CpcProcess| s.tidy())
    }

    fn classify(&self, g: &Graph<CpcProcess>, src: &Graph<CombTerm>, c: &Name) -> Vec<Result<Option<usize>, String>> {
        g.states
            .iter()
            .map(|s| match encodings::parallel_read_back(s, c, &self.machine) {
                None => Ok(None),
                Some(t) => src.find(&t).map(Some).ok_or_else(|| t.to_string()),
            })
            .collect()
    }

    fn construction(&self, t: &CombTerm, cfg: &CheckConfig) -> Outcome {
        let c = result_channel(&t.vars());
        let g = self.target_graph(t, &c, cfg);
        let emitted = CpcProcess::emit(Pattern::compound(Pattern::Var(c.clone()), cpc::sf_construction(t)));
        let want = CpcProcess::new_par(emitted, par_all(self.machine.iter().cloned())).tidy();
        if g.contains(&want) {
            Outcome::Pass
        } else if g.is_complete() {
            Outcome::Fail(format!("⟦{t}⟧_c never reaches c•⌈{t}⌉ | R"))
        } else {
            Outcome::Inconclusive
        }
    }

    fn correspondence(&self, t: &CombTerm, cfg: &CheckConfig) -> Outcome {
        let src = self.source_graph(t, cfg);
        if !src.is_complete() {
            return Outcome::Inconclusive;
        }
        let c = result_channel(&t.vars());
        let g = self.target_graph(t, &c, cfg);
        let class = self.classify(&g, &src, &c);
        for &j in &src.edges[0] {
            if !class.contains(&Ok(Some(j))) {
                return if g.is_complete() {
                    Outcome::Fail(format!("⟦{t}⟧_c never reaches the class of its reduct `{}`", src.states[j]))
                } else {
                    Outcome::Inconclusive
                };
            }
        }
        reverse_check(&g, &class)
    }

    fn divergence(&self, t: &CombTerm, cfg: &CheckConfig) -> Outcome {
        let src = self.source_graph(t, cfg);
        if !src.is_complete() {
            return Outcome::Inconclusive;
        }
        if src.has_cycle() {
            return Outcome::Pass;
        }
        let c = result_channel(&t.vars());
        let g = self.target_graph(t, &c, cfg);
        if let Some(o) = cycle_check(&g) {
            return o;
        }
        let class: Vec<Option<usize>> = self.classify(&g, &src, &c).into_iter().map(|k| k.ok().flatten()).collect();
        let admin = admin_steps(&g, &class);
        if ADMIN_BOUND.allows(admin, t.size()) {
            Outcome::Pass
        } else {
            Outcome::Fail(format!(
                "{admin} administrative steps exceed {} + {}·{}",
                ADMIN_BOUND.base,
                ADMIN_BOUND.per_node,
                t.size()
            ))
        }
    }

    fn parallelisation(&self, t: &CombTerm) -> Outcome {
        let c = result_channel(&t.vars());
        for s in comb_subterms(t) {
            let CombTerm::App(f, a) = s else { continue };
            let p = self.encode(s, &c);
            let Some(parts) = encodings::parallel_parts(&p) else {
                return Outcome::Fail(format!("⟦{s}⟧_c is not of the form ν n₁ ν n₂ (ap | A | B)"));
            };
            let (n1, n2) = (parts.left_chan.clone(), parts.right_chan.clone());
            let ap =
                if self.enc.source == CalculusId::Sk { encodings::sk_ap(&c, &n1, &n2) } else { encodings::sf_ap(&c, &n1, &n2) };
            let expected = CpcProcess::new_res(
                n1.clone(),
                CpcProcess::new_res(n2.clone(), par_all([ap, self.encode(f, &n1), self.encode(a, &n2)])),
            );
            if normal_form(&expected) != normal_form(&p) {
                return Outcome::Fail(format!("⟦{s}⟧_c differs from ν n₁ ν n₂ (ap(c,n₁,n₂) | ⟦{f}⟧_n₁ | ⟦{a}⟧_n₂)"));
            }
        }
        Outcome::Pass
    }

    fn name_invariance(&self, t: &CombTerm) -> Outcome {
        let mut avoid = t.vars();
        let c = result_channel(&avoid);
        avoid.insert(c.clone());
        let sigma = fresh_renaming(&t.vars(), &avoid);
        let map: BTreeMap<Name, CombTerm> = sigma.iter().map(|(a, b)| (a.clone(), CombTerm::Var(b.clone()))).collect();
        let l = normal_form(&self.encode(&t.subst(&map), &c));
        let r = normal_form(&self.encode(t, &c).rename(&sigma));
        if l == r {
            Outcome::Pass
        } else {
            Outcome::Fail("renaming free names does not commute with the translation".into())
        }
    }

    /// Indices of the machine cases taking part in some interaction
    /// reachable from the translation of `t`.
    fn fired_cases(&self, t: &CombTerm, cfg: &CheckConfig) -> (BTreeSet<usize>, bool) {
        let c = result_channel(&t.vars());
        let g = self.target_graph(t, &c, cfg);
        let mut fired = BTreeSet::new();
        for s in &g.states {
            let (_, threads) = flatten(s);
            for i in interactions(s, cfg.repl_budget) {
                for who in [i.left, i.right] {
                    if who.copy == 0 {
                        continue;
                    }
                    let thread = normal_form(&threads[who.thread]);
                    if let Some(k) = self.machine_nf.iter().position(|m| *m == thread) {
                        fired.insert(k);
                    }
                }
            }
        }
        (fired, g.is_complete())
    }

    fn closed_corpus(&self, n: usize, salt: u64, keep: impl Fn(&CombTerm) -> bool) -> Vec<CombTerm> {
        let mut g = TermGenerator::new(self.enc.source, 6, self.cfg.seed ^ salt);
        let ops = self.ops();
        generate(n, || g.comb(ops), keep)
    }

    /// Reducible, normalizing terms until their one-step reductions
    /// number at least `steps`.
    fn step_corpus(&self, steps: usize) -> Vec<CombTerm> {
        let candidates = self.closed_corpus(steps * 4, 0x57e9, |t| {
            let src = self.source_graph(t, self.cfg);
            !self.def.is_normal(t) && src.is_complete() && !src.has_cycle()
        });
        let mut out = Vec::new();
        let mut count = 0;
        for t in candidates {
            if count >= steps {
                break;
            }
            count += self.def.successors(&t).len();
            out.push(t);
        }
        out
    }
}

fn machine_suite(enc: &Encoding, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport, CheckError> {
    let me = MachineEnc::new(enc, cfg);
    let replay: Option<Vec<CombTerm>> = match &cfg.terms {
        Some(ts) => Some(
            parse_terms(enc.source, ts)?
                .into_iter()
                .map(|t| match t {
                    Term::Comb(t) => t,
                    _ => unreachable!("parsed as combinatory"),
                })
                .collect(),
        ),
        None => None,
    };
    let n = cfg.size_or(30);
    let items = replay.clone().unwrap_or_else(|| match suite {
        Suite::Construction | Suite::Parallelisation => me.closed_corpus(n, 0, |_| true),
        Suite::NameInvariance => {
            let mut g = TermGenerator::new(enc.source, 6, cfg.seed).open();
            let ops = me.ops();
            generate(n, || g.comb(ops), |t| !t.is_closed())
        }
        _ => me.step_corpus(n),
    });
    if suite == Suite::MachineCoverage {
        let corpus = replay.unwrap_or_else(|| {
            let mut all = me.closed_corpus(n, 0, |_| true);
            all.extend(me.step_corpus(n));
            if enc.source == CalculusId::Sf {
                all.extend(fixture_lines(SF_CASES).map(|l| crate::comb::parse(l).expect("fixture parses")));
            }
            all
        });
        return Ok(coverage_report(&me, enc, cfg, &corpus));
    }
    let rerun = matches!(suite, Suite::Construction | Suite::OperationalCorrespondence | Suite::DivergenceReflection);
    Ok(tally(
        suite,
        enc,
        cfg,
        &items,
        |t| t.to_string(),
        |t, cfg| match suite {
            Suite::Construction => me.construction(t, cfg),
            Suite::OperationalCorrespondence => me.correspondence(t, cfg),
            Suite::DivergenceReflection => me.divergence(t, cfg),
            Suite::Parallelisation => me.parallelisation(t),
            _ => me.name_invariance(t),
        },
        rerun,
    ))
}

/// Indices (from 0) of the machine cases that take part in some
/// interaction reachable from the translation of `t`, and whether that
/// state space was explored completely.
pub fn fired_machine_cases(enc: &Encoding, t: &CombTerm, cfg: &CheckConfig) -> (BTreeSet<usize>, bool) {
    MachineEnc::new(enc, cfg).fired_cases(t, cfg)
}

fn coverage_report(me: &MachineEnc<'_>, enc: &Encoding, cfg: &CheckConfig, corpus: &[CombTerm]) -> SuiteReport {
    let mut fired = BTreeSet::new();
    let mut complete = true;
    for t in corpus {
        let (f, c) = me.fired_cases(t, cfg);
        fired.extend(f);
        complete &= c;
    }
    let missing: Vec<usize> = (0..me.machine.len()).filter(|k| !fired.contains(k)).collect();
    let outcome = if missing.is_empty() {
        Outcome::Pass
    } else if !complete {
        Outcome::Inconclusive
    } else {
        let shown: Vec<String> = missing.iter().map(|k| format!("{} (`{}`)", k + 1, me.machine[*k])).collect();
        Outcome::Fail(format!("machine cases never fired: {}", shown.join(", ")))
    };
    let first = corpus.first().cloned();
    let mut report = tally(
        Suite::MachineCoverage,
        enc,
        cfg,
        &[first],
        |t| t.as_ref().map(ToString::to_string).unwrap_or_default(),
        |_, _| outcome.clone(),
        false,
    );
    report.checked = corpus.len();
    report.notes.push(format!("{} of {} cases fired", fired.len(), me.machine.len()));
    report
}

// ---------------------------------------------------------------- π → CPC

fn pi_encode(enc: &Encoding, cfg: &CheckConfig, p: &PiProcess) -> CpcProcess {
    match encodings::translate(enc, &Term::Pi(p.clone()), &Name::user("c"), cfg.mutation) {
        Ok(Term::Cpc(q)) => q,
        other => unreachable!("π into CPC: {other:?}"),
    }
}

fn pi_fixtures() -> Vec<PiProcess> {
    fixture_lines(PI_CORPUS).map(|l| pi::parse(l).expect("fixture parses")).collect()
}

/// Structural expectation for `⟦p⟧` given the translations of its parts.
fn pi_expected(enc: &Encoding, cfg: &CheckConfig, p: &PiProcess) -> CpcProcess {
    let go = |q: &PiProcess| pi_encode(enc, cfg, q);
    match p {
        PiProcess::Nil => CpcProcess::Nil,
        PiProcess::Ok => CpcProcess::Ok,
        PiProcess::Par(a, b) => CpcProcess::new_par(go(a), go(b)),
        PiProcess::Repl(q) => CpcProcess::new_repl(go(q)),
        PiProcess::Res(n, q) => CpcProcess::new_res(n.clone(), go(q)),
        PiProcess::Act(a, q) => {
            let n = encodings::pi_fresh_name();
            let pat = match a {
                PiAction::In(ch, b) => Pattern::chain([Pattern::Var(ch.clone()), Pattern::Bind(b.clone()), Pattern::Var(n)]),
                PiAction::Out(ch, b) => Pattern::chain([Pattern::Var(ch.clone()), Pattern::Var(b.clone()), Pattern::Bind(n)]),
            };
            CpcProcess::case(pat, go(q))
        }
    }
}

fn pi_subterms(p: &PiProcess) -> Vec<&PiProcess> {
    let mut out = Vec::from([p]);
    match p {
        PiProcess::Nil | PiProcess::Ok => {}
        PiProcess::Par(a, b) => {
            out.extend(pi_subterms(a));
            out.extend(pi_subterms(b));
        }
        PiProcess::Repl(q) | PiProcess::Res(_, q) | PiProcess::Act(_, q) => out.extend(pi_subterms(q)),
    }
    out
}

fn pi_suite(enc: &Encoding, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport, CheckError> {
    let items: Vec<PiProcess> = match &cfg.terms {
        Some(ts) => parse_terms(CalculusId::Pi, ts)?
            .into_iter()
            .map(|t| match t {
                Term::Pi(p) => p,
                _ => unreachable!("parsed as π"),
            })
            .collect(),
        None => {
            let mut ps = pi_fixtures();
            if suite == Suite::Homomorphism {
                let pairs: Vec<PiProcess> = ps.windows(2).map(|w| PiProcess::new_par(w[0].clone(), w[1].clone())).collect();
                ps.extend(pairs);
            }
            ps
        }
    };
    let enc_of = |p: &PiProcess| pi_encode(enc, cfg, p);
    let source_graph = |p: &PiProcess, cfg: &CheckConfig| explore_process(p, cfg.process_bounds(), &|q| q);
    let check = |p: &PiProcess, cfg: &CheckConfig| -> Outcome {
        match suite {
            Suite::Homomorphism => pi_subterms(p)
                .into_iter()
                .find_map(|s| match s {
                    PiProcess::Par(a, b) if enc_of(s) != CpcProcess::new_par(enc_of(a), enc_of(b)) => {
                        Some(Outcome::Fail(format!("⟦{s}⟧ is not ⟦{a}⟧ | ⟦{b}⟧")))
                    }
                    _ => None,
                })
                .unwrap_or(Outcome::Pass),
            Suite::Compositionality => pi_subterms(p)
                .into_iter()
                .find_map(|s| {
                    (enc_of(s) != pi_expected(enc, cfg, s)).then(|| Outcome::Fail(format!("⟦{s}⟧ is not built from its parts")))
                })
                .unwrap_or(Outcome::Pass),
            Suite::NameInvariance => {
                let free = p.free_names();
                let sigma: NameSubstitution = fresh_renaming(&free, &p.names());
                if normal_form(&enc_of(&p.rename(&sigma))) == normal_form(&enc_of(p).rename(&sigma)) {
                    Outcome::Pass
                } else {
                    Outcome::Fail("renaming free names does not commute with the translation".into())
                }
            }
            Suite::SuccessSensitiveness => {
                let (s, t) = (process::succeeds(p, cfg.process_bounds()), process::succeeds(&enc_of(p), cfg.process_bounds()));
                match (s, t) {
                    (Success::NotWithinBounds, _) | (_, Success::NotWithinBounds) => Outcome::Inconclusive,
                    (s, t) if s == t => Outcome::Pass,
                    (s, t) => Outcome::Fail(format!("source success is {s:?} but target success is {t:?}")),
                }
            }
            Suite::RedexCount | Suite::OperationalCorrespondence => {
                let g = source_graph(p, cfg);
                for (i, s) in g.states.iter().enumerate() {
                    if !g.expanded[i] {
                        continue;
                    }
                    let target: Vec<CpcProcess> =
                        interactions(&normal_form(&enc_of(s)), cfg.repl_budget).into_iter().map(|x| x.result).collect();
                    let source: Vec<PiProcess> = g.edges[i].iter().map(|&j| g.states[j].clone()).collect();
                    if suite == Suite::RedexCount {
                        let n = interactions(s, cfg.repl_budget).len();
                        if n != target.len() {
                            return Outcome::Fail(format!("`{s}` has {n} interactions, its translation {}", target.len()));
                        }
                        continue;
                    }
                    let want: BTreeSet<CpcProcess> = source.iter().map(|q| normal_form(&enc_of(q))).collect();
                    let got: BTreeSet<CpcProcess> = target.into_iter().collect();
                    if want != got {
                        return Outcome::Fail(format!("the steps of ⟦{s}⟧ are not the translations of the steps of `{s}`"));
                    }
                }
                if g.is_complete() {
                    Outcome::Pass
                } else {
                    Outcome::Inconclusive
                }
            }
            _ => {
                let g = source_graph(p, cfg);
                if !g.is_complete() {
                    return Outcome::Inconclusive;
                }
                if g.has_cycle() {
                    return Outcome::Pass;
                }
                let t = explore_process(&enc_of(p), cfg.process_bounds(), &|q| q);
                cycle_check(&t).unwrap_or(Outcome::Pass)
            }
        }
    };
    Ok(tally(suite, enc, cfg, &items, |p| p.to_string(), check, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore;

    #[test]
    fn result_channel_avoids_free_names() {
        assert_eq!(result_channel(&BTreeSet::new()), Name::user("c"));
        let free = BTreeSet::from([Name::user("c"), Name::user("c1")]);
        assert_eq!(result_channel(&free), Name::user("c2"));
    }

    #[test]
    fn admin_steps_count_steps_between_classes() {
        // 0 → 1 → 2 → 3, with 2 standing for a new source state
        let g = explore::explore(0u8, Bounds::new(10, 10), |&s| if s < 3 { Vec::from([s + 1]) } else { Vec::new() });
        assert_eq!(admin_steps(&g, &[Some(0), None, Some(1), None]), 2);
        assert_eq!(admin_steps(&g, &[Some(0), Some(1), Some(2), Some(3)]), 0);
    }

    #[test]
    fn every_parallel_state_reads_back() {
        let enc = encodings::by_id("sf-cpc").unwrap();
        let cfg = CheckConfig::default();
        let me = MachineEnc::new(enc, &cfg);
        let m = crate::comb::parse("F F S F S").unwrap();
        let c = Name::user("c");
        let src = me.source_graph(&m, &cfg);
        let g = me.target_graph(&m, &c, &cfg);
        assert!(g.is_complete() && !g.has_cycle());
        assert_eq!(encodings::parallel_read_back(&g.states[0], &c, &me.machine), Some(m));
        let class = me.classify(&g, &src, &c);
        assert!(class.iter().all(|k| matches!(k, Ok(Some(_)))), "{class:?}");
    }

    #[test]
    fn machine_cases_fire_on_their_fixtures() {
        let enc = encodings::by_id("sf-cpc").unwrap();
        let cfg = CheckConfig::default();
        let me = MachineEnc::new(enc, &cfg);
        for (k, line) in fixture_lines(SF_CASES).enumerate() {
            let (fired, complete) = me.fired_cases(&crate::comb::parse(line).unwrap(), &cfg);
            assert!(complete && fired.contains(&k), "case {} on `{line}`: {fired:?}", k + 1);
        }
    }
}
