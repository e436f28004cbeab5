//! Translations between the calculi, with deliberately broken variants
//! used to show that the criteria checks can fail.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::calculus::{CalculusId, Term};
use crate::comb::{self, CombError, CombTerm};
use crate::cpc::{self, CpcProcess, Pattern};
use crate::lambda::LambdaTerm;
use crate::name::{rename_policy, FreshSupply, Name};
use crate::pi::{PiAction, PiProcess};
use crate::process::{self, Process, ProcessBounds};

/// Which criteria an encoding is meant to satisfy, and so which checks
/// apply to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Preserves application (sequential) or parallel composition
    /// (concurrent) on the nose.
    Homomorphism,
    /// Application becomes `ν n₁ ν n₂ (ap | ⟦M⟧_n₁ | ⟦N⟧_n₂)`.
    ParallelEncoding,
    /// Compositional, name invariant, operationally corresponding,
    /// divergence reflecting and success sensitive.
    ValidEncoding,
    /// A plain translation with no structural claim.
    Translation,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Homomorphism => "homomorphism",
            Kind::ParallelEncoding => "parallel_encoding",
            Kind::ValidEncoding => "valid_encoding",
            Kind::Translation => "translation",
        })
    }
}

#[derive(Clone, Copy)]
pub struct Encoding {
    pub id: &'static str,
    pub source: CalculusId,
    pub target: CalculusId,
    pub kind: Kind,
    /// Parametrised by a result channel.
    pub channel: bool,
    pub rename_policy: fn(&Name) -> [Name; 1],
}

impl fmt::Debug for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} -> {}, {})", self.id, self.source, self.target, self.kind)
    }
}

const fn enc(id: &'static str, source: CalculusId, target: CalculusId, kind: Kind, channel: bool) -> Encoding {
    Encoding { id, source, target, kind, channel, rename_policy }
}

pub static ENCODINGS: [Encoding; 8] = [
    enc("lambda-sk", CalculusId::Lambda, CalculusId::Sk, Kind::Homomorphism, false),
    enc("sk-lambda", CalculusId::Sk, CalculusId::Lambda, Kind::Homomorphism, false),
    enc("sk-sf", CalculusId::Sk, CalculusId::Sf, Kind::Homomorphism, false),
    enc("lambdav-pi", CalculusId::LambdaV, CalculusId::Pi, Kind::ParallelEncoding, true),
    enc("sf-cpc", CalculusId::Sf, CalculusId::Cpc, Kind::ParallelEncoding, true),
    enc("sf-cpc-alt", CalculusId::Sf, CalculusId::Cpc, Kind::Translation, true),
    enc("sk-cpc", CalculusId::Sk, CalculusId::Cpc, Kind::ParallelEncoding, true),
    enc("pi-cpc", CalculusId::Pi, CalculusId::Cpc, Kind::ValidEncoding, false),
];

pub fn by_id(id: &str) -> Option<&'static Encoding> {
    ENCODINGS.iter().find(|e| e.id == id)
}

/// The primary encoding between two calculi. `lambda` and `lambda-v`
/// sources are accepted by the λ-sourced encodings alike.
pub fn between(from: CalculusId, to: CalculusId) -> Option<&'static Encoding> {
    let widen = |c: CalculusId| if c == CalculusId::LambdaV { CalculusId::Lambda } else { c };
    ENCODINGS
        .iter()
        .find(|e| e.source == from && e.target == to)
        .or_else(|| ENCODINGS.iter().find(|e| widen(e.source) == widen(from) && e.target == to))
}

/// A deliberately broken variant of one encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mutation {
    /// `ap(c,q,r)` reads the argument channel first.
    MilnerSwapAp,
    /// `⟦s t⟧_c` without `ν q ν r`.
    MilnerDropRestriction,
    /// The machine's `F F` case returns the last argument.
    MachineFfReturnsN,
    /// `ap(c,m,n)` applies the argument to the function.
    SfSwapAp,
    /// Input and output lose the fresh name that tells them apart.
    PiDropFreshName,
    /// Bracket abstraction takes `λ*x.y` to `y`.
    BracketDropsK,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::MilnerSwapAp,
        Mutation::MilnerDropRestriction,
        Mutation::MachineFfReturnsN,
        Mutation::SfSwapAp,
        Mutation::PiDropFreshName,
        Mutation::BracketDropsK,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mutation::MilnerSwapAp => "milner-swap-ap",
            Mutation::MilnerDropRestriction => "milner-drop-restriction",
            Mutation::MachineFfReturnsN => "machine-ff-returns-n",
            Mutation::SfSwapAp => "sf-swap-ap",
            Mutation::PiDropFreshName => "pi-drop-fresh-name",
            Mutation::BracketDropsK => "bracket-drops-k",
        }
    }

    /// The encoding this mutation breaks.
    pub fn encoding(self) -> &'static Encoding {
        by_id(match self {
            Mutation::MilnerSwapAp | Mutation::MilnerDropRestriction => "lambdav-pi",
            Mutation::MachineFfReturnsN | Mutation::SfSwapAp => "sf-cpc",
            Mutation::PiDropFreshName => "pi-cpc",
            Mutation::BracketDropsK => "lambda-sk",
        })
        .expect("registered encoding")
    }

    pub fn description(self) -> &'static str {
        match self {
            Mutation::MilnerSwapAp => "ap(c,q,r) with q and r swapped",
            Mutation::MilnerDropRestriction => "application without the restriction of q and r",
            Mutation::MachineFfReturnsN => "machine case F F M N returning N",
            Mutation::SfSwapAp => "ap(c,m,n) with m and n swapped",
            Mutation::PiDropFreshName => "input/output patterns without the fresh name",
            Mutation::BracketDropsK => "bracket abstraction with λ*x.y = y",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mutation::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| alloc::format!("unknown mutation `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("no encoding from {0} to {1}")]
    NoSuchEncoding(CalculusId, CalculusId),
    #[error("{id} expects a {expected} term")]
    WrongSource { id: &'static str, expected: CalculusId },
    #[error("channel `{0}` is free in the term")]
    ChannelNotFresh(Name),
    #[error(transparent)]
    Comb(#[from] CombError),
}

/// Runs `enc` on `term`. `chan` is the result channel of the encodings
/// that take one. A mutation applies only if it targets `enc`.
pub fn translate(enc: &Encoding, term: &Term, chan: &Name, mutation: Option<Mutation>) -> Result<Term, EncodeError> {
    let m = mutation.filter(|m| m.encoding().id == enc.id);
    let wrong = || EncodeError::WrongSource { id: enc.id, expected: enc.source };
    let fresh_chan =
        |free: BTreeSet<Name>| if free.contains(chan) { Err(EncodeError::ChannelNotFresh(chan.clone())) } else { Ok(()) };
    Ok(match (enc.id, term) {
        ("lambda-sk", Term::Lambda(t)) => Term::Comb(comb::lambda_to_sk_with(t, m == Some(Mutation::BracketDropsK))),
        ("sk-lambda", Term::Comb(t)) => Term::Lambda(comb::sk_to_lambda(t)?),
        ("sk-sf", Term::Comb(t)) => Term::Comb(comb::sk_to_sf(t)?),
        ("lambdav-pi", Term::Lambda(t)) => {
            fresh_chan(t.free_vars())?;
            Term::Pi(milner_with(t, chan, m))
        }
        ("sf-cpc", Term::Comb(t)) => {
            comb::CalculusDef::sf().check_operators(t)?;
            fresh_chan(t.vars())?;
            Term::Cpc(sf_to_cpc_with(t, chan, m))
        }
        ("sf-cpc-alt", Term::Comb(t)) => {
            comb::CalculusDef::sf().check_operators(t)?;
            fresh_chan(t.vars())?;
            Term::Cpc(alt_sf_to_cpc(t, chan))
        }
        ("sk-cpc", Term::Comb(t)) => {
            comb::CalculusDef::sk().check_operators(t)?;
            fresh_chan(t.vars())?;
            Term::Cpc(sk_to_cpc(t, chan))
        }
        ("pi-cpc", Term::Pi(p)) => Term::Cpc(pi_to_cpc_with(p, m == Some(Mutation::PiDropFreshName))),
        _ => return Err(wrong()),
    })
}

/// Milner's encoding of call-by-value λ into π:
///
/// ```text
/// ⟦v⟧_c     = ν y c̄⟨y⟩.⟦y := v⟧
/// ⟦y := x⟧   = !y(w).x̄⟨w⟩
/// ⟦y := λx.t⟧ = !y(w).w(x).w(c).⟦t⟧_c
/// ⟦s t⟧_c   = ν q ν r (ap(c,q,r) | ⟦s⟧_q | ⟦t⟧_r)
/// ap(p,q,r)  = q(y).ν v ȳ⟨v⟩.r(z).v̄⟨z⟩.v̄⟨p⟩
/// ```
pub fn milner_encode(t: &LambdaTerm, c: &Name) -> PiProcess {
    milner_with(t, c, None)
}

fn milner_with(t: &LambdaTerm, c: &Name, mutation: Option<Mutation>) -> PiProcess {
    let mut supply = FreshSupply::avoiding(&t.names());
    supply.avoid(c);
    Milner { supply, mutation }.term(t, c)
}

struct Milner {
    supply: FreshSupply,
    mutation: Option<Mutation>,
}

impl Milner {
    fn term(&mut self, t: &LambdaTerm, c: &Name) -> PiProcess {
        match t {
            LambdaTerm::App(s, u) => {
                let q = self.supply.fresh_base("q");
                let r = self.supply.fresh_base("r");
                let left = self.term(s, &q);
                let right = self.term(u, &r);
                let ap = if self.mutation == Some(Mutation::MilnerSwapAp) { self.ap(c, &r, &q) } else { self.ap(c, &q, &r) };
                let body = process::par_all([ap, left, right]);
                if self.mutation == Some(Mutation::MilnerDropRestriction) {
                    body
                } else {
                    PiProcess::new_res(q, PiProcess::new_res(r, body))
                }
            }
            _ => {
                let y = self.supply.fresh_base("y");
                let def = self.definition(&y, t);
                PiProcess::new_res(y.clone(), PiProcess::output(c.clone(), y, def))
            }
        }
    }

    /// `⟦y := v⟧`
    fn definition(&mut self, y: &Name, v: &LambdaTerm) -> PiProcess {
        let w = self.supply.fresh_base("w");
        let body = match v {
            LambdaTerm::Var(x) => PiProcess::output(x.clone(), w.clone(), PiProcess::Nil),
            LambdaTerm::Abs(x, t) => {
                let c = self.supply.fresh_base("c");
                let inner = self.term(t, &c);
                PiProcess::input(w.clone(), x.clone(), PiProcess::input(w.clone(), c, inner))
            }
            LambdaTerm::App(..) => unreachable!("definitions are made for values"),
        };
        PiProcess::new_repl(PiProcess::input(y.clone(), w, body))
    }

    fn ap(&mut self, p: &Name, q: &Name, r: &Name) -> PiProcess {
        let (y, v, z) = (self.supply.fresh_base("y"), self.supply.fresh_base("v"), self.supply.fresh_base("z"));
        let tail = PiProcess::output(v.clone(), z.clone(), PiProcess::output(v.clone(), p.clone(), PiProcess::Nil));
        let body = PiProcess::output(y.clone(), v.clone(), PiProcess::input(r.clone(), z, tail));
        PiProcess::input(q.clone(), y, PiProcess::new_res(v, body))
    }
}

/// Reads a π process back as the λ-term it encodes on channel `c`, if it
/// has the shape of an encoding: values published on `c`, applications
/// as `ap` threads, and values either inline or held by replicated
/// servers anywhere in scope. A server reached by a name stands for the
/// value it serves, so `ν x (⟦x := v⟧ | ⟦t⟧)` reads back as `t{v/x}`;
/// states in the middle of an application do not read back.
pub fn milner_read_back(p: &PiProcess, c: &Name) -> Option<LambdaTerm> {
    ReadBack { servers: BTreeMap::new() }.level(p, c)
}

struct ReadBack {
    servers: BTreeMap<Name, PiProcess>,
}

/// `q(y).ν v ȳ⟨v⟩.r(z).v̄⟨z⟩.v̄⟨p⟩` as `(q, r, p)`.
fn ap_parts(t: &PiProcess) -> Option<(&Name, &Name, &Name)> {
    let PiProcess::Act(PiAction::In(q, y), b) = t else { return None };
    let PiProcess::Res(v, b) = &**b else { return None };
    let PiProcess::Act(PiAction::Out(y2, v2), b) = &**b else { return None };
    let PiProcess::Act(PiAction::In(r, z), b) = &**b else { return None };
    let PiProcess::Act(PiAction::Out(v3, z2), b) = &**b else { return None };
    let PiProcess::Act(PiAction::Out(v4, p), b) = &**b else { return None };
    let shaped = y == y2 && v == v2 && v == v3 && v == v4 && z == z2 && **b == PiProcess::Nil;
    shaped.then_some((q, r, p))
}

fn server_name(t: &PiProcess) -> Option<&Name> {
    match t {
        PiProcess::Repl(b) => match &**b {
            PiProcess::Act(PiAction::In(y, _), _) => Some(y),
            _ => None,
        },
        _ => None,
    }
}

impl ReadBack {
    fn level(&mut self, p: &PiProcess, k: &Name) -> Option<LambdaTerm> {
        let (_, threads) = process::flatten(p);
        let mut pending = Vec::new();
        for t in threads {
            match server_name(&t) {
                Some(y) => {
                    self.servers.insert(y.clone(), t.clone());
                }
                None => pending.push(t),
            }
        }
        let t = self.answer(&mut pending, k)?;
        pending.is_empty().then_some(t)
    }

    fn answer(&mut self, pending: &mut Vec<PiProcess>, k: &Name) -> Option<LambdaTerm> {
        let i = pending.iter().position(|t| match t {
            PiProcess::Act(PiAction::Out(ch, _), _) => ch == k,
            _ => ap_parts(t).is_some_and(|(_, _, p)| p == k),
        })?;
        let t = pending.remove(i);
        if let Some((q, r, _)) = ap_parts(&t) {
            let (q, r) = (q.clone(), r.clone());
            let f = self.answer(pending, &q)?;
            let a = self.answer(pending, &r)?;
            return Some(LambdaTerm::app(f, a));
        }
        let PiProcess::Act(PiAction::Out(_, y), rest) = &t else { unreachable!() };
        match &**rest {
            PiProcess::Nil => {}
            server if server_name(server) == Some(y) => {
                self.servers.insert(y.clone(), server.clone());
            }
            _ => return None,
        }
        self.value(y, 64)
    }

    fn value(&mut self, y: &Name, fuel: usize) -> Option<LambdaTerm> {
        let Some(server) = self.servers.get(y).cloned() else { return Some(LambdaTerm::Var(y.clone())) };
        let PiProcess::Repl(b) = &server else { unreachable!() };
        let PiProcess::Act(PiAction::In(_, w), body) = &**b else { unreachable!() };
        match &**body {
            PiProcess::Act(PiAction::Out(x, w2), rest) if w2 == w && **rest == PiProcess::Nil => {
                self.value(x, fuel.checked_sub(1)?)
            }
            PiProcess::Act(PiAction::In(w2, a), inner) if w2 == w => {
                let PiProcess::Act(PiAction::In(w3, k), t) = &**inner else { return None };
                (w3 == w).then_some(())?;
                Some(LambdaTerm::abs(a.clone(), self.level(t, k)?))
            }
            _ => None,
        }
    }
}

/// Which combinatory machine a parallel CPC encoding runs on.
#[derive(Clone, Copy)]
enum Machine {
    Sf { ff_returns_n: bool },
    Sk,
}

impl Machine {
    fn process(self) -> CpcProcess {
        match self {
            Machine::Sf { ff_returns_n } => process::par_all(cpc::sf_machine_cases_with(ff_returns_n)),
            Machine::Sk => cpc::sk_machine(),
        }
    }
}

/// The parallel encoding of SF into CPC:
///
/// ```text
/// ⟦O⟧_c     = c•O | R
/// ⟦M N⟧_c   = ν m ν n (ap(c,m,n) | ⟦M⟧_m | ⟦N⟧_n)
/// ap(c,m,n) = m•λx → n•λy → c•(x•y) | R
/// ```
pub fn sf_to_cpc(m: &CombTerm, c: &Name) -> CpcProcess {
    sf_to_cpc_with(m, c, None)
}

fn sf_to_cpc_with(m: &CombTerm, c: &Name, mutation: Option<Mutation>) -> CpcProcess {
    let machine = Machine::Sf { ff_returns_n: mutation == Some(Mutation::MachineFfReturnsN) };
    parallel_cpc(m, c, machine, mutation == Some(Mutation::SfSwapAp))
}

/// The same architecture over SK, running on the SK machine.
pub fn sk_to_cpc(m: &CombTerm, c: &Name) -> CpcProcess {
    parallel_cpc(m, c, Machine::Sk, false)
}

fn parallel_cpc(m: &CombTerm, c: &Name, machine: Machine, swap: bool) -> CpcProcess {
    let mut supply = FreshSupply::avoiding(&m.vars());
    supply.avoid(c);
    let r = machine.process();
    ParallelCpc { supply, machine: r, swap }.term(m, c)
}

struct ParallelCpc {
    supply: FreshSupply,
    machine: CpcProcess,
    swap: bool,
}

impl ParallelCpc {
    fn term(&mut self, t: &CombTerm, c: &Name) -> CpcProcess {
        match t {
            CombTerm::App(f, a) => {
                let m = self.supply.fresh_base("m");
                let n = self.supply.fresh_base("n");
                let left = self.term(f, &m);
                let right = self.term(a, &n);
                let ap = if self.swap { self.ap(c, &n, &m) } else { self.ap(c, &m, &n) };
                CpcProcess::new_res(m, CpcProcess::new_res(n, process::par_all([ap, left, right])))
            }
            _ => CpcProcess::new_par(
                CpcProcess::emit(Pattern::compound(Pattern::Var(c.clone()), cpc::sf_construction(t))),
                self.machine.clone(),
            ),
        }
    }

    fn ap(&mut self, c: &Name, m: &Name, n: &Name) -> CpcProcess {
        let (x, y) = (self.supply.fresh_base("x"), self.supply.fresh_base("y"));
        let result = CpcProcess::emit(Pattern::compound(
            Pattern::Var(c.clone()),
            Pattern::compound(Pattern::Var(x.clone()), Pattern::Var(y.clone())),
        ));
        let second = CpcProcess::case(Pattern::compound(Pattern::Var(n.clone()), Pattern::Bind(y)), result);
        let first = CpcProcess::case(Pattern::compound(Pattern::Var(m.clone()), Pattern::Bind(x)), second);
        CpcProcess::new_par(first, self.machine.clone())
    }
}

/// The single-shot translation `c•⌈M⌉ | R`.
pub fn alt_sf_to_cpc(m: &CombTerm, c: &Name) -> CpcProcess {
    CpcProcess::new_par(CpcProcess::emit(Pattern::compound(Pattern::Var(c.clone()), cpc::sf_construction(m))), cpc::sf_machine())
}

/// The name that tells translated inputs and outputs apart. Reserved, so
/// no π name can clash with it.
pub fn pi_fresh_name() -> Name {
    Name::reserved("N")
}

/// π into CPC, homomorphic except on actions:
///
/// ```text
/// ⟦a(b).P⟧  = a•λb•N → ⟦P⟧
/// ⟦ā⟨b⟩.P⟧ = a•b•λN → ⟦P⟧
/// ```
pub fn pi_to_cpc(p: &PiProcess) -> CpcProcess {
    pi_to_cpc_with(p, false)
}

fn pi_to_cpc_with(p: &PiProcess, drop_n: bool) -> CpcProcess {
    let go = |q: &PiProcess| pi_to_cpc_with(q, drop_n);
    match p {
        PiProcess::Nil => CpcProcess::Nil,
        PiProcess::Ok => CpcProcess::Ok,
        PiProcess::Par(a, b) => CpcProcess::new_par(go(a), go(b)),
        PiProcess::Repl(q) => CpcProcess::new_repl(go(q)),
        PiProcess::Res(n, q) => CpcProcess::new_res(n.clone(), go(q)),
        PiProcess::Act(a, q) => {
            let n = pi_fresh_name();
            let pat = match a {
                PiAction::In(ch, b) => {
                    let base = Pattern::compound(Pattern::Var(ch.clone()), Pattern::Bind(b.clone()));
                    if drop_n {
                        base
                    } else {
                        Pattern::compound(base, Pattern::Var(n))
                    }
                }
                PiAction::Out(ch, b) => {
                    let base = Pattern::compound(Pattern::Var(ch.clone()), Pattern::Var(b.clone()));
                    if drop_n {
                        base
                    } else {
                        Pattern::compound(base, Pattern::Bind(n))
                    }
                }
            };
            CpcProcess::case(pat, go(q))
        }
    }
}

/// The machine cases an encoding's target runs on, honouring a mutation
/// of the machine. Empty for encodings without a machine.
pub fn machine_cases(enc: &Encoding, mutation: Option<Mutation>) -> Vec<CpcProcess> {
    match enc.id {
        "sf-cpc" | "sf-cpc-alt" => cpc::sf_machine_cases_with(mutation == Some(Mutation::MachineFfReturnsN)),
        "sk-cpc" => cpc::sk_machine_cases(),
        _ => Vec::new(),
    }
}

/// One prefix of a thread of a parallel CPC encoding: `k•λx` or `k•p`.
enum Act {
    In(Name, Name),
    Out(Name, Pattern),
}

/// Reads a CPC process back as the combinatory term it computes on `c`,
/// if it is built from the pieces of the parallel encoding: emissions
/// `k•⌈M⌉`, application threads, relays waiting for the machine, and
/// copies of the machine. A relay whose request has not been answered
/// reads back as the unreduced term. Every emission must feed the result.
pub fn parallel_read_back(p: &CpcProcess, c: &Name, machine: &[CpcProcess]) -> Option<CombTerm> {
    let cases: BTreeSet<CpcProcess> = machine.iter().map(process::normal_form).collect();
    let (_, threads) = process::flatten(p);
    let mut acts: Vec<Vec<Act>> = Vec::new();
    for t in threads {
        match t {
            CpcProcess::Repl(_) if cases.contains(&process::normal_form(&t)) => {}
            CpcProcess::Case(..) => acts.push(prefix_chain(&t)?),
            _ => return None,
        }
    }
    let mut producers = BTreeMap::new();
    for (i, chain) in acts.iter().enumerate() {
        for (j, a) in chain.iter().enumerate() {
            if let Act::Out(k, _) = a {
                if producers.insert(k.clone(), (i, j)).is_some() {
                    return None;
                }
            }
        }
    }
    let mut used = BTreeSet::new();
    let result = chain_value(&acts, &producers, &mut used, c, 64)?;
    (used.len() == producers.len()).then_some(())?;
    cpc::read_construction(&result)
}

fn prefix_chain(t: &CpcProcess) -> Option<Vec<Act>> {
    let mut out = Vec::new();
    let mut cur = t;
    while let CpcProcess::Case(pat, body) = cur {
        let Pattern::Compound(k, rest) = pat else { return None };
        let Pattern::Var(k) = &**k else { return None };
        out.push(match &**rest {
            Pattern::Bind(x) => Act::In(k.clone(), x.clone()),
            q if q.is_communicable() => Act::Out(k.clone(), q.clone()),
            _ => return None,
        });
        cur = body;
    }
    (*cur == CpcProcess::Nil).then_some(out)
}

fn chain_value(
    acts: &[Vec<Act>],
    producers: &BTreeMap<Name, (usize, usize)>,
    used: &mut BTreeSet<Name>,
    k: &Name,
    fuel: usize,
) -> Option<Pattern> {
    let fuel = fuel.checked_sub(1)?;
    let &(i, j) = producers.get(k)?;
    if !used.insert(k.clone()) {
        return None;
    }
    let mut sigma = cpc::PatternSubstitution::new();
    for a in &acts[i][..j] {
        if let Act::In(k2, x) = a {
            let v = chain_value(acts, producers, used, k2, fuel)?;
            sigma.insert(x.clone(), v);
        }
    }
    let Act::Out(_, q) = &acts[i][j] else { unreachable!() };
    Some(q.subst(&sigma))
}

/// The pieces of `ν n₁ ν n₂ (ap | A | B)`.
pub struct ParallelParts<'a, T> {
    pub left_chan: &'a Name,
    pub right_chan: &'a Name,
    pub ap: &'a T,
    pub left: &'a T,
    pub right: &'a T,
}

/// Destructures the top level of a translated application.
pub fn parallel_parts<T: Process>(p: &T) -> Option<ParallelParts<'_, T>> {
    use crate::process::View;
    let View::Res(n1, inner) = p.view() else { return None };
    let View::Res(n2, body) = inner.view() else { return None };
    let View::Par(front, right) = body.view() else { return None };
    let View::Par(ap, left) = front.view() else { return None };
    Some(ParallelParts { left_chan: n1, right_chan: n2, ap, left, right })
}

/// `ap(c,q,r)` of Milner's encoding, for shape checks.
pub fn milner_ap(c: &Name, q: &Name, r: &Name) -> PiProcess {
    Milner { supply: FreshSupply::avoiding([c, q, r]), mutation: None }.ap(c, q, r)
}

/// `ap(c,m,n)` of the parallel SF encoding, for shape checks.
pub fn sf_ap(c: &Name, m: &Name, n: &Name) -> CpcProcess {
    let supply = FreshSupply::avoiding([c, m, n]);
    ParallelCpc { supply, machine: cpc::sf_machine(), swap: false }.ap(c, m, n)
}

/// `ap(c,m,n)` of the parallel SK encoding.
pub fn sk_ap(c: &Name, m: &Name, n: &Name) -> CpcProcess {
    let supply = FreshSupply::avoiding([c, m, n]);
    ParallelCpc { supply, machine: cpc::sk_machine(), swap: false }.ap(c, m, n)
}

/// One scenario of the parallel-or demonstration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelOrCase {
    pub left_true: bool,
    pub right_true: bool,
    pub process: PiProcess,
    /// An output on `m` is reachable.
    pub m_barb: bool,
    /// The state space was explored completely.
    pub complete: bool,
}

/// `G = n1(x).m̄⟨x⟩ | n2(x).m̄⟨x⟩` run against each argument either
/// true (`n̄ᵢ⟨t⟩`) or undefined (`0`, never answering).
pub fn parallel_or_demo(bounds: ProcessBounds) -> Vec<ParallelOrCase> {
    let name = Name::user;
    let gate = |n: &str| PiProcess::input(name(n), name("x"), PiProcess::output(name("m"), name("x"), PiProcess::Nil));
    let arg = |n: &str, t: bool| if t { PiProcess::output(name(n), name("t"), PiProcess::Nil) } else { PiProcess::Nil };
    let mut out = Vec::new();
    for (l, r) in [(false, false), (true, false), (false, true)] {
        let p = process::par_all([gate("n1"), gate("n2"), arg("n1", l), arg("n2", r)]);
        let g = process::explore_process(&p, bounds, &|q| q);
        let m_barb = g.states.iter().any(|s| process::barbs(s).contains("out:m"));
        out.push(ParallelOrCase { left_true: l, right_true: r, process: p, m_barb, complete: g.is_complete() });
    }
    out
}

/// The self-reducing process `P = n → ✓` on its own and in parallel
/// with copies of itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfReducerReport {
    pub process: CpcProcess,
    /// Verdicts for `P`, `P | P` and `P | P | P`.
    pub verdicts: Vec<(CpcProcess, process::Success)>,
}

pub fn self_reducer_demo(bounds: ProcessBounds) -> SelfReducerReport {
    let p = CpcProcess::case(Pattern::var("n"), CpcProcess::Ok);
    let verdicts = (1..=3)
        .map(|k| {
            let q = process::par_all(vec![p.clone(); k]);
            let v = process::succeeds(&q, bounds);
            (q, v)
        })
        .collect();
    SelfReducerReport { process: p, verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::parse as comb;
    use crate::lambda::parse as lam;
    use crate::process::{canonicalize, Success};

    fn c() -> Name {
        Name::user("c")
    }

    #[test]
    fn milner_variable() {
        let p = milner_encode(&lam("x").unwrap(), &c());
        assert_eq!(p.to_string(), "new y'0. c<y'0>.!y'0(w'1).x<w'1>.0");
    }

    #[test]
    fn milner_application_shape() {
        let p = milner_encode(&lam("(lam x. x) (lam y. y)").unwrap(), &c());
        let parts = parallel_parts(&p).expect("application shape");
        assert_eq!(canonicalize(parts.ap), canonicalize(&milner_ap(&c(), parts.left_chan, parts.right_chan)));
        let expect_left = milner_encode(&lam("lam x. x").unwrap(), parts.left_chan);
        assert_eq!(canonicalize(parts.left), canonicalize(&expect_left));
    }

    #[test]
    fn read_back_inverts_the_encoding() {
        for src in ["x", "lam x. x", "(lam x. x) (lam y. y)", "lam f. f (lam z. z) y", "(x y) (lam a. a a)"] {
            let t = lam(src).unwrap();
            let p = crate::pi::normal_form(&milner_encode(&t, &c()));
            assert!(milner_read_back(&p, &c()).unwrap().alpha_eq(&t), "{src}");
        }
        let mid = crate::pi::parse("c(x).0").unwrap();
        assert_eq!(milner_read_back(&mid, &c()), None);
    }

    #[test]
    fn sf_operator_and_alt_coincide() {
        let s = comb("S").unwrap();
        assert_eq!(sf_to_cpc(&s, &c()), alt_sf_to_cpc(&s, &c()));
        assert_eq!(sf_to_cpc(&s, &c()).abbreviated(false).to_string(), "c*S | <R>");
        assert_eq!(alt_sf_to_cpc(&comb("S F").unwrap(), &c()).abbreviated(false).to_string(), "c*(S*F) | <R>");
    }

    #[test]
    fn pi_actions() {
        let p = crate::pi::parse("a(b).0 | a<c>.0").unwrap();
        assert_eq!(pi_to_cpc(&p).to_string(), "a*\\b*N | a*c*\\N");
        assert_eq!(process::interactions(&cpc::normal_form(&pi_to_cpc(&p)), 2).len(), 1);
    }

    #[test]
    fn registry() {
        assert_eq!(between(CalculusId::Sk, CalculusId::Sf).unwrap().id, "sk-sf");
        assert_eq!(between(CalculusId::Lambda, CalculusId::Pi).unwrap().id, "lambdav-pi");
        assert_eq!(between(CalculusId::LambdaV, CalculusId::Sk).unwrap().id, "lambda-sk");
        assert!(between(CalculusId::Cpc, CalculusId::Pi).is_none());
        for m in Mutation::ALL {
            assert_eq!(m.as_str().parse::<Mutation>().unwrap(), m);
        }
    }

    #[test]
    fn channel_must_be_fresh() {
        let e = by_id("lambdav-pi").unwrap();
        let t = Term::Lambda(lam("c").unwrap());
        assert_eq!(translate(e, &t, &c(), None), Err(EncodeError::ChannelNotFresh(c())));
    }

    #[test]
    fn demos() {
        let b = ProcessBounds::default();
        let cases = parallel_or_demo(b);
        assert_eq!(cases.iter().map(|k| k.m_barb).collect::<Vec<_>>(), [false, true, true]);
        let r = self_reducer_demo(b);
        let v: Vec<Success> = r.verdicts.iter().map(|x| x.1).collect();
        assert_eq!(v, [Success::Never, Success::Reached, Success::Reached]);
    }
}
