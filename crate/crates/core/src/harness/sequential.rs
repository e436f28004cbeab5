//! Suites for the translations between λ, SK and SF.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::calculus::{CalculusId, Term};
use crate::comb::{self, Basis, CalculusDef, CombTerm};
use crate::encodings::{Encoding, Mutation};
use crate::explore::{self, Bounds};
use crate::harness::gen::TermGenerator;
use crate::harness::report::SuiteReport;
use crate::harness::suites::{parse_terms, tally, CheckConfig, CheckError, Outcome, Suite};
use crate::lambda::{LambdaTerm, Mode};
use crate::name::{Name, NameSubstitution};
use crate::trace::{Status, Strategy};

use rand::Rng;

/// λ reduction on both sides of the SK correspondence.
pub const LAMBDA_MODE: Mode = Mode::FullBeta;

/// Whether two terms were found to share a reduct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Join<S> {
    Yes,
    /// Both reach these distinct normal forms, so (by confluence) never.
    Apart(S, S),
    Unknown,
}

/// Runs both terms leftmost for `max_steps` looking for a common state,
/// then falls back to bounded breadth-first search of both.
pub fn joinable<S: Ord + Clone>(
    a: S,
    b: S,
    step: impl Fn(&S) -> Option<S>,
    successors: impl Fn(&S) -> Vec<S>,
    max_steps: usize,
    max_states: usize,
) -> Join<S> {
    let run = |s: &S| {
        let mut seen = BTreeSet::from([s.clone()]);
        let mut cur = s.clone();
        let mut normal = false;
        for _ in 0..max_steps {
            match step(&cur) {
                Some(next) => {
                    cur = next;
                    if !seen.insert(cur.clone()) {
                        break;
                    }
                }
                None => {
                    normal = true;
                    break;
                }
            }
        }
        (seen, normal.then_some(cur))
    };
    let (sa, na) = run(&a);
    let (sb, nb) = run(&b);
    if sa.intersection(&sb).next().is_some() {
        return Join::Yes;
    }
    if let (Some(x), Some(y)) = (na, nb) {
        return Join::Apart(x, y);
    }
    let bounds = Bounds::new(max_steps, max_states / 2);
    let ga = explore::explore(a, bounds, &successors);
    let gb = explore::explore(b, bounds, &successors);
    if ga.states.iter().any(|s| gb.contains(s)) {
        return Join::Yes;
    }
    Join::Unknown
}

fn join_comb(def: &CalculusDef, a: CombTerm, b: CombTerm, cfg: &CheckConfig) -> Join<CombTerm> {
    joinable(a, b, |t| def.step(t, Strategy::Leftmost).map(|s| s.result), |t| def.successors(t), cfg.max_steps, cfg.max_states)
}

/// Extensional equality of combinatory terms, Böhm-tree style: weak
/// normal forms headed by an operator are applied to a fresh variable,
/// variable-headed ones are compared argument by argument. Terms
/// without a normal form within `max_steps` give `Unknown`.
pub fn ext_eq(def: &CalculusDef, a: &CombTerm, b: &CombTerm, max_steps: usize) -> Join<CombTerm> {
    fn go(def: &CalculusDef, a: CombTerm, b: CombTerm, max_steps: usize, fresh: &mut usize, fuel: usize) -> Join<CombTerm> {
        let nf = |t: &CombTerm| {
            let trace = def.reduce(t, Strategy::Leftmost, max_steps);
            (trace.status == Status::NormalForm).then(|| trace.last().clone())
        };
        let (Some(mut x), Some(mut y)) = (nf(&a), nf(&b)) else { return Join::Unknown };
        let mut fuel = fuel;
        loop {
            if x == y {
                return Join::Yes;
            }
            if fuel == 0 {
                return Join::Unknown;
            }
            fuel -= 1;
            let op_headed = |t: &CombTerm| matches!(t.spine().0, CombTerm::Op(_));
            if op_headed(&x) || op_headed(&y) {
                let z = CombTerm::Var(Name::try_fresh(&format!("z'{fresh}")).expect("fresh name"));
                *fresh += 1;
                let (Some(x2), Some(y2)) = (nf(&CombTerm::app(x.clone(), z.clone())), nf(&CombTerm::app(y.clone(), z))) else {
                    return Join::Unknown;
                };
                (x, y) = (x2, y2);
                continue;
            }
            let ((hx, ax), (hy, ay)) = (x.spine(), y.spine());
            if hx != hy || ax.len() != ay.len() {
                return Join::Apart(x.clone(), y.clone());
            }
            let mut unknown = false;
            for (p, q) in ax.into_iter().zip(ay) {
                match go(def, p.clone(), q.clone(), max_steps, fresh, fuel) {
                    Join::Yes => {}
                    Join::Unknown => unknown = true,
                    Join::Apart(..) => return Join::Apart(x.clone(), y.clone()),
                }
            }
            return if unknown { Join::Unknown } else { Join::Yes };
        }
    }
    go(def, a.clone(), b.clone(), max_steps, &mut 0, 8)
}

/// Reduces `abs N` by contracting just the redexes an abstraction
/// `abs` built from `S`, `K` and `S K K` creates when applied. Every step
/// is a root contraction by the calculus's own rules; returns the reduct
/// and the number of steps, or `None` if `abs` has another shape.
fn unfold_abstraction(def: &CalculusDef, abs: &CombTerm, n: &CombTerm) -> Option<(CombTerm, usize)> {
    let root = |t: CombTerm| def.contract_root(&t).map(|(_, r)| r);
    if *abs == Basis::sk().identity() {
        let r = root(root(CombTerm::app(abs.clone(), n.clone()))?)?;
        return Some((r, 2));
    }
    let (head, args) = abs.spine();
    match (head, args.as_slice()) {
        (CombTerm::Op(o), [_]) if o.as_str() == "K" => Some((root(CombTerm::app(abs.clone(), n.clone()))?, 1)),
        (CombTerm::Op(o), [a, b]) if o.as_str() == "S" => {
            let r = root(CombTerm::app(abs.clone(), n.clone()))?;
            if r != CombTerm::app(CombTerm::app((*a).clone(), n.clone()), CombTerm::app((*b).clone(), n.clone())) {
                return None;
            }
            let (ra, ka) = unfold_abstraction(def, a, n)?;
            let (rb, kb) = unfold_abstraction(def, b, n)?;
            Some((CombTerm::app(ra, rb), 1 + ka + kb))
        }
        _ => None,
    }
}

fn join_lambda(a: &LambdaTerm, b: &LambdaTerm, cfg: &CheckConfig) -> Join<LambdaTerm> {
    joinable(
        a.canonical(),
        b.canonical(),
        |t| t.step(LAMBDA_MODE, Strategy::Leftmost).map(|s| s.result.canonical()),
        |t| t.successors(LAMBDA_MODE).iter().map(LambdaTerm::canonical).collect(),
        cfg.max_steps,
        cfg.max_states,
    )
}

fn join_outcome<S: core::fmt::Display>(j: Join<S>, what: &str) -> Outcome {
    match j {
        Join::Yes => Outcome::Pass,
        Join::Apart(x, y) => Outcome::Fail(format!("{what} reach distinct normal forms `{x}` and `{y}`")),
        Join::Unknown => Outcome::Inconclusive,
    }
}

/// Up to `n` distinct generated items satisfying `keep`.
pub(crate) fn generate<T: Ord + Clone>(n: usize, mut next: impl FnMut() -> T, keep: impl Fn(&T) -> bool) -> Vec<T> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..n * 200 {
        if out.len() == n {
            break;
        }
        let t = next();
        if !seen.contains(&t) && keep(&t) {
            seen.insert(t.clone());
            out.push(t);
        }
    }
    out
}

/// Equality of images: λ-terms up to α, combinatory terms exactly.
fn term_eq(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Lambda(a), Term::Lambda(b)) => a.alpha_eq(b),
        _ => a == b,
    }
}

fn lambda_subterms(t: &LambdaTerm) -> Vec<&LambdaTerm> {
    let mut out = Vec::from([t]);
    match t {
        LambdaTerm::Var(_) => {}
        LambdaTerm::Abs(_, b) => out.extend(lambda_subterms(b)),
        LambdaTerm::App(f, a) => {
            out.extend(lambda_subterms(f));
            out.extend(lambda_subterms(a));
        }
    }
    out
}

pub(crate) fn comb_subterms(t: &CombTerm) -> Vec<&CombTerm> {
    let mut out = Vec::from([t]);
    if let CombTerm::App(f, a) = t {
        out.extend(comb_subterms(f));
        out.extend(comb_subterms(a));
    }
    out
}

/// An injective renaming of `free` to names occurring nowhere in `avoid`.
pub(crate) fn fresh_renaming<'a>(free: impl IntoIterator<Item = &'a Name>, avoid: &BTreeSet<Name>) -> NameSubstitution {
    let mut k = 0;
    let mut sigma = NameSubstitution::new();
    for x in free {
        let y = loop {
            let cand = Name::user(&format!("r{k}"));
            k += 1;
            if !avoid.contains(&cand) {
                break cand;
            }
        };
        sigma.insert(x.clone(), y);
    }
    sigma
}

fn rename_comb(t: &CombTerm, sigma: &NameSubstitution) -> CombTerm {
    let map: BTreeMap<Name, CombTerm> = sigma.iter().map(|(a, b)| (a.clone(), CombTerm::Var(b.clone()))).collect();
    t.subst(&map)
}

fn lambda_corpus(cfg: &CheckConfig, n: usize, max: usize, closed: bool, keep: impl Fn(&LambdaTerm) -> bool) -> Vec<LambdaTerm> {
    let mut g = TermGenerator::new(CalculusId::Lambda, max, cfg.seed);
    if !closed {
        g = g.open();
    }
    generate(n, || g.lambda(), keep)
}

fn sk_corpus(cfg: &CheckConfig, n: usize, max: usize, keep: impl Fn(&CombTerm) -> bool) -> Vec<CombTerm> {
    let mut g = TermGenerator::new(CalculusId::Sk, max, cfg.seed).with_pool(&["x", "y"]).open();
    generate(n, || g.comb(&["S", "K"]), keep)
}

/// Root redexes of S and K with closed arguments of up to three leaves.
fn sk_redexes(cfg: &CheckConfig, n: usize) -> Vec<CombTerm> {
    let mut g = TermGenerator::new(CalculusId::Sk, 3, cfg.seed);
    generate(
        n,
        || {
            let arity = if g.rng().random_bool(0.5) { 3 } else { 2 };
            let head = CombTerm::op(if arity == 3 { "S" } else { "K" });
            let args: Vec<CombTerm> = (0..arity).map(|_| g.comb(&["S", "K"])).collect();
            CombTerm::apps(head, args)
        },
        |_| true,
    )
}

fn lambda_items(
    enc: &Encoding,
    cfg: &CheckConfig,
    default: impl FnOnce() -> Vec<LambdaTerm>,
) -> Result<Vec<LambdaTerm>, CheckError> {
    match &cfg.terms {
        Some(ts) => Ok(parse_terms(enc.source, ts)?
            .into_iter()
            .map(|t| match t {
                Term::Lambda(t) => t,
                _ => unreachable!("parsed as λ"),
            })
            .collect()),
        None => Ok(default()),
    }
}

fn comb_items(enc: &Encoding, cfg: &CheckConfig, default: impl FnOnce() -> Vec<CombTerm>) -> Result<Vec<CombTerm>, CheckError> {
    match &cfg.terms {
        Some(ts) => Ok(parse_terms(enc.source, ts)?
            .into_iter()
            .map(|t| match t {
                Term::Comb(t) => t,
                _ => unreachable!("parsed as combinatory"),
            })
            .collect()),
        None => Ok(default()),
    }
}

/// Pairs `(M, N)` written `M ; N`.
fn bracket_items(cfg: &CheckConfig) -> Result<Vec<(CombTerm, CombTerm)>, CheckError> {
    if let Some(ts) = &cfg.terms {
        return ts
            .iter()
            .map(|t| {
                let bad = |message: String| CheckError::BadTerm { term: t.clone(), message };
                let (m, n) = t.split_once(';').ok_or_else(|| bad("expected `M ; N`".into()))?;
                let parse = |s: &str| -> Result<CombTerm, CheckError> {
                    let c = comb::parse(s.trim()).map_err(|e| bad(e.to_string()))?;
                    CalculusDef::sk().check_operators(&c).map_err(|e| bad(e.to_string()))?;
                    Ok(c)
                };
                let n = parse(n)?;
                if !n.is_closed() {
                    return Err(bad("N must be closed".into()));
                }
                Ok((parse(m)?, n))
            })
            .collect();
    }
    let n = cfg.size_or(200);
    let mut gm = TermGenerator::new(CalculusId::Sk, 8, cfg.seed).with_pool(&["x", "y"]).open();
    let mut gn = TermGenerator::new(CalculusId::Sk, 5, cfg.seed ^ 0x9e37_79b9);
    Ok(generate(n, || (gm.comb(&["S", "K"]), gn.comb(&["S", "K"])), |_| true))
}

pub(crate) fn run(enc: &Encoding, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport, CheckError> {
    let m = cfg.mutation_for(enc);
    let drop_k = m == Some(Mutation::BracketDropsK);
    let sk = CalculusDef::sk();
    let sf = CalculusDef::sf();
    let to_sk = |t: &LambdaTerm| comb::lambda_to_sk_with(t, drop_k);
    let to_lambda = |t: &CombTerm| comb::sk_to_lambda(t).expect("SK term");
    let to_sf = |t: &CombTerm| comb::sk_to_sf(t).expect("SK term");
    let show = |t: &dyn core::fmt::Display| t.to_string();
    Ok(match (enc.id, suite) {
        ("lambda-sk", Suite::BracketAbstraction) => {
            let items = bracket_items(cfg)?;
            let x = Name::user("x");
            tally(
                suite,
                enc,
                cfg,
                &items,
                |(m, n)| format!("{m} ; {n}"),
                |(mm, n), cfg| {
                    let abs = comb::bracket_with(&x, mm, &Basis::sk(), drop_k);
                    let left = CombTerm::app(abs.clone(), n.clone());
                    let right = mm.subst(&BTreeMap::from([(x.clone(), n.clone())]));
                    match join_comb(&sk, left, right.clone(), cfg) {
                        Join::Unknown => match unfold_abstraction(&sk, &abs, n) {
                            // a reduction path, but one the generic search missed
                            Some((reduct, steps)) if reduct == right && steps <= cfg.max_steps => Outcome::Pass,
                            _ => Outcome::Inconclusive,
                        },
                        j => join_outcome(j, "(λ*x.M) N and M{N/x}"),
                    }
                },
                false,
            )
        }
        ("lambda-sk", Suite::Simulation) => {
            let items = lambda_items(enc, cfg, || {
                lambda_corpus(cfg, cfg.size_or(100), 8, true, |t| !t.successors(LAMBDA_MODE).is_empty())
            })?;
            tally(
                suite,
                enc,
                cfg,
                &items,
                |t| show(t),
                |t, cfg| {
                    for t2 in t.successors(LAMBDA_MODE) {
                        match join_outcome(ext_eq(&sk, &to_sk(t), &to_sk(&t2), cfg.max_steps), "the images") {
                            Outcome::Pass => {}
                            Outcome::Fail(r) => return Outcome::Fail(format!("step to `{t2}`: {r}")),
                            Outcome::Inconclusive => return Outcome::Inconclusive,
                        }
                    }
                    Outcome::Pass
                },
                false,
            )
        }
        ("sk-lambda", Suite::Simulation) => {
            let items = comb_items(enc, cfg, || sk_corpus(cfg, cfg.size_or(100), 8, |t| !sk.is_normal(t)))?;
            tally(
                suite,
                enc,
                cfg,
                &items,
                |t| show(t),
                |t, cfg| {
                    for t2 in sk.successors(t) {
                        match join_outcome(join_lambda(&to_lambda(t), &to_lambda(&t2), cfg), "the images") {
                            Outcome::Pass => {}
                            Outcome::Fail(r) => return Outcome::Fail(format!("step to `{t2}`: {r}")),
                            Outcome::Inconclusive => return Outcome::Inconclusive,
                        }
                    }
                    Outcome::Pass
                },
                false,
            )
        }
        ("sk-sf", Suite::Simulation) => {
            let items = comb_items(enc, cfg, || sk_redexes(cfg, cfg.size_or(100)))?;
            tally(
                suite,
                enc,
                cfg,
                &items,
                |t| show(t),
                |t, cfg| {
                    let image = to_sf(t);
                    let g = explore::explore(image, Bounds::new(4, cfg.max_states), |s| sf.successors(s));
                    for t2 in sk.successors(t) {
                        let want = to_sf(&t2);
                        if !g.find(&want).is_some_and(|i| i != 0) {
                            return if g.is_complete() {
                                Outcome::Fail(format!("the image never reaches `{want}`, the image of `{t2}`"))
                            } else {
                                Outcome::Inconclusive
                            };
                        }
                    }
                    Outcome::Pass
                },
                false,
            )
        }
        ("lambda-sk", Suite::Homomorphism | Suite::Compositionality | Suite::NameInvariance) => {
            let items = lambda_items(enc, cfg, || lambda_corpus(cfg, cfg.size_or(100), 8, false, |_| true))?;
            tally(
                suite,
                enc,
                cfg,
                &items,
                |t| show(t),
                |t, _| match suite {
                    Suite::Homomorphism => lambda_subterms(t)
                        .into_iter()
                        .find_map(|s| match s {
                            LambdaTerm::App(f, a) if to_sk(s) != CombTerm::app(to_sk(f), to_sk(a)) => {
                                Some(Outcome::Fail(format!("⟦{s}⟧ is not ⟦{f}⟧ ⟦{a}⟧")))
                            }
                            _ => None,
                        })
                        .unwrap_or(Outcome::Pass),
                    Suite::Compositionality => lambda_subterms(t)
                        .into_iter()
                        .find_map(|s| {
                            let want = match s {
                                LambdaTerm::Var(x) => CombTerm::Var(x.clone()),
                                LambdaTerm::Abs(x, b) => comb::bracket_abstract(x, &to_sk(b), &Basis::sk()),
                                LambdaTerm::App(f, a) => CombTerm::app(to_sk(f), to_sk(a)),
                            };
                            (to_sk(s) != want).then(|| Outcome::Fail(format!("⟦{s}⟧ is not built from its parts")))
                        })
                        .unwrap_or(Outcome::Pass),
                    _ => {
                        let sigma = fresh_renaming(&t.free_vars(), &t.names());
                        let l = to_sk(&t.rename(&sigma));
                        let r = rename_comb(&to_sk(t), &sigma);
                        if l == r {
                            Outcome::Pass
                        } else {
                            Outcome::Fail(format!("renaming free names gives `{l}`, renaming the image gives `{r}`"))
                        }
                    }
                },
                false,
            )
        }
        ("sk-lambda" | "sk-sf", Suite::Homomorphism | Suite::Compositionality | Suite::NameInvariance) => {
            let items = comb_items(enc, cfg, || sk_corpus(cfg, cfg.size_or(100), 8, |_| true))?;
            let is_sf = enc.id == "sk-sf";
            tally(
                suite,
                enc,
                cfg,
                &items,
                |t| show(t),
                |t, _| {
                    let image = |a: &CombTerm| if is_sf { Term::Comb(to_sf(a)) } else { Term::Lambda(to_lambda(a)) };
                    match suite {
                        Suite::Homomorphism | Suite::Compositionality => comb_subterms(t)
                            .into_iter()
                            .find_map(|s| {
                                let want = match s {
                                    CombTerm::App(f, a) => match (image(f), image(a)) {
                                        (Term::Comb(f), Term::Comb(a)) => Term::Comb(CombTerm::app(f, a)),
                                        (Term::Lambda(f), Term::Lambda(a)) => Term::Lambda(LambdaTerm::app(f, a)),
                                        _ => unreachable!(),
                                    },
                                    _ if suite == Suite::Homomorphism => return None,
                                    CombTerm::Var(x) => {
                                        if is_sf {
                                            Term::Comb(CombTerm::Var(x.clone()))
                                        } else {
                                            Term::Lambda(LambdaTerm::Var(x.clone()))
                                        }
                                    }
                                    CombTerm::Op(o) => match (is_sf, o.as_str()) {
                                        (true, "S") => Term::Comb(CombTerm::op("S")),
                                        (true, _) => Term::Comb(Basis::sf().k),
                                        (false, "S") => Term::Lambda(comb::lambda_s()),
                                        (false, _) => Term::Lambda(comb::lambda_k()),
                                    },
                                };
                                (!term_eq(&image(s), &want)).then(|| Outcome::Fail(format!("⟦{s}⟧ is not built from its parts")))
                            })
                            .unwrap_or(Outcome::Pass),
                        _ => {
                            let sigma = fresh_renaming(&t.vars(), &t.vars());
                            let renamed = rename_comb(t, &sigma);
                            let ok = if is_sf {
                                to_sf(&renamed) == rename_comb(&to_sf(t), &sigma)
                            } else {
                                to_lambda(&renamed).alpha_eq(&to_lambda(t).rename(&sigma))
                            };
                            if ok {
                                Outcome::Pass
                            } else {
                                Outcome::Fail("renaming free names does not commute with the translation".into())
                            }
                        }
                    }
                },
                false,
            )
        }
        _ => return Err(CheckError::NotApplicable { suite, encoding: enc.id }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CombTerm {
        comb::parse(s).unwrap()
    }

    #[test]
    fn joinability() {
        let sk = CalculusDef::sk();
        let cfg = CheckConfig::default();
        assert_eq!(join_comb(&sk, c("S K K x"), c("x"), &cfg), Join::Yes);
        assert_eq!(join_comb(&sk, c("K x y"), c("K y x"), &cfg), Join::Apart(c("x"), c("y")));
        let omega = c("S (S K K) (S K K) (S (S K K) (S K K))");
        assert_eq!(join_comb(&sk, omega, c("x"), &CheckConfig { max_states: 200, ..cfg }), Join::Unknown);
    }
}
