//! Pure λ-calculus with call-by-value and full-β reduction.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::explore::{self, Bounds, Graph};
use crate::name::{FreshSupply, Name, NameSubstitution, Namespace};
use crate::syntax::{Cursor, ParseError, Tok};
use crate::trace::{Status, Step, Strategy, Trace};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LambdaTerm {
    Var(Name),
    Abs(Name, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

/// Simultaneous substitution of terms for variables.
pub type TermSubstitution = BTreeMap<Name, LambdaTerm>;

/// Which β-relation drives reduction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// βv: the argument must be a value; nothing reduces under λ.
    CallByValue,
    /// β in every context, including under λ.
    #[default]
    FullBeta,
    /// β in application contexts only (no reduction under λ).
    FullBetaNoXi,
}

impl Mode {
    pub fn rule_name(self) -> &'static str {
        match self {
            Mode::CallByValue => "beta_v",
            _ => "beta",
        }
    }

    fn under_lambda(self) -> bool {
        self == Mode::FullBeta
    }
}

impl LambdaTerm {
    pub fn var(name: &str) -> Self {
        LambdaTerm::Var(Name::user(name))
    }

    pub fn abs(x: Name, body: LambdaTerm) -> Self {
        LambdaTerm::Abs(x, Box::new(body))
    }

    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apps(head: LambdaTerm, args: impl IntoIterator<Item = LambdaTerm>) -> Self {
        args.into_iter().fold(head, LambdaTerm::app)
    }

    pub fn is_value(&self) -> bool {
        !matches!(self, LambdaTerm::App(..))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Abs(_, b) => 1 + b.size(),
            LambdaTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Name>, out: &mut BTreeSet<Name>) {
        match self {
            LambdaTerm::Var(x) => {
                if !bound.contains(&x) {
                    out.insert(x.clone());
                }
            }
            LambdaTerm::Abs(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            LambdaTerm::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every name occurring in the term, bound or free.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            LambdaTerm::Var(x) => {
                out.insert(x.clone());
            }
            LambdaTerm::Abs(x, b) => {
                out.insert(x.clone());
                b.collect_names(out);
            }
            LambdaTerm::App(f, a) => {
                f.collect_names(out);
                a.collect_names(out);
            }
        }
    }

    /// Capture-avoiding simultaneous substitution; a binder is renamed
    /// only when it would capture a free variable of an image.
    pub fn subst(&self, sigma: &TermSubstitution) -> LambdaTerm {
        match self {
            LambdaTerm::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| self.clone()),
            LambdaTerm::App(f, a) => LambdaTerm::app(f.subst(sigma), a.subst(sigma)),
            LambdaTerm::Abs(x, body) => {
                let fv = self.free_vars();
                let live: TermSubstitution =
                    sigma.iter().filter(|(k, _)| fv.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
                if live.is_empty() {
                    return self.clone();
                }
                let captures = live.values().any(|v| v.free_vars().contains(x));
                if !captures {
                    return LambdaTerm::abs(x.clone(), body.subst(&live));
                }
                let mut supply = FreshSupply::avoiding(&body.names());
                supply.avoid_all(live.values().flat_map(|v| v.free_vars()).collect::<Vec<_>>().iter());
                supply.avoid_all(live.keys());
                let y = supply.fresh(x);
                let mut inner = live;
                inner.insert(x.clone(), LambdaTerm::Var(y.clone()));
                LambdaTerm::abs(y, body.subst(&inner))
            }
        }
    }

    pub fn subst1(&self, x: &Name, v: &LambdaTerm) -> LambdaTerm {
        self.subst(&BTreeMap::from([(x.clone(), v.clone())]))
    }

    /// Applies a renaming to the free variables.
    pub fn rename(&self, sigma: &NameSubstitution) -> LambdaTerm {
        let s: TermSubstitution = sigma.iter().map(|(k, v)| (k.clone(), LambdaTerm::Var(v.clone()))).collect();
        self.subst(&s)
    }

    /// α-canonical representative: binders renamed `v'0`, `v'1`, … in
    /// pre-order, skipping names that occur free.
    pub fn canonical(&self) -> LambdaTerm {
        let free = self.free_vars();
        let mut supply = FreshSupply::avoiding(&free);
        self.canon_with(&mut Vec::new(), &mut supply)
    }

    fn canon_with(&self, env: &mut Vec<(Name, Name)>, supply: &mut FreshSupply) -> LambdaTerm {
        match self {
            LambdaTerm::Var(x) => {
                let y = env.iter().rev().find(|(o, _)| o == x).map_or(x, |(_, n)| n);
                LambdaTerm::Var(y.clone())
            }
            LambdaTerm::Abs(x, b) => {
                let y = supply.fresh_base("v");
                env.push((x.clone(), y.clone()));
                let body = b.canon_with(env, supply);
                env.pop();
                LambdaTerm::abs(y, body)
            }
            LambdaTerm::App(f, a) => LambdaTerm::app(f.canon_with(env, supply), a.canon_with(env, supply)),
        }
    }

    pub fn alpha_eq(&self, other: &LambdaTerm) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&LambdaTerm> {
        match (path.split_first(), self) {
            (None, _) => Some(self),
            (Some((0, rest)), LambdaTerm::Abs(_, b)) => b.subterm(rest),
            (Some((0, rest)), LambdaTerm::App(f, _)) => f.subterm(rest),
            (Some((1, rest)), LambdaTerm::App(_, a)) => a.subterm(rest),
            _ => None,
        }
    }

    fn is_redex(&self, mode: Mode) -> bool {
        match self {
            LambdaTerm::App(f, a) => matches!(**f, LambdaTerm::Abs(..)) && (mode != Mode::CallByValue || a.is_value()),
            _ => false,
        }
    }

    /// Paths of all redexes, outermost first, in the order `strategy` visits them.
    pub fn redexes(&self, mode: Mode, strategy: Strategy) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_redexes(mode, strategy, &mut Vec::new(), &mut out);
        out
    }

    fn collect_redexes(&self, mode: Mode, strategy: Strategy, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if self.is_redex(mode) {
            out.push(path.clone());
        }
        match self {
            LambdaTerm::Var(_) => {}
            LambdaTerm::Abs(_, b) => {
                if mode.under_lambda() {
                    path.push(0);
                    b.collect_redexes(mode, strategy, path, out);
                    path.pop();
                }
            }
            LambdaTerm::App(f, a) => {
                let order: [(usize, &LambdaTerm); 2] = match strategy {
                    Strategy::Leftmost => [(0, f), (1, a)],
                    Strategy::RightToLeft => [(1, a), (0, f)],
                };
                for (i, t) in order {
                    path.push(i);
                    t.collect_redexes(mode, strategy, path, out);
                    path.pop();
                }
            }
        }
    }

    /// Contracts the redex at `path`, if there is one.
    pub fn contract_at(&self, path: &[usize], mode: Mode) -> Option<LambdaTerm> {
        match (path.split_first(), self) {
            (None, LambdaTerm::App(f, a)) if self.is_redex(mode) => match &**f {
                LambdaTerm::Abs(x, body) => Some(body.subst1(x, a)),
                _ => None,
            },
            (Some((0, rest)), LambdaTerm::Abs(x, b)) if mode.under_lambda() => {
                Some(LambdaTerm::abs(x.clone(), b.contract_at(rest, mode)?))
            }
            (Some((0, rest)), LambdaTerm::App(f, a)) => Some(LambdaTerm::app(f.contract_at(rest, mode)?, (**a).clone())),
            (Some((1, rest)), LambdaTerm::App(f, a)) => Some(LambdaTerm::app((**f).clone(), a.contract_at(rest, mode)?)),
            _ => None,
        }
    }

    pub fn step(&self, mode: Mode, strategy: Strategy) -> Option<Step<LambdaTerm>> {
        let path = self.redexes(mode, strategy).into_iter().next()?;
        let result = self.contract_at(&path, mode)?;
        Some(Step { rule: mode.rule_name().to_string(), path, result })
    }

    /// All one-step reducts.
    pub fn successors(&self, mode: Mode) -> Vec<LambdaTerm> {
        self.redexes(mode, Strategy::Leftmost).iter().filter_map(|p| self.contract_at(p, mode)).collect()
    }

    /// Deterministic reduction; stops at a normal form, after `max_steps`,
    /// or as soon as a term repeats up to α.
    pub fn reduce(&self, mode: Mode, strategy: Strategy, max_steps: usize) -> Trace<LambdaTerm> {
        let mut seen = BTreeSet::from([self.canonical()]);
        let mut steps: Vec<Step<LambdaTerm>> = Vec::new();
        let mut cur = self.clone();
        let status = loop {
            let Some(step) = cur.step(mode, strategy) else { break Status::NormalForm };
            if steps.len() == max_steps {
                break Status::Cutoff;
            }
            cur = step.result.clone();
            steps.push(step);
            if !seen.insert(cur.canonical()) {
                break Status::Cycle;
            }
        };
        Trace { initial: self.clone(), steps, status }
    }

    /// Bounded reachability graph over α-canonical terms.
    pub fn explore(&self, mode: Mode, bounds: Bounds) -> Graph<LambdaTerm> {
        explore::explore(self.canonical(), bounds, |t| t.successors(mode).iter().map(LambdaTerm::canonical).collect())
    }

    pub fn unicode(&self) -> impl fmt::Display + '_ {
        Pretty { term: self, unicode: true }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, unicode: bool) -> fmt::Result {
        match self {
            LambdaTerm::Var(x) => write!(f, "{x}"),
            LambdaTerm::Abs(x, b) => {
                if unicode {
                    write!(f, "λ{x}. ")?;
                } else {
                    write!(f, "lam {x}. ")?;
                }
                b.write(f, unicode)
            }
            LambdaTerm::App(g, a) => {
                let paren_fun = matches!(**g, LambdaTerm::Abs(..));
                let paren_arg = !matches!(**a, LambdaTerm::Var(_));
                wrap(f, paren_fun, |f| g.write(f, unicode))?;
                f.write_str(" ")?;
                wrap(f, paren_arg, |f| a.write(f, unicode))
            }
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, paren: bool, inner: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result) -> fmt::Result {
    if paren {
        f.write_str("(")?;
        inner(f)?;
        f.write_str(")")
    } else {
        inner(f)
    }
}

struct Pretty<'a> {
    term: &'a LambdaTerm,
    unicode: bool,
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.term.write(f, self.unicode)
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

impl fmt::Debug for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses `lam x. t`, `\x. t` (several binders allowed: `lam x y. t`),
/// left-associative application, and parentheses.
pub fn parse(src: &str) -> Result<LambdaTerm, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = term(&mut c)?;
    c.finish()?;
    Ok(t)
}

fn is_lam(t: &Tok) -> bool {
    matches!(t, Tok::Backslash) || matches!(t, Tok::Ident(s) if s == "lam")
}

fn variable(c: &mut Cursor) -> Result<Name, ParseError> {
    let col = c.column();
    match c.peek().clone() {
        Tok::Ident(s) if s != "lam" => {
            let n = Name::parse(&s).map_err(|e| ParseError::new(col, e.to_string()))?;
            if n.namespace() == Namespace::Reserved {
                return Err(ParseError::new(col, "λ-terms use lowercase variables"));
            }
            c.bump();
            Ok(n)
        }
        _ => Err(c.unexpected("a variable")),
    }
}

fn term(c: &mut Cursor) -> Result<LambdaTerm, ParseError> {
    if is_lam(c.peek()) {
        c.bump();
        let mut binders = vec![variable(c)?];
        while matches!(c.peek(), Tok::Ident(_)) {
            binders.push(variable(c)?);
        }
        c.expect(&Tok::Dot)?;
        let body = term(c)?;
        return Ok(binders.into_iter().rev().fold(body, |b, x| LambdaTerm::abs(x, b)));
    }
    let mut t = atom(c)?;
    while matches!(c.peek(), Tok::Ident(s) if s != "lam") || *c.peek() == Tok::LParen {
        t = LambdaTerm::app(t, atom(c)?);
    }
    Ok(t)
}

fn atom(c: &mut Cursor) -> Result<LambdaTerm, ParseError> {
    if c.eat(&Tok::LParen) {
        let t = term(c)?;
        c.expect(&Tok::RParen)?;
        Ok(t)
    } else if matches!(c.peek(), Tok::Ident(_)) && !is_lam(c.peek()) {
        Ok(LambdaTerm::Var(variable(c)?))
    } else {
        Err(c.unexpected("a variable, `(` or `lam`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LambdaTerm {
        parse(s).unwrap()
    }

    #[test]
    fn substitution_renames_capturing_binder() {
        let t = p("lam y. x");
        let r = t.subst1(&Name::user("x"), &p("y"));
        match &r {
            LambdaTerm::Abs(b, body) => {
                assert_ne!(b, &Name::user("y"));
                assert_eq!(**body, p("y"));
            }
            _ => panic!("expected an abstraction, got {r}"),
        }
        assert!(r.alpha_eq(&p("lam z. y")));
    }

    #[test]
    fn substitution_skips_shadowed_binder() {
        let t = p("lam x. x");
        assert_eq!(t.subst1(&Name::user("x"), &p("y")), t);
    }

    #[test]
    fn cbv_identity() {
        let tr = p("(lam x. x) (lam y. y)").reduce(Mode::CallByValue, Strategy::Leftmost, 10);
        assert_eq!(tr.status, Status::NormalForm);
        assert_eq!(tr.last().to_string(), "lam y. y");
        assert_eq!(tr.steps[0].rule, "beta_v");
        assert_eq!(tr.steps[0].path, Vec::<usize>::new());
    }

    #[test]
    fn cbv_waits_for_values() {
        let t = p("(lam x. y) (f z)");
        assert!(t.step(Mode::CallByValue, Strategy::Leftmost).is_none());
        assert_eq!(t.step(Mode::FullBeta, Strategy::Leftmost).unwrap().result, p("y"));
    }

    #[test]
    fn omega_cycles() {
        let tr = p("(lam x. x x) (lam x. x x)").reduce(Mode::CallByValue, Strategy::Leftmost, 10);
        assert_eq!(tr.status, Status::Cycle);
        assert_eq!(tr.len(), 1);
    }

    #[test]
    fn xi_is_optional() {
        let t = p("lam z. (lam x. x) z");
        assert!(t.step(Mode::FullBetaNoXi, Strategy::Leftmost).is_none());
        let s = t.step(Mode::FullBeta, Strategy::Leftmost).unwrap();
        assert_eq!(s.path, vec![0]);
        assert_eq!(s.result, p("lam z. z"));
    }

    #[test]
    fn both_evaluation_orders() {
        let t = p("((lam x. x) a) ((lam y. y) b)");
        assert_eq!(t.step(Mode::FullBeta, Strategy::Leftmost).unwrap().path, vec![0]);
        assert_eq!(t.step(Mode::FullBeta, Strategy::RightToLeft).unwrap().path, vec![1]);
    }

    #[test]
    fn canonical_form_is_alpha_invariant() {
        assert_eq!(p("lam a. lam b. a b c").canonical(), p("lam x. lam y. x y c").canonical());
        assert_ne!(p("lam a. lam b. a").canonical(), p("lam a. lam b. b").canonical());
        let c = p("lam x. x").canonical();
        assert_eq!(c.to_string(), "lam v'0. v'0");
    }

    #[test]
    fn printer_round_trips() {
        for s in ["lam x. x", "f (g x) y", "(lam x. x) y", "f (lam x. x)", "x'0 (lam v'1. v'1)"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("\\x y. x").to_string(), "lam x. lam y. x");
        assert_eq!(p("λx. x").unicode().to_string(), "λx. x");
    }

    #[test]
    fn parse_errors_carry_columns() {
        assert_eq!(parse("lam x x").unwrap_err().column, 8);
        assert_eq!(parse("(x").unwrap_err().column, 3);
        assert!(parse("S").is_err());
    }
}
