//! Combinatory calculi (SK, SKI, SF) as data: an operator table plus
//! guarded rewrite rules, interpreted by one generic reducer.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::explore::{self, Bounds, Graph};
use crate::lambda::LambdaTerm;
use crate::name::{Name, Namespace};
use crate::syntax::{Cursor, ParseError, Tok};
use crate::trace::{Status, Step, Strategy, Trace};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CombTerm {
    Var(Name),
    Op(Name),
    App(Box<CombTerm>, Box<CombTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CombError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(Name),
    #[error("`{0}` is not in normal form")]
    NotNormal(CombTerm),
}

impl CombTerm {
    pub fn op(name: &str) -> Self {
        CombTerm::Op(Name::reserved(name))
    }

    pub fn var(name: &str) -> Self {
        CombTerm::Var(Name::user(name))
    }

    pub fn app(f: CombTerm, a: CombTerm) -> Self {
        CombTerm::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: CombTerm, args: impl IntoIterator<Item = CombTerm>) -> Self {
        args.into_iter().fold(head, CombTerm::app)
    }

    /// Head and arguments of the application spine.
    pub fn spine(&self) -> (&CombTerm, Vec<&CombTerm>) {
        let mut args = Vec::new();
        let mut t = self;
        while let CombTerm::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// Number of leaves (operators and variables).
    pub fn size(&self) -> usize {
        match self {
            CombTerm::App(f, a) => f.size() + a.size(),
            _ => 1,
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let CombTerm::Var(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn operators(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let CombTerm::Op(o) = t {
                out.insert(o.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&CombTerm)) {
        f(self);
        if let CombTerm::App(a, b) = self {
            a.visit(f);
            b.visit(f);
        }
    }

    pub fn is_closed(&self) -> bool {
        self.vars().is_empty()
    }

    /// Replaces variables by terms.
    pub fn subst(&self, sigma: &BTreeMap<Name, CombTerm>) -> CombTerm {
        match self {
            CombTerm::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| self.clone()),
            CombTerm::Op(_) => self.clone(),
            CombTerm::App(f, a) => CombTerm::app(f.subst(sigma), a.subst(sigma)),
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&CombTerm> {
        match (path.split_first(), self) {
            (None, _) => Some(self),
            (Some((0, rest)), CombTerm::App(f, _)) => f.subterm(rest),
            (Some((1, rest)), CombTerm::App(_, a)) => a.subterm(rest),
            _ => None,
        }
    }

    fn replace_at(&self, path: &[usize], new: CombTerm) -> Option<CombTerm> {
        match (path.split_first(), self) {
            (None, _) => Some(new),
            (Some((0, rest)), CombTerm::App(f, a)) => Some(CombTerm::app(f.replace_at(rest, new)?, (**a).clone())),
            (Some((1, rest)), CombTerm::App(f, a)) => Some(CombTerm::app((**f).clone(), a.replace_at(rest, new)?)),
            _ => None,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombTerm::Var(x) | CombTerm::Op(x) => write!(f, "{x}"),
            CombTerm::App(g, a) => {
                g.write(f)?;
                if matches!(**a, CombTerm::App(..)) {
                    f.write_str(" (")?;
                    a.write(f)?;
                    f.write_str(")")
                } else {
                    f.write_str(" ")?;
                    a.write(f)
                }
            }
        }
    }
}

impl fmt::Display for CombTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

impl fmt::Debug for CombTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses left-associative application of uppercase operators and
/// lowercase variables, with parentheses.
pub fn parse(src: &str) -> Result<CombTerm, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = app(&mut c)?;
    c.finish()?;
    Ok(t)
}

fn app(c: &mut Cursor) -> Result<CombTerm, ParseError> {
    let mut t = atom(c)?;
    while matches!(c.peek(), Tok::Ident(_) | Tok::LParen) {
        t = CombTerm::app(t, atom(c)?);
    }
    Ok(t)
}

fn atom(c: &mut Cursor) -> Result<CombTerm, ParseError> {
    let col = c.column();
    match c.peek().clone() {
        Tok::LParen => {
            c.bump();
            let t = app(c)?;
            c.expect(&Tok::RParen)?;
            Ok(t)
        }
        Tok::Ident(s) => {
            c.bump();
            let n = Name::parse(&s).map_err(|e| ParseError::new(col, e.to_string()))?;
            Ok(match n.namespace() {
                Namespace::Reserved => CombTerm::Op(n),
                _ => CombTerm::Var(n),
            })
        }
        _ => Err(c.unexpected("an operator, a variable or `(`")),
    }
}

/// How a rule argument is matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgPat {
    /// Binds the whole argument to the next metavariable.
    Any,
    /// Requires an application and binds its two components.
    Split,
}

/// Right-hand side of a rule, over the metavariables bound by the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Meta(usize),
    Op(Name),
    App(Box<Template>, Box<Template>),
}

impl Template {
    fn app(f: Template, a: Template) -> Self {
        Template::App(Box::new(f), Box::new(a))
    }

    fn instantiate(&self, metas: &[CombTerm]) -> CombTerm {
        match self {
            Template::Meta(i) => metas[*i].clone(),
            Template::Op(o) => CombTerm::Op(o.clone()),
            Template::App(f, a) => CombTerm::app(f.instantiate(metas), a.instantiate(metas)),
        }
    }
}

/// Side condition on the arguments (by argument position).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    None,
    IsAtom(usize),
    IsCompound(usize),
    IsFactorableCompound(usize),
    OperatorIn(usize, Vec<Name>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub head: Name,
    pub args: Vec<ArgPat>,
    pub guard: Guard,
    pub rhs: Template,
}

/// Structural classification of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Atom,
    /// A partially applied operator.
    Compound,
    /// A partially applied operator whose components F may extract.
    FactorableCompound,
    /// Some rule fires at the head of the spine.
    Reducible,
    /// The head operator has all its arguments but no rule applies.
    Stuck,
    /// The spine is headed by a variable.
    Open,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Atom => "atom",
            Class::Compound => "compound",
            Class::FactorableCompound => "factorable_compound",
            Class::Reducible => "reducible",
            Class::Stuck => "stuck",
            Class::Open => "open",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalculusDef {
    pub name: String,
    pub operators: BTreeMap<Name, usize>,
    /// Operators whose partial applications are factorable forms.
    pub factorable: BTreeSet<Name>,
    pub rules: Vec<Rule>,
}

fn m(i: usize) -> Template {
    Template::Meta(i)
}

fn s_rule() -> Rule {
    // S M N X → M X (N X)
    Rule {
        name: "S".into(),
        head: Name::reserved("S"),
        args: vec![ArgPat::Any; 3],
        guard: Guard::None,
        rhs: Template::app(Template::app(m(0), m(2)), Template::app(m(1), m(2))),
    }
}

fn k_rule() -> Rule {
    Rule { name: "K".into(), head: Name::reserved("K"), args: vec![ArgPat::Any; 2], guard: Guard::None, rhs: m(0) }
}

impl CalculusDef {
    pub fn sk() -> Self {
        Self {
            name: "sk".into(),
            operators: BTreeMap::from([(Name::reserved("S"), 3), (Name::reserved("K"), 2)]),
            factorable: BTreeSet::new(),
            rules: vec![s_rule(), k_rule()],
        }
    }

    pub fn ski() -> Self {
        let mut c = Self::sk();
        c.name = "ski".into();
        c.operators.insert(Name::reserved("I"), 1);
        c.rules.push(Rule {
            name: "I".into(),
            head: Name::reserved("I"),
            args: vec![ArgPat::Any],
            guard: Guard::None,
            rhs: m(0),
        });
        c
    }

    pub fn sf() -> Self {
        let (s, f) = (Name::reserved("S"), Name::reserved("F"));
        Self {
            name: "sf".into(),
            operators: BTreeMap::from([(s.clone(), 3), (f.clone(), 3)]),
            factorable: BTreeSet::from([s.clone(), f.clone()]),
            rules: vec![
                s_rule(),
                // F O M N → M   (O an operator)
                Rule {
                    name: "F_atom".into(),
                    head: f.clone(),
                    args: vec![ArgPat::Any; 3],
                    guard: Guard::OperatorIn(0, vec![s, f.clone()]),
                    rhs: m(1),
                },
                // F (X Y) M N → N X Y   (X Y factorable)
                Rule {
                    name: "F_compound".into(),
                    head: f,
                    args: vec![ArgPat::Split, ArgPat::Any, ArgPat::Any],
                    guard: Guard::IsFactorableCompound(0),
                    rhs: Template::app(Template::app(m(3), m(0)), m(1)),
                },
            ],
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "sk" => Some(Self::sk()),
            "ski" => Some(Self::ski()),
            "sf" => Some(Self::sf()),
            _ => None,
        }
    }

    pub fn check_operators(&self, t: &CombTerm) -> Result<(), CombError> {
        match t.operators().into_iter().find(|o| !self.operators.contains_key(o)) {
            Some(o) => Err(CombError::UnknownOperator(o)),
            None => Ok(()),
        }
    }

    pub fn classify(&self, t: &CombTerm) -> Class {
        let (head, args) = t.spine();
        let CombTerm::Op(o) = head else { return Class::Open };
        let Some(&arity) = self.operators.get(o) else { return Class::Stuck };
        if args.is_empty() {
            Class::Atom
        } else if args.len() < arity {
            if self.factorable.contains(o) {
                Class::FactorableCompound
            } else {
                Class::Compound
            }
        } else if self.rule_for(o, &args[..arity]).is_some() {
            Class::Reducible
        } else {
            Class::Stuck
        }
    }

    fn guard_holds(&self, g: &Guard, args: &[&CombTerm]) -> bool {
        match g {
            Guard::None => true,
            Guard::IsAtom(i) => self.classify(args[*i]) == Class::Atom,
            Guard::IsCompound(i) => {
                matches!(self.classify(args[*i]), Class::Compound | Class::FactorableCompound)
            }
            Guard::IsFactorableCompound(i) => self.classify(args[*i]) == Class::FactorableCompound,
            Guard::OperatorIn(i, ops) => matches!(args[*i], CombTerm::Op(o) if ops.contains(o)),
        }
    }

    fn match_rule(&self, rule: &Rule, args: &[&CombTerm]) -> Option<Vec<CombTerm>> {
        if rule.args.len() != args.len() || !self.guard_holds(&rule.guard, args) {
            return None;
        }
        let mut metas = Vec::new();
        for (pat, arg) in rule.args.iter().zip(args) {
            match (pat, arg) {
                (ArgPat::Any, _) => metas.push((*arg).clone()),
                (ArgPat::Split, CombTerm::App(l, r)) => {
                    metas.push((**l).clone());
                    metas.push((**r).clone());
                }
                (ArgPat::Split, _) => return None,
            }
        }
        Some(metas)
    }

    /// The unique rule (with its metavariable bindings) that fires on
    /// `head` applied to exactly `args`.
    fn rule_for(&self, head: &Name, args: &[&CombTerm]) -> Option<(&Rule, Vec<CombTerm>)> {
        self.rules.iter().filter(|r| &r.head == head).find_map(|r| self.match_rule(r, args).map(|ms| (r, ms)))
    }

    /// Names of every rule whose left-hand side matches `t` at the root.
    pub fn matching_rules(&self, t: &CombTerm) -> Vec<&str> {
        let (head, args) = t.spine();
        let CombTerm::Op(o) = head else { return Vec::new() };
        self.rules.iter().filter(|r| &r.head == o && self.match_rule(r, &args).is_some()).map(|r| r.name.as_str()).collect()
    }

    /// Contracts `t` if it is itself a redex (operator applied to exactly
    /// its arity), returning the rule name and the contractum.
    pub fn contract_root(&self, t: &CombTerm) -> Option<(String, CombTerm)> {
        let (head, args) = t.spine();
        let CombTerm::Op(o) = head else { return None };
        if self.operators.get(o) != Some(&args.len()) {
            return None;
        }
        let (rule, metas) = self.rule_for(o, &args)?;
        Some((rule.name.clone(), rule.rhs.instantiate(&metas)))
    }

    pub fn redexes(&self, t: &CombTerm, strategy: Strategy) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_redexes(t, strategy, &mut Vec::new(), &mut out);
        out
    }

    fn collect_redexes(&self, t: &CombTerm, strategy: Strategy, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if self.contract_root(t).is_some() {
            out.push(path.clone());
        }
        if let CombTerm::App(f, a) = t {
            let order: [(usize, &CombTerm); 2] = match strategy {
                Strategy::Leftmost => [(0, f), (1, a)],
                Strategy::RightToLeft => [(1, a), (0, f)],
            };
            for (i, s) in order {
                path.push(i);
                self.collect_redexes(s, strategy, path, out);
                path.pop();
            }
        }
    }

    pub fn contract_at(&self, t: &CombTerm, path: &[usize]) -> Option<(String, CombTerm)> {
        let (rule, new) = self.contract_root(t.subterm(path)?)?;
        Some((rule, t.replace_at(path, new)?))
    }

    pub fn is_normal(&self, t: &CombTerm) -> bool {
        self.redexes(t, Strategy::Leftmost).is_empty()
    }

    pub fn step(&self, t: &CombTerm, strategy: Strategy) -> Option<Step<CombTerm>> {
        let path = self.redexes(t, strategy).into_iter().next()?;
        let (rule, result) = self.contract_at(t, &path)?;
        Some(Step { rule, path, result })
    }

    pub fn successors(&self, t: &CombTerm) -> Vec<CombTerm> {
        self.redexes(t, Strategy::Leftmost).iter().filter_map(|p| self.contract_at(t, p).map(|(_, r)| r)).collect()
    }

    pub fn reduce(&self, t: &CombTerm, strategy: Strategy, max_steps: usize) -> Trace<CombTerm> {
        let mut seen = BTreeSet::from([t.clone()]);
        let mut steps: Vec<Step<CombTerm>> = Vec::new();
        let mut cur = t.clone();
        let status = loop {
            let Some(step) = self.step(&cur, strategy) else { break Status::NormalForm };
            if steps.len() == max_steps {
                break Status::Cutoff;
            }
            cur = step.result.clone();
            steps.push(step);
            if !seen.insert(cur.clone()) {
                break Status::Cycle;
            }
        };
        Trace { initial: t.clone(), steps, status }
    }

    pub fn explore(&self, t: &CombTerm, bounds: Bounds) -> Graph<CombTerm> {
        explore::explore(t.clone(), bounds, |s| self.successors(s))
    }
}

/// The combinators bracket abstraction compiles to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub s: CombTerm,
    pub k: CombTerm,
}

impl Basis {
    pub fn sk() -> Self {
        Self { s: CombTerm::op("S"), k: CombTerm::op("K") }
    }

    /// SF with K represented by `F F`.
    pub fn sf() -> Self {
        Self { s: CombTerm::op("S"), k: CombTerm::app(CombTerm::op("F"), CombTerm::op("F")) }
    }

    /// `S K K`.
    pub fn identity(&self) -> CombTerm {
        CombTerm::apps(self.s.clone(), [self.k.clone(), self.k.clone()])
    }
}

/// λ*x.M:
///
/// ```text
/// λ*x.x  = I  (= S K K)
/// λ*x.y  = K y           y ≠ x
/// λ*x.O  = K O           O an operator
/// λ*x.MN = S (λ*x.M) (λ*x.N)
/// ```
pub fn bracket_abstract(x: &Name, body: &CombTerm, basis: &Basis) -> CombTerm {
    bracket_with(x, body, basis, false)
}

/// `drop_k` replaces the `λ*x.y = K y` case with `y`; it exists only to
/// build a deliberately broken encoding for mutation testing.
pub(crate) fn bracket_with(x: &Name, body: &CombTerm, basis: &Basis, drop_k: bool) -> CombTerm {
    match body {
        CombTerm::Var(y) if y == x => basis.identity(),
        CombTerm::Var(_) if drop_k => body.clone(),
        CombTerm::Var(_) | CombTerm::Op(_) => CombTerm::app(basis.k.clone(), body.clone()),
        CombTerm::App(m, n) => {
            CombTerm::apps(basis.s.clone(), [bracket_with(x, m, basis, drop_k), bracket_with(x, n, basis, drop_k)])
        }
    }
}

/// Compiles a λ-term to SK by bracket abstraction, innermost λ first.
pub fn lambda_to_sk(t: &LambdaTerm) -> CombTerm {
    lambda_to_sk_with(t, false)
}

pub(crate) fn lambda_to_sk_with(t: &LambdaTerm, drop_k: bool) -> CombTerm {
    match t {
        LambdaTerm::Var(x) => CombTerm::Var(x.clone()),
        LambdaTerm::App(f, a) => CombTerm::app(lambda_to_sk_with(f, drop_k), lambda_to_sk_with(a, drop_k)),
        LambdaTerm::Abs(x, b) => bracket_with(x, &lambda_to_sk_with(b, drop_k), &Basis::sk(), drop_k),
    }
}

/// `λg.λf.λx.g x (f x)`
pub fn lambda_s() -> LambdaTerm {
    let (g, f, x) = (Name::user("g"), Name::user("f"), Name::user("x"));
    let v = |n: &Name| LambdaTerm::Var(n.clone());
    let body = LambdaTerm::app(LambdaTerm::app(v(&g), v(&x)), LambdaTerm::app(v(&f), v(&x)));
    LambdaTerm::abs(g, LambdaTerm::abs(f, LambdaTerm::abs(x, body)))
}

/// `λx.λy.x`
pub fn lambda_k() -> LambdaTerm {
    let (x, y) = (Name::user("x"), Name::user("y"));
    LambdaTerm::abs(x.clone(), LambdaTerm::abs(y, LambdaTerm::Var(x)))
}

pub fn sk_to_lambda(t: &CombTerm) -> Result<LambdaTerm, CombError> {
    Ok(match t {
        CombTerm::Var(x) => LambdaTerm::Var(x.clone()),
        CombTerm::Op(o) => match o.as_str() {
            "S" => lambda_s(),
            "K" => lambda_k(),
            _ => return Err(CombError::UnknownOperator(o.clone())),
        },
        CombTerm::App(f, a) => LambdaTerm::app(sk_to_lambda(f)?, sk_to_lambda(a)?),
    })
}

/// S ↦ S, K ↦ F F.
pub fn sk_to_sf(t: &CombTerm) -> Result<CombTerm, CombError> {
    Ok(match t {
        CombTerm::Var(_) => t.clone(),
        CombTerm::Op(o) => match o.as_str() {
            "S" => t.clone(),
            "K" => Basis::sf().k,
            _ => return Err(CombError::UnknownOperator(o.clone())),
        },
        CombTerm::App(f, a) => CombTerm::app(sk_to_sf(f)?, sk_to_sf(a)?),
    })
}

/// One input of the factorisation demo.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoriseCase {
    pub component: CombTerm,
    /// `S (F F) X`, an identity function built around the component.
    pub identity: CombTerm,
    /// Whether `S (F F) X z` reduces to `z`.
    pub acts_as_identity: bool,
    /// `F (S (F F) X) m n` reduced to normal form.
    pub trace: Trace<CombTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoriseReport {
    pub cases: Vec<FactoriseCase>,
    /// The identities behave alike yet factorisation tells them apart.
    pub distinguished: bool,
}

/// Shows that F inspects the structure of extensionally equal functions:
/// each `S (F F) X` is an identity, but `F (S (F F) X) m n` exposes `X`.
pub fn factorise_demo(components: &[CombTerm]) -> Result<FactoriseReport, CombError> {
    let sf = CalculusDef::sf();
    let f = || CombTerm::op("F");
    let ff = Basis::sf().k;
    let mut cases = Vec::new();
    for x in components {
        sf.check_operators(x)?;
        if !sf.is_normal(x) {
            return Err(CombError::NotNormal(x.clone()));
        }
        let identity = CombTerm::apps(CombTerm::op("S"), [ff.clone(), x.clone()]);
        let z = CombTerm::var("z");
        let applied = sf.reduce(&CombTerm::app(identity.clone(), z.clone()), Strategy::Leftmost, 100);
        let term = CombTerm::apps(f(), [identity.clone(), CombTerm::var("m"), CombTerm::var("n")]);
        cases.push(FactoriseCase {
            component: x.clone(),
            acts_as_identity: applied.status == Status::NormalForm && *applied.last() == z,
            trace: sf.reduce(&term, Strategy::Leftmost, 100),
            identity,
        });
    }
    let results: BTreeSet<&CombTerm> = cases.iter().map(|c| c.trace.last()).collect();
    let distinguished = results.len() == cases.len() && cases.iter().all(|c| c.acts_as_identity);
    Ok(FactoriseReport { cases, distinguished })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> CombTerm {
        parse(s).unwrap()
    }

    #[test]
    fn skk_x() {
        let tr = CalculusDef::sk().reduce(&p("S K K x"), Strategy::Leftmost, 10);
        assert_eq!(tr.status, Status::NormalForm);
        assert_eq!(*tr.last(), p("x"));
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.steps[0].result, p("K x (K x)"));
        assert_eq!(tr.steps[0].rule, "S");
        assert_eq!(tr.steps[1].rule, "K");
    }

    #[test]
    fn sf_rules() {
        let sf = CalculusDef::sf();
        assert_eq!(sf.contract_root(&p("F F m n")).unwrap(), ("F_atom".to_string(), p("m")));
        assert_eq!(sf.contract_root(&p("F (S m) x y")).unwrap(), ("F_compound".to_string(), p("y S m")));
        assert_eq!(sf.contract_root(&p("F (F m n) x y")).unwrap().1, p("y (F m) n"));
        assert!(sf.contract_root(&p("F x m n")).is_none());
        assert!(sf.contract_root(&p("F (x y) m n")).is_none());
        assert!(sf.contract_root(&p("F (S a b c) m n")).is_none());
    }

    #[test]
    fn classification() {
        let sf = CalculusDef::sf();
        assert_eq!(sf.classify(&p("S")), Class::Atom);
        assert_eq!(sf.classify(&p("S M")), Class::FactorableCompound);
        assert_eq!(sf.classify(&p("F M N")), Class::FactorableCompound);
        assert_eq!(sf.classify(&p("S M N X")), Class::Reducible);
        assert_eq!(sf.classify(&p("F x m n")), Class::Stuck);
        assert_eq!(sf.classify(&p("x S")), Class::Open);
        assert_eq!(CalculusDef::sk().classify(&p("K S")), Class::Compound);
    }

    #[test]
    fn bracket_abstraction_cases() {
        let b = Basis::sk();
        let x = Name::user("x");
        assert_eq!(bracket_abstract(&x, &p("x"), &b), p("S K K"));
        assert_eq!(bracket_abstract(&x, &p("y"), &b), p("K y"));
        assert_eq!(bracket_abstract(&x, &p("S"), &b), p("K S"));
        assert_eq!(bracket_abstract(&x, &p("x x"), &b), p("S (S K K) (S K K)"));
        assert_eq!(bracket_abstract(&x, &p("x"), &Basis::sf()), p("S (F F) (F F)"));
    }

    #[test]
    fn self_application_of_k() {
        let sk = CalculusDef::sk();
        let t = CombTerm::app(bracket_abstract(&Name::user("x"), &p("x x"), &Basis::sk()), p("K"));
        assert_eq!(*sk.reduce(&t, Strategy::Leftmost, 100).last(), p("K K"));
    }

    #[test]
    fn translations() {
        assert_eq!(sk_to_sf(&p("K")).unwrap(), p("F F"));
        assert_eq!(sk_to_sf(&p("S K x")).unwrap(), p("S (F F) x"));
        assert!(sk_to_lambda(&p("I")).is_err());
        assert_eq!(sk_to_lambda(&p("K")).unwrap().to_string(), "lam x. lam y. x");
        let t = crate::lambda::parse("lam x. lam y. x").unwrap();
        assert_eq!(lambda_to_sk(&t), p("S (K K) (S K K)"));
    }

    #[test]
    fn factorisation_separates_identities() {
        let r = factorise_demo(&[p("S"), p("F"), p("F F")]).unwrap();
        assert!(r.distinguished);
        let outs: Vec<String> = r.cases.iter().map(|c| c.trace.last().to_string()).collect();
        assert_eq!(outs, ["n (S (F F)) S", "n (S (F F)) F", "n (S (F F)) (F F)"]);
        assert!(factorise_demo(&[p("F F S F")]).is_err());
    }

    #[test]
    fn printer_round_trips() {
        for s in ["S K K x", "F (S (F F) S) m n", "x'1 (y z)"] {
            assert_eq!(p(s).to_string(), s);
        }
    }
}
