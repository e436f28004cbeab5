//! Monadic π-calculus with replication and a success process.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::name::{FreshSupply, Name, NameSubstitution, Namespace};
use crate::process::{self, CName, Prefix, Process, View};
use crate::syntax::{Cursor, ParseError, Tok};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PiAction {
    /// `a(b)`: receive on `a`, binding `b`.
    In(Name, Name),
    /// `a<b>`: send `b` on `a`.
    Out(Name, Name),
}

impl PiAction {
    pub fn subject(&self) -> &Name {
        match self {
            PiAction::In(a, _) | PiAction::Out(a, _) => a,
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PiProcess {
    Nil,
    Ok,
    Par(Box<PiProcess>, Box<PiProcess>),
    Repl(Box<PiProcess>),
    Res(Name, Box<PiProcess>),
    Act(PiAction, Box<PiProcess>),
}

impl PiProcess {
    pub fn input(chan: Name, bind: Name, body: PiProcess) -> Self {
        PiProcess::Act(PiAction::In(chan, bind), Box::new(body))
    }

    pub fn output(chan: Name, obj: Name, body: PiProcess) -> Self {
        PiProcess::Act(PiAction::Out(chan, obj), Box::new(body))
    }

    pub fn new_par(a: PiProcess, b: PiProcess) -> Self {
        PiProcess::Par(Box::new(a), Box::new(b))
    }

    pub fn new_res(n: Name, p: PiProcess) -> Self {
        PiProcess::Res(n, Box::new(p))
    }

    pub fn new_repl(p: PiProcess) -> Self {
        PiProcess::Repl(Box::new(p))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            PiProcess::Nil | PiProcess::Ok => 1,
            PiProcess::Par(a, b) => 1 + a.size() + b.size(),
            PiProcess::Repl(p) | PiProcess::Res(_, p) | PiProcess::Act(_, p) => 1 + p.size(),
        }
    }

    fn substitute(&self, sigma: &NameSubstitution) -> PiProcess {
        match self {
            PiProcess::Nil | PiProcess::Ok => self.clone(),
            PiProcess::Par(a, b) => PiProcess::new_par(a.substitute(sigma), b.substitute(sigma)),
            PiProcess::Repl(p) => PiProcess::new_repl(p.substitute(sigma)),
            PiProcess::Res(n, p) => {
                let (n2, inner) = rebind(n, p, sigma);
                PiProcess::new_res(n2, p.substitute(&inner))
            }
            PiProcess::Act(PiAction::Out(a, b), p) => PiProcess::output(sigma.apply(a), sigma.apply(b), p.substitute(sigma)),
            PiProcess::Act(PiAction::In(a, b), p) => {
                let (b2, inner) = rebind(b, p, sigma);
                PiProcess::input(sigma.apply(a), b2, p.substitute(&inner))
            }
        }
    }

    pub fn unicode(&self) -> impl fmt::Display + '_ {
        Pretty { p: self, unicode: true }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, unicode: bool) -> fmt::Result {
        match self {
            PiProcess::Par(..) => {
                let mut parts = Vec::new();
                collect_par(self, &mut parts);
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    p.write(f, unicode)?;
                }
                Ok(())
            }
            _ => self.write_prefixed(f, unicode),
        }
    }

    fn write_prefixed(&self, f: &mut fmt::Formatter<'_>, unicode: bool) -> fmt::Result {
        match self {
            PiProcess::Nil => f.write_str("0"),
            PiProcess::Ok => f.write_str(if unicode { "✓" } else { "ok" }),
            PiProcess::Par(..) => {
                f.write_str("(")?;
                self.write(f, unicode)?;
                f.write_str(")")
            }
            PiProcess::Repl(p) => {
                f.write_str("!")?;
                p.write_prefixed(f, unicode)
            }
            PiProcess::Res(n, p) => {
                if unicode {
                    write!(f, "ν{n}. ")?;
                } else {
                    write!(f, "new {n}. ")?;
                }
                p.write_prefixed(f, unicode)
            }
            PiProcess::Act(a, p) => {
                match (a, unicode) {
                    (PiAction::In(x, y), _) => write!(f, "{x}({y})")?,
                    (PiAction::Out(x, y), false) => write!(f, "{x}<{y}>")?,
                    (PiAction::Out(x, y), true) => write!(f, "{x}⟨{y}⟩")?,
                }
                f.write_str(".")?;
                p.write_prefixed(f, unicode)
            }
        }
    }
}

/// Renames binder `n` when `sigma` would capture it, returning the
/// binder to use and the substitution to push underneath.
fn rebind(n: &Name, body: &PiProcess, sigma: &NameSubstitution) -> (Name, NameSubstitution) {
    let inner = sigma.without(n);
    let fv = body.free_names();
    let captures = inner.iter().any(|(k, v)| v == n && fv.contains(k));
    if !captures {
        return (n.clone(), inner);
    }
    let mut supply = FreshSupply::avoiding(&body.names());
    supply.avoid_all(&inner.names());
    let m = supply.fresh(n);
    let mut inner = inner;
    inner.insert(n.clone(), m.clone());
    (m, inner)
}

fn collect_par<'a>(p: &'a PiProcess, out: &mut Vec<&'a PiProcess>) {
    match p {
        PiProcess::Par(a, b) => {
            collect_par(a, out);
            collect_par(b, out);
        }
        _ => out.push(p),
    }
}

struct Pretty<'a> {
    p: &'a PiProcess,
    unicode: bool,
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.p.write(f, self.unicode)
    }
}

impl fmt::Display for PiProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

impl fmt::Debug for PiProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical π guard.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PiPrefix {
    In(CName),
    Out(CName, CName),
}

impl Prefix for PiPrefix {
    fn binders(&self) -> u32 {
        match self {
            PiPrefix::In(_) => 1,
            PiPrefix::Out(..) => 0,
        }
    }

    fn map_names(&self, f: &mut dyn FnMut(&CName) -> CName) -> Self {
        match self {
            PiPrefix::In(a) => PiPrefix::In(f(a)),
            PiPrefix::Out(a, b) => {
                let a2 = f(a);
                PiPrefix::Out(a2, f(b))
            }
        }
    }

    fn for_each_name(&self, f: &mut dyn FnMut(&CName)) {
        match self {
            PiPrefix::In(a) => f(a),
            PiPrefix::Out(a, b) => {
                f(a);
                f(b);
            }
        }
    }
}

impl Process for PiProcess {
    type Action = PiAction;
    type Prefix = PiPrefix;
    const RULE: &'static str = "comm";

    fn view(&self) -> View<'_, Self> {
        match self {
            PiProcess::Nil => View::Nil,
            PiProcess::Ok => View::Ok,
            PiProcess::Par(a, b) => View::Par(a, b),
            PiProcess::Repl(p) => View::Repl(p),
            PiProcess::Res(n, p) => View::Res(n, p),
            PiProcess::Act(a, p) => View::Guard(a, p),
        }
    }

    fn nil() -> Self {
        PiProcess::Nil
    }

    fn ok() -> Self {
        PiProcess::Ok
    }

    fn par(a: Self, b: Self) -> Self {
        PiProcess::new_par(a, b)
    }

    fn repl(p: Self) -> Self {
        PiProcess::new_repl(p)
    }

    fn res(n: Name, p: Self) -> Self {
        PiProcess::new_res(n, p)
    }

    fn guard(a: PiAction, body: Self) -> Self {
        PiProcess::Act(a, Box::new(body))
    }

    fn canon_action(a: &PiAction, resolve: &mut dyn FnMut(&Name) -> CName) -> (PiPrefix, Vec<Name>) {
        match a {
            PiAction::In(x, y) => (PiPrefix::In(resolve(x)), vec![y.clone()]),
            PiAction::Out(x, y) => {
                let x2 = resolve(x);
                (PiPrefix::Out(x2, resolve(y)), Vec::new())
            }
        }
    }

    fn named_action(p: &PiPrefix, resolve: &mut dyn FnMut(&CName) -> Name, binders: &[Name]) -> PiAction {
        match p {
            PiPrefix::In(x) => PiAction::In(resolve(x), binders[0].clone()),
            PiPrefix::Out(x, y) => {
                let x2 = resolve(x);
                PiAction::Out(x2, resolve(y))
            }
        }
    }

    fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(p: &PiProcess, out: &mut BTreeSet<Name>) {
            match p {
                PiProcess::Nil | PiProcess::Ok => {}
                PiProcess::Par(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                PiProcess::Repl(q) => go(q, out),
                PiProcess::Res(n, q) => {
                    out.insert(n.clone());
                    go(q, out);
                }
                PiProcess::Act(PiAction::In(a, b) | PiAction::Out(a, b), q) => {
                    out.insert(a.clone());
                    out.insert(b.clone());
                    go(q, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    fn free_names(&self) -> BTreeSet<Name> {
        match self {
            PiProcess::Nil | PiProcess::Ok => BTreeSet::new(),
            PiProcess::Par(a, b) => {
                let mut s = a.free_names();
                s.extend(b.free_names());
                s
            }
            PiProcess::Repl(p) => p.free_names(),
            PiProcess::Res(n, p) => {
                let mut s = p.free_names();
                s.remove(n);
                s
            }
            PiProcess::Act(PiAction::In(a, b), p) => {
                let mut s = p.free_names();
                s.remove(b);
                s.insert(a.clone());
                s
            }
            PiProcess::Act(PiAction::Out(a, b), p) => {
                let mut s = p.free_names();
                s.insert(a.clone());
                s.insert(b.clone());
                s
            }
        }
    }

    fn rename(&self, sigma: &NameSubstitution) -> Self {
        self.substitute(sigma)
    }

    fn interact(a: &Self, b: &Self) -> Option<(Self, Self)> {
        let recv_send = |r: &PiProcess, s: &PiProcess| match (r, s) {
            (PiProcess::Act(PiAction::In(x, y), p), PiProcess::Act(PiAction::Out(x2, z), q)) if x == x2 => {
                Some((p.substitute(&NameSubstitution::single(y.clone(), z.clone())), (**q).clone()))
            }
            _ => None,
        };
        recv_send(a, b).or_else(|| recv_send(b, a).map(|(p, q)| (q, p)))
    }

    fn guard_barbs(a: &PiAction) -> Vec<(String, Vec<Name>)> {
        match a {
            PiAction::In(x, _) => vec![(format!("in:{x}"), vec![x.clone()])],
            PiAction::Out(x, _) => vec![(format!("out:{x}"), vec![x.clone()])],
        }
    }
}

/// Grammar: `0 | ok | !P | new x. P | a(b).P | a<b>.P | P | P | (P)`;
/// prefixes bind tighter than `|`, and `a<b>` alone abbreviates `a<b>.0`.
pub fn parse(src: &str) -> Result<PiProcess, ParseError> {
    let mut c = Cursor::new(src)?;
    let p = par(&mut c)?;
    c.finish()?;
    Ok(p)
}

fn par(c: &mut Cursor) -> Result<PiProcess, ParseError> {
    let mut p = prefixed(c)?;
    while c.eat(&Tok::Bar) {
        p = PiProcess::new_par(p, prefixed(c)?);
    }
    Ok(p)
}

fn name(c: &mut Cursor) -> Result<Name, ParseError> {
    let col = c.column();
    match c.peek().clone() {
        Tok::Ident(s) => {
            let n = Name::parse(&s).map_err(|e| ParseError::new(col, e.to_string()))?;
            if n.namespace() == Namespace::Reserved {
                return Err(ParseError::new(col, "π names are lowercase"));
            }
            c.bump();
            Ok(n)
        }
        _ => Err(c.unexpected("a name")),
    }
}

fn prefixed(c: &mut Cursor) -> Result<PiProcess, ParseError> {
    match c.peek() {
        Tok::Zero => {
            c.bump();
            Ok(PiProcess::Nil)
        }
        Tok::Check => {
            c.bump();
            Ok(PiProcess::Ok)
        }
        Tok::Bang => {
            c.bump();
            Ok(PiProcess::new_repl(prefixed(c)?))
        }
        Tok::Nu => {
            c.bump();
            let mut names = vec![name(c)?];
            while matches!(c.peek(), Tok::Ident(_)) {
                names.push(name(c)?);
            }
            c.expect(&Tok::Dot)?;
            let body = prefixed(c)?;
            Ok(names.into_iter().rev().fold(body, |p, n| PiProcess::new_res(n, p)))
        }
        Tok::LParen => {
            c.bump();
            let p = par(c)?;
            c.expect(&Tok::RParen)?;
            Ok(p)
        }
        Tok::Ident(_) => {
            let a = name(c)?;
            if c.eat(&Tok::LParen) {
                let b = name(c)?;
                c.expect(&Tok::RParen)?;
                c.expect(&Tok::Dot)?;
                Ok(PiProcess::input(a, b, prefixed(c)?))
            } else if c.eat(&Tok::Lt) {
                let b = name(c)?;
                c.expect(&Tok::Gt)?;
                let body = if c.eat(&Tok::Dot) { prefixed(c)? } else { PiProcess::Nil };
                Ok(PiProcess::output(a, b, body))
            } else {
                Err(c.unexpected("`(` or `<` after a channel name"))
            }
        }
        _ => Err(c.unexpected("a process")),
    }
}

pub fn normal_form(p: &PiProcess) -> PiProcess {
    process::normal_form(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{barbs, interactions, succeeds, ProcessBounds, Success};

    fn p(s: &str) -> PiProcess {
        parse(s).unwrap()
    }

    #[test]
    fn parse_error_column() {
        assert_eq!(parse("a(b.0").unwrap_err().column, 4);
    }

    #[test]
    fn printer_round_trips() {
        for s in ["a(b).b<c>.0", "!a(x).ok | new y. a<y>.0", "a(x).(x<x>.0 | ok)", "!(a<b>.0 | b(c).0)"] {
            assert_eq!(p(s).to_string(), s);
            assert_eq!(parse(&p(s).unicode().to_string()).unwrap(), p(s));
        }
    }

    #[test]
    fn congruent_processes_share_a_normal_form() {
        let pairs = [
            ("a<b>.0 | c(x).0", "c(y).0 | a<b>.0 | 0"),
            ("new x. new y. (x<y>.0 | y(z).0)", "new y. new x. (y(w).0 | x<y>.0)"),
            ("new x. (a<x>.0 | b<x>.0)", "new q. (b<q>.0 | a<q>.0)"),
            ("new x. a<b>.0", "a<b>.0"),
            ("new x. (x<a>.0 | new y. y<a>.0)", "new y. (y<a>.0 | new x. x<a>.0)"),
        ];
        for (l, r) in pairs {
            assert_eq!(normal_form(&p(l)), normal_form(&p(r)), "{l} vs {r}");
        }
        assert_ne!(normal_form(&p("new x. (x<a>.0 | x(y).0)")), normal_form(&p("new x. new z. (x<a>.0 | z(y).0)")));
        assert_ne!(normal_form(&p("a(x).x<b>.0")), normal_form(&p("a(x).c<b>.0")));
    }

    #[test]
    fn tie_breaking_across_threads() {
        // same thread shapes, different sharing of restricted names
        let l = p("new x. new y. (a<x>.0 | a<y>.0 | x<y>.0)");
        let r = p("new u. new v. (v<u>.0 | a<u>.0 | a<v>.0)");
        assert_eq!(normal_form(&l), normal_form(&r));
        let other = p("new u. new v. (u<v>.0 | a<u>.0 | a<u>.0)");
        assert_ne!(normal_form(&l), normal_form(&other));
    }

    #[test]
    fn communication_substitutes() {
        let steps = interactions(&normal_form(&p("a(x).x<c>.0 | a<b>.0")), 2);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].result, normal_form(&p("b<c>.0")));
    }

    #[test]
    fn scope_extrusion() {
        let q = p("a(x).x<c>.0 | new b. (a<b>.0 | b(y).ok)");
        let steps = interactions(&normal_form(&q), 2);
        assert_eq!(steps.len(), 1);
        let next = interactions(&steps[0].result, 2);
        assert_eq!(next[0].result, normal_form(&p("ok")));
    }

    #[test]
    fn replication_unfolds_within_budget() {
        let q = normal_form(&p("!a(x).x<c>.0 | a<b>.0 | a<d>.0"));
        assert_eq!(interactions(&q, 1).len(), 2);
        assert!(interactions(&q, 0).is_empty());
        // a replicated sender and receiver talk through two unfoldings
        let selfish = normal_form(&p("!(a<b>.0 | a(x).ok)"));
        assert_eq!(interactions(&selfish, 1).len(), 1);
        assert_eq!(interactions(&normal_form(&p("!a<b>.0 | !a(x).0")), 1).len(), 1);
        let alone = normal_form(&p("!(a(x).ok) | !(a<b>.0)"));
        assert_eq!(interactions(&alone, 2).len(), 1);
        assert_eq!(interactions(&normal_form(&p("!a<b>.a(x).ok")), 2).len(), 0);
        assert_eq!(interactions(&normal_form(&p("!(a<b>.0 | c(x).0) | c<d>.0")), 2).len(), 1);
        let two = normal_form(&p("!(a<b>.0) | !(a(x).ok)"));
        assert!(interactions(&two, 2).iter().all(|i| i.left.copy <= 1 && i.right.copy <= 1));
    }

    #[test]
    fn success_and_barbs() {
        let b = ProcessBounds::default();
        assert_eq!(succeeds(&p("a(x).ok | a<b>.0"), b), Success::Reached);
        assert_eq!(succeeds(&p("a(x).ok"), b), Success::Never);
        assert_eq!(succeeds(&p("!a<b>.0 | !a(x).a<x>.0"), ProcessBounds { depth: 3, ..b }), Success::NotWithinBounds);
        let bs = barbs(&p("a(x).0 | new c. c<a>.0 | b<a>.0 | !ok"));
        assert_eq!(bs.into_iter().collect::<Vec<_>>(), ["in:a", "ok", "out:b"]);
    }
}
