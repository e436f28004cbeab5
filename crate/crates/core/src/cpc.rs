//! Concurrent pattern calculus: processes interact by unifying the
//! patterns of two cases, each side receiving its own substitution.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::comb::CombTerm;
use crate::name::{FreshSupply, Name, NameSubstitution};
use crate::process::{self, canonicalize, CName, Prefix, Process, Thread, View};
use crate::syntax::{Cursor, ParseError, Tok};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    /// `λx` (`\x`)
    Bind(Name),
    /// `x`
    Var(Name),
    /// `⌜x⌝` (`~x`)
    Protect(Name),
    /// `p • q` (`p * q`)
    Compound(Box<Pattern>, Box<Pattern>),
}

/// Substitution of communicable patterns for names.
pub type PatternSubstitution = BTreeMap<Name, Pattern>;

impl Pattern {
    pub fn compound(l: Pattern, r: Pattern) -> Self {
        Pattern::Compound(Box::new(l), Box::new(r))
    }

    /// Left-associated compound `p₀ • p₁ • …`.
    pub fn chain(parts: impl IntoIterator<Item = Pattern>) -> Self {
        parts.into_iter().reduce(Pattern::compound).expect("a compound needs components")
    }

    pub fn var(name: &str) -> Self {
        Pattern::Var(Name::parse(name).expect("valid name literal"))
    }

    pub fn bind(name: &str) -> Self {
        Pattern::Bind(Name::parse(name).expect("valid name literal"))
    }

    pub fn protect(name: &str) -> Self {
        Pattern::Protect(Name::parse(name).expect("valid name literal"))
    }

    fn each<'a>(&'a self, f: &mut impl FnMut(&'a Pattern)) {
        match self {
            Pattern::Compound(l, r) => {
                l.each(f);
                r.each(f);
            }
            _ => f(self),
        }
    }

    /// Binding names in left-to-right order.
    pub fn binding_names(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.each(&mut |p| {
            if let Pattern::Bind(x) = p {
                out.push(x.clone());
            }
        });
        out
    }

    pub fn variable_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.each(&mut |p| {
            if let Pattern::Var(x) = p {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn protected_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.each(&mut |p| {
            if let Pattern::Protect(x) = p {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Variable and protected names.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = self.variable_names();
        out.extend(self.protected_names());
        out
    }

    /// No binding or protected names, so it may be substituted for a name.
    pub fn is_communicable(&self) -> bool {
        match self {
            Pattern::Var(_) => true,
            Pattern::Bind(_) | Pattern::Protect(_) => false,
            Pattern::Compound(l, r) => l.is_communicable() && r.is_communicable(),
        }
    }

    /// Binding names are pairwise distinct.
    pub fn is_well_formed(&self) -> bool {
        let bs = self.binding_names();
        bs.iter().collect::<BTreeSet<_>>().len() == bs.len()
    }

    /// Number of atoms.
    pub fn size(&self) -> usize {
        match self {
            Pattern::Compound(l, r) => l.size() + r.size(),
            _ => 1,
        }
    }

    /// Applies σ to variable and protected names; a protected name
    /// receives the protected form of its image.
    pub fn subst(&self, sigma: &PatternSubstitution) -> Pattern {
        match self {
            Pattern::Bind(_) => self.clone(),
            Pattern::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| self.clone()),
            Pattern::Protect(x) => sigma.get(x).map_or_else(|| self.clone(), Pattern::protected),
            Pattern::Compound(l, r) => Pattern::compound(l.subst(sigma), r.subst(sigma)),
        }
    }

    /// `⌜p⌝`, protecting every variable of a communicable pattern.
    pub fn protected(&self) -> Pattern {
        match self {
            Pattern::Var(x) | Pattern::Protect(x) => Pattern::Protect(x.clone()),
            Pattern::Bind(_) => self.clone(),
            Pattern::Compound(l, r) => Pattern::compound(l.protected(), r.protected()),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, unicode: bool) -> fmt::Result {
        match self {
            Pattern::Var(x) => write!(f, "{x}"),
            Pattern::Bind(x) => write!(f, "{}{x}", if unicode { "λ" } else { "\\" }),
            Pattern::Protect(x) if unicode => write!(f, "⌜{x}⌝"),
            Pattern::Protect(x) => write!(f, "~{x}"),
            Pattern::Compound(l, r) => {
                l.write(f, unicode)?;
                f.write_str(if unicode { "•" } else { "*" })?;
                if matches!(**r, Pattern::Compound(..)) {
                    f.write_str("(")?;
                    r.write(f, unicode)?;
                    f.write_str(")")
                } else {
                    r.write(f, unicode)
                }
            }
        }
    }

    /// The pattern with binding names erased, for barbs.
    fn shape(&self) -> String {
        match self {
            Pattern::Var(x) => x.to_string(),
            Pattern::Bind(_) => "\\_".into(),
            Pattern::Protect(x) => format!("~{x}"),
            Pattern::Compound(l, r) => format!("({}*{})", l.shape(), r.shape()),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Symmetric pattern unification `{p ‖ q}`: a pair of substitutions,
/// the first for `p`'s binders and the second for `q`'s.
///
/// Names unify when equal (variable or protected, either side); a binder
/// takes any communicable counterpart; compounds unify componentwise.
pub fn unify(p: &Pattern, q: &Pattern) -> Option<(PatternSubstitution, PatternSubstitution)> {
    let mut sp = PatternSubstitution::new();
    let mut sq = PatternSubstitution::new();
    unify_into(p, q, &mut sp, &mut sq).then_some((sp, sq))
}

fn unify_into(p: &Pattern, q: &Pattern, sp: &mut PatternSubstitution, sq: &mut PatternSubstitution) -> bool {
    match (p, q) {
        (Pattern::Var(x) | Pattern::Protect(x), Pattern::Var(y) | Pattern::Protect(y)) => x == y,
        (Pattern::Bind(x), _) if q.is_communicable() => {
            sp.insert(x.clone(), q.clone());
            true
        }
        (_, Pattern::Bind(y)) if p.is_communicable() => {
            sq.insert(y.clone(), p.clone());
            true
        }
        (Pattern::Compound(p1, p2), Pattern::Compound(q1, q2)) => unify_into(p1, q1, sp, sq) && unify_into(p2, q2, sp, sq),
        _ => false,
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CpcProcess {
    Nil,
    Ok,
    Par(Box<CpcProcess>, Box<CpcProcess>),
    Repl(Box<CpcProcess>),
    Res(Name, Box<CpcProcess>),
    /// `p → P`, binding the binding names of `p` in `P`.
    Case(Pattern, Box<CpcProcess>),
}

impl CpcProcess {
    pub fn case(p: Pattern, body: CpcProcess) -> Self {
        CpcProcess::Case(p, Box::new(body))
    }

    /// `p → 0`, written `p`.
    pub fn emit(p: Pattern) -> Self {
        CpcProcess::case(p, CpcProcess::Nil)
    }

    pub fn new_par(a: CpcProcess, b: CpcProcess) -> Self {
        CpcProcess::Par(Box::new(a), Box::new(b))
    }

    pub fn new_res(n: Name, p: CpcProcess) -> Self {
        CpcProcess::Res(n, Box::new(p))
    }

    pub fn new_repl(p: CpcProcess) -> Self {
        CpcProcess::Repl(Box::new(p))
    }

    pub fn size(&self) -> usize {
        match self {
            CpcProcess::Nil | CpcProcess::Ok => 1,
            CpcProcess::Par(a, b) => 1 + a.size() + b.size(),
            CpcProcess::Repl(p) | CpcProcess::Res(_, p) => 1 + p.size(),
            CpcProcess::Case(pat, p) => pat.size() + p.size(),
        }
    }

    /// Capture-avoiding substitution of communicable patterns for names.
    pub fn subst(&self, sigma: &PatternSubstitution) -> CpcProcess {
        if sigma.is_empty() {
            return self.clone();
        }
        match self {
            CpcProcess::Nil | CpcProcess::Ok => self.clone(),
            CpcProcess::Par(a, b) => CpcProcess::new_par(a.subst(sigma), b.subst(sigma)),
            CpcProcess::Repl(p) => CpcProcess::new_repl(p.subst(sigma)),
            CpcProcess::Res(n, p) => {
                let (ns, inner) = rebind(core::slice::from_ref(n), p, sigma);
                CpcProcess::new_res(ns[0].clone(), p.subst(&inner))
            }
            CpcProcess::Case(pat, p) => {
                let binders = pat.binding_names();
                let head = pat.subst(sigma);
                let (fresh, inner) = rebind(&binders, p, sigma);
                let ren: PatternSubstitution = binders
                    .iter()
                    .zip(&fresh)
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| (a.clone(), Pattern::Var(b.clone())))
                    .collect();
                let head = if ren.is_empty() { head } else { rename_binders(&head, &ren) };
                CpcProcess::case(head, p.subst(&inner))
            }
        }
    }

    pub fn unicode(&self) -> impl fmt::Display + '_ {
        Pretty { p: self, unicode: true, abbreviate: false }
    }

    /// Prints complete copies of the SF or SK machine as `<R>` / `<R_SK>`.
    pub fn abbreviated(&self, unicode: bool) -> impl fmt::Display + '_ {
        Pretty { p: self, unicode, abbreviate: true }
    }
}

fn rename_binders(p: &Pattern, ren: &PatternSubstitution) -> Pattern {
    match p {
        Pattern::Bind(x) => match ren.get(x) {
            Some(Pattern::Var(y)) => Pattern::Bind(y.clone()),
            _ => p.clone(),
        },
        Pattern::Compound(l, r) => Pattern::compound(rename_binders(l, ren), rename_binders(r, ren)),
        _ => p.clone(),
    }
}

/// Chooses binder names for `binders` over `body` that the images of
/// `sigma` cannot capture, and the substitution to apply underneath.
fn rebind(binders: &[Name], body: &CpcProcess, sigma: &PatternSubstitution) -> (Vec<Name>, PatternSubstitution) {
    let mut inner: PatternSubstitution =
        sigma.iter().filter(|(k, _)| !binders.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    let fv = body.free_names();
    let image_names: BTreeSet<Name> = inner.iter().filter(|(k, _)| fv.contains(*k)).flat_map(|(_, v)| v.free_names()).collect();
    if binders.iter().all(|b| !image_names.contains(b)) {
        return (binders.to_vec(), inner);
    }
    let mut supply = FreshSupply::avoiding(&body.names());
    supply.avoid_all(&image_names);
    supply.avoid_all(inner.keys().collect::<Vec<_>>());
    let mut out = Vec::with_capacity(binders.len());
    for b in binders {
        if image_names.contains(b) {
            let n = supply.fresh(b);
            inner.insert(b.clone(), Pattern::Var(n.clone()));
            out.push(n);
        } else {
            out.push(b.clone());
        }
    }
    (out, inner)
}

fn collect_par<'a>(p: &'a CpcProcess, out: &mut Vec<&'a CpcProcess>) {
    match p {
        CpcProcess::Par(a, b) => {
            collect_par(a, out);
            collect_par(b, out);
        }
        _ => out.push(p),
    }
}

struct Pretty<'a> {
    p: &'a CpcProcess,
    unicode: bool,
    abbreviate: bool,
}

impl Pretty<'_> {
    fn write(&self, p: &CpcProcess, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match p {
            CpcProcess::Par(..) => {
                let mut parts = Vec::new();
                collect_par(p, &mut parts);
                let mut items: Vec<Result<&CpcProcess, &str>> = parts.into_iter().map(Ok).collect();
                if self.abbreviate {
                    abbreviate_machines(&mut items);
                }
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    match item {
                        Ok(q) => self.write_prefixed(q, f)?,
                        Err(label) => f.write_str(label)?,
                    }
                }
                Ok(())
            }
            _ => self.write_prefixed(p, f),
        }
    }

    fn write_prefixed(&self, p: &CpcProcess, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match p {
            CpcProcess::Nil => f.write_str("0"),
            CpcProcess::Ok => f.write_str(if self.unicode { "✓" } else { "ok" }),
            CpcProcess::Par(..) => {
                f.write_str("(")?;
                self.write(p, f)?;
                f.write_str(")")
            }
            CpcProcess::Repl(q) => {
                f.write_str("!")?;
                self.write_prefixed(q, f)
            }
            CpcProcess::Res(n, q) => {
                if self.unicode {
                    write!(f, "ν{n}. ")?;
                } else {
                    write!(f, "new {n}. ")?;
                }
                self.write_prefixed(q, f)
            }
            CpcProcess::Case(pat, q) => {
                pat.write(f, self.unicode)?;
                if **q != CpcProcess::Nil {
                    f.write_str(if self.unicode { " → " } else { " -> " })?;
                    self.write_prefixed(q, f)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.p, f)
    }
}

/// Replaces each complete α-copy of a machine's threads by its label.
fn abbreviate_machines(items: &mut Vec<Result<&CpcProcess, &str>>) {
    for (label, machine) in [("<R>", sf_machine()), ("<R_SK>", sk_machine())] {
        let mut cases = Vec::new();
        collect_par(&machine, &mut cases);
        let keys: Vec<_> = cases.iter().map(|c| canonicalize(*c)).collect();
        loop {
            let mut used = Vec::new();
            for k in &keys {
                let hit = items.iter().enumerate().position(|(i, it)| {
                    !used.contains(&i) && matches!(it, Ok(q) if matches!(q, CpcProcess::Repl(_)) && canonicalize(*q) == *k)
                });
                match hit {
                    Some(i) => used.push(i),
                    None => break,
                }
            }
            if used.len() < keys.len() {
                break;
            }
            used.sort_unstable();
            for &i in used.iter().rev() {
                let _ = items.remove(i);
            }
            items.push(Err(label));
        }
    }
}

impl fmt::Display for CpcProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Pretty { p: self, unicode: false, abbreviate: false }.write(self, f)
    }
}

impl fmt::Debug for CpcProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical pattern: binders become their position in the guard.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CPattern {
    Bind(u32),
    Var(CName),
    Protect(CName),
    Compound(Box<CPattern>, Box<CPattern>),
}

impl CPattern {
    fn map(&self, f: &mut dyn FnMut(&CName) -> CName) -> Self {
        match self {
            CPattern::Bind(i) => CPattern::Bind(*i),
            CPattern::Var(c) => CPattern::Var(f(c)),
            CPattern::Protect(c) => CPattern::Protect(f(c)),
            CPattern::Compound(l, r) => {
                let l2 = l.map(f);
                CPattern::Compound(Box::new(l2), Box::new(r.map(f)))
            }
        }
    }
}

impl Prefix for CPattern {
    fn binders(&self) -> u32 {
        match self {
            CPattern::Bind(_) => 1,
            CPattern::Compound(l, r) => l.binders() + r.binders(),
            _ => 0,
        }
    }

    fn map_names(&self, f: &mut dyn FnMut(&CName) -> CName) -> Self {
        self.map(f)
    }

    fn for_each_name(&self, f: &mut dyn FnMut(&CName)) {
        match self {
            CPattern::Bind(_) => {}
            CPattern::Var(c) | CPattern::Protect(c) => f(c),
            CPattern::Compound(l, r) => {
                l.for_each_name(f);
                r.for_each_name(f);
            }
        }
    }
}

fn canon_pattern(p: &Pattern, binders: &mut Vec<Name>, resolve: &mut dyn FnMut(&Name) -> CName) -> CPattern {
    match p {
        Pattern::Bind(x) => {
            binders.push(x.clone());
            CPattern::Bind(binders.len() as u32 - 1)
        }
        Pattern::Var(x) => CPattern::Var(resolve(x)),
        Pattern::Protect(x) => CPattern::Protect(resolve(x)),
        Pattern::Compound(l, r) => {
            let l2 = canon_pattern(l, binders, resolve);
            CPattern::Compound(Box::new(l2), Box::new(canon_pattern(r, binders, resolve)))
        }
    }
}

fn named_pattern(p: &CPattern, resolve: &mut dyn FnMut(&CName) -> Name, binders: &[Name]) -> Pattern {
    match p {
        CPattern::Bind(i) => Pattern::Bind(binders[*i as usize].clone()),
        CPattern::Var(c) => Pattern::Var(resolve(c)),
        CPattern::Protect(c) => Pattern::Protect(resolve(c)),
        CPattern::Compound(l, r) => {
            let l2 = named_pattern(l, resolve, binders);
            Pattern::compound(l2, named_pattern(r, resolve, binders))
        }
    }
}

impl Process for CpcProcess {
    type Action = Pattern;
    type Prefix = CPattern;
    const RULE: &'static str = "interact";

    fn view(&self) -> View<'_, Self> {
        match self {
            CpcProcess::Nil => View::Nil,
            CpcProcess::Ok => View::Ok,
            CpcProcess::Par(a, b) => View::Par(a, b),
            CpcProcess::Repl(p) => View::Repl(p),
            CpcProcess::Res(n, p) => View::Res(n, p),
            CpcProcess::Case(pat, p) => View::Guard(pat, p),
        }
    }

    fn nil() -> Self {
        CpcProcess::Nil
    }

    fn ok() -> Self {
        CpcProcess::Ok
    }

    fn par(a: Self, b: Self) -> Self {
        CpcProcess::new_par(a, b)
    }

    fn repl(p: Self) -> Self {
        CpcProcess::new_repl(p)
    }

    fn res(n: Name, p: Self) -> Self {
        CpcProcess::new_res(n, p)
    }

    fn guard(a: Pattern, body: Self) -> Self {
        CpcProcess::case(a, body)
    }

    fn canon_action(a: &Pattern, resolve: &mut dyn FnMut(&Name) -> CName) -> (CPattern, Vec<Name>) {
        let mut binders = Vec::new();
        let c = canon_pattern(a, &mut binders, resolve);
        (c, binders)
    }

    fn named_action(p: &CPattern, resolve: &mut dyn FnMut(&CName) -> Name, binders: &[Name]) -> Pattern {
        named_pattern(p, resolve, binders)
    }

    fn names(&self) -> BTreeSet<Name> {
        fn go(p: &CpcProcess, out: &mut BTreeSet<Name>) {
            match p {
                CpcProcess::Nil | CpcProcess::Ok => {}
                CpcProcess::Par(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                CpcProcess::Repl(q) => go(q, out),
                CpcProcess::Res(n, q) => {
                    out.insert(n.clone());
                    go(q, out);
                }
                CpcProcess::Case(pat, q) => {
                    out.extend(pat.free_names());
                    out.extend(pat.binding_names());
                    go(q, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    fn free_names(&self) -> BTreeSet<Name> {
        match self {
            CpcProcess::Nil | CpcProcess::Ok => BTreeSet::new(),
            CpcProcess::Par(a, b) => {
                let mut s = a.free_names();
                s.extend(b.free_names());
                s
            }
            CpcProcess::Repl(p) => p.free_names(),
            CpcProcess::Res(n, p) => {
                let mut s = p.free_names();
                s.remove(n);
                s
            }
            CpcProcess::Case(pat, p) => {
                let mut s = p.free_names();
                for b in pat.binding_names() {
                    s.remove(&b);
                }
                s.extend(pat.free_names());
                s
            }
        }
    }

    fn rename(&self, sigma: &NameSubstitution) -> Self {
        let s: PatternSubstitution = sigma.iter().map(|(k, v)| (k.clone(), Pattern::Var(v.clone()))).collect();
        self.subst(&s)
    }

    fn interact(a: &Self, b: &Self) -> Option<(Self, Self)> {
        let (CpcProcess::Case(p, pb), CpcProcess::Case(q, qb)) = (a, b) else { return None };
        let (sp, sq) = unify(p, q)?;
        Some((pb.subst(&sp), qb.subst(&sq)))
    }

    fn guard_barbs(a: &Pattern) -> Vec<(String, Vec<Name>)> {
        vec![(format!("case:{}", a.shape()), a.free_names().into_iter().collect())]
    }
}

/// Grammar: `0 | ok | !P | new x. P | pat -> P | pat | <R> | <R_SK> |
/// P | P | (P)` where `pat` is built from `x`, `\x`, `~x` and
/// left-associative `*`. A bare pattern abbreviates `pat -> 0`.
pub fn parse(src: &str) -> Result<CpcProcess, ParseError> {
    let mut c = Cursor::new(src)?;
    let p = par(&mut c)?;
    c.finish()?;
    Ok(p)
}

pub fn parse_pattern(src: &str) -> Result<Pattern, ParseError> {
    let mut c = Cursor::new(src)?;
    let p = pattern(&mut c)?;
    c.finish()?;
    Ok(p)
}

fn par(c: &mut Cursor) -> Result<CpcProcess, ParseError> {
    let mut p = prefixed(c)?;
    while c.eat(&Tok::Bar) {
        p = CpcProcess::new_par(p, prefixed(c)?);
    }
    Ok(p)
}

fn name(c: &mut Cursor) -> Result<Name, ParseError> {
    let col = c.column();
    match c.peek().clone() {
        Tok::Ident(s) => {
            c.bump();
            Name::parse(&s).map_err(|e| ParseError::new(col, e.to_string()))
        }
        _ => Err(c.unexpected("a name")),
    }
}

fn pattern(c: &mut Cursor) -> Result<Pattern, ParseError> {
    let mut p = pattern_atom(c)?;
    while c.eat(&Tok::Star) {
        p = Pattern::compound(p, pattern_atom(c)?);
    }
    Ok(p)
}

fn pattern_atom(c: &mut Cursor) -> Result<Pattern, ParseError> {
    match c.peek() {
        Tok::Backslash => {
            c.bump();
            Ok(Pattern::Bind(name(c)?))
        }
        Tok::Tilde => {
            c.bump();
            Ok(Pattern::Protect(name(c)?))
        }
        Tok::ProtectOpen => {
            c.bump();
            let n = name(c)?;
            c.expect(&Tok::ProtectClose)?;
            Ok(Pattern::Protect(n))
        }
        Tok::LParen => {
            c.bump();
            let p = pattern(c)?;
            c.expect(&Tok::RParen)?;
            Ok(p)
        }
        Tok::Ident(_) => Ok(Pattern::Var(name(c)?)),
        _ => Err(c.unexpected("a pattern")),
    }
}

fn prefixed(c: &mut Cursor) -> Result<CpcProcess, ParseError> {
    match c.peek() {
        Tok::Zero => {
            c.bump();
            Ok(CpcProcess::Nil)
        }
        Tok::Check => {
            c.bump();
            Ok(CpcProcess::Ok)
        }
        Tok::Bang => {
            c.bump();
            Ok(CpcProcess::new_repl(prefixed(c)?))
        }
        Tok::Nu => {
            c.bump();
            let mut names = vec![name(c)?];
            while matches!(c.peek(), Tok::Ident(_)) {
                names.push(name(c)?);
            }
            c.expect(&Tok::Dot)?;
            let body = prefixed(c)?;
            Ok(names.into_iter().rev().fold(body, |p, n| CpcProcess::new_res(n, p)))
        }
        Tok::Lt => {
            c.bump();
            let col = c.column();
            let m = match c.bump() {
                Tok::Ident(s) if s == "R" => sf_machine(),
                Tok::Ident(s) if s == "R_SK" => sk_machine(),
                _ => return Err(ParseError::new(col, "expected `R` or `R_SK`")),
            };
            c.expect(&Tok::Gt)?;
            Ok(m)
        }
        Tok::LParen => {
            // a parenthesised pattern heading a case, or a parenthesised process
            let save = c.save();
            if let Ok(p) = pattern(c) {
                if c.eat(&Tok::Arrow) {
                    return Ok(CpcProcess::case(p, prefixed(c)?));
                }
                if matches!(c.peek(), Tok::Bar | Tok::RParen | Tok::End) {
                    return Ok(CpcProcess::emit(p));
                }
            }
            c.restore(save);
            c.bump();
            let p = par(c)?;
            c.expect(&Tok::RParen)?;
            Ok(p)
        }
        Tok::Ident(_) | Tok::Backslash | Tok::Tilde | Tok::ProtectOpen => {
            let p = pattern(c)?;
            if c.eat(&Tok::Arrow) {
                Ok(CpcProcess::case(p, prefixed(c)?))
            } else {
                Ok(CpcProcess::emit(p))
            }
        }
        _ => Err(c.unexpected("a process")),
    }
}

pub fn normal_form(p: &CpcProcess) -> CpcProcess {
    process::normal_form(p)
}

/// ⌈M⌉: operators become the reserved names `S`/`F`, application
/// becomes compound.
pub fn sf_construction(m: &CombTerm) -> Pattern {
    match m {
        CombTerm::Var(x) | CombTerm::Op(x) => Pattern::Var(x.clone()),
        CombTerm::App(f, a) => Pattern::compound(sf_construction(f), sf_construction(a)),
    }
}

/// Inverse of [`sf_construction`] on communicable patterns.
pub fn read_construction(p: &Pattern) -> Option<CombTerm> {
    match p {
        Pattern::Var(x) if x.namespace() == crate::name::Namespace::Reserved => Some(CombTerm::Op(x.clone())),
        Pattern::Var(x) => Some(CombTerm::Var(x.clone())),
        Pattern::Compound(l, r) => Some(CombTerm::app(read_construction(l)?, read_construction(r)?)),
        _ => None,
    }
}

fn op(s: &str) -> Pattern {
    Pattern::Var(Name::reserved(s))
}

fn v(s: &str) -> Pattern {
    Pattern::var(s)
}

fn b(s: &str) -> Pattern {
    Pattern::bind(s)
}

fn chain<const N: usize>(ps: [Pattern; N]) -> Pattern {
    Pattern::chain(ps)
}

/// `!λc•(lhs) → c•(rhs)`
fn rule_case(lhs: Pattern, rhs: Pattern) -> CpcProcess {
    CpcProcess::new_repl(CpcProcess::case(Pattern::compound(b("c"), lhs), CpcProcess::emit(Pattern::compound(v("c"), rhs))))
}

/// `!λc•(lhs) → νd (d•(u•v•w•x) → d•λz → c•(rhs))`: hands the
/// reducible four-component part to the machine on a private channel and
/// rebuilds the term when the result comes back on it.
fn relay_case(lhs: Pattern, rhs: Pattern) -> CpcProcess {
    let d = Name::user("d");
    let sub = chain([v("u"), v("v"), v("w"), v("x")]);
    let back = CpcProcess::case(Pattern::compound(v("d"), b("z")), CpcProcess::emit(Pattern::compound(v("c"), rhs)));
    CpcProcess::new_repl(CpcProcess::case(
        Pattern::compound(b("c"), lhs),
        CpcProcess::new_res(d, CpcProcess::case(Pattern::compound(v("d"), sub), back)),
    ))
}

fn four_binders() -> Pattern {
    chain([b("u"), b("v"), b("w"), b("x")])
}

fn relays() -> [CpcProcess; 4] {
    [
        relay_case(chain([b("u"), b("v"), b("w"), b("x"), b("y")]), Pattern::compound(v("z"), v("y"))),
        relay_case(chain([b("m"), b("n"), b("o"), four_binders()]), chain([v("m"), v("n"), v("o"), v("z")])),
        relay_case(chain([b("m"), b("n"), four_binders(), b("p")]), chain([v("m"), v("n"), v("z"), v("p")])),
        relay_case(chain([b("m"), four_binders(), b("o"), b("p")]), chain([v("m"), v("z"), v("o"), v("p")])),
    ]
}

/// The cases of the SF-reducing machine, in order: seven rule cases
/// (S, then F on each operator and each factorable form) followed by four
/// relays that reduce a four-component subterm in head position or in one
/// of the three argument positions.
pub fn sf_machine_cases() -> Vec<CpcProcess> {
    sf_machine_cases_with(false)
}

/// `ff_returns_n` makes the `F F` case return its last argument; it
/// exists only to build a deliberately broken machine for mutation testing.
pub(crate) fn sf_machine_cases_with(ff_returns_n: bool) -> Vec<CpcProcess> {
    let mut cases = vec![
        rule_case(chain([op("S"), b("m"), b("n"), b("x")]), chain([v("m"), v("x"), Pattern::compound(v("n"), v("x"))])),
        rule_case(chain([op("F"), op("S"), b("m"), b("n")]), v("m")),
        rule_case(chain([op("F"), op("F"), b("m"), b("n")]), v(if ff_returns_n { "n" } else { "m" })),
        rule_case(chain([op("F"), Pattern::compound(op("S"), b("q")), b("m"), b("n")]), chain([v("n"), op("S"), v("q")])),
        rule_case(chain([op("F"), Pattern::compound(op("F"), b("q")), b("m"), b("n")]), chain([v("n"), op("F"), v("q")])),
        rule_case(
            chain([op("F"), chain([op("S"), b("p"), b("q")]), b("m"), b("n")]),
            chain([v("n"), Pattern::compound(op("S"), v("p")), v("q")]),
        ),
        rule_case(
            chain([op("F"), chain([op("F"), b("p"), b("q")]), b("m"), b("n")]),
            chain([v("n"), Pattern::compound(op("F"), v("p")), v("q")]),
        ),
    ];
    cases.extend(relays());
    cases
}

/// The SF-reducing machine R.
pub fn sf_machine() -> CpcProcess {
    process::par_all(sf_machine_cases())
}

/// The analogous machine for SK: the S case, K on two arguments, K on
/// three arguments (a four-component K redex, which no relay reaches),
/// and the same four relays.
pub fn sk_machine_cases() -> Vec<CpcProcess> {
    let mut cases = vec![
        rule_case(chain([op("S"), b("m"), b("n"), b("x")]), chain([v("m"), v("x"), Pattern::compound(v("n"), v("x"))])),
        rule_case(chain([op("K"), b("x"), b("y")]), v("x")),
        rule_case(chain([op("K"), b("x"), b("y"), b("w")]), Pattern::compound(v("x"), v("w"))),
    ];
    cases.extend(relays());
    cases
}

pub fn sk_machine() -> CpcProcess {
    process::par_all(sk_machine_cases())
}

/// Removes duplicate replicated threads at top level (`!P | !P` behaves
/// as `!P`), so copies of a machine collapse to one.
pub fn collapse_machine(p: &CpcProcess) -> CpcProcess {
    let mut c = canonicalize(p);
    c.threads.dedup_by(|a, b| matches!(a, Thread::Repl(_)) && a == b);
    normal_form(&process::to_named::<CpcProcess>(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{interactions, succeeds, ProcessBounds, Success};

    fn p(s: &str) -> CpcProcess {
        parse(s).unwrap()
    }

    fn pat(s: &str) -> Pattern {
        parse_pattern(s).unwrap()
    }

    #[test]
    fn unification_examples() {
        let (l, r) = unify(&pat("a*b"), &pat("\\x*\\y")).unwrap();
        assert!(l.is_empty());
        assert_eq!(r, BTreeMap::from([(Name::user("x"), pat("a")), (Name::user("y"), pat("b"))]));
        assert!(unify(&pat("\\x"), &pat("\\y*z")).is_none());
        assert!(unify(&pat("\\x"), &pat("\\y")).is_none());
        assert!(unify(&pat("~a"), &pat("a")).is_some());
        assert!(unify(&pat("~a"), &pat("\\x")).is_none());
        assert!(unify(&pat("a*b"), &pat("a")).is_none());
    }

    #[test]
    fn protection_extends_over_compounds() {
        let s = BTreeMap::from([(Name::user("x"), pat("a*b"))]);
        assert_eq!(pat("~x*x").subst(&s), pat("(~a*~b)*(a*b)"));
    }

    #[test]
    fn case_binders_avoid_capture() {
        let q = p("\\y -> x*y");
        let r = q.subst(&BTreeMap::from([(Name::user("x"), pat("y"))]));
        match &r {
            CpcProcess::Case(Pattern::Bind(b), body) => {
                assert_ne!(b, &Name::user("y"));
                assert_eq!(**body, CpcProcess::emit(Pattern::compound(pat("y"), Pattern::Var(b.clone()))));
            }
            _ => panic!("unexpected {r}"),
        }
    }

    #[test]
    fn parse_and_print() {
        for s in ["\\x*~y -> ok", "c*S", "!\\c*(S*\\m) -> c*m | new d. d*(a*b)", "a*b*c | ok", "a*(b*c)"] {
            assert_eq!(p(s).to_string(), s, "{s}");
        }
        assert_eq!(p("(a*b) -> ok"), p("a*b -> ok"));
        assert_eq!(p("(a*b)*c -> 0"), p("a*b*c"));
        assert_eq!(p("(ok | a)"), p("ok | a"));
        assert_eq!(parse(&p("\\x*~y -> ok").unicode().to_string()).unwrap(), p("\\x*~y -> ok"));
    }

    #[test]
    fn machine_abbreviation() {
        let q = CpcProcess::new_par(CpcProcess::emit(pat("c*S")), sf_machine());
        assert_eq!(q.abbreviated(false).to_string(), "c*S | <R>");
        assert_eq!(normal_form(&p("c*S | <R>")).abbreviated(false).to_string(), "c*S | <R>");
        assert_eq!(p("<R_SK>"), sk_machine());
    }

    #[test]
    fn machine_has_eleven_cases_that_never_meet() {
        let cases = sf_machine_cases();
        assert_eq!(cases.len(), 11);
        let guards: Vec<Pattern> = cases
            .iter()
            .map(|c| match c {
                CpcProcess::Repl(b) => match &**b {
                    CpcProcess::Case(p, _) => p.clone(),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            })
            .collect();
        for a in &guards {
            assert!(a.is_well_formed());
            for b in &guards {
                assert!(unify(a, b).is_none());
            }
        }
    }

    #[test]
    fn machine_reduces_encoded_redexes() {
        let sf = crate::comb::CalculusDef::sf();
        for src in ["S S F F", "F F S F", "F S S F", "F (S F) S S", "F (F S) S S", "F (S F S) S S", "F (F S F) S S"] {
            let m = crate::comb::parse(src).unwrap();
            let expected = sf.contract_root(&m).unwrap().1;
            let q = CpcProcess::new_par(CpcProcess::emit(Pattern::compound(pat("c"), sf_construction(&m))), sf_machine());
            let next = interactions(&normal_form(&q), 1);
            assert_eq!(next.len(), 1, "{src}");
            let want =
                CpcProcess::new_par(CpcProcess::emit(Pattern::compound(pat("c"), sf_construction(&expected))), sf_machine());
            assert_eq!(collapse_machine(&next[0].result), collapse_machine(&want), "{src}");
        }
    }

    #[test]
    fn relay_reduces_head_of_five_components() {
        let m = crate::comb::parse("F F S F S").unwrap();
        let q = CpcProcess::new_par(CpcProcess::emit(Pattern::compound(pat("c"), sf_construction(&m))), sf_machine());
        let g = process::explore_process(&q, ProcessBounds::default(), &|s| collapse_machine(&s));
        let want =
            collapse_machine(&CpcProcess::new_par(CpcProcess::emit(Pattern::compound(pat("c"), pat("S*S"))), sf_machine()));
        assert!(g.contains(&want));
        assert!(g.is_complete());
        assert_eq!(g.longest_path(), Some(3));
    }

    #[test]
    fn collapse_removes_duplicate_machines() {
        let two = CpcProcess::new_par(sf_machine(), CpcProcess::new_par(sf_machine(), p("a")));
        assert_eq!(collapse_machine(&two), collapse_machine(&CpcProcess::new_par(sf_machine(), p("a"))));
    }

    #[test]
    fn self_reducer() {
        let b = ProcessBounds::default();
        let q = p("n -> ok");
        assert_eq!(succeeds(&q, b), Success::Never);
        assert_eq!(succeeds(&CpcProcess::new_par(q.clone(), q), b), Success::Reached);
    }
}
