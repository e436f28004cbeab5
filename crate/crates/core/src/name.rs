//! Names shared by every calculus.
//!
//! A name lives in one of three namespaces. User names are what people
//! write (`x`, `chan`), reserved names are the operator symbols and other
//! identifiers the translations need for themselves (`S`, `F`, `K`, `N`),
//! and fresh names are minted by a [`FreshSupply`] (`x'3`). Because the
//! namespaces are disjoint, a translation can introduce reserved or fresh
//! names without ever colliding with user input.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    User,
    Reserved,
    Fresh,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    ns: Namespace,
    text: Arc<str>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("`{0}` is not a valid user name (expected a lowercase identifier)")]
    BadUser(String),
    #[error("`{0}` is not a valid reserved name (expected an uppercase identifier)")]
    BadReserved(String),
    #[error("`{0}` is not a valid fresh name (expected ident'digits)")]
    BadFresh(String),
}

fn is_ident_tail(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_user_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(is_ident_tail)
}

fn is_reserved_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_uppercase()) && cs.all(is_ident_tail)
}

fn split_fresh(s: &str) -> Option<(&str, &str)> {
    let (base, idx) = s.rsplit_once('\'')?;
    let base_ok = is_user_ident(base) || is_reserved_ident(base);
    let idx_ok = !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit());
    (base_ok && idx_ok).then_some((base, idx))
}

impl Name {
    pub fn try_user(text: &str) -> Result<Self, NameError> {
        if is_user_ident(text) {
            Ok(Self { ns: Namespace::User, text: text.into() })
        } else {
            Err(NameError::BadUser(text.into()))
        }
    }

    pub fn try_reserved(text: &str) -> Result<Self, NameError> {
        if is_reserved_ident(text) {
            Ok(Self { ns: Namespace::Reserved, text: text.into() })
        } else {
            Err(NameError::BadReserved(text.into()))
        }
    }

    /// Parses the printed form of a fresh name, e.g. `x'12`.
    pub fn try_fresh(text: &str) -> Result<Self, NameError> {
        match split_fresh(text) {
            Some(_) => Ok(Self { ns: Namespace::Fresh, text: text.into() }),
            None => Err(NameError::BadFresh(text.into())),
        }
    }

    /// Panics on an invalid identifier; meant for literals in code.
    pub fn user(text: &str) -> Self {
        Self::try_user(text).expect("invalid user name literal")
    }

    /// Panics on an invalid identifier; meant for literals in code.
    pub fn reserved(text: &str) -> Self {
        Self::try_reserved(text).expect("invalid reserved name literal")
    }

    /// Reads any printed name back into its namespace.
    pub fn parse(text: &str) -> Result<Self, NameError> {
        if text.contains('\'') {
            Self::try_fresh(text)
        } else if is_reserved_ident(text) {
            Self::try_reserved(text)
        } else {
            Self::try_user(text)
        }
    }

    fn fresh_from(base: &str, idx: u32) -> Self {
        Self { ns: Namespace::Fresh, text: format!("{base}'{idx}").into() }
    }

    pub fn namespace(&self) -> Namespace {
        self.ns
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// The identifier with any fresh-name suffix stripped.
    pub fn base(&self) -> &str {
        match self.ns {
            Namespace::Fresh => split_fresh(&self.text).map_or(&*self.text, |(b, _)| b),
            _ => &self.text,
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Source of names guaranteed to avoid a growing set of names in use.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    counter: u32,
    avoid: BTreeSet<Name>,
}

impl FreshSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Name>) -> Self {
        let mut s = Self::new();
        s.avoid_all(names);
        s
    }

    pub fn avoid(&mut self, name: &Name) {
        self.avoid.insert(name.clone());
    }

    pub fn avoid_all<'a>(&mut self, names: impl IntoIterator<Item = &'a Name>) {
        self.avoid.extend(names.into_iter().cloned());
    }

    /// A fresh name whose printed form keeps `hint`'s base for readability.
    pub fn fresh(&mut self, hint: &Name) -> Name {
        self.fresh_base(hint.base())
    }

    pub fn fresh_base(&mut self, base: &str) -> Name {
        loop {
            let n = Name::fresh_from(base, self.counter);
            self.counter += 1;
            if self.avoid.insert(n.clone()) {
                return n;
            }
        }
    }
}

/// The renaming policy φ used by the name-invariance criterion.
///
/// Every translation here maps a source name to itself: reserved and fresh
/// names live in their own namespaces, so the identity is already injective
/// and no source name can collide with a name a translation introduces.
pub fn rename_policy(name: &Name) -> [Name; 1] {
    [name.clone()]
}

/// A finite map from names to names; names outside the domain map to
/// themselves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameSubstitution {
    map: BTreeMap<Name, Name>,
}

impl NameSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(from: Name, to: Name) -> Self {
        let mut s = Self::new();
        s.insert(from, to);
        s
    }

    pub fn insert(&mut self, from: Name, to: Name) {
        self.map.insert(from, to);
    }

    pub fn remove(&mut self, name: &Name) -> Option<Name> {
        self.map.remove(name)
    }

    pub fn get(&self, name: &Name) -> Option<&Name> {
        self.map.get(name)
    }

    pub fn apply(&self, name: &Name) -> Name {
        self.map.get(name).unwrap_or(name).clone()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Name)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    pub fn range(&self) -> impl Iterator<Item = &Name> {
        self.map.values()
    }

    /// Injectivity of the total map on all names (identity off the domain).
    pub fn is_injective(&self) -> bool {
        let images: BTreeSet<&Name> = self.map.values().collect();
        // an image outside the domain would also be its own identity image
        images.len() == self.map.len() && self.map.iter().all(|(k, v)| k == v || self.map.contains_key(v))
    }

    /// Injectivity restricted to `names`.
    pub fn is_injective_on<'a>(&self, names: impl IntoIterator<Item = &'a Name>) -> bool {
        let mut seen = BTreeSet::new();
        names.into_iter().all(|n| seen.insert(self.apply(n)))
    }

    /// The same substitution with `without` removed from the domain.
    pub fn without(&self, without: &Name) -> Self {
        let mut s = self.clone();
        s.map.remove(without);
        s
    }

    /// Every name mentioned on either side.
    pub fn names(&self) -> BTreeSet<Name> {
        self.map.iter().flat_map(|(k, v)| [k.clone(), v.clone()]).collect()
    }
}

impl FromIterator<(Name, Name)> for NameSubstitution {
    fn from_iter<I: IntoIterator<Item = (Name, Name)>>(iter: I) -> Self {
        Self { map: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn namespaces_separate_equal_text() {
        let x = Name::user("x");
        assert_eq!(x, Name::user("x"));
        assert_ne!(Name::reserved("S"), Name::try_user("S").unwrap_or(x.clone()));
        assert!(Name::try_user("S").is_err());
        assert!(Name::try_reserved("s").is_err());
    }

    #[test]
    fn parse_reads_printed_forms() {
        assert_eq!(Name::parse("x").unwrap().namespace(), Namespace::User);
        assert_eq!(Name::parse("N").unwrap().namespace(), Namespace::Reserved);
        let f = Name::parse("y'12").unwrap();
        assert_eq!(f.namespace(), Namespace::Fresh);
        assert_eq!(f.base(), "y");
        assert!(Name::parse("y'").is_err());
        assert!(Name::parse("'3").is_err());
    }

    #[test]
    fn fresh_avoids_given_names() {
        let taken = Name::parse("x'0").unwrap();
        let mut s = FreshSupply::avoiding([&taken]);
        let a = s.fresh(&Name::user("x"));
        let b = s.fresh(&Name::user("x"));
        assert_ne!(a, taken);
        assert_ne!(a, b);
        assert_eq!(a.namespace(), Namespace::Fresh);
    }

    #[test]
    fn injectivity() {
        let (x, y, z) = (Name::user("x"), Name::user("y"), Name::user("z"));
        let swap: NameSubstitution = [(x.clone(), y.clone()), (y.clone(), x.clone())].into_iter().collect();
        assert!(swap.is_injective());
        let onto: NameSubstitution = [(x.clone(), y.clone())].into_iter().collect();
        assert!(!onto.is_injective());
        assert!(onto.is_injective_on([&x, &z]));
        assert!(!onto.is_injective_on([&x, &y]));
    }
}
