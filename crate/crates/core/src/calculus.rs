//! Calculus identifiers and a term type spanning all of them.

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use crate::comb::{self, CalculusDef, CombError, CombTerm};
use crate::cpc::{self, CpcProcess};
use crate::lambda::{self, LambdaTerm, Mode};
use crate::pi::{self, PiProcess};
use crate::syntax::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CalculusId {
    Lambda,
    LambdaV,
    Sk,
    Ski,
    Sf,
    Pi,
    Cpc,
}

impl CalculusId {
    pub const ALL: [CalculusId; 7] = [
        CalculusId::Lambda,
        CalculusId::LambdaV,
        CalculusId::Sk,
        CalculusId::Ski,
        CalculusId::Sf,
        CalculusId::Pi,
        CalculusId::Cpc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CalculusId::Lambda => "lambda",
            CalculusId::LambdaV => "lambda-v",
            CalculusId::Sk => "sk",
            CalculusId::Ski => "ski",
            CalculusId::Sf => "sf",
            CalculusId::Pi => "pi",
            CalculusId::Cpc => "cpc",
        }
    }

    /// The rewrite system of a combinatory calculus.
    pub fn combinatory(self) -> Option<CalculusDef> {
        match self {
            CalculusId::Sk => Some(CalculusDef::sk()),
            CalculusId::Ski => Some(CalculusDef::ski()),
            CalculusId::Sf => Some(CalculusDef::sf()),
            _ => None,
        }
    }

    /// The reduction mode of a λ-calculus.
    pub fn lambda_mode(self) -> Option<Mode> {
        match self {
            CalculusId::Lambda => Some(Mode::FullBeta),
            CalculusId::LambdaV => Some(Mode::CallByValue),
            _ => None,
        }
    }

    pub fn is_process_calculus(self) -> bool {
        matches!(self, CalculusId::Pi | CalculusId::Cpc)
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown calculus `{0}` (expected lambda, lambda-v, sk, ski, sf, pi or cpc)")]
pub struct UnknownCalculus(pub String);

impl FromStr for CalculusId {
    type Err = UnknownCalculus;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CalculusId::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| UnknownCalculus(s.to_string()))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Lambda(LambdaTerm),
    Comb(CombTerm),
    Pi(PiProcess),
    Cpc(CpcProcess),
}

impl Term {
    /// Surface syntax; CPC output abbreviates machine copies as `<R>`.
    pub fn render(&self, unicode: bool) -> String {
        match (self, unicode) {
            (Term::Lambda(t), true) => t.unicode().to_string(),
            (Term::Lambda(t), false) => t.to_string(),
            (Term::Comb(t), _) => t.to_string(),
            (Term::Pi(p), true) => p.unicode().to_string(),
            (Term::Pi(p), false) => p.to_string(),
            (Term::Cpc(p), u) => p.abbreviated(u).to_string(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Comb(#[from] CombError),
}

impl TermError {
    pub fn column(&self) -> Option<usize> {
        match self {
            TermError::Parse(e) => Some(e.column),
            TermError::Comb(_) => None,
        }
    }
}

pub fn parse(calculus: CalculusId, src: &str) -> Result<Term, TermError> {
    Ok(match calculus {
        CalculusId::Lambda | CalculusId::LambdaV => Term::Lambda(lambda::parse(src)?),
        CalculusId::Sk | CalculusId::Ski | CalculusId::Sf => {
            let t = comb::parse(src)?;
            calculus.combinatory().expect("combinatory calculus").check_operators(&t)?;
            Term::Comb(t)
        }
        CalculusId::Pi => Term::Pi(pi::parse(src)?),
        CalculusId::Cpc => Term::Cpc(cpc::parse(src)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for c in CalculusId::ALL {
            assert_eq!(c.as_str().parse::<CalculusId>().unwrap(), c);
        }
        assert!("cbv".parse::<CalculusId>().is_err());
    }

    #[test]
    fn operators_are_checked() {
        assert!(parse(CalculusId::Sk, "S K K").is_ok());
        assert!(matches!(parse(CalculusId::Sf, "S K"), Err(TermError::Comb(_))));
        assert_eq!(parse(CalculusId::Pi, "a(b.0").unwrap_err().column(), Some(4));
    }
}
