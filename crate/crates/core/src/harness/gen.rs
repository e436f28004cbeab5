//! Seeded term generators. The same seed always yields the same terms.

use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{CalculusId, Term};
use crate::comb::CombTerm;
use crate::cpc::{CpcProcess, Pattern};
use crate::lambda::LambdaTerm;
use crate::name::Name;
use crate::pi::PiProcess;

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// Generates terms of one calculus up to a size bound.
///
/// λ size counts nodes, combinatory size counts leaves, process size
/// counts constructors.
pub struct TermGenerator {
    pub calculus: CalculusId,
    pub max_size: usize,
    /// Names for variables, channels and binders.
    pub pool: Vec<Name>,
    /// Only closed terms (λ and combinatory calculi).
    pub closed: bool,
    rng: ChaCha8Rng,
}

impl TermGenerator {
    pub fn new(calculus: CalculusId, max_size: usize, seed: u64) -> Self {
        let pool = ["x", "y", "z"].iter().map(|s| Name::user(s)).collect();
        Self { calculus, max_size, pool, closed: true, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn with_pool(mut self, pool: &[&str]) -> Self {
        self.pool = pool.iter().map(|s| Name::user(s)).collect();
        self
    }

    pub fn open(mut self) -> Self {
        self.closed = false;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A size between the smallest legal size and `max_size`.
    fn size(&mut self, min: usize) -> usize {
        self.rng.random_range(min..=self.max_size.max(min))
    }

    pub fn generate(&mut self) -> Term {
        match self.calculus {
            CalculusId::Lambda | CalculusId::LambdaV => Term::Lambda(self.lambda()),
            CalculusId::Sk => Term::Comb(self.comb(&["S", "K"])),
            CalculusId::Ski => Term::Comb(self.comb(&["S", "K", "I"])),
            CalculusId::Sf => Term::Comb(self.comb(&["S", "F"])),
            CalculusId::Pi => Term::Pi(self.pi()),
            CalculusId::Cpc => Term::Cpc(self.cpc()),
        }
    }

    pub fn lambda(&mut self) -> LambdaTerm {
        let n = self.size(if self.closed { 2 } else { 1 });
        let mut env = Vec::new();
        self.lambda_of(n, &mut env)
    }

    fn lambda_of(&mut self, n: usize, env: &mut Vec<Name>) -> LambdaTerm {
        let can_var = !(self.closed && env.is_empty());
        // smallest term of a given environment: a variable, or λx.x
        let min = |env: &Vec<Name>| if !self.closed || !env.is_empty() { 1 } else { 2 };
        if n == 1 {
            let pick = if self.closed { env.choose(&mut self.rng) } else { self.pool.choose(&mut self.rng) };
            return LambdaTerm::Var(pick.expect("a variable is in scope").clone());
        }
        let app_ok = n > 2 * min(env);
        if !app_ok || (n >= 2 && self.rng.random_bool(0.4)) || (!can_var && n == 2) {
            let x = self.pool.choose(&mut self.rng).expect("nonempty pool").clone();
            env.push(x.clone());
            let body = self.lambda_of(n - 1, env);
            env.pop();
            return LambdaTerm::abs(x, body);
        }
        let lo = min(env);
        let left = self.rng.random_range(lo..=n - 1 - lo);
        let f = self.lambda_of(left, env);
        let a = self.lambda_of(n - 1 - left, env);
        LambdaTerm::app(f, a)
    }

    /// A combinatory term over the given operators, plus the pool's
    /// variables when not closed.
    pub fn comb(&mut self, ops: &[&str]) -> CombTerm {
        let n = self.size(1);
        self.comb_of(n, ops)
    }

    pub fn comb_of(&mut self, leaves: usize, ops: &[&str]) -> CombTerm {
        if leaves <= 1 {
            let nvars = if self.closed { 0 } else { self.pool.len() };
            let k = self.rng.random_range(0..ops.len() + nvars);
            return match ops.get(k) {
                Some(o) => CombTerm::op(o),
                None => CombTerm::Var(self.pool[k - ops.len()].clone()),
            };
        }
        let left = self.rng.random_range(1..leaves);
        let f = self.comb_of(left, ops);
        let a = self.comb_of(leaves - left, ops);
        CombTerm::app(f, a)
    }

    pub fn pi(&mut self) -> PiProcess {
        let n = self.size(1);
        self.pi_of(n)
    }

    fn pi_of(&mut self, n: usize) -> PiProcess {
        let name = |g: &mut Self| g.pool.choose(&mut g.rng).expect("nonempty pool").clone();
        if n <= 1 {
            return if self.rng.random_bool(0.3) { PiProcess::Ok } else { PiProcess::Nil };
        }
        match self.rng.random_range(0..5) {
            0 if n >= 3 => {
                let left = self.rng.random_range(1..n - 1);
                let a = self.pi_of(left);
                PiProcess::new_par(a, self.pi_of(n - 1 - left))
            }
            1 => PiProcess::new_res(name(self), self.pi_of(n - 1)),
            2 if n >= 3 => PiProcess::new_repl(self.pi_of(n - 1)),
            3 => {
                let (a, b) = (name(self), name(self));
                PiProcess::input(a, b, self.pi_of(n - 1))
            }
            _ => {
                let (a, b) = (name(self), name(self));
                PiProcess::output(a, b, self.pi_of(n - 1))
            }
        }
    }

    pub fn pattern(&mut self, atoms: usize) -> Pattern {
        let mut used = Vec::new();
        self.pattern_of(atoms, &mut used)
    }

    /// Binding names are kept pairwise distinct.
    fn pattern_of(&mut self, atoms: usize, bound: &mut Vec<Name>) -> Pattern {
        if atoms <= 1 {
            let x = self.pool.choose(&mut self.rng).expect("nonempty pool").clone();
            return match self.rng.random_range(0..4) {
                0 if !bound.contains(&x) => {
                    bound.push(x.clone());
                    Pattern::Bind(x)
                }
                1 => Pattern::Protect(x),
                _ => Pattern::Var(x),
            };
        }
        let left = self.rng.random_range(1..atoms);
        let l = self.pattern_of(left, bound);
        Pattern::compound(l, self.pattern_of(atoms - left, bound))
    }

    pub fn cpc(&mut self) -> CpcProcess {
        let n = self.size(1);
        self.cpc_of(n)
    }

    fn cpc_of(&mut self, n: usize) -> CpcProcess {
        if n <= 1 {
            return if self.rng.random_bool(0.3) { CpcProcess::Ok } else { CpcProcess::Nil };
        }
        match self.rng.random_range(0..4) {
            0 if n >= 3 => {
                let left = self.rng.random_range(1..n - 1);
                let a = self.cpc_of(left);
                CpcProcess::new_par(a, self.cpc_of(n - 1 - left))
            }
            1 => {
                let x = self.pool.choose(&mut self.rng).expect("nonempty pool").clone();
                CpcProcess::new_res(x, self.cpc_of(n - 1))
            }
            2 if n >= 3 => CpcProcess::new_repl(self.cpc_of(n - 1)),
            _ => {
                let atoms = self.rng.random_range(1..=n.min(4));
                let p = self.pattern(atoms);
                CpcProcess::case(p, self.cpc_of(n.saturating_sub(atoms).max(1)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_by_seed() {
        let run = |seed| {
            let mut g = TermGenerator::new(CalculusId::LambdaV, 7, seed);
            (0..5).map(|_| g.generate()).collect::<Vec<_>>()
        };
        assert_eq!(run(1), run(1));
        assert_ne!(run(1), run(2));
    }

    #[test]
    fn sizes_and_closedness() {
        let mut g = TermGenerator::new(CalculusId::Lambda, 7, 3);
        for _ in 0..200 {
            let t = g.lambda();
            assert!(t.is_closed() && t.size() <= 7, "{t}");
        }
        let mut g = TermGenerator::new(CalculusId::Sf, 6, 3);
        for _ in 0..200 {
            let t = g.comb(&["S", "F"]);
            assert!(t.is_closed() && t.size() <= 6, "{t}");
        }
        let mut g = TermGenerator::new(CalculusId::Cpc, 8, 3);
        for _ in 0..200 {
            if let Term::Cpc(p) = g.generate() {
                fn wf(p: &CpcProcess) -> bool {
                    match p {
                        CpcProcess::Case(pat, b) => pat.is_well_formed() && wf(b),
                        CpcProcess::Par(a, b) => wf(a) && wf(b),
                        CpcProcess::Repl(q) | CpcProcess::Res(_, q) => wf(q),
                        _ => true,
                    }
                }
                assert!(wf(&p), "{p}");
            }
        }
    }
}
