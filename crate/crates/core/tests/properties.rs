//! Invariants over generated terms. Terms come from the seeded generator,
//! so proptest shrinks the seed rather than the term.

use csq_core::calculus::{self, CalculusId, Term};
use csq_core::comb::{self, bracket_abstract, Basis, CalculusDef, CombTerm};
use csq_core::encodings::{milner_encode, pi_to_cpc};
use csq_core::harness::gen::TermGenerator;
use csq_core::lambda::Mode;
use csq_core::name::{FreshSupply, Name, NameSubstitution};
use csq_core::process::{interactions, normal_form, step_at, Process};
use csq_core::trace::{Status, Strategy as Order};
use proptest::prelude::*;

fn term(calc: CalculusId, size: usize, seed: u64) -> Term {
    TermGenerator::new(calc, size, seed).open().generate()
}

fn pi(size: usize, seed: u64) -> csq_core::pi::PiProcess {
    TermGenerator::new(CalculusId::Pi, size, seed).pi()
}

fn calculi() -> impl Strategy<Value = CalculusId> {
    proptest::sample::select(CalculusId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_then_parsing_is_the_identity(calc in calculi(), seed: u64, size in 1usize..9) {
        let t = term(calc, size, seed);
        for unicode in [false, true] {
            let text = t.render(unicode);
            let back = calculus::parse(calc, &text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            // processes print up to structural congruence
            match (&t, &back) {
                (Term::Pi(a), Term::Pi(b)) => prop_assert_eq!(normal_form(a), normal_form(b)),
                (Term::Cpc(a), Term::Cpc(b)) => prop_assert_eq!(normal_form(a), normal_form(b)),
                (Term::Lambda(a), Term::Lambda(b)) => prop_assert!(a.alpha_eq(b), "{} vs {}", a, b),
                _ => prop_assert_eq!(&t, &back),
            }
        }
    }

    #[test]
    fn lambda_canonical_form_ignores_bound_names(seed: u64, size in 1usize..10) {
        let t = TermGenerator::new(CalculusId::Lambda, size, seed).lambda();
        let u = TermGenerator::new(CalculusId::Lambda, size, seed).with_pool(&["p", "q", "r"]).lambda();
        // same shape, different binders: α-equivalent exactly when closed
        if t.is_closed() {
            prop_assert!(t.alpha_eq(&u));
        }
        prop_assert_eq!(t.canonical().canonical(), t.canonical());
        prop_assert!(t.alpha_eq(&t.canonical()));
    }

    #[test]
    fn combinatory_reduction_is_confluent(seed: u64, size in 1usize..9, calc in proptest::sample::select(vec![CalculusId::Sk, CalculusId::Ski, CalculusId::Sf])) {
        let def = calc.combinatory().unwrap();
        let Term::Comb(t) = term(calc, size, seed) else { unreachable!() };
        let left = def.reduce(&t, Order::Leftmost, 200);
        let right = def.reduce(&t, Order::RightToLeft, 200);
        if left.status == Status::NormalForm && right.status == Status::NormalForm {
            prop_assert_eq!(left.last(), right.last());
        }
        // one-step divergences join again
        let succ = def.successors(&t);
        if succ.len() >= 2 && left.status == Status::NormalForm {
            for s in succ {
                let r = def.reduce(&s, Order::Leftmost, 400);
                if r.status == Status::NormalForm {
                    prop_assert_eq!(r.last(), left.last());
                }
            }
        }
    }

    #[test]
    fn lambda_strategies_agree_on_normal_forms(seed: u64, size in 1usize..10) {
        let t = TermGenerator::new(CalculusId::Lambda, size, seed).lambda();
        let a = t.reduce(Mode::FullBeta, Order::Leftmost, 200);
        let b = t.reduce(Mode::FullBeta, Order::RightToLeft, 200);
        if a.status == Status::NormalForm && b.status == Status::NormalForm {
            prop_assert!(a.last().alpha_eq(b.last()), "{} vs {}", a.last(), b.last());
        }
    }

    #[test]
    fn recorded_steps_replay(calc in calculi(), seed: u64, size in 1usize..8) {
        let t = term(calc, size, seed);
        match &t {
            Term::Lambda(l) => {
                let mode = calc.lambda_mode().unwrap();
                let tr = l.reduce(mode, Order::Leftmost, 20);
                let mut cur = l.clone();
                for s in &tr.steps {
                    cur = cur.contract_at(&s.path, mode).unwrap();
                    prop_assert_eq!(&cur, &s.result);
                }
            }
            Term::Comb(c) => {
                let def = calc.combinatory().unwrap();
                let tr = def.reduce(c, Order::RightToLeft, 20);
                let mut cur = c.clone();
                for s in &tr.steps {
                    let (rule, next) = def.contract_at(&cur, &s.path).unwrap();
                    prop_assert_eq!(&rule, &s.rule);
                    cur = next;
                    prop_assert_eq!(&cur, &s.result);
                }
            }
            Term::Pi(p) => {
                for i in interactions(&normal_form(p), 2) {
                    prop_assert_eq!(step_at(p, &i.path(), 2), Some(i.result));
                }
            }
            Term::Cpc(p) => {
                for i in interactions(&normal_form(p), 2) {
                    prop_assert_eq!(step_at(p, &i.path(), 2), Some(i.result));
                }
            }
        }
    }

    #[test]
    fn structural_normal_form_is_idempotent(seed: u64, size in 1usize..10) {
        let p = pi(size, seed);
        let n = normal_form(&p);
        prop_assert_eq!(normal_form(&n), n.clone());
        let q = TermGenerator::new(CalculusId::Cpc, size, seed).cpc();
        let m = normal_form(&q);
        prop_assert_eq!(normal_form(&m), m);
    }

    #[test]
    fn parallel_composition_commutes_up_to_congruence(a: u64, b: u64, size in 1usize..6) {
        let (p, q) = (pi(size, a), pi(size, b));
        prop_assert_eq!(normal_form(&Process::par(p.clone(), q.clone())), normal_form(&Process::par(q, p)));
    }

    #[test]
    fn bracket_abstraction_applied_gives_the_body(seed: u64, leaves in 1usize..8, sf: bool) {
        let (def, basis, ops): (CalculusDef, Basis, &[&str]) =
            if sf { (CalculusDef::sf(), Basis::sf(), &["S", "F"]) } else { (CalculusDef::sk(), Basis::sk(), &["S", "K"]) };
        let mut g = TermGenerator::new(CalculusId::Sk, leaves, seed).with_pool(&["x", "y"]).open();
        let body = g.comb_of(leaves, ops);
        let body_nf = def.reduce(&body, Order::Leftmost, 200);
        prop_assume!(body_nf.status == Status::NormalForm);
        let x = Name::user("x");
        let abs = bracket_abstract(&x, &body, &basis);
        prop_assert!(!abs.vars().contains(&x));
        let applied = CombTerm::apps(abs, [CombTerm::var("z")]);
        let sub = body_nf.last().subst(&[(x, CombTerm::var("z"))].into_iter().collect());
        let want = def.reduce(&sub, Order::Leftmost, 400);
        let got = def.reduce(&applied, Order::Leftmost, 800);
        prop_assert_eq!(got.status, Status::NormalForm);
        prop_assert_eq!(got.last(), want.last());
    }

    #[test]
    fn encodings_commute_with_renaming(seed: u64, size in 1usize..8) {
        let p = pi(size, seed);
        let sigma = NameSubstitution::single(Name::user("a"), Name::user("e"));
        prop_assume!(!p.names().contains(&Name::user("e")));
        prop_assert_eq!(normal_form(&pi_to_cpc(&p.rename(&sigma))), normal_form(&pi_to_cpc(&p).rename(&sigma)));

        let t = TermGenerator::new(CalculusId::LambdaV, size, seed).lambda();
        let (c, d) = (Name::user("c"), Name::user("d"));
        prop_assert_eq!(
            normal_form(&milner_encode(&t, &d)),
            normal_form(&milner_encode(&t, &c).rename(&NameSubstitution::single(c, d)))
        );
    }

    #[test]
    fn fresh_names_avoid_what_they_must(used in proptest::collection::btree_set("[a-z]{1,3}", 0..12)) {
        let names: Vec<Name> = used.iter().map(|s| Name::user(s)).collect();
        let mut supply = FreshSupply::avoiding(&names);
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            let f = supply.fresh(n);
            prop_assert!(!names.contains(&f));
            prop_assert!(seen.insert(f));
        }
    }
}

#[test]
fn sf_contracts_the_factorisation_rules() {
    let sf = CalculusDef::sf();
    for (src, want) in
        [("F F m n", "m"), ("F S m n", "m"), ("F (F F) m n", "n F F"), ("F (S m) n p", "p S m"), ("S x y z", "x z (y z)")]
    {
        let t = comb::parse(src).unwrap();
        let (_, got) = sf.contract_root(&t).unwrap();
        assert_eq!(got.to_string(), want, "{src}");
    }
}
