//! Small worked examples whose expected values were computed by the
//! independent reducer below and then frozen.

use csq_core::comb::{self, lambda_to_sk, sk_to_sf, CalculusDef};
use csq_core::cpc::{self, collapse_machine, CpcProcess, Pattern};
use csq_core::encodings::{milner_encode, sf_to_cpc, sk_to_cpc};
use csq_core::harness::oracle::{bounded_bisim, BisimVerdict, EquivalenceOracle};
use csq_core::lambda;
use csq_core::name::Name;
use csq_core::process::{explore_process, par_all, ProcessBounds};
use csq_core::trace::{Status, Strategy};

/// A throwaway combinator tree, reduced leftmost-outermost by direct
/// pattern matching on spines. Shares nothing with the library.
#[derive(Clone, PartialEq, Debug)]
enum T {
    A(&'static str),
    Ap(Box<T>, Box<T>),
}

fn ap(f: T, a: T) -> T {
    T::Ap(Box::new(f), Box::new(a))
}

fn atom(t: &T) -> bool {
    matches!(t, T::A(_))
}

fn head_step(t: &T) -> Option<T> {
    let mut args = Vec::new();
    let mut h = t;
    while let T::Ap(f, a) = h {
        args.push((**a).clone());
        h = f;
    }
    args.reverse();
    let T::A(op) = h else { unreachable!() };
    let (n, out) = match (*op, args.as_slice()) {
        ("I", [x, ..]) => (1, x.clone()),
        ("K", [x, _, ..]) => (2, x.clone()),
        ("S", [x, y, z, ..]) => (3, ap(ap(x.clone(), z.clone()), ap(y.clone(), z.clone()))),
        ("F", [o, m, _, ..]) if atom(o) => (3, m.clone()),
        ("F", [T::Ap(p, q), _, n, ..]) if factorable(&T::Ap(p.clone(), q.clone())) => {
            (3, ap(ap(n.clone(), (**p).clone()), (**q).clone()))
        }
        _ => return None,
    };
    Some(args[n..].iter().cloned().fold(out, ap))
}

/// Partially applied operators: S M, S M N, F M, F M N.
fn factorable(t: &T) -> bool {
    let mut k = 0;
    let mut h = t;
    while let T::Ap(f, _) = h {
        k += 1;
        h = f;
    }
    matches!(h, T::A("S") | T::A("F")) && (1..=2).contains(&k)
}

fn step(t: &T) -> Option<T> {
    head_step(t).or_else(|| match t {
        T::Ap(f, a) => step(f).map(|f| ap(f, (**a).clone())).or_else(|| step(a).map(|a| ap((**f).clone(), a))),
        T::A(_) => None,
    })
}

fn oracle_nf(mut t: T) -> T {
    for _ in 0..500 {
        match step(&t) {
            Some(n) => t = n,
            None => return t,
        }
    }
    panic!("oracle did not normalise");
}

fn show(t: &T) -> String {
    match t {
        T::A(s) => s.to_string(),
        T::Ap(f, a) if matches!(**a, T::Ap(..)) => format!("{} ({})", show(f), show(a)),
        T::Ap(f, a) => format!("{} {}", show(f), show(a)),
    }
}

fn lib_nf(def: &CalculusDef, src: &str) -> String {
    let tr = def.reduce(&comb::parse(src).unwrap(), Strategy::Leftmost, 500);
    assert_eq!(tr.status, Status::NormalForm);
    tr.last().to_string()
}

#[test]
fn combinatory_normal_forms() {
    use T::A;
    let (s, k, i, f) = (A("S"), A("K"), A("I"), A("F"));
    let (x, m, n) = (A("x"), A("m"), A("n"));
    let cases: Vec<(CalculusDef, &str, T, &str)> = vec![
        (CalculusDef::ski(), "S I I K", ap(ap(ap(s.clone(), i.clone()), i.clone()), k.clone()), "K K"),
        (CalculusDef::sk(), "S K K x", ap(ap(ap(s.clone(), k.clone()), k.clone()), x.clone()), "x"),
        (
            CalculusDef::sf(),
            "S (F F) (F F) x",
            ap(ap(ap(s.clone(), ap(f.clone(), f.clone())), ap(f.clone(), f.clone())), x.clone()),
            "x",
        ),
        (
            CalculusDef::sf(),
            "F (S (F F)) m n",
            ap(ap(ap(f.clone(), ap(s.clone(), ap(f.clone(), f.clone()))), m.clone()), n.clone()),
            "n S (F F)",
        ),
        (CalculusDef::sk(), "S K S x", ap(ap(ap(s.clone(), k.clone()), s.clone()), x.clone()), "x"),
        (CalculusDef::sf(), "F F S F", ap(ap(ap(f.clone(), f.clone()), s.clone()), f.clone()), "S"),
    ];
    for (def, src, tree, frozen) in cases {
        assert_eq!(show(&oracle_nf(tree)), frozen, "oracle on {src}");
        assert_eq!(lib_nf(&def, src), frozen, "library on {src}");
    }
}

#[test]
fn translations_of_small_terms() {
    let self_app = lambda::parse("\\x. x x").unwrap();
    let sii = lambda_to_sk(&self_app);
    // with I = S K K
    assert_eq!(sii.to_string(), "S (S K K) (S K K)");
    assert_eq!(lib_nf(&CalculusDef::sk(), &format!("({sii}) K")), "K K");

    let id_id = lambda_to_sk(&lambda::parse("(\\x. x) (\\y. y)").unwrap());
    assert_eq!(id_id.to_string(), "S K K (S K K)");
    assert_eq!(lib_nf(&CalculusDef::sk(), &format!("{id_id} z")), "z");

    let sk = comb::parse("S K K x").unwrap();
    assert_eq!(sk_to_sf(&sk).unwrap().to_string(), "S (F F) (F F) x");
}

fn c() -> Name {
    Name::user("c")
}

fn reaches(start: &CpcProcess, n: &str, machine: Vec<CpcProcess>) -> bool {
    let want = collapse_machine(&CpcProcess::new_par(
        CpcProcess::emit(Pattern::compound(Pattern::Var(c()), cpc::sf_construction(&comb::parse(n).unwrap()))),
        par_all(machine),
    ));
    explore_process(start, ProcessBounds { depth: 40, max_states: 20_000, repl_budget: 2 }, &|p: CpcProcess| collapse_machine(&p))
        .contains(&want)
}

#[test]
fn machines_reach_the_construction_of_the_normal_form() {
    for (src, nf) in [("S F", "S F"), ("F F S F", "S")] {
        assert!(reaches(&sf_to_cpc(&comb::parse(src).unwrap(), &c()), nf, cpc::sf_machine_cases()), "{src}");
    }
    for (src, nf) in [("K", "K"), ("K S F", "S"), ("S K K S", "S")] {
        assert!(reaches(&sk_to_cpc(&comb::parse(src).unwrap(), &c()), nf, cpc::sk_machine_cases()), "{src}");
    }
}

#[test]
fn milner_image_of_a_redex_reaches_the_image_of_its_reduct() {
    let redex = milner_encode(&lambda::parse("(\\x. x) (\\y. y)").unwrap(), &c());
    let reduct = milner_encode(&lambda::parse("\\y. y").unwrap(), &c());
    let g = explore_process(&redex, ProcessBounds::default(), &|p| p);
    assert!(g.is_complete());
    let oracle = EquivalenceOracle::default();
    assert!(g.states.iter().any(|s| matches!(bounded_bisim(s, &reduct, oracle), BisimVerdict::EquivalentToDepth(_))));
    assert!(g.states.len() > 1);
}
