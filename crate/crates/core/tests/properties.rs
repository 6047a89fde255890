//! Randomized suites, 256 cases each with a fixed seed.

mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use twoway_core::fixtures::{self, ab};
use twoway_core::{
    behaviors, certify_star_free, compile_to_dfa, context_path, eval, BehaviorProfile, Context, Formula, Letter, Outcome,
    Registry, Sym, TransitionMonoid, TwoWayTransducer,
};

fn config() -> Config {
    Config { cases: 256, rng_seed: RngSeed::Fixed(0x2b5e_ed01), failure_persistence: None, ..Config::default() }
}

struct Machine {
    name: &'static str,
    t: TwoWayTransducer,
    m: TransitionMonoid,
}

fn machines() -> &'static [Machine] {
    static CELL: OnceLock<Vec<Machine>> = OnceLock::new();
    CELL.get_or_init(|| {
        common::machines().into_iter().map(|(name, t)| Machine { name, m: TransitionMonoid::new(&t), t }).collect()
    })
}

fn word(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(0u32..2, 0..=max)
}

fn registry() -> &'static Registry {
    static CELL: OnceLock<Registry> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut r = Registry::new();
        r.register("M", Arc::new(TransitionMonoid::new(&fixtures::fig1()))).unwrap();
        r
    })
}

fn var() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["x", "y", "z"])
}

fn atom(classes: bool) -> BoxedStrategy<Formula> {
    let mut leaves = vec![
        (0u32..2, var()).prop_map(|(a, v)| Formula::letter(Sym::Letter(a), v)).boxed(),
        (var(), var()).prop_map(|(u, v)| Formula::le(u, v)).boxed(),
    ];
    if classes {
        leaves.push(
            (0usize..9, var(), var())
                .prop_map(|(e, x, y)| {
                    // the evaluator rejects factors with x > y
                    let atom = Formula::FactorClass { monoid: "M".into(), element: e, x: x.into(), y: y.into() };
                    Formula::and([Formula::le(x, y), atom])
                })
                .boxed(),
        );
        leaves.push(
            (0usize..9, var(), any::<bool>())
                .prop_map(|(e, x, pre)| {
                    let (monoid, x) = ("M".to_string(), x.to_string());
                    if pre {
                        Formula::PrefixClass { monoid, element: e, x }
                    } else {
                        Formula::SuffixClass { monoid, element: e, x }
                    }
                })
                .boxed(),
        );
    }
    prop::strategy::Union::new(leaves).boxed()
}

fn tree(classes: bool, depth: usize) -> BoxedStrategy<Formula> {
    if depth == 0 {
        return atom(classes);
    }
    let inner = || tree(classes, depth - 1);
    prop_oneof![
        1 => atom(classes),
        1 => inner().prop_map(Formula::not),
        2 => prop::collection::vec(inner(), 2..=3).prop_map(Formula::and),
        2 => prop::collection::vec(inner(), 2..=3).prop_map(Formula::or),
        2 => (var(), inner()).prop_map(|(v, f)| Formula::exists(v, f)),
        2 => (var(), inner()).prop_map(|(v, f)| Formula::forall(v, f)),
    ]
    .boxed()
}

/// Formulas whose only free variable is `x`.
fn formula(classes: bool) -> impl Strategy<Value = Formula> {
    let tree = tree(classes, 4);
    (tree, any::<bool>()).prop_map(|(mut f, universal)| {
        for v in ["y", "z"] {
            if f.free_vars().contains(v) {
                f = if universal { Formula::forall(v, f) } else { Formula::exists(v, f) };
            }
        }
        f
    })
}

/// Checks `eval` against the compiled automaton on every marking of every
/// word up to length 4.
fn agree(f: &Formula, classes: bool) -> Result<(), TestCaseError> {
    let r = if classes { registry().clone() } else { Registry::new() };
    let free: Vec<&str> = if f.free_vars().contains("x") { vec!["x"] } else { vec![] };
    let d = compile_to_dfa(f, &free, &ab(), &r, Context::Word).unwrap();
    for w in ab().words_up_to(0, 4) {
        if free.is_empty() {
            prop_assert_eq!(d.accepts(&w).unwrap(), eval(f, &w, &[], &r, Context::Word).unwrap());
            continue;
        }
        for pos in 1..=w.len() {
            let marked: Vec<Letter> = w.iter().enumerate().map(|(i, &a)| a << 1 | u32::from(i + 1 == pos)).collect();
            prop_assert_eq!(d.accepts(&marked).unwrap(), eval(f, &w, &[("x", pos)], &r, Context::Word).unwrap());
        }
    }
    Ok(())
}

fn fold(t: &TwoWayTransducer, w: &[Letter]) -> BehaviorProfile {
    w.iter().fold(BehaviorProfile::identity(t.num_states()), |p, &a| p.glue(&behaviors(t, &[a])))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn glue_agrees_with_direct_behaviors(k in 0usize..4, w in word(6), cut in 0usize..=6) {
        let t = &machines()[k].t;
        let cut = cut.min(w.len());
        let direct = behaviors(t, &w);
        prop_assert_eq!(&behaviors(t, &w[..cut]).glue(&behaviors(t, &w[cut..])), &direct);
        prop_assert_eq!(&fold(t, &w), &direct);
        let m = &machines()[k].m;
        prop_assert_eq!(m.profile(m.class_of(&w)), &direct);
    }

    #[test]
    fn class_of_is_a_morphism(k in 0usize..4, u in word(3), v in word(3)) {
        let m = &machines()[k].m;
        let uv: Vec<Letter> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(m.class_of(&uv), m.product(m.class_of(&u), m.class_of(&v)));
    }

    #[test]
    fn classes_form_a_congruence(k in 0usize..4, u in word(3), x in word(2), y in word(2)) {
        let m = &machines()[k].m;
        // the representative is a second word in the class of `u`
        let v = m.representative(m.class_of(&u)).to_vec();
        prop_assert_eq!(m.class_of(&v), m.class_of(&u));
        let wrap = |mid: &[Letter]| -> Vec<Letter> { x.iter().chain(mid).chain(&y).copied().collect() };
        prop_assert_eq!(m.class_of(&wrap(&u)), m.class_of(&wrap(&v)));
    }

    #[test]
    fn evaluator_agrees_with_compiled_automaton(f in formula(true)) {
        agree(&f, true)?;
    }

    #[test]
    fn first_order_formulas_compile_star_free(f in formula(false)) {
        agree(&f, false)?;
        let free: Vec<&str> = if f.free_vars().contains("x") { vec!["x"] } else { vec![] };
        let cert = certify_star_free(&f, &free, &ab(), &Registry::new(), Context::Word).unwrap();
        prop_assert!(cert.star_free);
    }

    #[test]
    fn context_paths_stabilize_at_the_index(
        k in prop::sample::select(vec![0usize, 1, 3]),
        u in prop::collection::vec(0u32..2, 1..=3),
        v in word(3),
        w in word(3),
    ) {
        let Machine { name, t, m } = &machines()[k];
        let n = m.is_aperiodic().index.unwrap();
        let paths: Vec<_> = [n, n + 1]
            .into_iter()
            .map(|p| {
                let mut word = v.clone();
                for _ in 0..p {
                    word.extend(&u);
                }
                let inner = word.len() - v.len();
                word.extend(&w);
                // endmarkers count as context too
                let positions: Vec<usize> =
                    (0..=v.len()).chain(v.len() + inner + 1..=word.len() + 1).collect();
                match t.simulate(&word).unwrap() {
                    Outcome::Accepted { run, .. } => Some(context_path(&run, &positions)),
                    Outcome::Undefined { .. } => None,
                }
            })
            .collect();
        prop_assert_eq!(paths[0].is_some(), paths[1].is_some(), "{}", name);
        prop_assert_eq!(&paths[0], &paths[1], "{}", name);
    }
}
