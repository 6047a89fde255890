use proptest::prelude::*;

use super::testgen;
use super::*;
use crate::alphabet::Alphabet;
use crate::fixtures;
use crate::monoid::TransitionMonoid;
use crate::sequential::SequentialTransducer;

fn reference_f(ab: &Alphabet, w: &[u32]) -> Vec<u32> {
    let s = ab.format_word(w);
    let mut out = String::new();
    for block in s.split('b') {
        out.push_str(block);
        out.push_str(&"b".repeat(block.len()));
    }
    ab.parse_word(&out).unwrap()
}

#[test]
fn identity_then_fig1() {
    let f = fixtures::fig1();
    let id = SequentialTransducer::identity(f.input().clone());
    let c = compose_seq_2w(&id, &f).unwrap();
    for w in f.input().words_up_to(0, 6) {
        assert_eq!(c.run(&w), f.run(&w), "{}", f.input().format_word(&w));
    }
}

#[test]
fn erase_b_then_fig1() {
    let f = fixtures::fig1();
    let e = fixtures::erase_b();
    let c = compose_seq_2w(&e, &f).unwrap();
    let ab = f.input();
    for w in ab.words_up_to(0, 5) {
        let k = w.iter().filter(|&&x| x == 0).count();
        let mut expect = vec![0; k];
        expect.extend(std::iter::repeat_n(1, k));
        assert_eq!(c.run(&w), Some(expect));
        assert_eq!(c.run(&w).map(|o| o.len()), Some(reference_f(ab, &e.run(&w).unwrap()).len()));
    }
    assert!(TransitionMonoid::new(&c).is_aperiodic().aperiodic);
}

#[test]
fn ambiguous_predecessors_are_resolved() {
    // on `a` both states go to 1, so stepping back over an `a` needs the
    // candidate search
    let ab = fixtures::ab();
    let mut s = SequentialTransducer::new(vec!["0".into(), "1".into()], ab.clone(), ab.clone(), 0, vec![true, true]).unwrap();
    s.set_transition(0, 0, 1, vec![0]).unwrap();
    s.set_transition(1, 0, 1, vec![1]).unwrap();
    s.set_transition(0, 1, 0, vec![]).unwrap();
    s.set_transition(1, 1, 0, vec![0, 0]).unwrap();
    let f = fixtures::fig1();
    let c = compose_seq_2w(&s, &f).unwrap();
    assert!(c.state_names().iter().any(|n| n.starts_with("rel[")));
    for w in ab.words_up_to(0, 6) {
        assert_eq!(c.run(&w), s.run(&w).and_then(|v| f.run(&v)), "{}", ab.format_word(&w));
    }
}

#[test]
fn right_sequential_identity() {
    let f = fixtures::fig1();
    let id = SequentialTransducer::identity(f.input().clone());
    let c = compose_right_seq_2w(&id, &f).unwrap();
    for w in f.input().words_up_to(0, 5) {
        assert_eq!(c.run(&w), f.run(&w));
    }
}

#[test]
fn right_sequential_suffix_bit() {
    // marks each letter with whether a `b` occurs strictly to its right
    let ab = fixtures::ab();
    let marked = Alphabet::new(["a0", "a1", "b0", "b1"]).unwrap();
    let mut s = SequentialTransducer::new(vec!["none".into(), "some".into()], ab.clone(), marked.clone(), 0, vec![true, true]).unwrap();
    s.set_transition(0, 0, 0, vec![0]).unwrap();
    s.set_transition(0, 1, 1, vec![2]).unwrap();
    s.set_transition(1, 0, 1, vec![1]).unwrap();
    s.set_transition(1, 1, 1, vec![3]).unwrap();
    // copies the letters whose bit is set
    let mut b = crate::twoway::TwoWayTransducer::new(vec!["go".into()], marked.clone(), ab.clone(), 0, vec![true]).unwrap();
    use crate::twoway::{Move, Sym};
    b.set_transition(0, Sym::Left, 0, vec![], Move::Right).unwrap();
    for (x, out) in [(0, vec![]), (1, vec![0]), (2, vec![]), (3, vec![1])] {
        b.set_transition(0, Sym::Letter(x), 0, out, Move::Right).unwrap();
    }
    let c = compose_right_seq_2w(&s, &b).unwrap();
    for w in ab.words_up_to(0, 5) {
        let last_b = w.iter().rposition(|&x| x == 1);
        let expect: Vec<u32> = w
            .iter()
            .enumerate()
            .filter(|&(i, _)| last_b.is_some_and(|l| i < l))
            .map(|(_, &x)| x)
            .collect();
        assert_eq!(c.run(&w), Some(expect), "{}", ab.format_word(&w));
    }
    assert!(TransitionMonoid::new(&c).is_aperiodic().aperiodic);
}

#[test]
fn composition_checks_inputs() {
    let f = fixtures::fig1();
    let wide = Alphabet::new(["a", "b", "c"]).unwrap();
    let id = SequentialTransducer::identity(wide);
    assert!(matches!(compose_seq_2w(&id, &f), Err(crate::Error::AlphabetMismatch(_))));
    let mut g = f.clone();
    g.set_transition(0, crate::twoway::Sym::Letter(0), 0, vec![0, 0], crate::twoway::Move::Right).unwrap();
    let id = SequentialTransducer::identity(f.input().clone());
    assert!(matches!(compose_seq_2w(&id, &g), Err(crate::Error::NonNormalized(_))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

    #[test]
    fn composition_matches_sequential_then_twoway(
        n in 1usize..4,
        m in 1usize..4,
        tb in proptest::collection::vec(any::<u8>(), 16),
        sb in proptest::collection::vec(any::<u8>(), 12),
    ) {
        let b = testgen::twoway(n, &tb);
        let a = testgen::sequential(m, &sb);
        let c = compose_seq_2w(&a, &b).unwrap();
        let r = compose_right_seq_2w(&a, &b).unwrap();
        for w in b.input().words_up_to(0, 5) {
            prop_assert_eq!(c.run(&w), a.run(&w).and_then(|v| b.run(&v)));
            prop_assert_eq!(r.run(&w), a.run_right(&w).and_then(|v| b.run(&v)));
        }
    }
}

/// States entered right after crossing from `j` to `j + 1` (forward) or
/// from `i` to `i - 1` (backward) on the run from `(q, start)`.
fn crossings(t: &crate::twoway::TwoWayTransducer, w: &[u32], q: u32, start: usize, border: (usize, usize)) -> Vec<u32> {
    use crate::twoway::{Move, Sym};
    let n = w.len();
    let mut seen = std::collections::HashSet::new();
    let (mut q, mut pos) = (q, start);
    let mut out = Vec::new();
    loop {
        if !seen.insert((q, pos)) {
            return out;
        }
        let sym = if pos == 0 { Sym::Left } else if pos == n + 1 { Sym::Right } else { Sym::Letter(w[pos - 1]) };
        if sym == Sym::Right && t.is_final(q) {
            return out;
        }
        let Some(tr) = t.transition(q, sym) else { return out };
        let next = (pos as isize + tr.mv.delta()) as usize;
        if tr.mv != Move::Stay && (pos, next) == border {
            out.push(tr.target);
        }
        q = tr.target;
        pos = next;
    }
}

#[test]
fn reach_decision_matches_runs() {
    let f = fixtures::fig1();
    let m = TransitionMonoid::new(&f);
    let ab = f.input();
    let mut answers: std::collections::HashMap<(ClassTriple, u32, u32, bool), bool> = Default::default();
    let mut checked = 0;
    for w in ab.words_up_to(1, 5) {
        let n = w.len();
        for i in 1..=n {
            for j in i..=n {
                let triple = ClassTriple {
                    pre: m.class_of(&w[..i - 1]),
                    mid: m.class_of(&w[i - 1..j]),
                    suf: m.class_of(&w[j..]),
                };
                for q in 0..3 {
                    let fwd = crossings(&f, &w, q, i, (j, j + 1));
                    let bwd = crossings(&f, &w, q, j, (i, i - 1));
                    for target in 0..3 {
                        for (forward, set) in [(true, &fwd), (false, &bwd)] {
                            let o = if forward { Orientation::Forward } else { Orientation::Backward };
                            let got = reach_decision(&m, triple, q, target, o).unwrap();
                            assert_eq!(got, set.contains(&target), "{} {i} {j} {q} {target} {forward}", ab.format_word(&w));
                            let prev = answers.insert((triple, q, target, forward), got);
                            assert!(prev.is_none_or(|p| p == got));
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 10_000);
    // one letter, state 1 moves right through it and arrives in 1
    let a = m.letter(0);
    let triple = ClassTriple { pre: m.identity(), mid: a, suf: m.identity() };
    assert!(reach_decision(&m, triple, 0, 0, Orientation::Forward).unwrap());
}

#[test]
fn fig1_to_fot() {
    let f = fixtures::fig1();
    let t = twoway_to_fot(&f).unwrap();
    assert_eq!(t.copies().len(), 3);
    let ab = f.input();
    let w = ab.parse_word("aababb").unwrap();
    assert_eq!(ab.format_word(&t.eval(&w).unwrap().unwrap()), "aabbab");
    for w in ab.words_up_to(1, 5) {
        assert_eq!(t.eval(&w).unwrap(), f.run(&w), "{}", ab.format_word(&w));
    }
}

#[test]
fn endmarker_productions_get_anchored_copies() {
    use crate::twoway::{Move, Sym, TwoWayTransducer};
    // `a` on `^`, the `a`s of the input, `b` on `$`, and one more `b` when
    // the last letter is `a`
    let ab = fixtures::ab();
    let mut t = TwoWayTransducer::new(vec!["p".into(), "r".into(), "f".into()], ab.clone(), ab.clone(), 0, vec![false, false, true]).unwrap();
    t.set_transition(0, Sym::Left, 0, vec![0], Move::Right).unwrap();
    t.set_transition(0, Sym::Letter(0), 0, vec![0], Move::Right).unwrap();
    t.set_transition(0, Sym::Letter(1), 0, vec![], Move::Right).unwrap();
    t.set_transition(0, Sym::Right, 1, vec![1], Move::Left).unwrap();
    t.set_transition(1, Sym::Letter(0), 2, vec![1], Move::Right).unwrap();
    t.set_transition(1, Sym::Letter(1), 2, vec![], Move::Right).unwrap();
    let fot = twoway_to_fot(&t).unwrap();
    assert_eq!(fot.copies(), ["p", "r", "f", "p^", "p$"]);
    for w in ab.words_up_to(1, 5) {
        assert_eq!(fot.eval(&w).unwrap(), t.run(&w), "{}", ab.format_word(&w));
    }
}

#[test]
fn to_fot_needs_aperiodic_normalized_machines() {
    assert!(matches!(twoway_to_fot(&fixtures::parity()), Err(crate::Error::NotAperiodic(_))));
    let mut g = fixtures::fig1();
    g.set_transition(0, crate::twoway::Sym::Letter(0), 0, vec![0, 0], crate::twoway::Move::Right).unwrap();
    assert!(matches!(twoway_to_fot(&g), Err(crate::Error::NonNormalized(_))));
}

#[test]
fn example4_to_fo_lookaround() {
    let t = fixtures::example4();
    let la = fot_to_fo_lookaround(&t).unwrap();
    let ab = t.input().clone();
    let w = ab.parse_word("aababb").unwrap();
    assert_eq!(la.run(&w).unwrap(), Some(ab.parse_word("aabbab").unwrap()));
    for w in ab.words_up_to(0, 5) {
        assert_eq!(la.run(&w).unwrap(), t.eval(&w).unwrap(), "{}", ab.format_word(&w));
    }
    la.check_determinism(5).unwrap();
}

#[test]
fn example4_to_sf_lookaround() {
    let t = fixtures::example4();
    let la = fot_to_fo_lookaround(&t).unwrap();
    let sf = fo_la_to_sf_la(&la).unwrap();
    let ab = t.input().clone();
    for w in ab.words_up_to(0, 6) {
        assert_eq!(sf.run(&w).unwrap(), t.eval(&w).unwrap(), "{}", ab.format_word(&w));
    }
    sf.check_determinism(6).unwrap();
}

#[test]
fn example4_to_plain() {
    let t = fixtures::example4();
    let sf = fo_la_to_sf_la(&fot_to_fo_lookaround(&t).unwrap()).unwrap();
    let m = sf_la_to_plain(&sf).unwrap();
    let ab = t.input().clone();
    for w in ab.words_up_to(0, 5) {
        assert_eq!(m.run(&w), t.eval(&w).unwrap(), "{}", ab.format_word(&w));
    }
    let mono = TransitionMonoid::new(&m);
    assert!(mono.is_aperiodic().aperiodic);
}

#[test]
fn fig1_round_trip() {
    let f = fixtures::fig1();
    let t = twoway_to_fot(&f).unwrap();
    let fo = fot_to_fo_lookaround(&t).unwrap();
    let sf = fo_la_to_sf_la(&fo).unwrap();
    let m = sf_la_to_plain(&sf).unwrap();
    for w in f.input().words_up_to(1, 4) {
        assert_eq!(m.run(&w), f.run(&w), "{}", f.input().format_word(&w));
    }
}

#[test]
fn example4_reverse_round_trip() {
    let t = fixtures::example4();
    let m = fot_to_twoway(&t).unwrap();
    let back = twoway_to_fot(&m).unwrap();
    for w in t.input().words_up_to(1, 4) {
        assert_eq!(back.eval(&w).unwrap(), t.eval(&w).unwrap(), "{}", t.input().format_word(&w));
    }
}

