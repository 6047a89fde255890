//! From star-free look-around transducers to plain two-way transducers.
//!
//! A left-to-right annotator writes, next to each letter, one bit per prefix
//! language: does the part strictly before this position belong to it. A
//! right-to-left annotator does the same for suffix languages. The core
//! machine then resolves every test from the letter under its head. Tests on
//! `^` and `$` look at the neighbouring cell, using quotients of the test
//! languages by the neighbour's letter.

use std::collections::{BTreeSet, HashMap};

use super::compose::{compose_right_seq_2w, compose_seq_2w};
use crate::alphabet::{Alphabet, Letter};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::lookaround::{SfLookAroundTransducer, SfTransition};
use crate::sequential::{SeqState, SequentialTransducer};
use crate::twoway::{Move, State, Sym, TwoWayTransducer};

/// Default bound on the number of enrichment bits.
pub const DEFAULT_TEST_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bit {
    Always(bool),
    Index(usize),
}

impl Bit {
    fn holds(self, bits: &[bool]) -> bool {
        match self {
            Bit::Always(b) => b,
            Bit::Index(i) => bits[i],
        }
    }
}

#[derive(Default)]
struct Bits {
    list: Vec<Dfa>,
}

impl Bits {
    fn of(&mut self, d: &Dfa) -> Bit {
        if d.is_empty() {
            return Bit::Always(false);
        }
        if d.accepts_all() {
            return Bit::Always(true);
        }
        let d = d.minimize();
        match self.list.iter().position(|l| *l == d) {
            Some(i) => Bit::Index(i),
            None => {
                self.list.push(d);
                Bit::Index(self.list.len() - 1)
            }
        }
    }
}

/// Condition on the enrichment of one cell.
#[derive(Clone, Copy, Debug)]
struct Cond {
    pre: Bit,
    suf: Bit,
}

impl Cond {
    fn holds(self, pre: &[bool], suf: &[bool]) -> bool {
        self.pre.holds(pre) && self.suf.holds(suf)
    }
}

enum Guard {
    /// Decided at the current cell.
    Here(Cond),
    /// Decided at the neighbouring cell, one condition per neighbour letter,
    /// then one for the opposite endmarker.
    Peek(Vec<Cond>),
}

/// `L a⁻¹ = { v : va ∈ L }`.
fn right_quotient(l: &Dfa, a: Letter) -> Dfa {
    let finals = (0..l.num_states() as u32).map(|s| l.is_final(l.step(s, a))).collect();
    l.with_finals(finals)
}

/// `a⁻¹ L = { v : av ∈ L }`.
fn left_quotient(l: &Dfa, a: Letter) -> Dfa {
    l.with_initial(l.step(l.initial(), a))
}

fn accepts_empty(l: &Dfa) -> bool {
    l.is_final(l.initial())
}

/// Reachable state tuples of a product of automata, and the product's
/// transition function on them.
fn product(alphabet: &Alphabet, parts: &[Dfa]) -> (Vec<Vec<u32>>, Dfa) {
    let start: Vec<u32> = parts.iter().map(Dfa::initial).collect();
    let (dfa, keys) = Dfa::explore(
        alphabet,
        start,
        |k: &Vec<u32>, a| k.iter().zip(parts).map(|(&s, d)| d.step(s, a)).collect(),
        |_| false,
    );
    (keys, dfa)
}

fn membership(key: &[u32], parts: &[Dfa]) -> Vec<bool> {
    key.iter().zip(parts).map(|(&s, d)| d.is_final(s)).collect()
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Plain two-way transducer equivalent to `t`, with the default cap on
/// enrichment bits.
pub fn sf_la_to_plain(t: &SfLookAroundTransducer) -> Result<TwoWayTransducer> {
    sf_la_to_plain_with_cap(t, DEFAULT_TEST_CAP)
}

pub fn sf_la_to_plain_with_cap(t: &SfLookAroundTransducer, cap: usize) -> Result<TwoWayTransducer> {
    let ab = t.input();
    let k = ab.len();
    let langs = t.languages();
    let (mut pre, mut suf) = (Bits::default(), Bits::default());
    let guards: Vec<Guard> = t
        .transitions()
        .iter()
        .map(|tr| {
            let (lp, ls) = (&langs[tr.test.prefix], &langs[tr.test.suffix]);
            match tr.test.sym {
                Sym::Letter(_) => Guard::Here(Cond { pre: pre.of(lp), suf: suf.of(ls) }),
                Sym::Left => {
                    let p = Bit::Always(accepts_empty(lp));
                    let mut v: Vec<Cond> = ab.letters().map(|a| Cond { pre: p, suf: suf.of(&left_quotient(ls, a)) }).collect();
                    v.push(Cond { pre: p, suf: Bit::Always(accepts_empty(ls)) });
                    Guard::Peek(v)
                }
                Sym::Right => {
                    let s = Bit::Always(accepts_empty(ls));
                    let mut v: Vec<Cond> = ab.letters().map(|a| Cond { pre: pre.of(&right_quotient(lp, a)), suf: s }).collect();
                    v.push(Cond { pre: Bit::Always(accepts_empty(lp)), suf: s });
                    Guard::Peek(v)
                }
            }
        })
        .collect();
    let found = pre.list.len() + suf.list.len();
    if found > cap {
        return Err(Error::TooManyTests { found, cap });
    }

    // left annotator: A -> C1 = (a, prefix bits)
    let (pkeys, pdfa) = product(ab, &pre.list);
    let pbits: Vec<Vec<bool>> = pkeys.iter().map(|key| membership(key, &pre.list)).collect();
    let c1: Vec<(Letter, Vec<bool>)> = ab
        .letters()
        .flat_map(|a| pbits.iter().map(move |b| (a, b.clone())))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let c1_index: HashMap<&(Letter, Vec<bool>), Letter> = c1.iter().zip(0..).collect();
    let c1_alphabet = Alphabet::new(c1.iter().map(|(a, b)| format!("{}.{}", ab.symbol(*a), bit_string(b))))?;
    let names = (0..pkeys.len()).map(|i| format!("p{i}")).collect();
    let mut left = SequentialTransducer::new(names, ab.clone(), c1_alphabet.clone(), 0, vec![true; pkeys.len()])?;
    for s in 0..pkeys.len() as SeqState {
        for a in ab.letters() {
            let letter = c1_index[&(a, pbits[s as usize].clone())];
            left.set_transition(s, a, pdfa.step(s, a), vec![letter])?;
        }
    }

    // right annotator: C1 -> C2 = (c1, suffix bits), reading from the right
    let reversed: Vec<Dfa> = suf.list.iter().map(Dfa::reverse).collect();
    let (skeys, sdfa) = product(ab, &reversed);
    let sbits: Vec<Vec<bool>> = skeys.iter().map(|key| membership(key, &reversed)).collect();
    let sdistinct: Vec<Vec<bool>> = sbits.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut c2: Vec<(Letter, Vec<bool>, Vec<bool>)> = Vec::new();
    let mut c2_index: HashMap<(Letter, &[bool]), Letter> = HashMap::new();
    for (ci, (a, p)) in c1.iter().enumerate() {
        for s in &sdistinct {
            c2_index.insert((ci as Letter, s.as_slice()), c2.len() as Letter);
            c2.push((*a, p.clone(), s.clone()));
        }
    }
    let c2_alphabet = Alphabet::new(
        c2.iter()
            .map(|(a, p, s)| format!("{}.{}.{}", ab.symbol(*a), bit_string(p), bit_string(s))),
    )?;
    let names = (0..skeys.len()).map(|i| format!("s{i}")).collect();
    let mut right = SequentialTransducer::new(names, c1_alphabet.clone(), c2_alphabet.clone(), 0, vec![true; skeys.len()])?;
    for s in 0..skeys.len() as SeqState {
        for (ci, (a, _)) in c1.iter().enumerate() {
            let letter = c2_index[&(ci as Letter, sbits[s as usize].as_slice())];
            right.set_transition(s, ci as Letter, sdfa.step(s, *a), vec![letter])?;
        }
    }

    let core = Core::build(t, &guards, &c2, c2_alphabet, k)?;
    let inner = compose_right_seq_2w(&right, &core.normalize())?;
    Ok(compose_seq_2w(&left, &inner)?.reduce())
}

struct Core<'a> {
    t: &'a SfLookAroundTransducer,
    names: Vec<String>,
    finals: Vec<bool>,
    extra: HashMap<String, State>,
    rows: Vec<(State, Sym, State, Vec<Letter>, Move)>,
}

impl<'a> Core<'a> {
    fn state(&mut self, name: String) -> State {
        if let Some(&s) = self.extra.get(&name) {
            return s;
        }
        let mut unique = name.clone();
        while self.names.contains(&unique) {
            unique.push('\'');
        }
        self.names.push(unique);
        self.finals.push(false);
        let s = (self.names.len() - 1) as State;
        self.extra.insert(name, s);
        s
    }

    fn pick(&self, q: State, enabled: Vec<usize>, at: &str) -> Result<Option<usize>> {
        match enabled.as_slice() {
            [] => Ok(None),
            [i] => Ok(Some(*i)),
            _ => Err(Error::DeterminismViolation(format!(
                "{} tests of state `{}` hold together at {at}",
                enabled.len(),
                self.t.state_names()[q as usize]
            ))),
        }
    }

    fn fire(&mut self, from: State, sym: Sym, i: usize) {
        let tr: &SfTransition = &self.t.transitions()[i];
        self.rows.push((from, sym, tr.target, tr.output.clone(), tr.mv));
    }

    fn build(
        t: &'a SfLookAroundTransducer,
        guards: &'a [Guard],
        c2: &[(Letter, Vec<bool>, Vec<bool>)],
        c2_alphabet: Alphabet,
        k: usize,
    ) -> Result<TwoWayTransducer> {
        let n = t.num_states();
        let mut core = Core {
            t,
            names: t.state_names().to_vec(),
            finals: (0..n as State).map(|q| t.is_final(q)).collect(),
            extra: HashMap::new(),
            rows: Vec::new(),
        };
        let from_q = |q: State, sym: Sym| -> Vec<usize> {
            (0..t.transitions().len())
                .filter(|&i| t.transitions()[i].from == q && t.transitions()[i].test.sym == sym)
                .collect()
        };
        for q in 0..n as State {
            for (l, (a, p, s)) in c2.iter().enumerate() {
                let enabled = from_q(q, Sym::Letter(*a))
                    .into_iter()
                    .filter(|&i| matches!(guards[i], Guard::Here(c) if c.holds(p, s)))
                    .collect();
                if let Some(i) = core.pick(q, enabled, "a letter")? {
                    core.fire(q, Sym::Letter(l as Letter), i);
                }
            }
            for (end, toward) in [(Sym::Left, Move::Right), (Sym::Right, Move::Left)] {
                if end == Sym::Right && t.is_final(q) {
                    continue;
                }
                let cands = from_q(q, end);
                if cands.is_empty() {
                    continue;
                }
                let enabled_at = |nb: usize, p: &[bool], s: &[bool]| -> Vec<usize> {
                    cands
                        .iter()
                        .copied()
                        .filter(|&i| matches!(&guards[i], Guard::Peek(v) if v[nb].holds(p, s)))
                        .collect()
                };
                let (ep, es): (Vec<bool>, Vec<bool>) = (Vec::new(), Vec::new());
                let mut outcomes: Vec<(Option<Sym>, Vec<usize>)> =
                    c2.iter().enumerate().map(|(l, (a, p, s))| (Some(Sym::Letter(l as Letter)), enabled_at(*a as usize, p, s))).collect();
                let far = if end == Sym::Left { Sym::Right } else { Sym::Left };
                outcomes.push((Some(far), enabled_at(k, &ep, &es)));
                let side = if end == Sym::Left { "^" } else { "$" };
                if outcomes.iter().all(|(_, e)| *e == outcomes[0].1) {
                    if let Some(i) = core.pick(q, outcomes[0].1.clone(), side)? {
                        core.fire(q, end, i);
                    }
                    continue;
                }
                let qname = &t.state_names()[q as usize];
                let peek = core.state(format!("peek{side}[{qname}]"));
                core.rows.push((q, end, peek, Vec::new(), toward));
                for (nsym, enabled) in outcomes {
                    let Some(i) = core.pick(q, enabled, side)? else { continue };
                    let fire = core.state(format!("fire[{qname},{i}]"));
                    core.rows.push((peek, nsym.expect("neighbour symbol"), fire, Vec::new(), toward.negate()));
                    if !core.rows.iter().any(|r| r.0 == fire) {
                        core.fire(fire, end, i);
                    }
                }
            }
        }
        let mut m = TwoWayTransducer::new(core.names, c2_alphabet, t.output().clone(), t.initial(), core.finals)?;
        for (q, sym, target, out, mv) in core.rows {
            m.set_transition(q, sym, target, out, mv)?;
        }
        Ok(m)
    }
}
