//! Behavior profiles, their gluing product, and transition monoids of
//! two-way machines.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::twoway::{Move, State, Sym, TwoWayTransducer};

/// Side of a factor where the head enters or leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn bit(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// Behavior of a factor: entering on `side` in state `q` maps to the state
/// and side where the head leaves, or nothing when the inner run blocks or
/// loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BehaviorProfile {
    entries: Vec<Option<(State, Side)>>,
}

impl BehaviorProfile {
    /// Profile of the empty word.
    pub fn identity(states: usize) -> Self {
        let mut entries = Vec::with_capacity(2 * states);
        for q in 0..states as State {
            entries.push(Some((q, Side::Right)));
            entries.push(Some((q, Side::Left)));
        }
        BehaviorProfile { entries }
    }

    pub fn from_fn<F: FnMut(State, Side) -> Option<(State, Side)>>(states: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(2 * states);
        for q in 0..states as State {
            entries.push(f(q, Side::Left));
            entries.push(f(q, Side::Right));
        }
        BehaviorProfile { entries }
    }

    pub fn num_states(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn get(&self, q: State, side: Side) -> Option<(State, Side)> {
        self.entries[q as usize * 2 + side.bit()]
    }

    /// Pairs `(q, q')` of the behavior entering on `from` and leaving on `to`.
    pub fn component(&self, from: Side, to: Side) -> Vec<(State, State)> {
        (0..self.num_states() as State)
            .filter_map(|q| match self.get(q, from) {
                Some((r, s)) if s == to => Some((q, r)),
                _ => None,
            })
            .collect()
    }

    pub fn bh_ll(&self) -> Vec<(State, State)> {
        self.component(Side::Left, Side::Left)
    }

    pub fn bh_lr(&self) -> Vec<(State, State)> {
        self.component(Side::Left, Side::Right)
    }

    pub fn bh_rl(&self) -> Vec<(State, State)> {
        self.component(Side::Right, Side::Left)
    }

    pub fn bh_rr(&self) -> Vec<(State, State)> {
        self.component(Side::Right, Side::Right)
    }

    /// Profile of `uv` from the profiles of `u` (self) and `v`: the head is
    /// followed across the boundary until it leaves `uv`; revisiting a
    /// boundary crossing means the run loops.
    pub fn glue(&self, other: &BehaviorProfile) -> BehaviorProfile {
        let n = self.num_states();
        let bound = 2 * n + 2;
        BehaviorProfile::from_fn(n, |q, side| {
            let (mut in_left, mut q, mut side) = (side == Side::Left, q, side);
            for _ in 0..=bound {
                let seg = if in_left { self } else { other };
                let (r, out) = seg.get(q, side)?;
                match (in_left, out) {
                    (true, Side::Left) | (false, Side::Right) => return Some((r, out)),
                    (true, Side::Right) => {
                        in_left = false;
                        side = Side::Left;
                    }
                    (false, Side::Left) => {
                        in_left = true;
                        side = Side::Right;
                    }
                }
                q = r;
            }
            None
        })
    }

    pub fn format(&self, names: &[String]) -> String {
        let fmt = |pairs: Vec<(State, State)>| {
            let inner: Vec<String> = pairs
                .iter()
                .map(|&(a, b)| format!("({},{})", names[a as usize], names[b as usize]))
                .collect();
            format!("{{{}}}", inner.join(","))
        };
        format!(
            "ll={} lr={} rl={} rr={}",
            fmt(self.bh_ll()),
            fmt(self.bh_lr()),
            fmt(self.bh_rl()),
            fmt(self.bh_rr())
        )
    }
}

/// What happens when the head stands on `$` in a given state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RightEnd {
    Accept,
    ExitLeft(State),
    Stuck,
}

/// Behaviors of the tape symbols as segments: letters, `^`, `$`.
#[derive(Clone, Debug)]
pub(crate) struct Local {
    /// `chains[sym][q]`: states occupied at one cell entered in `q`, before
    /// leaving it (`0`-moves included).
    pub chains: Vec<Vec<Vec<State>>>,
    pub left_end: Vec<Option<State>>,
    pub right_end: Vec<RightEnd>,
}

fn sym_index(alphabet_len: usize, sym: Sym) -> usize {
    match sym {
        Sym::Letter(a) => a as usize,
        Sym::Left => alphabet_len,
        Sym::Right => alphabet_len + 1,
    }
}

/// Follows `0`-moves at one cell. Returns the occupied states and the exit.
fn cell(t: &TwoWayTransducer, sym: Sym, q: State) -> (Vec<State>, Option<(State, Move)>, bool) {
    let mut chain = vec![q];
    let mut cur = q;
    loop {
        if sym == Sym::Right && t.is_final(cur) {
            return (chain, None, true);
        }
        let Some(tr) = t.transition(cur, sym) else {
            return (chain, None, false);
        };
        if tr.mv != Move::Stay {
            return (chain, Some((tr.target, tr.mv)), false);
        }
        if chain.contains(&tr.target) {
            return (chain, None, false);
        }
        chain.push(tr.target);
        cur = tr.target;
    }
}

impl Local {
    fn new(t: &TwoWayTransducer) -> (Local, Vec<BehaviorProfile>) {
        let n = t.num_states();
        let k = t.input().len();
        let mut chains = vec![Vec::with_capacity(n); k + 2];
        let mut letter_profiles = Vec::with_capacity(k);
        for a in t.input().letters() {
            let exits: Vec<Option<(State, Side)>> = (0..n as State)
                .map(|q| {
                    let (chain, exit, _) = cell(t, Sym::Letter(a), q);
                    chains[a as usize].push(chain);
                    exit.map(|(r, mv)| (r, if mv == Move::Left { Side::Left } else { Side::Right }))
                })
                .collect();
            letter_profiles.push(BehaviorProfile::from_fn(n, |q, _| exits[q as usize]));
        }
        let mut left_end = Vec::with_capacity(n);
        let mut right_end = Vec::with_capacity(n);
        for q in 0..n as State {
            let (chain, exit, _) = cell(t, Sym::Left, q);
            chains[k].push(chain);
            left_end.push(exit.map(|(r, _)| r));
            let (chain, exit, accept) = cell(t, Sym::Right, q);
            chains[k + 1].push(chain);
            right_end.push(match (accept, exit) {
                (true, _) => RightEnd::Accept,
                (false, Some((r, _))) => RightEnd::ExitLeft(r),
                (false, None) => RightEnd::Stuck,
            });
        }
        (
            Local {
                chains,
                left_end,
                right_end,
            },
            letter_profiles,
        )
    }

    pub fn chain(&self, alphabet_len: usize, sym: Sym, q: State) -> &[State] {
        &self.chains[sym_index(alphabet_len, sym)][q as usize]
    }
}

/// Profile of `word` by direct simulation inside it.
pub fn behaviors(t: &TwoWayTransducer, word: &[Letter]) -> BehaviorProfile {
    let n = t.num_states();
    if word.is_empty() {
        return BehaviorProfile::identity(n);
    }
    BehaviorProfile::from_fn(n, |q, side| {
        t.traverse(word, q, side == Side::Left).map(|(r, right)| (r, if right { Side::Right } else { Side::Left }))
    })
}

/// The transition monoid of a two-way machine: the profiles of all words,
/// generated from the letter profiles.
#[derive(Clone, Debug)]
pub struct TransitionMonoid {
    input: Alphabet,
    state_names: Vec<String>,
    elements: Vec<BehaviorProfile>,
    index: HashMap<BehaviorProfile, usize>,
    representatives: Vec<Word>,
    /// `right[e * |A| + a]` is the element of `rep(e)·a`.
    right: Vec<u32>,
    letters: Vec<u32>,
    initial: State,
    finals: Vec<bool>,
    local: Local,
    machine: TwoWayTransducer,
}

/// A piece of a tape: a factor abstracted by its element, or one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seg {
    Profile(usize),
    Cell(Sym),
}

/// End of a walk over a segmented tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reach {
    Accepted,
    /// Blocked, looped inside a factor, or revisited an abstract configuration.
    Stuck,
    /// Left the first or last segment.
    FellOff,
    Stopped,
}

/// Verdict of the aperiodicity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aperiodicity {
    pub aperiodic: bool,
    /// Least `n >= 0` with `x^n = x^(n+1)` for every element `x` (where
    /// `x^0` is the identity), when aperiodic.
    pub index: Option<usize>,
    /// An element whose powers cycle with period above one.
    pub witness: Option<usize>,
    pub witness_period: Option<usize>,
}

/// Power data of one element: least `n` with `x^n = x^(n+m)`, and `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerData {
    pub index: usize,
    pub period: usize,
}

impl TransitionMonoid {
    pub fn new(t: &TwoWayTransducer) -> TransitionMonoid {
        let (local, letter_profiles) = Local::new(t);
        let n = t.num_states();
        let k = t.input().len();
        let identity = BehaviorProfile::identity(n);
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(identity, 0usize);
        let mut representatives = vec![Vec::new()];
        let mut right = Vec::new();
        let mut i = 0;
        while i < elements.len() {
            for a in 0..k {
                let next = elements[i].glue(&letter_profiles[a]);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = elements.len();
                        let mut rep = representatives[i].clone();
                        rep.push(a as Letter);
                        representatives.push(rep);
                        index.insert(next.clone(), id);
                        elements.push(next);
                        id
                    }
                };
                right.push(id as u32);
            }
            i += 1;
        }
        let letters = (0..k).map(|a| right[a]).collect();
        TransitionMonoid {
            input: t.input().clone(),
            state_names: t.state_names().to_vec(),
            elements,
            index,
            representatives,
            right,
            letters,
            initial: t.initial(),
            finals: t.finals().to_vec(),
            local,
            machine: t.clone(),
        }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    /// The machine whose behaviors this monoid collects.
    pub fn machine(&self) -> &TwoWayTransducer {
        &self.machine
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn profile(&self, e: usize) -> &BehaviorProfile {
        &self.elements[e]
    }

    pub fn representative(&self, e: usize) -> &[Letter] {
        &self.representatives[e]
    }

    pub fn element_of(&self, profile: &BehaviorProfile) -> Option<usize> {
        self.index.get(profile).copied()
    }

    pub fn check(&self, e: usize) -> Result<()> {
        if e < self.len() {
            Ok(())
        } else {
            Err(Error::ElementNotInMonoid(e))
        }
    }

    /// Image of a single letter.
    pub fn letter(&self, a: Letter) -> usize {
        self.letters[a as usize] as usize
    }

    /// Image of `e` followed by the letter `a`.
    pub fn step(&self, e: usize, a: Letter) -> usize {
        self.right[e * self.input.len() + a as usize] as usize
    }

    pub fn class_of(&self, word: &[Letter]) -> usize {
        word.iter().fold(0, |e, &a| self.step(e, a))
    }

    pub fn product(&self, x: usize, y: usize) -> usize {
        if y == 0 {
            return x;
        }
        if x == 0 {
            return y;
        }
        let p = self.elements[x].glue(&self.elements[y]);
        self.index[&p]
    }

    pub fn power_data(&self, x: usize) -> PowerData {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut cur = 0;
        let mut k = 0;
        loop {
            if let Some(&first) = seen.get(&cur) {
                return PowerData {
                    index: first,
                    period: k - first,
                };
            }
            seen.insert(cur, k);
            cur = self.product(cur, x);
            k += 1;
        }
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.product(x, x) == x
    }

    pub fn is_aperiodic(&self) -> Aperiodicity {
        let mut index = 0;
        for x in 0..self.len() {
            let p = self.power_data(x);
            if p.period > 1 {
                return Aperiodicity {
                    aperiodic: false,
                    index: None,
                    witness: Some(x),
                    witness_period: Some(p.period),
                };
            }
            index = index.max(p.index);
        }
        Aperiodicity {
            aperiodic: true,
            index: Some(index),
            witness: None,
            witness_period: None,
        }
    }

    /// Automaton over the input alphabet whose states are the elements and
    /// which accepts exactly the words mapped to `e`.
    pub fn class_language_dfa(&self, e: usize) -> Result<Dfa> {
        self.check(e)?;
        let finals = (0..self.len()).map(|x| x == e).collect();
        Dfa::new(self.input.clone(), 0, finals, self.right.clone())
    }

    /// Whether the run over `^ w $` accepts for the words `w` of class `e`.
    pub fn accepts_class(&self, e: usize) -> bool {
        let segs = [Seg::Cell(Sym::Left), Seg::Profile(e), Seg::Cell(Sym::Right)];
        self.walk_tape(&segs, (0, self.initial, Side::Right), |_, _| false) == Reach::Accepted
    }

    pub fn initial_state(&self) -> State {
        self.initial
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals[q as usize]
    }

    /// States occupied at one cell holding `sym` when it is entered in `q`.
    pub fn chain(&self, sym: Sym, q: State) -> &[State] {
        self.local.chain(self.input.len(), sym, q)
    }

    pub fn left_end(&self, q: State) -> Option<State> {
        self.local.left_end[q as usize]
    }

    pub fn right_end(&self, q: State) -> RightEnd {
        self.local.right_end[q as usize]
    }

    /// Follows the run of the machine over a tape cut into segments, from
    /// `start = (segment, state, entry side)`. `visit(segment, state)` sees
    /// each entry and may stop the walk. Cells are entered once per visit;
    /// profile segments abstract the moves inside them.
    pub fn walk_tape<F: FnMut(usize, State) -> bool>(
        &self,
        segs: &[Seg],
        start: (usize, State, Side),
        mut visit: F,
    ) -> Reach {
        let mut seen = std::collections::HashSet::new();
        let (mut k, mut q, mut side) = start;
        loop {
            if visit(k, q) {
                return Reach::Stopped;
            }
            if !seen.insert((k, q, side)) {
                return Reach::Stuck;
            }
            let exit = match segs[k] {
                Seg::Profile(e) => self.elements[e].get(q, side),
                Seg::Cell(Sym::Letter(a)) => self.elements[self.letter(a)].get(q, Side::Left),
                Seg::Cell(Sym::Left) => self.left_end(q).map(|r| (r, Side::Right)),
                Seg::Cell(Sym::Right) => match self.right_end(q) {
                    RightEnd::Accept => return Reach::Accepted,
                    RightEnd::ExitLeft(r) => Some((r, Side::Left)),
                    RightEnd::Stuck => None,
                },
            };
            let Some((r, out)) = exit else {
                return Reach::Stuck;
            };
            match out {
                Side::Left if k == 0 => return Reach::FellOff,
                Side::Left => {
                    k -= 1;
                    side = Side::Right;
                }
                Side::Right if k + 1 == segs.len() => return Reach::FellOff,
                Side::Right => {
                    k += 1;
                    side = Side::Left;
                }
            }
            q = r;
        }
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        for e in 0..self.len() {
            let rep = if e == 0 {
                "ε".to_string()
            } else {
                self.input.format_word(&self.representatives[e])
            };
            let p = self.power_data(e);
            let _ = writeln!(
                out,
                "[{rep}] {} idempotent={} index={} period={}",
                self.elements[e].format(&self.state_names),
                self.is_idempotent(e),
                p.index,
                p.period
            );
        }
        out
    }
}
