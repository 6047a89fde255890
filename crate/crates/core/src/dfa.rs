//! Complete deterministic automata over an [`Alphabet`], the boolean algebra
//! on them, projection of marked bits, and the counter-free test.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

pub type State = u32;

/// A complete DFA. States are `0..states`; `delta[s * |A| + a]` is the
/// successor of `s` on `a`.
#[derive(Clone, Debug)]
pub struct Dfa {
    alphabet: Alphabet,
    states: usize,
    initial: State,
    finals: Vec<bool>,
    delta: Vec<State>,
}

impl PartialEq for Dfa {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.initial == other.initial
            && self.finals == other.finals
            && self.delta == other.delta
    }
}

impl Eq for Dfa {}

impl Hash for Dfa {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.initial.hash(state);
        self.finals.hash(state);
        self.delta.hash(state);
    }
}

/// Operations accepted by [`combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    Intersect,
    Union,
    Complement,
    /// Existentially project away one bit of a marked alphabet; the
    /// intermediate automaton is nondeterministic and is determinized.
    ProjectBit(usize),
}

/// Outcome of the counter-free test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterFree {
    pub aperiodic: bool,
    /// Least `n >= 0` with `m^n = m^(n+1)` for every element `m`, when aperiodic.
    pub index: Option<usize>,
    pub monoid_size: usize,
}

impl Dfa {
    pub fn new(
        alphabet: Alphabet,
        initial: State,
        finals: Vec<bool>,
        delta: Vec<State>,
    ) -> Result<Self> {
        let states = finals.len();
        if states == 0 || initial as usize >= states {
            return Err(Error::InvalidMachine("initial state out of range".into()));
        }
        if delta.len() != states * alphabet.len() {
            return Err(Error::InvalidMachine("transition table is not total".into()));
        }
        if delta.iter().any(|&t| t as usize >= states) {
            return Err(Error::InvalidMachine("transition target out of range".into()));
        }
        Ok(Dfa {
            alphabet,
            states,
            initial,
            finals,
            delta,
        })
    }

    /// Builds the reachable part of an automaton given by a successor function
    /// on arbitrary hashable keys. Returns the DFA and the key of each state.
    pub fn explore<K, S, F>(alphabet: &Alphabet, start: K, mut step: S, mut is_final: F) -> (Dfa, Vec<K>)
    where
        K: Hash + Eq + Clone,
        S: FnMut(&K, Letter) -> K,
        F: FnMut(&K) -> bool,
    {
        let n = alphabet.len();
        let mut ids: HashMap<K, State> = HashMap::new();
        let mut keys = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let key = keys[i].clone();
            for a in 0..n as Letter {
                let next = step(&key, a);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len() as State;
                        ids.insert(next.clone(), id);
                        keys.push(next);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        let finals = keys.iter().map(&mut is_final).collect();
        let dfa = Dfa {
            alphabet: alphabet.clone(),
            states: keys.len(),
            initial: 0,
            finals,
            delta,
        };
        (dfa, keys)
    }

    /// The automaton accepting every word (`all = true`) or none.
    pub fn universal(alphabet: &Alphabet, all: bool) -> Dfa {
        Dfa::explore(alphabet, (), |_, _| (), |_| all).0
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_final(&self, s: State) -> bool {
        self.finals[s as usize]
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    #[inline]
    pub fn step(&self, s: State, a: Letter) -> State {
        self.delta[s as usize * self.alphabet.len() + a as usize]
    }

    pub fn run_from(&self, s: State, word: &[Letter]) -> State {
        word.iter().fold(s, |s, &a| self.step(s, a))
    }

    pub fn accepts(&self, word: &[Letter]) -> Result<bool> {
        if let Some(&bad) = word.iter().find(|&&a| a as usize >= self.alphabet.len()) {
            return Err(Error::SymbolNotInAlphabet(format!("#{bad}")));
        }
        Ok(self.is_final(self.run_from(self.initial, word)))
    }

    pub fn accepts_str(&self, word: &str) -> Result<bool> {
        let w = self.alphabet.parse_word(word)?;
        self.accepts(&w)
    }

    /// Same automaton with a different start state or final set.
    pub fn with_initial(&self, initial: State) -> Dfa {
        Dfa {
            initial,
            ..self.clone()
        }
    }

    pub fn with_finals(&self, finals: Vec<bool>) -> Dfa {
        assert_eq!(finals.len(), self.states);
        Dfa {
            finals,
            ..self.clone()
        }
    }

    /// Renames the alphabet; the new alphabet must have the same size.
    pub fn relabel(&self, alphabet: Alphabet) -> Result<Dfa> {
        if alphabet.len() != self.alphabet.len() {
            return Err(Error::AlphabetMismatch("relabel to a different size".into()));
        }
        Ok(Dfa {
            alphabet,
            ..self.clone()
        })
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            finals: self.finals.iter().map(|f| !f).collect(),
            ..self.clone()
        }
    }

    fn product(&self, other: &Dfa, accept: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{{{}}} vs {{{}}}",
                self.alphabet, other.alphabet
            )));
        }
        let (d, _) = Dfa::explore(
            &self.alphabet,
            (self.initial, other.initial),
            |&(p, q), a| (self.step(p, a), other.step(q, a)),
            |&(p, q)| accept(self.is_final(p), other.is_final(q)),
        );
        Ok(d)
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |x, y| x && y)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |x, y| x || y)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial as usize] = true;
        while let Some(s) = queue.pop_front() {
            for a in self.alphabet.letters() {
                let t = self.step(s, a);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        let seen = self.reachable();
        !(0..self.states).any(|s| seen[s] && self.finals[s])
    }

    pub fn accepts_all(&self) -> bool {
        let seen = self.reachable();
        (0..self.states).all(|s| !seen[s] || self.finals[s])
    }

    /// Minimal complete DFA with states numbered in breadth-first order, so
    /// two automata for the same language over the same alphabet compare equal.
    pub fn minimize(&self) -> Dfa {
        let n = self.alphabet.len();
        let seen = self.reachable();
        let live: Vec<State> = (0..self.states as State).filter(|&s| seen[s as usize]).collect();
        let mut class = vec![0u32; self.states];
        for &s in &live {
            class[s as usize] = self.finals[s as usize] as u32;
        }
        let mut count = 0;
        loop {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = vec![0u32; self.states];
            for &s in &live {
                let mut sig = Vec::with_capacity(n + 1);
                sig.push(class[s as usize]);
                for a in 0..n as Letter {
                    sig.push(class[self.step(s, a) as usize]);
                }
                let fresh = ids.len() as u32;
                next[s as usize] = *ids.entry(sig).or_insert(fresh);
            }
            class = next;
            if ids.len() == count {
                break;
            }
            count = ids.len();
        }
        let mut rep: HashMap<u32, State> = HashMap::new();
        for &s in &live {
            rep.entry(class[s as usize]).or_insert(s);
        }
        Dfa::explore(
            &self.alphabet,
            class[self.initial as usize],
            |&c, a| class[self.step(rep[&c], a) as usize],
            |&c| self.finals[rep[&c] as usize],
        )
        .0
    }

    pub fn same_language(&self, other: &Dfa) -> bool {
        self.alphabet == other.alphabet && self.minimize() == other.minimize()
    }

    /// Existential projection of bit `bit` of a marked alphabet, determinized
    /// and minimized. The result reads the alphabet with that bit removed.
    pub fn project_bit(&self, bit: usize) -> Result<Dfa> {
        let (base, k) = self
            .alphabet
            .marking()
            .ok_or_else(|| Error::AlphabetMismatch("project-bit needs a marked alphabet".into()))?;
        if bit >= k {
            return Err(Error::AlphabetMismatch(format!("bit {bit} out of range {k}")));
        }
        let target = Alphabet::marked(base, k - 1);
        let width_old = 1usize << k;
        let width_new = 1usize << (k - 1);
        let low_mask = (1usize << bit) - 1;
        let expand = |letter: Letter, b: usize| -> Letter {
            let l = letter as usize;
            let base_idx = l / width_new;
            let v = l % width_new;
            let low = v & low_mask;
            let high = v >> bit;
            let old = low | (b << bit) | (high << (bit + 1));
            (base_idx * width_old + old) as Letter
        };
        let nfa = Nfa {
            initial: vec![self.initial],
            finals: self.finals.clone(),
            succ: Box::new(|s: State, a: Letter, out: &mut Vec<State>| {
                out.push(self.step(s, expand(a, 0)));
                out.push(self.step(s, expand(a, 1)));
            }),
        };
        Ok(nfa.determinize(&target).minimize())
    }

    /// Automaton for the mirror image of the language.
    pub fn reverse(&self) -> Dfa {
        let n = self.alphabet.len();
        let mut preds: Vec<Vec<State>> = vec![Vec::new(); self.states * n];
        for s in 0..self.states as State {
            for a in 0..n as Letter {
                preds[self.step(s, a) as usize * n + a as usize].push(s);
            }
        }
        let initial: Vec<State> = (0..self.states as State).filter(|&s| self.is_final(s)).collect();
        let mut finals = vec![false; self.states];
        finals[self.initial as usize] = true;
        let nfa = Nfa {
            initial,
            finals,
            succ: Box::new(move |s: State, a: Letter, out: &mut Vec<State>| {
                out.extend_from_slice(&preds[s as usize * n + a as usize]);
            }),
        };
        nfa.determinize(&self.alphabet).minimize()
    }

    /// Transition monoid of the automaton (closure of the letter actions)
    /// and its aperiodicity.
    pub fn counter_free(&self) -> CounterFree {
        let gens: Vec<Vec<State>> = {
            let mut g: Vec<Vec<State>> = self
                .alphabet
                .letters()
                .map(|a| (0..self.states as State).map(|s| self.step(s, a)).collect())
                .collect();
            g.sort();
            g.dedup();
            g
        };
        transformation_aperiodicity(self.states, &gens)
    }
}

/// Aperiodicity of the monoid generated by total transformations of `0..n`.
pub(crate) fn transformation_aperiodicity(n: usize, gens: &[Vec<State>]) -> CounterFree {
    let identity: Vec<State> = (0..n as State).collect();
    let mut seen: HashMap<Vec<State>, ()> = HashMap::new();
    let mut queue = VecDeque::from([identity.clone()]);
    seen.insert(identity.clone(), ());
    let mut elements = Vec::new();
    while let Some(f) = queue.pop_front() {
        for g in gens {
            let h: Vec<State> = f.iter().map(|&s| g[s as usize]).collect();
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), ());
                queue.push_back(h);
            }
        }
        elements.push(f);
    }
    let mut index = 0;
    for x in &elements {
        match power_index(x, &identity) {
            Some(k) => index = index.max(k),
            None => {
                return CounterFree {
                    aperiodic: false,
                    index: None,
                    monoid_size: elements.len(),
                }
            }
        }
    }
    CounterFree {
        aperiodic: true,
        index: Some(index),
        monoid_size: elements.len(),
    }
}

/// Least `k` with `x^k = x^(k+1)`, or `None` when the powers cycle with a
/// period greater than one.
fn power_index(x: &[State], identity: &[State]) -> Option<usize> {
    let mut seen: HashMap<Vec<State>, usize> = HashMap::new();
    let mut power = identity.to_vec();
    let mut k = 0;
    loop {
        let next: Vec<State> = power.iter().map(|&s| x[s as usize]).collect();
        if next == power {
            return Some(k);
        }
        if seen.insert(power.clone(), k).is_some() {
            return None;
        }
        if seen.contains_key(&next) {
            return None;
        }
        power = next;
        k += 1;
    }
}

/// Nondeterministic automaton given by a successor callback; only used as the
/// intermediate of projection and reversal.
pub(crate) struct Nfa<'a> {
    pub initial: Vec<State>,
    pub finals: Vec<bool>,
    pub succ: Box<dyn Fn(State, Letter, &mut Vec<State>) + 'a>,
}

impl Nfa<'_> {
    pub fn determinize(&self, alphabet: &Alphabet) -> Dfa {
        let mut start = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        let mut buf = Vec::new();
        Dfa::explore(
            alphabet,
            start,
            |set: &Vec<State>, a| {
                buf.clear();
                for &s in set {
                    (self.succ)(s, a, &mut buf);
                }
                let mut next = buf.clone();
                next.sort_unstable();
                next.dedup();
                next
            },
            |set| set.iter().any(|&s| self.finals[s as usize]),
        )
        .0
    }
}

/// Boolean and projection operations on DFAs.
pub fn combine(op: Combine, operands: &[&Dfa]) -> Result<Dfa> {
    let arity = |n: usize| -> Result<()> {
        if operands.len() == n {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{op:?} expects {n} operand(s), got {}",
                operands.len()
            )))
        }
    };
    match op {
        Combine::Intersect => {
            arity(2)?;
            Ok(operands[0].intersect(operands[1])?.minimize())
        }
        Combine::Union => {
            arity(2)?;
            Ok(operands[0].union(operands[1])?.minimize())
        }
        Combine::Complement => {
            arity(1)?;
            Ok(operands[0].complement())
        }
        Combine::ProjectBit(bit) => {
            arity(1)?;
            operands[0].project_bit(bit)
        }
    }
}
