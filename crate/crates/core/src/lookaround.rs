//! Look-around transducers. The star-free variant guards each single-step
//! transition by a test `(L_p, a, L_s)`; the first-order variant guards it by
//! a unary formula and moves the head by a binary jump formula.
//!
//! Both read the tape `^ u $` with positions `0..=|u|+1`.

use std::collections::HashMap;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::logic::{Context, Evaluator, Formula, Registry};
use crate::twoway::{Move, Outcome, Reason, Run, State, Sym};

/// Default length bound of the determinism checks.
pub const DETERMINISM_BOUND: usize = 6;

/// `(L_p, a, L_s)`: languages are indices into the machine's language list.
/// The prefix and suffix exclude both the current position and the
/// endmarkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Test {
    pub prefix: usize,
    pub sym: Sym,
    pub suffix: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfTransition {
    pub from: State,
    pub test: Test,
    pub target: State,
    pub output: Word,
    pub mv: Move,
}

#[derive(Clone, Debug)]
pub struct SfLookAroundTransducer {
    states: Vec<String>,
    input: Alphabet,
    output: Alphabet,
    initial: State,
    finals: Vec<bool>,
    languages: Vec<Dfa>,
    transitions: Vec<SfTransition>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoTransition {
    pub from: State,
    /// Free variable `x`.
    pub test: Formula,
    pub target: State,
    pub output: Word,
    /// Free variables `x` (current position) and `y` (next position).
    pub jump: Formula,
}

#[derive(Clone, Debug)]
pub struct FoLookAroundTransducer {
    states: Vec<String>,
    input: Alphabet,
    output: Alphabet,
    initial: State,
    finals: Vec<bool>,
    transitions: Vec<FoTransition>,
    registry: Registry,
}

fn declare(states: &[String], initial: State, finals: &[bool]) -> Result<()> {
    if states.is_empty() || initial as usize >= states.len() || finals.len() != states.len() {
        return Err(Error::InvalidMachine("bad state declaration".into()));
    }
    let mut sorted = states.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != states.len() {
        return Err(Error::InvalidMachine("duplicate state name".into()));
    }
    Ok(())
}

fn check_output(output: &Alphabet, word: &[Letter]) -> Result<()> {
    match word.iter().find(|&&b| b as usize >= output.len()) {
        Some(b) => Err(Error::SymbolNotInAlphabet(format!("#{b}"))),
        None => Ok(()),
    }
}

fn check_word(input: &Alphabet, word: &[Letter]) -> Result<()> {
    match word.iter().find(|&&a| a as usize >= input.len()) {
        Some(a) => Err(Error::SymbolNotInAlphabet(format!("#{a}"))),
        None => Ok(()),
    }
}

fn sym_at(word: &[Letter], pos: usize) -> Sym {
    if pos == 0 {
        Sym::Left
    } else if pos == word.len() + 1 {
        Sym::Right
    } else {
        Sym::Letter(word[pos - 1])
    }
}

/// Shared driver: `step(q, pos)` returns the enabled move, `None` when no
/// transition applies.
fn drive<F>(word: &[Letter], states: usize, initial: State, finals: &[bool], mut step: F) -> Result<Outcome>
where
    F: FnMut(State, usize) -> Result<Option<(State, usize, Word)>>,
{
    let positions = word.len() + 2;
    let mut seen = vec![false; states * positions];
    let mut run = Run::default();
    let mut output = Vec::new();
    let (mut q, mut pos) = (initial, 0usize);
    run.configs.push((q, pos));
    loop {
        let key = q as usize * positions + pos;
        if seen[key] {
            return Ok(Outcome::Undefined { reason: Reason::Loop, run });
        }
        seen[key] = true;
        let at_end = pos == positions - 1;
        if at_end && finals[q as usize] {
            return Ok(Outcome::Accepted { output, run });
        }
        let Some((target, next, prod)) = step(q, pos)? else {
            let reason = if at_end { Reason::Rejected } else { Reason::Blocked };
            return Ok(Outcome::Undefined { reason, run });
        };
        output.extend_from_slice(&prod);
        run.productions.push(prod);
        q = target;
        pos = next;
        run.configs.push((q, pos));
    }
}

impl SfLookAroundTransducer {
    pub fn new(
        states: Vec<String>,
        input: Alphabet,
        output: Alphabet,
        initial: State,
        finals: Vec<bool>,
    ) -> Result<Self> {
        declare(&states, initial, &finals)?;
        Ok(SfLookAroundTransducer {
            states,
            input,
            output,
            initial,
            finals,
            languages: Vec::new(),
            transitions: Vec::new(),
        })
    }

    /// Adds a test language over the input alphabet and returns its index.
    /// Equal languages share one index. Rejects automata that are not
    /// counter-free.
    pub fn add_language(&mut self, dfa: &Dfa) -> Result<usize> {
        if dfa.alphabet() != &self.input {
            return Err(Error::AlphabetMismatch("test language over another alphabet".into()));
        }
        let d = dfa.minimize();
        if let Some(i) = self.languages.iter().position(|l| *l == d) {
            return Ok(i);
        }
        if !d.counter_free().aperiodic {
            return Err(Error::NotAperiodic(format!(
                "test language with {} states is not star-free",
                d.num_states()
            )));
        }
        self.languages.push(d);
        Ok(self.languages.len() - 1)
    }

    pub fn add_transition(&mut self, t: SfTransition) -> Result<()> {
        let n = self.states.len() as State;
        if t.from >= n || t.target >= n {
            return Err(Error::UnknownState(format!("#{}", t.from.max(t.target))));
        }
        if t.test.prefix >= self.languages.len() || t.test.suffix >= self.languages.len() {
            return Err(Error::InvalidMachine("test references an unknown language".into()));
        }
        if let Sym::Letter(a) = t.test.sym {
            if a as usize >= self.input.len() {
                return Err(Error::SymbolNotInAlphabet(format!("#{a}")));
            }
        }
        if (t.test.sym == Sym::Left && t.mv == Move::Left) || (t.test.sym == Sym::Right && t.mv == Move::Right) {
            return Err(Error::InvalidMachine("transition moves off the tape".into()));
        }
        check_output(&self.output, &t.output)?;
        self.transitions.push(t);
        Ok(())
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals[q as usize]
    }

    pub fn languages(&self) -> &[Dfa] {
        &self.languages
    }

    pub fn transitions(&self) -> &[SfTransition] {
        &self.transitions
    }

    /// `prefix_in[l][x]`: the strict prefix at position `x` lies in language
    /// `l`; likewise for suffixes.
    fn memberships(&self, word: &[Letter]) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
        let n = word.len();
        let mut pre = Vec::with_capacity(self.languages.len());
        let mut suf = Vec::with_capacity(self.languages.len());
        for l in &self.languages {
            let mut p = vec![false; n + 2];
            let mut s = l.initial();
            p[0] = l.is_final(s);
            p[1] = p[0];
            for i in 1..=n {
                s = l.step(s, word[i - 1]);
                p[i + 1] = l.is_final(s);
            }
            let mut sf = vec![false; n + 2];
            for x in 0..n + 2 {
                let from = (x + 1).min(n + 1).max(1);
                let tail = if x > n { &[][..] } else { &word[from - 1..] };
                sf[x] = l.is_final(l.run_from(l.initial(), tail));
            }
            pre.push(p);
            suf.push(sf);
        }
        (pre, suf)
    }

    fn enabled<'s>(&'s self, q: State, word: &[Letter], pos: usize, m: &(Vec<Vec<bool>>, Vec<Vec<bool>>)) -> Vec<&'s SfTransition> {
        let sym = sym_at(word, pos);
        self.transitions
            .iter()
            .filter(|t| t.from == q && t.test.sym == sym && m.0[t.test.prefix][pos] && m.1[t.test.suffix][pos])
            .collect()
    }

    pub fn simulate(&self, word: &[Letter]) -> Result<Outcome> {
        check_word(&self.input, word)?;
        let m = self.memberships(word);
        drive(word, self.states.len(), self.initial, &self.finals, |q, pos| {
            let ts = self.enabled(q, word, pos, &m);
            match ts.as_slice() {
                [] => Ok(None),
                [t] => Ok(Some((t.target, (pos as isize + t.mv.delta()) as usize, t.output.clone()))),
                _ => Err(Error::DeterminismViolation(format!(
                    "{} tests hold in state `{}` at position {pos}",
                    ts.len(),
                    self.states[q as usize]
                ))),
            }
        })
    }

    pub fn run(&self, word: &[Letter]) -> Result<Option<Word>> {
        Ok(self.simulate(word)?.output().cloned())
    }

    /// Checks that in every state at most one test holds, on every position
    /// of every word of length at most `bound`.
    pub fn check_determinism(&self, bound: usize) -> Result<()> {
        for word in self.input.words_up_to(0, bound) {
            let m = self.memberships(&word);
            for q in 0..self.states.len() as State {
                for pos in 0..word.len() + 2 {
                    if self.enabled(q, &word, pos, &m).len() > 1 {
                        return Err(Error::DeterminismViolation(format!(
                            "state `{}` on `{}` at position {pos}",
                            self.states[q as usize],
                            self.input.format_word(&word)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl FoLookAroundTransducer {
    pub fn new(
        states: Vec<String>,
        input: Alphabet,
        output: Alphabet,
        initial: State,
        finals: Vec<bool>,
        registry: Registry,
    ) -> Result<Self> {
        declare(&states, initial, &finals)?;
        Ok(FoLookAroundTransducer {
            states,
            input,
            output,
            initial,
            finals,
            transitions: Vec::new(),
            registry,
        })
    }

    pub fn add_transition(&mut self, t: FoTransition) -> Result<()> {
        let n = self.states.len() as State;
        if t.from >= n || t.target >= n {
            return Err(Error::UnknownState(format!("#{}", t.from.max(t.target))));
        }
        if let Some(v) = t.test.free_vars().into_iter().find(|v| v != "x") {
            return Err(Error::UnboundVariable(v));
        }
        if let Some(v) = t.jump.free_vars().into_iter().find(|v| v != "x" && v != "y") {
            return Err(Error::UnboundVariable(v));
        }
        for name in t.test.monoids().into_iter().chain(t.jump.monoids()) {
            self.registry.get(&name)?;
        }
        check_output(&self.output, &t.output)?;
        self.transitions.push(t);
        Ok(())
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, name: &str) -> Result<State> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| i as State)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals[q as usize]
    }

    pub fn transitions(&self) -> &[FoTransition] {
        &self.transitions
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    /// Indices of transitions from `q` whose test holds at `pos`.
    fn enabled(&self, ev: &mut Evaluator<'_>, q: State, pos: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from == q && ev.eval(&t.test, &[("x", pos)])? {
                out.push(i);
            }
        }
        Ok(out)
    }

    fn targets(&self, ev: &mut Evaluator<'_>, t: &FoTransition, pos: usize, last: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for y in 0..=last {
            if ev.eval(&t.jump, &[("x", pos), ("y", y)])? {
                out.push(y);
            }
        }
        Ok(out)
    }

    pub fn simulate(&self, word: &[Letter]) -> Result<Outcome> {
        check_word(&self.input, word)?;
        let mut ev = Evaluator::new(word, &self.registry, Context::Marked);
        let last = word.len() + 1;
        drive(word, self.states.len(), self.initial, &self.finals, |q, pos| {
            let ts = self.enabled(&mut ev, q, pos)?;
            let t = match ts.as_slice() {
                [] => return Ok(None),
                [i] => &self.transitions[*i],
                _ => {
                    return Err(Error::DeterminismViolation(format!(
                        "{} tests hold in state `{}` at position {pos}",
                        ts.len(),
                        self.states[q as usize]
                    )))
                }
            };
            match self.targets(&mut ev, t, pos, last)?.as_slice() {
                [] => Ok(None),
                [y] => Ok(Some((t.target, *y, t.output.clone()))),
                ys => Err(Error::DeterminismViolation(format!(
                    "jump from position {pos} in state `{}` has {} targets",
                    self.states[q as usize],
                    ys.len()
                ))),
            }
        })
    }

    pub fn run(&self, word: &[Letter]) -> Result<Option<Word>> {
        Ok(self.simulate(word)?.output().cloned())
    }

    /// Checks on all words up to `bound` that the tests of each state are
    /// mutually exclusive and that every jump whose test holds has at most
    /// one target.
    pub fn check_determinism(&self, bound: usize) -> Result<()> {
        for word in self.input.words_up_to(0, bound) {
            let mut ev = Evaluator::new(&word, &self.registry, Context::Marked);
            let last = word.len() + 1;
            for q in 0..self.states.len() as State {
                for pos in 0..=last {
                    let ts = self.enabled(&mut ev, q, pos)?;
                    let shown = self.input.format_word(&word);
                    if ts.len() > 1 {
                        return Err(Error::DeterminismViolation(format!(
                            "state `{}` on `{shown}` at position {pos}",
                            self.states[q as usize]
                        )));
                    }
                    for &i in &ts {
                        if self.targets(&mut ev, &self.transitions[i], pos, last)?.len() > 1 {
                            return Err(Error::DeterminismViolation(format!(
                                "jump from state `{}` on `{shown}` at position {pos}",
                                self.states[q as usize]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Index of every distinct language over an alphabet, kept in insertion
/// order. Used when assembling look-around machines.
#[derive(Default)]
pub(crate) struct LanguageTable {
    index: HashMap<Dfa, usize>,
    pub list: Vec<Dfa>,
}

impl LanguageTable {
    pub fn insert(&mut self, d: Dfa) -> usize {
        let d = d.minimize();
        if let Some(&i) = self.index.get(&d) {
            return i;
        }
        self.list.push(d.clone());
        self.index.insert(d, self.list.len() - 1);
        self.list.len() - 1
    }
}
