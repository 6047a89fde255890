//! Deterministic one-way (sequential) transducers with partial transitions.

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{Error, Result};

pub type SeqState = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqTransition {
    pub target: SeqState,
    pub output: Word,
}

/// `(Q, A, B, step, produce, q0, F)` with a partial step function; a missing
/// transition puts the input outside the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialTransducer {
    states: Vec<String>,
    input: Alphabet,
    output: Alphabet,
    initial: SeqState,
    finals: Vec<bool>,
    table: Vec<Option<SeqTransition>>,
}

impl SequentialTransducer {
    pub fn new(
        states: Vec<String>,
        input: Alphabet,
        output: Alphabet,
        initial: SeqState,
        finals: Vec<bool>,
    ) -> Result<Self> {
        if states.is_empty() || initial as usize >= states.len() || finals.len() != states.len() {
            return Err(Error::InvalidMachine("bad state declaration".into()));
        }
        let table = vec![None; states.len() * input.len()];
        Ok(SequentialTransducer {
            states,
            input,
            output,
            initial,
            finals,
            table,
        })
    }

    pub fn set_transition(&mut self, from: SeqState, letter: Letter, target: SeqState, output: Word) -> Result<()> {
        if from as usize >= self.states.len() || target as usize >= self.states.len() {
            return Err(Error::UnknownState(format!("#{from}/#{target}")));
        }
        if letter as usize >= self.input.len() {
            return Err(Error::SymbolNotInAlphabet(format!("#{letter}")));
        }
        if output.iter().any(|&b| b as usize >= self.output.len()) {
            return Err(Error::SymbolNotInAlphabet("output letter".into()));
        }
        let idx = from as usize * self.input.len() + letter as usize;
        self.table[idx] = Some(SeqTransition { target, output });
        Ok(())
    }

    /// Single-state transducer mapping each letter to its image (possibly empty).
    pub fn letter_map(input: Alphabet, output: Alphabet, images: &[Word]) -> Result<Self> {
        let mut t = Self::new(vec!["0".into()], input, output, 0, vec![true])?;
        for (a, img) in images.iter().enumerate() {
            t.set_transition(0, a as Letter, 0, img.clone())?;
        }
        Ok(t)
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let images: Vec<Word> = alphabet.letters().map(|a| vec![a]).collect();
        Self::letter_map(alphabet.clone(), alphabet, &images).expect("identity is well formed")
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: SeqState) -> &str {
        &self.states[q as usize]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> SeqState {
        self.initial
    }

    pub fn is_final(&self, q: SeqState) -> bool {
        self.finals[q as usize]
    }

    pub fn transition(&self, q: SeqState, a: Letter) -> Option<&SeqTransition> {
        self.table[q as usize * self.input.len() + a as usize].as_ref()
    }

    /// Longest production.
    pub fn max_production(&self) -> usize {
        self.table
            .iter()
            .flatten()
            .map(|t| t.output.len())
            .max()
            .unwrap_or(0)
    }

    /// Image of `word`, or `None` when the run blocks or ends outside `F`.
    pub fn run(&self, word: &[Letter]) -> Option<Word> {
        let mut q = self.initial;
        let mut out = Vec::new();
        for &a in word {
            if a as usize >= self.input.len() {
                return None;
            }
            let t = self.transition(q, a)?;
            out.extend_from_slice(&t.output);
            q = t.target;
        }
        self.is_final(q).then_some(out)
    }

    /// Right-sequential reading: the machine consumes `word` from right to
    /// left and the block produced at each position is written at that
    /// position, so blocks appear in left-to-right position order.
    pub fn run_right(&self, word: &[Letter]) -> Option<Word> {
        let mut q = self.initial;
        let mut blocks = Vec::with_capacity(word.len());
        for &a in word.iter().rev() {
            if a as usize >= self.input.len() {
                return None;
            }
            let t = self.transition(q, a)?;
            blocks.push(t.output.clone());
            q = t.target;
        }
        if !self.is_final(q) {
            return None;
        }
        Some(blocks.into_iter().rev().flatten().collect())
    }

    /// Same machine with every production reversed.
    pub fn reversed_productions(&self) -> Self {
        let mut t = self.clone();
        for tr in t.table.iter_mut().flatten() {
            tr.output.reverse();
        }
        t
    }
}
