//! First-order word-to-word transductions: output positions live in copies
//! of the input positions, labelled and ordered by formulas.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::logic::{Context, Evaluator, Formula, Registry};
use crate::monoid::TransitionMonoid;

#[derive(Clone, Debug)]
pub struct FoTransduction {
    input: Alphabet,
    output: Alphabet,
    copies: Vec<String>,
    dom: Formula,
    /// `pos[c][b]`, free variable `x`.
    pos: Vec<Vec<Formula>>,
    /// `le[c][d]`, free variables `x`, `y`.
    le: Vec<Vec<Formula>>,
    registry: Registry,
}

/// Nodes, labels, and the evaluated order relation on one input word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputStructure {
    /// `(copy, position, label)`.
    pub nodes: Vec<(usize, usize, Letter)>,
    /// `order[i][j]` holds when node `i` is below node `j`.
    pub order: Vec<Vec<bool>>,
}

impl OutputStructure {
    /// Labels in the order's sequence, or `None` when the relation is not a
    /// total order.
    pub fn linearize(&self) -> Option<Word> {
        let n = self.nodes.len();
        let r = &self.order;
        for i in 0..n {
            if !r[i][i] {
                return None;
            }
            for j in 0..n {
                if i != j && r[i][j] == r[j][i] {
                    // both means not antisymmetric, neither means not total
                    return None;
                }
                for k in 0..n {
                    if r[i][j] && r[j][k] && !r[i][k] {
                        return None;
                    }
                }
            }
        }
        let mut ranked: Vec<(usize, Letter)> = (0..n)
            .map(|j| ((0..n).filter(|&i| r[i][j]).count(), self.nodes[j].2))
            .collect();
        ranked.sort_unstable();
        Some(ranked.into_iter().map(|(_, b)| b).collect())
    }
}

fn check_vars(f: &Formula, allowed: &[&str]) -> Result<()> {
    match f.free_vars().into_iter().find(|v| !allowed.contains(&v.as_str())) {
        Some(v) => Err(Error::UnboundVariable(v)),
        None => Ok(()),
    }
}

impl FoTransduction {
    /// Transduction with the given copies, domain `true`, and every
    /// position and order formula `false`.
    pub fn new(input: Alphabet, output: Alphabet, copies: Vec<String>) -> Result<Self> {
        if copies.is_empty() {
            return Err(Error::InvalidMachine("a transduction needs at least one copy".into()));
        }
        let mut sorted = copies.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != copies.len() {
            return Err(Error::InvalidMachine("duplicate copy name".into()));
        }
        let c = copies.len();
        Ok(FoTransduction {
            pos: vec![vec![Formula::falsity(); output.len()]; c],
            le: vec![vec![Formula::falsity(); c]; c],
            input,
            output,
            copies,
            dom: Formula::True,
            registry: Registry::new(),
        })
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn copies(&self) -> &[String] {
        &self.copies
    }

    pub fn copy(&self, name: &str) -> Result<usize> {
        self.copies
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownState(format!("copy `{name}`")))
    }

    pub fn dom(&self) -> &Formula {
        &self.dom
    }

    pub fn pos(&self, c: usize, b: Letter) -> &Formula {
        &self.pos[c][b as usize]
    }

    pub fn le(&self, c: usize, d: usize) -> &Formula {
        &self.le[c][d]
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn set_dom(&mut self, f: Formula) -> Result<()> {
        check_vars(&f, &[])?;
        self.dom = f;
        Ok(())
    }

    pub fn set_pos(&mut self, c: usize, b: Letter, f: Formula) -> Result<()> {
        check_vars(&f, &["x"])?;
        self.pos[c][b as usize] = f;
        Ok(())
    }

    pub fn set_le(&mut self, c: usize, d: usize, f: Formula) -> Result<()> {
        check_vars(&f, &["x", "y"])?;
        self.le[c][d] = f;
        Ok(())
    }

    pub fn register(&mut self, name: &str, monoid: Arc<TransitionMonoid>) -> Result<()> {
        if monoid.input() != &self.input {
            return Err(Error::AlphabetMismatch(format!("monoid `{name}` reads another alphabet")));
        }
        self.registry.register(name, monoid)
    }

    pub fn in_domain(&self, word: &[Letter]) -> Result<bool> {
        Evaluator::new(word, &self.registry, Context::Word).eval(&self.dom, &[])
    }

    /// Output structure on `word`, or `None` outside the domain. Two labels
    /// holding on one node is an error.
    pub fn output_structure(&self, word: &[Letter]) -> Result<Option<OutputStructure>> {
        let mut ev = Evaluator::new(word, &self.registry, Context::Word);
        if !ev.eval(&self.dom, &[])? {
            return Ok(None);
        }
        let mut nodes = Vec::new();
        for c in 0..self.copies.len() {
            for i in 1..=word.len() {
                let mut label: Option<Letter> = None;
                for b in self.output.letters() {
                    let f = &self.pos[c][b as usize];
                    if f.is_false() || !ev.eval(f, &[("x", i)])? {
                        continue;
                    }
                    if let Some(first) = label {
                        return Err(Error::LabelConflict {
                            copy: self.copies[c].clone(),
                            position: i,
                            first: self.output.symbol(first).to_string(),
                            second: self.output.symbol(b).to_string(),
                        });
                    }
                    label = Some(b);
                }
                if let Some(b) = label {
                    nodes.push((c, i, b));
                }
            }
        }
        let mut order = vec![vec![false; nodes.len()]; nodes.len()];
        for (u, &(c, i, _)) in nodes.iter().enumerate() {
            for (v, &(d, j, _)) in nodes.iter().enumerate() {
                let f = &self.le[c][d];
                order[u][v] = !f.is_false() && ev.eval(f, &[("x", i), ("y", j)])?;
            }
        }
        Ok(Some(OutputStructure { nodes, order }))
    }

    /// Image of `word`, or `None` when it is outside the domain or the order
    /// is not total.
    pub fn eval(&self, word: &[Letter]) -> Result<Option<Word>> {
        Ok(self.output_structure(word)?.and_then(|s| s.linearize()))
    }
}
