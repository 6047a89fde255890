use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::twoway::Sym;

use super::{Context, Formula, Registry, Var};

/// Evaluates formulas on one word.
pub struct Evaluator<'a> {
    word: &'a [Letter],
    registry: &'a Registry,
    context: Context,
    env: Vec<(Var, usize)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(word: &'a [Letter], registry: &'a Registry, context: Context) -> Self {
        Evaluator {
            word,
            registry,
            context,
            env: Vec::new(),
        }
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        match self.context {
            Context::Word => 1..=self.word.len(),
            Context::Marked => 0..=self.word.len() + 1,
        }
    }

    fn sym(&self, pos: usize) -> Sym {
        if pos == 0 {
            Sym::Left
        } else if pos > self.word.len() {
            Sym::Right
        } else {
            Sym::Letter(self.word[pos - 1])
        }
    }

    fn lookup(&self, x: &str) -> Result<usize> {
        self.env
            .iter()
            .rev()
            .find(|(v, _)| v == x)
            .map(|&(_, p)| p)
            .ok_or_else(|| Error::UnboundVariable(x.to_string()))
    }

    /// Class of the letters at positions `from..=to` (clamped to the word).
    fn class(&self, monoid: &str, element: usize, from: usize, to: usize) -> Result<bool> {
        let m = self.registry.get(monoid)?;
        m.check(element)?;
        let lo = from.max(1);
        let hi = to.min(self.word.len());
        let factor = if lo <= hi { &self.word[lo - 1..hi] } else { &[][..] };
        Ok(m.class_of(factor) == element)
    }

    pub fn eval(&mut self, f: &Formula, assignment: &[(&str, usize)]) -> Result<bool> {
        let range = self.positions();
        for &(v, p) in assignment {
            if !range.contains(&p) {
                return Err(Error::UnboundVariable(format!("{v} = {p} is outside the positions")));
            }
            self.env.push((v.to_string(), p));
        }
        let r = self.holds(f);
        let keep = self.env.len() - assignment.len();
        self.env.truncate(keep);
        r
    }

    fn holds(&mut self, f: &Formula) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::Letter(s, x) => self.sym(self.lookup(x)?) == *s,
            Formula::Le(x, y) => self.lookup(x)? <= self.lookup(y)?,
            Formula::FactorClass { monoid, element, x, y } => {
                let (i, j) = (self.lookup(x)?, self.lookup(y)?);
                if i > j {
                    return Err(Error::MalformedClassAtom(format!("{x} = {i} exceeds {y} = {j}")));
                }
                self.class(monoid, *element, i, j)?
            }
            Formula::PrefixClass { monoid, element, x } => {
                let i = self.lookup(x)?;
                if i == 0 {
                    self.class(monoid, *element, 1, 0)?
                } else {
                    self.class(monoid, *element, 1, i - 1)?
                }
            }
            Formula::SuffixClass { monoid, element, x } => {
                let i = self.lookup(x)?;
                self.class(monoid, *element, i + 1, self.word.len())?
            }
            Formula::And(ps) => {
                for p in ps {
                    if !self.holds(p)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(ps) => {
                for p in ps {
                    if self.holds(p)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(p) => !self.holds(p)?,
            Formula::Exists(x, p) => {
                let mut found = false;
                for pos in self.positions() {
                    self.env.push((x.clone(), pos));
                    let r = self.holds(p);
                    self.env.pop();
                    if r? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Formula::Forall(x, p) => {
                let mut all = true;
                for pos in self.positions() {
                    self.env.push((x.clone(), pos));
                    let r = self.holds(p);
                    self.env.pop();
                    if !r? {
                        all = false;
                        break;
                    }
                }
                all
            }
        })
    }
}

/// Evaluates `f` on `word` under `assignment` (variable, position).
pub fn eval(
    f: &Formula,
    word: &[Letter],
    assignment: &[(&str, usize)],
    registry: &Registry,
    context: Context,
) -> Result<bool> {
    Evaluator::new(word, registry, context).eval(f, assignment)
}
