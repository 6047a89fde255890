//! Compilation of formulas to automata over marked alphabets: the word is
//! read together with one bit per free variable marking its position.

use std::collections::HashMap;

use crate::alphabet::{Alphabet, Letter};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::monoid::TransitionMonoid;
use crate::twoway::Sym;

use super::{Context, Formula, Registry, Var};

/// Certificate returned by [`certify_star_free`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarFree {
    pub star_free: bool,
    pub index: usize,
    pub states: usize,
}

struct Compiler<'a> {
    letters: usize,
    base: Alphabet,
    context: Context,
    registry: &'a Registry,
    alphabets: HashMap<usize, Alphabet>,
    valid: HashMap<usize, Dfa>,
    memo: HashMap<(Formula, usize, Vec<usize>), Dfa>,
}

/// Key of an atom automaton; `None` is the rejecting sink.
type Key<K> = Option<K>;

impl<'a> Compiler<'a> {
    fn new(alphabet: &Alphabet, registry: &'a Registry, context: Context) -> Self {
        let base = match context {
            Context::Word => alphabet.clone(),
            Context::Marked => alphabet.with_endmarkers(),
        };
        Compiler {
            letters: alphabet.len(),
            base,
            context,
            registry,
            alphabets: HashMap::new(),
            valid: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn alphabet(&mut self, k: usize) -> Alphabet {
        let base = &self.base;
        self.alphabets
            .entry(k)
            .or_insert_with(|| Alphabet::marked(base, k))
            .clone()
    }

    fn sym(&self, c: usize) -> Sym {
        if c < self.letters {
            Sym::Letter(c as Letter)
        } else if c == self.letters {
            Sym::Left
        } else {
            Sym::Right
        }
    }

    /// Marked words where each of the `k` bits is set exactly once (and, on
    /// tapes, of the shape `^ A* $`).
    fn valid(&mut self, k: usize) -> Dfa {
        if let Some(d) = self.valid.get(&k) {
            return d.clone();
        }
        let alphabet = self.alphabet(k);
        let width = 1usize << k;
        let full = width - 1;
        let marked = self.context == Context::Marked;
        let letters = self.letters;
        let (d, _) = Dfa::explore(
            &alphabet,
            Some((0u8, 0usize)),
            |key: &Key<(u8, usize)>, l| {
                let (shape, mask) = (*key)?;
                let (c, v) = (l as usize / width, l as usize % width);
                if mask & v != 0 {
                    return None;
                }
                let shape = if marked {
                    match (shape, c) {
                        (0, c) if c == letters => 1,
                        (1, c) if c < letters => 1,
                        (1, c) if c == letters + 1 => 2,
                        _ => return None,
                    }
                } else {
                    shape
                };
                Some((shape, mask | v))
            },
            |key| matches!(key, Some((s, m)) if *m == full && (!marked || *s == 2)),
        );
        let d = d.minimize();
        self.valid.insert(k, d.clone());
        d
    }

    fn bit(scope: &[Var], x: &str) -> Result<usize> {
        scope
            .iter()
            .rposition(|v| v == x)
            .ok_or_else(|| Error::UnboundVariable(x.to_string()))
    }

    /// Builds an atom automaton from a step on `(symbol, bits)` and
    /// intersects it with the valid markings.
    fn atom<K, S, F>(&mut self, k: usize, start: K, step: S, accept: F) -> Result<Dfa>
    where
        K: std::hash::Hash + Eq + Clone,
        S: Fn(&K, usize, usize) -> Key<K>,
        F: Fn(&K) -> bool,
    {
        let alphabet = self.alphabet(k);
        let width = 1usize << k;
        let (d, _) = Dfa::explore(
            &alphabet,
            Some(start),
            |key: &Key<K>, l| {
                let key = key.as_ref()?;
                step(key, l as usize / width, l as usize % width)
            },
            |key| key.as_ref().is_some_and(&accept),
        );
        Ok(d.intersect(&self.valid(k))?.minimize())
    }

    fn monoid(&self, name: &str, element: usize) -> Result<std::sync::Arc<TransitionMonoid>> {
        let m = self.registry.get(name)?.clone();
        m.check(element)?;
        if m.input().len() != self.letters
            || m.input().symbols() != &self.base.symbols()[..self.letters]
        {
            return Err(Error::AlphabetMismatch(format!("monoid `{name}` reads another alphabet")));
        }
        Ok(m)
    }

    /// Compiles `f` with the bits given by `scope`; subformulas are shared
    /// when their free variables sit on the same bits.
    fn compile(&mut self, f: &Formula, scope: &mut Vec<Var>) -> Result<Dfa> {
        let bits = f.free_vars().iter().map(|x| Self::bit(scope, x)).collect::<Result<Vec<_>>>()?;
        let key = (f.clone(), scope.len(), bits);
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let d = self.compile_uncached(f, scope)?;
        self.memo.insert(key, d.clone());
        Ok(d)
    }

    fn compile_uncached(&mut self, f: &Formula, scope: &mut Vec<Var>) -> Result<Dfa> {
        let k = scope.len();
        let letters = self.letters;
        let advance = move |m: &TransitionMonoid, e: usize, c: usize| if c < letters { m.step(e, c as Letter) } else { e };
        match f {
            Formula::True => Ok(self.valid(k)),
            Formula::Letter(s, x) => {
                let ix = Self::bit(scope, x)?;
                let target = *s;
                let syms: Vec<Sym> = (0..self.base.len()).map(|c| self.sym(c)).collect();
                self.atom(
                    k,
                    false,
                    move |&seen, c, v| {
                        if v >> ix & 1 == 1 {
                            (!seen && syms[c] == target).then_some(true)
                        } else {
                            Some(seen)
                        }
                    },
                    |&seen| seen,
                )
            }
            Formula::Le(x, y) => {
                let (ix, iy) = (Self::bit(scope, x)?, Self::bit(scope, y)?);
                // 0: neither seen, 1: x seen, 2: both seen
                self.atom(
                    k,
                    0u8,
                    move |&st, _, v| {
                        let (bx, by) = (v >> ix & 1 == 1, v >> iy & 1 == 1);
                        match (st, bx, by) {
                            (0, true, true) => Some(2),
                            (0, true, false) => Some(1),
                            (0, false, true) => None,
                            (1, _, true) => Some(2),
                            (s, _, _) => Some(s),
                        }
                    },
                    |&st| st == 2,
                )
            }
            Formula::FactorClass { monoid, element, x, y } => {
                let m = self.monoid(monoid, *element)?;
                let (ix, iy) = (Self::bit(scope, x)?, Self::bit(scope, y)?);
                let target = *element;
                // (0, _) before x, (1, e) inside, (2, ok) after y
                self.atom(
                    k,
                    (0u8, 0usize),
                    move |&(phase, e), c, v| {
                        let (bx, by) = (v >> ix & 1 == 1, v >> iy & 1 == 1);
                        match phase {
                            0 if bx && by => Some((2, (advance(&m, m.identity(), c) == target) as usize)),
                            0 if bx => Some((1, advance(&m, m.identity(), c))),
                            0 if by => None,
                            0 => Some((0, 0)),
                            1 if by => Some((2, (advance(&m, e, c) == target) as usize)),
                            1 => Some((1, advance(&m, e, c))),
                            _ => Some((phase, e)),
                        }
                    },
                    |&(phase, e)| phase == 2 && e == 1,
                )
            }
            Formula::PrefixClass { monoid, element, x } => {
                let m = self.monoid(monoid, *element)?;
                let ix = Self::bit(scope, x)?;
                let target = *element;
                self.atom(
                    k,
                    (false, m.identity()),
                    move |&(done, e), c, v| {
                        if done {
                            Some((true, e))
                        } else if v >> ix & 1 == 1 {
                            Some((true, (e == target) as usize))
                        } else {
                            Some((false, advance(&m, e, c)))
                        }
                    },
                    |&(done, e)| done && e == 1,
                )
            }
            Formula::SuffixClass { monoid, element, x } => {
                let m = self.monoid(monoid, *element)?;
                let ix = Self::bit(scope, x)?;
                let target = *element;
                self.atom(
                    k,
                    (false, m.identity()),
                    move |&(after, e), c, v| {
                        if after {
                            Some((true, advance(&m, e, c)))
                        } else {
                            Some((v >> ix & 1 == 1, e))
                        }
                    },
                    move |&(after, e)| after && e == target,
                )
            }
            Formula::And(ps) => {
                let mut acc = self.valid(k);
                for p in ps {
                    let d = self.compile(p, scope)?;
                    acc = acc.intersect(&d)?.minimize();
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::Or(ps) => {
                let mut acc: Option<Dfa> = None;
                for p in ps {
                    let d = self.compile(p, scope)?;
                    acc = Some(match acc {
                        None => d,
                        Some(a) => a.union(&d)?.minimize(),
                    });
                }
                Ok(acc.unwrap_or_else(|| Dfa::universal(&self.alphabet(k), false)))
            }
            Formula::Not(p) => {
                let d = self.compile(p, scope)?;
                Ok(self.valid(k).intersect(&d.complement())?.minimize())
            }
            Formula::Exists(x, p) => {
                scope.push(x.clone());
                let inner = self.compile(p, scope);
                scope.pop();
                inner?.project_bit(k)
            }
            Formula::Forall(x, p) => {
                let neg = Formula::Not(Box::new(Formula::Exists(
                    x.clone(),
                    Box::new(Formula::Not(p.clone())),
                )));
                self.compile(&neg, scope)
            }
        }
    }
}

/// Automaton over `A × {0,1}^k` (or, in the marked context, over the tape
/// alphabet `A ∪ {^,$}` marked the same way) accepting the validly marked
/// words that satisfy `f`, bit `j` marking `free_vars[j]`. Class atoms with
/// `x > y` never hold.
pub fn compile_to_dfa(
    f: &Formula,
    free_vars: &[&str],
    alphabet: &Alphabet,
    registry: &Registry,
    context: Context,
) -> Result<Dfa> {
    if let Some(v) = f.free_vars().into_iter().find(|v| !free_vars.contains(&v.as_str())) {
        return Err(Error::UnboundVariable(v));
    }
    let mut c = Compiler::new(alphabet, registry, context);
    let mut scope: Vec<Var> = free_vars.iter().map(|s| s.to_string()).collect();
    Ok(c.compile(f, &mut scope)?.minimize())
}

/// Compiles `f` and checks that the automaton is counter-free.
pub fn certify_star_free(
    f: &Formula,
    free_vars: &[&str],
    alphabet: &Alphabet,
    registry: &Registry,
    context: Context,
) -> Result<StarFree> {
    let d = compile_to_dfa(f, free_vars, alphabet, registry, context)?;
    let cf = d.counter_free();
    match cf.index {
        Some(index) if cf.aperiodic => Ok(StarFree {
            star_free: true,
            index,
            states: d.num_states(),
        }),
        _ => Err(Error::NonAperiodicCompilation(format!(
            "automaton with {} states has a non-aperiodic monoid of size {}",
            d.num_states(),
            cf.monoid_size
        ))),
    }
}
