//! From first-order transductions to look-around transducers: first with
//! formula tests and jumps, then with star-free tests and single steps.

use std::collections::{BTreeMap, HashMap};

use crate::alphabet::{Alphabet, Letter};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::fot::FoTransduction;
use crate::logic::{compile_to_dfa, Context, Formula, Registry};
use crate::lookaround::{LanguageTable, FoLookAroundTransducer, FoTransition, SfLookAroundTransducer, SfTransition, Test};
use crate::twoway::{Move, State, Sym};

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut s = base.to_string();
    while taken.contains(&s) {
        s.push('\'');
    }
    s
}

fn real(v: &str) -> Formula {
    Formula::and([
        Formula::not(Formula::letter(Sym::Left, v)),
        Formula::not(Formula::letter(Sym::Right, v)),
    ])
}

fn subst(f: &Formula, pairs: &[(&str, &str)]) -> Formula {
    let map: BTreeMap<String, String> = pairs.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
    f.rename(&map)
}

/// Formulas of a transduction moved to the marked tape.
struct Lifted<'a> {
    t: &'a FoTransduction,
    pos: Vec<Vec<Formula>>,
    le: Vec<Vec<Formula>>,
    dom: Formula,
}

impl Lifted<'_> {
    fn copies(&self) -> usize {
        self.pos.len()
    }

    /// Node `(c, v)` labelled `b`.
    fn node(&self, c: usize, b: Letter, v: &str) -> Formula {
        Formula::and([real(v), subst(&self.pos[c][b as usize], &[("x", v)])])
    }

    /// Node `(c, v)` exists.
    fn star(&self, c: usize, v: &str) -> Formula {
        Formula::or(self.t.output().letters().map(|b| self.node(c, b, v)))
    }

    fn le(&self, c: usize, d: usize, u: &str, v: &str) -> Formula {
        subst(&self.le[c][d], &[("x", u), ("y", v)])
    }

    /// Every node `(d, z)` satisfies `side(d)`.
    fn all_nodes(&self, side: impl Fn(usize) -> Formula) -> Formula {
        Formula::forall(
            "z",
            Formula::and((0..self.copies()).map(|d| Formula::implies(self.star(d, "z"), side(d)))),
        )
    }

    /// `(c', y)` is the successor of `(c, x)` in the output order.
    fn successor(&self, c: usize, c2: usize) -> Formula {
        Formula::and([
            self.le(c, c2, "x", "y"),
            Formula::not(self.le(c2, c, "y", "x")),
            self.all_nodes(|d| Formula::or([self.le(d, c, "z", "x"), self.le(c2, d, "y", "z")])),
        ])
    }

    fn first(&self, c: usize) -> Formula {
        Formula::and([self.star(c, "y"), self.all_nodes(|d| self.le(c, d, "y", "z"))])
    }

    fn last(&self, c: usize) -> Formula {
        Formula::and([self.star(c, "x"), self.all_nodes(|d| self.le(d, c, "z", "x"))])
    }
}

/// Look-around transducer that visits the output nodes in order: states are
/// the copies plus an initial and a final state, each transition emits the
/// label of the current node and jumps to the next one.
pub fn fot_to_fo_lookaround(t: &FoTransduction) -> Result<FoLookAroundTransducer> {
    let c = t.copies().len();
    let lifted = Lifted {
        t,
        pos: (0..c)
            .map(|i| t.output().letters().map(|b| t.pos(i, b).relativize()).collect())
            .collect(),
        le: (0..c).map(|i| (0..c).map(|j| t.le(i, j).relativize()).collect()).collect(),
        dom: t.dom().relativize(),
    };
    let mut names: Vec<String> = t.copies().to_vec();
    let init_name = fresh_name(&names, "i");
    names.push(init_name);
    let final_name = fresh_name(&names, "f");
    names.push(final_name);
    let (init, fin) = (c as State, c as State + 1);
    let mut finals = vec![false; c + 2];
    finals[fin as usize] = true;
    let mut out = FoLookAroundTransducer::new(
        names,
        t.input().clone(),
        t.output().clone(),
        init,
        finals,
        t.registry().clone(),
    )?;
    let at_start = Formula::and([Formula::letter(Sym::Left, "x"), lifted.dom.clone()]);
    let to_end = Formula::letter(Sym::Right, "y");
    let mut push = |from: State, test: Formula, target: State, output: Vec<Letter>, jump: Formula| {
        if test.is_false() || jump.is_false() {
            return Ok(());
        }
        out.add_transition(FoTransition { from, test, target, output, jump })
    };
    for ci in 0..c {
        let first = lifted.first(ci);
        push(
            init,
            Formula::and([at_start.clone(), Formula::exists("y", first.clone())]),
            ci as State,
            Vec::new(),
            first,
        )?;
    }
    let nothing = Formula::not(Formula::exists("y", Formula::or((0..c).map(|ci| lifted.star(ci, "y")))));
    push(init, Formula::and([at_start.clone(), nothing]), fin, Vec::new(), to_end.clone())?;
    for ci in 0..c {
        for b in t.output().letters() {
            let here = lifted.node(ci, b, "x");
            if here.is_false() {
                continue;
            }
            for cj in 0..c {
                let jump = Formula::and([
                    lifted.successor(ci, cj),
                    lifted.star(ci, "x"),
                    lifted.star(cj, "y"),
                    lifted.dom.clone(),
                ]);
                push(
                    ci as State,
                    Formula::and([here.clone(), Formula::exists("y", jump.clone())]),
                    cj as State,
                    vec![b],
                    jump,
                )?;
            }
            push(
                ci as State,
                Formula::and([here.clone(), lifted.last(ci), lifted.dom.clone()]),
                fin,
                vec![b],
                to_end.clone(),
            )?;
        }
    }
    Ok(out)
}

/// Automaton over the marked tape alphabet with the letter encoding of
/// [`compile_to_dfa`].
struct Marked {
    dfa: Dfa,
    bits: usize,
    letters: usize,
}

impl Marked {
    fn compile(f: &Formula, vars: &[&str], alphabet: &Alphabet, registry: &Registry) -> Result<Marked> {
        Ok(Marked {
            dfa: compile_to_dfa(f, vars, alphabet, registry, Context::Marked)?,
            bits: vars.len(),
            letters: alphabet.len(),
        })
    }

    fn code(&self, sym: Sym) -> usize {
        match sym {
            Sym::Letter(a) => a as usize,
            Sym::Left => self.letters,
            Sym::Right => self.letters + 1,
        }
    }

    fn step(&self, s: u32, sym: Sym, marks: usize) -> u32 {
        self.dfa.step(s, ((self.code(sym) << self.bits) | marks) as Letter)
    }

    fn states(&self) -> u32 {
        self.dfa.num_states() as u32
    }

    /// States from which `sym` with `marks`, followed by the rest encoded
    /// in `rest`, is accepted.
    fn pre_image(&self, sym: Sym, marks: usize, rest: &[bool]) -> Vec<bool> {
        (0..self.states()).map(|s| rest[self.step(s, sym, marks) as usize]).collect()
    }
}

const X: usize = 1;
const Y: usize = 2;

/// What happens when a transition's test is checked at one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Outcome {
    Off,
    Stay,
    /// Walk right; state of the jump automaton after the marked `x`.
    Right(u32),
    /// Walk left; states before the current cell from which the rest is
    /// accepted.
    Left(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Prefix {
    d: u32,
    p: u32,
    /// States reachable with `y` marked somewhere in the prefix.
    y: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Suffix {
    /// Test automaton states accepting the rest.
    gd: Vec<bool>,
    /// Jump automaton states accepting the rest with no mark.
    g0: Vec<bool>,
    /// Jump automaton states accepting the rest with `y` marked once.
    g1: Vec<bool>,
}

/// Per-transition automata tracking prefix and suffix types.
struct Split {
    test: Marked,
    jump: Marked,
    prefix_dfa: Dfa,
    prefixes: Vec<Prefix>,
    suffix_dfa: Dfa,
    suffixes: Vec<Suffix>,
}

impl Split {
    fn new(test: Marked, jump: Marked, alphabet: &Alphabet) -> Split {
        let (di, pi) = (test.dfa.initial(), jump.dfa.initial());
        let start = Prefix {
            d: test.step(di, Sym::Left, 0),
            p: jump.step(pi, Sym::Left, 0),
            y: vec![jump.step(pi, Sym::Left, Y)],
        };
        let (prefix_dfa, prefixes) = Dfa::explore(
            alphabet,
            start,
            |k: &Prefix, a| {
                let sym = Sym::Letter(a);
                let mut y: Vec<u32> = k.y.iter().map(|&r| jump.step(r, sym, 0)).collect();
                y.push(jump.step(k.p, sym, Y));
                y.sort_unstable();
                y.dedup();
                Prefix { d: test.step(k.d, sym, 0), p: jump.step(k.p, sym, 0), y }
            },
            |_| false,
        );
        let fd: Vec<bool> = test.dfa.finals().to_vec();
        let fp: Vec<bool> = jump.dfa.finals().to_vec();
        let end = Suffix {
            gd: test.pre_image(Sym::Right, 0, &fd),
            g0: jump.pre_image(Sym::Right, 0, &fp),
            g1: jump.pre_image(Sym::Right, Y, &fp),
        };
        let (suffix_dfa, suffixes) = Dfa::explore(
            alphabet,
            end,
            |k: &Suffix, a| {
                let sym = Sym::Letter(a);
                let g1 = (0..jump.states())
                    .map(|r| k.g1[jump.step(r, sym, 0) as usize] || k.g0[jump.step(r, sym, Y) as usize])
                    .collect();
                Suffix { gd: test.pre_image(sym, 0, &k.gd), g0: jump.pre_image(sym, 0, &k.g0), g1 }
            },
            |_| false,
        );
        Split { test, jump, prefix_dfa, prefixes, suffix_dfa, suffixes }
    }

    /// Prefix type before `^`.
    fn before_start(&self) -> Prefix {
        Prefix { d: self.test.dfa.initial(), p: self.jump.dfa.initial(), y: Vec::new() }
    }

    /// Suffix type after `$`.
    fn after_end(&self) -> Suffix {
        Suffix { gd: self.test.dfa.finals().to_vec(), g0: self.jump.dfa.finals().to_vec(), g1: vec![false; self.jump.states() as usize] }
    }

    fn outcome(&self, pre: &Prefix, sym: Sym, suf: &Suffix) -> Result<Outcome> {
        if !suf.gd[self.test.step(pre.d, sym, X) as usize] {
            return Ok(Outcome::Off);
        }
        let stay = suf.g0[self.jump.step(pre.p, sym, X | Y) as usize];
        let e = self.jump.step(pre.p, sym, X);
        let right = suf.g1[e as usize];
        let left = pre.y.iter().any(|&r| suf.g0[self.jump.step(r, sym, X) as usize]);
        match (stay, right, left) {
            (false, false, false) => Ok(Outcome::Off),
            (true, false, false) => Ok(Outcome::Stay),
            (false, true, false) => Ok(Outcome::Right(e)),
            (false, false, true) => Ok(Outcome::Left(self.jump.pre_image(sym, X, &suf.g0))),
            _ => Err(Error::DirectionAmbiguity(format!(
                "jump targets on several sides (stay {stay}, right {right}, left {left})"
            ))),
        }
    }

    fn prefix_language(&self, members: &[usize]) -> Dfa {
        let mut mask = vec![false; self.prefixes.len()];
        members.iter().for_each(|&i| mask[i] = true);
        self.prefix_dfa.with_finals(mask).minimize()
    }

    fn suffix_language(&self, members: &[usize]) -> Dfa {
        let mut mask = vec![false; self.suffixes.len()];
        members.iter().for_each(|&i| mask[i] = true);
        self.suffix_dfa.with_finals(mask).reverse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Walker {
    Right(usize, u32),
    Left(usize, Vec<bool>),
}

struct Assembler {
    names: Vec<String>,
    languages: LanguageTable,
    universal: usize,
    transitions: Vec<SfTransition>,
    walkers: HashMap<Walker, State>,
    queue: Vec<Walker>,
}

impl Assembler {
    fn walker(&mut self, w: Walker) -> State {
        if let Some(&s) = self.walkers.get(&w) {
            return s;
        }
        let s = self.names.len() as State;
        let label = match &w {
            Walker::Right(t, e) => format!("walk{t}>{e}"),
            Walker::Left(t, _) => format!("walk{t}<{}", self.walkers.len()),
        };
        self.names.push(fresh_name(&self.names, &label));
        self.walkers.insert(w.clone(), s);
        self.queue.push(w);
        s
    }

    #[allow(clippy::too_many_arguments)]
    fn emit(&mut self, from: State, prefix: Option<Dfa>, sym: Sym, suffix: Option<Dfa>, target: State, output: Vec<Letter>, mv: Move) {
        let mut index = |d: Option<Dfa>| match d {
            None => Some(self.universal),
            Some(d) if d.is_empty() => None,
            Some(d) => Some(self.languages.insert(d)),
        };
        let (Some(prefix), Some(suffix)) = (index(prefix), index(suffix)) else { return };
        self.transitions.push(SfTransition { from, test: Test { prefix, sym, suffix }, target, output, mv });
    }
}

/// Star-free look-around transducer equivalent to `t`. Tests become
/// prefix/suffix languages read off the compiled automata at the marked
/// position; jumps become walks that stop where marking `y` makes the rest
/// of the tape accepted.
pub fn fo_la_to_sf_la(t: &FoLookAroundTransducer) -> Result<SfLookAroundTransducer> {
    let alphabet = t.input();
    let mut languages = LanguageTable::default();
    let universal = languages.insert(Dfa::universal(alphabet, true));
    let mut asm = Assembler {
        names: t.state_names().to_vec(),
        languages,
        universal,
        transitions: Vec::new(),
        walkers: HashMap::new(),
        queue: Vec::new(),
    };
    let mut cache: HashMap<(Formula, usize), Marked> = HashMap::new();
    let mut compile = |f: &Formula, vars: &[&str]| -> Result<Marked> {
        let key = (f.clone(), vars.len());
        if let Some(m) = cache.get(&key) {
            return Ok(Marked { dfa: m.dfa.clone(), bits: m.bits, letters: m.letters });
        }
        let m = Marked::compile(f, vars, alphabet, t.registry())?;
        cache.insert(key, Marked { dfa: m.dfa.clone(), bits: m.bits, letters: m.letters });
        Ok(m)
    };
    let mut splits = Vec::with_capacity(t.transitions().len());
    for tr in t.transitions() {
        splits.push(Split::new(compile(&tr.test, &["x"])?, compile(&tr.jump, &["x", "y"])?, alphabet));
    }
    for (ti, tr) in t.transitions().iter().enumerate() {
        let sp = &splits[ti];
        let fire = |asm: &mut Assembler, pre: Option<Dfa>, sym: Sym, suf: Option<Dfa>, o: &Outcome| {
            let (target, mv) = match o {
                Outcome::Off => return,
                Outcome::Stay => (tr.target, Move::Stay),
                Outcome::Right(e) => (asm.walker(Walker::Right(ti, *e)), Move::Right),
                Outcome::Left(r) => (asm.walker(Walker::Left(ti, r.clone())), Move::Left),
            };
            asm.emit(tr.from, pre, sym, suf, target, tr.output.clone(), mv);
        };
        // `^`: the prefix is empty, the suffix is the whole word
        let start = sp.before_start();
        let mut by_outcome: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
        for (si, s) in sp.suffixes.iter().enumerate() {
            by_outcome.entry(sp.outcome(&start, Sym::Left, s)?).or_default().push(si);
        }
        for (o, sufs) in by_outcome {
            fire(&mut asm, None, Sym::Left, Some(sp.suffix_language(&sufs)), &o);
        }
        // `$`: the prefix is the whole word, the suffix is empty
        let end = sp.after_end();
        let mut by_outcome: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
        for (pi, p) in sp.prefixes.iter().enumerate() {
            by_outcome.entry(sp.outcome(p, Sym::Right, &end)?).or_default().push(pi);
        }
        for (o, pres) in by_outcome {
            fire(&mut asm, Some(sp.prefix_language(&pres)), Sym::Right, None, &o);
        }
        // letters: group prefix types by their row of outcomes
        for a in alphabet.letters() {
            let sym = Sym::Letter(a);
            let mut rows: BTreeMap<Vec<Outcome>, Vec<usize>> = BTreeMap::new();
            for (pi, p) in sp.prefixes.iter().enumerate() {
                let row = sp.suffixes.iter().map(|s| sp.outcome(p, sym, s)).collect::<Result<Vec<_>>>()?;
                rows.entry(row).or_default().push(pi);
            }
            for (row, pres) in rows {
                let mut cols: BTreeMap<&Outcome, Vec<usize>> = BTreeMap::new();
                for (si, o) in row.iter().enumerate() {
                    cols.entry(o).or_default().push(si);
                }
                for (o, sufs) in cols {
                    fire(&mut asm, Some(sp.prefix_language(&pres)), sym, Some(sp.suffix_language(&sufs)), o);
                }
            }
        }
    }
    while let Some(w) = asm.queue.pop() {
        let from = asm.walkers[&w];
        match w {
            Walker::Right(ti, e) => {
                let sp = &splits[ti];
                let target = t.transitions()[ti].target;
                if sp.after_end().g0[sp.jump.step(e, Sym::Right, Y) as usize] {
                    asm.emit(from, None, Sym::Right, None, target, Vec::new(), Move::Stay);
                }
                for a in alphabet.letters() {
                    let sym = Sym::Letter(a);
                    let hit = sp.jump.step(e, sym, Y) as usize;
                    let (yes, no): (Vec<usize>, Vec<usize>) =
                        (0..sp.suffixes.len()).partition(|&si| sp.suffixes[si].g0[hit]);
                    asm.emit(from, None, sym, Some(sp.suffix_language(&yes)), target, Vec::new(), Move::Stay);
                    if !no.is_empty() {
                        let next = asm.walker(Walker::Right(ti, sp.jump.step(e, sym, 0)));
                        asm.emit(from, None, sym, Some(sp.suffix_language(&no)), next, Vec::new(), Move::Right);
                    }
                }
            }
            Walker::Left(ti, r) => {
                let sp = &splits[ti];
                let target = t.transitions()[ti].target;
                if r[sp.jump.step(sp.before_start().p, Sym::Left, Y) as usize] {
                    asm.emit(from, None, Sym::Left, None, target, Vec::new(), Move::Stay);
                }
                for a in alphabet.letters() {
                    let sym = Sym::Letter(a);
                    let (yes, no): (Vec<usize>, Vec<usize>) =
                        (0..sp.prefixes.len()).partition(|&pi| r[sp.jump.step(sp.prefixes[pi].p, sym, Y) as usize]);
                    asm.emit(from, Some(sp.prefix_language(&yes)), sym, None, target, Vec::new(), Move::Stay);
                    if !no.is_empty() {
                        let next = asm.walker(Walker::Left(ti, sp.jump.pre_image(sym, 0, &r)));
                        asm.emit(from, Some(sp.prefix_language(&no)), sym, None, next, Vec::new(), Move::Left);
                    }
                }
            }
        }
    }
    let finals = (0..asm.names.len() as State).map(|q| (q as usize) < t.num_states() && t.is_final(q)).collect();
    let mut machine = SfLookAroundTransducer::new(asm.names, alphabet.clone(), t.output().clone(), t.initial(), finals)?;
    let index = asm.languages.list.iter().map(|l| machine.add_language(l)).collect::<Result<Vec<_>>>()?;
    for mut tr in asm.transitions {
        tr.test.prefix = index[tr.test.prefix];
        tr.test.suffix = index[tr.test.suffix];
        machine.add_transition(tr)?;
    }
    Ok(machine)
}
