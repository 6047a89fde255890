//! Deterministic two-way transducers over endmarked tapes.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Letter, Word, LEFT_MARK, RIGHT_MARK};
use crate::error::{Error, Result};

pub type State = u32;

/// A tape symbol: a letter of the input alphabet or one of the endmarkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Left,
    Letter(Letter),
    Right,
}

impl Sym {
    pub fn format(self, alphabet: &Alphabet) -> String {
        match self {
            Sym::Left => LEFT_MARK.to_string(),
            Sym::Right => RIGHT_MARK.to_string(),
            Sym::Letter(a) => alphabet.symbol(a).to_string(),
        }
    }

    pub fn parse(alphabet: &Alphabet, token: &str) -> Result<Sym> {
        match token {
            LEFT_MARK => Ok(Sym::Left),
            RIGHT_MARK => Ok(Sym::Right),
            _ => alphabet.letter(token).map(Sym::Letter),
        }
    }
}

/// Head move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn delta(self) -> isize {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn from_delta(d: isize) -> Result<Move> {
        match d {
            -1 => Ok(Move::Left),
            0 => Ok(Move::Stay),
            1 => Ok(Move::Right),
            _ => Err(Error::InvalidMachine(format!("move {d} is not in {{-1,0,+1}}"))),
        }
    }

    pub fn negate(self) -> Move {
        match self {
            Move::Left => Move::Right,
            Move::Stay => Move::Stay,
            Move::Right => Move::Left,
        }
    }

    pub fn format(self) -> &'static str {
        match self {
            Move::Left => "-1",
            Move::Stay => "0",
            Move::Right => "+1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub target: State,
    pub output: Word,
    pub mv: Move,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayTransducer {
    states: Vec<String>,
    input: Alphabet,
    output: Alphabet,
    initial: State,
    finals: Vec<bool>,
    table: Vec<Option<Transition>>,
}

/// Why a run produced no output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    /// No transition applies at a letter or at the left endmarker.
    Blocked,
    /// A configuration repeated.
    Loop,
    /// Stopped on the right endmarker in a non-final state.
    Rejected,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Blocked => "blocked",
            Reason::Loop => "loop",
            Reason::Rejected => "rejected",
        }
    }
}

/// Configurations `(state, position)` with position 0 on `^` and `|w|+1` on
/// `$`, plus the production of each step.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Run {
    pub configs: Vec<(State, usize)>,
    pub productions: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accepted { output: Word, run: Run },
    Undefined { reason: Reason, run: Run },
}

impl Outcome {
    pub fn output(&self) -> Option<&Word> {
        match self {
            Outcome::Accepted { output, .. } => Some(output),
            Outcome::Undefined { .. } => None,
        }
    }

    pub fn run(&self) -> &Run {
        match self {
            Outcome::Accepted { run, .. } | Outcome::Undefined { run, .. } => run,
        }
    }
}

/// Subsequence of a run restricted to selected positions, renamed by rank
/// (1-based) inside the selection.
pub type ContextPath = Vec<(State, usize)>;

impl TwoWayTransducer {
    pub fn new(
        states: Vec<String>,
        input: Alphabet,
        output: Alphabet,
        initial: State,
        finals: Vec<bool>,
    ) -> Result<Self> {
        if states.is_empty() || initial as usize >= states.len() || finals.len() != states.len() {
            return Err(Error::InvalidMachine("bad state declaration".into()));
        }
        let mut seen = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if seen.insert(s.as_str(), i).is_some() {
                return Err(Error::InvalidMachine(format!("duplicate state `{s}`")));
            }
        }
        let width = input.len() + 2;
        Ok(TwoWayTransducer {
            table: vec![None; states.len() * width],
            states,
            input,
            output,
            initial,
            finals,
        })
    }

    fn slot(&self, q: State, sym: Sym) -> usize {
        let width = self.input.len() + 2;
        let col = match sym {
            Sym::Letter(a) => a as usize,
            Sym::Left => self.input.len(),
            Sym::Right => self.input.len() + 1,
        };
        q as usize * width + col
    }

    pub fn set_transition(&mut self, from: State, sym: Sym, target: State, output: Word, mv: Move) -> Result<()> {
        let n = self.states.len();
        if from as usize >= n {
            return Err(Error::UnknownState(format!("#{from}")));
        }
        if target as usize >= n {
            return Err(Error::UnknownState(format!("#{target}")));
        }
        if let Sym::Letter(a) = sym {
            if a as usize >= self.input.len() {
                return Err(Error::SymbolNotInAlphabet(format!("#{a}")));
            }
        }
        if output.iter().any(|&b| b as usize >= self.output.len()) {
            return Err(Error::SymbolNotInAlphabet("output letter".into()));
        }
        match (sym, mv) {
            (Sym::Left, Move::Left) => {
                return Err(Error::InvalidMachine(format!(
                    "state `{}` moves left from `{LEFT_MARK}`",
                    self.states[from as usize]
                )))
            }
            (Sym::Right, Move::Right) => {
                return Err(Error::InvalidMachine(format!(
                    "state `{}` moves right from `{RIGHT_MARK}`",
                    self.states[from as usize]
                )))
            }
            _ => {}
        }
        let slot = self.slot(from, sym);
        self.table[slot] = Some(Transition { target, output, mv });
        Ok(())
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

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: State) -> &str {
        &self.states[q as usize]
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

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn transition(&self, q: State, sym: Sym) -> Option<&Transition> {
        self.table[self.slot(q, sym)].as_ref()
    }

    /// All symbols in table order: letters, then `^`, then `$`.
    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        self.input
            .letters()
            .map(Sym::Letter)
            .chain([Sym::Left, Sym::Right])
    }

    /// Defined transitions, ordered by state then `^`, letters, `$`.
    pub fn transitions(&self) -> Vec<(State, Sym, &Transition)> {
        let mut out = Vec::new();
        for q in 0..self.states.len() as State {
            let syms = std::iter::once(Sym::Left)
                .chain(self.input.letters().map(Sym::Letter))
                .chain(std::iter::once(Sym::Right));
            for sym in syms {
                if let Some(t) = self.transition(q, sym) {
                    out.push((q, sym, t));
                }
            }
        }
        out
    }

    pub fn num_transitions(&self) -> usize {
        self.table.iter().flatten().count()
    }

    pub fn max_production(&self) -> usize {
        self.table
            .iter()
            .flatten()
            .map(|t| t.output.len())
            .max()
            .unwrap_or(0)
    }

    pub fn is_normalized(&self) -> bool {
        self.max_production() <= 1
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

    fn check_word(&self, word: &[Letter]) -> Result<()> {
        match word.iter().find(|&&a| a as usize >= self.input.len()) {
            Some(a) => Err(Error::SymbolNotInAlphabet(format!("#{a}"))),
            None => Ok(()),
        }
    }

    /// Runs the machine from `(q0, 0)`. The run stops as soon as it stands on
    /// `$` in a final state.
    pub fn simulate(&self, word: &[Letter]) -> Result<Outcome> {
        self.check_word(word)?;
        let mut run = Run::default();
        let mut output = Vec::new();
        let reason = self.drive(word, |q, pos, prod| {
            run.configs.push((q, pos));
            if let Some(p) = prod {
                output.extend_from_slice(p);
                run.productions.push(p.clone());
            }
        });
        Ok(match reason {
            None => Outcome::Accepted { output, run },
            Some(reason) => Outcome::Undefined { reason, run },
        })
    }

    /// Output only, without recording the run.
    pub fn run(&self, word: &[Letter]) -> Option<Word> {
        if self.check_word(word).is_err() {
            return None;
        }
        let mut output = Vec::new();
        let reason = self.drive(word, |_, _, prod| {
            if let Some(p) = prod {
                output.extend_from_slice(p);
            }
        });
        reason.is_none().then_some(output)
    }

    /// Core loop. `visit` sees each configuration, together with the
    /// production of the step that led to it.
    fn drive<F: FnMut(State, usize, Option<&Word>)>(&self, word: &[Letter], mut visit: F) -> Option<Reason> {
        let positions = word.len() + 2;
        let mut seen = vec![false; self.states.len() * positions];
        let (mut q, mut pos) = (self.initial, 0usize);
        visit(q, pos, None);
        loop {
            let key = q as usize * positions + pos;
            if seen[key] {
                return Some(Reason::Loop);
            }
            seen[key] = true;
            let sym = Self::sym_at(word, pos);
            if sym == Sym::Right && self.is_final(q) {
                return None;
            }
            let Some(t) = self.transition(q, sym) else {
                return Some(if sym == Sym::Right { Reason::Rejected } else { Reason::Blocked });
            };
            q = t.target;
            pos = (pos as isize + t.mv.delta()) as usize;
            visit(q, pos, Some(&t.output));
        }
    }

    /// Exit of the run started inside `word` at its first (`from_left`) or
    /// last position in state `q`, as `(state, exits_right)`. `None` when the
    /// run blocks or loops inside the word. For the empty word the head
    /// crosses straight through.
    pub fn traverse(&self, word: &[Letter], q: State, from_left: bool) -> Option<(State, bool)> {
        let n = word.len();
        if n == 0 {
            return Some((q, from_left));
        }
        let mut seen = vec![false; self.states.len() * n];
        let (mut q, mut pos) = (q, if from_left { 1isize } else { n as isize });
        loop {
            if pos == 0 {
                return Some((q, false));
            }
            if pos == n as isize + 1 {
                return Some((q, true));
            }
            let key = q as usize * n + (pos as usize - 1);
            if seen[key] {
                return None;
            }
            seen[key] = true;
            let t = self.transition(q, Sym::Letter(word[pos as usize - 1]))?;
            q = t.target;
            pos += t.mv.delta();
        }
    }

    /// Same machine with every production of length above one split into a
    /// chain of single-letter emissions that stay in place.
    pub fn normalize(&self) -> TwoWayTransducer {
        if self.is_normalized() {
            return self.clone();
        }
        let mut names = self.states.clone();
        let mut finals = self.finals.clone();
        let mut rows: Vec<(State, Sym, State, Word, Move)> = Vec::new();
        let taken: std::collections::HashSet<String> = self.states.iter().cloned().collect();
        for (q, sym, t) in self.transitions() {
            if t.output.len() <= 1 {
                rows.push((q, sym, t.target, t.output.clone(), t.mv));
                continue;
            }
            let mut from = q;
            let k = t.output.len();
            for (i, &b) in t.output.iter().enumerate() {
                if i + 1 == k {
                    rows.push((from, sym, t.target, vec![b], t.mv));
                } else {
                    let mut name = format!("{}~{}~{}", self.state_name(q), sym.format(&self.input), i + 1);
                    while taken.contains(&name) {
                        name.push('\'');
                    }
                    names.push(name);
                    finals.push(false);
                    let next = (names.len() - 1) as State;
                    rows.push((from, sym, next, vec![b], Move::Stay));
                    from = next;
                }
            }
        }
        let mut t = TwoWayTransducer::new(names, self.input.clone(), self.output.clone(), self.initial, finals)
            .expect("normalization keeps a valid declaration");
        for (q, sym, target, out, mv) in rows {
            t.set_transition(q, sym, target, out, mv)
                .expect("normalization keeps valid transitions");
        }
        t
    }

    /// Machine that runs on the reversed word and emits the same output. It
    /// first walks to `$`, then replays the mirrored run (moves negated,
    /// endmarkers swapped), and finally walks back to `$` once the mirrored
    /// run stands on `^` in a final state.
    pub fn mirror(&self) -> TwoWayTransducer {
        let n = self.states.len();
        let fresh = |base: &str| {
            let mut s = base.to_string();
            while self.states.contains(&s) {
                s.push('\'');
            }
            s
        };
        let mut names = self.states.clone();
        names.push(fresh("seek"));
        names.push(fresh("finish"));
        let seek = n as State;
        let finish = n as State + 1;
        let mut finals = vec![false; n + 2];
        finals[finish as usize] = true;
        let mut t = TwoWayTransducer::new(names, self.input.clone(), self.output.clone(), seek, finals)
            .expect("mirror keeps a valid declaration");
        let swap = |s: Sym| match s {
            Sym::Left => Sym::Right,
            Sym::Right => Sym::Left,
            x => x,
        };
        for (q, sym, tr) in self.transitions() {
            if sym == Sym::Right && self.is_final(q) {
                continue;
            }
            t.set_transition(q, swap(sym), tr.target, tr.output.clone(), tr.mv.negate())
                .expect("mirrored moves respect the endmarkers");
        }
        for q in 0..n as State {
            if self.is_final(q) {
                t.set_transition(q, Sym::Left, finish, Vec::new(), Move::Right)
                    .expect("valid");
            }
        }
        t.set_transition(seek, Sym::Left, seek, Vec::new(), Move::Right).expect("valid");
        t.set_transition(seek, Sym::Right, self.initial, Vec::new(), Move::Stay)
            .expect("valid");
        for a in self.input.letters() {
            t.set_transition(seek, Sym::Letter(a), seek, Vec::new(), Move::Right)
                .expect("valid");
            t.set_transition(finish, Sym::Letter(a), finish, Vec::new(), Move::Right)
                .expect("valid");
        }
        t
    }

    /// Keeps only states reachable from the initial state in the transition
    /// graph, renumbered in discovery order.
    pub fn trim(&self) -> TwoWayTransducer {
        let mut order = vec![self.initial];
        let mut index = vec![u32::MAX; self.states.len()];
        index[self.initial as usize] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for sym in self.symbols().collect::<Vec<_>>() {
                if let Some(t) = self.transition(q, sym) {
                    if index[t.target as usize] == u32::MAX {
                        index[t.target as usize] = order.len() as u32;
                        order.push(t.target);
                    }
                }
            }
        }
        let names = order.iter().map(|&q| self.states[q as usize].clone()).collect();
        let finals = order.iter().map(|&q| self.finals[q as usize]).collect();
        let mut t = TwoWayTransducer::new(names, self.input.clone(), self.output.clone(), 0, finals)
            .expect("trim keeps a valid declaration");
        for &q in &order {
            for sym in self.symbols().collect::<Vec<_>>() {
                if let Some(tr) = self.transition(q, sym) {
                    t.set_transition(
                        index[q as usize],
                        sym,
                        index[tr.target as usize],
                        tr.output.clone(),
                        tr.mv,
                    )
                    .expect("valid");
                }
            }
        }
        t
    }

    /// Merges states that behave identically: same finality and, on every
    /// symbol, the same production, move and (merged) target. Transitions of
    /// final states on `$` are never taken and are ignored. Each class keeps
    /// the name of its first member.
    pub fn reduce(&self) -> TwoWayTransducer {
        let n = self.states.len();
        let syms: Vec<Sym> = self.symbols().collect();
        let mut class: Vec<usize> = self.finals.iter().map(|&f| f as usize).collect();
        let mut count = 0;
        loop {
            let mut ids: HashMap<(usize, Vec<Option<(&[Letter], Move, usize)>>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n as State)
                .map(|q| {
                    let row = syms
                        .iter()
                        .map(|&sym| {
                            if sym == Sym::Right && self.finals[q as usize] {
                                return None;
                            }
                            self.transition(q, sym)
                                .map(|t| (t.output.as_slice(), t.mv, class[t.target as usize]))
                        })
                        .collect();
                    let len = ids.len();
                    *ids.entry((class[q as usize], row)).or_insert(len)
                })
                .collect();
            let stable = ids.len() == count;
            count = ids.len();
            class = next;
            if stable {
                break;
            }
        }
        let mut first = vec![None; count];
        for q in 0..n {
            first[class[q]].get_or_insert(q);
        }
        let reps: Vec<usize> = first.into_iter().map(|q| q.expect("classes are non-empty")).collect();
        let names = reps.iter().map(|&q| self.states[q].clone()).collect();
        let finals = reps.iter().map(|&q| self.finals[q]).collect();
        let mut t = TwoWayTransducer::new(names, self.input.clone(), self.output.clone(), class[self.initial as usize] as State, finals)
            .expect("classes have distinct representatives");
        for (c, &q) in reps.iter().enumerate() {
            for &sym in &syms {
                if sym == Sym::Right && self.finals[q] {
                    continue;
                }
                if let Some(tr) = self.transition(q as State, sym) {
                    t.set_transition(c as State, sym, class[tr.target as usize] as State, tr.output.clone(), tr.mv)
                        .expect("valid");
                }
            }
        }
        t.trim()
    }

    /// Tabular dump of a run: one row per configuration.
    pub fn trace_table(&self, word: &[Letter], run: &Run) -> String {
        let mut out = String::from("step\tpos\tsym\tstate\toutput\n");
        for (i, &(q, pos)) in run.configs.iter().enumerate() {
            let sym = Self::sym_at(word, pos).format(&self.input);
            let prod = if i == 0 {
                String::new()
            } else {
                self.output.format_word(&run.productions[i - 1])
            };
            let _ = writeln!(out, "{i}\t{pos}\t{sym}\t{}\t{prod}", self.state_name(q));
        }
        out
    }
}

/// Restriction of a run to the positions in `positions` (strictly increasing),
/// each renamed to its 1-based rank.
pub fn context_path(run: &Run, positions: &[usize]) -> ContextPath {
    run.configs
        .iter()
        .filter_map(|&(q, pos)| {
            positions
                .binary_search(&pos)
                .ok()
                .map(|rank| (q, rank + 1))
        })
        .collect()
}
