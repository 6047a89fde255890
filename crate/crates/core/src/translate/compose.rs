//! Composition of a sequential transducer `A` followed by a two-way
//! transducer `B`, as a single two-way transducer reading `A`'s input.
//!
//! The composite keeps `B`'s state and the position of `B`'s head inside the
//! block `A` produces at the current input position. Forward moves recompute
//! `A` one step; backward moves recover `A`'s previous state, collecting
//! candidate predecessors and walking left until only one remains, then
//! walking right again with two competing runs until they merge.

use std::collections::{BTreeSet, HashMap};

use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::sequential::{SeqState, SequentialTransducer};
use crate::twoway::{Move, State, Sym, TwoWayTransducer};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Mode {
    /// `B` reads `^` in state `p`.
    Start(State),
    /// `B` in state `p` reads letter `i` of the block `A` emits from state
    /// `q` on the current letter.
    Run(State, SeqState, usize),
    /// `B` in state `p` needs the first letter of the next non-empty block;
    /// `q` is `A`'s state before the current position.
    Seek(State, SeqState),
    /// `B` in state `p` needs the last letter of the previous non-empty
    /// block; `q` is `A`'s state after the current position.
    Back(State, SeqState),
    /// Pairs `(candidate, state after the current position)` such that the
    /// state leads to the candidate at the boundary being resolved.
    Rel(State, Vec<(SeqState, SeqState)>),
    /// Two runs of `A`, the first towards the true candidate; they merge
    /// right after the position being resolved.
    Track(State, SeqState, SeqState),
}

struct Builder<'a> {
    a: &'a SequentialTransducer,
    b: &'a TwoWayTransducer,
    preds: Vec<Vec<SeqState>>,
}

type Step = Option<(Mode, Vec<Letter>, Move)>;

impl Builder<'_> {
    fn name(&self, m: &Mode) -> String {
        let p = |p: State| self.b.state_name(p).to_string();
        let q = |q: SeqState| self.a.state_name(q).to_string();
        match m {
            Mode::Start(x) => format!("start[{}]", p(*x)),
            Mode::Run(x, y, i) => format!("run[{},{},{i}]", p(*x), q(*y)),
            Mode::Seek(x, y) => format!("seek[{},{}]", p(*x), q(*y)),
            Mode::Back(x, y) => format!("back[{},{}]", p(*x), q(*y)),
            Mode::Rel(x, rel) => {
                let pairs: Vec<String> = rel.iter().map(|&(c, s)| format!("{}:{}", q(c), q(s))).collect();
                format!("rel[{};{}]", p(*x), pairs.join(","))
            }
            Mode::Track(x, y, z) => format!("track[{},{},{}]", p(*x), q(*y), q(*z)),
        }
    }

    /// Continues with the block emitted from `q` on `a` when `B` arrives
    /// from the right.
    fn enter_from_right(&self, p: State, q: SeqState, a: Letter) -> Step {
        let t = self.a.transition(q, a)?;
        if t.output.is_empty() {
            Some((Mode::Back(p, q), Vec::new(), Move::Left))
        } else {
            Some((Mode::Run(p, q, t.output.len() - 1), Vec::new(), Move::Stay))
        }
    }

    /// Pair for the two tracked runs: one state leading to `c`, one leading
    /// to another candidate.
    fn track_from(&self, p: State, rel: &[(SeqState, SeqState)], c: SeqState, q1: SeqState) -> Step {
        let q2 = rel.iter().filter(|&&(c2, _)| c2 != c).map(|&(_, s)| s).min()?;
        Some((Mode::Track(p, q1, q2), Vec::new(), Move::Right))
    }

    fn step(&self, m: &Mode, sym: Sym) -> Step {
        match (m, sym) {
            (&Mode::Start(p), Sym::Left) => {
                let t = self.b.transition(p, Sym::Left)?;
                let next = match t.mv {
                    Move::Stay => Mode::Start(t.target),
                    Move::Right => Mode::Seek(t.target, self.a.initial()),
                    Move::Left => return None,
                };
                Some((next, t.output.clone(), t.mv))
            }
            (&Mode::Run(p, q, i), Sym::Letter(a)) => {
                let block = &self.a.transition(q, a)?.output;
                let b = *block.get(i)?;
                let t = self.b.transition(p, Sym::Letter(b))?;
                let out = t.output.clone();
                let p2 = t.target;
                Some(match t.mv {
                    Move::Stay => (Mode::Run(p2, q, i), out, Move::Stay),
                    Move::Right if i + 1 < block.len() => (Mode::Run(p2, q, i + 1), out, Move::Stay),
                    Move::Right => (Mode::Seek(p2, self.a.transition(q, a)?.target), out, Move::Right),
                    Move::Left if i > 0 => (Mode::Run(p2, q, i - 1), out, Move::Stay),
                    Move::Left => (Mode::Back(p2, q), out, Move::Left),
                })
            }
            (&Mode::Seek(p, q), Sym::Letter(a)) => {
                let t = self.a.transition(q, a)?;
                if t.output.is_empty() {
                    Some((Mode::Seek(p, t.target), Vec::new(), Move::Right))
                } else {
                    Some((Mode::Run(p, q, 0), Vec::new(), Move::Stay))
                }
            }
            (&Mode::Seek(p, q), Sym::Right) => {
                if self.b.is_final(p) {
                    return None;
                }
                let t = self.b.transition(p, Sym::Right)?;
                let next = match t.mv {
                    Move::Stay => Mode::Seek(t.target, q),
                    Move::Left => Mode::Back(t.target, q),
                    Move::Right => return None,
                };
                Some((next, t.output.clone(), t.mv))
            }
            (&Mode::Back(p, _), Sym::Left) => Some((Mode::Start(p), Vec::new(), Move::Stay)),
            (&Mode::Back(p, q), Sym::Letter(a)) => {
                let cands = &self.preds[q as usize * self.a.input().len() + a as usize];
                match cands.as_slice() {
                    [] => None,
                    [c] => self.enter_from_right(p, *c, a),
                    _ => Some((Mode::Rel(p, cands.iter().map(|&c| (c, c)).collect()), Vec::new(), Move::Left)),
                }
            }
            (Mode::Rel(p, rel), Sym::Left) => {
                let q0 = self.a.initial();
                let c = rel.iter().find(|&&(_, s)| s == q0)?.0;
                self.track_from(*p, rel, c, q0)
            }
            (Mode::Rel(p, rel), Sym::Letter(a)) => {
                let mut next = BTreeSet::new();
                for s in 0..self.a.num_states() as SeqState {
                    let Some(t) = self.a.transition(s, a) else { continue };
                    for &(c, s2) in rel {
                        if s2 == t.target {
                            next.insert((c, s));
                        }
                    }
                }
                let cands: BTreeSet<SeqState> = next.iter().map(|&(c, _)| c).collect();
                match cands.len() {
                    0 => None,
                    1 => {
                        let c = *cands.first()?;
                        let q1 = rel.iter().filter(|&&(c2, _)| c2 == c).map(|&(_, s)| s).min()?;
                        self.track_from(*p, rel, c, q1)
                    }
                    _ => Some((Mode::Rel(*p, next.into_iter().collect()), Vec::new(), Move::Left)),
                }
            }
            (&Mode::Track(p, q1, q2), Sym::Letter(a)) => {
                let s1 = self.a.transition(q1, a)?.target;
                let s2 = self.a.transition(q2, a)?.target;
                if s1 != s2 {
                    Some((Mode::Track(p, s1, s2), Vec::new(), Move::Right))
                } else {
                    self.enter_from_right(p, q1, a)
                }
            }
            _ => None,
        }
    }

    fn is_final(&self, m: &Mode) -> bool {
        matches!(*m, Mode::Seek(p, q) if self.b.is_final(p) && self.a.is_final(q))
    }
}

/// Two-way transducer realizing `w ↦ b(a(w))`. `b` must read `a`'s output
/// alphabet and emit at most one letter per transition.
pub fn compose_seq_2w(a: &SequentialTransducer, b: &TwoWayTransducer) -> Result<TwoWayTransducer> {
    if a.output() != b.input() {
        return Err(Error::AlphabetMismatch(
            "the sequential transducer's output alphabet differs from the two-way transducer's input".into(),
        ));
    }
    if !b.is_normalized() {
        return Err(Error::NonNormalized(format!(
            "productions up to {} letters; normalize first",
            b.max_production()
        )));
    }
    let k = a.input().len();
    let mut preds = vec![Vec::new(); a.num_states() * k];
    for q in 0..a.num_states() as SeqState {
        for x in a.input().letters() {
            if let Some(t) = a.transition(q, x) {
                preds[t.target as usize * k + x as usize].push(q);
            }
        }
    }
    let builder = Builder { a, b, preds };
    let syms: Vec<Sym> = std::iter::once(Sym::Left)
        .chain(a.input().letters().map(Sym::Letter))
        .chain(std::iter::once(Sym::Right))
        .collect();
    let mut ids: HashMap<Mode, State> = HashMap::new();
    let mut modes = vec![Mode::Start(b.initial())];
    ids.insert(modes[0].clone(), 0);
    let mut rows = Vec::new();
    let mut i = 0;
    while i < modes.len() {
        let m = modes[i].clone();
        for &sym in &syms {
            if let Some((next, out, mv)) = builder.step(&m, sym) {
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    modes.push(next);
                    (modes.len() - 1) as State
                });
                rows.push((i as State, sym, id, out, mv));
            }
        }
        i += 1;
    }
    let names = modes.iter().map(|m| builder.name(m)).collect();
    let finals = modes.iter().map(|m| builder.is_final(m)).collect();
    let mut t = TwoWayTransducer::new(names, a.input().clone(), b.output().clone(), 0, finals)?;
    for (q, sym, target, out, mv) in rows {
        t.set_transition(q, sym, target, out, mv)?;
    }
    Ok(t)
}

/// Composition with a right-sequential first stage, which reads its input
/// from right to left and writes each block at the position that produced
/// it (see [`SequentialTransducer::run_right`]).
pub fn compose_right_seq_2w(a_right: &SequentialTransducer, b: &TwoWayTransducer) -> Result<TwoWayTransducer> {
    let forward = a_right.reversed_productions();
    let inner = compose_seq_2w(&forward, &b.mirror())?;
    Ok(inner.mirror().trim())
}
