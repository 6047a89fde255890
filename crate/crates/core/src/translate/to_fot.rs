//! Two-way transducers to first-order transductions. One copy per state: the
//! node `(q, x)` exists when the accepting run visits `q` at `x` and emits a
//! letter there. Run order is decided on abstract tapes whose factors are
//! replaced by their elements of the transition monoid, so each formula is a
//! finite disjunction of class atoms.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::fot::FoTransduction;
use crate::logic::Formula;
use crate::monoid::{Reach, Seg, Side, TransitionMonoid};
use crate::twoway::{State, Sym, TwoWayTransducer};

/// Name under which the machine's monoid is registered.
pub const MONOID_NAME: &str = "M";

/// Elements of `u[1..i-1]`, `u[i..j]` and `u[j+1..|u|]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassTriple {
    pub pre: usize,
    pub mid: usize,
    pub suf: usize,
}

/// `Forward`: the run starts at the first position of the middle factor and
/// must leave it through its right border. `Backward`: it starts at the last
/// position and must leave through the left border.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

/// Whether the run on `^ u $`, for `u` with the given classes, started in
/// `q` at the first (forward) or last (backward) position of the middle
/// factor, eventually crosses the far border of that factor and arrives in
/// state `target` next to it. Answers are uniform over the words of a
/// triple.
pub fn reach_decision(
    m: &TransitionMonoid,
    triple: ClassTriple,
    q: State,
    target: State,
    orientation: Orientation,
) -> Result<bool> {
    for e in [triple.pre, triple.mid, triple.suf] {
        m.check(e)?;
    }
    if q as usize >= m.num_states() || target as usize >= m.num_states() {
        return Err(Error::UnknownState(format!("#{}", q.max(target))));
    }
    let segs = [
        Seg::Cell(Sym::Left),
        Seg::Profile(triple.pre),
        Seg::Profile(triple.mid),
        Seg::Profile(triple.suf),
        Seg::Cell(Sym::Right),
    ];
    let (side, goal) = match orientation {
        Orientation::Forward => (Side::Left, 3),
        Orientation::Backward => (Side::Right, 1),
    };
    let mut prev = 2;
    let reach = m.walk_tape(&segs, (2, q, side), |k, r| {
        let hit = k == goal && prev == 2 && r == target;
        prev = k;
        hit
    });
    Ok(reach == Reach::Stopped)
}

/// Where the configuration of a copy sits relative to its node's position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Anchor {
    /// At the node's own position.
    Here,
    /// On `^`; the node sits on the first position.
    LeftEnd,
    /// On `$`; the node sits on the last position.
    RightEnd,
}

/// Index of the anchor in the unary tape `[^, pre, a, suf, $]`.
fn unary_segment(a: Anchor) -> usize {
    match a {
        Anchor::Here => 2,
        Anchor::LeftEnd => 0,
        Anchor::RightEnd => 4,
    }
}

struct Build<'a> {
    m: &'a TransitionMonoid,
    letters: Vec<Letter>,
    /// Elements grouped by how `^ u` answers a walk entering from the right.
    left_groups: Vec<Vec<usize>>,
    /// Elements grouped by how `u $` answers a walk entering from the left.
    right_groups: Vec<Vec<usize>>,
}

/// Partition of the elements by a signature, in order of first member.
fn group_by<K: std::hash::Hash + Eq>(n: usize, sig: impl Fn(usize) -> K) -> Vec<Vec<usize>> {
    let mut ids: std::collections::HashMap<K, usize> = std::collections::HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for e in 0..n {
        let len = ids.len();
        let g = *ids.entry(sig(e)).or_insert(len);
        if g == groups.len() {
            groups.push(Vec::new());
        }
        groups[g].push(e);
    }
    groups
}

/// Exit of a walk entering `^ u` from the right, for every state.
fn left_context(m: &TransitionMonoid, e: usize) -> Vec<Option<State>> {
    let segs = [Seg::Cell(Sym::Left), Seg::Profile(e), Seg::Profile(m.identity())];
    (0..m.num_states() as State)
        .map(|p| {
            let mut out = None;
            m.walk_tape(&segs, (1, p, Side::Right), |k, r| {
                if k == 2 {
                    out = Some(r);
                }
                k == 2
            });
            out
        })
        .collect()
}

/// Outcome of a walk entering `u $` from the left, for every state.
fn right_context(m: &TransitionMonoid, e: usize) -> Vec<(Option<State>, Reach)> {
    let segs = [Seg::Profile(m.identity()), Seg::Profile(e), Seg::Cell(Sym::Right)];
    (0..m.num_states() as State)
        .map(|p| {
            let mut out = None;
            let reach = m.walk_tape(&segs, (1, p, Side::Left), |k, r| {
                if k == 0 {
                    out = Some(r);
                }
                k == 0
            });
            (out, reach)
        })
        .collect()
}

fn pclass(e: usize, x: &str) -> Formula {
    Formula::PrefixClass { monoid: MONOID_NAME.into(), element: e, x: x.into() }
}

fn sclass(e: usize, x: &str) -> Formula {
    Formula::SuffixClass { monoid: MONOID_NAME.into(), element: e, x: x.into() }
}

fn class(e: usize, x: &str, y: &str) -> Formula {
    Formula::FactorClass { monoid: MONOID_NAME.into(), element: e, x: x.into(), y: y.into() }
}

impl Build<'_> {
    fn elements(&self) -> std::ops::Range<usize> {
        0..self.m.len()
    }

    /// Whether the walk from segment `start` in state `q` occupies `target`
    /// inside cell segment `goal`.
    fn visits(&self, segs: &[Seg], start: (usize, State, Side), goal: usize, target: State) -> bool {
        let Seg::Cell(sym) = segs[goal] else {
            unreachable!("visits are checked on cells")
        };
        let reach = self.m.walk_tape(segs, start, |k, r| k == goal && self.m.chain(sym, r).contains(&target));
        reach == Reach::Stopped
    }

    /// `∨ (∨_{e ∈ rows} row(e)) ∧ (∨_{e ∈ cols} col(e))` over the accepted
    /// pairs, grouping rows with equal column sets.
    fn rectangles(
        &self,
        pairs: &[(usize, usize)],
        row: impl Fn(usize) -> Formula,
        col: impl Fn(usize) -> Formula,
    ) -> Formula {
        let n = self.m.len();
        self.group_rectangles(pairs, (n, row), (n, col))
    }

    /// Same over group indices; `(count, formula)` per side.
    fn group_rectangles(
        &self,
        pairs: &[(usize, usize)],
        (all_rows, row): (usize, impl Fn(usize) -> Formula),
        (all_cols, col): (usize, impl Fn(usize) -> Formula),
    ) -> Formula {
        let mut by_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(r, c) in pairs {
            by_row.entry(r).or_default().push(c);
        }
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (r, cols) in by_row {
            groups.entry(cols).or_default().push(r);
        }
        Formula::or(groups.into_iter().map(|(cols, rows)| {
            let rf = if rows.len() == all_rows { Formula::True } else { Formula::or(rows.into_iter().map(&row)) };
            let cf = if cols.len() == all_cols { Formula::True } else { Formula::or(cols.into_iter().map(&col)) };
            Formula::and([rf, cf])
        }))
    }

    /// Unary condition on `v` over the tape `[^, pre, a, suf, $]` with `v`
    /// at the letter: the walk from `start` visits `target` at `goal`.
    fn unary(&self, v: &str, start: (Anchor, State), goal: (Anchor, State)) -> Formula {
        let (sa, q) = start;
        let (ga, target) = goal;
        let mut parts = Vec::new();
        for &a in &self.letters {
            let mut pairs = Vec::new();
            for e1 in self.elements() {
                for e3 in self.elements() {
                    let segs = [
                        Seg::Cell(Sym::Left),
                        Seg::Profile(e1),
                        Seg::Cell(Sym::Letter(a)),
                        Seg::Profile(e3),
                        Seg::Cell(Sym::Right),
                    ];
                    let k = unary_segment(sa);
                    let side = if k == 0 { Side::Right } else { Side::Left };
                    if self.visits(&segs, (k, q, side), unary_segment(ga), target) {
                        pairs.push((e1, e3));
                    }
                }
            }
            if !pairs.is_empty() {
                parts.push(Formula::and([
                    Formula::letter(Sym::Letter(a), v),
                    self.rectangles(&pairs, |e| pclass(e, v), |e| sclass(e, v)),
                ]));
            }
        }
        Formula::or(parts)
    }

    /// `x < y`: tape `[^, u[1..x-1], u[x..y-1], a_y, u[y+1..], $]`, run from
    /// `q` at `x` visits `target` at `y`.
    fn forward(&self, q: State, target: State) -> Formula {
        let mut parts = Vec::new();
        for e2 in self.elements() {
            for &a in &self.letters {
                let mut pairs = Vec::new();
                for (g1, l) in self.left_groups.iter().enumerate() {
                    for (g3, r) in self.right_groups.iter().enumerate() {
                        let segs = [
                            Seg::Cell(Sym::Left),
                            Seg::Profile(l[0]),
                            Seg::Profile(e2),
                            Seg::Cell(Sym::Letter(a)),
                            Seg::Profile(r[0]),
                            Seg::Cell(Sym::Right),
                        ];
                        if self.visits(&segs, (2, q, Side::Left), 3, target) {
                            pairs.push((g1, g3));
                        }
                    }
                }
                if !pairs.is_empty() {
                    parts.push(Formula::and([
                        Formula::exists("z", Formula::and([Formula::succ("z", "y", "w"), class(e2, "x", "z")])),
                        Formula::letter(Sym::Letter(a), "y"),
                        self.context_rectangles(&pairs, "x", "y"),
                    ]));
                }
            }
        }
        Formula::or(parts)
    }

    /// Rectangles over context groups: prefix classes of `pre`, suffix
    /// classes of `suf`.
    fn context_rectangles(&self, pairs: &[(usize, usize)], pre: &str, suf: &str) -> Formula {
        let row = |g: usize| Formula::or(self.left_groups[g].iter().map(|&e| pclass(e, pre)));
        let col = |g: usize| Formula::or(self.right_groups[g].iter().map(|&e| sclass(e, suf)));
        self.group_rectangles(pairs, (self.left_groups.len(), row), (self.right_groups.len(), col))
    }

    /// `y < x`: tape `[^, u[1..y-1], a_y, u[y+1..x], u[x+1..], $]`.
    fn backward(&self, q: State, target: State) -> Formula {
        let mut parts = Vec::new();
        for e2 in self.elements() {
            for &a in &self.letters {
                let mut pairs = Vec::new();
                for (g1, l) in self.left_groups.iter().enumerate() {
                    for (g3, r) in self.right_groups.iter().enumerate() {
                        let segs = [
                            Seg::Cell(Sym::Left),
                            Seg::Profile(l[0]),
                            Seg::Cell(Sym::Letter(a)),
                            Seg::Profile(e2),
                            Seg::Profile(r[0]),
                            Seg::Cell(Sym::Right),
                        ];
                        if self.visits(&segs, (3, q, Side::Right), 2, target) {
                            pairs.push((g1, g3));
                        }
                    }
                }
                if !pairs.is_empty() {
                    parts.push(Formula::and([
                        Formula::exists("z", Formula::and([Formula::succ("y", "z", "w"), class(e2, "z", "x")])),
                        Formula::letter(Sym::Letter(a), "y"),
                        self.context_rectangles(&pairs, "y", "x"),
                    ]));
                }
            }
        }
        Formula::or(parts)
    }

    /// Order between real configurations `(q, x)` and `(target, y)`.
    fn order_here(&self, q: State, target: State) -> Formula {
        let same = self.unary("x", (Anchor::Here, q), (Anchor::Here, target));
        Formula::or([
            Formula::and([Formula::lt("x", "y"), self.forward(q, target)]),
            Formula::and([Formula::eq("x", "y"), same]),
            Formula::and([Formula::lt("y", "x"), self.backward(q, target)]),
        ])
    }

    fn order(&self, c: (Anchor, State), d: (Anchor, State)) -> Formula {
        match (c.0, d.0) {
            (Anchor::Here, Anchor::Here) => self.order_here(c.1, d.1),
            // the anchored side is determined, so the condition is unary in
            // the other variable; between two anchored copies either works
            (Anchor::Here, _) => self.unary("x", c, d),
            (_, Anchor::Here) => self.unary("y", c, d),
            _ => self.unary("x", c, d),
        }
    }
}

/// `(∃x ∀y x≤y) ∧ (∃x ∀y y≤x) ∧ ∀x∀y (x≤y ∨ y≤x)`: non-empty and linearly
/// ordered.
pub fn linear_graph_sentence() -> Formula {
    Formula::and([
        Formula::exists("x", Formula::forall("y", Formula::le("x", "y"))),
        Formula::exists("x", Formula::forall("y", Formula::le("y", "x"))),
        Formula::forall(
            "x",
            Formula::forall("y", Formula::or([Formula::le("x", "y"), Formula::le("y", "x")])),
        ),
    ])
}

/// First-order transduction realizing `t` on non-empty words. Requires an
/// aperiodic machine emitting at most one letter per transition.
pub fn twoway_to_fot(t: &TwoWayTransducer) -> Result<FoTransduction> {
    if !t.is_normalized() {
        return Err(Error::NonNormalized(format!(
            "productions up to {} letters; normalize first",
            t.max_production()
        )));
    }
    let m = Arc::new(TransitionMonoid::new(t));
    let ap = m.is_aperiodic();
    if !ap.aperiodic {
        return Err(Error::NotAperiodic(format!(
            "element {} has period {}",
            ap.witness.unwrap_or(0),
            ap.witness_period.unwrap_or(0)
        )));
    }
    let b = Build {
        m: &m,
        letters: t.input().letters().collect(),
        left_groups: group_by(m.len(), |e| left_context(&m, e)),
        right_groups: group_by(m.len(), |e| right_context(&m, e)),
    };

    // copies: every state, plus anchored ones for endmarker productions
    let mut copies: Vec<(String, Anchor, State)> = Vec::new();
    let names = t.state_names();
    let mut taken: std::collections::HashSet<String> = names.iter().cloned().collect();
    let mut fresh = |base: String| {
        let mut s = base;
        while taken.contains(&s) {
            s.push('\'');
        }
        taken.insert(s.clone());
        s
    };
    for q in 0..t.num_states() as State {
        copies.push((names[q as usize].clone(), Anchor::Here, q));
    }
    for q in 0..t.num_states() as State {
        if t.transition(q, Sym::Left).is_some_and(|tr| !tr.output.is_empty()) {
            copies.push((fresh(format!("{}^", names[q as usize])), Anchor::LeftEnd, q));
        }
        if !t.is_final(q) && t.transition(q, Sym::Right).is_some_and(|tr| !tr.output.is_empty()) {
            copies.push((fresh(format!("{}$", names[q as usize])), Anchor::RightEnd, q));
        }
    }

    let mut f = FoTransduction::new(
        t.input().clone(),
        t.output().clone(),
        copies.iter().map(|c| c.0.clone()).collect(),
    )?;
    f.register(MONOID_NAME, m.clone())?;

    let whole = Formula::or((0..m.len()).filter(|&e| m.accepts_class(e)).map(|e| {
        Formula::exists(
            "x",
            Formula::exists(
                "y",
                Formula::and([Formula::first("x", "z"), Formula::last("y", "z"), class(e, "x", "y")]),
            ),
        )
    }));
    f.set_dom(Formula::and([linear_graph_sentence(), whole]))?;

    let start = (Anchor::LeftEnd, t.initial());
    for (c, &(_, anchor, q)) in copies.iter().enumerate() {
        for bl in t.output().letters() {
            let formula = match anchor {
                Anchor::Here => Formula::or(b.letters.iter().filter_map(|&a| {
                    let tr = t.transition(q, Sym::Letter(a))?;
                    (tr.output == [bl]).then(|| {
                        Formula::and([
                            Formula::letter(Sym::Letter(a), "x"),
                            b.unary("x", start, (Anchor::Here, q)),
                        ])
                    })
                })),
                Anchor::LeftEnd | Anchor::RightEnd => {
                    let sym = if anchor == Anchor::LeftEnd { Sym::Left } else { Sym::Right };
                    if t.transition(q, sym).is_some_and(|tr| tr.output == [bl]) {
                        let edge = if anchor == Anchor::LeftEnd {
                            Formula::first("x", "z")
                        } else {
                            Formula::last("x", "z")
                        };
                        Formula::and([edge, b.unary("x", start, (anchor, q))])
                    } else {
                        Formula::falsity()
                    }
                }
            };
            f.set_pos(c, bl, formula)?;
        }
    }
    // copies without nodes need no order
    let live: Vec<bool> = (0..copies.len()).map(|c| t.output().letters().any(|bl| !f.pos(c, bl).is_false())).collect();
    for (c, &(_, ca, cq)) in copies.iter().enumerate() {
        for (d, &(_, da, dq)) in copies.iter().enumerate() {
            if live[c] && live[d] {
                f.set_le(c, d, b.order((ca, cq), (da, dq)))?;
            }
        }
    }
    Ok(f)
}
