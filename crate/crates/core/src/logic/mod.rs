//! First-order logic over words with order, letter predicates, and class
//! atoms backed by aperiodic transition monoids.

mod compile;
mod eval;
pub(crate) mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monoid::TransitionMonoid;
use crate::twoway::Sym;

pub use compile::{certify_star_free, compile_to_dfa, StarFree};
pub use eval::{eval, Evaluator};
pub use syntax::{parse_formula, serialize_formula};

pub type Var = String;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    /// The position `x` carries the symbol. Endmarker symbols only hold in
    /// the marked context.
    Letter(Sym, Var),
    Le(Var, Var),
    /// The factor from `x` to `y` (inclusive, `x <= y`) maps to the element.
    FactorClass {
        monoid: String,
        element: usize,
        x: Var,
        y: Var,
    },
    /// The letters strictly before `x` map to the element.
    PrefixClass { monoid: String, element: usize, x: Var },
    /// The letters strictly after `x` map to the element.
    SuffixClass { monoid: String, element: usize, x: Var },
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

/// Which positions exist. `Word` ranges over `1..=|u|`; `Marked` ranges
/// over the tape `^ u $`, positions `0..=|u|+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Context {
    Word,
    Marked,
}

impl Formula {
    pub fn falsity() -> Formula {
        Formula::Not(Box::new(Formula::True))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Not(inner) if inner.is_true())
    }

    pub fn letter(sym: Sym, x: &str) -> Formula {
        Formula::Letter(sym, x.to_string())
    }

    pub fn le(x: &str, y: &str) -> Formula {
        Formula::Le(x.to_string(), y.to_string())
    }

    /// `x < y`.
    pub fn lt(x: &str, y: &str) -> Formula {
        Formula::and([Formula::le(x, y), Formula::not(Formula::le(y, x))])
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::and([Formula::le(x, y), Formula::le(y, x)])
    }

    /// `y` is the successor of `x`, as `x < y` with nothing in between.
    pub fn succ(x: &str, y: &str, fresh: &str) -> Formula {
        Formula::and([
            Formula::lt(x, y),
            Formula::not(Formula::exists(
                fresh,
                Formula::and([Formula::lt(x, fresh), Formula::lt(fresh, y)]),
            )),
        ])
    }

    /// `x` is the first position.
    pub fn first(x: &str, fresh: &str) -> Formula {
        Formula::forall(fresh, Formula::le(x, fresh))
    }

    /// `x` is the last position.
    pub fn last(x: &str, fresh: &str) -> Formula {
        Formula::forall(fresh, Formula::le(fresh, x))
    }

    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    /// Conjunction with constant folding and flattening.
    pub fn and<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                p if p.is_false() => return Formula::falsity(),
                Formula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().expect("one element"),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with constant folding and flattening.
    pub fn or<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => return Formula::True,
                p if p.is_false() => {}
                Formula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::falsity(),
            1 => out.pop().expect("one element"),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        if f.is_false() || f.is_true() {
            return f;
        }
        Formula::Exists(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        if f.is_false() || f.is_true() {
            return f;
        }
        Formula::Forall(x.to_string(), Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut note = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True => {}
            Formula::Letter(_, x) | Formula::PrefixClass { x, .. } | Formula::SuffixClass { x, .. } => note(x, bound),
            Formula::Le(x, y) | Formula::FactorClass { x, y, .. } => {
                note(x, bound);
                note(y, bound);
            }
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_free(bound, out)),
            Formula::Not(p) => p.collect_free(bound, out),
            Formula::Exists(x, p) | Formula::Forall(x, p) => {
                bound.push(x.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Renames free occurrences of variables. Bound variables that would
    /// capture a new name are renamed apart first.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Formula {
        let targets: BTreeSet<&Var> = map.values().collect();
        self.rename_inner(map, &targets)
    }

    fn rename_inner(&self, map: &BTreeMap<Var, Var>, targets: &BTreeSet<&Var>) -> Formula {
        let r = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Formula::True => Formula::True,
            Formula::Letter(s, x) => Formula::Letter(*s, r(x)),
            Formula::Le(x, y) => Formula::Le(r(x), r(y)),
            Formula::FactorClass { monoid, element, x, y } => Formula::FactorClass {
                monoid: monoid.clone(),
                element: *element,
                x: r(x),
                y: r(y),
            },
            Formula::PrefixClass { monoid, element, x } => Formula::PrefixClass {
                monoid: monoid.clone(),
                element: *element,
                x: r(x),
            },
            Formula::SuffixClass { monoid, element, x } => Formula::SuffixClass {
                monoid: monoid.clone(),
                element: *element,
                x: r(x),
            },
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.rename_inner(map, targets)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.rename_inner(map, targets)).collect()),
            Formula::Not(p) => Formula::Not(Box::new(p.rename_inner(map, targets))),
            Formula::Exists(x, p) | Formula::Forall(x, p) => {
                let mut inner = map.clone();
                inner.remove(x);
                let (bound, body) = if targets.contains(x) {
                    let mut fresh = format!("{x}'");
                    while targets.contains(&fresh) || self.free_vars().contains(&fresh) {
                        fresh.push('\'');
                    }
                    inner.insert(x.clone(), fresh.clone());
                    let t: BTreeSet<&Var> = inner.values().collect();
                    (fresh, p.rename_inner(&inner, &t))
                } else {
                    (x.clone(), p.rename_inner(&inner, targets))
                };
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(bound, Box::new(body))
                } else {
                    Formula::Forall(bound, Box::new(body))
                }
            }
        }
    }

    /// Restricts every quantifier to letter positions, so a formula written
    /// for words keeps its meaning on the marked tape.
    pub fn relativize(&self) -> Formula {
        let real = |z: &str| {
            Formula::and([
                Formula::not(Formula::letter(Sym::Left, z)),
                Formula::not(Formula::letter(Sym::Right, z)),
            ])
        };
        match self {
            Formula::And(ps) => Formula::And(ps.iter().map(Formula::relativize).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(Formula::relativize).collect()),
            Formula::Not(p) => Formula::Not(Box::new(p.relativize())),
            Formula::Exists(x, p) => Formula::Exists(x.clone(), Box::new(Formula::and([real(x), p.relativize()]))),
            Formula::Forall(x, p) => {
                Formula::Forall(x.clone(), Box::new(Formula::implies(real(x), p.relativize())))
            }
            atom => atom.clone(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::And(ps) | Formula::Or(ps) => 1 + ps.iter().map(Formula::size).sum::<usize>(),
            Formula::Not(p) | Formula::Exists(_, p) | Formula::Forall(_, p) => 1 + p.size(),
            _ => 1,
        }
    }

    /// Names of the monoids used by class atoms.
    pub fn monoids(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |f| match f {
            Formula::FactorClass { monoid, .. }
            | Formula::PrefixClass { monoid, .. }
            | Formula::SuffixClass { monoid, .. } => {
                out.insert(monoid.clone());
            }
            _ => {}
        });
        out
    }

    fn visit_atoms<F: FnMut(&Formula)>(&self, f: &mut F) {
        match self {
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.visit_atoms(f)),
            Formula::Not(p) | Formula::Exists(_, p) | Formula::Forall(_, p) => p.visit_atoms(f),
            atom => f(atom),
        }
    }
}

/// Monoids that class atoms may refer to. Registration certifies
/// aperiodicity, which keeps every class atom first-order definable.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    monoids: BTreeMap<String, Arc<TransitionMonoid>>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    pub fn register(&mut self, name: &str, monoid: Arc<TransitionMonoid>) -> Result<()> {
        if !monoid.is_aperiodic().aperiodic {
            return Err(Error::NotAperiodic(name.to_string()));
        }
        self.monoids.insert(name.to_string(), monoid);
        Ok(())
    }

    /// Registers without the aperiodicity certificate. Compiling a formula
    /// that uses such a monoid may then fail the star-free certification.
    pub fn register_uncertified(&mut self, name: &str, monoid: Arc<TransitionMonoid>) {
        self.monoids.insert(name.to_string(), monoid);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<TransitionMonoid>> {
        self.monoids
            .get(name)
            .ok_or_else(|| Error::UnknownMonoid(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.monoids.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.monoids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Arc<TransitionMonoid>)> {
        self.monoids.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Union of two registries; entries of `other` win on name clashes.
    pub fn merged(&self, other: &Registry) -> Registry {
        let mut monoids = self.monoids.clone();
        monoids.extend(other.monoids.iter().map(|(k, v)| (k.clone(), v.clone())));
        Registry { monoids }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::fixtures;
    use crate::monoid::TransitionMonoid;

    fn ab() -> Alphabet {
        fixtures::ab()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &ab()).unwrap()
    }

    const PHI21: &str = "(exists z (and (le x z) (le z y) (letter b z)))";
    const PHI12: &str = "(or (le x y) (forall z (or (not (and (le y z) (le z x))) (letter a z))))";

    /// All markings of `word` for `k` variables, as (marked word, positions).
    fn markings(word: &[u32], k: usize) -> Vec<(Vec<u32>, Vec<usize>)> {
        let n = word.len();
        let mut out = Vec::new();
        if n == 0 && k > 0 {
            return out;
        }
        let total = n.pow(k as u32);
        for code in 0..total.max(1) {
            let mut c = code;
            let pos: Vec<usize> = (0..k)
                .map(|_| {
                    let p = c % n;
                    c /= n;
                    p
                })
                .collect();
            let marked = word
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    let v: usize = pos.iter().enumerate().filter(|&(_, &p)| p == i).map(|(j, _)| 1 << j).sum();
                    (a as usize * (1 << k) + v) as u32
                })
                .collect();
            out.push((marked, pos.iter().map(|p| p + 1).collect()));
        }
        out
    }

    #[test]
    fn worked_evaluations() {
        let r = Registry::new();
        let w = ab().parse_word("aababb").unwrap();
        assert!(eval(&f(PHI21), &w, &[("x", 1), ("y", 3)], &r, Context::Word).unwrap());
        assert!(eval(&f(PHI12), &w, &[("x", 2), ("y", 1)], &r, Context::Word).unwrap());
        assert!(!eval(&f(PHI12), &w, &[("x", 4), ("y", 1)], &r, Context::Word).unwrap());
        let aab = ab().parse_word("aab").unwrap();
        assert!(!eval(&f("(letter a x)"), &aab, &[("x", 3)], &r, Context::Word).unwrap());
        assert!(matches!(
            eval(&f("(letter a y)"), &aab, &[("x", 3)], &r, Context::Word),
            Err(Error::UnboundVariable(_))
        ));
        assert!(!eval(&f("(exists x (true))"), &[], &[], &r, Context::Word).unwrap());
        assert!(eval(&f("(forall x (letter a x))"), &[], &[], &r, Context::Word).unwrap());
    }

    #[test]
    fn marked_context_sees_endmarkers() {
        let r = Registry::new();
        let w = ab().parse_word("ab").unwrap();
        let g = f("(exists x (and (letter ^ x) (forall y (le x y))))");
        assert!(eval(&g, &w, &[], &r, Context::Marked).unwrap());
        assert!(!eval(&g, &w, &[], &r, Context::Word).unwrap());
        assert!(eval(&f("(letter $ x)"), &w, &[("x", 3)], &r, Context::Marked).unwrap());
        let rel = f("(exists z (letter b z))").relativize();
        assert!(eval(&rel, &w, &[], &r, Context::Marked).unwrap());
        let rel = f("(forall z (letter a z))").relativize();
        assert!(eval(&rel, &[0, 0], &[], &r, Context::Marked).unwrap());
    }

    #[test]
    fn class_atoms() {
        let t = fixtures::fig1();
        let m = std::sync::Arc::new(TransitionMonoid::new(&t));
        let mut r = Registry::new();
        r.register("M", m.clone()).unwrap();
        let w = ab().parse_word("aababb").unwrap();
        let e = m.class_of(&w[1..4]);
        let g = Formula::FactorClass { monoid: "M".into(), element: e, x: "x".into(), y: "y".into() };
        assert!(eval(&g, &w, &[("x", 2), ("y", 4)], &r, Context::Word).unwrap());
        assert!(matches!(eval(&g, &w, &[("x", 4), ("y", 2)], &r, Context::Word), Err(Error::MalformedClassAtom(_))));
        let p = Formula::PrefixClass { monoid: "M".into(), element: m.class_of(&w[..2]), x: "x".into() };
        assert!(eval(&p, &w, &[("x", 3)], &r, Context::Word).unwrap());
        let s = Formula::SuffixClass { monoid: "M".into(), element: m.class_of(&w[3..]), x: "x".into() };
        assert!(eval(&s, &w, &[("x", 3)], &r, Context::Word).unwrap());
        let mut bad = Registry::new();
        assert!(matches!(
            bad.register("P", std::sync::Arc::new(TransitionMonoid::new(&fixtures::parity()))),
            Err(Error::NotAperiodic(_))
        ));
        assert!(matches!(eval(&g, &w, &[("x", 1), ("y", 1)], &bad, Context::Word), Err(Error::UnknownMonoid(_))));
    }

    #[test]
    fn compile_exists_a() {
        let r = Registry::new();
        let d = compile_to_dfa(&f("(exists x (letter a x))"), &[], &ab(), &r, Context::Word).unwrap();
        for w in ab().words_up_to(0, 5) {
            assert_eq!(d.accepts(&w).unwrap(), w.contains(&0));
        }
        let le = compile_to_dfa(&f("(le x y)"), &["x", "y"], &ab(), &r, Context::Word).unwrap();
        for w in ab().words_up_to(1, 4) {
            for (mw, pos) in markings(&w, 2) {
                assert_eq!(le.accepts(&mw).unwrap(), pos[0] <= pos[1]);
            }
        }
    }

    #[test]
    fn compiled_order_formula_agrees_with_eval() {
        let r = Registry::new();
        for text in [PHI21, PHI12] {
            let g = f(text);
            let d = compile_to_dfa(&g, &["x", "y"], &ab(), &r, Context::Word).unwrap();
            for w in ab().words_up_to(0, 5) {
                for (mw, pos) in markings(&w, 2) {
                    let expect = eval(&g, &w, &[("x", pos[0]), ("y", pos[1])], &r, Context::Word).unwrap();
                    assert_eq!(d.accepts(&mw).unwrap(), expect);
                }
            }
            assert!(certify_star_free(&g, &["x", "y"], &ab(), &r, Context::Word).unwrap().star_free);
        }
    }

    #[test]
    fn marked_compilation_agrees_with_eval() {
        let r = Registry::new();
        let g = f("(or (letter ^ x) (exists y (and (le y x) (letter b y) (not (letter $ x)))))");
        let d = compile_to_dfa(&g, &["x"], &ab(), &r, Context::Marked).unwrap();
        let ext = ab().with_endmarkers();
        for w in ab().words_up_to(0, 4) {
            let mut tape = vec![2u32];
            tape.extend(&w);
            tape.push(3);
            for (mw, pos) in markings(&tape, 1) {
                let expect = eval(&g, &w, &[("x", pos[0] - 1)], &r, Context::Marked).unwrap();
                assert_eq!(d.accepts(&mw).unwrap(), expect, "{} at {}", ext.format_word(&tape), pos[0] - 1);
            }
        }
    }

    #[test]
    fn class_atom_compiles_star_free() {
        let t = fixtures::fig1();
        let m = std::sync::Arc::new(TransitionMonoid::new(&t));
        let mut r = Registry::new();
        r.register("M", m.clone()).unwrap();
        let e = m.class_of(&[0, 1]);
        let g = Formula::FactorClass { monoid: "M".into(), element: e, x: "x".into(), y: "y".into() };
        let cert = certify_star_free(&g, &["x", "y"], &ab(), &r, Context::Word).unwrap();
        assert!(cert.star_free);
        let d = compile_to_dfa(&g, &["x", "y"], &ab(), &r, Context::Word).unwrap();
        for w in ab().words_up_to(1, 5) {
            for (mw, pos) in markings(&w, 2) {
                let expect = pos[0] <= pos[1] && m.class_of(&w[pos[0] - 1..pos[1]]) == e;
                assert_eq!(d.accepts(&mw).unwrap(), expect);
            }
        }
        let mut loose = Registry::new();
        let p = std::sync::Arc::new(TransitionMonoid::new(&fixtures::parity()));
        loose.register_uncertified("P", p.clone());
        let a = Alphabet::new(["a"]).unwrap();
        let g = Formula::exists(
            "x",
            Formula::and([Formula::first("x", "z"), Formula::SuffixClass { monoid: "P".into(), element: p.class_of(&[0, 0]), x: "x".into() }]),
        );
        assert!(matches!(
            certify_star_free(&g, &[], &a, &loose, Context::Word),
            Err(Error::NonAperiodicCompilation(_))
        ));
    }

    #[test]
    fn syntax_round_trip_and_errors() {
        for text in [PHI21, PHI12, "(true)", "(not (true))", "(class M 3 x y)", "(pclass M 0 x)", "(and)"] {
            assert_eq!(serialize_formula(&f(text), &ab()), text);
        }
        match parse_formula("(and (letter c x))", &ab()) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 14)),
            other => panic!("{other:?}"),
        }
        match parse_formula("(le x y", &ab()) {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 8),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("(le x y) (true)", &ab()).is_err());
        assert!(parse_formula("(foo x)", &ab()).is_err());
    }

    #[test]
    fn renaming_avoids_capture() {
        let g = f("(exists y (le x y))");
        let map = BTreeMap::from([("x".to_string(), "y".to_string())]);
        let h = g.rename(&map);
        assert_eq!(h.free_vars(), BTreeSet::from(["y".to_string()]));
        let r = Registry::new();
        let w = [0, 0, 0];
        assert_eq!(
            eval(&h, &w, &[("y", 3)], &r, Context::Word).unwrap(),
            eval(&g, &w, &[("x", 3)], &r, Context::Word).unwrap()
        );
    }
}
