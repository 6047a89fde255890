//! Small machines decoded from byte strings, for property tests.

use crate::alphabet::Alphabet;
use crate::sequential::SequentialTransducer;
use crate::twoway::{Move, Sym, TwoWayTransducer};

/// Two-way machine over `{a, b}` with `n` states; each byte picks one
/// table entry (absent, or target, one-letter output and move).
pub fn twoway(n: usize, bytes: &[u8]) -> TwoWayTransducer {
    let ab = Alphabet::new(["a", "b"]).unwrap();
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let finals = (0..n).map(|i| i + 1 == n || bytes.get(i).is_some_and(|b| b % 2 == 0)).collect();
    let mut t = TwoWayTransducer::new(names, ab.clone(), ab, 0, finals).unwrap();
    let syms = [Sym::Left, Sym::Letter(0), Sym::Letter(1), Sym::Right];
    let mut it = bytes.iter().copied().cycle();
    for q in 0..n as u32 {
        for &sym in &syms {
            let x = it.next().unwrap_or(0) as usize;
            if x % 9 == 0 {
                continue;
            }
            let target = (x / 5 % n) as u32;
            let output = match x / 25 % 3 {
                0 => vec![],
                k => vec![k as u32 - 1],
            };
            let mv = match (sym, x / 75 % 4) {
                (Sym::Left, _) => Move::Right,
                (Sym::Right, _) => Move::Left,
                (_, 0) => Move::Left,
                (_, 3) => Move::Stay,
                _ => Move::Right,
            };
            t.set_transition(q, sym, target, output, mv).unwrap();
        }
    }
    t
}

/// Sequential machine over `{a, b}` with `n` states and outputs of length
/// at most two.
pub fn sequential(n: usize, bytes: &[u8]) -> SequentialTransducer {
    let ab = Alphabet::new(["a", "b"]).unwrap();
    let names = (0..n).map(|i| format!("r{i}")).collect();
    let finals = (0..n).map(|i| bytes.get(i).is_none_or(|b| b % 4 != 0)).collect();
    let mut t = SequentialTransducer::new(names, ab.clone(), ab, 0, finals).unwrap();
    let mut it = bytes.iter().copied().skip(n).cycle();
    for q in 0..n as u32 {
        for a in 0..2 {
            let x = it.next().unwrap_or(1) as usize;
            if x % 7 == 0 {
                continue;
            }
            let target = (x / 7 % n) as u32;
            let len = x / 21 % 3;
            let output = (0..len).map(|i| ((x >> (i + 3)) & 1) as u32).collect();
            t.set_transition(q, a, target, output).unwrap();
        }
    }
    t
}
