#![allow(dead_code)]

use twoway_core::format::parse_twoway;
use twoway_core::{fixtures, TwoWayTransducer};

pub const REVERSE_SRC: &str = include_str!("../../fixtures/reverse.2wt");
pub const DOUBLE_SRC: &str = include_str!("../../fixtures/double.2wt");
pub const PEEK_SRC: &str = include_str!("../../fixtures/peek.2wt");

pub fn reverse() -> TwoWayTransducer {
    parse_twoway(REVERSE_SRC).unwrap()
}

pub fn double() -> TwoWayTransducer {
    parse_twoway(DOUBLE_SRC).unwrap()
}

pub fn peek() -> TwoWayTransducer {
    parse_twoway(PEEK_SRC).unwrap()
}

/// Machines over `{a, b}` used across the suites.
pub fn machines() -> Vec<(&'static str, TwoWayTransducer)> {
    vec![("fig1", fixtures::fig1()), ("reverse", reverse()), ("double", double()), ("peek", peek())]
}

/// Reference functions for the crafted machines, on strings over `{a, b}`.
pub fn reference(name: &str, w: &str) -> String {
    match name {
        "fig1" => w.split('b').map(|blk| format!("{blk}{}", "b".repeat(blk.len()))).collect(),
        "reverse" => w.chars().rev().collect(),
        "double" => format!("{w}{w}"),
        "peek" => {
            let c: Vec<char> = w.chars().collect();
            (0..c.len()).map(|i| if c[i] == 'a' && c.get(i + 1) == Some(&'b') { 'b' } else { c[i] }).collect()
        }
        _ => unreachable!(),
    }
}
