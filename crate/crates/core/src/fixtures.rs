//! Small machines used by tests, examples, and the command line.

use crate::alphabet::Alphabet;
use crate::format;
use crate::sequential::SequentialTransducer;
use crate::twoway::TwoWayTransducer;

pub const FIG1_SRC: &str = include_str!("../fixtures/fig1.2wt");
pub const PARITY_SRC: &str = include_str!("../fixtures/parity.2wt");
pub const EXAMPLE4_SRC: &str = include_str!("../fixtures/example4.fot");

/// The running example: `a^n1 b a^n2 b ... ↦ a^n1 b^n1 a^n2 b^n2 ...`.
pub fn fig1() -> TwoWayTransducer {
    format::parse_twoway(FIG1_SRC).expect("bundled fixture parses")
}

/// One-way parity counter over `{a}`; its monoid is a group of order 2.
pub fn parity() -> TwoWayTransducer {
    format::parse_twoway(PARITY_SRC).expect("bundled fixture parses")
}

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("valid alphabet")
}

/// Sequential transducer keeping `a` and erasing `b`.
pub fn erase_b() -> SequentialTransducer {
    SequentialTransducer::letter_map(ab(), ab(), &[vec![0], vec![]]).expect("valid")
}

/// Two-copy first-order transduction realizing the running example on
/// non-empty words.
pub fn example4() -> crate::fot::FoTransduction {
    format::parse_fot(EXAMPLE4_SRC).expect("bundled fixture parses")
}
