//! Constructions between the models: composition with a sequential
//! transducer, two-way transducers to first-order transductions, and back
//! through look-around transducers.

mod compose;
mod lookaround;
mod plain;
mod to_fot;

pub use compose::{compose_right_seq_2w, compose_seq_2w};
pub use lookaround::{fo_la_to_sf_la, fot_to_fo_lookaround};
pub use plain::{sf_la_to_plain, sf_la_to_plain_with_cap, DEFAULT_TEST_CAP};
pub use to_fot::{linear_graph_sentence, reach_decision, twoway_to_fot, ClassTriple, Orientation, MONOID_NAME};

/// Plain two-way transducer realizing a first-order transduction, through
/// the formula and star-free look-around machines.
pub fn fot_to_twoway(t: &crate::fot::FoTransduction) -> crate::error::Result<crate::twoway::TwoWayTransducer> {
    sf_la_to_plain(&fo_la_to_sf_la(&fot_to_fo_lookaround(t)?)?)
}

#[cfg(test)]
pub(crate) mod testgen;

#[cfg(test)]
mod tests;
