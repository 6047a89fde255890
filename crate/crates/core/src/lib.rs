pub mod alphabet;
pub mod artifact;
pub mod dfa;
pub mod equiv;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod fot;
pub mod logic;
pub mod lookaround;
pub mod monoid;
pub mod sequential;
pub mod translate;
pub mod twoway;

pub use alphabet::{Alphabet, Letter, Word};
pub use dfa::{combine, Combine, CounterFree, Dfa};
pub use error::{Error, Result};
pub use sequential::SequentialTransducer;
pub use twoway::{context_path, ContextPath, Move, Outcome, Reason, Run, Sym, TwoWayTransducer};
pub use monoid::{behaviors, Aperiodicity, BehaviorProfile, Reach, Seg, Side, TransitionMonoid};
pub use logic::{certify_star_free, compile_to_dfa, eval, parse_formula, serialize_formula, Context, Formula, Registry};
pub use fot::{FoTransduction, OutputStructure};
pub use lookaround::{FoLookAroundTransducer, FoTransition, SfLookAroundTransducer, SfTransition, Test};
pub use translate::{
    compose_right_seq_2w, compose_seq_2w, fo_la_to_sf_la, fot_to_fo_lookaround, fot_to_twoway, reach_decision,
    sf_la_to_plain, twoway_to_fot, ClassTriple, Orientation,
};
pub use artifact::{Artifact, NamedArtifact};
pub use equiv::{check_equiv, check_equiv_with, EquivalenceReport, Verdict};
pub use format::FormulaFile;
