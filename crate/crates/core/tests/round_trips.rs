mod common;

use twoway_core::fixtures::{self, ab};
use twoway_core::{check_equiv, fot_to_twoway, twoway_to_fot, Artifact, TransitionMonoid};

/// `fot_to_twoway ∘ twoway_to_fot` is the identity on functions, checked on
/// words of length 1 to 4 against the source machine and the reference.
#[test]
fn crafted_machines_survive_both_translations() {
    for (name, t) in common::machines() {
        let fot = twoway_to_fot(&t).unwrap();
        let back = fot_to_twoway(&fot).unwrap();
        let report = check_equiv(&Artifact::TwoWay(t.clone()), &Artifact::TwoWay(back.clone()), 4).unwrap();
        assert!(report.is_equivalent(), "{name}: {}", report.summary());
        for w in ab().words_up_to(1, 4) {
            let out = fot.eval(&w).unwrap().map(|o| ab().format_word(&o));
            assert_eq!(out, Some(common::reference(name, &ab().format_word(&w))), "{name}");
        }
        assert!(TransitionMonoid::new(&back).is_aperiodic().aperiodic, "{name}");
    }
}

#[test]
fn example4_survives_both_translations() {
    let fot = fixtures::example4();
    let back = twoway_to_fot(&fot_to_twoway(&fot).unwrap()).unwrap();
    let report = check_equiv(&Artifact::Fot(fot), &Artifact::Fot(back), 4).unwrap();
    assert_eq!(report.summary(), "equivalent-up-to-4");
}
