mod common;

use twoway_core::fixtures::ab;

#[test]
fn crafted_machines_match_their_references() {
    for (name, t) in common::machines() {
        for w in ab().words_up_to(0, 7) {
            let out = t.run(&w).map(|o| ab().format_word(&o));
            assert_eq!(out, Some(common::reference(name, &ab().format_word(&w))), "{name}");
        }
        assert!(twoway_core::TransitionMonoid::new(&t).is_aperiodic().aperiodic, "{name}");
    }
}
