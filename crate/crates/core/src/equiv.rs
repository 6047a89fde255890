//! Bounded functional equivalence by enumeration.

use crate::alphabet::{Alphabet, Word};
use crate::artifact::Artifact;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    /// The length-lexicographically least word on which the two differ.
    Counterexample { word: String, left: Option<String>, right: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub max_len: usize,
    pub words_tested: usize,
    pub verdict: Verdict,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == Verdict::Equivalent
    }

    /// `equivalent-up-to-N`, or the counterexample with both outputs
    /// (`undefined` where a side has none).
    pub fn summary(&self) -> String {
        match &self.verdict {
            Verdict::Equivalent => format!("equivalent-up-to-{}", self.max_len),
            Verdict::Counterexample { word, left, right } => {
                let show = |o: &Option<String>| o.as_ref().map_or("undefined".to_string(), |s| format!("\"{s}\""));
                format!("counterexample \"{word}\" ({} vs {})", show(left), show(right))
            }
        }
    }
}

/// Shortest word to check; every first-order transduction is undefined on
/// the empty word.
pub const MIN_LEN: usize = 1;

/// Compares two functions on all words over `alphabet` of length
/// `MIN_LEN..=max_len`, in length-lexicographic order. Outputs are compared
/// as rendered strings.
pub fn check_equiv_with<F, G>(alphabet: &Alphabet, max_len: usize, mut f: F, mut g: G) -> Result<EquivalenceReport>
where
    F: FnMut(&Word) -> Result<Option<String>>,
    G: FnMut(&Word) -> Result<Option<String>>,
{
    let mut words_tested = 0;
    for w in alphabet.words_up_to(MIN_LEN, max_len) {
        words_tested += 1;
        let (left, right) = (f(&w)?, g(&w)?);
        if left != right {
            // evaluations are pure; a second pass guards against harness bugs
            if (f(&w)?, g(&w)?) != (left.clone(), right.clone()) {
                return Err(Error::DeterminismViolation(format!(
                    "evaluation of `{}` is not reproducible",
                    alphabet.format_word(&w)
                )));
            }
            let word = alphabet.format_word(&w);
            return Ok(EquivalenceReport { max_len, words_tested, verdict: Verdict::Counterexample { word, left, right } });
        }
    }
    Ok(EquivalenceReport { max_len, words_tested, verdict: Verdict::Equivalent })
}

/// Bounded equivalence of two artifacts denoting word functions over the
/// same input symbols (letter order may differ).
pub fn check_equiv(x: &Artifact, y: &Artifact, max_len: usize) -> Result<EquivalenceReport> {
    let (xin, xout) = x.signature()?;
    let (yin, yout) = y.signature()?;
    let mut xs = xin.symbols().to_vec();
    let mut ys = yin.symbols().to_vec();
    xs.sort();
    ys.sort();
    if xs != ys {
        return Err(Error::IncompatibleAlphabets(format!("inputs {{{xin}}} and {{{yin}}} differ")));
    }
    let to_y: Vec<u32> = xin.symbols().iter().map(|s| yin.letter(s)).collect::<Result<_>>()?;
    check_equiv_with(
        xin,
        max_len,
        |w| Ok(x.apply(w)?.map(|o| xout.format_word(&o))),
        |w| {
            let w: Word = w.iter().map(|&a| to_y[a as usize]).collect();
            Ok(y.apply(&w)?.map(|o| yout.format_word(&o)))
        },
    )
}
