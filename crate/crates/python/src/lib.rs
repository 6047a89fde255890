//! Python module `twoway`. Artifacts are passed as text in the file format;
//! words as strings in the artifact's alphabet.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use twoway_core::{fixtures, Artifact, TransitionMonoid};

fn err(e: twoway_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed artifact of any kind.
#[pyclass(name = "Artifact", frozen)]
struct PyArtifact(Artifact);

#[pymethods]
impl PyArtifact {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Artifact::parse(text).map(PyArtifact).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    fn serialize(&self) -> String {
        self.0.serialize()
    }

    /// Image of `word`, or `None` where undefined.
    fn apply(&self, word: &str) -> PyResult<Option<String>> {
        let (input, output) = self.0.signature().map_err(err)?;
        let w = input.parse_word(word).map_err(err)?;
        Ok(self.0.apply(&w).map_err(err)?.map(|o| output.format_word(&o)))
    }

    fn __repr__(&self) -> String {
        format!("<twoway.Artifact {}>", self.0.kind())
    }
}

impl PyArtifact {
    fn twoway(&self) -> PyResult<&twoway_core::TwoWayTransducer> {
        match &self.0 {
            Artifact::TwoWay(t) => Ok(t),
            other => Err(PyValueError::new_err(format!("expected a twoway artifact, found {}", other.kind()))),
        }
    }
}

#[pyclass(frozen, get_all)]
struct EquivalenceReport {
    verdict: String,
    max_len: usize,
    words_tested: usize,
    word: Option<String>,
    left: Option<String>,
    right: Option<String>,
}

#[pymethods]
impl EquivalenceReport {
    fn __bool__(&self) -> bool {
        self.word.is_none()
    }
}

#[pyfunction]
fn check_equiv(x: &PyArtifact, y: &PyArtifact, max_len: usize) -> PyResult<EquivalenceReport> {
    let r = twoway_core::check_equiv(&x.0, &y.0, max_len).map_err(err)?;
    let summary = r.summary();
    Ok(match r.verdict {
        twoway_core::Verdict::Equivalent => EquivalenceReport {
            verdict: summary,
            max_len,
            words_tested: r.words_tested,
            word: None,
            left: None,
            right: None,
        },
        twoway_core::Verdict::Counterexample { word, left, right } => EquivalenceReport {
            verdict: "counterexample".into(),
            max_len,
            words_tested: r.words_tested,
            word: Some(word),
            left,
            right,
        },
    })
}

/// `(aperiodic, index, monoid size)` of a two-way machine.
#[pyfunction]
fn aperiodic(t: &PyArtifact) -> PyResult<(bool, Option<usize>, usize)> {
    let m = TransitionMonoid::new(t.twoway()?);
    let ap = m.is_aperiodic();
    Ok((ap.aperiodic, ap.index, m.len()))
}

/// The four behaviors of `word`, as pairs of state names keyed by `ll`, `lr`, `rl`, `rr`.
#[pyfunction]
fn behaviors(t: &PyArtifact, word: &str) -> PyResult<Vec<(&'static str, Vec<(String, String)>)>> {
    let t = t.twoway()?;
    let w = t.input().parse_word(word).map_err(err)?;
    let p = twoway_core::behaviors(t, &w);
    let named = |v: Vec<(u32, u32)>| {
        v.into_iter().map(|(a, b)| (t.state_name(a).to_string(), t.state_name(b).to_string())).collect()
    };
    Ok(vec![("ll", named(p.bh_ll())), ("lr", named(p.bh_lr())), ("rl", named(p.bh_rl())), ("rr", named(p.bh_rr()))])
}

#[pyfunction]
fn to_fot(t: &PyArtifact) -> PyResult<PyArtifact> {
    twoway_core::twoway_to_fot(t.twoway()?).map(|f| PyArtifact(Artifact::Fot(f))).map_err(err)
}

#[pyfunction]
fn from_fot(t: &PyArtifact) -> PyResult<PyArtifact> {
    match &t.0 {
        Artifact::Fot(f) => twoway_core::fot_to_twoway(f).map(|m| PyArtifact(Artifact::TwoWay(m))).map_err(err),
        other => Err(PyValueError::new_err(format!("expected a fot artifact, found {}", other.kind()))),
    }
}

#[pyfunction]
fn compose(first: &PyArtifact, second: &PyArtifact) -> PyResult<PyArtifact> {
    let Artifact::Sequential(a) = &first.0 else {
        return Err(PyValueError::new_err("the first stage must be a sequential transducer"));
    };
    let b = second.twoway()?.normalize();
    twoway_core::compose_seq_2w(a, &b).map(|c| PyArtifact(Artifact::TwoWay(c.trim()))).map_err(err)
}

#[pymodule]
fn twoway(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArtifact>()?;
    m.add_class::<EquivalenceReport>()?;
    m.add_function(wrap_pyfunction!(check_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(aperiodic, m)?)?;
    m.add_function(wrap_pyfunction!(behaviors, m)?)?;
    m.add_function(wrap_pyfunction!(to_fot, m)?)?;
    m.add_function(wrap_pyfunction!(from_fot, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add("FIG1", fixtures::FIG1_SRC)?;
    m.add("EXAMPLE4", fixtures::EXAMPLE4_SRC)?;
    m.add("PARITY", fixtures::PARITY_SRC)?;
    Ok(())
}
