//! Every artifact kind behind one type, parsed and serialized by the `type:`
//! header of its file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::format::{self, FormulaFile};
use crate::fot::FoTransduction;
use crate::lookaround::{FoLookAroundTransducer, SfLookAroundTransducer};
use crate::monoid::TransitionMonoid;
use crate::sequential::SequentialTransducer;
use crate::twoway::TwoWayTransducer;

#[derive(Clone, Debug)]
pub enum Artifact {
    TwoWay(TwoWayTransducer),
    Sequential(SequentialTransducer),
    Fot(FoTransduction),
    SfLookAround(SfLookAroundTransducer),
    FoLookAround(FoLookAroundTransducer),
    Dfa(Dfa),
    Formula(FormulaFile),
    Monoid(Arc<TransitionMonoid>),
}

/// An artifact with the name it was loaded under.
#[derive(Clone, Debug)]
pub struct NamedArtifact {
    pub name: String,
    pub source: Option<PathBuf>,
    pub artifact: Artifact,
}

impl Artifact {
    pub fn parse(src: &str) -> Result<Artifact> {
        let (rest, _) = format::extract_blocks(src)?;
        let kind = format::document(&rest)?.kind;
        Ok(match kind.as_str() {
            "twoway" => Artifact::TwoWay(format::parse_twoway(src)?),
            "sequential" => Artifact::Sequential(format::parse_sequential(src)?),
            "fot" => Artifact::Fot(format::parse_fot(src)?),
            "sfla" => Artifact::SfLookAround(format::parse_sf_lookaround(src)?),
            "fola" => Artifact::FoLookAround(format::parse_fo_lookaround(src)?),
            "dfa" => Artifact::Dfa(format::parse_dfa(src)?),
            "formula" => Artifact::Formula(format::parse_formula_file(src)?),
            "monoid" => Artifact::Monoid(Arc::new(format::parse_monoid(src)?)),
            other => {
                return Err(Error::Semantic { line: 1, message: format!("unknown artifact type `{other}`") })
            }
        })
    }

    pub fn serialize(&self) -> String {
        match self {
            Artifact::TwoWay(t) => format::serialize_twoway(t),
            Artifact::Sequential(t) => format::serialize_sequential(t),
            Artifact::Fot(t) => format::serialize_fot(t),
            Artifact::SfLookAround(t) => format::serialize_sf_lookaround(t),
            Artifact::FoLookAround(t) => format::serialize_fo_lookaround(t),
            Artifact::Dfa(d) => format::serialize_dfa(d),
            Artifact::Formula(f) => format::serialize_formula_file(f),
            Artifact::Monoid(m) => format::serialize_monoid(m),
        }
    }

    /// The `type:` keyword.
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::TwoWay(_) => "twoway",
            Artifact::Sequential(_) => "sequential",
            Artifact::Fot(_) => "fot",
            Artifact::SfLookAround(_) => "sfla",
            Artifact::FoLookAround(_) => "fola",
            Artifact::Dfa(_) => "dfa",
            Artifact::Formula(_) => "formula",
            Artifact::Monoid(_) => "monoid",
        }
    }

    /// Input and output alphabets of artifacts denoting word functions.
    pub fn signature(&self) -> Result<(&Alphabet, &Alphabet)> {
        match self {
            Artifact::TwoWay(t) => Ok((t.input(), t.output())),
            Artifact::Sequential(t) => Ok((t.input(), t.output())),
            Artifact::Fot(t) => Ok((t.input(), t.output())),
            Artifact::SfLookAround(t) => Ok((t.input(), t.output())),
            Artifact::FoLookAround(t) => Ok((t.input(), t.output())),
            _ => Err(Error::NotAFunction(self.kind().into())),
        }
    }

    /// The image of `w`, `None` where undefined.
    pub fn apply(&self, w: &[Letter]) -> Result<Option<Word>> {
        match self {
            Artifact::TwoWay(t) => Ok(t.simulate(w)?.output().cloned()),
            Artifact::Sequential(t) => Ok(t.run(w)),
            Artifact::Fot(t) => t.eval(w),
            Artifact::SfLookAround(t) => t.run(w),
            Artifact::FoLookAround(t) => t.run(w),
            _ => Err(Error::NotAFunction(self.kind().into())),
        }
    }
}

impl NamedArtifact {
    /// Reads and parses a file; the name is the file stem.
    pub fn load(path: &Path) -> Result<NamedArtifact> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Ok(NamedArtifact { name, source: Some(path.to_path_buf()), artifact: Artifact::parse(&src)? })
    }
}
