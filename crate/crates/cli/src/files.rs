//! Description-file parsing.
//!
//! One JSON object per file. Lattices: `elements` (labels) and `leq`
//! (label pairs, closed reflexively and transitively). Sites add a
//! `coverage` object: `{"kind": "finite-join"}`, `{"kind": "mu-inner",
//! "valuation": {label: "p/q"}}` with integers accepted as shorthand, or
//! `{"kind": "explicit", "covers": [[target, [members]]]}`. Regions:
//! `dim`, `thinness`, `cubes` (integer corner vectors).

use std::path::Path;
use std::sync::Arc;

use muloc_core::{
    check_valuation, CoverageSpec, ElemSet, ElementId, FiniteLattice, Rat, SitePresentation,
    StandardSet, Valuation, ValuationError,
};
use serde::Deserialize;

/// Input-file rejection, annotated with the file and, for syntax errors,
/// the line and column.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Content { path: String, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteFile {
    elements: Vec<String>,
    #[serde(default)]
    leq: Vec<(String, String)>,
    coverage: Option<CoverageFile>,
}

#[derive(Deserialize)]
#[serde(tag = "kind")]
enum CoverageFile {
    #[serde(rename = "finite-join")]
    FiniteJoin,
    #[serde(rename = "mu-inner")]
    MuInner {
        valuation: serde_json::Map<String, serde_json::Value>,
    },
    #[serde(rename = "explicit")]
    Explicit { covers: Vec<(String, Vec<String>)> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    dim: usize,
    thinness: u32,
    cubes: Vec<Vec<i64>>,
}

/// How the file asked covers to be generated.
#[derive(Clone, Debug)]
pub enum ParsedCoverage {
    FiniteJoin,
    /// Values in element-index order, parsed but not yet law-checked.
    MuInner {
        values: Vec<Rat>,
    },
    Explicit {
        covers: Vec<(ElementId, ElemSet)>,
    },
}

/// A validated lattice plus the raw coverage request.
#[derive(Clone, Debug)]
pub struct ParsedSite {
    pub path: String,
    pub lattice: Arc<FiniteLattice>,
    pub coverage: Option<ParsedCoverage>,
}

impl ParsedSite {
    /// The declared valuation, law-checked. Callers decide whether a law
    /// violation is the verdict under test or bad input.
    pub fn valuation(&self) -> Result<Result<Valuation, ValuationError>, ParseError> {
        match &self.coverage {
            Some(ParsedCoverage::MuInner { values }) => {
                Ok(check_valuation(self.lattice.clone(), values.clone()))
            }
            _ => Err(self.content("coverage kind `mu-inner` with a valuation is required")),
        }
    }

    /// The site the file describes; files without a coverage block get
    /// the finite-join coverage.
    pub fn site(&self) -> Result<SitePresentation, ParseError> {
        match &self.coverage {
            None | Some(ParsedCoverage::FiniteJoin) => {
                Ok(SitePresentation::finite_join(self.lattice.clone()))
            }
            Some(ParsedCoverage::MuInner { values }) => {
                let v = check_valuation(self.lattice.clone(), values.clone())
                    .map_err(|e| self.content(&e.to_string()))?;
                Ok(SitePresentation::mu_inner(v))
            }
            Some(ParsedCoverage::Explicit { covers }) => {
                let spec = CoverageSpec::new(&self.lattice, covers.clone())
                    .map_err(|e| self.content(&e.to_string()))?;
                Ok(SitePresentation::explicit(self.lattice.clone(), spec))
            }
        }
    }

    /// Looks up one element by its label.
    pub fn element(&self, label: &str) -> Result<ElementId, ParseError> {
        self.lattice
            .elements()
            .find(|e| self.lattice.label(*e) == Some(label))
            .ok_or_else(|| self.content(&format!("unknown element `{label}`")))
    }

    fn content(&self, message: &str) -> ParseError {
        ParseError::Content {
            path: self.path.clone(),
            message: message.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn syntax(path: &Path, e: &serde_json::Error) -> ParseError {
    ParseError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn content(path: &Path, message: String) -> ParseError {
    ParseError::Content {
        path: path.display().to_string(),
        message,
    }
}

fn parse_rat(label: &str, raw: &serde_json::Value) -> Result<Rat, String> {
    match raw {
        serde_json::Value::String(s) => s
            .parse::<Rat>()
            .map_err(|e| format!("value for `{label}`: {e}")),
        serde_json::Value::Number(n) => n
            .as_u64()
            .map(Rat::from_int)
            .ok_or_else(|| format!("value for `{label}` must be a nonnegative integer or `p/q`")),
        _ => Err(format!("value for `{label}` must be a string or integer")),
    }
}

/// Parses a lattice or site file; every error names the file, and label
/// or law problems carry the offending labels.
pub fn parse_site_file(path: &Path) -> Result<ParsedSite, ParseError> {
    let text = read(path)?;
    let file: SiteFile = serde_json::from_str(&text).map_err(|e| syntax(path, &e))?;

    let elements: Vec<&str> = file.elements.iter().map(String::as_str).collect();
    let leq: Vec<(&str, &str)> = file
        .leq
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let lattice =
        FiniteLattice::build(&elements, &leq).map_err(|e| content(path, e.to_string()))?;

    let lookup = |label: &str| -> Result<ElementId, ParseError> {
        lattice
            .elements()
            .find(|e| lattice.label(*e) == Some(label))
            .ok_or_else(|| content(path, format!("unknown element `{label}` in coverage")))
    };

    let coverage = match file.coverage {
        None => None,
        Some(CoverageFile::FiniteJoin) => Some(ParsedCoverage::FiniteJoin),
        Some(CoverageFile::MuInner { valuation }) => {
            let mut values = vec![None; lattice.size()];
            for (label, raw) in &valuation {
                let e = lookup(label)?;
                let r = parse_rat(label, raw).map_err(|m| content(path, m))?;
                values[e.index()] = Some(r);
            }
            let values = lattice
                .elements()
                .map(|e| {
                    values[e.index()].clone().ok_or_else(|| {
                        content(
                            path,
                            format!("no value for element `{}`", lattice.display(e)),
                        )
                    })
                })
                .collect::<Result<Vec<Rat>, ParseError>>()?;
            Some(ParsedCoverage::MuInner { values })
        }
        Some(CoverageFile::Explicit { covers }) => {
            let mut out = Vec::with_capacity(covers.len());
            for (target, members) in &covers {
                let t = lookup(target)?;
                let mut family = ElemSet::EMPTY;
                for m in members {
                    family.insert(lookup(m)?);
                }
                out.push((t, family));
            }
            Some(ParsedCoverage::Explicit { covers: out })
        }
    };

    Ok(ParsedSite {
        path: path.display().to_string(),
        lattice,
        coverage,
    })
}

/// Parses a region file into a standard set.
pub fn parse_region_file(path: &Path) -> Result<StandardSet, ParseError> {
    let text = read(path)?;
    let file: RegionFile = serde_json::from_str(&text).map_err(|e| syntax(path, &e))?;
    StandardSet::new(file.dim, file.thinness, file.cubes.into_iter())
        .map_err(|e| content(path, e.to_string()))
}
