//! Input parsing and file loading.

use std::fs;
use std::path::{Path, PathBuf};

use hilbert_core::domain::ConvexDomain;
use hilbert_core::projective::{flt_to_projective, FractionalLinearMap, ProjectiveMap, Vector};
use hilbert_core::rigidity::{SampledLineMap, SamplePair};
use hilbert_core::surface::{standard_genus2_group, GroupSpec, SurfaceGroup};
use hilbert_core::word::GroupWord;
use hilbert_core::GeometryError;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

pub type CliResult<T> = Result<T, CliError>;

/// A chart point given on the command line as comma-separated coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn vector(&self) -> Vector {
        Vector::from_vec(self.0.clone())
    }
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let coords = s
        .split(',')
        .map(|c| {
            let v: f64 = c.trim().parse().map_err(|_| format!("`{c}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{c}` is not finite"))
            }
        })
        .collect::<Result<Vec<f64>, String>>()?;
    if coords.is_empty() {
        return Err("expected comma-separated coordinates".into());
    }
    Ok(Point(coords))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn load_domain(path: &Path) -> CliResult<ConvexDomain> {
    read_json(path)
}

pub fn load_group(path: Option<&Path>) -> CliResult<SurfaceGroup> {
    match path {
        None => Ok(standard_genus2_group()?),
        Some(p) => {
            let spec: GroupSpec = read_json(p)?;
            Ok(SurfaceGroup::from_spec(&spec)?)
        }
    }
}

pub fn load_samples(path: &Path) -> CliResult<SampledLineMap> {
    let samples: Vec<SamplePair> = read_json(path)?;
    Ok(SampledLineMap::from_samples(&samples)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    Projective(ProjectiveMap),
    Fractional(FractionalLinearMap),
}

pub fn load_map(path: &Path) -> CliResult<ProjectiveMap> {
    match read_json(path)? {
        MapFile::Projective(t) => Ok(t),
        MapFile::Fractional(f) => Ok(flt_to_projective(&f)?),
    }
}

pub fn parse_word(s: &str) -> CliResult<GroupWord> {
    Ok(s.parse()?)
}
