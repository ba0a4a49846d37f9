//! JSON model files. Level, mode and index numbers are 1-based on disk.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gtable_from_geometry, Coupling, GTable, ModelSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default = "custom")]
    pub config: String,
    pub atoms: AtomsSection,
    /// Mode frequencies `Ω_s`.
    pub modes: Vec<f64>,
    #[serde(default)]
    pub couplings: Vec<CouplingEntry>,
    #[serde(default)]
    pub gtable: GTableSection,
}

fn custom() -> String {
    "custom".into()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AtomsSection {
    /// Level energies, starting at 0 and ending at 1.
    pub levels: Vec<f64>,
    #[serde(default = "yes")]
    pub real_dipoles: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub transition: [usize; 2],
    pub mode: usize,
    pub mu: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GTableSection {
    /// Generating entries; symmetry partners are filled in on load.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<GEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GEntry {
    pub index: [usize; 4],
    pub value: GValue,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GValue {
    Real(f64),
    Complex([f64; 2]),
}

impl GValue {
    fn to_complex(self) -> Complex64 {
        match self {
            GValue::Real(v) => Complex64::new(v, 0.0),
            GValue::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub separation: f64,
    pub direction: [f64; 3],
    pub dipoles: Vec<DipoleEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DipoleEntry {
    pub transition: [usize; 2],
    pub d: [f64; 3],
}

fn zero_based(i: usize, levels: usize) -> Result<usize> {
    if i == 0 || i > levels {
        Err(Error::LevelOutOfRange { index: i, levels })
    } else {
        Ok(i - 1)
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_spec(self) -> Result<ModelSpec> {
        let n = self.atoms.levels.len();
        let mut couplings = Vec::with_capacity(self.couplings.len());
        for c in &self.couplings {
            let a = zero_based(c.transition[0], n)?;
            let b = zero_based(c.transition[1], n)?;
            if c.mode == 0 || c.mode > self.modes.len() {
                return Err(Error::InvalidInput(format!(
                    "coupling refers to missing mode {}",
                    c.mode
                )));
            }
            couplings.push(Coupling {
                lower: a.min(b),
                upper: a.max(b),
                mode: c.mode - 1,
                mu: c.mu,
            });
        }

        let real = self.atoms.real_dipoles;
        let gtable = match (&self.gtable.entries[..], &self.gtable.geometry) {
            (entries, None) => {
                let mut table = GTable::new(n);
                for e in entries {
                    let mut idx = [0; 4];
                    for (slot, &i) in idx.iter_mut().zip(&e.index) {
                        *slot = zero_based(i, n)?;
                    }
                    table.insert_generator(idx, e.value.to_complex(), real)?;
                }
                table
            }
            ([], Some(geo)) => {
                if !real {
                    return Err(Error::InvalidInput("geometry input implies real dipoles".into()));
                }
                let mut dipoles = Vec::with_capacity(geo.dipoles.len());
                for d in &geo.dipoles {
                    let a = zero_based(d.transition[0], n)?;
                    let b = zero_based(d.transition[1], n)?;
                    dipoles.push(((a.min(b), a.max(b)), d.d));
                }
                gtable_from_geometry(n, &dipoles, geo.direction, geo.separation)?
            }
            _ => {
                return Err(Error::InvalidInput(
                    "gtable takes either `entries` or `geometry`, not both".into(),
                ));
            }
        };

        let spec = ModelSpec {
            levels: n,
            omegas: self.atoms.levels,
            modes: self.modes,
            couplings,
            gtable,
            real_dipoles: real,
            config: self.config,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Full (symmetry-completed) description of a model.
    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            config: spec.config.clone(),
            atoms: AtomsSection {
                levels: spec.omegas.clone(),
                real_dipoles: spec.real_dipoles,
            },
            modes: spec.modes.clone(),
            couplings: spec
                .couplings
                .iter()
                .map(|c| CouplingEntry {
                    transition: [c.lower + 1, c.upper + 1],
                    mode: c.mode + 1,
                    mu: c.mu,
                })
                .collect(),
            gtable: GTableSection {
                entries: spec
                    .gtable
                    .iter()
                    .map(|(idx, v)| GEntry {
                        index: idx.map(|i| i + 1),
                        value: if v.im == 0.0 {
                            GValue::Real(v.re)
                        } else {
                            GValue::Complex([v.re, v.im])
                        },
                    })
                    .collect(),
                geometry: None,
            },
        }
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    ModelFile::parse(text)?.into_spec()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    parse_model(&std::fs::read_to_string(path)?)
}
