//! JSON forms of systems, refinements and approximations, and file output.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basic::{BasicApprox, BasicParams};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::section::CompletenessReport;
use crate::shift::{EdgeShift, SystemSpec};
use crate::towers::{KRLevel, KRRefinement, KrReport, Provenance, QuasiSectionApprox, Step, Tower};

pub const BUILTIN_SYSTEMS: &[&str] = &["full-2", "full-3", "golden-mean", "two-fixed-points"];

pub fn builtin_system(name: &str) -> Result<SystemSpec> {
    let (alphabet, forbidden): (&[&str], &[&str]) = match name {
        "full-2" => (&["0", "1"], &[]),
        "full-3" => (&["0", "1", "2"], &[]),
        "golden-mean" => (&["0", "1"], &["11"]),
        "two-fixed-points" => (&["0", "1"], &["01", "10"]),
        _ => return Err(Error::InvalidParams(format!("unknown system {name}"))),
    };
    Ok(SystemSpec {
        alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
        forbidden: Some(forbidden.iter().map(|s| s.to_string()).collect()),
        graph: None,
    })
}

/// A builtin name, or else a path to a system file.
pub fn load_system(source: &str) -> Result<Arc<EdgeShift>> {
    let spec = if BUILTIN_SYSTEMS.contains(&source) {
        builtin_system(source)?
    } else {
        serde_json::from_str(&fs::read_to_string(source)?)?
    };
    Ok(Arc::new(EdgeShift::from_spec(&spec)?))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a sibling temporary file, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessJson {
    pub set: String,
    pub complete: bool,
    pub forward_bound: Option<usize>,
    pub backward_bound: Option<usize>,
    pub witness_cycle: Option<String>,
}

impl CompletenessJson {
    pub fn new(u: &ClopenSet, rep: &CompletenessReport) -> Self {
        CompletenessJson {
            set: u.to_string(),
            complete: rep.complete,
            forward_bound: rep.forward_bound,
            backward_bound: rep.backward_bound,
            witness_cycle: rep
                .witness_cycle
                .as_ref()
                .map(|o| u.shift().format_word(o.word())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicApproxJson {
    pub depth: usize,
    pub params: BasicParams,
    pub surviving: String,
}

impl From<&BasicApprox> for BasicApproxJson {
    fn from(a: &BasicApprox) -> Self {
        BasicApproxJson {
            depth: a.depth,
            params: a.params,
            surviving: a.surviving.to_string(),
        }
    }
}

impl BasicApproxJson {
    pub fn parse(&self, shift: &Arc<EdgeShift>) -> Result<BasicApprox> {
        Ok(BasicApprox {
            depth: self.depth,
            params: self.params,
            surviving: ClopenSet::parse(shift, &self.surviving)?,
        })
    }
}

/// User-supplied sections `A_1 ⊇ A_2 ⊇ ...` in clopen syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionsJson {
    pub levels: Vec<String>,
}

impl SectionsJson {
    pub fn parse(&self, shift: &Arc<EdgeShift>) -> Result<QuasiSectionApprox> {
        let levels = self
            .levels
            .iter()
            .map(|s| ClopenSet::parse(shift, s))
            .collect::<Result<_>>()?;
        QuasiSectionApprox::new(levels, Provenance::UserSupplied)
    }
}

impl From<&QuasiSectionApprox> for SectionsJson {
    fn from(qs: &QuasiSectionApprox) -> Self {
        SectionsJson {
            levels: qs.levels().iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    pub base: String,
    pub height: usize,
    /// Per floor: `cell/tower.floor`, the central cell followed by the
    /// enclosing floor one level down.
    pub itinerary: Vec<String>,
    pub landing: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrLevelJson {
    pub index: usize,
    pub radius: usize,
    pub section: String,
    pub towers: Vec<TowerJson>,
    pub nesting: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrJson {
    pub system: SystemSpec,
    pub levels: Vec<KrLevelJson>,
}

impl From<&KRRefinement> for KrJson {
    fn from(r: &KRRefinement) -> Self {
        let shift = r.shift();
        let levels = r
            .levels()
            .iter()
            .map(|l| KrLevelJson {
                index: l.index,
                radius: l.radius,
                section: l.section.to_string(),
                towers: l
                    .towers
                    .iter()
                    .map(|t| TowerJson {
                        base: t.base.to_string(),
                        height: t.height,
                        itinerary: t
                            .itinerary
                            .iter()
                            .map(|s| {
                                format!(
                                    "{}/{}.{}",
                                    shift.format_word(&s.cell),
                                    s.prev_tower,
                                    s.prev_floor
                                )
                            })
                            .collect(),
                        landing: shift.format_word(&t.landing),
                    })
                    .collect(),
                nesting: l.nesting(),
            })
            .collect();
        KrJson {
            system: shift.to_spec(),
            levels,
        }
    }
}

fn parse_step(shift: &EdgeShift, s: &str) -> Result<Step> {
    let bad = || Error::BadSyntax(format!("bad itinerary entry {s:?}"));
    let (cell, rest) = s.rsplit_once('/').ok_or_else(bad)?;
    let (t, f) = rest.split_once('.').ok_or_else(bad)?;
    Ok(Step {
        cell: shift.parse_word(cell)?,
        prev_tower: t.parse().map_err(|_| bad())?,
        prev_floor: f.parse().map_err(|_| bad())?,
    })
}

impl KrJson {
    /// Rebuilds the refinement; the nesting tables must agree with the
    /// itineraries. The axioms are left to `verify_kr`.
    pub fn parse(&self) -> Result<KRRefinement> {
        let shift = Arc::new(EdgeShift::from_spec(&self.system)?);
        let mut levels = Vec::new();
        for l in &self.levels {
            let towers = l
                .towers
                .iter()
                .map(|t| {
                    Ok(Tower {
                        base: ClopenSet::parse(&shift, &t.base)?,
                        height: t.height,
                        itinerary: t
                            .itinerary
                            .iter()
                            .map(|s| parse_step(&shift, s))
                            .collect::<Result<_>>()?,
                        landing: shift.parse_word(&t.landing)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let level = KRLevel {
                index: l.index,
                radius: l.radius,
                section: ClopenSet::parse(&shift, &l.section)?,
                towers,
            };
            if level.nesting() != l.nesting {
                return Err(Error::InvalidRefinement(format!(
                    "level {}: nesting table disagrees with itineraries",
                    l.index
                )));
            }
            levels.push(level);
        }
        if levels.is_empty() {
            return Err(Error::InvalidRefinement("no levels".into()));
        }
        Ok(KRRefinement::from_levels(&shift, levels))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrReportJson {
    pub ok: bool,
    pub levels_checked: usize,
    pub violation: Option<String>,
}

impl From<&KrReport> for KrReportJson {
    fn from(r: &KrReport) -> Self {
        KrReportJson {
            ok: r.is_ok(),
            levels_checked: r.levels_checked,
            violation: r.violation.as_ref().map(ToString::to_string),
        }
    }
}
