//! System to basic-set sections to refinement to diagram to verdicts.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basic::{quasi_section_from_basic, BasicApprox, BasicParams};
use crate::bratteli::{
    diagram_from_kr, to_dot, ConjugacyCoding, DiagramJson, OrderedBratteliDiagram,
};
use crate::decisive::{
    check_at_most_once, check_closing, check_decisive, check_densely_aperiodic,
    check_quasi_section_empty_interior, Coding, PropertyVerdict,
};
use crate::error::{Error, Result};
use crate::io::{to_json, write_atomic, BasicApproxJson, KrJson};
use crate::shift::EdgeShift;
use crate::towers::{build_kr_refinement, verify_kr, KRRefinement, QuasiSectionApprox};

pub const ARTIFACTS: [&str; 5] = [
    "basic.json",
    "kr.json",
    "diagram.json",
    "diagram.dot",
    "verdicts.json",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub depth: usize,
    /// `M` at every level; `n` at level `n` when absent.
    pub shift_bound: Option<usize>,
    /// `W` at every level; `max(6n, 4n + 2M)` when absent.
    pub window: Option<usize>,
}

impl PipelineConfig {
    pub fn new(depth: usize) -> Self {
        PipelineConfig {
            depth,
            shift_bound: None,
            window: None,
        }
    }

    pub fn params(&self, n: usize) -> BasicParams {
        let shift_bound = self.shift_bound.unwrap_or(n);
        BasicParams {
            shift_bound,
            window: self.window.unwrap_or((6 * n).max(4 * n + 2 * shift_bound)),
        }
    }

    /// Checks the preconditions of every stage before anything runs.
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidParams("depth must be positive".into()));
        }
        if self.shift_bound == Some(0) {
            return Err(Error::InvalidParams("shift bound must be positive".into()));
        }
        for n in 1..=self.depth {
            let p = self.params(n);
            if p.window < 4 * n + 2 * p.shift_bound {
                return Err(Error::InvalidParams(format!(
                    "window {} is below 4n + 2M = {} at level {n}",
                    p.window,
                    4 * n + 2 * p.shift_bound
                )));
            }
        }
        Ok(())
    }

    /// Largest period whose orbits the deepest section separates: every
    /// phase is within `M` shifts of the least one and differences show
    /// by shell `depth`.
    pub fn period_bound(&self) -> usize {
        self.depth.min(2 * self.params(self.depth).shift_bound + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

fn stage<T>(name: &'static str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|error| StageError { stage: name, error })
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub approx: Vec<BasicApprox>,
    pub sections: QuasiSectionApprox,
    pub refinement: KRRefinement,
    pub diagram: OrderedBratteliDiagram,
    pub coding: ConjugacyCoding,
    pub verdicts: Vec<PropertyVerdict>,
}

impl PipelineOutput {
    /// File names with their contents, in [`ARTIFACTS`] order.
    pub fn artifacts(&self) -> Result<Vec<(&'static str, String)>> {
        let basic: Vec<BasicApproxJson> = self.approx.iter().map(Into::into).collect();
        Ok(vec![
            (ARTIFACTS[0], to_json(&basic)?),
            (ARTIFACTS[1], to_json(&KrJson::from(&self.refinement))?),
            (ARTIFACTS[2], to_json(&DiagramJson::from(&self.diagram))?),
            (ARTIFACTS[3], to_dot(&self.diagram)),
            (ARTIFACTS[4], to_json(&self.verdicts)?),
        ])
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, text) in self.artifacts()? {
            write_atomic(&dir.join(name), &text)?;
        }
        Ok(())
    }
}

pub fn verdict_bundle(
    shift: &Arc<EdgeShift>,
    qs: &QuasiSectionApprox,
    r: &KRRefinement,
    d: &OrderedBratteliDiagram,
    depth: usize,
    period_bound: usize,
) -> Vec<PropertyVerdict> {
    let coding = Coding {
        refinement: r,
        period_bound,
    };
    vec![
        check_closing(d, Some(coding), depth),
        check_decisive(d, false),
        check_densely_aperiodic(shift),
        check_quasi_section_empty_interior(qs, depth),
        check_at_most_once(qs, depth, period_bound),
    ]
}

pub fn run_pipeline(
    shift: &Arc<EdgeShift>,
    cfg: &PipelineConfig,
) -> std::result::Result<PipelineOutput, StageError> {
    stage("config", cfg.validate())?;
    let (sections, approx) = stage(
        "basic",
        quasi_section_from_basic(shift, cfg.depth, &|n| cfg.params(n)),
    )?;
    let refinement = stage("kr", build_kr_refinement(&sections, cfg.depth))?;
    let report = verify_kr(&refinement);
    if let Some(v) = report.violation {
        return Err(StageError {
            stage: "verify",
            error: Error::InvalidRefinement(v.to_string()),
        });
    }
    let (diagram, coding) = stage("diagram", diagram_from_kr(&refinement))?;
    let verdicts = verdict_bundle(
        shift,
        &sections,
        &refinement,
        &diagram,
        cfg.depth,
        cfg.period_bound(),
    );
    Ok(PipelineOutput {
        approx,
        sections,
        refinement,
        diagram,
        coding,
        verdicts,
    })
}
