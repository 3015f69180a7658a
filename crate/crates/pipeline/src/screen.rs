//! Screening queue: human decisions plus the automatic screen.

use mattekit_core::connectivity::{auto_screen, ScreenVerdict, ScreeningThresholds};

use crate::error::{PipelineError, Result};
use crate::manifest::{timestamp, DecidedBy, Manifest, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn target(self) -> Status {
        match self {
            Decision::Accept => Status::Accepted,
            Decision::Reject => Status::Rejected,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScreenSummary {
    pub accepted: usize,
    pub flagged: usize,
    pub decided: usize,
}

/// Applies a reviewer's decision to a pending or flagged sample.
pub fn decide(manifest: &mut Manifest, id: &str, decision: Decision) -> Result<()> {
    let now = timestamp();
    let record = manifest
        .sample_mut(id)
        .ok_or_else(|| PipelineError::UnknownSample(id.to_string()))?;
    record.transition(decision.target(), DecidedBy::Human, &now)
}

/// Applies `decisions` first, then screens every remaining pending sample:
/// those within `thresholds` are accepted, the rest flagged for review.
pub fn screen(
    manifest: &mut Manifest,
    thresholds: &ScreeningThresholds,
    decisions: &[(String, Decision)],
) -> Result<ScreenSummary> {
    let mut summary = ScreenSummary::default();
    for (id, decision) in decisions {
        decide(manifest, id, *decision)?;
        summary.decided += 1;
    }
    let now = timestamp();
    for record in manifest.samples.iter_mut().filter(|s| s.status == Status::Pending) {
        let to = match auto_screen(&record.screening, thresholds) {
            ScreenVerdict::Pass => {
                summary.accepted += 1;
                Status::Accepted
            }
            ScreenVerdict::Flag => {
                summary.flagged += 1;
                Status::Flagged
            }
        };
        record.transition(to, DecidedBy::Auto, &now)?;
    }
    Ok(summary)
}
