//! Rider models. The rider is a black box whose only output is the target
//! speed `drive_intent`, here a piecewise profile over time.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::Issue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Jump to `target` at `start_t` and hold it.
    Constant,
    /// Move linearly from the value reached at `start_t` to `target` at `end_t`, then hold.
    Ramp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub start_t: f64,
    pub kind: SegmentKind,
    pub target: f64,
    /// End of the ramp. Required for ramps, absent for constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_t: Option<f64>,
}

impl Segment {
    pub fn constant(start_t: f64, target: f64) -> Self {
        Segment { start_t, kind: SegmentKind::Constant, target, end_t: None }
    }

    pub fn ramp(start_t: f64, end_t: f64, target: f64) -> Self {
        Segment { start_t, kind: SegmentKind::Ramp, target, end_t: Some(end_t) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntentProfile {
    pub segments: Vec<Segment>,
}

impl Default for IntentProfile {
    fn default() -> Self {
        IntentProfile::constant(0.0)
    }
}

impl IntentProfile {
    pub fn constant(v: f64) -> Self {
        IntentProfile { segments: vec![Segment::constant(0.0, v)] }
    }

    /// `before` until `at`, then `after`.
    pub fn step(before: f64, at: f64, after: f64) -> Self {
        IntentProfile { segments: vec![Segment::constant(0.0, before), Segment::constant(at, after)] }
    }

    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        match self.segments.first() {
            None => issues.push(Issue::new("segments", "at least one segment is required")),
            Some(first) if first.start_t != 0.0 => {
                issues.push(Issue::new("segments[0].start_t", "the first segment must start at 0"))
            }
            _ => {}
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !s.start_t.is_finite() {
                issues.push(Issue::new(alloc::format!("segments[{i}].start_t"), "must be finite"));
            }
            if !s.target.is_finite() {
                issues.push(Issue::new(alloc::format!("segments[{i}].target"), "must be finite"));
            }
            if i > 0 && s.start_t <= self.segments[i - 1].start_t {
                issues.push(Issue::new(
                    alloc::format!("segments[{i}].start_t"),
                    "segment start times must be strictly increasing",
                ));
            }
            match (s.kind, s.end_t) {
                (SegmentKind::Ramp, Some(end)) if end > s.start_t && end.is_finite() => {
                    if let Some(next) = self.segments.get(i + 1) {
                        if end > next.start_t {
                            issues.push(Issue::new(
                                alloc::format!("segments[{i}].end_t"),
                                "ramp must end before the next segment starts",
                            ));
                        }
                    }
                }
                (SegmentKind::Ramp, _) => issues.push(Issue::new(
                    alloc::format!("segments[{i}].end_t"),
                    "ramp needs a finite end_t after start_t",
                )),
                (SegmentKind::Constant, Some(_)) => issues.push(Issue::new(
                    alloc::format!("segments[{i}].end_t"),
                    "constant segments take no end_t",
                )),
                (SegmentKind::Constant, None) => {}
            }
        }
        issues
    }
}

/// Target speed at time `t`. Times before the first segment use the first
/// segment's value.
pub fn intent_at(profile: &IntentProfile, t: f64) -> f64 {
    let mut value = 0.0;
    for s in &profile.segments {
        if s.start_t > t {
            break;
        }
        value = match (s.kind, s.end_t) {
            (SegmentKind::Ramp, Some(end)) if t < end => {
                let frac = (t - s.start_t) / (end - s.start_t);
                value + (s.target - value) * frac
            }
            _ => s.target,
        };
    }
    value
}
