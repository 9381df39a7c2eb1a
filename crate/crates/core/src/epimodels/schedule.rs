use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment<P> {
    pub t_start: f64,
    pub params: P,
}

/// Piecewise-constant, right-continuous parameter schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamSchedule<P> {
    segments: Vec<Segment<P>>,
}

impl<P> ParamSchedule<P> {
    pub fn new(segments: Vec<Segment<P>>) -> Result<Self> {
        let s = Self { segments };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(t0: f64, params: P) -> Self {
        Self {
            segments: vec![Segment { t_start: t0, params }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return invalid("schedule needs at least one segment");
        }
        if self.segments.iter().any(|s| !s.t_start.is_finite()) {
            return invalid("schedule start times must be finite");
        }
        if self.segments.windows(2).any(|w| w[1].t_start <= w[0].t_start) {
            return invalid("schedule start times must be strictly increasing");
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment<P>] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.segments[0].t_start
    }

    /// Times at which the parameters jump (every start but the first).
    pub fn switch_times(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.t_start).collect()
    }

    /// Parameters of the last segment starting at or before `t`.
    pub fn at(&self, t: f64) -> Result<&P> {
        if t.is_nan() || t < self.start() {
            return invalid(format!("time {t} precedes the schedule start {}", self.start()));
        }
        let idx = self.segments.partition_point(|s| s.t_start <= t) - 1;
        Ok(&self.segments[idx].params)
    }
}
