use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GateMode, Workflow};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateReason {
    NotReleased,
    /// Reviews counted toward this prompt so far.
    Reviews { done: usize, required: usize },
    /// An earlier prompt in the chain is still locked.
    PreviousLocked { prompt: u32 },
}

impl fmt::Display for GateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateReason::NotReleased => f.write_str("not released"),
            GateReason::Reviews { done, required } => write!(f, "reviews {done}/{required}"),
            GateReason::PreviousLocked { prompt } => write!(f, "prompt {prompt} locked"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateDecision {
    pub allowed: bool,
    pub reasons: Vec<GateReason>,
}

impl GateDecision {
    /// Reasons joined for display; empty when allowed.
    pub fn reason(&self) -> String {
        self.reasons
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl Workflow {
    /// Whether `user_id` may upload for `prompt_index` at `now`.
    ///
    /// In per-cycle mode each prompt after the first needs its own reviews:
    /// prompt p unlocks once the user has completed the required reviews
    /// after the unlock of prompt p-1. An unlock happens at the later of the
    /// prompt's release and the review that completed the previous cycle.
    pub fn can_upload(&self, user_id: &str, prompt_index: u32, now: i64) -> Result<GateDecision> {
        if self.config.prompt(prompt_index).is_none() {
            return Err(Error::NotFound(format!("prompt {prompt_index}")));
        }
        let user = self.registered(user_id)?;
        let mut reasons = Vec::new();
        if !self.is_released(prompt_index, now) {
            reasons.push(GateReason::NotReleased);
        }
        if prompt_index > 1 {
            let required = self.config.reviews_required;
            let reviews: Vec<(i64, usize)> = user
                .counted_reviews
                .iter()
                .enumerate()
                .map(|(k, &t)| (t, k))
                .filter(|&(t, _)| t <= now)
                .collect();
            match self.config.gate_mode {
                GateMode::Cumulative => {
                    let done = reviews.len().saturating_sub(required * (prompt_index as usize - 2));
                    if reviews.len() < required * (prompt_index as usize - 1) {
                        reasons.push(GateReason::Reviews {
                            done: done.min(required),
                            required,
                        });
                    }
                }
                GateMode::PerCycle => {
                    if let Some(reason) = self.per_cycle(&reviews, prompt_index, required) {
                        reasons.push(reason);
                    }
                }
            }
        }
        Ok(GateDecision {
            allowed: reasons.is_empty(),
            reasons,
        })
    }

    fn per_cycle(&self, reviews: &[(i64, usize)], prompt_index: u32, required: usize) -> Option<GateReason> {
        let release = |q: u32| self.release_time(q).expect("prompt exists");
        // Position in (time, review order) after which reviews count.
        let mut unlock: (i64, i64) = (release(1), -1);
        for q in 2..=prompt_index {
            let window: Vec<&(i64, usize)> = reviews
                .iter()
                .filter(|&&(t, k)| (t, k as i64) > unlock)
                .collect();
            if window.len() < required {
                return Some(if q == prompt_index {
                    GateReason::Reviews {
                        done: window.len(),
                        required,
                    }
                } else {
                    GateReason::PreviousLocked { prompt: q }
                });
            }
            let (t, k) = *window[required - 1];
            unlock = (release(q), -1).max((t, k as i64));
        }
        None
    }
}
