//! Thrust command profiles for closed-loop experiments.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Reference-signal shapes. Random segments are drawn per experiment from a
/// seeded stream so replays are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CommandProfile {
    /// One constant command.
    Constant { value: f64 },
    /// Uniformly random step commands held for `hold` control steps.
    RandomSteps { lo: f64, hi: f64, hold: u64 },
    /// Explicit (value, hold) segments, cycled if shorter than the run.
    Sequence { steps: Vec<(f64, u64)> },
}

impl CommandProfile {
    /// Materialize the command value for every control step.
    pub fn trace(&self, n_steps: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            CommandProfile::Constant { value } => vec![*value; n_steps as usize],
            CommandProfile::RandomSteps { lo, hi, hold } => {
                let hold = (*hold).max(1);
                let mut out = Vec::with_capacity(n_steps as usize);
                let mut current = rng.random_range(*lo..*hi);
                for k in 0..n_steps {
                    if k > 0 && k % hold == 0 {
                        current = rng.random_range(*lo..*hi);
                    }
                    out.push(current);
                }
                out
            }
            CommandProfile::Sequence { steps } => {
                assert!(!steps.is_empty(), "sequence profile needs segments");
                let mut out = Vec::with_capacity(n_steps as usize);
                'outer: loop {
                    for &(value, hold) in steps {
                        for _ in 0..hold.max(1) {
                            if out.len() as u64 == n_steps {
                                break 'outer;
                            }
                            out.push(value);
                        }
                    }
                }
                out
            }
        }
    }
}
