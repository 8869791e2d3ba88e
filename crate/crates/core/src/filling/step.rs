use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `φ(n) = l_i` for `l_i <= n < l_{i+1}` and `φ(n) = 0` below `l_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<u64>,
}

impl StepFunction {
    pub fn breakpoints(&self) -> &[u64] {
        &self.breakpoints
    }

    pub fn eval(&self, n: u64) -> u64 {
        match self.breakpoints.partition_point(|&l| l <= n) {
            0 => 0,
            i => self.breakpoints[i - 1],
        }
    }
}

/// The step function with the given strictly increasing breakpoints.
pub fn phi_step_function(lengths: &[u64]) -> Result<StepFunction> {
    if lengths.is_empty() {
        return Err(Error::InvalidParameter("at least one breakpoint is required".into()));
    }
    if let Some(w) = lengths.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "breakpoints must increase strictly ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(StepFunction { breakpoints: lengths.to_vec() })
}
