use crate::error::{Error, Result};

pub const DEFAULT_BUDGET_BITS: usize = 24;
pub const BUDGET_ENV: &str = "ZK_BUDGET_BITS";

/// Hard cap on the number of uniform input bits a constructed circuit may
/// have. Enumeration cost is `2^bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_input_bits: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_input_bits: DEFAULT_BUDGET_BITS,
        }
    }
}

impl Budget {
    pub fn new(max_input_bits: usize) -> Budget {
        Budget { max_input_bits }
    }

    /// Default budget, overridden by `ZK_BUDGET_BITS` when set.
    pub fn from_env() -> Budget {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&b: &usize| b >= 1)
            .map(Budget::new)
            .unwrap_or_default()
    }

    pub fn check(&self, what: &str, needed: usize) -> Result<()> {
        if needed > self.max_input_bits {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                needed,
                budget: self.max_input_bits,
            });
        }
        Ok(())
    }
}
