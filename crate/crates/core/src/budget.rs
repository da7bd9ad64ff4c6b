use crate::error::{Error, Result};

/// Search limits; exceeding one yields a capacity error instead of a wrong answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Node limit for exact bag-to-machine evaluation.
    pub exact_nodes: u64,
    /// Node limit for exact bin packing.
    pub packing_nodes: u64,
    /// Largest job count the partition enumerator accepts.
    pub enumeration_cap: usize,
    /// Maximum number of memoized DP cells.
    pub dp_cells: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            exact_nodes: 5_000_000,
            packing_nodes: 5_000_000,
            enumeration_cap: 10,
            dp_cells: 2_000_000,
        }
    }
}

pub const BUDGET_ENV: &str = "BAGSCHED_BUDGET";

impl Budget {
    /// Defaults overridden by `BAGSCHED_BUDGET`, if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(spec) => Budget::default().with_overrides(&spec),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Applies `N` (all node and cell limits) or `key=value,...` with keys
    /// `nodes`, `packing`, `enumeration`, `cells`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::validation(BUDGET_ENV, msg);
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<u64>() {
            self.exact_nodes = n;
            self.packing_nodes = n;
            self.dp_cells = n as usize;
            return Ok(self);
        }
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad number in {part:?}")))?;
            match key.trim() {
                "nodes" => self.exact_nodes = value,
                "packing" => self.packing_nodes = value,
                "enumeration" => self.enumeration_cap = value as usize,
                "cells" => self.dp_cells = value as usize,
                other => return Err(bad(format!("unknown budget key {other:?}"))),
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let b = Budget::default().with_overrides("1000").unwrap();
        assert_eq!((b.exact_nodes, b.packing_nodes, b.dp_cells), (1000, 1000, 1000));
        let b = Budget::default().with_overrides("enumeration=12, nodes=7").unwrap();
        assert_eq!((b.enumeration_cap, b.exact_nodes), (12, 7));
        assert!(Budget::default().with_overrides("speed=3").is_err());
    }
}
