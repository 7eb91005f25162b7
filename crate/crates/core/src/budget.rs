//! Resource limits shared by every enumeration.

use serde::Serialize;

use crate::error::{Error, Result};

/// Name of the environment variable that overrides the default budget.
///
/// Format: comma-separated `key=value` pairs with keys `atoms`, `length`,
/// `memo`, `supports`, e.g. `ZSLEN_BUDGET=atoms=200000,memo=5000000`.
pub const BUDGET_ENV: &str = "ZSLEN_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceConfig {
    /// Maximal number of atoms produced by one enumeration.
    pub max_atoms: u64,
    /// Maximal atom length explored; `None` means the group order, which is
    /// a mathematically safe bound and can never truncate.
    pub max_length: Option<u64>,
    /// Maximal number of memo entries in one length-set computation.
    pub max_memo: u64,
    /// Maximal number of qualifying supports examined for one group.
    pub max_supports: u64,
}

impl Default for ResourceConfig {
    fn default() -> Self {
        ResourceConfig {
            max_atoms: 1_000_000,
            max_length: None,
            max_memo: 20_000_000,
            max_supports: 1 << 20,
        }
    }
}

impl ResourceConfig {
    /// Defaults overridden by `ZSLEN_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(s) => Self::default().with_overrides(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("budget item {item:?} is not key=value")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("budget value {v:?} is not an integer")))?;
            match k.trim() {
                "atoms" => self.max_atoms = v,
                "length" => self.max_length = Some(v),
                "memo" => self.max_memo = v,
                "supports" => self.max_supports = v,
                other => return Err(Error::Parse(format!("unknown budget key {other:?}"))),
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
        let c = ResourceConfig::default()
            .with_overrides("atoms=10, length=7,memo=3")
            .unwrap();
        assert_eq!(c.max_atoms, 10);
        assert_eq!(c.max_length, Some(7));
        assert_eq!(c.max_memo, 3);
        assert!(ResourceConfig::default().with_overrides("bogus=1").is_err());
        assert!(ResourceConfig::default().with_overrides("atoms").is_err());
    }
}
