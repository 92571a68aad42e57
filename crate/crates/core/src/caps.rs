use crate::error::{Error, Result};

/// Resource caps for operations whose cost explodes with input size.
///
/// Every cap is overridable; the defaults keep all desk-scale workloads
/// (exact tables, oracle cross-checks, Monte Carlo at n = 10^4) responsive
/// on a single machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Refuse plane-tree enumeration when the Catalan number C_n exceeds this.
    pub plane_trees: u64,
    /// Refuse isomorphism-class enumeration when the class count exceeds this.
    pub canonical_trees: u64,
    /// Largest leaf count for full cycle-spectrum computation.
    pub spectrum_leaves: u32,
    /// Largest leaf count for the exact tanglegram sampler.
    pub sampler_leaves: u32,
    /// Largest leaf count for brute-force oracle enumeration.
    pub oracle_leaves: u32,
    /// Largest automorphism-orbit product |A(T)| * |A(S)| the oracle will scan.
    pub orbit: u64,
    /// Largest truncation order for occurrence generating series.
    pub series_order: u32,
    /// Largest leaf count for full pairwise measure tables (TVD).
    pub pair_table_leaves: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            plane_trees: 100_000_000,
            canonical_trees: 10_000_000,
            spectrum_leaves: 64,
            sampler_leaves: 20,
            oracle_leaves: 7,
            orbit: 1 << 20,
            series_order: 60,
            pair_table_leaves: 14,
        }
    }
}

impl Caps {
    /// Set a cap by its CLI name (`--cap-<name>`). Unknown names are rejected.
    pub fn set_by_name(&mut self, name: &str, value: u64) -> Result<()> {
        match name {
            "plane-trees" => self.plane_trees = value,
            "canonical-trees" => self.canonical_trees = value,
            "spectrum" => self.spectrum_leaves = value as u32,
            "sampler" => self.sampler_leaves = value as u32,
            "oracle" => self.oracle_leaves = value as u32,
            "orbit" => self.orbit = value,
            "series" => self.series_order = value as u32,
            "pairs" => self.pair_table_leaves = value as u32,
            other => return Err(Error::Domain(format!("unknown cap name: {other}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_by_name_updates_named_cap() {
        let mut caps = Caps::default();
        caps.set_by_name("oracle", 9).unwrap();
        assert_eq!(caps.oracle_leaves, 9);
        assert!(caps.set_by_name("bogus", 1).is_err());
    }
}
