use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{all_sequences, solve_time_invariant, Sequence, SystemConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedSequence {
    pub sequence: Sequence,
    pub makespan: f64,
}

/// Every sequence of a constant-speed system, fastest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub entries: Vec<EnumeratedSequence>,
}

impl Enumeration {
    pub fn best(&self) -> &EnumeratedSequence {
        &self.entries[0]
    }

    pub fn worst(&self) -> &EnumeratedSequence {
        self.entries.last().unwrap()
    }

    /// Worst minus best finishing time.
    pub fn gap(&self) -> f64 {
        self.worst().makespan - self.best().makespan
    }
}

/// Solves all `N!` sequences; ties keep lexicographic order.
pub fn enumerate_sequences(cfg: &SystemConfig, cap: usize) -> Result<Enumeration> {
    let n = cfg.n_workers();
    if n > cap {
        return Err(Error::Capacity { n, cap });
    }
    let mut entries = all_sequences(n)
        .into_iter()
        .map(|sequence| {
            let makespan = solve_time_invariant(cfg, &sequence)?.makespan;
            Ok(EnumeratedSequence { sequence, makespan })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.makespan.total_cmp(&b.makespan));
    Ok(Enumeration { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_system_has_ascending_optimum() {
        let s = vec![1.0, 2.0, 9.0, 16.0];
        let cfg = SystemConfig::new(s.clone(), s, 1.0, 4.0).unwrap();
        let e = enumerate_sequences(&cfg, 8).unwrap();
        assert_eq!(e.entries.len(), 24);
        assert_eq!(e.best().sequence, Sequence::identity(4));
        assert!(e.entries.windows(2).all(|w| w[0].makespan <= w[1].makespan));
        assert!(e.gap() > 0.0);
    }

    #[test]
    fn single_worker_and_capacity() {
        let cfg = SystemConfig::new(vec![2.0], vec![3.0], 1.0, 4.0).unwrap();
        assert_eq!(enumerate_sequences(&cfg, 8).unwrap().entries.len(), 1);
        let nine = SystemConfig::new(vec![1.0; 9], vec![1.0; 9], 1.0, 4.0).unwrap();
        assert!(matches!(enumerate_sequences(&nine, 8), Err(Error::Capacity { .. })));
    }
}
