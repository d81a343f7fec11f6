use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::TrialRecord;

pub const TRIALS_HEADER: &str = "trial,sequence,makespan,reward,bernoulli,tf_max";

// Floats are written in shortest round-trip form, so reading the file back
// reproduces every value bit for bit.
#[derive(Serialize, Deserialize)]
struct Row {
    trial: usize,
    sequence: String,
    makespan: f64,
    reward: f64,
    bernoulli: u8,
    tf_max: f64,
}

/// Renders the trial log; refuses an empty log.
pub fn trials_csv_bytes(records: &[TrialRecord]) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::InvalidConfig("no trial records to write".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(Row {
            trial: r.trial,
            sequence: r.sequence.to_string(),
            makespan: r.makespan,
            reward: r.reward,
            bernoulli: u8::from(r.bernoulli),
            tf_max: r.tf_max,
        })?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<memory>", std::io::Error::other(e.to_string())))
}

pub fn emit_trials_csv(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = trials_csv_bytes(records)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn parse_trials_csv(data: &[u8]) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::Reader::from_reader(data);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != TRIALS_HEADER {
        return Err(Error::InvalidConfig(format!(
            "unexpected trials header `{header}`"
        )));
    }
    rdr.deserialize::<Row>()
        .map(|row| {
            let row = row?;
            let bernoulli = match row.bernoulli {
                0 => false,
                1 => true,
                b => {
                    return Err(Error::InvalidConfig(format!(
                        "trial {}: bernoulli must be 0 or 1, got {b}",
                        row.trial
                    )))
                }
            };
            Ok(TrialRecord {
                trial: row.trial,
                sequence: row.sequence.parse()?,
                makespan: row.makespan,
                reward: row.reward,
                bernoulli,
                tf_max: row.tf_max,
            })
        })
        .collect()
}

pub fn read_trials_csv(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_trials_csv(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Sequence;
    use proptest::prelude::*;

    #[test]
    fn single_record_file() {
        let rec = TrialRecord {
            trial: 1,
            sequence: Sequence::identity(2),
            makespan: 25.0 / 7.0,
            reward: 25.0 / 7.0 / 80.0,
            bernoulli: false,
            tf_max: 80.0,
        };
        let text = String::from_utf8(trials_csv_bytes(std::slice::from_ref(&rec)).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], TRIALS_HEADER);
        assert!(lines[1].starts_with("1,1-2,3.571428571428"), "{}", lines[1]);
        assert!(lines[1].ends_with(",0,80.0"), "{}", lines[1]);
        assert_eq!(parse_trials_csv(text.as_bytes()).unwrap(), vec![rec]);
    }

    #[test]
    fn empty_log_is_an_error() {
        assert!(trials_csv_bytes(&[]).is_err());
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(parse_trials_csv(b"a,b\n1,2\n").is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_is_exact(ms in proptest::collection::vec((1e-6f64..1e6, any::<bool>()), 1..50)) {
            let recs: Vec<TrialRecord> = ms
                .iter()
                .enumerate()
                .map(|(i, &(m, b))| TrialRecord {
                    trial: i + 1,
                    sequence: Sequence::from_one_based(&[3, 1, 2]).unwrap(),
                    makespan: m,
                    reward: (m / 1e6).min(1.0),
                    bernoulli: b,
                    tf_max: 1e6,
                })
                .collect();
            let back = parse_trials_csv(&trials_csv_bytes(&recs).unwrap()).unwrap();
            prop_assert_eq!(back, recs);
        }
    }
}
