use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{RawFeatureRecord, BOOLEAN, CATEGORICAL, NUMERIC};

pub const UNKNOWN: &str = "<unknown>";

/// One-hot vocabularies and min-max ranges fitted on training records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    pub ranges: Vec<(f64, f64)>,
    /// Sorted values per categorical feature; the unknown bucket follows
    /// the last value.
    pub vocab: Vec<Vec<String>>,
}

pub fn fit_encoder(records: &[RawFeatureRecord]) -> Encoding {
    assert!(!records.is_empty(), "fit_encoder needs at least one record");
    let ranges = (0..NUMERIC.len())
        .map(|i| {
            records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.numeric[i]), hi.max(r.numeric[i]))
            })
        })
        .collect();
    let vocab = (0..CATEGORICAL.len())
        .map(|i| {
            let values: BTreeSet<&String> = records.iter().flat_map(|r| r.categorical[i].keys()).collect();
            values.into_iter().cloned().collect()
        })
        .collect();
    Encoding { ranges, vocab }
}

impl Encoding {
    pub fn width(&self) -> usize {
        NUMERIC.len() + BOOLEAN.len() + self.vocab.iter().map(|v| v.len() + 1).sum::<usize>()
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = NUMERIC.iter().chain(BOOLEAN.iter()).map(|s| s.to_string()).collect();
        for (name, values) in CATEGORICAL.iter().zip(&self.vocab) {
            for v in values.iter().map(String::as_str).chain([UNKNOWN]) {
                cols.push(format!("{name}={v}"));
            }
        }
        cols
    }

    /// Hash of the column layout; models trained on one layout refuse
    /// vectors of another.
    pub fn schema_hash(&self) -> String {
        let mut h = Sha256::new();
        for c in self.columns() {
            h.update(c.as_bytes());
            h.update([0]);
        }
        format!("{:x}", h.finalize())
    }

    pub fn scale(&self, feature: usize, v: f64) -> f64 {
        let (lo, hi) = self.ranges[feature];
        if hi <= lo {
            return 0.0;
        }
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    pub fn encode(&self, r: &RawFeatureRecord) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.width());
        out.extend((0..NUMERIC.len()).map(|i| self.scale(i, r.numeric[i])));
        out.extend(r.boolean.iter().map(|&b| f64::from(u8::from(b))));
        for (i, values) in self.vocab.iter().enumerate() {
            let start = out.len();
            out.resize(start + values.len() + 1, 0.0);
            for (v, &count) in &r.categorical[i] {
                let slot = values.binary_search(v).unwrap_or(values.len());
                out[start + slot] += f64::from(count);
            }
        }
        out
    }
}

/// Feature matrix CSV keyed by mutant id.
pub fn write_matrix<W: Write>(out: W, encoding: &Encoding, records: &[RawFeatureRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["mutant_id".to_string()];
    header.extend(encoding.columns());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.mutant_id.to_string()];
        row.extend(encoding.encode(r).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
