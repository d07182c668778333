use std::collections::BTreeMap;
use std::fmt;

use super::DatasetRecord;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    pub records: usize,
    pub per_theory: BTreeMap<String, usize>,
    pub size_histogram: BTreeMap<usize, usize>,
    pub depth_histogram: BTreeMap<usize, usize>,
    /// Dual proof size over logic proof size.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_mean: f64,
}

pub fn corpus_stats(records: &[DatasetRecord]) -> CorpusStats {
    let mut s = CorpusStats {
        records: records.len(),
        ..CorpusStats::default()
    };
    let mut total = 0.0;
    for (i, r) in records.iter().enumerate() {
        *s.per_theory.entry(r.theory_id.clone()).or_default() += 1;
        *s.size_histogram.entry(r.proof.size()).or_default() += 1;
        *s.depth_histogram.entry(r.proof.depth()).or_default() += 1;
        let ratio = r.dual_proof.size() as f64 / r.proof.size() as f64;
        if i == 0 {
            s.ratio_min = ratio;
            s.ratio_max = ratio;
        }
        s.ratio_min = s.ratio_min.min(ratio);
        s.ratio_max = s.ratio_max.max(ratio);
        total += ratio;
    }
    if !records.is_empty() {
        s.ratio_mean = total / records.len() as f64;
    }
    s
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "records {}", self.records)?;
        for (id, n) in &self.per_theory {
            writeln!(f, "theory {id} {n}")?;
        }
        for (k, n) in &self.size_histogram {
            writeln!(f, "size {k} {n}")?;
        }
        for (k, n) in &self.depth_histogram {
            writeln!(f, "depth {k} {n}")?;
        }
        write!(
            f,
            "dual/logic size ratio min {:.3} mean {:.3} max {:.3}",
            self.ratio_min, self.ratio_mean, self.ratio_max
        )
    }
}
