/// Per-class counts and a 1 dB SINR histogram (linear count axis).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassHistogram {
    pub positives: usize,
    pub negatives: usize,
    /// (lower edge dB, upper edge dB, count)
    pub bins: Vec<(f64, f64, usize)>,
}

/// SINR values outside this range are counted in the edge bins.
pub const HISTOGRAM_RANGE_DB: (f64, f64) = (-50.0, 50.0);
pub const HISTOGRAM_BIN_DB: f64 = 1.0;

pub fn class_histogram(labels: &[bool], sinr_db: &[f64]) -> ClassHistogram {
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if sinr_db.is_empty() {
        return ClassHistogram { positives, negatives, bins: Vec::new() };
    }
    let (lo, hi) = HISTOGRAM_RANGE_DB;
    let clamp = |v: f64| v.clamp(lo, hi - HISTOGRAM_BIN_DB);
    let min = sinr_db.iter().copied().map(clamp).fold(f64::INFINITY, f64::min);
    let max = sinr_db.iter().copied().map(clamp).fold(f64::NEG_INFINITY, f64::max);
    let first = (min / HISTOGRAM_BIN_DB).floor() as i64;
    let last = (max / HISTOGRAM_BIN_DB).floor() as i64;
    let mut counts = vec![0usize; (last - first + 1) as usize];
    for &v in sinr_db {
        counts[((clamp(v) / HISTOGRAM_BIN_DB).floor() as i64 - first) as usize] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let edge = (first + i as i64) as f64 * HISTOGRAM_BIN_DB;
            (edge, edge + HISTOGRAM_BIN_DB, c)
        })
        .collect();
    ClassHistogram { positives, negatives, bins }
}

impl ClassHistogram {
    pub fn to_csv(&self) -> String {
        let mut s = format!("# positives={} negatives={}\nsinr_lo_db,sinr_hi_db,count\n", self.positives, self.negatives);
        for (lo, hi, c) in &self.bins {
            s.push_str(&format!("{lo},{hi},{c}\n"));
        }
        s
    }
}
