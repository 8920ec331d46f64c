#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(labels: &[bool], predictions: &[bool]) -> ConfusionCounts {
    assert_eq!(labels.len(), predictions.len(), "labels and predictions differ in length");
    let mut c = ConfusionCounts::default();
    for (&l, &p) in labels.iter().zip(predictions) {
        match (l, p) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    c
}

/// Fraction correct; 0 for an empty table.
pub fn accuracy(c: &ConfusionCounts) -> f64 {
    let n = c.total();
    if n == 0 {
        return 0.0;
    }
    (c.tp + c.tn) as f64 / n as f64
}

/// Matthews correlation coefficient; 0 whenever a marginal is empty.
pub fn mcc(c: &ConfusionCounts) -> f64 {
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if factors.contains(&0.0) {
        return 0.0;
    }
    // Product of square roots avoids overflow on very large tables.
    let denom = factors.iter().map(|f| f.sqrt()).product::<f64>();
    (tp * tn - fp * fn_) / denom
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// (false-positive rate, true-positive rate), from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC by sweeping a threshold over every distinct score; equal scores enter
/// together, so ties contribute a diagonal segment (half credit). AUC is 0.5
/// when either class is absent.
pub fn roc_auc(labels: &[bool], scores: &[f64]) -> RocCurve {
    assert_eq!(labels.len(), scores.len(), "labels and scores differ in length");
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = labels.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return RocCurve { points: vec![(0.0, 0.0), (1.0, 1.0)], auc: 0.5 };
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        let (x0, y0) = *points.last().unwrap();
        let (x1, y1) = (fp / neg, tp / pos);
        auc += (x1 - x0) * (y0 + y1) / 2.0;
        points.push((x1, y1));
    }
    RocCurve { points, auc }
}
