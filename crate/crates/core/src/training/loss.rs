/// Cross-entropy of a probability vector against a class label.
pub fn ace_loss(y: &[f64], label: bool) -> f64 {
    -y[usize::from(label)].ln()
}

/// Same loss from logits via log-sum-exp; finite even for saturated outputs.
pub fn ace_loss_from_logits(logits: &[f64], label: bool) -> f64 {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|&v| (v - m).exp()).sum::<f64>().ln();
    lse - logits[usize::from(label)]
}

/// Averaged cross-entropy over a batch of per-sample losses.
pub fn batch_mean(losses: &[f64]) -> f64 {
    if losses.is_empty() {
        return 0.0;
    }
    losses.iter().sum::<f64>() / losses.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn reference_values() {
        assert_eq!(ace_loss(&[0.0, 1.0], true), 0.0);
        assert!((ace_loss(&[0.5, 0.5], false) - LN_2).abs() < 1e-15);
        assert!((batch_mean(&[0.0, LN_2]) - 0.346_573_590_279_972_6).abs() < 1e-15);
    }

    #[test]
    fn logit_form_is_stable_and_consistent() {
        assert!((ace_loss_from_logits(&[0.0, 0.0], true) - LN_2).abs() < 1e-15);
        assert!((ace_loss_from_logits(&[800.0, 0.0], true) - 800.0).abs() < 1e-9);
        let logits = [0.3, -1.2];
        let y = crate::nets::cells::softmax(&logits);
        assert!((ace_loss(&y, false) - ace_loss_from_logits(&logits, false)).abs() < 1e-14);
    }
}
