/// First-order recursive average `y_t = (1 - a) x_t + a y_{t-1}`, `y_0 = x_0`.
///
/// Panics unless `0 <= a < 1`.
pub fn smooth_features<const D: usize>(frames: &[[f64; D]], a: f64) -> Vec<[f64; D]> {
    assert!((0.0..1.0).contains(&a), "smoothing constant must lie in [0, 1), got {a}");
    let mut out: Vec<[f64; D]> = Vec::with_capacity(frames.len());
    for x in frames {
        let y = match out.last() {
            None => *x,
            Some(prev) => std::array::from_fn(|i| (1.0 - a) * x[i] + a * prev[i]),
        };
        out.push(y);
    }
    out
}
