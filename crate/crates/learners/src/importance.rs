use crate::gbdt::GbdtModel;

/// Accumulated split gain per feature, L1-normalized, for features with positive
/// gain. Sorted by descending weight, then name. Empty for a model without splits.
pub fn feature_importance(model: &GbdtModel) -> Vec<(String, f64)> {
    let gains = model.gain_by_feature();
    let total: f64 = gains.iter().filter(|g| **g > 0.0).sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let mut out: Vec<(String, f64)> = gains
        .iter()
        .zip(&model.feature_names)
        .filter(|(g, _)| **g > 0.0)
        .map(|(g, n)| (n.clone(), g / total))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
