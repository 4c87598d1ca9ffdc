//! Distribution summaries with linearly interpolated quantiles.

use crate::model::DistributionStats;

/// Quantile `q` of an ascending sample, interpolating between closest ranks.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

/// Summarizes `values`; the result does not depend on their order.
pub fn describe(values: &[f64]) -> DistributionStats {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return DistributionStats::default();
    }
    let sum: f64 = sorted.iter().sum();
    DistributionStats {
        min: sorted.first().copied(),
        max: sorted.last().copied(),
        mean: Some(sum / sorted.len() as f64),
        median: quantile(&sorted, 0.5),
        p75: quantile(&sorted, 0.75),
        count: sorted.len() as u64,
    }
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_samples() {
        let d = describe(&[3.0, 1.0, 2.0]);
        assert_eq!((d.min, d.max, d.mean, d.median), (Some(1.0), Some(3.0), Some(2.0), Some(2.0)));
        assert_eq!(d.p75, Some(2.5));
        assert_eq!(d.count, 3);
        let one = describe(&[7.0]);
        assert_eq!((one.min, one.max, one.mean, one.median, one.p75), (Some(7.0), Some(7.0), Some(7.0), Some(7.0), Some(7.0)));
        assert_eq!(describe(&[]), DistributionStats::default());
        assert_eq!(describe(&[100.0, 300.0]).mean, Some(200.0));
        assert_eq!(describe(&[1.0, 2.0, 3.0, 4.0]).median, Some(2.5));
    }

    proptest! {
        #[test]
        fn ordered_and_order_independent(mut v in prop::collection::vec(-1e6f64..1e6, 1..40)) {
            let d = describe(&v);
            let (min, med, p75, max) = (d.min.unwrap(), d.median.unwrap(), d.p75.unwrap(), d.max.unwrap());
            prop_assert!(min <= med && med <= p75 && p75 <= max);
            prop_assert!(min <= d.mean.unwrap() && d.mean.unwrap() <= max);
            v.reverse();
            prop_assert_eq!(describe(&v), d);
        }
    }
}
