use serde::Serialize;

use super::sigma::Metric;
use super::NodeMetrics;

/// Sample Pearson correlation computed from streaming co-moments of the
/// columns shifted by their first value.
///
/// `None` when fewer than two points are given or either column has zero
/// variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson columns must have equal length");
    if x.len() < 2 {
        return None;
    }
    let (x0, y0) = (x[0], y[0]);
    let (mut mean_x, mut mean_y) = (0.0, 0.0);
    let (mut m2_x, mut m2_y, mut co) = (0.0, 0.0, 0.0);
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (i + 1) as f64;
        let (a, b) = (a - x0, b - y0);
        let dx = a - mean_x;
        let dy = b - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        m2_x += dx * (a - mean_x);
        m2_y += dy * (b - mean_y);
        co += dx * (b - mean_y);
    }
    if m2_x <= 0.0 || m2_y <= 0.0 {
        return None;
    }
    Some((co / (m2_x * m2_y).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub columns: Vec<Metric>,
    /// Symmetric; `None` marks an undefined entry.
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: Metric, b: Metric) -> Option<f64> {
        let i = self.columns.iter().position(|&c| c == a)?;
        let j = self.columns.iter().position(|&c| c == b)?;
        self.values[i][j]
    }
}

pub fn metric_column(metrics: &[NodeMetrics], metric: Metric) -> Vec<f64> {
    metrics.iter().map(|m| m.value(metric)).collect()
}

pub fn pearson_matrix(metrics: &[NodeMetrics], columns: &[Metric]) -> CorrelationMatrix {
    let data: Vec<Vec<f64>> = columns.iter().map(|&c| metric_column(metrics, c)).collect();
    correlate_columns(columns, &data)
}

pub fn correlate_columns(columns: &[Metric], data: &[Vec<f64>]) -> CorrelationMatrix {
    let k = columns.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                pearson(&data[i], &data[i]).map(|_| 1.0)
            } else {
                pearson(&data[i], &data[j])
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix {
        columns: columns.to_vec(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_correlation_is_one() {
        let x = [1.0, 4.0, 2.0, 8.0];
        assert_eq!(pearson(&x, &x), Some(1.0));
    }

    #[test]
    fn affine_relation_is_one() {
        let x: Vec<f64> = (0..10).map(|i| (i * i) as f64 * 0.37).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -0.5 * v + 1.0).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_undefined() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), None);
        assert_eq!(pearson(&[1.0], &[2.0]), None);
        let m = correlate_columns(
            &[Metric::Burst, Metric::Sigma2],
            &[vec![0.0, 0.0], vec![0.1, 0.5]],
        );
        assert_eq!(m.values[0][0], None);
        assert_eq!(m.values[0][1], None);
        assert_eq!(m.values[1][1], Some(1.0));
    }
}
