use serde::{Deserialize, Serialize};

use super::BehaviorSeries;

/// Mean and population standard deviation of the present samples in a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub count: usize,
}

impl WindowStats {
    pub const MISSING: WindowStats = WindowStats {
        mean: None,
        sd: None,
        count: 0,
    };

    pub fn is_missing(&self) -> bool {
        self.count == 0
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return Self::MISSING;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean: Some(mean),
            sd: Some(var.sqrt()),
            count: values.len(),
        }
    }
}

/// Statistics over samples whose timestamps fall in
/// `[center - width/2, center + width/2]`. Absent samples are skipped.
pub fn sample_window(series: &BehaviorSeries, center: f64, width: f64) -> WindowStats {
    if series.is_empty() || !(width > 0.0) || !center.is_finite() {
        return WindowStats::MISSING;
    }
    let lo = center - width / 2.0;
    let hi = center + width / 2.0;
    // widen the index guess by one on each side, then filter on the exact timestamps
    let first = ((lo - series.t0) / series.dt).floor() - 1.0;
    let last = ((hi - series.t0) / series.dt).ceil() + 1.0;
    let n = series.len() as f64;
    if last < 0.0 || first >= n {
        return WindowStats::MISSING;
    }
    let first = first.max(0.0) as usize;
    let last = last.min(n - 1.0) as usize;
    WindowStats::from_values((first..=last).filter_map(|i| {
        let t = series.time_at(i);
        if t >= lo && t <= hi {
            series.values[i]
        } else {
            None
        }
    }))
}
