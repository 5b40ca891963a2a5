use super::{BehaviorSeries, FrameSequence, Signal};
use crate::{Error, Result};

/// Frame-differencing movement estimate.
///
/// Sample `i` is `100 * mean_p(max(|f[i+1][p] - f[i][p]| - noise_threshold, 0)) / 255`,
/// placed halfway between the two frames it compares.
pub fn movement_series(frames: &FrameSequence, noise_threshold: u8) -> Result<BehaviorSeries> {
    if frames.len() < 2 {
        return Err(Error::EmptySeries(format!(
            "movement needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    let pixels = frames.width() * frames.height();
    if pixels == 0 {
        return Err(Error::Format("frames have zero area".into()));
    }
    let tau = noise_threshold as i32;
    let denom = 255.0 * pixels as f64;
    let values = frames
        .frames()
        .windows(2)
        .map(|pair| {
            let total: u64 = pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(&a, &b)| ((a as i32 - b as i32).abs() - tau).max(0) as u64)
                .sum();
            Some(100.0 * total as f64 / denom)
        })
        .collect();
    let dt = 1.0 / frames.frame_rate();
    Ok(BehaviorSeries::new(Signal::Movement, dt / 2.0, dt, values))
}
