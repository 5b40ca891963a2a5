//! Extracts the four behavior signals from synthetic media: a gliding tone
//! for pitch and loudness, a moving square for movement, and sidecar smile
//! scores.

use std::f64::consts::TAU;

use podium::media::{
    loudness_series, movement_series, pitch_series, sample_window, smile_series, AudioTrack, BehaviorSeries,
    FrameSequence, LoudnessParams, PitchParams, SmileProviderInput,
};

fn describe(series: &BehaviorSeries, unit: &str) {
    let values: Vec<f64> = series.present().collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!(
        "{:<9} {:>4} samples every {:.3} s, {}/{} present, range {lo:.1}..{hi:.1} {unit}",
        series.signal.name(),
        series.len(),
        series.dt,
        values.len(),
        series.len(),
    );
}

fn main() -> podium::Result<()> {
    let rate = 16_000u32;
    let secs = 3.0;
    let mut phase = 0.0;
    let samples: Vec<f64> = (0..(secs * rate as f64) as usize)
        .map(|i| {
            let t = i as f64 / rate as f64;
            phase += TAU * (120.0 + 60.0 * t) / rate as f64;
            0.3 * (1.0 + t) / 4.0 * phase.sin()
        })
        .collect();
    let audio = AudioTrack::new(samples, rate)?;

    let (w, h, fps) = (32usize, 24usize, 10.0);
    let frames: Vec<Vec<u8>> = (0..30)
        .map(|f| {
            let x0 = f % (w - 6);
            (0..w * h).map(|i| if (x0..x0 + 6).contains(&(i % w)) && i / w < 6 { 255 } else { 30 }).collect()
        })
        .collect();
    let video = FrameSequence::new(w, h, frames, fps)?;

    let smile = SmileProviderInput {
        scores: (0..30).map(|f| 0.2 + 0.02 * f as f64).collect(),
        range: (0.0, 1.0),
        synthetic: false,
    };

    let pitch = pitch_series(&audio, PitchParams::default())?;
    describe(&pitch, "Hz");
    describe(&loudness_series(&audio, LoudnessParams::default())?, "dB");
    describe(&movement_series(&video, 0)?, "%");
    describe(&smile_series(&smile, video.len(), fps)?, "%");

    let around = sample_window(&pitch, 1.5, 1.0);
    println!(
        "pitch around t=1.5 s: mean {:.1} Hz, sd {:.1} Hz over {} frames",
        around.mean.unwrap_or(f64::NAN),
        around.sd.unwrap_or(f64::NAN),
        around.count
    );
    Ok(())
}
