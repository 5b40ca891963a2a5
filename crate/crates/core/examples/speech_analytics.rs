//! Transcript analytics: vocabulary richness, word-cloud counts, filler
//! words with timestamps, and per-word duration and loudness.

use podium::media::AudioTrack;
use podium::speech::{detect_fillers, unique_word_ratio, word_frequencies, word_prosody, TimedTranscript, WordList, WordToken};

const TEXT: &str = "So um I think the project went well and you know the team \
                    really um learned a lot about the users and the project";

fn main() -> podium::Result<()> {
    let words = TEXT
        .split_whitespace()
        .enumerate()
        .map(|(i, w)| WordToken {
            text: w.to_string(),
            start: 0.2 + i as f64 * 0.35,
            end: 0.2 + i as f64 * 0.35 + 0.3,
            confidence: if w == "um" { 0.6 } else { 0.95 },
        })
        .collect();
    let transcript = TimedTranscript::new(words, "en")?;

    let unique = unique_word_ratio(&transcript);
    println!("{} distinct of {} words ({:.0}%)", unique.distinct, unique.total, 100.0 * unique.ratio);

    println!("top words:");
    for (word, count) in word_frequencies(&transcript, &WordList::default_stopwords(), 5) {
        println!("  {word:<10} {count}");
    }

    println!("fillers:");
    for f in detect_fillers(&transcript, &WordList::default_fillers()) {
        println!("  {:>5.2} s  {}", f.start, f.word);
    }

    let rate = 16_000;
    let audio = AudioTrack::new(
        (0..rate * 10).map(|i| 0.2 * (i as f64 * 0.05).sin()).collect(),
        rate as u32,
    )?;
    let prosody = word_prosody(&transcript, &audio);
    let longest = prosody
        .iter()
        .max_by(|a, b| a.duration.total_cmp(&b.duration))
        .expect("transcript is not empty");
    println!(
        "longest word \"{}\" lasts {:.2} s at {:.1} dB",
        longest.token.text,
        longest.duration,
        longest.mean_loudness.unwrap_or(f64::NAN)
    );
    Ok(())
}
