//! Readers and writers for the on-disk media formats.
//!
//! - Audio: 16-bit PCM WAV, stereo downmixed by averaging channels.
//! - Frames: binary PGM (`P5`) images, either a directory of files in
//!   lexicographic order with a `manifest.json` declaring `frame_rate`, or a
//!   single stream of concatenated images.
//! - Smile sidecar: `# range <min> <max>` header, then one score per line.
//! - Timed transcript: JSON `{schema_version, language_tag, words}` or a bare
//!   array of words.

use std::fs;
use std::io::{Read, Seek, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::media::{AudioTrack, FrameSequence, SmileProviderInput};
use crate::speech::{TimedTranscript, WordToken};
use crate::{Error, Result};

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;
pub const FRAME_MANIFEST: &str = "manifest.json";

pub fn read_wav<R: Read>(reader: R) -> Result<AudioTrack> {
    let mut wav = hound::WavReader::new(reader)?;
    let header = wav.spec();
    if header.sample_format != hound::SampleFormat::Int || header.bits_per_sample != 16 {
        return Err(Error::Format(format!(
            "wav: expected 16-bit PCM, found {} bits {:?}",
            header.bits_per_sample, header.sample_format
        )));
    }
    let channels = header.channels as usize;
    if channels == 0 {
        return Err(Error::Format("wav: zero channels".into()));
    }
    let raw: Vec<i16> = wav.samples::<i16>().collect::<std::result::Result<_, _>>()?;
    if raw.len() % channels != 0 {
        return Err(Error::Format("wav: truncated sample frame".into()));
    }
    let samples = raw
        .chunks_exact(channels)
        .map(|frame| {
            let sum: f64 = frame.iter().map(|&s| s as f64 / 32768.0).sum();
            sum / channels as f64
        })
        .collect();
    AudioTrack::new(samples, header.sample_rate)
}

pub fn read_wav_file(path: &Path) -> Result<AudioTrack> {
    read_wav(std::io::BufReader::new(fs::File::open(path)?))
}

/// Writes mono 16-bit PCM; samples are scaled by 32767 and rounded.
pub fn write_wav<W: Write + Seek>(writer: W, audio: &AudioTrack) -> Result<()> {
    let header = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::new(writer, header)?;
    for &s in audio.samples() {
        w.write_sample((s * 32767.0).round() as i16)?;
    }
    w.finalize()?;
    Ok(())
}

pub fn write_wav_file(path: &Path, audio: &AudioTrack) -> Result<()> {
    write_wav(std::io::BufWriter::new(fs::File::create(path)?), audio)
}

/// One decoded PGM image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("pgm: missing {what} at byte {start}")))
    }
}

/// Parses one or more concatenated binary PGM images.
pub fn parse_pgm_stream(bytes: &[u8]) -> Result<Vec<Pgm>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let mut images = Vec::new();
    loop {
        cur.skip_space_and_comments();
        if cur.pos >= bytes.len() {
            break;
        }
        if bytes.get(cur.pos..cur.pos + 2) != Some(b"P5") {
            return Err(Error::Format(format!(
                "pgm: image {} does not start with P5 magic",
                images.len()
            )));
        }
        cur.pos += 2;
        let width = cur.number("width")?;
        let height = cur.number("height")?;
        let maxval = cur.number("maxval")?;
        if width == 0 || height == 0 {
            return Err(Error::Format("pgm: zero-sized image".into()));
        }
        if maxval == 0 || maxval > 255 {
            return Err(Error::Format(format!("pgm: maxval {maxval} is not 8-bit")));
        }
        if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(Error::Format("pgm: header not terminated by whitespace".into()));
        }
        cur.pos += 1;
        let n = width * height;
        let raster = bytes
            .get(cur.pos..cur.pos + n)
            .ok_or_else(|| Error::Format(format!("pgm: image {} truncated", images.len())))?;
        let pixels = if maxval == 255 {
            raster.to_vec()
        } else {
            raster
                .iter()
                .map(|&p| ((p.min(maxval as u8) as usize * 255 + maxval / 2) / maxval) as u8)
                .collect()
        };
        cur.pos += n;
        images.push(Pgm { width, height, pixels });
    }
    if images.is_empty() {
        return Err(Error::Format("pgm: no images".into()));
    }
    Ok(images)
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Builds a frame sequence from decoded images sharing one size.
pub fn frames_from_pgms(images: Vec<Pgm>, frame_rate: f64) -> Result<FrameSequence> {
    let (width, height) = (images[0].width, images[0].height);
    if let Some((i, img)) = images
        .iter()
        .enumerate()
        .find(|(_, img)| (img.width, img.height) != (width, height))
    {
        return Err(Error::Format(format!(
            "frames: image {i} is {}x{}, expected {width}x{height}",
            img.width, img.height
        )));
    }
    FrameSequence::new(width, height, images.into_iter().map(|i| i.pixels).collect(), frame_rate)
}

/// Concatenated PGM images, as uploaded in one multipart field.
pub fn read_frame_archive(bytes: &[u8], frame_rate: f64) -> Result<FrameSequence> {
    frames_from_pgms(parse_pgm_stream(bytes)?, frame_rate)
}

pub fn write_frame_archive(frames: &FrameSequence) -> Vec<u8> {
    frames
        .frames()
        .iter()
        .flat_map(|f| encode_pgm(frames.width(), frames.height(), f))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameManifest {
    pub frame_rate: f64,
}

/// Reads `*.pgm` files in lexicographic order plus the frame manifest.
pub fn read_frames_dir(dir: &Path) -> Result<FrameSequence> {
    let manifest: FrameManifest = serde_json::from_slice(&fs::read(dir.join(FRAME_MANIFEST))?)?;
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::result::Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "pgm"));
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Format(format!("frames: no .pgm files in {}", dir.display())));
    }
    let mut images = Vec::with_capacity(paths.len());
    for p in &paths {
        let mut one = parse_pgm_stream(&fs::read(p)?)
            .map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
        if one.len() != 1 {
            return Err(Error::Format(format!("{}: expected one image", p.display())));
        }
        images.push(one.remove(0));
    }
    frames_from_pgms(images, manifest.frame_rate)
}

pub fn write_frames_dir(dir: &Path, frames: &FrameSequence) -> Result<()> {
    fs::create_dir_all(dir)?;
    let digits = frames.len().to_string().len().max(4);
    for (i, f) in frames.frames().iter().enumerate() {
        fs::write(
            dir.join(format!("frame-{i:0digits$}.pgm")),
            encode_pgm(frames.width(), frames.height(), f),
        )?;
    }
    let manifest = FrameManifest {
        frame_rate: frames.frame_rate(),
    };
    fs::write(dir.join(FRAME_MANIFEST), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub fn parse_smile_sidecar(text: &str) -> Result<SmileProviderInput> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("smile sidecar: empty file".into()))?;
    let range = header
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|h| h.strip_prefix("range"))
        .and_then(|r| {
            let parts: Vec<f64> = r.split_whitespace().filter_map(|x| x.parse().ok()).collect();
            (parts.len() == 2).then(|| (parts[0], parts[1]))
        })
        .ok_or_else(|| Error::Format("smile sidecar: first line must be `# range <min> <max>`".into()))?;
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
        return Err(Error::Format(format!("smile sidecar: invalid range {range:?}")));
    }
    let mut scores = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Format(format!("smile sidecar: score {} is not a number: {line:?}", i + 1)))?;
        if !v.is_finite() {
            return Err(Error::Format(format!("smile sidecar: score {} is not finite", i + 1)));
        }
        scores.push(v);
    }
    Ok(SmileProviderInput {
        scores,
        range,
        synthetic: false,
    })
}

pub fn write_smile_sidecar(input: &SmileProviderInput) -> String {
    let mut out = format!("# range {} {}\n", input.range.0, input.range.1);
    for s in &input.scores {
        out.push_str(&format!("{s}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptDocument {
    pub schema_version: u32,
    pub language_tag: String,
    pub words: Vec<WordToken>,
}

/// Word times are rounded to milliseconds.
pub fn parse_transcript(text: &str) -> Result<TimedTranscript> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let (language_tag, mut words) = if value.is_array() {
        ("und".to_string(), serde_json::from_value::<Vec<WordToken>>(value)?)
    } else {
        let doc: TranscriptDocument = serde_json::from_value(value)?;
        if doc.schema_version != TRANSCRIPT_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: TRANSCRIPT_SCHEMA_VERSION,
                found: doc.schema_version,
            });
        }
        (doc.language_tag, doc.words)
    };
    for w in &mut words {
        w.start = (w.start * 1000.0).round() / 1000.0;
        w.end = (w.end * 1000.0).round() / 1000.0;
    }
    TimedTranscript::new(words, language_tag)
}

pub fn write_transcript(transcript: &TimedTranscript) -> Result<String> {
    let doc = TranscriptDocument {
        schema_version: TRANSCRIPT_SCHEMA_VERSION,
        language_tag: transcript.language_tag().to_string(),
        words: transcript.words().to_vec(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}
