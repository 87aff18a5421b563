//! Mono WAV input (16-bit PCM or 32-bit float) and multichannel float output.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

fn wav_err(path: &Path, source: hound::Error) -> Error {
    Error::Wav {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a mono file. A sample-rate other than `expected_fs` is an error;
/// no resampling is done.
pub fn read_mono(path: impl AsRef<Path>, expected_fs: f64) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut reader = WavReader::open(path).map_err(|e| wav_err(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Data(format!(
            "{}: expected mono, found {} channels",
            path.display(),
            spec.channels
        )));
    }
    if (spec.sample_rate as f64 - expected_fs).abs() > 0.5 {
        return Err(Error::Data(format!(
            "{}: sample rate {} Hz does not match {} Hz",
            path.display(),
            spec.sample_rate,
            expected_fs
        )));
    }
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<Vec<_>, _>>(),
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<Vec<_>, _>>(),
        (fmt, bits) => {
            return Err(Error::Data(format!(
                "{}: unsupported sample format {fmt:?}/{bits} bit",
                path.display()
            )))
        }
    }
    .map_err(|e| wav_err(path, e))?;
    if samples.is_empty() {
        return Err(Error::Data(format!("{}: no samples", path.display())));
    }
    Ok(samples)
}

/// Writes equal-length channels as interleaved 32-bit float.
pub fn write_multichannel(path: impl AsRef<Path>, channels: &[Vec<f64>], fs: f64) -> Result<()> {
    let path = path.as_ref();
    if channels.is_empty() {
        return Err(Error::Data("no channels to write".into()));
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(Error::Data("channels differ in length".into()));
    }
    let spec = WavSpec {
        channels: channels.len() as u16,
        sample_rate: fs.round() as u32,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| wav_err(path, e))?;
    for i in 0..len {
        for c in channels {
            writer
                .write_sample(c[i] as f32)
                .map_err(|e| wav_err(path, e))?;
        }
    }
    writer.finalize().map_err(|e| wav_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcm16_and_float_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let p16 = dir.path().join("a.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 16000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&p16, spec).unwrap();
        for v in [0i16, 16384, -32768] {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
        assert_eq!(read_mono(&p16, 16000.0).unwrap(), vec![0.0, 0.5, -1.0]);
        assert!(matches!(read_mono(&p16, 8000.0), Err(Error::Data(_))));

        let pf = dir.path().join("b.wav");
        write_multichannel(&pf, &[vec![0.25, -0.5]], 16000.0).unwrap();
        assert_eq!(read_mono(&pf, 16000.0).unwrap(), vec![0.25, -0.5]);
    }

    #[test]
    fn stereo_input_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        write_multichannel(&p, &[vec![0.0; 4], vec![1.0; 4]], 16000.0).unwrap();
        assert!(matches!(read_mono(&p, 16000.0), Err(Error::Data(_))));
    }
}
