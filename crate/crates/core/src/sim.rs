//! Monte-Carlo frame simulation.
//!
//! Frame `i` draws its information block and channel noise from a ChaCha8
//! stream keyed by `(master_seed, i)`, so statistics depend only on the
//! configuration. Frames are evaluated in fixed-size batches (possibly in
//! parallel) and folded in index order; the stopping rule is checked after
//! every frame, which keeps the result independent of the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{bsc_error_positions, ChannelConfig};
use crate::component::{ComponentCode, Line};
use crate::error::{Error, Result};
use crate::product::{DecoderConfig, ProductCode, ProductMatrix};

const BATCH: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub channel: ChannelConfig,
    pub decoder: DecoderConfig,
    pub shorten: usize,
    pub master_seed: u64,
    pub min_frames: u64,
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl SimConfig {
    pub fn new(channel: ChannelConfig, decoder: DecoderConfig, master_seed: u64) -> SimConfig {
        SimConfig {
            channel,
            decoder,
            shorten: crate::component::DEFAULT_SHORTEN,
            master_seed,
            min_frames: 10_000,
            min_frame_errors: 100,
            max_frames: 10_000_000,
        }
    }

    /// Exactly `frames` frames, no error-count condition.
    pub fn fixed_frames(mut self, frames: u64) -> SimConfig {
        self.min_frames = frames;
        self.max_frames = frames;
        self.min_frame_errors = 0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.decoder.validate()?;
        ComponentCode::new(self.shorten)?;
        if self.min_frames == 0 || self.max_frames == 0 {
            return Err(Error::InvalidConfig(
                "min_frames and max_frames must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn code(&self) -> ProductCode {
        ProductCode::new(ComponentCode::new(self.shorten).expect("validated"))
    }

    fn should_stop(&self, s: &SimStats) -> bool {
        (s.frames >= self.min_frames && s.frame_errors >= self.min_frame_errors)
            || s.frames >= self.max_frames
    }
}

/// Accumulated counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimStats {
    pub frames: u64,
    pub pre_fec_bit_errors: u64,
    pub post_fec_bit_errors: u64,
    /// Decoded information differs from what was sent.
    pub frame_errors: u64,
    /// Frame errors the decoder declared successful.
    pub undetected_frame_errors: u64,
    /// Frames where intersection bits were flipped.
    pub pp_frames: u64,
    pub info_bits_per_frame: u64,
    pub code_bits_per_frame: u64,
}

impl SimStats {
    pub fn ber(&self) -> f64 {
        ratio(
            self.post_fec_bit_errors,
            self.frames * self.info_bits_per_frame,
        )
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn measured_p(&self) -> f64 {
        ratio(
            self.pre_fec_bit_errors,
            self.frames * self.code_bits_per_frame,
        )
    }

    pub fn pp_rate(&self) -> f64 {
        ratio(self.pp_frames, self.frames)
    }

    fn add(&mut self, f: &FrameOutcome) {
        self.frames += 1;
        self.pre_fec_bit_errors += f.pre_errors;
        self.post_fec_bit_errors += f.post_errors;
        if f.post_errors > 0 {
            self.frame_errors += 1;
            if f.declared_success {
                self.undetected_frame_errors += 1;
            }
        }
        self.pp_frames += f.pp_applied as u64;
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// What happened to one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub pre_errors: u64,
    pub post_errors: u64,
    pub declared_success: bool,
    pub pp_applied: bool,
}

/// Random stream for frame `index`.
pub fn frame_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let w: u64 = rng.random();
        let take = (len - out.len()).min(64);
        out.extend((0..take).map(|b| ((w >> b) & 1) as u8));
    }
    out
}

/// A random square information block as `width` packed rows of `width` bits.
pub fn random_info_rows(rng: &mut impl Rng, width: usize) -> Vec<Line> {
    (0..width)
        .map(|_| {
            let mut line: Line = rng.random();
            for (w, word) in line.iter_mut().enumerate() {
                let lo = w * 64;
                if width <= lo {
                    *word = 0;
                } else if width < lo + 64 {
                    *word &= (1u64 << (width - lo)) - 1;
                }
            }
            line
        })
        .collect()
}

/// Draws the transmitted codeword and the channel output of frame `index`.
pub fn frame_input(
    code: &ProductCode,
    channel: &ChannelConfig,
    master_seed: u64,
    index: u64,
) -> Result<(ProductMatrix, ProductMatrix)> {
    let mut rng = frame_rng(master_seed, index);
    let info = random_info_rows(&mut rng, code.k());
    let tx = code.encode_packed(&info)?;
    let rx = match *channel {
        ChannelConfig::Bsc { p } => {
            let n = code.n();
            let mut rx = tx.clone();
            bsc_error_positions(n * n, p, &mut rng, |i| rx.flip(i / n, i % n));
            rx
        }
        ChannelConfig::AwgnPam4 { .. } => {
            let mut bits = tx.to_bits();
            // odd N: the last bit rides with a zero pad
            if bits.len() % 2 == 1 {
                bits.push(0);
            }
            channel.transmit(&mut bits, &mut rng)?;
            bits.truncate(code.length());
            ProductMatrix::from_bits(code.n(), &bits)?
        }
    };
    Ok((tx, rx))
}

pub fn simulate_frame(cfg: &SimConfig, code: &ProductCode, index: u64) -> Result<FrameOutcome> {
    let (tx, rx) = frame_input(code, &cfg.channel, cfg.master_seed, index)?;
    let report = code.decode(&rx, &cfg.decoder)?;
    let post_errors = code.info_distance(&tx, &report.matrix) as u64;
    Ok(FrameOutcome {
        pre_errors: tx.distance(&rx) as u64,
        post_errors,
        declared_success: report.success,
        pp_applied: report.pp_applied,
    })
}

/// Runs on the current rayon pool.
pub fn run_monte_carlo(cfg: &SimConfig) -> Result<SimStats> {
    cfg.validate()?;
    let code = cfg.code();
    let mut stats = SimStats {
        info_bits_per_frame: code.info_len() as u64,
        code_bits_per_frame: code.length() as u64,
        ..SimStats::default()
    };
    let mut next = 0u64;
    while !cfg.should_stop(&stats) {
        let end = next.saturating_add(BATCH).min(cfg.max_frames);
        let outcomes: Vec<FrameOutcome> = (next..end)
            .into_par_iter()
            .map(|i| simulate_frame(cfg, &code, i))
            .collect::<Result<_>>()?;
        for f in &outcomes {
            stats.add(f);
            if cfg.should_stop(&stats) {
                break;
            }
        }
        next = end;
    }
    Ok(stats)
}

/// Runs on a dedicated pool of `workers` threads.
pub fn run_monte_carlo_with_workers(cfg: &SimConfig, workers: usize) -> Result<SimStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| run_monte_carlo(cfg))
}

pub const CSV_HEADER: &str =
    "p_nominal,measured_p,frames,pre_fec_bit_errors,post_fec_bit_errors,frame_errors,ber,fer,pp_rate";

/// Six significant digits, exponent form.
pub fn fmt_sig6(x: f64) -> String {
    format!("{x:.5e}")
}

/// One CSV row in [`CSV_HEADER`] order.
pub fn csv_row(p_nominal: f64, s: &SimStats) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt_sig6(p_nominal),
        fmt_sig6(s.measured_p()),
        s.frames,
        s.pre_fec_bit_errors,
        s.post_fec_bit_errors,
        s.frame_errors,
        fmt_sig6(s.ber()),
        fmt_sig6(s.fer()),
        fmt_sig6(s.pp_rate()),
    )
}
