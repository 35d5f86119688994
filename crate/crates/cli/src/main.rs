mod pack;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use ebch_tpc::analysis::{
    cycle_breakdown, cycle_count, estimate_floor_for, info_throughput_gbps, latency_ns, ncg,
    ncg_rate_adjusted, throughput_bits_per_cycle, LatencyParams,
};
use ebch_tpc::channel::pam4_noise_std_for;
use ebch_tpc::sim::{csv_row, run_monte_carlo_with_workers, CSV_HEADER};
use ebch_tpc::{
    ChannelConfig, ComponentCode, DecoderConfig, ProductCode, ProductMatrix, Schedule, SimConfig,
};

#[derive(Parser)]
#[command(
    name = "ebch-tpc",
    version,
    about = "Extended-BCH product code codec and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode k x k information blocks into n x n codeword blocks.
    Encode(EncodeArgs),
    /// Decode n x n blocks back to information blocks.
    Decode(DecodeArgs),
    /// Monte Carlo BER/FER sweep, one CSV row per point.
    Sim(SimArgs),
    /// Closed-form reports as JSON.
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
}

#[derive(Args, Serialize)]
struct CodeArgs {
    /// Shortening of the BCH(255,239) mother code, 0..=61.
    #[arg(long, default_value_t = 61)]
    code_shorten: usize,
}

impl CodeArgs {
    fn code(&self) -> Result<ProductCode> {
        Ok(ProductCode::new(ComponentCode::new(self.code_shorten)?))
    }
}

#[derive(Args, Serialize)]
struct DecoderArgs {
    #[arg(long, default_value_t = 2)]
    iterations: usize,
    /// Enable intersection-flipping post-processing (default).
    #[arg(long, overrides_with = "no_pp")]
    #[serde(skip)]
    pp: bool,
    #[arg(long, overrides_with = "pp")]
    no_pp: bool,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Hardware)]
    schedule: ScheduleArg,
}

impl DecoderArgs {
    fn config(&self) -> Result<DecoderConfig> {
        let cfg = DecoderConfig {
            iterations: self.iterations,
            post_processing: !self.no_pp,
            schedule: match self.schedule {
                ScheduleArg::Reference => Schedule::Reference,
                ScheduleArg::Hardware => Schedule::Hardware,
            },
            early_exit: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ScheduleArg {
    Reference,
    Hardware,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    code: CodeArgs,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Per-frame JSON report; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum ChannelArg {
    Bsc,
    Pam4,
}

#[derive(Args, Serialize)]
struct SimArgs {
    #[arg(long, value_enum, default_value_t = ChannelArg::Bsc)]
    channel: ChannelArg,
    /// Crossover probabilities (bsc) or target raw bit error rates (pam4),
    /// comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Noise standard deviations for pam4, comma separated.
    #[arg(long, value_delimiter = ',')]
    noise_std: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    min_frames: u64,
    #[arg(long, default_value_t = 100)]
    min_frame_errors: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_frames: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    /// Run manifest destination; defaults to `<output>.manifest.json`, or
    /// stderr when writing the CSV to stdout.
    #[arg(long)]
    #[serde(skip)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    #[serde(flatten)]
    decoder: DecoderArgs,
}

#[derive(Subcommand)]
enum Analyze {
    /// Error-floor estimate from minimal stall patterns.
    Floor {
        /// Raw bit error probability.
        p: f64,
        #[arg(long)]
        no_pp: bool,
        #[arg(long, default_value_t = 195)]
        n: usize,
    },
    /// Net coding gain in dB.
    Ncg {
        p_in: f64,
        ber_out: f64,
        /// Also report the rate-adjusted gain for this code rate.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Decoder cycle count and throughput.
    Latency {
        #[arg(long, default_value_t = 13)]
        pc: usize,
        #[arg(long, default_value_t = 2)]
        pl: usize,
        #[arg(long, default_value_t = 6)]
        np: usize,
        #[arg(long, default_value_t = 2)]
        iterations: usize,
        #[arg(long, default_value_t = 195)]
        n: usize,
        #[arg(long, default_value_t = 178)]
        k: usize,
        #[arg(long, default_value_t = 609.0)]
        clock_mhz: f64,
    },
}

#[derive(Serialize)]
struct FrameReport {
    frame: usize,
    success: bool,
    half_iterations: usize,
    pp_applied: bool,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    params: &'a SimArgs,
    master_seed: u64,
    version: &'static str,
    started_unix_ms: u128,
    finished_unix_ms: u128,
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

fn encode(args: &EncodeArgs) -> Result<()> {
    let code = args.code.code()?;
    let blocks = pack::unpack_blocks(&read(&args.input)?, code.k(), "information")?;
    let mut out = Vec::with_capacity(blocks.len() * pack::block_bytes(code.n()));
    for info in &blocks {
        let m = code.encode(info)?;
        pack::pack_block(&m.to_bits(), code.n(), &mut out);
    }
    write(&args.output, &out)
}

fn decode(args: &DecodeArgs) -> Result<()> {
    let code = args.code.code()?;
    let cfg = args.decoder.config()?;
    let blocks = pack::unpack_blocks(&read(&args.input)?, code.n(), "codeword")?;
    let mut out = Vec::with_capacity(blocks.len() * pack::block_bytes(code.k()));
    let mut reports = Vec::with_capacity(blocks.len());
    for (frame, bits) in blocks.iter().enumerate() {
        let rx = ProductMatrix::from_bits(code.n(), bits)?;
        let rep = code.decode(&rx, &cfg)?;
        pack::pack_block(&code.extract_info(&rep.matrix), code.k(), &mut out);
        reports.push(FrameReport {
            frame,
            success: rep.success,
            half_iterations: rep.half_iterations_run,
            pp_applied: rep.pp_applied,
        });
    }
    write(&args.output, &out)?;
    let json = serde_json::to_string_pretty(&reports)?;
    match &args.report {
        Some(path) => write(path, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn sweep(args: &SimArgs) -> Result<Vec<(f64, ChannelConfig)>> {
    let points: Vec<(f64, ChannelConfig)> = match args.channel {
        ChannelArg::Bsc => {
            if !args.noise_std.is_empty() {
                bail!("--noise-std applies to --channel pam4 only");
            }
            args.p
                .iter()
                .map(|&p| (p, ChannelConfig::Bsc { p }))
                .collect()
        }
        ChannelArg::Pam4 => {
            let mut v = Vec::new();
            for &p in &args.p {
                let noise_std = pam4_noise_std_for(p)?;
                v.push((p, ChannelConfig::AwgnPam4 { noise_std }));
            }
            for &noise_std in &args.noise_std {
                let c = ChannelConfig::AwgnPam4 { noise_std };
                c.validate()?;
                v.push((c.nominal_p(), c));
            }
            v
        }
    };
    if points.is_empty() {
        bail!("no sweep points: pass --p (or --noise-std with --channel pam4)");
    }
    for (_, c) in &points {
        c.validate()?;
    }
    Ok(points)
}

fn sim(args: &SimArgs) -> Result<()> {
    let started = unix_ms();
    let decoder = args.decoder.config()?;
    args.code.code()?;
    let points = sweep(args)?;
    let workers = if args.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        args.workers
    };

    let mut csv = format!("{CSV_HEADER}\n");
    for (p_nominal, channel) in points {
        let cfg = SimConfig {
            shorten: args.code.code_shorten,
            min_frames: args.min_frames,
            min_frame_errors: args.min_frame_errors,
            max_frames: args.max_frames,
            ..SimConfig::new(channel, decoder, args.seed)
        };
        let stats = run_monte_carlo_with_workers(&cfg, workers)?;
        csv.push_str(&csv_row(p_nominal, &stats));
        csv.push('\n');
    }

    let manifest = RunManifest {
        command: "sim",
        params: args,
        master_seed: args.seed,
        version: env!("CARGO_PKG_VERSION"),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
    };
    let manifest = serde_json::to_string_pretty(&manifest)?;
    match &args.output {
        Some(path) => {
            write(path, csv.as_bytes())?;
            let mpath = args.manifest.clone().unwrap_or_else(|| {
                let mut s = path.clone().into_os_string();
                s.push(".manifest.json");
                s.into()
            });
            write(&mpath, manifest.as_bytes())
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            match &args.manifest {
                Some(path) => write(path, manifest.as_bytes()),
                None => {
                    eprintln!("{manifest}");
                    Ok(())
                }
            }
        }
    }
}

fn analyze(what: &Analyze) -> Result<()> {
    let report = match *what {
        Analyze::Floor { p, no_pp, n } => {
            if !(1..=256).contains(&n) {
                bail!("n must lie in 1..=256");
            }
            serde_json::to_value(estimate_floor_for(n, p, !no_pp)?)?
        }
        Analyze::Ncg {
            p_in,
            ber_out,
            rate,
        } => {
            let mut v = json!({ "p_in": p_in, "ber_out": ber_out, "ncg_db": ncg(p_in, ber_out)? });
            if let Some(rate) = rate {
                v["rate"] = json!(rate);
                v["ncg_rate_adjusted_db"] = json!(ncg_rate_adjusted(p_in, ber_out, rate)?);
            }
            v
        }
        Analyze::Latency {
            pc,
            pl,
            np,
            iterations,
            n,
            k,
            clock_mhz,
        } => {
            let params = LatencyParams {
                pc,
                pl,
                np,
                iterations,
                n,
                k,
            };
            json!({
                "params": params,
                "cycles": cycle_count(&params)?,
                "breakdown": cycle_breakdown(&params)?,
                "bits_per_cycle": throughput_bits_per_cycle(&params)?,
                "clock_mhz": clock_mhz,
                "throughput_gbps": info_throughput_gbps(&params, clock_mhz)?,
                "latency_ns": latency_ns(&params, clock_mhz)?,
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Encode(a) => encode(&a),
        Command::Decode(a) => decode(&a),
        Command::Sim(a) => sim(&a),
        Command::Analyze { what } => analyze(&what),
    }
}
