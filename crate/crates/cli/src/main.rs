//! `fso-dtat` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fso_dtat::channel::{rop_timeseries, sample_fading, ChannelRealization, GammaGammaParams};
use fso_dtat::config::LinkConfig;
use fso_dtat::digital::{digital_budget, td_receive_image, td_transmit_image, LdpcCode, ModFormat};
use fso_dtat::image::{synthetic_scene, ImageTensor};
use fso_dtat::link::{
    resolve_noise, rop_sweep, run_frame, turbulence_run, PreparedImage, Scheme, SweepSpec, System,
};
use fso_dtat::metrics::QualityScore;
use fso_dtat::report::{RunReport, CSV_COLUMNS};
use fso_dtat::rng::{seeded_rng, FADING};
use fso_dtat::symfile::{read_sidecar, read_symbol_file, write_sidecar, write_symbol_file};
use fso_dtat::transport::{analog_decode, analog_encode, AnalogMapping, BandwidthRatio};

#[derive(Parser)]
#[command(
    name = "fso-dtat",
    version,
    about = "Free-space optical link simulator: digital vs discrete-time analog image transmission"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turbulence channel draws.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Source-code, LDPC-encode and modulate an image into a symbol file.
    EncodeDigital {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        format: ModFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Demodulate, decode and reconstruct an image from a symbol file.
    DecodeDigital {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: ModFormat,
        /// Image size as HEIGHTxWIDTH.
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        /// Noise variance per symbol assumed by the demapper.
        #[arg(long, default_value_t = 0.01)]
        noise_var: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map an image to analog symbols plus a JSON sidecar.
    EncodeAnalog {
        #[arg(long)]
        image: PathBuf,
        /// Channel uses per 8-bit source value.
        #[arg(long, default_value_t = 0.125)]
        ratio: f64,
        #[arg(long, value_enum, default_value_t = LayoutArg::Real)]
        layout: LayoutArg,
        #[arg(long)]
        out_symbols: PathBuf,
        #[arg(long)]
        out_meta: PathBuf,
    },
    /// Reconstruct an image from analog symbols and their sidecar.
    DecodeAnalog {
        #[arg(long)]
        in_symbols: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        /// Noise variance per real dimension.
        #[arg(long)]
        noise_var: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Image quality metrics.
    #[command(subcommand)]
    Metrics(MetricsCmd),
    /// One frame of one scheme at a fixed received power.
    Run(RunArgs),
    /// Received-power sweeps.
    #[command(subcommand)]
    Sweep(SweepCmd),
    /// Every scheme over a series of turbulence captures.
    Turbulence(TurbulenceArgs),
    /// Print the default link configuration as JSON.
    Config {
        #[arg(value_enum)]
        system: SystemArg,
    },
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Gamma-gamma fading gains.
    Sample {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Received-power series for a configured link.
    RopSeries {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MetricsCmd {
    /// Luma MS-SSIM between two images.
    MsSsim {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Subcommand)]
enum SweepCmd {
    /// Every scheme at every grid power.
    Rop {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        spec: PathBuf,
        /// Defaults to the system implied by the sweep spec's schemes.
        #[arg(long, value_enum)]
        system: Option<SystemArg>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_enum)]
    system: SystemArg,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Scheme,
    #[arg(long)]
    image: PathBuf,
    /// Received optical power, dBm.
    #[arg(long, allow_negative_numbers = true)]
    rop: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the decoded image.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TurbulenceArgs {
    #[arg(long, value_enum, default_value_t = SystemArg::Imdd)]
    system: SystemArg,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    captures: usize,
    /// Images cycled over captures; synthetic fixtures when omitted.
    #[arg(long = "image")]
    images: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Imdd,
    Coherent,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Imdd => System::Imdd,
            SystemArg::Coherent => System::Coherent,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Real,
    Complex,
}

const FIXTURES: u64 = 4;
const FIXTURE_SIZE: usize = 128;

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or("expected HEIGHTxWIDTH")?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((parse(h)?, parse(w)?))
}

fn load_config(path: Option<&Path>, system: System, seed: Option<u64>) -> Result<LinkConfig> {
    let mut cfg = match path {
        Some(p) => LinkConfig::from_json_file(p)
            .with_context(|| format!("reading config {}", p.display()))?,
        None => match system {
            System::Imdd => LinkConfig::imdd(),
            System::Coherent => LinkConfig::coherent(),
        },
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn read_image(path: &Path) -> Result<ImageTensor> {
    ImageTensor::read_ppm(path).with_context(|| format!("reading image {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_series(path: Option<&Path>, rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut out = output(path)?;
    writeln!(out, "index,fading_gain,rop_dbm")?;
    for (i, (gain, rop)) in rows.enumerate() {
        writeln!(out, "{i},{gain},{rop}")?;
    }
    out.flush()?;
    Ok(())
}

fn save_report(report: &RunReport, csv: Option<&Path>, json: Option<&Path>) -> Result<()> {
    match csv {
        Some(p) => report.save_csv(p)?,
        None if json.is_none() => print!("{}", report.to_csv_string()?),
        None => {}
    }
    if let Some(p) = json {
        report.save_json(p)?;
    }
    for a in &report.aggregate {
        eprintln!(
            "{}: success {:.2}, mean MS-SSIM {:.2} dB, {:.4e} images/s",
            a.scheme, a.success_ratio, a.mean_ms_ssim_db, a.image_rate
        );
    }
    Ok(())
}

fn infer_system(schemes: &[Scheme]) -> Result<System> {
    let candidates: Vec<System> = [System::Imdd, System::Coherent]
        .into_iter()
        .filter(|s| schemes.iter().all(|&x| s.supports(x)))
        .collect();
    match candidates.as_slice() {
        [one] => Ok(*one),
        [] => bail!("schemes {schemes:?} do not belong to a single system"),
        _ => bail!("schemes {schemes:?} fit both systems; pass --system"),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Channel(ChannelCmd::Sample {
            alpha,
            beta,
            n,
            seed,
            out,
        }) => {
            let p = GammaGammaParams {
                alpha,
                beta,
                rytov_var: f64::NAN,
            };
            if !(alpha > 0.0 && beta > 0.0) {
                bail!("alpha and beta must be positive");
            }
            let mut rng = seeded_rng(seed, FADING);
            let gains: Vec<f64> = (0..n).map(|_| sample_fading(&p, &mut rng)).collect();
            // relative to the mean received power
            write_series(
                out.as_deref(),
                gains.into_iter().map(|g| (g, 10.0 * g.log10())),
            )
        }
        Command::Channel(ChannelCmd::RopSeries {
            config,
            n,
            seed,
            out,
        }) => {
            let cfg = load_config(config.as_deref(), System::Imdd, seed)?;
            let series = rop_timeseries(&cfg, n, &mut seeded_rng(cfg.seed, FADING))?;
            write_series(
                out.as_deref(),
                series.iter().map(|r| (r.fading_gain, r.rop_dbm)),
            )
        }
        Command::EncodeDigital { image, format, out } => {
            let img = read_image(&image)?;
            let budget = digital_budget(format, img.samples());
            let frame = td_transmit_image(&img, format, LdpcCode::standard(), budget)?;
            write_symbol_file(&frame.symbols, &out)?;
            eprintln!(
                "{} source bits, {} coded bits, {} symbols",
                frame.source_bits.len(),
                frame.coded_bits.len(),
                frame.symbols.len()
            );
            Ok(())
        }
        Command::DecodeDigital {
            input,
            format,
            dims,
            noise_var,
            out,
        } => {
            let symbols = read_symbol_file(&input)?.cast::<f64>();
            let budget = digital_budget(format, dims.0 * dims.1 * 3);
            let rx = td_receive_image(
                &symbols,
                format,
                LdpcCode::standard(),
                noise_var,
                dims,
                budget,
            )?;
            match rx.image {
                Some(img) => Ok(img.write_ppm(&out)?),
                None => bail!("decode failed: {}", rx.failure.unwrap_or_default()),
            }
        }
        Command::EncodeAnalog {
            image,
            ratio,
            layout,
            out_symbols,
            out_meta,
        } => {
            let img = read_image(&image)?;
            let ratio = match layout {
                LayoutArg::Real => BandwidthRatio::real(ratio),
                LayoutArg::Complex => BandwidthRatio::complex(ratio),
            };
            let (stream, mapping) = analog_encode(&img, ratio)?;
            write_symbol_file(&stream, &out_symbols)?;
            write_sidecar(&mapping, &out_meta)?;
            eprintln!("{} symbols", stream.len());
            Ok(())
        }
        Command::DecodeAnalog {
            in_symbols,
            meta,
            noise_var,
            out,
        } => {
            let mapping: AnalogMapping = read_sidecar(&meta)?;
            let stream = read_symbol_file(&in_symbols)?.cast::<f64>();
            Ok(analog_decode(&stream, &mapping, noise_var)?.write_ppm(&out)?)
        }
        Command::Metrics(MetricsCmd::MsSsim { a, b }) => {
            let q = QualityScore::between(&read_image(&a)?, &read_image(&b)?)?;
            println!("ms_ssim={} ms_ssim_db={}", q.ms_ssim, q.ms_ssim_db);
            Ok(())
        }
        Command::Run(args) => {
            let system = System::from(args.system);
            let cfg = resolve_noise(
                &load_config(args.config.as_deref(), system, args.seed)?,
                system,
            )?;
            let prepared = PreparedImage::new(read_image(&args.image)?, system, &[args.scheme])?;
            let frame = run_frame(
                &cfg,
                &prepared,
                args.scheme,
                &ChannelRealization::at_rop(args.rop),
                0,
                0,
            )?;
            let r = &frame.row;
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
            println!("{}", CSV_COLUMNS.join(","));
            println!(
                "{},{},{},{},{},{},{},{},{}",
                r.sample_index,
                r.scheme,
                r.rop_dbm,
                opt(r.ber_pre_fec),
                opt(r.ber_post_fec),
                r.ms_ssim,
                r.ms_ssim_db,
                r.papr_db,
                r.decode_ok
            );
            if let (Some(path), Some(img)) = (args.out, frame.image) {
                img.write_ppm(path)?;
            }
            Ok(())
        }
        Command::Sweep(SweepCmd::Rop {
            config,
            spec,
            system,
            out_csv,
            out_json,
        }) => {
            let spec = SweepSpec::from_json_file(&spec)
                .with_context(|| format!("reading sweep spec {}", spec.display()))?;
            let system = match system {
                Some(s) => s.into(),
                None => infer_system(&spec.schemes)?,
            };
            let cfg = load_config(config.as_deref(), system, None)?;
            let report = rop_sweep(&cfg, &spec, system)?;
            save_report(&report, out_csv.as_deref(), out_json.as_deref())
        }
        Command::Turbulence(args) => {
            let system = System::from(args.system);
            let cfg = load_config(args.config.as_deref(), system, args.seed)?;
            let images = if args.images.is_empty() {
                (1..=FIXTURES)
                    .map(|s| synthetic_scene(FIXTURE_SIZE, FIXTURE_SIZE, s))
                    .collect::<fso_dtat::Result<Vec<_>>>()?
            } else {
                args.images
                    .iter()
                    .map(|p| read_image(p))
                    .collect::<Result<Vec<_>>>()?
            };
            let mut rng = seeded_rng(cfg.seed, FADING);
            let report = turbulence_run(
                &cfg,
                system,
                args.captures,
                &system.schemes(),
                &images,
                &mut rng,
            )?;
            save_report(&report, args.out_csv.as_deref(), args.out_json.as_deref())
        }
        Command::Config { system } => {
            let cfg = load_config(None, system.into(), None)?;
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(())
        }
    }
}
