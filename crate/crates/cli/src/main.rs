//! Command-line front end: intensity sweeps, analytic curve export, detector
//! dead-time characterization, and the one-time-pad demo. Every command with
//! a `--seed` flag is bit-deterministic in its file outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use blindgate_core::export::format_sig6;
use blindgate_core::otp::demo_pipeline;
use blindgate_core::protocol::{pack_bits, run_session_pair, SessionConfig, SessionResult};
use blindgate_core::spad::{fit_recovery_curve, scan_csv, simulate_two_pulse_scan, DeadTimeModel};
use blindgate_core::types::KeyBit;
use blindgate_core::{analytic, pgm};

/// Table of blinding intensities swept in the reference measurement.
const DEFAULT_MU_B: [f64; 7] = [0.37, 0.49, 0.83, 1.88, 5.29, 9.75, 16.52];

#[derive(Parser)]
#[command(
    name = "blindgate",
    version,
    about = "Detector dead-time blinding attack simulator for a four-detector BB84 receiver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep blinding intensities; writes a CSV table and a JSON summary.
    Sweep(SweepArgs),
    /// Export the closed-form click and information curves as CSV.
    Curves(CurvesArgs),
    /// Two-pulse dead-time scan plus recovery-curve fit.
    Characterize(CharacterizeArgs),
    /// One-time-pad demo on a PGM image using simulated sifted keys.
    Otp(OtpArgs),
}

#[derive(Args, Clone)]
struct SessionFlags {
    /// RNG seed for the simulated sessions.
    #[arg(long)]
    seed: Option<u64>,
    /// Rounds per session.
    #[arg(long)]
    rounds: Option<u64>,
    /// Session configuration file (JSON, same fields as the config schema).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict key bits to rounds where all detectors were verifiably active.
    #[arg(long)]
    gate: bool,
    /// Disable Eve's blinding pulses.
    #[arg(long)]
    no_attack: bool,
    /// Signal intensity override (mean photons per pulse at the receiver).
    #[arg(long)]
    mu_s: Option<f64>,
}

impl SessionFlags {
    /// Config file first, then flag overrides.
    fn build(&self) -> Result<SessionConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => SessionConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(rounds) = self.rounds {
            config.rounds = rounds;
        }
        if let Some(mu_s) = self.mu_s {
            config.intensity.mu_s_eff = mu_s;
        }
        if self.gate {
            config.countermeasure = true;
        }
        if self.no_attack {
            config.attack = false;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    session: SessionFlags,
    /// Blinding intensities to sweep (comma separated; default: the seven
    /// reference values).
    #[arg(long, value_delimiter = ',')]
    mu_b: Option<Vec<f64>>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// JSON summary path (default: CSV path with a .json extension).
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Lower end of the blinding intensity range.
    #[arg(long, default_value_t = 0.0)]
    min: f64,
    /// Upper end of the blinding intensity range.
    #[arg(long, default_value_t = 20.0)]
    max: f64,
    /// Number of rows.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Signal intensity used for the information columns.
    #[arg(long, default_value_t = 0.001)]
    mu_s: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CharacterizeArgs {
    /// Dead time of the simulated detector (seconds).
    #[arg(long, default_value_t = 400e-9)]
    tau_d: f64,
    /// Discrimination jitter (seconds).
    #[arg(long, default_value_t = 30e-9)]
    tau_2: f64,
    /// Capacitance recharge time (seconds).
    #[arg(long, default_value_t = 100e-9)]
    tau_3: f64,
    /// Number of scan delays.
    #[arg(long, default_value_t = 50)]
    delays: usize,
    /// Shortest delay (seconds).
    #[arg(long, default_value_t = 50e-9)]
    min_delay: f64,
    /// Longest delay (seconds).
    #[arg(long, default_value_t = 3.5e-6)]
    max_delay: f64,
    /// Trials per delay.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Optional CSV output of the scan points.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OtpArgs {
    #[command(flatten)]
    session: SessionFlags,
    /// Input image (binary PGM, 8-bit).
    #[arg(long)]
    image: PathBuf,
    /// Output directory for ciphertext.pgm, bob.pgm, eve.pgm, report.json
    /// and the packed key files.
    #[arg(long)]
    out_dir: PathBuf,
    /// Blinding intensity override.
    #[arg(long)]
    mu_b: Option<f64>,
    /// Replace all keys with zeros (testing aid: ciphertext equals plaintext).
    #[arg(long, hide = true)]
    zero_key: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Characterize(args) => cmd_characterize(args),
        Command::Otp(args) => cmd_otp(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

#[derive(Serialize)]
struct SweepPoint {
    mu_b_eff: f64,
    ungated: SessionResult,
    gated: SessionResult,
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let base = args.session.build()?;
    let mut mu_list = args.mu_b.unwrap_or_else(|| DEFAULT_MU_B.to_vec());
    if mu_list.is_empty() {
        bail!("the blinding intensity list must not be empty");
    }
    mu_list.sort_by(|a, b| a.partial_cmp(b).expect("intensities are not NaN"));

    // one independent session pair per sweep point, rows reassembled in order
    let mut points: Vec<Option<SweepPoint>> = Vec::new();
    points.resize_with(mu_list.len(), || None);
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for (idx, &mu_b) in mu_list.iter().enumerate() {
            let mut config = base;
            config.intensity.mu_b_eff = mu_b;
            handles.push((idx, scope.spawn(move || run_session_pair(&config))));
        }
        for (idx, handle) in handles {
            let (ungated, gated) = handle
                .join()
                .expect("sweep worker panicked")
                .with_context(|| format!("simulating mu_b_eff = {}", mu_list[idx]))?;
            points[idx] = Some(SweepPoint {
                mu_b_eff: mu_list[idx],
                ungated,
                gated,
            });
        }
        Ok(())
    })?;
    let points: Vec<SweepPoint> = points
        .into_iter()
        .map(|p| p.expect("all points ran"))
        .collect();

    let mut csv = String::from(
        "mu_b_eff,qber_ab,qber_ab_se,qber_be,qber_be_se,i_eb,overlap,\
         p0_emp,p1_emp,p2_emp,p3_emp,gate_kept_fraction\n",
    );
    for point in &points {
        // --gate reports the gated key's statistics, otherwise the ungated
        let stats = if base.countermeasure {
            &point.gated
        } else {
            &point.ungated
        };
        let fields = [
            Some(point.mu_b_eff),
            stats.qber_ab,
            stats.qber_ab_se,
            stats.qber_be,
            stats.qber_be_se,
            stats.i_eb,
            stats.overlap,
            Some(stats.blind_multiplicity[0]),
            Some(stats.blind_multiplicity[1]),
            Some(stats.blind_multiplicity[2]),
            Some(stats.blind_multiplicity[3]),
            Some(point.gated.kept_fraction),
        ];
        let row: Vec<String> = fields
            .iter()
            .map(|f| f.map(format_sig6).unwrap_or_default())
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_text(&args.out, &csv)?;

    let json_path = args
        .json_out
        .unwrap_or_else(|| args.out.with_extension("json"));
    let mut json = serde_json::to_string_pretty(&points).context("serializing sweep summary")?;
    json.push('\n');
    write_text(&json_path, &json)?;
    println!(
        "swept {} blinding intensities -> {} and {}",
        points.len(),
        args.out.display(),
        json_path.display()
    );
    Ok(())
}

fn cmd_curves(args: CurvesArgs) -> Result<()> {
    if args.min < 0.0 || args.max < args.min || args.steps == 0 {
        bail!(
            "invalid range: need 0 <= min <= max and steps >= 1, got [{}, {}] with {} steps",
            args.min,
            args.max,
            args.steps
        );
    }
    let mu_values: Vec<f64> = if args.steps == 1 {
        vec![args.min]
    } else {
        (0..args.steps)
            .map(|i| args.min + (args.max - args.min) * i as f64 / (args.steps - 1) as f64)
            .collect()
    };
    let csv = analytic::curves_csv(&mu_values, args.mu_s)?;
    write_text(&args.out, &csv)?;
    println!(
        "wrote {} curve rows to {}",
        mu_values.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_characterize(args: CharacterizeArgs) -> Result<()> {
    if args.delays < 4 {
        bail!(
            "need at least 4 delays for a recovery fit, got {}",
            args.delays
        );
    }
    if !(args.min_delay > 0.0 && args.max_delay > args.min_delay) {
        bail!(
            "invalid delay range [{}, {}]",
            args.min_delay,
            args.max_delay
        );
    }
    let model = DeadTimeModel::graded(args.tau_d, args.tau_2, args.tau_3);
    let delays: Vec<f64> = (0..args.delays)
        .map(|i| {
            args.min_delay + (args.max_delay - args.min_delay) * i as f64 / (args.delays - 1) as f64
        })
        .collect();
    let scan = simulate_two_pulse_scan(model, &delays, args.trials, args.seed)?;
    if let Some(path) = &args.out {
        write_text(path, &scan_csv(&scan))?;
    }
    let fit = fit_recovery_curve(&scan)?;

    println!(
        "two-pulse scan: {} delays, {} trials each",
        args.delays, args.trials
    );
    println!("parameter      true        fitted      rel. error");
    for (name, truth, fitted) in [
        ("tau_d", args.tau_d, fit.tau_d),
        ("tau_2", args.tau_2, fit.tau_2),
        ("tau_3", args.tau_3, fit.tau_3),
    ] {
        println!(
            "{name:<10} {:>11} {:>11}     {:.3}%",
            format_sig6(truth),
            format_sig6(fitted),
            100.0 * (fitted - truth).abs() / truth
        );
    }
    println!("sum of squared residuals: {}", format_sig6(fit.residual));
    Ok(())
}

#[derive(Serialize)]
struct OtpReport {
    image: String,
    width: usize,
    height: usize,
    payload_bytes: usize,
    required_bits: usize,
    rounds: u64,
    sifted_len: usize,
    gated: bool,
    qber_ab: Option<f64>,
    qber_be: Option<f64>,
    i_eb: Option<f64>,
    overlap: Option<f64>,
    eve_bit_error_fraction: f64,
    bob_roundtrip_exact: bool,
}

fn cmd_otp(args: OtpArgs) -> Result<()> {
    let bytes =
        fs::read(&args.image).with_context(|| format!("reading image {}", args.image.display()))?;
    let image =
        pgm::parse(&bytes).with_context(|| format!("parsing image {}", args.image.display()))?;
    let required_bits = image.payload.len() * 8;

    let mut config = args.session.build()?;
    if let Some(mu_b) = args.mu_b {
        config.intensity.mu_b_eff = mu_b;
    }

    // size the session from a pilot run: 3x the key material the image needs
    if args.session.rounds.is_none() {
        let pilot = SessionConfig {
            rounds: 100_000,
            ..config
        };
        let pilot_result = session_view(&pilot)?;
        if pilot_result.sifted_len == 0 {
            bail!("pilot session produced no sifted bits; raise the intensities");
        }
        let rate = pilot_result.sifted_len as f64 / pilot.rounds as f64;
        config.rounds = ((required_bits as f64 * 3.0 / rate).ceil() as u64).max(pilot.rounds);
    }

    let mut session = session_view(&config)?;
    if args.zero_key {
        session.alice_key = vec![KeyBit::ZERO; required_bits];
        session.bob_key = vec![KeyBit::ZERO; required_bits];
        session.eve_key = vec![KeyBit::ZERO; required_bits];
    }
    let demo = demo_pipeline(&image.payload, &session)?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let write_image = |name: &str, payload: Vec<u8>| -> Result<()> {
        let img = image.with_payload(payload)?;
        write_bytes(&args.out_dir.join(name), &img.to_bytes())
    };
    write_image("ciphertext.pgm", demo.ciphertext.clone())?;
    write_image("bob.pgm", demo.bob_plaintext.clone())?;
    write_image("eve.pgm", demo.eve_plaintext.clone())?;
    for (name, key) in [
        ("alice.key", &session.alice_key),
        ("bob.key", &session.bob_key),
        ("eve.key", &session.eve_key),
    ] {
        write_bytes(&args.out_dir.join(name), &pack_bits(key))?;
    }

    let report = OtpReport {
        image: args.image.display().to_string(),
        width: image.width,
        height: image.height,
        payload_bytes: image.payload.len(),
        required_bits,
        rounds: session.rounds,
        sifted_len: session.sifted_len,
        gated: session.gated,
        qber_ab: session.qber_ab,
        qber_be: session.qber_be,
        i_eb: session.i_eb,
        overlap: session.overlap,
        eve_bit_error_fraction: demo.eve_bit_error_fraction,
        bob_roundtrip_exact: demo.bob_plaintext == image.payload,
    };
    let mut json = serde_json::to_string_pretty(&report).context("serializing report")?;
    json.push('\n');
    write_text(&args.out_dir.join("report.json"), &json)?;

    println!(
        "encrypted {}x{} image; eve recovered {:.2}% of plaintext bits -> {}",
        image.width,
        image.height,
        100.0 * (1.0 - demo.eve_bit_error_fraction),
        args.out_dir.display()
    );
    Ok(())
}

/// Session respecting the countermeasure flag, from one simulation pass.
fn session_view(config: &SessionConfig) -> Result<SessionResult> {
    let (ungated, gated) = run_session_pair(config)?;
    Ok(if config.countermeasure {
        gated
    } else {
        ungated
    })
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_bytes(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
