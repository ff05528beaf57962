//! The five subcommands: scan, fit, render, calibrate, report.
//!
//! Angles are degrees on the command line and radians inside the library.
//! Every command writes its data output plus a `<out>.manifest.json`
//! reproducibility record.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::json;

use soe_core::channel::{ChannelModel, ChannelSpecFile};
use soe_core::characterization::{calibrate_channel, channel_report};
use soe_core::measurement::{simulate_counts, ScanConfig, ScanResult};
use soe_core::render::{angular_profile, oam_pair_state, render_intensity};
use soe_core::spinorbit::{SpinOrbitState, VectorModeSpec, DEFAULT_L_MAX};

use crate::manifest::RunManifest;
use crate::AppError;

fn read_input(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path)
        .map_err(|e| AppError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), AppError> {
    fs::write(path, contents)
        .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_manifest(m: &RunManifest, out: &Path) -> Result<(), AppError> {
    write_output(&RunManifest::path_for(out), &m.to_json())
}

/// --seed wins; otherwise SOE_DEFAULT_SEED; otherwise 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, AppError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("SOE_DEFAULT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| AppError::Input(format!("SOE_DEFAULT_SEED is not a valid u64: '{v}'"))),
        Err(_) => Ok(0),
    }
}

fn load_channel(path: Option<&Path>) -> Result<(String, ChannelModel), AppError> {
    match path {
        None => Ok((
            "free_space".to_string(),
            ChannelModel::free_space(DEFAULT_L_MAX),
        )),
        Some(p) => {
            let text = read_input(p)?;
            let spec: ChannelSpecFile = serde_json::from_str(&text)
                .map_err(|e| AppError::Input(format!("bad channel spec {}: {e}", p.display())))?;
            let channel = ChannelModel::fiber(DEFAULT_L_MAX, &spec.label, &spec.params())?;
            Ok((spec.label, channel))
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Channel spec JSON; free space when omitted
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Analyzer angles in degrees, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0,45")]
    pub alpha: Vec<f64>,
    /// Sector scan step in degrees
    #[arg(long, default_value_t = 5.0)]
    pub theta_step: f64,
    /// Photons per (alpha, theta) setting
    #[arg(long, default_value_t = 100_000)]
    pub photons: u64,
    /// RNG seed; falls back to SOE_DEFAULT_SEED, then 0
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_scan(args: &ScanArgs) -> Result<(), AppError> {
    let seed = resolve_seed(args.seed)?;
    let (label, channel) = load_channel(args.channel.as_deref())?;
    let alphas: Vec<f64> = args.alpha.iter().map(|d| d.to_radians()).collect();
    let config =
        ScanConfig::with_theta_step(alphas, args.theta_step.to_radians(), args.photons, seed)?;
    let scan = simulate_counts(&config, &channel)?;
    write_output(&args.out, &scan.to_csv())?;
    let manifest = RunManifest::new(
        "scan",
        json!({
            "channel": args.channel.as_ref().map(|p| p.display().to_string()),
            "channel_label": label,
            "alpha_deg": args.alpha,
            "theta_step_deg": args.theta_step,
            "photons": args.photons,
        }),
        seed,
        vec![args.out.display().to_string()],
    );
    write_manifest(&manifest, &args.out)?;
    println!(
        "scan: {} settings through '{}' -> {}",
        scan.points.len(),
        label,
        args.out.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Scan CSV produced by `soe scan`
    #[arg(long)]
    pub scan: PathBuf,
    /// Output report JSON path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), AppError> {
    let scan = ScanResult::from_csv(&read_input(&args.scan)?)?;
    let report = channel_report(&scan)?;
    write_output(&args.out, &report.to_json())?;
    let manifest = RunManifest::new(
        "fit",
        json!({ "scan": args.scan.display().to_string() }),
        0,
        vec![args.out.display().to_string()],
    );
    write_manifest(&manifest, &args.out)?;
    println!(
        "fit: V_max = {:.4} +/- {:.4}, V_min = {:.4} +/- {:.4} -> {}",
        report.v_max.value,
        report.v_max.sigma,
        report.v_min.value,
        report.v_min.sigma,
        args.out.display()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Tm01,
    Te01,
    He21Even,
    He21Odd,
}

impl FamilyArg {
    fn spec(self) -> VectorModeSpec {
        match self {
            FamilyArg::Tm01 => VectorModeSpec::Tm01,
            FamilyArg::Te01 => VectorModeSpec::Te01,
            FamilyArg::He21Even => VectorModeSpec::He21Even,
            FamilyArg::He21Odd => VectorModeSpec::He21Odd,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct RenderMode {
    /// Named vector-mode family
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Scalar OAM-pair superposition (|l> + e^{i zeta}|-l>)/sqrt(2)
    #[arg(long)]
    pub ell: Option<i32>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub mode: RenderMode,
    /// Relative phase zeta in degrees (pair mode only)
    #[arg(long, default_value_t = 0.0)]
    pub zeta_deg: f64,
    /// Raster resolution in pixels
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Output PGM path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_render(args: &RenderArgs) -> Result<(), AppError> {
    let (state, is_pair, mode_desc): (SpinOrbitState, bool, String) =
        match (args.mode.family, args.mode.ell) {
            (Some(family), None) => {
                let l_max = DEFAULT_L_MAX;
                (
                    SpinOrbitState::vector_mode(l_max, family.spec())?,
                    false,
                    format!("{family:?}").to_lowercase(),
                )
            }
            (None, Some(ell)) => {
                if ell == 0 {
                    return Err(AppError::Input(
                        "pair mode needs a nonzero topological charge".into(),
                    ));
                }
                (
                    oam_pair_state(ell, args.zeta_deg.to_radians())?,
                    true,
                    format!("pair l = +-{}", ell.abs()),
                )
            }
            _ => unreachable!("clap group enforces exactly one mode"),
        };
    let raster = render_intensity(&state, args.grid)?;
    write_output(&args.out, &raster.to_pgm())?;
    let lobes = if is_pair {
        let n = angular_profile(&raster, 720).lobe_count();
        println!(
            "render: {mode_desc}, {n} azimuthal lobes -> {}",
            args.out.display()
        );
        Some(n)
    } else {
        println!("render: {mode_desc} -> {}", args.out.display());
        None
    };
    let manifest = RunManifest::new(
        "render",
        json!({
            "mode": mode_desc,
            "zeta_deg": args.zeta_deg,
            "grid": args.grid,
            "lobes": lobes,
        }),
        0,
        vec![args.out.display().to_string()],
    );
    write_manifest(&manifest, &args.out)
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Target marked-setting visibility (alpha = 90 deg)
    #[arg(long)]
    pub v_min: f64,
    /// Target erased-setting visibility (alpha = 45 deg)
    #[arg(long)]
    pub v_max: f64,
    /// Output channel spec JSON path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<(), AppError> {
    let params = calibrate_channel(args.v_min, args.v_max)?;
    let spec = ChannelSpecFile::from_params("calibrated", &params);
    let text = serde_json::to_string_pretty(&spec)
        .map_err(|e| AppError::Io(format!("cannot serialize channel spec: {e}")))?;
    write_output(&args.out, &text)?;
    let manifest = RunManifest::new(
        "calibrate",
        json!({ "v_min_target": args.v_min, "v_max_target": args.v_max }),
        0,
        vec![args.out.display().to_string()],
    );
    write_manifest(&manifest, &args.out)?;
    println!(
        "calibrate: epsilon_xt = {:.6}, intermodal_phase = {:.2} deg -> {}",
        params.epsilon_xt,
        params.intermodal_phase.to_degrees(),
        args.out.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Scan CSV produced by `soe scan`
    #[arg(long)]
    pub scan: PathBuf,
    /// Output text path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_report(args: &ReportArgs) -> Result<(), AppError> {
    let scan = ScanResult::from_csv(&read_input(&args.scan)?)?;
    let report = channel_report(&scan)?;
    let text = report.to_string();
    write_output(&args.out, &format!("{text}\n"))?;
    let manifest = RunManifest::new(
        "report",
        json!({ "scan": args.scan.display().to_string() }),
        0,
        vec![args.out.display().to_string()],
    );
    write_manifest(&manifest, &args.out)?;
    println!("{text}");
    Ok(())
}
