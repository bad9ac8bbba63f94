//! Run configuration: JSON file, command-line flags, and the merge of the
//! two (flags win field by field).

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use bsm_core::detector::PnrConfig;
use bsm_core::noise::NoiseConfig;
use bsm_core::schemes::{BellKind, SchemeKind};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Standard,
    Enhanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputArg {
    #[value(name = "psi+")]
    PsiPlus,
    #[value(name = "psi-")]
    PsiMinus,
    #[value(name = "phi+")]
    PhiPlus,
    #[value(name = "phi-")]
    PhiMinus,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

/// Flags shared by the state-simulation subcommands.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Which interferometer to simulate.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Input Bell state, or `all` for one run per state.
    #[arg(long, value_enum)]
    pub input: Option<InputArg>,
    /// Bell-pair visibility in the H/V basis; enables the noise model.
    #[arg(long)]
    pub v_bell_hv: Option<f64>,
    /// Bell-pair visibility in the +/- basis; enables the noise model.
    #[arg(long)]
    pub v_bell_pm: Option<f64>,
    /// Auxiliary-pair visibility; enables the noise model.
    #[arg(long = "v-aux")]
    pub v_aux: Option<f64>,
    /// Per-photon detection efficiency for Monte Carlo sampling.
    #[arg(long)]
    pub eta: Option<f64>,
    /// On/off detectors per path for Monte Carlo sampling.
    #[arg(long)]
    pub k: Option<u32>,
    /// Number of Monte Carlo shots; enables sampling.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Sampler seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Artifact format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scheme: Option<String>,
    pub input: Option<String>,
    pub noise: Option<FileNoise>,
    pub pnr: Option<FilePnr>,
    pub shots: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileNoise {
    pub v_bell_hv: Option<f64>,
    pub v_bell_pm: Option<f64>,
    pub v_aux_hv: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilePnr {
    pub k: Option<u32>,
    pub eta: Option<f64>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }
}

/// Input selection after resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSel {
    One(BellKind),
    All,
}

impl InputSel {
    pub fn kinds(self) -> Vec<BellKind> {
        match self {
            InputSel::One(kind) => vec![kind],
            InputSel::All => BellKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Sampling is on only when `shots` is set somewhere.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub pnr: PnrConfig,
    pub shots: u64,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scheme: SchemeKind,
    pub input: InputSel,
    pub noise: Option<NoiseConfig>,
    pub sampling: Option<Sampling>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, CliError> {
    s.parse().map_err(|_| CliError::Config(format!("unknown scheme `{s}`")))
}

fn parse_input(s: &str) -> Result<InputSel, CliError> {
    if s == "all" {
        return Ok(InputSel::All);
    }
    s.parse::<BellKind>()
        .map(InputSel::One)
        .map_err(|_| CliError::Config(format!("unknown input state `{s}`")))
}

pub fn parse_format(s: &str) -> Result<Format, CliError> {
    match s {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(CliError::Config(format!("unknown format `{other}`"))),
    }
}

/// Merges file and flags. Flags override file values field by field. Noise is
/// enabled by the presence of a noise block or any visibility flag; fields
/// not given fall back to the quoted experimental visibilities. Sampling is
/// enabled by `shots`; detector fields without `shots` are an error.
pub fn resolve(file: &FileConfig, args: &CommonArgs) -> Result<Resolved, CliError> {
    let scheme = match args.scheme {
        Some(SchemeArg::Standard) => SchemeKind::Standard,
        Some(SchemeArg::Enhanced) => SchemeKind::Enhanced,
        None => match &file.scheme {
            Some(s) => parse_scheme(s)?,
            None => SchemeKind::Standard,
        },
    };

    let input = match args.input {
        Some(InputArg::PsiPlus) => InputSel::One(BellKind::PsiPlus),
        Some(InputArg::PsiMinus) => InputSel::One(BellKind::PsiMinus),
        Some(InputArg::PhiPlus) => InputSel::One(BellKind::PhiPlus),
        Some(InputArg::PhiMinus) => InputSel::One(BellKind::PhiMinus),
        Some(InputArg::All) => InputSel::All,
        None => match &file.input {
            Some(s) => parse_input(s)?,
            None => InputSel::All,
        },
    };

    let noise_requested = file.noise.is_some()
        || args.v_bell_hv.is_some()
        || args.v_bell_pm.is_some()
        || args.v_aux.is_some();
    let noise = if noise_requested {
        let block = file.noise.as_ref();
        let defaults = NoiseConfig::default();
        let cfg = NoiseConfig {
            v_bell_hv: args
                .v_bell_hv
                .or(block.and_then(|b| b.v_bell_hv))
                .unwrap_or(defaults.v_bell_hv),
            v_bell_pm: args
                .v_bell_pm
                .or(block.and_then(|b| b.v_bell_pm))
                .unwrap_or(defaults.v_bell_pm),
            v_aux_hv: args
                .v_aux
                .or(block.and_then(|b| b.v_aux_hv))
                .unwrap_or(defaults.v_aux_hv),
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Some(cfg)
    } else {
        None
    };

    let shots = args.shots.or(file.shots);
    let detector_requested = file.pnr.is_some()
        || args.eta.is_some()
        || args.k.is_some()
        || args.seed.is_some();
    let sampling = match shots {
        Some(0) => return Err(CliError::Config("shots must be at least 1".into())),
        Some(shots) => {
            let block = file.pnr.as_ref();
            let defaults = PnrConfig::default();
            let pnr = PnrConfig {
                k: args.k.or(block.and_then(|b| b.k)).unwrap_or(defaults.k),
                eta: args.eta.or(block.and_then(|b| b.eta)).unwrap_or(defaults.eta),
                seed: args.seed.or(block.and_then(|b| b.seed)).unwrap_or(defaults.seed),
            };
            pnr.validate().map_err(|e| CliError::Config(e.to_string()))?;
            Some(Sampling { pnr, shots })
        }
        None if detector_requested => {
            return Err(CliError::Config(
                "detector sampling settings given without --shots".into(),
            ));
        }
        None => None,
    };

    let output = args.output.clone().or_else(|| file.output.clone());
    let format = match args.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => match &file.format {
            Some(s) => parse_format(s)?,
            None => Format::Json,
        },
    };

    Ok(Resolved { scheme, input, noise, sampling, output, format })
}
