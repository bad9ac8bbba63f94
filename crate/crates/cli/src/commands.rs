//! Implementations of the four subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bsm_core::detector::{correct_counts, sample, PnrConfig};
use bsm_core::error::Error as CoreError;
use bsm_core::fock::Distribution;
use bsm_core::metrics::compute_report;
use bsm_core::noise::{noisy_distribution, NoiseConfig};
use bsm_core::relay::{curve, preset_curves, RelayModel};
use bsm_core::schemes::{
    build_classifier, ideal_distribution, ideal_distributions, BellKind, SchemeKind,
    TABLE_TOLERANCE,
};

use crate::artifact::{
    csv_pattern, round_sig, rounded_map, suffixed_path, write_bytes, write_json, DistributionOut,
    MetricsOut, MetricsValues, ReferenceOut, RelayCurveOut, RelayOut, ReportOut, SampledReportOut,
    SamplingOut, TableOut, TableRowOut, SCHEMA_VERSION,
};
use crate::config::{Format, InputSel, Resolved, Sampling};
use crate::{CliError, RelayArgs};

fn runtime(err: CoreError) -> CliError {
    CliError::Runtime(anyhow::anyhow!(err))
}

fn kind_slug(kind: BellKind) -> &'static str {
    match kind {
        BellKind::PsiPlus => "psi_plus",
        BellKind::PsiMinus => "psi_minus",
        BellKind::PhiPlus => "phi_plus",
        BellKind::PhiMinus => "phi_minus",
    }
}

fn kind_index(kind: BellKind) -> u64 {
    BellKind::ALL.iter().position(|&k| k == kind).unwrap() as u64
}

fn exact_distribution(
    scheme: SchemeKind,
    kind: BellKind,
    noise: Option<&NoiseConfig>,
) -> Result<Distribution, CliError> {
    match noise {
        None => Ok(ideal_distribution(scheme, kind)),
        Some(cfg) => noisy_distribution(scheme, kind, cfg).map_err(runtime),
    }
}

/// Runs the sampler for one input; the per-input seed offsets the base seed
/// by the input's index so an `all` run and four single runs agree.
fn run_sampler(
    exact: &Distribution,
    sampling: &Sampling,
    kind: BellKind,
) -> Result<(PnrConfig, bsm_core::detector::CountRecord, Option<Distribution>), CliError> {
    let pnr = PnrConfig {
        seed: sampling.pnr.seed.wrapping_add(kind_index(kind)),
        ..sampling.pnr
    };
    let record = sample(exact, &pnr, sampling.shots).map_err(runtime)?;
    let corrected = match correct_counts(&record, pnr.k) {
        Ok(dist) => Some(dist),
        Err(CoreError::EmptyDistribution) => None,
        Err(other) => return Err(runtime(other)),
    };
    Ok((pnr, record, corrected))
}

pub fn distribution(resolved: &Resolved) -> Result<(), CliError> {
    let kinds = resolved.input.kinds();
    let multi = matches!(resolved.input, InputSel::All);
    if multi && resolved.output.is_none() {
        return Err(CliError::Config(
            "--output is required when input is `all` (one artifact per state)".into(),
        ));
    }
    if resolved.format == Format::Csv && resolved.sampling.is_some() && resolved.output.is_none() {
        return Err(CliError::Config(
            "--output is required for csv artifacts with sampling".into(),
        ));
    }
    for kind in kinds {
        let exact = exact_distribution(resolved.scheme, kind, resolved.noise.as_ref())?;
        let target: Option<PathBuf> = resolved.output.as_ref().map(|path| {
            if multi { suffixed_path(path, kind_slug(kind)) } else { path.clone() }
        });
        let sampled = match &resolved.sampling {
            Some(s) => {
                let (pnr, record, corrected) = run_sampler(&exact, s, kind)?;
                Some(SamplingOut {
                    shots: s.shots,
                    seed: pnr.seed,
                    k: pnr.k,
                    eta: pnr.eta,
                    post_selected: record.post_selected,
                    raw_counts: record.raw.iter().map(|(k, n)| (k.to_string(), *n)).collect(),
                    corrected: corrected.as_ref().map(rounded_map),
                })
            }
            None => None,
        };
        match resolved.format {
            Format::Json => {
                let out = DistributionOut {
                    schema_version: SCHEMA_VERSION,
                    command: "distribution",
                    scheme: resolved.scheme.token().to_string(),
                    input: kind.token().to_string(),
                    mode_order: resolved
                        .scheme
                        .detection_labels()
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                    noise: resolved.noise,
                    probabilities: rounded_map(&exact),
                    sampling: sampled,
                };
                write_json(target.as_deref(), &out)?;
            }
            Format::Csv => {
                write_distribution_csv(target.as_deref(), &rounded_map(&exact))?;
                if let (Some(s), Some(base)) = (&sampled, &target) {
                    let mut raw = String::from("pattern,count\n");
                    for (key, n) in &s.raw_counts {
                        raw.push_str(&format!("{},{n}\n", csv_pattern(key)));
                    }
                    write_bytes(Some(&suffixed_path(base, "raw")), raw.as_bytes())?;
                    if let Some(corr) = &s.corrected {
                        write_distribution_csv(Some(&suffixed_path(base, "corrected")), corr)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn write_distribution_csv(
    target: Option<&Path>,
    dist: &BTreeMap<String, f64>,
) -> Result<(), CliError> {
    let mut text = String::from("pattern,probability\n");
    for (key, p) in dist {
        text.push_str(&format!("{},{p}\n", csv_pattern(key)));
    }
    write_bytes(target, text.as_bytes())
}

pub fn metrics(resolved: &Resolved) -> Result<(), CliError> {
    let table = build_classifier(resolved.scheme, TABLE_TOLERANCE);
    let ideal = ideal_distributions(resolved.scheme);
    let mut eval = BTreeMap::new();
    for kind in BellKind::ALL {
        eval.insert(kind, exact_distribution(resolved.scheme, kind, resolved.noise.as_ref())?);
    }
    let exact_report = compute_report(&eval, &ideal, &table).map_err(runtime)?;

    let sampled = match &resolved.sampling {
        Some(s) => {
            let mut corrected = BTreeMap::new();
            for kind in BellKind::ALL {
                let (pnr, _, corr) = run_sampler(&eval[&kind], s, kind)?;
                let corr = corr.ok_or_else(|| {
                    CliError::Runtime(anyhow::anyhow!(
                        "no post-selected events for input {} (eta {}, {} shots)",
                        kind,
                        pnr.eta,
                        s.shots
                    ))
                })?;
                corrected.insert(kind, corr);
            }
            let report = compute_report(&corrected, &ideal, &table).map_err(runtime)?;
            Some(SampledReportOut {
                shots: s.shots,
                seed: s.pnr.seed,
                k: s.pnr.k,
                eta: s.pnr.eta,
                report: (&report).into(),
            })
        }
        None => None,
    };

    let out = MetricsOut {
        schema_version: SCHEMA_VERSION,
        command: "metrics",
        scheme: resolved.scheme.token().to_string(),
        noise: resolved.noise,
        exact: (&exact_report).into(),
        sampled,
        reference: ReferenceOut::table(),
    };
    match resolved.format {
        Format::Json => write_json(resolved.output.as_deref(), &out),
        Format::Csv => {
            write_metrics_csv(resolved.output.as_deref(), &out.exact)?;
            if let (Some(s), Some(base)) = (&out.sampled, &resolved.output) {
                write_metrics_csv(Some(&suffixed_path(base, "sampled")), &s.report)?;
            }
            Ok(())
        }
    }
}

fn write_metrics_csv(target: Option<&Path>, report: &ReportOut) -> Result<(), CliError> {
    let mut text = String::from("state,p_correct,p_false,p_ambiguous,mdf,tvd\n");
    let row = |name: &str, m: &MetricsValues| {
        let mdf = m.mdf.map(|v| v.to_string()).unwrap_or_default();
        format!("{name},{},{},{},{mdf},{}\n", m.p_correct, m.p_false, m.p_ambiguous, m.tvd)
    };
    for (name, m) in &report.per_state {
        text.push_str(&row(name, m));
    }
    text.push_str(&row("average", &report.average));
    write_bytes(target, text.as_bytes())
}

pub fn classify_table(resolved: &Resolved) -> Result<(), CliError> {
    let table = build_classifier(resolved.scheme, TABLE_TOLERANCE);
    let rows: BTreeMap<String, TableRowOut> = table
        .rows()
        .iter()
        .map(|(pattern, row)| {
            (
                pattern.to_string(),
                TableRowOut {
                    label: row.label.token().to_string(),
                    probability: row
                        .probability
                        .iter()
                        .map(|(k, p)| (k.token().to_string(), round_sig(*p)))
                        .collect(),
                },
            )
        })
        .collect();
    let out = TableOut {
        schema_version: SCHEMA_VERSION,
        command: "classify_table",
        scheme: resolved.scheme.token().to_string(),
        tolerance: table.tolerance(),
        mode_order: resolved.scheme.detection_labels().iter().map(|s| s.to_string()).collect(),
        rows,
    };
    match resolved.format {
        Format::Json => write_json(resolved.output.as_deref(), &out),
        Format::Csv => {
            let mut text =
                String::from("pattern,label,p_psi_plus,p_psi_minus,p_phi_plus,p_phi_minus\n");
            for (pattern, row) in &out.rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    csv_pattern(pattern),
                    row.label,
                    row.probability["psi+"],
                    row.probability["psi-"],
                    row.probability["phi+"],
                    row.probability["phi-"],
                ));
            }
            write_bytes(resolved.output.as_deref(), text.as_bytes())
        }
    }
}

pub fn relay(args: &RelayArgs, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    if args.n_max == 0 {
        return Err(CliError::Config("n-max must be at least 1".into()));
    }
    let model = if args.memory { RelayModel::MemoryAssisted } else { RelayModel::Memoryless };
    let mut curves = preset_curves(args.n_max, model).map_err(runtime)?;
    for (i, &p_c) in args.p_c.iter().enumerate() {
        let label = format!("user_{}", i + 1);
        curves.push(curve(label, p_c, args.n_max, model).map_err(|e| CliError::Config(e.to_string()))?);
    }
    let out = RelayOut {
        schema_version: SCHEMA_VERSION,
        command: "relay",
        model: match model {
            RelayModel::Memoryless => "memoryless",
            RelayModel::MemoryAssisted => "memory_assisted",
        },
        n_max: args.n_max,
        curves: curves.iter().map(RelayCurveOut::from).collect(),
    };
    match format {
        Format::Json => write_json(output, &out),
        Format::Csv => {
            let Some(base) = output else {
                return Err(CliError::Config(
                    "--output is required for csv relay curves (one file per curve)".into(),
                ));
            };
            for curve in &out.curves {
                let mut text = String::from("n,success\n");
                for point in &curve.points {
                    text.push_str(&format!("{},{}\n", point.n, point.success));
                }
                write_bytes(Some(&suffixed_path(base, &curve.label)), text.as_bytes())?;
            }
            Ok(())
        }
    }
}
