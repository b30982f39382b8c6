//! The analyze, entropy, and sparsify subcommands.
//!
//! Each command reads CSV input, runs the corresponding library entry
//! point, and emits either a JSON envelope (`schema_version` 1) or flat
//! CSV rows. Exit codes follow the crate contract: 0 with every asserted
//! bound met, 1 when a measured value violates one, 2 on usage or input
//! errors.

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use kerndict::{
    build_gram, certify_gram, diversity_report_from_gram, entropy_floors_gram,
    feature_distance_floor, feature_entropy_floors, feature_plug_ins_loo, min_feature_distance,
    parzen_input, quadratic_entropy_gaussian, quadratic_entropy_general_from_gram, renyi_entropy,
    run_stream, tsallis_entropy, Certification, Criterion, CriterionKind, Dictionary, Direction,
    DiversityReport, EntropyReport, Error, FloorCheck, FloorContext, FloorMeasure, GramMatrix,
    KernelFamily, KernelSpec, NormBounds, Provenance, SparsifyTrace, WindowFamily, WindowSpec,
    CERTIFICATE_TOLERANCE,
};
use serde_json::json;

use crate::{
    io, requested_jitter, AnalyzeArgs, EntropyArgs, Format, Identity, Space, SparsifyArgs,
};

/// Top-level version field of every JSON envelope.
pub const SCHEMA_VERSION: u32 = 1;

// ==== shared plumbing =====================================================

fn parse_kernel(raw: &str) -> Result<KernelSpec> {
    Ok(raw.parse::<KernelSpec>()?)
}

pub(crate) fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

pub(crate) fn json_line(value: serde_json::Value) -> String {
    format!("{value:#}\n")
}

pub(crate) fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| anyhow::anyhow!("flushing csv: {e}"))?;
    String::from_utf8(bytes).context("csv output is not utf-8")
}

pub(crate) fn str_row(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn cell(v: f64) -> String {
    format!("{v}")
}

fn direction_cell(d: Direction) -> &'static str {
    match d {
        Direction::Upper => "upper",
        Direction::Lower => "lower",
    }
}

// ==== analyze =============================================================

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    let jitter = requested_jitter()?;
    let spec = parse_kernel(&args.kernel)?;
    let (k, nb, mode) = if args.gram {
        let k = io::read_gram(&args.input)?;
        let nb = bounds_from_diagonal(&k);
        (k, nb, "gram")
    } else {
        let points = io::read_points(&args.input)?;
        let dict = Dictionary::new(points, spec)?;
        let k = build_gram(&dict)?;
        let nb = dict.spec().norm_bounds(Some(dict.atoms()))?;
        if let Some(path) = &args.export_gram {
            io::write_gram(path, &k)?;
        }
        (k, nb, "points")
    };
    let report = diversity_report_from_gram(&k, jitter)?;
    let certification = certify_gram(&k, &nb, jitter)?;
    let all_satisfied = certification.all_satisfied();
    let content = match args.format {
        Format::Json => json_line(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "analyze",
            "input": args.input.display().to_string(),
            "mode": mode,
            "kernel": spec.to_string(),
            "jitter_requested": jitter,
            "norm_bounds": nb,
            "report": report,
            "certificates": certification.certificates,
            "skipped": certification.skipped,
            "all_satisfied": all_satisfied,
        })),
        Format::Csv => analyze_csv(&report, &certification)?,
    };
    io::emit(args.output.as_ref(), &content)?;
    Ok(exit_for(all_satisfied))
}

/// Norm bounds read off a supplied Gram matrix: the diagonal extremes,
/// flagged empirical since nothing is known beyond the matrix itself.
fn bounds_from_diagonal(k: &GramMatrix) -> NormBounds {
    let mut r2 = f64::INFINITY;
    let mut big_r2 = f64::NEG_INFINITY;
    for i in 0..k.n() {
        r2 = r2.min(k.diag(i));
        big_r2 = big_r2.max(k.diag(i));
    }
    NormBounds { r2, big_r2, provenance: Provenance::Empirical }
}

fn analyze_csv(report: &DiversityReport, certification: &Certification) -> Result<String> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.push(str_row(&[
        "record", "name", "value", "bound", "measured", "direction", "satisfied", "notes",
    ]));
    let measures = [
        ("cardinality", report.cardinality as f64),
        ("distance_delta", report.distance_delta),
        ("approximation_delta", report.approximation_delta),
        ("coherence_gamma", report.coherence_gamma),
        ("babel_gamma", report.babel_gamma),
        ("jitter_used", report.jitter_used),
    ];
    for (name, value) in measures {
        let mut row = vec!["measure".to_string(), name.to_string(), cell(value)];
        row.resize(8, String::new());
        rows.push(row);
    }
    for cert in &certification.certificates {
        rows.push(vec![
            "certificate".to_string(),
            cert.name.to_string(),
            String::new(),
            cell(cert.bound_value),
            cell(cert.measured_value),
            direction_cell(cert.direction).to_string(),
            cert.satisfied.to_string(),
            String::new(),
        ]);
    }
    for skip in &certification.skipped {
        let mut row = vec!["skipped".to_string(), skip.name.to_string()];
        row.resize(7, String::new());
        row.push(skip.reason.clone());
        rows.push(row);
    }
    csv_string(rows)
}

// ==== entropy =============================================================

pub fn cmd_entropy(args: &EntropyArgs) -> Result<ExitCode> {
    let jitter = requested_jitter()?;
    let spec = parse_kernel(&args.kernel)?;
    let points = io::read_points(&args.input)?;
    let dict = Dictionary::new(points, spec)?;
    if dict.n() < 2 {
        bail!("pairwise measure undefined: dictionary has {} atom(s), need at least 2", dict.n());
    }
    let k = build_gram(&dict)?;
    let report = match args.space {
        Space::Input => input_entropy(args, &dict, &k, jitter)?,
        Space::Feature => feature_entropy(args, &dict, &k, jitter)?,
    };
    let content = match args.format {
        Format::Json => json_line(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "entropy",
            "input": args.input.display().to_string(),
            "kernel": spec.to_string(),
            "jitter_requested": jitter,
            "report": report,
        })),
        Format::Csv => entropy_csv(&report)?,
    };
    io::emit(args.output.as_ref(), &content)?;
    Ok(exit_for(report.all_bounds_met))
}

/// Parzen window used for the plug-in estimates: gaussian with the
/// kernel's own bandwidth (families without a length scale carry
/// `sigma = 1`).
fn input_window(spec: &KernelSpec, dim: usize) -> Result<WindowSpec> {
    Ok(WindowSpec::new(WindowFamily::Gaussian, spec.sigma, None, dim)?)
}

fn atom_plug_ins(dict: &Dictionary) -> Result<Vec<f64>> {
    let window = input_window(dict.spec(), dict.dim())?;
    (0..dict.n()).map(|i| Ok(parzen_input(dict, &window, dict.atom(i))?)).collect()
}

fn normalized(plug_ins: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = plug_ins.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        bail!("plug-in masses sum to {total}; cannot normalize");
    }
    Ok(plug_ins.iter().map(|&p| p / total).collect())
}

/// Report for the order-parameterized estimators, which carry no floors.
fn plug_in_report(
    estimator: &str,
    alpha: Option<f64>,
    q: Option<f64>,
    space: &str,
    value: f64,
) -> EntropyReport {
    EntropyReport {
        estimator: estimator.to_string(),
        alpha,
        q,
        space: space.to_string(),
        value,
        lower_bounds: Vec::new(),
        all_bounds_met: true,
        warnings: vec!["no floors are stated for this estimator; the value is unchecked".into()],
    }
}

fn floor_check(measure: &str, floor: f64, value: f64) -> FloorCheck {
    FloorCheck { measure: measure.to_string(), floor, met: value + CERTIFICATE_TOLERANCE >= floor }
}

fn input_entropy(
    args: &EntropyArgs,
    dict: &Dictionary,
    k: &GramMatrix,
    jitter: f64,
) -> Result<EntropyReport> {
    if args.identity.is_some() && (args.alpha.is_some() || args.q.is_some()) {
        bail!("--identity selects the quadratic estimator and conflicts with --alpha and --q");
    }
    if let Some(q) = args.q {
        let plug_ins = normalized(&atom_plug_ins(dict)?)?;
        let value = tsallis_entropy(&plug_ins, q)?;
        return Ok(plug_in_report("tsallis", None, Some(q), "input", value));
    }
    if let Some(alpha) = args.alpha {
        let plug_ins = atom_plug_ins(dict)?;
        let value = renyi_entropy(&plug_ins, alpha, true)?;
        return Ok(plug_in_report("renyi", Some(alpha), None, "input", value));
    }
    let identity = args.identity.unwrap_or(match dict.spec().family {
        KernelFamily::Gaussian => Identity::Gaussian,
        _ => Identity::General,
    });
    let (estimator, value, context) = match identity {
        Identity::Gaussian => {
            if dict.spec().family != KernelFamily::Gaussian {
                bail!(
                    "the gaussian quadratic identity needs a gaussian kernel, got '{}'",
                    dict.spec()
                );
            }
            let sigma = dict.spec().sigma;
            (
                "quadratic-gaussian",
                quadratic_entropy_gaussian(dict, sigma)?,
                FloorContext::Gaussian { dim: dict.dim(), sigma },
            )
        }
        Identity::General => (
            "quadratic-general",
            quadratic_entropy_general_from_gram(k)?,
            FloorContext::General,
        ),
    };
    let nb = dict.spec().norm_bounds(Some(dict.atoms()))?;
    let (_, floors) = entropy_floors_gram(k, &nb, &context, jitter)?;
    let lower_bounds: Vec<FloorCheck> =
        floors.iter().map(|f| floor_check(f.measure, f.floor, value)).collect();
    let all_bounds_met = lower_bounds.iter().all(|c| c.met);
    Ok(EntropyReport {
        estimator: estimator.to_string(),
        alpha: Some(2.0),
        q: None,
        space: "input".to_string(),
        value,
        lower_bounds,
        all_bounds_met,
        warnings: Vec::new(),
    })
}

fn feature_entropy(
    args: &EntropyArgs,
    dict: &Dictionary,
    k: &GramMatrix,
    jitter: f64,
) -> Result<EntropyReport> {
    if args.identity.is_some() {
        bail!("--identity applies only to --space input");
    }
    let window = input_window(dict.spec(), dict.dim())?;
    let plug_ins = feature_plug_ins_loo(k, &window)?;
    if let Some((i, &p)) = plug_ins.iter().enumerate().find(|&(_, &p)| !(p > 0.0)) {
        bail!(
            "leave-one-out plug-in {i} underflowed to {p}; the atoms are too spread \
             out for window bandwidth {}, try a larger sigma",
            window.sigma
        );
    }
    let epsilon = min_feature_distance(k)?;
    if let Some(q) = args.q {
        let value = tsallis_entropy(&normalized(&plug_ins)?, q)?;
        return Ok(plug_in_report("tsallis", None, Some(q), "feature", value));
    }
    let alpha = args.alpha.unwrap_or(2.0);
    let value = renyi_entropy(&plug_ins, alpha, false)?;
    let mut lower_bounds = Vec::new();
    let mut warnings = Vec::new();
    if alpha > 1.0 {
        let (checks, mut notes) =
            feature_floor_checks(dict, k, &window, epsilon, alpha, value, jitter)?;
        lower_bounds = checks;
        warnings.append(&mut notes);
    } else if alpha == 1.0 {
        shannon_reference_note(k.n(), epsilon, &window, &mut warnings)?;
    } else {
        warnings.push("no floors are stated for Renyi orders below 1".to_string());
    }
    let all_bounds_met = lower_bounds.iter().all(|c| c.met);
    Ok(EntropyReport {
        estimator: "renyi".to_string(),
        alpha: Some(alpha),
        q: None,
        space: "feature".to_string(),
        value,
        lower_bounds,
        all_bounds_met,
        warnings,
    })
}

/// Floors for a feature-space Renyi estimate of order above 1: one at the
/// measured separation, plus one per diversity measure whose implied
/// separation is positive. Degenerate implied separations (Babel at or
/// above `r^2`, coherence at 1, duplicate atoms) downgrade to warnings.
fn feature_floor_checks(
    dict: &Dictionary,
    k: &GramMatrix,
    window: &WindowSpec,
    epsilon: f64,
    alpha: f64,
    value: f64,
    jitter: f64,
) -> Result<(Vec<FloorCheck>, Vec<String>)> {
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    if epsilon > 0.0 {
        let floors = feature_entropy_floors(k.n(), epsilon, window, alpha)?;
        checks.push(floor_check("separation", floors.renyi_floor, value));
    } else {
        warnings.push("duplicate atoms leave zero separation; no floor applies".to_string());
    }
    let report = diversity_report_from_gram(k, jitter)?;
    let nb = dict.spec().norm_bounds(Some(dict.atoms()))?;
    let derived = [
        ("approximation", FloorMeasure::Approximation, report.approximation_delta),
        ("babel", FloorMeasure::Babel, report.babel_gamma),
        ("coherence", FloorMeasure::Coherence, report.coherence_gamma),
    ];
    for (label, measure, measured) in derived {
        match feature_distance_floor(measure, measured, nb.r2, nb.big_r2) {
            Ok(eps) if eps > 0.0 => {
                let floors = feature_entropy_floors(k.n(), eps, window, alpha)?;
                checks.push(floor_check(
                    &format!("separation-from-{label}"),
                    floors.renyi_floor,
                    value,
                ));
            }
            Ok(_) => warnings
                .push(format!("{label} separation floor degenerate: zero implied separation")),
            Err(Error::FloorDegenerate { reason }) => {
                warnings.push(format!("{label} separation floor degenerate: {reason}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((checks, warnings))
}

/// The Shannon-form reference value is reported but never asserted: in
/// the monotone regime `w(eps) <= 1/e` it caps the plug-in sum from
/// above instead of flooring it.
fn shannon_reference_note(
    n: usize,
    epsilon: f64,
    window: &WindowSpec,
    warnings: &mut Vec<String>,
) -> Result<()> {
    if epsilon > 0.0 {
        let floors = feature_entropy_floors(n, epsilon, window, 2.0)?;
        let regime = if floors.monotone_regime { "inside" } else { "outside" };
        warnings.push(format!(
            "Shannon reference -n w log w = {} ({} the monotone regime w <= 1/e); \
             it is not asserted as a floor",
            floors.shannon_floor, regime
        ));
    } else {
        warnings.push("duplicate atoms leave zero separation; no reference applies".to_string());
    }
    Ok(())
}

fn entropy_csv(report: &EntropyReport) -> Result<String> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.push(str_row(&["record", "name", "value", "met", "notes"]));
    let order = match (report.alpha, report.q) {
        (Some(a), _) => format!("space={} alpha={a}", report.space),
        (None, Some(q)) => format!("space={} q={q}", report.space),
        (None, None) => format!("space={}", report.space),
    };
    rows.push(vec![
        "estimate".to_string(),
        report.estimator.clone(),
        cell(report.value),
        String::new(),
        order,
    ]);
    for check in &report.lower_bounds {
        rows.push(vec![
            "floor".to_string(),
            check.measure.clone(),
            cell(check.floor),
            check.met.to_string(),
            String::new(),
        ]);
    }
    for warning in &report.warnings {
        let mut row = vec!["warning".to_string()];
        row.resize(4, String::new());
        row.push(warning.clone());
        rows.push(row);
    }
    csv_string(rows)
}

// ==== sparsify ============================================================

pub fn cmd_sparsify(args: &SparsifyArgs) -> Result<ExitCode> {
    let jitter = requested_jitter()?;
    let spec = parse_kernel(&args.kernel)?;
    let kind: CriterionKind = args.criterion.parse()?;
    let criterion = Criterion::new(kind, args.threshold)?;
    let points = io::read_points(&args.input)?;
    let trace = run_stream(&criterion, &points, &spec, jitter)?;
    let content = match args.format {
        Format::Json => json_line(json!({
            "schema_version": SCHEMA_VERSION,
            "command": "sparsify",
            "input": args.input.display().to_string(),
            "kernel": spec.to_string(),
            "jitter_requested": jitter,
            "trace": trace,
        })),
        Format::Csv => sparsify_csv(&trace)?,
    };
    io::emit(args.output.as_ref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

fn sparsify_csv(trace: &SparsifyTrace) -> Result<String> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.push(str_row(&["step", "admitted", "score"]));
    for (step, &score) in trace.per_step_scores.iter().enumerate() {
        let admitted = trace.admitted.binary_search(&step).is_ok();
        rows.push(vec![step.to_string(), admitted.to_string(), cell(score)]);
    }
    csv_string(rows)
}
