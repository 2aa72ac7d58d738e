//! The five batch pipelines. Each consumes a validated job configuration,
//! runs deterministically (fixed summation orders, no randomness), and
//! writes its artifacts atomically.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use qpspectra::approximation::{assemble_series, plan_series, SeriesPlan};
use qpspectra::error::Error as QpError;
use qpspectra::operators::grid_for_symbol;
use qpspectra::spaces::{
    auto_t_max, fourier_norm, inverse_cayley, pw_forward, GridFunction, HalfPlaneGrid,
    TransformRule,
};
use qpspectra::spectra::{
    essential_normality_diag, essential_spectrum_formula, residual_check, vmo_profile,
    SpectrumSet,
};
use qpspectra::symbols::{
    essential_range_exppoly, essential_range_sampled, ExpPolySymbol, RangeCloud,
    SampledBoundarySymbol,
};
use qpspectra::validate;

use crate::config::{JobConfig, OutputFormat, SymbolField, TMax};
use crate::render;
use crate::report::{
    strip_timings, CriterionEcho, ErrorBudget, OperatorSummary, PlanEcho, RangeSummary, Report,
    ResidualEntry, SpectrumSummary, Tagged, VmoSummary,
};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Anything the pipelines can fail with, keeping enough structure for the
/// exit-code mapping.
#[derive(Debug)]
pub enum PipelineError {
    Config(String),
    Qp(QpError),
    Io(std::io::Error),
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineError::Config(m) => write!(f, "config error: {m}"),
            PipelineError::Qp(e) => write!(f, "{e}"),
            PipelineError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<QpError> for PipelineError {
    fn from(e: QpError) -> Self {
        PipelineError::Qp(e)
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Io(e)
    }
}

/// Exit code for an error, per the documented contract: 2 config, 3
/// infeasible symbol, 4 incommensurable grids, 1 anything else.
pub fn exit_code(err: &PipelineError) -> i32 {
    match err {
        PipelineError::Config(_) => 2,
        PipelineError::Qp(e) => match e {
            QpError::InvalidSymbol { .. }
            | QpError::InvalidFrequency { .. }
            | QpError::InfeasibleEnclosure { .. }
            | QpError::RangePointNotInUpperHalfPlane { .. } => 3,
            QpError::IncommensurableShift { .. }
            | QpError::IncommensurableFrequencies { .. }
            | QpError::NonUniformGrid => 4,
            _ => 1,
        },
        PipelineError::Io(_) => 1,
    }
}

pub struct Job {
    pub config: JobConfig,
    pub config_sha256: String,
    pub out_dir: PathBuf,
    pub seed_grid: Option<f64>,
}

impl Job {
    fn exppoly(&self) -> Result<ExpPolySymbol, PipelineError> {
        match &self.config.symbol {
            SymbolField::Spec(spec) => Ok(ExpPolySymbol::try_from(spec)?),
            SymbolField::SamplesFile { .. } => Err(PipelineError::Config(
                "symbol: this pipeline needs inline coefficients, not a samples file".into(),
            )),
        }
    }

    fn boundary_samples(&self) -> Result<SampledBoundarySymbol, PipelineError> {
        match &self.config.symbol {
            SymbolField::Spec(spec) => {
                let psi = ExpPolySymbol::try_from(spec)?;
                let n_max = self
                    .config
                    .range
                    .n_schedule
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max);
                let x_max = (2.0 * n_max).max(1e4);
                Ok(SampledBoundarySymbol::from_fn(
                    |x| psi.boundary_value(x),
                    x_max,
                    1500,
                )?)
            }
            SymbolField::SamplesFile { samples } => read_samples(samples),
        }
    }

    fn operator_grid(
        &self,
        psi: &ExpPolySymbol,
        plan: &SeriesPlan,
    ) -> Result<Arc<HalfPlaneGrid>, PipelineError> {
        let t_max = match self.config.grid.t_max {
            TMax::Value(v) => v,
            TMax::Keyword(_) => auto_t_max(plan.beta),
        };
        if let Some(dt) = self.seed_grid {
            if !(dt > 0.0) {
                return Err(PipelineError::Config(format!(
                    "--seed-grid: spacing must be positive, got {dt}"
                )));
            }
            let n = (t_max / dt).ceil().max(2.0) as usize;
            // Commensurability of every term shift with the seeded spacing.
            for &(_, gamma) in psi.terms() {
                let steps = gamma / (TWO_PI * plan.p) / dt;
                if (steps - steps.round()).abs() > 1e-12 * steps.max(1.0) {
                    return Err(PipelineError::Qp(QpError::IncommensurableShift {
                        t0: gamma / (TWO_PI * plan.p),
                        dt,
                        suggestion: steps.round() * dt,
                    }));
                }
            }
            Ok(Arc::new(HalfPlaneGrid::uniform(
                self.config.alpha,
                dt,
                n,
            )?))
        } else {
            // Grid snapped to the dilated symbol's shift lengths.
            let dilated = ExpPolySymbol::new(
                psi.c0(),
                psi.terms()
                    .iter()
                    .map(|&(c, g)| (c, g / plan.p))
                    .collect(),
            )?;
            Ok(grid_for_symbol(
                &dilated,
                self.config.alpha,
                self.config.grid.t_count,
                t_max,
            )?)
        }
    }

    fn report_base(&self, subcommand: &str) -> Report {
        Report::new(subcommand, self.config_sha256.clone())
    }

    fn write_json(&self, report: &Report) -> Result<(), PipelineError> {
        if self.config.outputs.wants(OutputFormat::Json) {
            let body = serde_json::to_string_pretty(report)
                .map_err(|e| PipelineError::Config(e.to_string()))? + "\n";
            render::write_atomic(&self.out_dir.join("report.json"), body.as_bytes())?;
        }
        Ok(())
    }

    fn write_csv(&self, name: &str, body: &str) -> Result<(), PipelineError> {
        if self.config.outputs.wants(OutputFormat::Csv) {
            render::write_atomic(&self.out_dir.join(name), body.as_bytes())?;
        }
        Ok(())
    }

    fn write_svg(&self, name: &str, body: &str) -> Result<(), PipelineError> {
        if self.config.outputs.wants(OutputFormat::Svg) {
            render::write_atomic(&self.out_dir.join(name), body.as_bytes())?;
        }
        Ok(())
    }
}

fn read_samples(path: &Path) -> Result<SampledBoundarySymbol, PipelineError> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("x,") {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64, PipelineError> {
            s.ok_or_else(|| {
                PipelineError::Config(format!("samples file line {}: expected x,re,im", lineno + 1))
            })?
            .trim()
            .parse::<f64>()
            .map_err(|e| PipelineError::Config(format!("samples file line {}: {e}", lineno + 1)))
        };
        xs.push(parse(parts.next())?);
        let re = parse(parts.next())?;
        let im = parse(parts.next())?;
        values.push(Complex64::new(re, im));
    }
    Ok(SampledBoundarySymbol::from_samples(xs, values)?)
}

fn range_cloud(job: &Job) -> Result<RangeCloud, PipelineError> {
    let eps = job.config.range.epsilon;
    match &job.config.symbol {
        SymbolField::Spec(spec) => {
            let psi = ExpPolySymbol::try_from(spec)?;
            Ok(essential_range_exppoly(&psi, eps)?)
        }
        SymbolField::SamplesFile { .. } => {
            let sampled = job.boundary_samples()?;
            Ok(essential_range_sampled(
                &sampled,
                eps,
                &job.config.range.n_schedule,
            )?)
        }
    }
}

/// `range`: occupancy estimate of the local essential range at infinity.
pub fn run_range(job: &Job) -> Result<i32, PipelineError> {
    let sampled = job.boundary_samples()?;
    let cloud = essential_range_sampled(
        &sampled,
        job.config.range.epsilon,
        &job.config.range.n_schedule,
    )?;
    let rows: Vec<(Complex64, &str)> = cloud.points.iter().map(|&p| (p, "range")).collect();
    job.write_csv("range.csv", &render::csv_points(&rows))?;
    job.write_svg(
        "range.svg",
        &render::svg_scatter(&cloud.points, "local essential range at infinity"),
    )?;
    let mut report = job.report_base("range");
    report.range = Some(RangeSummary {
        cell_count: cloud.points.len(),
        epsilon: cloud.epsilon,
        window_depth: cloud.n_max,
    });
    job.write_json(&report)?;
    Ok(0)
}

/// `spectrum`: the essential-spectrum formula over the symbol's range.
pub fn run_spectrum(job: &Job) -> Result<i32, PipelineError> {
    let cloud = range_cloud(job)?;
    let min_im = cloud
        .points
        .iter()
        .map(|z| z.im)
        .fold(f64::INFINITY, f64::min);
    if !(min_im > 0.0) {
        return Err(PipelineError::Qp(QpError::RangePointNotInUpperHalfPlane {
            point: "range cloud reaches the closed lower half-plane".into(),
        }));
    }
    // Tiny headroom so the default survives the round-trip through the
    // decay check's multiplication.
    let t_max = job
        .config
        .spectrum
        .t_max
        .unwrap_or(30.0 * (1.0 + 1e-9) / (TWO_PI * min_im));
    let set: SpectrumSet =
        essential_spectrum_formula(&cloud, t_max, job.config.spectrum.t_count)?;
    let mut rows: Vec<(Complex64, &str)> = Vec::with_capacity(set.points.len());
    for (i, &p) in set.points.iter().enumerate() {
        let tag = if i + 1 == set.points.len() { "zero" } else { "spectrum" };
        rows.push((p, tag));
    }
    job.write_csv("spectrum.csv", &render::csv_points(&rows))?;
    job.write_svg(
        "spectrum.svg",
        &render::svg_spectrum(&set.parametric, "essential spectrum: exp(2 pi i z t) curves"),
    )?;
    let mut report = job.report_base("spectrum");
    report.range = Some(RangeSummary {
        cell_count: cloud.points.len(),
        epsilon: cloud.epsilon,
        window_depth: cloud.n_max,
    });
    report.spectrum = Some(SpectrumSummary {
        range_cells: cloud.points.len(),
        point_count: set.points.len(),
        t_max: set.t_max,
        t_count: set.t_count,
    });
    job.write_json(&report)?;
    Ok(0)
}

/// Measured transform round-trip error on the operator grid; the
/// discretization line of the error budget.
fn discretization_estimate(grid: &Arc<HalfPlaneGrid>) -> Result<f64, PipelineError> {
    let alpha = grid.alpha();
    let f = GridFunction::from_fn(grid.clone(), |t| {
        Complex64::new(t.powf(alpha + 1.0) * (-TWO_PI * t).exp(), 0.0)
    });
    let dt = match grid.spacing() {
        Some(dt) => dt,
        None => return Ok(f64::NAN),
    };
    let rule = TransformRule::for_uniform_grid(alpha, dt, grid.t_max())?;
    let samples = rule.sample_pw_inverse(&f);
    let back = pw_forward(&samples, &rule, grid.clone())?;
    let diff = GridFunction::from_values(
        grid.clone(),
        back.values()
            .iter()
            .zip(f.values())
            .map(|(&a, &b)| a - b)
            .collect(),
    )?;
    Ok(fourier_norm(&diff) / fourier_norm(&f))
}

/// `series`: plan, assemble, and summarize the operator with its two-line
/// error budget and residual table.
pub fn run_series(job: &Job) -> Result<i32, PipelineError> {
    let psi = job.exppoly()?;
    let plan = plan_series(
        &psi,
        job.config.p,
        job.config.alpha,
        job.config.series.eps_target,
    )?;
    let grid = job.operator_grid(&psi, &plan)?;
    let op = assemble_series(&plan, &psi, grid.clone())?;
    let norm = op.weighted_norm()?;
    let decay = essential_normality_diag(&op)?;
    let q_est = discretization_estimate(&grid)?;

    // Residual table over the enclosure circle.
    let enclosure = psi.image_enclosure();
    let width = grid.spacing().map(|dt| 10.0 * dt).unwrap_or(0.05);
    let mut residuals = Vec::new();
    let t_lo = 0.25 * grid.t_max();
    let t_hi = 0.75 * grid.t_max();
    for i in 0..5 {
        let t0 = t_lo + (t_hi - t_lo) * i as f64 / 4.0;
        for k in 0..8 {
            let th = TWO_PI * k as f64 / 8.0;
            let z = enclosure.center
                + Complex64::from_polar(enclosure.radius.max(1e-12), th);
            let r = residual_check(&op, z, t0, width)?;
            residuals.push(ResidualEntry {
                t0,
                z: [z.re, z.im],
                residual: Tagged::new(r, 0.05),
            });
        }
    }

    let mut report = job.report_base("series");
    report.plan = Some(PlanEcho {
        beta: Tagged::new(plan.beta, 1e-9),
        delta: Tagged::new(plan.delta, 1e-9),
        m: plan.m,
        tail: Tagged::new(plan.tail, job.config.series.eps_target),
        p: plan.p,
        alpha: plan.alpha,
    });
    report.error_budget = Some(ErrorBudget {
        analytic_tail: Tagged::new(plan.tail, job.config.series.eps_target),
        discretization_estimate: Tagged::new(q_est, 1e-4),
    });
    report.operator = Some(OperatorSummary {
        dim: op.dim(),
        t_max: grid.t_max(),
        dt: grid.spacing(),
        weighted_norm: Tagged::new(norm, 1e-8),
        commutator_head_tail_ratio: Tagged::new(decay.ratio, 10.0),
        exact_assembly: op.is_exact(),
    });
    report.residual_table = Some(residuals);
    job.write_json(&report)?;
    Ok(0)
}

/// `vmo`: mean-oscillation profile of the disk transport of the symbol.
pub fn run_vmo(job: &Job) -> Result<i32, PipelineError> {
    let psi = job.exppoly()?;
    let r_levels = [0.9, 0.99, 0.999, 0.9999];
    let profile = vmo_profile(
        |w| {
            let z = inverse_cayley(w).expect("interior points only");
            psi.eval(z)
        },
        &r_levels,
        16,
    )?;
    // CSV rows keep the shared schema: re = r, im = value.
    let rows: Vec<(Complex64, &str)> = profile
        .r_levels
        .iter()
        .zip(&profile.values)
        .map(|(&r, &v)| (Complex64::new(r, v), "vmo"))
        .collect();
    job.write_csv("vmo.csv", &render::csv_points(&rows))?;
    let xs: Vec<f64> = profile.r_levels.iter().map(|&r| 1.0 - r).collect();
    job.write_svg(
        "vmo.svg",
        &render::svg_loglog(&xs, &profile.values, "mean oscillation vs 1-r"),
    )?;

    let slope = {
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(&profile.values)
            .filter(|(&x, &y)| x > 0.0 && y > 0.0)
            .map(|(&x, &y)| (x.ln(), y.ln()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        if n >= 2.0 && (n * sxx - sx * sx).abs() > 1e-30 {
            (n * sxy - sx * sy) / (n * sxx - sx * sx)
        } else {
            f64::NAN
        }
    };
    let mut report = job.report_base("vmo");
    report.vmo = Some(VmoSummary {
        r_levels: profile.r_levels.clone(),
        values: profile.values.clone(),
        log_log_slope: slope,
    });
    job.write_json(&report)?;
    Ok(0)
}

/// `validate`: the full acceptance suite, parallelized up to the
/// `QPSPECTRA_THREADS` cap, with a deterministic report.
pub fn run_validate(job: &Job) -> Result<i32, PipelineError> {
    let threads = std::env::var("QPSPECTRA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get().min(4))
                .unwrap_or(1)
        });
    let jobs: Vec<fn() -> validate::CriterionReport> = vec![
        validate::criterion_1,
        validate::criterion_2,
        validate::criterion_3,
        validate::criterion_4,
        validate::criterion_5,
        validate::criterion_6,
        validate::criterion_7,
        validate::criterion_8,
        validate::criterion_9,
        validate::criterion_10,
    ];
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<validate::CriterionReport>> = (0..jobs.len()).map(|_| None).collect();
    let slot_refs: Vec<std::sync::Mutex<&mut Option<validate::CriterionReport>>> =
        slots.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(jobs.len()) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= jobs.len() {
                    break;
                }
                let result = jobs[idx]();
                **slot_refs[idx].lock().expect("slot lock") = Some(result);
            });
        }
    });
    let reports: Vec<validate::CriterionReport> =
        slots.into_iter().map(|s| s.expect("criterion ran")).collect();

    let mut all_passed = true;
    for r in &reports {
        println!("{}", r.summary());
        all_passed &= r.passed;
    }
    let mut report = job.report_base("validate");
    report.criteria = Some(
        reports
            .iter()
            .map(|r| CriterionEcho {
                index: r.index,
                name: r.name.to_string(),
                passed: r.passed,
                details: strip_timings(&r.details),
            })
            .collect(),
    );
    job.write_json(&report)?;
    Ok(if all_passed { 0 } else { 5 })
}
