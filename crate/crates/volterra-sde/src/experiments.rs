//! The batch experiment runner behind the CLI: each experiment writes a
//! CSV and a plain-text report into the output directory, and the run as a
//! whole echoes its resolved configuration and a gnuplot renderer script.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::config::{BuiltinIntegrand, RunConfig};
use crate::convolution::{
    apply_a_to_convolution, cauchy_reformulation, deterministic_cauchy_ode_residual,
    regularity_probe, stochastic_convolution, stochastic_convolution_ensemble,
};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::{check_complete_positivity, Kernel};
use crate::operator::{HVector, SpectralOperator};
use crate::resolvent::{build_resolvent, yosida_resolvent_convergence};
use crate::stochastic::{
    cross_orthogonality_test, ito_isometry_test, mean_and_stderr, ConstantIntegrand, Integrand,
    WienerBundle,
};
use crate::verify::{
    ito_consistency_tolerance, mild_weak_equivalence_check, strong_refinement_study,
    strong_solution_residual_ensemble, weak_solution_residual, yosida_strong_convergence_suite,
};

/// 17-significant-digit decimal formatting: f64 round-trips exactly, so
/// reruns produce byte-identical CSVs.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub name: String,
    pub pass: bool,
    pub summary: Vec<String>,
}

struct Ctx {
    config: RunConfig,
    kernel: Kernel,
    op: SpectralOperator,
    grid: TimeGrid,
    psi: BuiltinIntegrand,
}

impl Ctx {
    fn new(config: &RunConfig) -> Result<Ctx> {
        config.validate()?;
        let kernel = config.build_kernel()?;
        let op = config.build_operator()?;
        let grid = config.build_grid()?;
        let psi = config.build_integrand(&op)?;
        Ok(Ctx {
            config: config.clone(),
            kernel,
            op,
            grid,
            psi,
        })
    }

    fn writer(&self, filename: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(
            self.config.out_dir.join(filename),
        )?))
    }

    fn tolerance(&self) -> f64 {
        ito_consistency_tolerance(&self.grid, &self.op)
    }
}

/// Runs every configured experiment in order; returns true iff all passed.
pub fn run_all(config: &RunConfig, verbose: bool) -> Result<bool> {
    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(
        config.out_dir.join("config.resolved.toml"),
        config.to_toml(),
    )?;
    let ctx = Ctx::new(config)?;
    let mut all_pass = true;
    let mut names = Vec::new();
    for name in &config.experiments {
        let outcome = dispatch(name, &ctx)?;
        all_pass &= outcome.pass;
        names.push(outcome.name.clone());
        println!(
            "[{}] {}",
            if outcome.pass { "pass" } else { "FAIL" },
            outcome.name
        );
        if verbose {
            for line in &outcome.summary {
                println!("    {line}");
            }
        }
    }
    write_plot_script(&config.out_dir, &names)?;
    Ok(all_pass)
}

/// Runs a single named experiment (the subcommand entry point).
pub fn run_experiment(name: &str, config: &RunConfig, verbose: bool) -> Result<ExperimentOutcome> {
    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(
        config.out_dir.join("config.resolved.toml"),
        config.to_toml(),
    )?;
    let ctx = Ctx::new(config)?;
    let outcome = dispatch(name, &ctx)?;
    println!(
        "[{}] {}",
        if outcome.pass { "pass" } else { "FAIL" },
        outcome.name
    );
    if verbose {
        for line in &outcome.summary {
            println!("    {line}");
        }
    }
    write_plot_script(&config.out_dir, std::slice::from_ref(&outcome.name))?;
    Ok(outcome)
}

fn dispatch(name: &str, ctx: &Ctx) -> Result<ExperimentOutcome> {
    let outcome = match name {
        "resolvent" => resolvent_experiment(ctx),
        "cp-check" => cp_check_experiment(ctx),
        "convolve" => convolve_experiment(ctx),
        "ito-check" => ito_check_experiment(ctx),
        "verify-strong" => verify_strong_experiment(ctx),
        "verify-weak" => verify_weak_experiment(ctx),
        "verify-mild" => verify_mild_experiment(ctx),
        "yosida-suite" => yosida_suite_experiment(ctx),
        "cauchy" => cauchy_experiment(ctx),
        "regularity" => regularity_experiment(ctx),
        other => Err(Error::Config {
            field: "experiments".into(),
            message: format!("unknown experiment `{other}`"),
        }),
    }?;
    let mut report = ctx.writer(&format!("{name}.report.txt"))?;
    writeln!(report, "experiment: {}", outcome.name)?;
    writeln!(report, "status: {}", if outcome.pass { "pass" } else { "fail" })?;
    for line in &outcome.summary {
        writeln!(report, "{line}")?;
    }
    Ok(outcome)
}

fn outcome(name: &str, pass: bool, summary: Vec<String>) -> Result<ExperimentOutcome> {
    Ok(ExperimentOutcome {
        name: name.to_string(),
        pass,
        summary,
    })
}

fn uniform_vector(dim: usize) -> HVector {
    HVector::new(vec![1.0 / (dim as f64).sqrt(); dim])
}

fn resolvent_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let table = build_resolvent(&ctx.op, &ctx.kernel, &ctx.grid, None)?;
    table.export_csv(ctx.writer("resolvent.csv")?)?;

    let v = uniform_vector(ctx.op.dim());
    let residual = table.resolvent_equation_residual(&v)?;
    let residual_coarse = table.resolvent_equation_residual_coarse(&v)?;
    let commutation = table.commutation_check(&v)?;
    let (m, omega) = table.exponential_bound_fit();
    let s0_exact = (0..ctx.op.dim()).all(|k| table.scalar(k, 0) == 1.0);
    let yosida_errors =
        yosida_resolvent_convergence(&ctx.op, &ctx.kernel, &ctx.grid, &v, &ctx.config.yosida_n)?;
    let yosida_decreasing = yosida_errors.windows(2).all(|w| w[1] <= w[0]);

    let stiffness = ctx.op.eigenvalues().iter().map(|l| l.abs()).fold(0.0, f64::max);
    let residual_tol = 1e-8 * (1.0 + stiffness);
    let pass = residual <= residual_tol && commutation <= 1e-12 && s0_exact && yosida_decreasing;
    outcome(
        "resolvent",
        pass,
        vec![
            format!("residual on build grid: {residual:.3e} (tol {residual_tol:.3e})"),
            format!("residual on 2x coarser subgrid: {residual_coarse:.3e}"),
            format!("commutation |AS - SA|: {commutation:.3e} (tol 1e-12)"),
            format!("exponential bound fit: M = {m:.6}, omega = {omega:.6}"),
            format!("S(0) = I exactly: {s0_exact}"),
            format!(
                "Yosida sup-errors over n = {:?}: {:?} (decreasing: {yosida_decreasing})",
                ctx.config.yosida_n, yosida_errors
            ),
        ],
    )
}

fn cp_check_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let mut csv = ctx.writer("cp-check.csv")?;
    write!(csv, "t")?;
    for mu in &ctx.config.mu_values {
        write!(csv, ",s_mu_{mu},r_mu_{mu}")?;
    }
    writeln!(csv)?;

    let mut reports = Vec::new();
    for &mu in &ctx.config.mu_values {
        reports.push(check_complete_positivity(&ctx.kernel, mu, &ctx.grid)?);
    }
    for j in 0..ctx.grid.len() {
        write!(csv, "{}", fmt_float(ctx.grid.t(j)))?;
        for report in &reports {
            write!(
                csv,
                ",{},{}",
                fmt_float(report.s_values[j]),
                fmt_float(report.r_values[j])
            )?;
        }
        writeln!(csv)?;
    }

    let pass = reports.iter().all(|r| r.nonneg);
    let mut summary = Vec::new();
    for (report, &mu) in reports.iter().zip(&ctx.config.mu_values) {
        let s_min = report.s_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let r_min = report
            .r_values
            .iter()
            .filter(|v| v.is_finite())
            .cloned()
            .fold(f64::INFINITY, f64::min);
        summary.push(format!(
            "mu = {mu}: nonneg = {} (min s = {s_min:.3e}, min finite r = {r_min:.3e}, tol {})",
            report.nonneg, report.tol
        ));
    }
    outcome("cp-check", pass, summary)
}

fn convolve_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let table = build_resolvent(&ctx.op, &ctx.kernel, &ctx.grid, None)?;
    let set = stochastic_convolution_ensemble(&table, &ctx.psi, ctx.config.seed, ctx.config.noise.paths)?;
    set.summary_csv(ctx.writer("convolve.csv")?)?;

    let zero_start = (0..set.paths()).all(|p| set.value(p, 0).norm_h() == 0.0);
    let witness_max = (0..set.paths())
        .map(|p| set.trajectory_l2_sq(p))
        .fold(0.0_f64, f64::max);

    // isometry transfer at the terminal time: the discrete convolution's
    // exact second moment is sum_i sum_l |S(T - t_l) Psi_i(t_l)|^2 dt
    let steps = ctx.grid.steps();
    let probe = WienerBundle::sample(&ctx.grid, ctx.psi.modes(), ctx.config.seed)?;
    let mut rhs = 0.0;
    for l in 0..steps {
        let state = probe.prefix(l);
        for i in 0..ctx.psi.modes() {
            let v = ctx.psi.eval(i, l, &state);
            let sv = table.apply(steps - l, &v)?;
            rhs += sv.dot(&sv) * ctx.grid.dt();
        }
    }
    let samples: Result<Vec<f64>> = (0..ctx.config.noise.moment_paths)
        .map(|p| {
            let b = WienerBundle::sample_path(&ctx.grid, ctx.psi.modes(), ctx.config.seed, p as u64)?;
            let mut acc = HVector::zeros(ctx.op.dim());
            for l in 0..steps {
                let state = b.prefix(l);
                for i in 0..ctx.psi.modes() {
                    let sv = table.apply(steps - l, &ctx.psi.eval(i, l, &state))?;
                    acc.axpy(b.increment(i, l), &sv);
                }
            }
            Ok(acc.dot(&acc))
        })
        .collect();
    let (lhs, stderr) = mean_and_stderr(&samples?);
    let isometry_ok = (lhs - rhs).abs() <= 3.0 * stderr;

    let pass = zero_start && witness_max.is_finite() && isometry_ok;
    outcome(
        "convolve",
        pass,
        vec![
            format!("paths: {}", set.paths()),
            format!("W(0) = 0 on every path: {zero_start}"),
            format!("max per-path int |W|^2 dt: {witness_max:.6e}"),
            format!(
                "terminal isometry transfer: E|W(T)|^2 = {lhs:.6e} vs quadrature {rhs:.6e} \
                 (stderr {stderr:.3e}, within 3 sigma: {isometry_ok})"
            ),
        ],
    )
}

fn ito_check_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let paths = ctx.config.noise.moment_paths;
    let mut rows = Vec::new();

    let unit = ConstantIntegrand::unit(ctx.op.dim(), 0);
    let r = ito_isometry_test(&unit, &ctx.grid, 1, paths, ctx.config.seed)?;
    rows.push(("isometry-unit".to_string(), r.lhs, r.rhs, r.stderr, r.within_three_sigma()));

    let geometric = ConstantIntegrand::geometric(8, ctx.op.dim());
    let r = ito_isometry_test(&geometric, &ctx.grid, 8, paths, ctx.config.seed)?;
    rows.push(("isometry-geometric".to_string(), r.lhs, r.rhs, r.stderr, r.within_three_sigma()));

    if ctx.psi.deterministic() {
        let r = ito_isometry_test(&ctx.psi, &ctx.grid, ctx.psi.modes(), paths, ctx.config.seed)?;
        rows.push(("isometry-configured".to_string(), r.lhs, r.rhs, r.stderr, r.within_three_sigma()));
    }

    let r = cross_orthogonality_test(&geometric, &ctx.grid, 0, 1, paths, ctx.config.seed)?;
    rows.push(("cross-orthogonality".to_string(), r.estimate, 0.0, r.stderr, r.within_three_sigma()));

    let mut csv = ctx.writer("ito-check.csv")?;
    writeln!(csv, "check,lhs,rhs,stderr,pass")?;
    for (name, lhs, rhs, stderr, ok) in &rows {
        writeln!(
            csv,
            "{name},{},{},{},{}",
            fmt_float(*lhs),
            fmt_float(*rhs),
            fmt_float(*stderr),
            ok
        )?;
    }

    let pass = rows.iter().all(|row| row.4);
    let summary = rows
        .iter()
        .map(|(name, lhs, rhs, stderr, ok)| {
            format!("{name}: lhs {lhs:.6e}, rhs {rhs:.6e}, stderr {stderr:.3e}, pass {ok}")
        })
        .collect();
    outcome("ito-check", pass, summary)
}

fn verify_strong_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let report = strong_solution_residual_ensemble(
        &ctx.op,
        &ctx.kernel,
        &ctx.grid,
        &ctx.psi,
        ctx.config.seed,
        ctx.config.noise.paths,
        ctx.tolerance(),
    )?;
    let study = strong_refinement_study(
        &ctx.op,
        &ctx.kernel,
        ctx.grid.t_end(),
        &ctx.config.refine_steps,
        &ctx.psi,
        ctx.config.seed,
        ctx.config.noise.paths,
    )?;

    let mut csv = ctx.writer("verify-strong.csv")?;
    writeln!(csv, "steps,residual_sup_mean,rate")?;
    for (i, &steps) in study.steps.iter().enumerate() {
        let rate = if i == 0 {
            String::new()
        } else {
            fmt_float(study.rates[i - 1])
        };
        writeln!(csv, "{steps},{},{rate}", fmt_float(study.sup_means[i]))?;
    }

    let rates_ok = study.rates.iter().all(|&r| r >= 0.4);
    let pass = report.pass && rates_ok;
    outcome(
        "verify-strong",
        pass,
        vec![
            format!(
                "residual sup mean: {:.6e} over {} paths (tol {:.3e}, pass {})",
                report.residual_sup_mean, report.paths, report.tolerance_used, report.pass
            ),
            format!("refinement steps {:?}: sup means {:?}", study.steps, study.sup_means),
            format!("observed rates {:?} (all >= 0.4: {rates_ok})", study.rates),
        ],
    )
}

fn verify_weak_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let bundle = WienerBundle::sample(&ctx.grid, ctx.psi.modes(), ctx.config.seed)?;
    let mut csv = ctx.writer("verify-weak.csv")?;
    writeln!(csv, "mode,residual_sup,tolerance,pass")?;
    let mut pass = true;
    let mut summary = Vec::new();
    for k in 0..ctx.op.dim() {
        let xi = HVector::basis(ctx.op.dim(), k);
        let report = weak_solution_residual(
            &ctx.op,
            &ctx.kernel,
            &ctx.grid,
            &ctx.psi,
            &bundle,
            &xi,
            ctx.tolerance(),
        )?;
        pass &= report.pass;
        writeln!(
            csv,
            "{},{},{},{}",
            k + 1,
            fmt_float(report.residual_sup_mean),
            fmt_float(report.tolerance_used),
            report.pass
        )?;
        summary.push(format!(
            "xi = e_{}: residual sup {:.6e} (pass {})",
            k + 1,
            report.residual_sup_mean,
            report.pass
        ));
    }
    outcome("verify-weak", pass, summary)
}

fn verify_mild_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let bundle = WienerBundle::sample(&ctx.grid, ctx.psi.modes(), ctx.config.seed)?;
    let report = mild_weak_equivalence_check(
        &ctx.op,
        &ctx.kernel,
        &ctx.grid,
        &ctx.psi,
        &bundle,
        ctx.tolerance(),
    )?;
    // interchange identity as the structural part of the mild check
    let table = build_resolvent(&ctx.op, &ctx.kernel, &ctx.grid, None)?;
    let (_, interchange) = apply_a_to_convolution(&ctx.op, &table, &ctx.psi, &bundle)?;

    let mut csv = ctx.writer("verify-mild.csv")?;
    writeln!(csv, "quantity,value")?;
    writeln!(csv, "residual_sup,{}", fmt_float(report.residual_sup_mean))?;
    writeln!(csv, "tolerance,{}", fmt_float(report.tolerance_used))?;
    writeln!(csv, "interchange_discrepancy,{}", fmt_float(interchange))?;

    let pass = report.pass && interchange <= 1e-12;
    outcome(
        "verify-mild",
        pass,
        vec![
            format!(
                "worst weak residual of the mild process: {:.6e} (tol {:.3e})",
                report.residual_sup_mean, report.tolerance_used
            ),
            format!("interchange |A(conv) - conv(A Psi)|: {interchange:.3e} (tol 1e-12)"),
        ],
    )
}

fn yosida_suite_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let report = yosida_strong_convergence_suite(
        &ctx.op,
        &ctx.kernel,
        &ctx.grid,
        &ctx.psi,
        ctx.config.seed,
        &ctx.config.yosida_n,
        ctx.config.noise.paths,
    )?;
    let mut csv = ctx.writer("yosida-suite.csv")?;
    writeln!(csv, "n,e1,e2,n1_sq,n2_sq")?;
    for (i, &n) in report.n_list.iter().enumerate() {
        writeln!(
            csv,
            "{n},{},{},{},{}",
            fmt_float(report.e1[i]),
            fmt_float(report.e2[i]),
            fmt_float(report.n1_sq[i]),
            fmt_float(report.n2_sq[i])
        )?;
    }
    let decreasing = report.strictly_decreasing();
    let bound = report.decomposition_bound_holds();
    outcome(
        "yosida-suite",
        decreasing && bound,
        vec![
            format!("n = {:?}", report.n_list),
            format!("e1 = {:?}", report.e1),
            format!("e2 = {:?}", report.e2),
            format!("strictly decreasing: {decreasing}"),
            format!("e2 <= 3 (N1^2 + N2^2) per n: {bound}"),
        ],
    )
}

fn cauchy_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    // matched-bundle contraction: the configured grid vs its 4x refinement
    let fine_grid = ctx.grid.refine(4);
    let fine_bundle = WienerBundle::sample(&fine_grid, ctx.psi.modes(), ctx.config.seed)?;
    let coarse_bundle = fine_bundle.coarsen(4)?;
    let coarse = cauchy_reformulation(&ctx.op, &ctx.kernel, &ctx.grid, &ctx.psi, &coarse_bundle)?;
    let fine = cauchy_reformulation(&ctx.op, &ctx.kernel, &fine_grid, &ctx.psi, &fine_bundle)?;
    let factor = coarse.sup_discrepancy / fine.sup_discrepancy;
    let ode = deterministic_cauchy_ode_residual(&ctx.op, &ctx.kernel, &ctx.grid)?;

    let mut csv = ctx.writer("cauchy.csv")?;
    writeln!(csv, "t,direct_norm,reformulated_norm,y_norm")?;
    for j in 0..ctx.grid.len() {
        writeln!(
            csv,
            "{},{},{},{}",
            fmt_float(ctx.grid.t(j)),
            fmt_float(coarse.w_direct.value(0, j).norm_h()),
            fmt_float(coarse.w_reformulated.value(0, j).norm_h()),
            fmt_float(coarse.y.value(0, j).norm_h())
        )?;
    }

    let contraction_ok = factor >= 1.2;
    // the central-difference truncation of the Y ODE carries an extra
    // (|lambda| dt)^2 term when the stiffest mode is under-resolved
    let stiffness = ctx.op.eigenvalues().iter().map(|l| l.abs()).fold(0.0, f64::max);
    let ode_tol = 10.0 * ctx.grid.dt() + (stiffness * ctx.grid.dt()).powi(2) / 4.0;
    let ode_ok = ode <= ode_tol;
    outcome(
        "cauchy",
        contraction_ok && ode_ok,
        vec![
            format!(
                "sup discrepancy: {:.6e} at dt = {:.4e}, {:.6e} at dt/4",
                coarse.sup_discrepancy,
                ctx.grid.dt(),
                fine.sup_discrepancy
            ),
            format!("contraction factor per 4x refinement: {factor:.3} (>= 1.2: {contraction_ok})"),
            format!("deterministic ODE residual: {ode:.6e} (tol {ode_tol:.3e}: {ode_ok})"),
        ],
    )
}

fn regularity_experiment(ctx: &Ctx) -> Result<ExperimentOutcome> {
    let table = build_resolvent(&ctx.op, &ctx.kernel, &ctx.grid, None)?;
    let paths = ctx.config.noise.paths.min(64);
    let set = stochastic_convolution_ensemble(&table, &ctx.psi, ctx.config.seed, paths)?;
    let report = regularity_probe(&set)?;

    // matched refinement: the jump size must shrink
    let fine_grid = ctx.grid.refine(4);
    let fine_table = build_resolvent(&ctx.op, &ctx.kernel, &fine_grid, None)?;
    let fine_bundle = WienerBundle::sample(&fine_grid, ctx.psi.modes(), ctx.config.seed)?;
    let coarse_bundle = fine_bundle.coarsen(4)?;
    let coarse_single = stochastic_convolution(&table, &ctx.psi, &coarse_bundle)?;
    let fine_single = stochastic_convolution(&fine_table, &ctx.psi, &fine_bundle)?;
    let jumps_shrink = fine_single.max_jump() < coarse_single.max_jump();

    let mut csv = ctx.writer("regularity.csv")?;
    writeln!(csv, "lag,rms_modulus")?;
    for (lag, rms) in &report.moduli {
        writeln!(csv, "{},{}", fmt_float(*lag), fmt_float(*rms))?;
    }

    let holder_ok = report.holder_estimate.is_nan()
        || (report.holder_estimate > 0.0 && report.holder_estimate < 1.0);
    outcome(
        "regularity",
        jumps_shrink && holder_ok,
        vec![
            format!("max jump over {} paths: {:.6e}", paths, report.max_jump),
            format!("Hoelder estimate: {:.4}", report.holder_estimate),
            format!(
                "max jump under 4x matched refinement: {:.6e} -> {:.6e} (shrinks: {jumps_shrink})",
                coarse_single.max_jump(),
                fine_single.max_jump()
            ),
        ],
    )
}

fn write_plot_script(out_dir: &Path, names: &[String]) -> Result<()> {
    let mut out = BufWriter::new(File::create(out_dir.join("plots.gnu"))?);
    writeln!(out, "# gnuplot renderer for the experiment CSVs in this directory")?;
    writeln!(out, "set datafile separator ','")?;
    writeln!(out, "set key autotitle columnhead")?;
    writeln!(out, "set term pngcairo size 900,600")?;
    for name in names {
        writeln!(out)?;
        writeln!(out, "set output '{name}.png'")?;
        match name.as_str() {
            "resolvent" => writeln!(out, "plot for [k=2:*] 'resolvent.csv' using 1:k with lines")?,
            "cp-check" => writeln!(out, "plot for [k=2:*] 'cp-check.csv' using 1:k with lines")?,
            "convolve" => writeln!(
                out,
                "plot 'convolve.csv' using 1:2 with lines, \
                 '' using 1:($2+3*$3) with lines dt 2, '' using 1:($2-3*$3) with lines dt 2"
            )?,
            "ito-check" => writeln!(
                out,
                "set style data histogram\nplot 'ito-check.csv' using 2:xtic(1), '' using 3"
            )?,
            "verify-strong" => writeln!(
                out,
                "set logscale xy\nplot 'verify-strong.csv' using 1:2 with linespoints"
            )?,
            "verify-weak" => writeln!(out, "plot 'verify-weak.csv' using 1:2 with points")?,
            "verify-mild" => writeln!(out, "plot 'verify-mild.csv' using 2:xtic(1)")?,
            "yosida-suite" => writeln!(
                out,
                "set logscale xy\nplot 'yosida-suite.csv' using 1:2 with linespoints, \
                 '' using 1:3 with linespoints"
            )?,
            "cauchy" => writeln!(
                out,
                "plot 'cauchy.csv' using 1:2 with lines, '' using 1:3 with lines, \
                 '' using 1:4 with lines"
            )?,
            "regularity" => writeln!(
                out,
                "set logscale xy\nplot 'regularity.csv' using 1:2 with linespoints"
            )?,
            _ => writeln!(out, "# no plot rule for {name}")?,
        }
        writeln!(out, "unset logscale")?;
        writeln!(out, "unset style")?;
    }
    Ok(())
}
