//! One function per subcommand: builds the check rows and any plot-data
//! CSVs from a validated configuration.

use crate::config::{
    ShellConfig, ShiftDemoConfig, TestfnConfig, TriangleFileConfig, WilsonConfig,
};
use crate::report::{plot_csv, Report, Row};
use plateau_core::tensor::Vec4;
use plateau_core::testfn::{
    partition_normalize, Mollifier, OpenCover, PlateauFunction, PlateauRegulator,
};
use plateau_core::triangle::{self, TriangleConfig};
use plateau_core::wilson::{
    gauge_covariance_check, line_integral, path_variation_check, split_path, GaugeFieldSpec,
    PathSpec, PathVariation, ScalarField,
};

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

pub struct CommandOutput {
    pub report: Report,
    /// Extra plot-data files: (suffix, contents).
    pub plots: Vec<(String, String)>,
}

fn ok(report: Report) -> CommandOutput {
    CommandOutput {
        report,
        plots: Vec::new(),
    }
}

/// Deterministic low-discrepancy points in the probe box (Kronecker
/// sequence with square-root-of-prime increments).
fn probe_points(lo: &[f64], hi: &[f64], n: usize) -> Vec<Vec<f64>> {
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    let d = lo.len();
    (0..n)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let alpha = PRIMES[j % PRIMES.len()].sqrt();
                    let t = ((i + 1) as f64 * alpha).fract();
                    lo[j] + (hi[j] - lo[j]) * t
                })
                .collect()
        })
        .collect()
}

pub fn run_testfn(cfg: &TestfnConfig) -> Result<CommandOutput, String> {
    cfg.validate()?;
    let reg = PlateauRegulator::new(cfg.lambda, cfg.width).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    rows.push(Row::bounded(
        "regulator_origin_minus_one",
        "",
        reg.eval_radius(0.0) - 1.0,
        0.0,
    ));
    rows.push(Row::bounded(
        "regulator_cutoff_value",
        "",
        reg.eval_radius(cfg.lambda),
        0.0,
    ));
    rows.push(Row::checked(
        "regulator_midpoint",
        "",
        reg.eval_radius(cfg.lambda - 0.5 * cfg.width),
        0.5,
        1e-12,
    ));

    // Partition of unity over the configured cover.
    let outer: Vec<_> = cfg.cover_outer.iter().map(|r| r.to_region()).collect();
    let inner: Vec<_> = cfg.cover_inner.iter().map(|r| r.to_region()).collect();
    let cover = OpenCover {
        sets: outer.clone(),
        inner_sets: inner.clone(),
    };
    cover.validate(cfg.epsilon).map_err(|e| e.to_string())?;
    let dim = cfg.probe_lo.len();
    let betas: Result<Vec<_>, _> = outer
        .iter()
        .zip(&inner)
        .map(|(o, i)| {
            Mollifier::new(cfg.epsilon, dim)
                .and_then(|m| PlateauFunction::new(o.clone(), i.clone(), m))
        })
        .collect();
    let betas = betas.map_err(|e| e.to_string())?;
    let probes = probe_points(&cfg.probe_lo, &cfg.probe_hi, cfg.probe_points);
    let partition = partition_normalize(betas, &probes).map_err(|e| e.to_string())?;
    let mut max_dev: f64 = 0.0;
    for p in &probes {
        let alphas = partition.alphas(p).map_err(|e| e.to_string())?;
        let sum: f64 = alphas.iter().sum();
        max_dev = max_dev.max((sum - 1.0).abs());
        if alphas.iter().any(|&a| !(0.0..=1.0 + 1e-12).contains(&a)) {
            return Err("partition produced a weight outside [0, 1]".into());
        }
    }
    rows.push(Row::bounded("partition_sum_max_dev", "", max_dev, 1e-12));
    // Exact plateau support: deep interior value 1, exterior value 0.
    for (j, (pf, region)) in partition.plateaus().iter().zip(&inner).enumerate() {
        let deep = match region {
            plateau_core::testfn::Region::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| 0.5 * (a + b))
                .collect::<Vec<_>>(),
            plateau_core::testfn::Region::Ball { center, .. } => center.clone(),
        };
        let v = pf.eval(&deep).map_err(|e| e.to_string())?;
        rows.push(Row::bounded(
            "plateau_interior_minus_one",
            &j.to_string(),
            v - 1.0,
            0.0,
        ));
        let far: Vec<f64> = deep.iter().map(|x| x + 1e6).collect();
        let z = pf.eval(&far).map_err(|e| e.to_string())?;
        rows.push(Row::bounded("plateau_exterior_value", &j.to_string(), z, 0.0));
    }

    // FIG.-1-shaped regulator profile.
    let mut profile = Vec::with_capacity(cfg.profile_points);
    for i in 0..cfg.profile_points {
        let r = cfg.lambda * i as f64 / (cfg.profile_points - 1) as f64;
        profile.push((r, reg.eval_radius(r)));
    }
    let report = Report::new("testfn", cfg.config_version, rows);
    Ok(CommandOutput {
        report,
        plots: vec![(
            "_profile.csv".into(),
            plot_csv(("radius", "value"), &profile),
        )],
    })
}

pub fn run_wilson(cfg: &WilsonConfig) -> Result<CommandOutput, String> {
    cfg.validate()?;
    let e = |err: plateau_core::wilson::WilsonError| err.to_string();
    let start = Vec4(cfg.start);
    let end = Vec4(cfg.end);
    let straight = PathSpec::straight(start, end).with_samples(cfg.samples);
    let arc = PathSpec::arc(start, end, Vec4(cfg.bulge)).with_samples(cfg.samples);
    let quad_gauge = ScalarField::Quadratic {
        q: cfg.gauge_quadratic,
        b: Vec4(cfg.gauge_quadratic_linear),
    };
    let pure = GaugeFieldSpec::PureGauge {
        lambda: quad_gauge.clone(),
        coupling: cfg.coupling,
    };
    let curv = GaugeFieldSpec::constant_curvature(cfg.curvature).map_err(e)?;
    let endpoint = (quad_gauge.eval(end) - quad_gauge.eval(start)) / cfg.coupling;

    let mut rows = Vec::new();
    let i_straight = line_integral(&straight, &pure).map_err(e)?;
    rows.push(Row::bounded(
        "pure_gauge_straight_dev",
        "",
        i_straight - endpoint,
        1e-8,
    ));
    let arc_fine = arc.clone().with_samples(cfg.samples.max(256));
    let i_arc = line_integral(&arc_fine, &pure).map_err(e)?;
    rows.push(Row::bounded("pure_gauge_arc_dev", "", i_arc - endpoint, 1e-8));

    rows.push(Row::bounded(
        "covariance_constant_gauge",
        "",
        gauge_covariance_check(
            &straight,
            &GaugeFieldSpec::Constant {
                a: Vec4([0.4, -0.1, 0.9, 0.2]),
            },
            &ScalarField::Constant(1.7),
            cfg.coupling,
        )
        .map_err(e)?,
        1e-14,
    ));
    rows.push(Row::bounded(
        "covariance_linear_gauge",
        "",
        gauge_covariance_check(
            &straight,
            &curv,
            &ScalarField::Linear {
                c: Vec4(cfg.gauge_linear),
            },
            cfg.coupling,
        )
        .map_err(e)?,
        1e-12,
    ));
    rows.push(Row::bounded(
        "covariance_quadratic_arc",
        "",
        gauge_covariance_check(&arc_fine, &curv, &quad_gauge, cfg.coupling).map_err(e)?,
        1e-8,
    ));

    rows.push(Row::bounded(
        "longitudinal_variation",
        "",
        path_variation_check(
            &straight,
            &PathVariation::Longitudinal {
                amplitude: cfg.longitudinal_amplitude,
            },
            &curv,
        )
        .map_err(e)?,
        1e-10,
    ));

    // Transverse bow against the closed-form lens flux
    // (2/pi) * amplitude * |chord| * F(chord_hat, normal_hat).
    let chord = end - start;
    let mut n = Vec4(cfg.transverse_normal);
    n = n - chord * (n.dot(chord) / chord.norm_sq());
    let n_hat = n.unit().ok_or("transverse_normal is parallel to the chord")?;
    let u_hat = chord.unit().ok_or("wilson path endpoints coincide")?;
    let mut f_un = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            f_un += u_hat[i] * cfg.curvature[i][j] * n_hat[j];
        }
    }
    let flux = 2.0 / std::f64::consts::PI * cfg.transverse_amplitude * chord.norm() * f_un;
    let transverse = path_variation_check(
        &straight,
        &PathVariation::Transverse {
            normal: Vec4(cfg.transverse_normal),
            amplitude: cfg.transverse_amplitude,
        },
        &curv,
    )
    .map_err(e)?;
    rows.push(Row::checked(
        "transverse_flux_magnitude",
        "",
        transverse.abs(),
        flux.abs(),
        1e-6,
    ));

    let i_curv_arc = line_integral(&arc, &curv).map_err(e)?;
    let i_rev = line_integral(&arc.reversed(), &curv).map_err(e)?;
    rows.push(Row::bounded("reversal_antisymmetry", "", i_curv_arc + i_rev, 1e-12));
    let (left, right) = split_path(&arc, 0.37).map_err(e)?;
    let i_split =
        line_integral(&left, &curv).map_err(e)? + line_integral(&right, &curv).map_err(e)?;
    rows.push(Row::bounded("split_additivity", "", i_split - i_curv_arc, 1e-6));

    rows.push(Row::bounded(
        "pure_gauge_path_independence",
        "",
        i_arc - i_straight,
        1e-8,
    ));
    let i_curv_straight = line_integral(&straight, &curv).map_err(e)?;
    // Path dependence of the curvature field: informational magnitude.
    rows.push(Row::info(
        "curvature_path_dependence",
        "",
        i_curv_arc - i_curv_straight,
        None,
    ));

    Ok(ok(Report::new("wilson", cfg.config_version, rows)))
}

fn scale_of(cfg: &TriangleConfig) -> f64 {
    let e2 = cfg.coupling * cfg.coupling;
    e2 * cfg.p1.norm() * cfg.p2.norm()
}

pub fn run_anomaly_axial(file: &TriangleFileConfig) -> Result<CommandOutput, String> {
    let cfg = file.to_core()?;
    let mut rows = Vec::new();
    // Shell reductions entering the two brackets, against Eq.-(11) values.
    for (name, p) in [("shell_reduction_p1", cfg.p1), ("shell_reduction_p2", cfg.p2)] {
        for d in 0..4 {
            let v = triangle::shell_reduction(p, d, cfg.lambda).map_err(|e| e.to_string())?;
            let target = p[d] / (8.0 * PI2);
            if target == 0.0 {
                rows.push(Row::bounded(name, &d.to_string(), v, 1e-15));
            } else {
                rows.push(Row::checked(name, &d.to_string(), v, target, 1e-10));
            }
        }
    }
    let axial = triangle::axial_divergence(&cfg).map_err(|e| e.to_string())?;
    rows.push(Row::bounded(
        "axial_divergence_max_abs",
        "",
        axial.max_abs(),
        1e-12 * scale_of(&cfg),
    ));
    // Smooth-regulator Monte Carlo of the regrouped integrand: consistent
    // with exact cancellation.
    let est = triangle::axial_combined_mc(&cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0;
    let mut worst_sigma = 0.0;
    let mut all_ok = true;
    for i in 0..4 {
        for j in 0..4 {
            let v = est.value.0[i][j].abs();
            let s = est.std_error.0[i][j];
            if v > worst {
                worst = v;
                worst_sigma = s;
            }
            all_ok &= v <= 3.0 * s + 1e-12 * scale_of(&cfg);
        }
    }
    rows.push(Row {
        quantity: "axial_combined_mc_max_abs".into(),
        component_indices: String::new(),
        value: worst,
        std_error: worst_sigma,
        target: Some(0.0),
        rel_dev: None,
        pass: all_ok,
    });
    Ok(ok(Report::new("anomaly-axial", file.config_version, rows)))
}

pub fn run_anomaly_vector(file: &TriangleFileConfig) -> Result<CommandOutput, String> {
    let cfg = file.to_core()?;
    let e2 = cfg.coupling * cfg.coupling;
    let mut rows = Vec::new();
    let det = triangle::vector_divergence(&cfg);
    rows.push(Row::checked(
        "vector_coefficient_magnitude",
        "",
        det.coefficient.abs(),
        e2 / (4.0 * PI2),
        1e-3,
    ));
    let step = triangle::vector_divergence_step_oracle(&cfg);
    rows.push(Row::info(
        "vector_step_limit_coefficient",
        "",
        step.coefficient,
        Some(det.coefficient),
    ));
    let mc = triangle::vector_divergence_mc(&cfg).map_err(|e| e.to_string())?;
    rows.push(Row::sigma_checked(
        "vector_coefficient_mc",
        "",
        mc.coefficient,
        mc.coefficient_error,
        det.coefficient,
        3.0,
    ));
    // Reference point for the width -> 0 limit of the literal smooth
    // integrand; the MC approaches it only once width << |p_i|.
    rows.push(Row::info(
        "vector_mc_vs_step_limit",
        "",
        mc.coefficient,
        Some(step.coefficient),
    ));
    Ok(ok(Report::new("anomaly-vector", file.config_version, rows)))
}

pub fn run_anomaly_total(file: &TriangleFileConfig) -> Result<CommandOutput, String> {
    let cfg = file.to_core()?;
    let e2 = cfg.coupling * cfg.coupling;
    let rep = triangle::anomaly_assemble(&cfg).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    rows.push(Row::bounded(
        "axial_divergence_max_abs",
        "",
        rep.axial_divergence.max_abs(),
        1e-12 * scale_of(&cfg),
    ));
    rows.push(Row::checked(
        "vector_coefficient_magnitude",
        "",
        rep.vector_defect.coefficient.abs(),
        e2 / (4.0 * PI2),
        1e-3,
    ));
    // Counterterm magnitude per unit (p1 - p2) component.
    let mut ct_max: f64 = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            for m in 0..4 {
                ct_max = ct_max.max(rep.counterterm[k][l][m].abs());
            }
        }
    }
    let diff_max = (cfg.p1 - cfg.p2).max_abs();
    rows.push(Row::checked(
        "counterterm_magnitude",
        "",
        ct_max / diff_max,
        e2 / (4.0 * PI2),
        1e-10,
    ));
    rows.push(Row::bounded(
        "corrected_vector_max_abs",
        "",
        rep.corrected_vector.max_abs(),
        1e-12 * scale_of(&cfg),
    ));
    rows.push(Row::checked(
        "total_anomaly_coefficient_magnitude",
        "",
        rep.total_coefficient.abs(),
        e2 / (2.0 * PI2),
        1e-3,
    ));
    Ok(ok(Report::new("anomaly-total", file.config_version, rows)))
}

pub fn run_shift_demo(cfg: &ShiftDemoConfig) -> Result<CommandOutput, String> {
    let tri = cfg.triangle.to_core()?;
    let mut rows = Vec::new();
    let est = triangle::shift_equivalence_check(&tri).map_err(|e| e.to_string())?;
    let mut worst = 0.0;
    let mut worst_sigma = 0.0;
    let mut all_ok = true;
    for i in 0..4 {
        for j in 0..4 {
            let v = est.value.0[i][j].abs();
            let s = est.std_error.0[i][j];
            if v > worst {
                worst = v;
                worst_sigma = s;
            }
            all_ok &= v <= 3.0 * s + 1e-15;
        }
    }
    rows.push(Row {
        quantity: "smooth_shift_max_abs".into(),
        component_indices: String::new(),
        value: worst,
        std_error: worst_sigma,
        target: Some(0.0),
        rel_dev: None,
        pass: all_ok,
    });

    let p = Vec4(cfg.hard_p);
    let hard = triangle::shift_variance_demo(
        p,
        cfg.hard_lambda,
        cfg.triangle.mc_samples,
        cfg.triangle.seed,
        cfg.triangle.workers,
    )
    .map_err(|e| e.to_string())?;
    let oracle = triangle::gauss_surface_oracle(p, cfg.oracle_order);
    for d in 0..4 {
        if p[d] == 0.0 {
            continue;
        }
        let rel = (hard.value[d] - oracle[d]).abs() / oracle[d].abs();
        rows.push(Row {
            quantity: "hard_cutoff_surface_term".into(),
            component_indices: d.to_string(),
            value: hard.value[d],
            std_error: hard.std_error[d],
            target: Some(oracle[d]),
            rel_dev: Some(rel),
            pass: rel < 0.02 && hard.value[d] != 0.0,
        });
        rows.push(Row::info(
            "surface_oracle_vs_closed_form",
            &d.to_string(),
            oracle[d],
            Some(p[d] / (32.0 * PI2)),
        ));
    }
    Ok(ok(Report::new("shift-demo", cfg.triangle.config_version, rows)))
}

pub fn run_shell(cfg: &ShellConfig) -> Result<CommandOutput, String> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (i, &t) in cfg.thicknesses.iter().enumerate() {
        let mut p = Vec4::ZERO;
        p[cfg.direction] = t;
        let det =
            triangle::shell_reduction(p, cfg.direction, cfg.lambda).map_err(|e| e.to_string())?;
        let target = t / (8.0 * PI2);
        rows.push(Row::checked(
            "shell_deterministic",
            &i.to_string(),
            det,
            target,
            1e-10,
        ));
        let mc = triangle::shell_reduction_mc(
            p,
            cfg.direction,
            cfg.lambda,
            cfg.mc_samples,
            cfg.seed,
            cfg.workers,
        )
        .map_err(|e| e.to_string())?;
        rows.push(Row::sigma_checked(
            "shell_mc",
            &i.to_string(),
            mc.value,
            mc.std_error,
            det,
            3.0,
        ));
    }
    // FIG.-2-shaped cross-section: signed radial thickness of the domain
    // where the shifted-regulator difference is nonzero, vs polar angle.
    let mut xsec = Vec::with_capacity(cfg.cross_section_points);
    for i in 0..cfg.cross_section_points {
        let theta =
            2.0 * std::f64::consts::PI * i as f64 / (cfg.cross_section_points - 1) as f64;
        xsec.push((theta, 2.0 * cfg.cross_section_momentum * theta.cos()));
    }
    let report = Report::new("shell", cfg.config_version, rows);
    Ok(CommandOutput {
        report,
        plots: vec![(
            "_shell.csv".into(),
            plot_csv(("theta", "thickness"), &xsec),
        )],
    })
}
