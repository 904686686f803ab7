use anisospec_core::asym::{
    conjecture_61, fit_power_law, localization_report, model_lambdas, model_reference,
    negative_scan, parity_split, richardson3, sweep, FitResult, ModelReference, Sweep, SweepRecord,
    SWEEP_TOL,
};
use anisospec_core::discretize::{
    free_multiplier_spectrum, model_operator_with, nystrom, operator_norm_diff, Grid, Potential,
    Scheme,
};
use anisospec_core::eigen::{bottom_k_with, perron_certify, top_k_with, EigenOptions, PerronMode};
use anisospec_core::kernels::{rescale_beta_to_alpha, KernelFamily, KernelSpec};
use anisospec_core::symbols::schur_bound_operator;
use anisospec_core::theta::validate;
use anisospec_core::DiscreteOperator;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::output::{write_vectors, Artifacts, GridRecord};

/// A hard check of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// What a command reports back besides its artifacts.
#[derive(Debug, Default)]
pub struct Outcome {
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub grids: Vec<GridRecord>,
    pub not_converged: bool,
    /// Values resolved at run time (cutoffs, reference eigenvalues, matches).
    pub resolved: Map<String, Value>,
}

impl Outcome {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail,
        });
    }
}

pub fn execute(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let mut o = Outcome::default();
    match cfg.command {
        Command::ModelEigs => model_eigs(cfg, out, &mut o)?,
        Command::TopEigs => top_eigs(cfg, out, &mut o)?,
        Command::Sweep => {
            run_sweep(cfg, out, &mut o)?;
        }
        Command::Fit => fit(cfg, out, &mut o)?,
        Command::DesymGap => desym_gap(cfg, out, &mut o)?,
        Command::Localization => localization(cfg, out, &mut o)?,
        Command::Parity => parity(cfg, out, &mut o)?,
        Command::Conjecture => conjecture(cfg, out, &mut o)?,
        Command::NegativeScan => negative(cfg, out, &mut o)?,
        Command::ValidateTheta => validate_theta(cfg, out, &mut o)?,
    }
    Ok(o)
}

fn model_grid(scheme: Scheme, cutoff_l: f64, n: usize) -> Result<Grid, CliError> {
    match scheme {
        Scheme::BandLimited => Ok(Grid::band_limited(cutoff_l, n)?),
        Scheme::FourierCollocation => Ok(Grid::fourier(cutoff_l, n)?),
        other => Err(CliError::Usage(format!(
            "model operators need band_limited or fourier_collocation, got {other:?}"
        ))),
    }
}

fn default_nodes(scheme: Scheme, cutoff_l: f64, step: f64) -> usize {
    let n = (2.0 * cutoff_l / step).round() as usize;
    match scheme {
        Scheme::FourierCollocation => n.next_power_of_two(),
        _ => n + n % 2,
    }
}

#[derive(Serialize)]
struct ModelSolve {
    potential: Potential,
    mode: &'static str,
    lambdas: Vec<f64>,
    richardson: Option<Vec<anisospec_core::asym::Richardson>>,
    reference: Option<ModelReference>,
}

/// `λ_1..λ_k` of `|D| + V` as the config asks: Richardson over three cutoffs,
/// one fixed grid, or the `{L, 1.5L}` reference pair.
fn model_solve(
    cfg: &ExperimentConfig,
    potential: &Potential,
    o: &mut Outcome,
) -> Result<ModelSolve, CliError> {
    let nm = &cfg.numeric;
    let k = nm.k.max(1);
    let opts = EigenOptions {
        seed: cfg.seed(),
        ..EigenOptions::default()
    };
    let solve = |grid: &Grid| -> Result<Vec<f64>, CliError> {
        let op = model_operator_with(potential, grid)?;
        Ok(bottom_k_with(&op, k, SWEEP_TOL, &opts)?.values())
    };
    if let Some(ls) = nm.richardson_l {
        let n = nm.n.unwrap_or(2048);
        let mut runs = Vec::new();
        for l in ls {
            let grid = model_grid(nm.scheme, l, n)?;
            o.grids.push(GridRecord::new(format!("model L={l}"), &grid));
            runs.push(solve(&grid)?);
        }
        let rich = (0..k)
            .map(|j| richardson3(ls, [runs[0][j], runs[1][j], runs[2][j]]))
            .collect::<Result<Vec<_>, _>>()?;
        let lambdas = rich
            .iter()
            .map(|r| {
                if r.extrapolated.is_finite() {
                    r.extrapolated
                } else {
                    r.values[2]
                }
            })
            .collect();
        if rich.iter().any(|r| !r.order.is_finite()) {
            o.warnings
                .push("Richardson sequence not asymptotic; largest-cutoff values reported".into());
        }
        return Ok(ModelSolve {
            potential: potential.clone(),
            mode: "richardson",
            lambdas,
            richardson: Some(rich),
            reference: None,
        });
    }
    if let Some(l) = nm.cutoff_l.fixed() {
        let n =
            nm.n.unwrap_or_else(|| default_nodes(nm.scheme, l, nm.reference.step));
        let grid = model_grid(nm.scheme, l, n)?;
        o.grids.push(GridRecord::new("model", &grid));
        let lambdas = solve(&grid)?;
        return Ok(ModelSolve {
            potential: potential.clone(),
            mode: "fixed",
            lambdas,
            richardson: None,
            reference: None,
        });
    }
    if nm.scheme != Scheme::BandLimited {
        return Err(CliError::Usage(
            "the automatic model reference uses the band_limited scheme".into(),
        ));
    }
    let r = model_reference(potential, cfg.theta.gamma(), k, &nm.reference)?;
    for (label, l) in [("model L", r.cutoff_l), ("model 1.5L", 1.5 * r.cutoff_l)] {
        let grid = Grid::band_limited(l, default_nodes(Scheme::BandLimited, l, r.step))?;
        o.grids.push(GridRecord::new(label, &grid));
    }
    o.resolved
        .insert("reference_cutoff_l".into(), json!(r.cutoff_l));
    Ok(ModelSolve {
        potential: potential.clone(),
        mode: "reference",
        lambdas: r.values_wide.clone(),
        richardson: None,
        reference: Some(r),
    })
}

fn model_eigs(
    cfg: &ExperimentConfig,
    out: &mut Artifacts,
    o: &mut Outcome,
) -> Result<(), CliError> {
    let nm = &cfg.numeric;
    let potential = nm
        .potential
        .clone()
        .unwrap_or_else(|| Potential::half_tau(cfg.theta.clone()));
    let main = model_solve(cfg, &potential, o)?;
    if let Some(r) = &main.reference {
        o.check(
            "reference_accepted",
            r.accepted,
            format!("|λ(L) − λ(1.5L)| = {:e}", r.delta),
        );
    }
    if matches!(potential, Potential::Zero) && nm.scheme == Scheme::FourierCollocation {
        if let (Some(l), Some(n)) = (nm.cutoff_l.fixed(), nm.n) {
            let free = free_multiplier_spectrum(n, l);
            let dev = main
                .lambdas
                .iter()
                .zip(&free)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            o.check(
                "free_multiplier",
                dev <= 1e-9,
                format!("max deviation {dev:e}"),
            );
        }
    }
    let mut others = Vec::new();
    if let Some(target) = nm.target {
        let mut matches = Vec::new();
        let lam = main.lambdas[0];
        if (lam - target).abs() <= nm.target_tol {
            matches.push(serde_json::to_value(&potential)?);
        }
        o.check(
            "target_match",
            (lam - target).abs() <= nm.target_tol,
            format!("λ₁ = {lam} vs {target} (tolerance {})", nm.target_tol),
        );
        for c in &nm.candidates {
            let s = model_solve(cfg, c, o)?;
            if (s.lambdas[0] - target).abs() <= nm.target_tol {
                matches.push(serde_json::to_value(c)?);
            }
            others.push(s);
        }
        o.resolved.insert("target".into(), json!(target));
        o.resolved
            .insert("matching_operators".into(), Value::Array(matches));
    }
    o.resolved.insert("lambda1".into(), json!(main.lambdas[0]));

    #[derive(Serialize)]
    struct Row {
        operator: usize,
        j: usize,
        lambda: f64,
    }
    let rows: Vec<Row> = std::iter::once(&main)
        .chain(&others)
        .enumerate()
        .flat_map(|(op, s)| {
            s.lambdas.iter().enumerate().map(move |(j, l)| Row {
                operator: op,
                j: j + 1,
                lambda: *l,
            })
        })
        .collect();
    out.csv("eigenvalues.csv", &rows)?;
    out.json(
        "model_eigs.json",
        &json!({ "operator": main, "candidates": others }),
    )?;
    let pts: Vec<(f64, f64)> = main
        .lambdas
        .iter()
        .enumerate()
        .map(|(j, l)| ((j + 1) as f64, *l))
        .collect();
    out.plot("eigenvalues.dat", &pts)?;
    Ok(())
}

/// `B_α` on the policy grid, or `K_β` on that grid stretched by `1/α`.
fn kernel_operator(cfg: &ExperimentConfig, beta: f64) -> Result<(DiscreteOperator, f64), CliError> {
    let theta = &cfg.theta;
    let alpha = rescale_beta_to_alpha(beta, theta.gamma())?;
    let grid = cfg.policy().grid(theta, alpha)?;
    let op = match cfg.numeric.kernel {
        KernelFamily::BAlpha => nystrom(&KernelSpec::b_alpha(theta.clone(), alpha)?, &grid)?,
        KernelFamily::KBeta => {
            let stretched = Grid::band_limited(grid.cutoff_l() / alpha, grid.len())?;
            nystrom(&KernelSpec::k_beta(theta.clone(), beta)?, &stretched)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "top-eigs supports the symmetric families K_beta and B_alpha, not {other:?}"
            )))
        }
    };
    Ok((op, alpha))
}

fn top_eigs(cfg: &ExperimentConfig, out: &mut Artifacts, o: &mut Outcome) -> Result<(), CliError> {
    let beta = cfg.betas()?[0];
    let (op, alpha) = kernel_operator(cfg, beta)?;
    o.grids
        .push(GridRecord::new(format!("β={beta}"), op.grid()));
    let k = cfg.numeric.k.max(1).min(op.dim());
    let spec = top_k_with(&op, k, SWEEP_TOL, &cfg.policy().eigen)?;
    o.not_converged |= !spec.converged;
    let perron = perron_certify(spec.first(), spec.gap, PerronMode::Strict);
    o.check(
        "perron",
        perron.passed,
        format!("min entry {:e}, gap {:e}", perron.min_entry, perron.gap),
    );
    o.resolved.insert("alpha".into(), json!(alpha));

    #[derive(Serialize)]
    struct Row {
        j: usize,
        value: f64,
        residual: f64,
    }
    let rows: Vec<Row> = spec
        .pairs
        .iter()
        .enumerate()
        .map(|(j, p)| Row {
            j: j + 1,
            value: p.value,
            residual: p.residual,
        })
        .collect();
    out.csv("eigenvalues.csv", &rows)?;
    out.json(
        "top_eigs.json",
        &json!({
            "beta": beta, "alpha": alpha, "kernel": cfg.numeric.kernel,
            "values": spec.values(), "gap": spec.gap, "method": spec.method,
            "converged": spec.converged, "perron": perron,
        }),
    )?;
    let vecs: Vec<&[f64]> = spec.pairs.iter().map(|p| p.vector.as_slice()).collect();
    write_vectors(out, "eigenvectors", op.grid(), &vecs)?;
    let psi = anisospec_core::asym::EigenFunction::from_pair(spec.first(), op.grid())?;
    let pts: Vec<(f64, f64)> = psi
        .nodes
        .iter()
        .copied()
        .zip(psi.values.iter().copied())
        .collect();
    out.plot("psi1.dat", &pts)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SweepRow {
    beta: f64,
    alpha: f64,
    n: usize,
    #[serde(rename = "L")]
    cutoff_l: f64,
    mu: f64,
    deficit: f64,
    rescaled_deficit: f64,
}

fn reference_lambda(
    cfg: &ExperimentConfig,
    k: usize,
    o: &mut Outcome,
) -> Result<ModelReference, CliError> {
    let r = model_lambdas(&cfg.theta, k, &cfg.numeric.reference)?;
    if !r.accepted {
        o.warnings.push(format!(
            "model reference moved by {:e} between L and 1.5L",
            r.delta
        ));
    }
    o.resolved.insert("lambda1".into(), json!(r.lambda(1)));
    o.resolved
        .insert("reference_cutoff_l".into(), json!(r.cutoff_l));
    Ok(r)
}

/// Runs the configured sweep and writes its artifacts.
fn run_sweep(
    cfg: &ExperimentConfig,
    out: &mut Artifacts,
    o: &mut Outcome,
) -> Result<(Sweep, ModelReference), CliError> {
    let betas = cfg.betas()?;
    let policy = cfg.policy();
    let s = sweep(&cfg.theta, &betas, &policy)?;
    let reference = reference_lambda(cfg, 1, o)?;
    let lambda1 = reference.lambda(1);
    o.warnings.extend(s.warnings.iter().cloned());
    for r in &s.records {
        o.grids.push(GridRecord {
            label: format!("β={}", r.beta),
            n: r.n,
            cutoff_l: r.cutoff_l,
            scheme: Scheme::BandLimited,
        });
        o.not_converged |= !(r.solver_converged && r.grid_converged);
    }
    let perron_ok = s.records.iter().all(|r| r.perron.passed);
    o.check(
        "perron",
        perron_ok,
        format!(
            "{} of {} records certified",
            s.records.iter().filter(|r| r.perron.passed).count(),
            s.records.len()
        ),
    );
    let rows: Vec<SweepRow> = s
        .records
        .iter()
        .map(|r| SweepRow {
            beta: r.beta,
            alpha: r.alpha,
            n: r.n,
            cutoff_l: r.cutoff_l,
            mu: r.mu,
            deficit: r.deficit,
            rescaled_deficit: r.rescaled,
        })
        .collect();
    out.csv("sweep.csv", &rows)?;
    out.json(
        "sweep.json",
        &json!({ "sweep": s, "lambda1": lambda1, "reference": reference }),
    )?;
    let loglog: Vec<(f64, f64)> = s
        .records
        .iter()
        .map(|r| (r.beta.ln(), r.deficit.ln()))
        .collect();
    out.plot("sweep_loglog.dat", &loglog)?;
    let resc: Vec<(f64, f64)> = s.records.iter().map(|r| (r.alpha, r.rescaled)).collect();
    out.plot("sweep_rescaled.dat", &resc)?;
    let (amin, amax) = s
        .records
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| {
            (lo.min(r.alpha), hi.max(r.alpha))
        });
    out.plot("lambda1.dat", &[(amin, lambda1), (amax, lambda1)])?;
    Ok((s, reference))
}

fn read_sweep_csv(path: &std::path::Path) -> Result<Vec<SweepRecord>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize::<SweepRow>()
        .map(|r| {
            let r = r?;
            Ok(SweepRecord::synthetic(r.beta, r.alpha, r.deficit))
        })
        .collect()
}

fn fit(cfg: &ExperimentConfig, out: &mut Artifacts, o: &mut Outcome) -> Result<(), CliError> {
    let records = match &cfg.numeric.input {
        Some(p) => read_sweep_csv(p)?,
        None => run_sweep(cfg, out, o)?.0.records,
    };
    let f: FitResult = fit_power_law(&records, cfg.numeric.fit_window)?;
    let expected = 2.0 / (cfg.theta.gamma() + 1.0);
    let rel = (f.exponent - expected).abs() / expected;
    if let Some(tol) = cfg.numeric.exponent_tol {
        o.check(
            "exponent",
            rel <= tol,
            format!("{} vs 2/(γ+1) = {expected}, relative {rel:e}", f.exponent),
        );
    }
    o.resolved.insert("exponent".into(), json!(f.exponent));

    #[derive(Serialize)]
    struct Row {
        beta: f64,
        alpha: f64,
        deficit: f64,
        rescaled_deficit: f64,
    }
    let rows: Vec<Row> = records
        .iter()
        .zip(&f.rescaled)
        .map(|(r, s)| Row {
            beta: r.beta,
            alpha: r.alpha,
            deficit: r.deficit,
            rescaled_deficit: *s,
        })
        .collect();
    out.csv("fit.csv", &rows)?;
    out.json(
        "fit.json",
        &json!({ "fit": f, "expected_exponent": expected, "relative_error": rel }),
    )?;
    let data: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.beta.ln(), r.deficit.ln()))
        .collect();
    out.plot("fit_data.dat", &data)?;
    let (lo, hi) = f.window;
    let line: Vec<(f64, f64)> = [lo, hi]
        .iter()
        .map(|b| (b.ln(), f.constant.ln() + f.exponent * b.ln()))
        .collect();
    out.plot("fit_line.dat", &line)?;
    Ok(())
}

fn desym_gap(cfg: &ExperimentConfig, out: &mut Artifacts, o: &mut Outcome) -> Result<(), CliError> {
    let theta = &cfg.theta;
    let gamma = theta.gamma();
    let policy = cfg.policy();

    #[derive(Serialize)]
    struct Row {
        beta: f64,
        alpha: f64,
        n: usize,
        #[serde(rename = "L")]
        cutoff_l: f64,
        norm: f64,
        ratio: f64,
        schur: f64,
    }
    let mut rows = Vec::new();
    for beta in cfg.betas()? {
        // K_β − K^{(l)}_β is unitarily equivalent to B_α − B^{(l)}_α
        let alpha = rescale_beta_to_alpha(beta, gamma)?;
        let grid = policy.grid(theta, alpha)?;
        o.grids.push(GridRecord::new(format!("β={beta}"), &grid));
        let a = nystrom(&KernelSpec::b_alpha(theta.clone(), alpha)?, &grid)?;
        let b = nystrom(&KernelSpec::b_alpha_desym(theta.clone(), alpha)?, &grid)?;
        let norm = operator_norm_diff(&a, &b)?;
        let diff = DiscreteOperator::from_matrix(
            a.matrix().sub(b.matrix()),
            grid.clone(),
            false,
            "B − B^(l)",
        )?;
        rows.push(Row {
            beta,
            alpha,
            n: grid.len(),
            cutoff_l: grid.cutoff_l(),
            norm,
            ratio: norm / beta.powf(2.0 / gamma),
            schur: schur_bound_operator(&diff).bound,
        });
    }
    let growth: Vec<f64> = rows
        .windows(2)
        .map(|w| {
            (w[1].ratio / w[0].ratio).powf(std::f64::consts::LN_2 / (w[0].beta / w[1].beta).ln())
        })
        .collect();
    let worst = growth.iter().cloned().fold(0.0, f64::max);
    o.check(
        "ratio_bounded",
        growth.iter().all(|g| *g <= 1.0 + cfg.numeric.growth_tol),
        format!("largest growth per halving {worst}"),
    );
    out.csv("desym_gap.csv", &rows)?;
    out.json(
        "desym_gap.json",
        &json!({ "rows": rows, "growth_per_halving": growth }),
    )?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.beta, r.ratio)).collect();
    out.plot("desym_ratio.dat", &pts)?;
    Ok(())
}

fn localization(
    cfg: &ExperimentConfig,
    out: &mut Artifacts,
    o: &mut Outcome,
) -> Result<(), CliError> {
    let (s, reference) = run_sweep(cfg, out, o)?;
    let lambda1 = reference.lambda(1);
    let gamma = cfg.theta.gamma();
    let fr: Vec<f64> = cfg
        .numeric
        .fourier_radii
        .iter()
        .map(|m| m * lambda1)
        .collect();
    let take = cfg.numeric.smallest.min(s.records.len());
    let mut reports = Vec::new();
    for r in &s.records[s.records.len() - take..] {
        reports.push(localization_report(
            r,
            gamma,
            lambda1,
            &fr,
            &cfg.numeric.spatial_radii,
        )?);
    }
    let need = gamma - cfg.numeric.decay_slack;
    o.check(
        "fourier_mass",
        reports.iter().all(|r| r.fourier_passed),
        format!(
            "{} applicable radii checked",
            reports
                .iter()
                .flat_map(|r| &r.fourier)
                .filter(|f| f.applicable)
                .count()
        ),
    );
    o.check(
        "spatial_decay",
        reports
            .iter()
            .all(|r| r.decay_exponent.is_some_and(|d| d >= need)),
        format!(
            "exponents {:?}, required ≥ {need}",
            reports.iter().map(|r| r.decay_exponent).collect::<Vec<_>>()
        ),
    );

    #[derive(Serialize)]
    struct Row {
        alpha: f64,
        kind: &'static str,
        radius: f64,
        mass: f64,
        bound: Option<f64>,
        applicable: Option<bool>,
        passed: Option<bool>,
    }
    let mut rows = Vec::new();
    for r in &reports {
        for f in &r.fourier {
            rows.push(Row {
                alpha: r.alpha,
                kind: "fourier",
                radius: f.radius,
                mass: f.mass,
                bound: Some(f.bound),
                applicable: Some(f.applicable),
                passed: Some(f.passed),
            });
        }
        for m in &r.spatial {
            rows.push(Row {
                alpha: r.alpha,
                kind: "spatial",
                radius: m.radius,
                mass: m.mass,
                bound: None,
                applicable: None,
                passed: None,
            });
        }
    }
    out.csv("localization.csv", &rows)?;
    out.json("localization.json", &reports)?;
    for (i, radius) in fr.iter().enumerate() {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .map(|r| (r.alpha, r.fourier[i].mass))
            .collect();
        out.plot(&format!("fourier_R{radius:.4}.dat"), &pts)?;
    }
    for (i, radius) in cfg.numeric.spatial_radii.iter().enumerate() {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .map(|r| (r.alpha, r.spatial[i].mass))
            .collect();
        out.plot(&format!("spatial_R{radius}.dat"), &pts)?;
    }
    Ok(())
}

fn parity(cfg: &ExperimentConfig, out: &mut Artifacts, o: &mut Outcome) -> Result<(), CliError> {
    let policy = cfg.policy();
    let k = cfg.numeric.k.max(2);
    let mut reports = Vec::new();
    for beta in cfg.betas()? {
        let r = parity_split(&cfg.theta, beta, &policy, k)?;
        o.grids.push(GridRecord {
            label: format!("β={beta}"),
            n: r.n,
            cutoff_l: r.cutoff_l,
            scheme: Scheme::BandLimited,
        });
        o.check(
            "even_dominates",
            r.even_dominates,
            format!("β = {beta}: λe₁ = {}, λo₁ = {}", r.even[0], r.odd[0]),
        );
        if let Some(dev) = r.block_check {
            o.check(
                "block_spectrum",
                dev <= 1e-10,
                format!("β = {beta}: deviation {dev:e}"),
            );
        }
        reports.push(r);
    }

    #[derive(Serialize)]
    struct Row {
        beta: f64,
        j: usize,
        even: f64,
        odd: f64,
    }
    let rows: Vec<Row> = reports
        .iter()
        .flat_map(|r| {
            r.even
                .iter()
                .zip(&r.odd)
                .enumerate()
                .map(move |(j, (e, d))| Row {
                    beta: r.beta,
                    j: j + 1,
                    even: *e,
                    odd: *d,
                })
        })
        .collect();
    out.csv("parity.csv", &rows)?;
    out.json("parity.json", &reports)?;
    let even: Vec<(f64, f64)> = reports.iter().map(|r| (r.beta, r.even[0])).collect();
    let odd: Vec<(f64, f64)> = reports.iter().map(|r| (r.beta, r.odd[0])).collect();
    out.plot("parity_even.dat", &even)?;
    out.plot("parity_odd.dat", &odd)?;
    Ok(())
}

fn conjecture(
    cfg: &ExperimentConfig,
    out: &mut Artifacts,
    o: &mut Outcome,
) -> Result<(), CliError> {
    let j_max = cfg.numeric.j_max;
    let reference = reference_lambda(cfg, j_max + 1, o)?;
    let betas = cfg.betas()?;
    let report = conjecture_61(&cfg.theta, &betas, j_max, &cfg.policy(), &reference)?;
    for row in &report.rows {
        if row.crossing {
            o.warnings.push(format!(
                "j = {}: eigenvector overlap fell below tracking threshold",
                row.j
            ));
        }
        if row.degenerate {
            o.warnings
                .push(format!("j = {}: degenerate model level", row.j));
        }
    }

    #[derive(Serialize)]
    struct Row {
        j: usize,
        beta: f64,
        alpha: f64,
        rescaled_deficit: f64,
        lambda_model: f64,
        overlap: f64,
    }
    let mut rows = Vec::new();
    for row in &report.rows {
        for (i, (&beta, &alpha)) in report.betas.iter().zip(&report.alphas).enumerate() {
            rows.push(Row {
                j: row.j,
                beta,
                alpha,
                rescaled_deficit: row.rescaled[i],
                lambda_model: row.lambda_model,
                overlap: row.overlaps[i],
            });
        }
    }
    out.csv("conjecture.csv", &rows)?;
    out.json(
        "conjecture.json",
        &json!({ "report": report, "reference": reference }),
    )?;
    for row in &report.rows {
        let pts: Vec<(f64, f64)> = report
            .alphas
            .iter()
            .copied()
            .zip(row.rescaled.iter().copied())
            .collect();
        out.plot(&format!("conjecture_j{}.dat", row.j), &pts)?;
        let (lo, hi) = report
            .alphas
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(l, h), a| (l.min(*a), h.max(*a)));
        out.plot(
            &format!("lambda_j{}.dat", row.j),
            &[(lo, row.lambda_model), (hi, row.lambda_model)],
        )?;
    }
    Ok(())
}

fn negative(cfg: &ExperimentConfig, out: &mut Artifacts, o: &mut Outcome) -> Result<(), CliError> {
    let report = negative_scan(&cfg.theta, &cfg.betas()?, &cfg.policy())?;
    for r in &report.rows {
        let scheme = if r.beta == 0.0 {
            Scheme::TrapezoidUniform
        } else {
            Scheme::BandLimited
        };
        o.grids.push(GridRecord {
            label: format!("β={}", r.beta),
            n: r.n,
            cutoff_l: r.cutoff_l,
            scheme,
        });
    }
    out.csv("negative_scan.csv", &report.rows)?;
    out.json("negative_scan.json", &report)?;
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .map(|r| (r.beta, r.min_eigenvalue))
        .collect();
    out.plot("negative_scan.dat", &pts)?;
    Ok(())
}

fn validate_theta(
    cfg: &ExperimentConfig,
    out: &mut Artifacts,
    o: &mut Outcome,
) -> Result<(), CliError> {
    let report = validate(&cfg.theta, cfg.numeric.samples);
    o.check("theta_valid", report.passed, report.failures.join("; "));
    o.warnings.extend(report.failures.iter().cloned());
    out.json("validation.json", &report)?;
    Ok(())
}
