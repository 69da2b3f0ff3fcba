//! Dispatch from a verb and a validated config to the library backends.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use twistcohom::field::parse_rational;
use twistcohom::foliation::mapping_torus::MEAN_CURVATURE_TOLERANCE;
use twistcohom::foliation::{positivity_gate, twist_invariance, BasicTwist, CurvatureReport};
use twistcohom::identities::{
    adjointness, bochner, cartan, d_assemblies, d_squared, delta_squared, dirac_assemblies, dirac_square,
    interior_nabla, laplacian_asymmetry, leibniz, lie_derivative_formula, weitzenbock,
};
use twistcohom::report::{euler_sum, GoldenRecord, ScanPoint};
use twistcohom::simplicial::{bundled_cocycle, bundled_complex, data, twisted_betti};
use twistcohom::torus::{twist_json, LCS_TOLERANCE};
use twistcohom::{
    BettiReport, EdgeCocycle, Error, FrameGeometry, GateRecord, LieAlgebraModel, MappingTorusModel, ResidualRecord,
    SimplicialComplex, TorusModel, TrigPoly, TwistClass, TwistedCalculus,
};

use crate::config::{Backend, Coefficient, MappingTorusConfig, RunConfig, Term, TermKind, TorusConfig};
use crate::CliError;

/// Bochner forms are sampled on this many points per axis.
const BOCHNER_GRID: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Verb {
    Betti,
    Verify,
    Scan,
    Gate,
    Lcs,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Betti => "betti",
            Verb::Verify => "verify",
            Verb::Scan => "scan",
            Verb::Gate => "gate",
            Verb::Lcs => "lcs",
        }
    }

    fn accepts(self, backend: Backend) -> bool {
        use Backend::*;
        match self {
            Verb::Betti => matches!(backend, Torus | Simplicial | MappingTorus),
            Verb::Verify => matches!(backend, Torus | MappingTorus),
            Verb::Scan => backend == MappingTorus,
            Verb::Gate => matches!(backend, Torus | MappingTorus | LieGate),
            Verb::Lcs => backend == LcsCheck,
        }
    }
}

/// Expected dimensions, either for the configured twist or per scanned coefficient.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Golden {
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    #[serde(default)]
    pub entries: Vec<GoldenEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenEntry {
    pub twist: Coefficient,
    pub dims: Vec<usize>,
}

/// Runs one verb. The worker pool is scoped to the call.
pub fn run(verb: Verb, config: &RunConfig) -> Result<BettiReport, CliError> {
    config.validate()?;
    if !verb.accepts(config.backend) {
        return Err(CliError::Validation(format!(
            "verb {} does not apply to backend {}",
            verb.name(),
            config.backend.name()
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(1))
        .build()
        .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;
    let start = Instant::now();
    let mut report = pool.install(|| dispatch(verb, config))?;
    report.model = json!({
        "verb": verb.name(),
        "config": config.echo(),
        "resolved": report.model,
    });
    report.seed = Some(config.seed);
    if let Some(path) = &config.golden {
        compare_golden(&mut report, &load_golden(&config.resolve(path))?, config)?;
    }
    report.finalize();
    if verb == Verb::Lcs {
        report.passed &= report.gates.iter().all(|g| g.verdict);
    }
    if config.output.timings {
        let mut t = BTreeMap::new();
        t.insert("total".to_string(), start.elapsed().as_secs_f64() * 1e3);
        report.timings_ms = Some(t);
    }
    log::info!("{} {}: passed = {}", verb.name(), config.backend.name(), report.passed);
    Ok(report)
}

/// The identity suite; `run(Verb::Verify, ..)` under another name.
pub fn verify_suite(config: &RunConfig) -> Result<BettiReport, CliError> {
    run(Verb::Verify, config)
}

fn dispatch(verb: Verb, config: &RunConfig) -> Result<BettiReport, CliError> {
    match (verb, config.backend) {
        (Verb::Betti, Backend::Torus) => torus_betti(config),
        (Verb::Betti, Backend::Simplicial) => simplicial_betti(config),
        (Verb::Betti, Backend::MappingTorus) => mapping_torus_betti(config),
        (Verb::Verify, Backend::Torus) => {
            let mut report = torus_betti(config)?;
            let (_, theta) = torus_model(section(&config.torus))?;
            let t = TorusModel::new(theta.constant.len(), config.verify_radius)?;
            let calc = t.calculus(&theta)?;
            let tol = if theta.has_potential() {
                config.tolerances.residual_variable
            } else {
                config.tolerances.residual
            };
            identity_suite(&mut report, &calc, config, tol)?;
            if theta.has_potential() {
                let bar = TwistClass::constant(theta.constant.clone(), theta.constant.len());
                let r = t.intertwining_residual(&bar, &theta.potential, config.verify_radius)?;
                report.residuals.push(ResidualRecord::new("gauge_intertwining", r, tol));
            }
            Ok(report)
        }
        (Verb::Verify, Backend::MappingTorus) => {
            let mut report = mapping_torus_betti(config)?;
            let c = section(&config.mapping_torus);
            let model = mapping_torus_model(c, config.verify_radius)?;
            let calc = model.calculus(&basic_twist(c, &model))?;
            identity_suite(&mut report, &calc, config, config.tolerances.residual_variable)?;
            Ok(report)
        }
        (Verb::Scan, Backend::MappingTorus) => mapping_torus_scan(config),
        (Verb::Gate, Backend::LieGate) => lie_gate(config),
        (Verb::Gate, Backend::Torus) => {
            let c = section(&config.torus);
            let r = CurvatureReport::from_geometry(&FrameGeometry::flat_torus(c.dim)?);
            Ok(curvature_report("torus", r, config))
        }
        (Verb::Gate, Backend::MappingTorus) => {
            let c = section(&config.mapping_torus);
            let model = mapping_torus_model(c, c.cutoff)?;
            let twist = resolve(&c.twist, &model);
            let r = model.transverse_curvature(&[0.0, twist])?;
            let mut report = curvature_report("mapping_torus", r, config);
            report.model = serde_json::to_value(&model).expect("model is serializable");
            Ok(report)
        }
        (Verb::Lcs, Backend::LcsCheck) => lcs(config),
        _ => unreachable!("verb/backend pairs are checked before dispatch"),
    }
}

fn section<T>(s: &Option<T>) -> &T {
    s.as_ref().expect("validated config has the backend section")
}

pub fn trig_poly(terms: &[Term], dim: usize) -> TrigPoly {
    terms.iter().fold(TrigPoly::zero(dim), |acc, t| {
        acc.add(&match t.kind {
            TermKind::Sin => TrigPoly::sin(&t.mode, t.amplitude),
            TermKind::Cos => TrigPoly::cos(&t.mode, t.amplitude),
        })
    })
}

/// The torus model with its cutoff raised to the kernel-support radius when padding is on.
fn torus_model(c: &TorusConfig) -> Result<(TorusModel, TwistClass), CliError> {
    let mut t = TorusModel::new(c.dim, c.cutoff)?;
    let potential = (!c.potential.is_empty()).then(|| trig_poly(&c.potential, c.dim));
    let theta = t.twist(&c.theta, potential);
    let required = t.calculus(&theta)?.required_radius();
    if c.pad && (t.cutoff as f64) < required {
        t.cutoff = required.ceil() as usize;
    }
    Ok((t, theta))
}

fn torus_betti(config: &RunConfig) -> Result<BettiReport, CliError> {
    let c = section(&config.torus);
    let (t, theta) = torus_model(c)?;
    let t = t.with_rank_tol(config.tolerances.rank);
    let mut report = t.harmonic_dims(&theta)?;
    if t.cutoff != c.cutoff {
        report.notes.push(format!(
            "cutoff raised from {} to {} to cover exp(-f)",
            c.cutoff, t.cutoff
        ));
    }
    Ok(report)
}

fn load_text(config: &RunConfig, location: &str) -> Result<String, CliError> {
    let path = config.resolve(Path::new(location));
    std::fs::read_to_string(&path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn simplicial_betti(config: &RunConfig) -> Result<BettiReport, CliError> {
    let c = section(&config.simplicial);
    let complex = if data::complex_names().contains(&c.complex.as_str()) {
        bundled_complex(&c.complex)?
    } else {
        SimplicialComplex::parse(&load_text(config, &c.complex)?)?
    };
    let cocycle = match &c.cocycle {
        None => EdgeCocycle::zero(&complex),
        Some(name) if data::cocycle_names().contains(&name.as_str()) => bundled_cocycle(name)?,
        Some(path) => EdgeCocycle::parse(&load_text(config, path)?)?,
    };
    let mut report = twisted_betti(&complex, &cocycle, config.tolerances.rank)?;
    report.model = json!({
        "complex": c.complex,
        "f_vector": complex.f_vector(),
    });
    Ok(report)
}

fn mapping_torus_model(c: &MappingTorusConfig, cutoff: usize) -> Result<MappingTorusModel, CliError> {
    Ok(match (&c.matrix, &c.rates, c.leaf_rate) {
        (Some(a), _, _) => MappingTorusModel::from_matrix(*a, cutoff)?,
        (None, Some(rates), Some(nu)) => MappingTorusModel::from_rates(rates.clone(), nu, cutoff)?,
        _ => unreachable!("validated config names a matrix or rates"),
    })
}

fn resolve(c: &Coefficient, model: &MappingTorusModel) -> f64 {
    match c {
        Coefficient::Value(v) => *v,
        Coefficient::Symbol(_) => model.leaf_rate,
    }
}

fn basic_twist(c: &MappingTorusConfig, model: &MappingTorusModel) -> BasicTwist {
    BasicTwist::new(resolve(&c.twist, model)).with_potential(trig_poly(&c.potential, 1))
}

fn mapping_torus_betti(config: &RunConfig) -> Result<BettiReport, CliError> {
    let c = section(&config.mapping_torus);
    let model = mapping_torus_model(c, c.cutoff)?;
    let gamma = basic_twist(c, &model);
    let s = model.basic_twisted_betti(&gamma, config.tolerances.rank)?;
    let mut report = BettiReport::new("mapping_torus", s.dims, config.tolerances.rank);
    report.model = serde_json::to_value(&model).expect("model is serializable");
    let mut twist = twist_json(&TwistClass::new(vec![gamma.c], gamma.potential.clone()));
    twist["c"] = json!(gamma.c);
    report.twist = twist;
    report.expected_euler = Some(0);
    report.spectra = s.spectra;
    let k = model.mean_curvature()?;
    report.residuals.push(ResidualRecord::new(
        "mean_curvature_adjoint",
        k.residual,
        MEAN_CURVATURE_TOLERANCE,
    ));
    report.notes.push(format!(
        "leaf rate kappa_t = {:.15}; cutoff {} against required radius {:.4}",
        model.leaf_rate, s.radius, s.required_radius
    ));
    Ok(report)
}

fn mapping_torus_scan(config: &RunConfig) -> Result<BettiReport, CliError> {
    let c = section(&config.mapping_torus);
    let model = mapping_torus_model(c, c.cutoff)?;
    let values: Vec<f64> = match &c.scan {
        Some(v) => v.iter().map(|x| resolve(x, &model)).collect(),
        None => model.scan_grid(),
    };
    let scan = model.top_degree_scan(&values, config.tolerances.rank)?;
    let mut report = BettiReport::new("mapping_torus", vec![], config.tolerances.rank);
    report.model = serde_json::to_value(&model).expect("model is serializable");
    report.twist = json!({ "scanned": "c dt" });
    let worst_euler = scan
        .iter()
        .map(|p| euler_sum(&p.dims).unsigned_abs())
        .max()
        .unwrap_or(0);
    report
        .residuals
        .push(ResidualRecord::new("scan_euler_sum", worst_euler as f64, 0.0));
    report.gates.push(top_degree_gate(&scan, model.leaf_rate));
    report.scan = scan;
    Ok(report)
}

/// Where the top-degree group survives, and whether that is exactly `c = kappa`.
fn top_degree_gate(scan: &[ScanPoint], kappa: f64) -> GateRecord {
    let flagged: Vec<f64> = scan.iter().filter(|p| p.flagged).map(|p| p.parameter).collect();
    let only_kappa = flagged.iter().all(|&c| (c - kappa).abs() < 1e-12);
    let detail = if flagged.is_empty() {
        "top-degree group vanishes at every scanned c".to_string()
    } else if only_kappa {
        format!(
            "top-degree group nonzero only at c = kappa = {kappa:.12}, dual to the untwisted degree-0 class; \
             both c dt and the shifted twist (c - kappa/2) dt are closed and not exact there, so a top-degree \
             vanishing statement for closed non-exact twists must exclude this class under either convention"
        )
    } else {
        format!("top-degree group nonzero at c in {flagged:?}")
    };
    GateRecord::new("top_degree_nonvanishing", !flagged.is_empty(), detail)
        .with_value("flagged_points", flagged.len() as f64)
        .with_value("kappa", kappa)
}

fn identity_suite(
    report: &mut BettiReport,
    calc: &TwistedCalculus,
    config: &RunConfig,
    tol: f64,
) -> Result<(), CliError> {
    let r = config.verify_radius;
    let q = calc.q();
    let mut rng = TwistedCalculus::rng(config.seed);
    let mut direction = || (0..q).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
    let (v, w) = (direction(), direction());
    let records = [
        ("d_squared", d_squared(calc, r)),
        ("delta_squared", delta_squared(calc, r)),
        ("adjointness", adjointness(calc, r)),
        ("d_frame_vs_coordinates", d_assemblies(calc, r)),
        ("dirac_squared", dirac_square(calc, r)),
        ("dirac_clifford_vs_sum", dirac_assemblies(calc, r)),
        ("laplacian_self_adjoint", laplacian_asymmetry(calc, r)),
        ("leibniz", leibniz(calc, r, &v, &w)),
        ("interior_nabla", interior_nabla(calc, r, &v, &w)),
        ("lie_derivative", lie_derivative_formula(calc, r)),
        ("weitzenbock", weitzenbock(calc, r)),
        ("curvature_twist", twist_invariance(calc.geometry(), calc.theta(), r)?),
    ];
    for (name, value) in records {
        report.residuals.push(ResidualRecord::new(name, value, tol));
    }
    match cartan(calc, r) {
        Ok(c) => {
            report.residuals.push(ResidualRecord::new("cartan", c.cartan, tol));
            report
                .residuals
                .push(ResidualRecord::new("commute_d", c.commute_d, tol));
            report
                .residuals
                .push(ResidualRecord::new("commute_delta", c.commute_delta, tol));
            report.notes.push(format!(
                "|theta|^2 = {}, eta(theta) = {}",
                c.theta_norm_squared, c.eta_theta
            ));
        }
        Err(e @ (Error::NotParallel { .. } | Error::Unsupported(_))) => {
            report.notes.push(format!("Cartan and commutation checks skipped: {e}"));
        }
        Err(e) => return Err(e.into()),
    }
    let b = bochner(calc, r, config.bochner_forms, config.seed, BOCHNER_GRID);
    report
        .residuals
        .push(ResidualRecord::new("bochner", b.residual, config.tolerances.bochner));
    let mut gate = GateRecord::new(
        "bochner_vanishing",
        b.vanishing_verdict,
        format!(
            "{} random forms; beta sampled at {} grid points",
            config.bochner_forms, b.samples
        ),
    );
    for (p, (lo, hi)) in b.min_eigenvalues.iter().zip(&b.max_eigenvalues).enumerate() {
        gate = gate
            .with_value(&format!("min_eigenvalue_degree_{}", p + 1), *lo)
            .with_value(&format!("max_eigenvalue_degree_{}", p + 1), *hi);
    }
    report.gates.push(gate);
    report
        .notes
        .push(format!("identities checked on the mode box of radius {r}"));
    Ok(())
}

fn curvature_report(backend: &str, r: CurvatureReport, config: &RunConfig) -> BettiReport {
    let mut report = BettiReport::new(backend, vec![], config.tolerances.rank);
    for t in &r.twist_residuals {
        report.residuals.push(ResidualRecord::new(
            format!("curvature_twist_c={}", t.c),
            t.residual,
            config.tolerances.residual,
        ));
    }
    let mut gate = positivity_gate(&r);
    for e in &r.sectional {
        gate = gate.with_value(&format!("sectional_{}_{}", e.i, e.j), e.value);
        if let Some(exact) = &e.exact {
            report.notes.push(format!("K(e{}, e{}) = {exact}", e.i, e.j));
        }
    }
    report.gates.push(gate);
    report
        .notes
        .push(format!("curvature operator eigenvalues {:?}", r.operator_eigenvalues));
    report
}

fn lie_gate(config: &RunConfig) -> Result<BettiReport, CliError> {
    let c = section(&config.lie_gate);
    let mut algebra = if c.algebra == "so3" {
        LieAlgebraModel::so3()
    } else if let Some(n) = c.algebra.strip_prefix("abelian").and_then(|n| n.parse().ok()) {
        LieAlgebraModel::abelian(n)?
    } else {
        LieAlgebraModel::parse(&load_text(config, &c.algebra)?)?
    };
    if let Some(s) = &c.scale {
        let factor = parse_rational(s).ok_or_else(|| CliError::Validation(format!("bad scale `{s}`")))?;
        algebra = algebra.scaled(&factor);
    }
    let r = algebra.biinvariant_curvature()?;
    let mut report = curvature_report("lie_gate", r, config);
    report.model = json!({
        "algebra": c.algebra,
        "dim": algebra.dim(),
        "biinvariant": algebra.is_biinvariant(),
        "structure_constants": algebra.to_text(),
    });
    Ok(report)
}

fn lcs(config: &RunConfig) -> Result<BettiReport, CliError> {
    let c = section(&config.lcs_check);
    let t = TorusModel::new(4, 1)?;
    let mut omega = t.standard_symplectic()?;
    if c.form == "conformal" {
        omega = t.conformal(&omega, &trig_poly(&c.form_potential, 4));
    }
    let potential = (!c.potential.is_empty()).then(|| trig_poly(&c.potential, 4));
    let theta = t.twist(&c.theta, potential);
    let r = t.lcs_check(&omega, &theta, c.grid)?;
    let mut report = BettiReport::new("lcs_check", vec![], config.tolerances.rank);
    report.twist = twist_json(&theta);
    report.model = json!({ "form": c.form, "form_potential": c.form_potential, "grid": c.grid });
    report
        .residuals
        .push(ResidualRecord::new("d_theta_omega", r.residual, LCS_TOLERANCE));
    report.gates.push(
        GateRecord::new(
            "lcs",
            r.passed,
            if r.passed {
                "omega is d_theta-closed and nondegenerate".to_string()
            } else if !r.closed {
                "d_theta omega does not vanish".to_string()
            } else {
                "omega degenerates somewhere on the grid".to_string()
            },
        )
        .with_value("residual", r.residual)
        .with_value("min_determinant", r.min_determinant),
    );
    Ok(report)
}

pub fn load_golden(path: &Path) -> Result<Golden, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read golden file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("golden file {}: {e}", path.display())))
}

fn compare_golden(report: &mut BettiReport, golden: &Golden, config: &RunConfig) -> Result<(), CliError> {
    if let Some(dims) = &golden.dims {
        report.golden.push(GoldenRecord {
            name: "dims".into(),
            expected: json!(dims),
            actual: json!(report.dims),
            passed: &report.dims == dims,
        });
    }
    if golden.entries.is_empty() {
        return Ok(());
    }
    let c = config
        .mapping_torus
        .as_ref()
        .ok_or_else(|| CliError::Validation("golden entries need a mapping_torus model".into()))?;
    let model = mapping_torus_model(c, c.cutoff)?;
    for e in &golden.entries {
        let value = resolve(&e.twist, &model);
        let actual = report
            .scan
            .iter()
            .find(|p| (p.parameter - value).abs() < 1e-12)
            .map(|p| json!(p.dims))
            .unwrap_or(Value::Null);
        report.golden.push(GoldenRecord {
            name: format!("dims at c = {}", serde_json::to_string(&e.twist).expect("serializable")),
            passed: actual == json!(e.dims),
            expected: json!(e.dims),
            actual,
        });
    }
    Ok(())
}
