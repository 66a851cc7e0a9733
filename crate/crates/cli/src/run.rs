//! Executes a validated [`RunConfig`] and collects check records. Numerical
//! errors from the engine become failed records, never panics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sasaki_herm_core::einstein::{calabi_eckmann_einstein_example, star_scalar_prediction, verdict_for_model, EinsteinVerdict};
use sasaki_herm_core::hermitian::{HermitianParams, ProductHermitianModel};
use sasaki_herm_core::oracle::{
    compare_with_algebraic, curvature_identity_residuals, field_identity_residuals, ProductChart, StencilConfig,
};

use crate::config::{Command, RunConfig, ScanCheck};
use crate::report::{CheckRecord, Quantities, Quantity};

/// Radius of the coordinate ball that sample points are drawn from.
pub const SAMPLE_RADIUS: f64 = 0.8;

/// `count` points uniform in the ball of radius [`SAMPLE_RADIUS`] in `R^dim`,
/// drawn by rejection from ChaCha8 seeded with `seed`.
pub fn sample_points(seed: u64, dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-SAMPLE_RADIUS..SAMPLE_RADIUS)).collect();
            if v.iter().map(|x| x * x).sum::<f64>() <= SAMPLE_RADIUS * SAMPLE_RADIUS {
                break v;
            }
        })
        .collect()
}

#[derive(Default)]
struct Collector {
    checks: Vec<CheckRecord>,
    quantities: Quantities,
}

impl Collector {
    fn check(&mut self, name: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) {
        self.checks.push(CheckRecord::new(name, anchor, residual, tolerance));
    }

    fn failed(&mut self, name: impl Into<String>, anchor: &str, tolerance: f64, err: impl std::fmt::Display) {
        let name = name.into();
        self.quantities.push(format!("{name}_error"), Quantity::Text(err.to_string()));
        self.checks.push(CheckRecord::failed(name, anchor, tolerance));
    }

    /// Records a lower bound as `residual = max(0, bound − value)` with zero
    /// tolerance.
    fn at_least(&mut self, name: &str, anchor: &str, value: f64, bound: f64) {
        self.check(name, anchor, (bound - value).max(0.0), 0.0);
    }
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> (Vec<CheckRecord>, Quantities) {
    let mut out = Collector::default();
    match cfg.command {
        Command::VerifyFactor => verify_factor(cfg, &mut out),
        Command::VerifyProduct => verify_product(cfg, &mut out),
        Command::Einstein => einstein(cfg, &mut out),
        Command::Scan => scan(cfg, &mut out),
        Command::OracleCompare => oracle_compare(cfg, &mut out),
        Command::Example => example(cfg, &mut out),
    }
    (out.checks, out.quantities)
}

fn single(cfg: &RunConfig) -> (f64, f64) {
    (cfg.a.single().expect("validated"), cfg.b.single().expect("validated"))
}

/// Algebraic tolerances scale with the size of the curvature involved.
fn scaled_tol(cfg: &RunConfig, magnitude: f64) -> f64 {
    cfg.tol_algebraic * magnitude.max(1.0)
}

fn verify_factor(cfg: &RunConfig, out: &mut Collector) {
    let m = match cfg.factor.build(cfg.p) {
        Ok(m) => m,
        Err(e) => return out.failed("factor", "factor model exists", cfg.tol_algebraic, e),
    };
    let tol = scaled_tol(cfg, m.curvature().max_abs());
    match m.structure_residuals() {
        Ok(r) => {
            out.check("eta_of_xi", "η(ξ) = 1", r.eta_of_xi, tol);
            out.check("eta_metric_dual", "η = g(ξ, ·)", r.eta_metric_dual, tol);
            out.check("phi_squared", "φ² = −I + ξ⊗η", r.phi_squared, tol);
            out.check("phi_xi", "φξ = 0", r.phi_xi, tol);
            out.check("eta_phi", "η∘φ = 0", r.eta_phi, tol);
            out.check(
                "metric_compatibility",
                "g(φX, φY) = g(X, Y) − η(X)η(Y)",
                r.metric_compatibility,
                tol,
            );
            out.check("reeb_curvature", "R(X, Y)ξ = η(Y)X − η(X)Y", r.reeb_curvature, tol);
            out.check("reeb_ricci", "ρ(ξ, X) = 2n η(X)", r.reeb_ricci, tol);
            out.check("ricci_trace", "ρ = trace of R", r.ricci_trace, tol);
        }
        Err(e) => out.failed("structure", "almost contact metric structure", tol, e),
    }
    out.check(
        "curvature_symmetries",
        "algebraic curvature symmetries",
        m.curvature().symmetry_residuals().max(),
        tol,
    );
    match m.identity_residuals() {
        Ok(r) => {
            out.check(
                "phi_curvature",
                "R(X,Y,φZ,W) − R(φZ,X,Y,W) in terms of g and φ",
                r.phi_curvature,
                tol,
            );
            out.check(
                "phi_trace_difference",
                "Σ R(X,Y,φe_i,e_i) − Σ R(φe_i,X,Y,e_i) = 3g(φX,Y)",
                r.phi_trace_difference,
                tol,
            );
            out.check("phi_trace", "Σ R(X,Y,e_i,φe_i) = −2g(φX,Y)", r.phi_trace, tol);
            out.check(
                "phi_double_trace",
                "Σ R(X,φY,e_i,φe_i) = −2(g(X,Y) − η(X)η(Y))",
                r.phi_double_trace,
                tol,
            );
        }
        Err(e) => out.failed("phi_curvature_identities", "φ-curvature identities", tol, e),
    }
    match m.classify_eta_einstein() {
        Ok(c) => {
            out.check("eta_einstein", "ρ = A g + B η⊗η", c.residual, tol);
            out.quantities.float("eta_einstein_a", c.a);
            out.quantities.float("eta_einstein_b", c.b);
        }
        Err(e) => out.failed("eta_einstein", "ρ = A g + B η⊗η", tol, e),
    }
    if let Ok(s) = m.scalar_curvature() {
        out.quantities.float("scalar_curvature", s);
    }

    let Some(chart) = cfg.factor.chart(cfg.p) else {
        out.quantities.push("fd_chart", Quantity::Text("unavailable".into()));
        return;
    };
    let stencil = StencilConfig::default();
    for (i, u) in sample_points(cfg.seed, chart.dim(), cfg.samples).iter().enumerate() {
        match field_identity_residuals(&chart, u, &stencil) {
            Ok(r) => out.check(
                format!("fd_field_identities[{i}]"),
                "∇ξ = −φ, (∇_Xφ)Y = g(X,Y)ξ − η(Y)X, dη = g(·, φ·)",
                r.max(),
                cfg.tol_fd / 10.0,
            ),
            Err(e) => out.failed(
                format!("fd_field_identities[{i}]"),
                "Sasakian field identities",
                cfg.tol_fd / 10.0,
                e,
            ),
        }
        match curvature_identity_residuals(&chart, u, &stencil) {
            Ok(r) => out.check(
                format!("fd_curvature_identities[{i}]"),
                "R(X, Y)ξ = η(Y)X − η(X)Y, ρ(ξ, ξ) = 2n",
                r.max(),
                cfg.tol_fd,
            ),
            Err(e) => out.failed(
                format!("fd_curvature_identities[{i}]"),
                "Sasakian curvature identities",
                cfg.tol_fd,
                e,
            ),
        }
    }
}

fn build_product(cfg: &RunConfig, a: f64, b: f64) -> sasaki_herm_core::Result<ProductHermitianModel> {
    let m = cfg.factor.build(cfg.p)?;
    let mp = cfg.factor_prime.build(cfg.q)?;
    ProductHermitianModel::build(&m, &mp, HermitianParams::new(a, b)?)
}

fn verify_product(cfg: &RunConfig, out: &mut Collector) {
    let (a, b) = single(cfg);
    let model = match build_product(cfg, a, b) {
        Ok(m) => m,
        Err(e) => return out.failed("product", "product structure exists", cfg.tol_algebraic, e),
    };
    let tol = scaled_tol(cfg, model.curvature().max_abs());
    match model.residuals() {
        Ok(r) => {
            out.check("j_squared", "J̄² = −I", r.j_squared, tol);
            out.check("compatibility", "ḡ(J̄X, J̄Y) = ḡ(X, Y)", r.compatibility, tol);
            out.check(
                "curvature_symmetries",
                "algebraic curvature symmetries of R̄",
                r.curvature_symmetries,
                tol,
            );
            out.check("ricci_trace", "ρ̄ = trace of R̄", r.ricci_trace, tol);
        }
        Err(e) => out.failed("hermitian_residuals", "Hermitian structure", tol, e),
    }
    out.check("integrability", "(∇̄_X J̄)Y − (∇̄_{J̄X} J̄)J̄Y = 0", model.check_integrability(), tol);
    let witness = model.check_not_kahler();
    out.at_least(
        "not_kahler",
        "max |ḡ((∇̄_X J̄)Y, Z)| ≥ min(1, a² + b²)",
        witness,
        (a * a + b * b).min(1.0),
    );
    let xi = model.xi_index();
    let reeb = model.ricci().get(xi, xi);
    let expected = 2.0 * cfg.p as f64 + 2.0 * a * a * cfg.q as f64;
    out.check("reeb_ricci", "ρ̄(ξ, ξ) = 2p + 2a²q", (reeb - expected).abs(), tol);

    let (weakly, weakly_residual) = model.check_weakly_star_einstein(cfg.tol_algebraic);
    let (tau, tau_star) = model.scalar_curvatures();
    let q = &mut out.quantities;
    q.float("not_kahler_witness", witness);
    q.push("weakly_star_einstein", Quantity::Bool(weakly));
    q.float("weakly_star_residual", weakly_residual);
    q.float("tau", tau);
    q.float("tau_star", tau_star);
    if let Ok(t) = model.tau_star_from_curvature() {
        q.float("tau_star_definitional", t);
    }
}

fn verdict_checks(out: &mut Collector, v: &EinsteinVerdict, tol: f64) {
    out.check("einstein_residual", "ρ̄ = λ ḡ with λ = τ̄ / dim", v.residual, tol);
    out.check("a_is_zero", "a = 0", v.margins.a, tol);
    out.check("p_equals_b2q", "p = b²q", v.margins.p_minus_b2q, tol);
    out.check("factor_einstein", "ρ = 2p g on the first factor", v.margins.factor_einstein, tol);
    out.check(
        "factorprime_eta_einstein_match",
        "ρ' = 2(p + p/q − 1) g' − 2(p/q − 1)(q + 1) η'⊗η'",
        v.margins.factorprime_eta_einstein,
        tol,
    );
}

fn verdict_quantities(q: &mut Quantities, v: &EinsteinVerdict) {
    q.push("is_einstein", Quantity::Bool(v.is_einstein));
    q.float("lambda", v.lambda);
    q.float("reeb_lambda", v.reeb_lambda);
    q.push("agreement", Quantity::Bool(v.agreement));
    q.push("failing_condition", Quantity::Text(v.failing_condition.unwrap_or("none").into()));
}

fn einstein(cfg: &RunConfig, out: &mut Collector) {
    let (a, b) = single(cfg);
    let verdict = build_product(cfg, a, b).and_then(|m| verdict_for_model(&m, cfg.tol_algebraic));
    match verdict {
        Ok(v) => {
            verdict_checks(out, &v, cfg.tol_algebraic);
            verdict_quantities(&mut out.quantities, &v);
        }
        Err(e) => out.failed("einstein_verdict", "structural and residual verdicts agree", cfg.tol_algebraic, e),
    }
}

fn scan(cfg: &RunConfig, out: &mut Collector) {
    let bs = cfg.b_values();
    let mut cells = 0;
    for &a in cfg.a.values() {
        for &b in &bs {
            cells += 1;
            let name = format!("{}(a={a} b={b})", check_name(cfg.check));
            let model = match build_product(cfg, a, b) {
                Ok(m) => m,
                Err(e) => {
                    out.failed(name, "product structure exists", cfg.tol_algebraic, e);
                    continue;
                }
            };
            match cfg.check {
                ScanCheck::Einstein => match verdict_for_model(&model, cfg.tol_algebraic) {
                    Ok(v) => out.check(name, "ρ̄ = λ ḡ with λ = τ̄ / dim", v.residual, cfg.tol_algebraic),
                    Err(e) => out.failed(name, "structural and residual verdicts agree", cfg.tol_algebraic, e),
                },
                ScanCheck::Integrability => {
                    let tol = scaled_tol(cfg, model.curvature().max_abs());
                    out.check(name, "(∇̄_X J̄)Y − (∇̄_{J̄X} J̄)J̄Y = 0", model.check_integrability(), tol)
                }
                ScanCheck::NotKahler => out.at_least(
                    &name,
                    "max |ḡ((∇̄_X J̄)Y, Z)| ≥ min(1, a² + b²)",
                    model.check_not_kahler(),
                    (a * a + b * b).min(1.0),
                ),
            }
        }
    }
    let passing = out.checks.iter().filter(|c| c.pass).count();
    out.quantities.push("cells", Quantity::Int(cells));
    out.quantities.push("passing", Quantity::Int(passing as i64));
}

fn check_name(c: ScanCheck) -> &'static str {
    match c {
        ScanCheck::Einstein => "einstein",
        ScanCheck::Integrability => "integrability",
        ScanCheck::NotKahler => "not_kahler",
    }
}

fn oracle_compare(cfg: &RunConfig, out: &mut Collector) {
    let (a, b) = single(cfg);
    let first_derivative_tol = cfg.tol_fd / 10.0;
    let (Some(chart), Some(chart_prime)) = (cfg.factor.chart(cfg.p), cfg.factor_prime.chart(cfg.q)) else {
        return out.failed(
            "chart",
            "both factors are (deformed) spheres",
            cfg.tol_fd,
            "no sphere chart for a space form with c <= -3",
        );
    };
    let params = match HermitianParams::new(a, b) {
        Ok(p) => p,
        Err(e) => return out.failed("product", "product structure exists", cfg.tol_fd, e),
    };
    let model = match build_product(cfg, a, b) {
        Ok(m) => m,
        Err(e) => return out.failed("product", "product structure exists", cfg.tol_fd, e),
    };
    let product = ProductChart::new(chart, chart_prime, params);
    let stencil = StencilConfig::default();
    for (i, x) in sample_points(cfg.seed, product.dim(), cfg.samples).iter().enumerate() {
        let c = match compare_with_algebraic(&product, &model, x, &stencil) {
            Ok(c) => c,
            Err(e) => {
                out.failed(format!("oracle[{i}]"), "finite-difference oracle evaluates", cfg.tol_fd, e);
                continue;
            }
        };
        let rows = [
            ("metric", "ḡ in the adapted frame", c.metric, first_derivative_tol),
            (
                "complex_structure",
                "J̄ in the adapted frame",
                c.complex_structure,
                first_derivative_tol,
            ),
            (
                "connection_blocks",
                "Levi-Civita connection of ḡ by blocks",
                c.connection_blocks.max(),
                first_derivative_tol,
            ),
            ("nabla_j", "ḡ((∇̄_X J̄)Y, Z) by blocks", c.nabla_j, first_derivative_tol),
            (
                "integrability",
                "(∇̄_X J̄)Y − (∇̄_{J̄X} J̄)J̄Y = 0",
                c.integrability,
                first_derivative_tol,
            ),
            (
                "nijenhuis",
                "N(X,Y) = [J̄X,J̄Y] − [X,Y] − J̄[J̄X,Y] − J̄[X,J̄Y] = 0",
                c.nijenhuis,
                first_derivative_tol,
            ),
            ("curvature", "R̄ by blocks", c.curvature, cfg.tol_fd),
            ("ricci", "ρ̄ by blocks", c.ricci, cfg.tol_fd),
            ("ricci_star", "closed-form ρ̄*", c.ricci_star, cfg.tol_fd),
            (
                "ricci_star_definitional",
                "ρ̄*(X,Y) = trace of Z ↦ R̄(X, J̄Z)J̄Y",
                c.ricci_star_definitional,
                cfg.tol_fd,
            ),
        ];
        for (name, anchor, residual, tol) in rows {
            out.check(format!("{name}[{i}]"), anchor, residual, tol);
        }
    }
}

fn example(cfg: &RunConfig, out: &mut Collector) {
    let (spec, model) = match calabi_eckmann_einstein_example(cfg.p, cfg.q) {
        Ok(x) => x,
        Err(e) => return out.failed("example", "example structure exists", cfg.tol_algebraic, e),
    };
    out.check(
        "p_equals_b2q_exact",
        "p = b²q in integer arithmetic",
        if spec.p_equals_b2q_exact() { 0.0 } else { 1.0 },
        0.0,
    );
    let verdict = match verdict_for_model(&model, cfg.tol_algebraic) {
        Ok(v) => v,
        Err(e) => return out.failed("einstein_verdict", "structural and residual verdicts agree", cfg.tol_algebraic, e),
    };
    verdict_checks(out, &verdict, cfg.tol_algebraic);
    let two_p = 2.0 * cfg.p as f64;
    out.check("lambda", "λ = 2p", (verdict.lambda - two_p).abs(), scaled_tol(cfg, two_p));
    let (_, tau_star) = model.scalar_curvatures();
    let predicted = star_scalar_prediction(cfg.p, cfg.q);
    out.check(
        "tau_star",
        "τ̄* = 4q(1 − p + q)",
        (tau_star - predicted).abs(),
        scaled_tol(cfg, predicted.abs()),
    );

    let (weakly, _) = model.check_weakly_star_einstein(cfg.tol_algebraic);
    let q = &mut out.quantities;
    q.float("a", spec.a);
    q.float("b", spec.b);
    q.float("c", spec.c);
    q.float("alpha", spec.alpha);
    verdict_quantities(q, &verdict);
    q.float("tau_star", tau_star);
    if let Ok(t) = model.tau_star_from_curvature() {
        q.float("tau_star_definitional", t);
    }
    q.push("weakly_star_einstein", Quantity::Bool(weakly));
}
