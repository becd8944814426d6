//! One function per subcommand.  Shared shape: resolve the realization,
//! compute, buffer the output, and only then report pass/fail through the
//! exit code so a failing check still shows its evidence.

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use liestar_core::fps::{rational_to_f64, AnalyticFn};
use liestar_core::kcalc::{coproduct_momenta, d_series, k_series_realization};
use liestar_core::numeric::{parse_decimal, report_records, render_table};
use liestar_core::weyl::{check_lie_homomorphism, realize_generators};
use liestar_core::{
    cross_check, k_ode_integrate, CrossCheckTolerances, GaussRational, MultiIndex, OdeProblem,
    Realization, SeriesVector, TruncatedSeries,
};

use crate::emit::{kq_names, Emitter, Header};
use crate::source::{
    kcalc_error, numeric_error, parse_decimal_vector, realization_error, resolve, SourceKind,
};
use crate::{CliError, Command, OutputArgs, SourceArgs};

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Validate { source, order, out } => validate(&source, order, &out),
        Command::Kseries { source, order, out } => kseries(&source, order, &out),
        Command::Dseries { source, order, out } => dseries(&source, order, &out),
        Command::Coproduct {
            source,
            j,
            order,
            out,
        } => coproduct(&source, j, order, &out),
        Command::Ode {
            source,
            k,
            q,
            steps,
            lambda_end,
            order,
            tail_tolerance,
            out,
        } => ode(&source, &k, &q, steps, &lambda_end, order, tail_tolerance, &out),
        Command::Crosscheck {
            source,
            order,
            samples,
            radius,
            steps,
            seed,
            out,
        } => crosscheck(&source, order, samples, &radius, steps, seed, &out),
        Command::ExampleDl {
            l,
            order,
            quote_paper,
            out,
        } => example_dl(l, order, quote_paper, &out),
        Command::Export { source, out } => export(&source, &out),
    }
}

fn header<'a>(
    command: &'a str,
    kind: SourceKind,
    r: &'a Realization,
    order: usize,
    variables: Vec<String>,
) -> Header<'a> {
    Header {
        command,
        source: kind.label(),
        name: r.name(),
        hash: r.hash_hex(),
        kappa: r.kappa().to_string(),
        n: r.n(),
        order,
        variables,
    }
}

#[derive(Serialize, Deserialize)]
struct ValidateRecord {
    check: &'static str,
    ok: bool,
    order_checked: usize,
    pairs_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst: Option<String>,
}

fn validate(source: &SourceArgs, order: usize, out_args: &OutputArgs) -> Result<(), CliError> {
    let (r, kind) = resolve(source)?;
    let grid = r.validate(order).map_err(realization_error)?;
    let gens = realize_generators(&r, order)
        .map_err(|e| CliError::Computation(e.to_string()))?;
    let hom = check_lie_homomorphism(&gens, r.constants())
        .map_err(|e| CliError::Computation(e.to_string()))?;

    let mut em = Emitter::new(out_args);
    em.header(&header("validate", kind, &r, order, Vec::new()));
    let worst = hom.worst.as_ref().map(|w| {
        format!(
            "pair ({}, {}) residual {} at x^{:?} d^{:?}",
            w.i, w.j, w.coefficient, w.x_exponents, w.d_exponents
        )
    });
    if em.is_records() {
        em.json(&ValidateRecord {
            check: "grid",
            ok: true,
            order_checked: grid.order_checked,
            pairs_checked: grid.pairs_checked,
            worst: None,
        });
        em.json(&ValidateRecord {
            check: "operators",
            ok: hom.ok,
            order_checked: hom.order_checked,
            pairs_checked: hom.pairs_checked,
            worst: worst.clone(),
        });
    } else {
        em.line(format!(
            "grid: ok through order {} ({} pairs)",
            grid.order_checked, grid.pairs_checked
        ));
        em.line(format!(
            "operators: {} through order {} ({} pairs)",
            if hom.ok { "ok" } else { "FAIL" },
            hom.order_checked,
            hom.pairs_checked
        ));
    }
    em.finish()?;
    if !hom.ok {
        return Err(CliError::Validation(format!(
            "operator brackets disagree with the structure constants: {}",
            worst.unwrap_or_else(|| "residual".into())
        )));
    }
    Ok(())
}

fn kseries(source: &SourceArgs, order: usize, out_args: &OutputArgs) -> Result<(), CliError> {
    let (r, kind) = resolve(source)?;
    let ks = k_series_realization(&r, order).map_err(kcalc_error)?;
    let names = kq_names(r.n());
    let mut em = Emitter::new(out_args);
    em.header(&header("kseries", kind, &r, order, names.clone()));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    for (c, comp) in ks.components().iter().enumerate() {
        em.series(&format!("K[{}]", c + 1), c + 1, comp, &refs);
    }
    em.finish()
}

fn dseries(source: &SourceArgs, order: usize, out_args: &OutputArgs) -> Result<(), CliError> {
    let (r, kind) = resolve(source)?;
    let d = d_series(&r, order).map_err(kcalc_error)?;
    let names = kq_names(r.n());
    let mut em = Emitter::new(out_args);
    em.header(&header("dseries", kind, &r, order, names.clone()));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    for (c, comp) in d.components().iter().enumerate() {
        em.series(&format!("D[{}]", c + 1), c + 1, comp, &refs);
    }
    em.finish()
}

fn coproduct(
    source: &SourceArgs,
    j: usize,
    order: usize,
    out_args: &OutputArgs,
) -> Result<(), CliError> {
    let (r, kind) = resolve(source)?;
    if j == 0 || j > r.n() {
        return Err(CliError::Usage(format!(
            "--j must name a momentum, 1..={}",
            r.n()
        )));
    }
    let cp = coproduct_momenta(&r, j, order).map_err(kcalc_error)?;
    let names = kq_names(r.n());
    let mut em = Emitter::new(out_args);
    em.header(&header("coproduct", kind, &r, order, names.clone()));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    em.series(&format!("Delta(p{j})"), j, &cp.series, &refs);
    em.finish()
}

#[derive(Serialize, Deserialize)]
struct OdeRecord {
    lambda_end: f64,
    value: Vec<f64>,
    tail_bound: f64,
    radius: f64,
}

#[allow(clippy::too_many_arguments)]
fn ode(
    source: &SourceArgs,
    k_text: &str,
    q_text: &str,
    steps: usize,
    lambda_text: &str,
    order: usize,
    tail_tolerance: f64,
    out_args: &OutputArgs,
) -> Result<(), CliError> {
    let (r, kind) = resolve(source)?;
    let k = parse_decimal_vector("k", k_text)?;
    let q: Vec<f64> = parse_decimal_vector("q", q_text)?
        .iter()
        .map(|g| rational_to_f64(g.re()))
        .collect();
    let lambda_end = rational_to_f64(
        parse_decimal(lambda_text)
            .map_err(|e| CliError::Usage(format!("--lambda-end: {e}")))?
            .re(),
    );
    let problem = OdeProblem::from_realization(&r, &k, &q, steps, lambda_end, order)
        .map_err(numeric_error)?;
    let sol = k_ode_integrate(&problem, tail_tolerance).map_err(numeric_error)?;

    let mut em = Emitter::new(out_args);
    em.header(&header("ode", kind, &r, order, Vec::new()));
    if em.is_records() {
        em.json(&OdeRecord {
            lambda_end,
            value: sol.value.clone(),
            tail_bound: sol.tail_bound,
            radius: sol.radius,
        });
    } else {
        let comps: Vec<String> = sol.value.iter().map(|v| format!("{v:?}")).collect();
        em.line(format!("P({lambda_end:?}) = [{}]", comps.join(", ")));
        em.line(format!(
            "tail bound {:?} at radius {:?} ({steps} steps)",
            sol.tail_bound, sol.radius
        ));
    }
    em.finish()
}

fn crosscheck(
    source: &SourceArgs,
    order: usize,
    samples: usize,
    radius_text: &str,
    steps: usize,
    seed: u64,
    out_args: &OutputArgs,
) -> Result<(), CliError> {
    let (r, kind) = resolve(source)?;
    let radius = rational_to_f64(
        parse_decimal(radius_text)
            .map_err(|e| CliError::Usage(format!("--radius: {e}")))?
            .re(),
    );
    if samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let n = r.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-radius..=radius)).collect()
    };
    let points: Vec<(Vec<f64>, Vec<f64>)> = (0..samples)
        .map(|_| (draw(&mut rng), draw(&mut rng)))
        .collect();
    let report = cross_check(&r, &points, order, steps, &CrossCheckTolerances::default())
        .map_err(numeric_error)?;

    let mut em = Emitter::new(out_args);
    if em.is_records() {
        em.header(&header("crosscheck", kind, &r, order, Vec::new()));
        for rec in report_records(&report) {
            em.json(&rec);
        }
    } else {
        for line in render_table(&report).lines() {
            em.line(line);
        }
    }
    em.finish()?;
    if !report.pass {
        return Err(CliError::Validation(
            "cross-check failed: the computation paths disagree beyond tolerance".into(),
        ));
    }
    Ok(())
}

/// The smallest worked example: transport of the one-variable flow `q^l`.
/// Two independent routes must give the same jet.
fn example_dl(
    l: usize,
    order: usize,
    quote: bool,
    out_args: &OutputArgs,
) -> Result<(), CliError> {
    if l < 2 {
        return Err(CliError::Usage(
            "--l must be at least 2; lower powers transport linearly and have no series content"
                .into(),
        ));
    }
    // entries of weight m are certified through flow_order + 1 - m; the
    // deepest weight used is `order`
    let flow_order = 2 * order - 1;
    let mono = TruncatedSeries::monomial(
        1,
        flow_order,
        MultiIndex::new(vec![l as u32]),
        GaussRational::one(),
    )
    .map_err(|e| CliError::Computation(e.to_string()))?;
    let flow = SeriesVector::new(vec![mono]).map_err(|e| CliError::Computation(e.to_string()))?;

    // weight recursion at lambda = 1: K = k + sum_m A[e1, m](k) / m!
    let table = liestar_core::kcalc::a_sequence(&flow, order).map_err(kcalc_error)?;
    let e1 = MultiIndex::unit(1, 0);
    let var = TruncatedSeries::var(1, order, 0).map_err(|e| CliError::Computation(e.to_string()))?;
    let mut recursion = var.clone();
    let mut inv_fact = GaussRational::one();
    for m in 1..=order {
        inv_fact = &inv_fact * &GaussRational::from_ratio(1, m as i64);
        recursion = recursion
            .add(&table.entry(&e1, m).truncated(order).scale(&inv_fact))
            .map_err(|e| CliError::Computation(e.to_string()))?;
    }

    // closed form: k * (1 - (l-1) k^(l-1))^(-1/(l-1))
    let cut = TruncatedSeries::one(1, order)
        .sub(
            &TruncatedSeries::monomial(
                1,
                order,
                MultiIndex::new(vec![(l - 1) as u32]),
                GaussRational::from_int((l - 1) as i64),
            )
            .map_err(|e| CliError::Computation(e.to_string()))?,
        )
        .map_err(|e| CliError::Computation(e.to_string()))?;
    let power = BigRational::new(BigInt::from(-1), BigInt::from((l - 1) as i64));
    let closed = var
        .mul(
            &AnalyticFn::PowRational(power)
                .apply(&cut)
                .map_err(|e| CliError::Computation(e.to_string()))?,
        )
        .map_err(|e| CliError::Computation(e.to_string()))?;

    let mut em = Emitter::new(out_args);
    if em.is_records() {
        em.json(&serde_json::json!({
            "command": "example-dl",
            "l": l,
            "order": order,
            "variables": ["k"],
            "routes": {"1": "recursion", "2": "closed"},
        }));
    } else {
        em.line(format!("# example-dl l={l} (order {order})"));
    }
    if quote {
        let formula = closed_form_text(l);
        if em.is_records() {
            em.json(&serde_json::json!({ "closed_form": formula }));
        } else {
            em.line(format!("closed form: {formula}"));
        }
    }
    em.series("recursion", 1, &recursion, &["k"]);
    em.series("closed", 2, &closed, &["k"]);
    let agree = recursion == closed;
    if !em.is_records() {
        em.line(format!("agree: {}", if agree { "yes" } else { "NO" }));
    }
    em.finish()?;
    if !agree {
        return Err(CliError::Validation(format!(
            "the weight recursion disagrees with the closed form at l = {l}"
        )));
    }
    Ok(())
}

fn closed_form_text(l: usize) -> String {
    match l {
        2 => "k/(1 - k)".to_string(),
        _ => format!("k/(1 - {}*k^{})^(1/{})", l - 1, l - 1, l - 1),
    }
}

fn export(source: &SourceArgs, out_args: &OutputArgs) -> Result<(), CliError> {
    let (r, _) = resolve(source)?;
    let mut em = Emitter::new(out_args);
    if em.is_records() {
        return Err(CliError::Usage(
            "export writes grid text; --format records does not apply".into(),
        ));
    }
    em.line(format!("# exported: {} (hash {})", r.name(), r.hash_hex()));
    for line in r.canonical_text().lines() {
        em.line(line);
    }
    em.finish()
}
