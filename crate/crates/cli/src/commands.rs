use std::f64::consts::PI;

use renewal_kit::fourier::{boundary_delta1_integral, boundary_delta2_integral, disk_coefficient_integral, FourierError};
use renewal_kit::gentools::{
    check_cos_sum_below_one, check_decomposition, check_delta2_modulus_bound, default_grid, eval_tail_gf,
    find_delta2_neighbourhood, one_minus_step_gf,
};
use renewal_kit::mcsim::{compare_with_recurrence, simulate as run_simulation, SimConfig};
use renewal_kit::renewal::{
    check_identities, compute_renewal, estimate_limit, limit_bracket, within_unit_interval, LimitEstimate,
    RenewalError,
};
use renewal_kit::{ExtendedReal, IncrementDistribution, Rational, Scalar};

use crate::output::{Cell, Document};
use crate::spec::{Mode, Params, RunSpec};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    BudgetExhausted,
}

trait ToCell {
    fn cell(&self) -> Cell;
}

impl ToCell for Rational {
    fn cell(&self) -> Cell {
        Cell::Exact(self.clone())
    }
}

impl ToCell for f64 {
    fn cell(&self) -> Cell {
        Cell::Float(*self)
    }
}

impl From<RenewalError> for CliError {
    fn from(e: RenewalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FourierError> for CliError {
    fn from(e: FourierError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Grid stride for the decomposition check, which is costly on series laws.
const DECOMPOSITION_STRIDE: usize = 16;

/// Threshold for `|H|` near `z = 1` in `verify`.
const NEIGHBOURHOOD_EPS: f64 = 1e-2;

pub fn run(spec: &RunSpec) -> Result<(Document, Status), CliError> {
    let d = spec.distribution()?;
    match (&spec.params, spec.mode) {
        (Params::Compute { n }, Mode::Exact) => compute::<Rational>(&d, *n),
        (Params::Compute { n }, Mode::Float) => compute::<f64>(&d, *n),
        (Params::Limit { tol, budget }, _) => limit(&d, *tol, *budget),
        (Params::Verify { n, m }, mode) => verify(&d, *n, *m, mode),
        (
            Params::Quadrature {
                l,
                m_min,
                m_max,
                r,
                panels,
                tol,
            },
            mode,
        ) => {
            let q = QuadratureArgs {
                l: *l,
                m_min: *m_min,
                m_max: *m_max,
                r: *r,
                panels: *panels,
                tol: *tol,
            };
            match mode {
                Mode::Exact => quadrature::<Rational>(&d, &q),
                Mode::Float => quadrature::<f64>(&d, &q),
            }
        }
        (
            Params::Simulate {
                n_max,
                trials,
                seed,
                z,
                min_pass_fraction,
            },
            mode,
        ) => {
            let mut cfg = SimConfig::new(d, *n_max, *trials, *seed);
            cfg.z = *z;
            match mode {
                Mode::Exact => simulate::<Rational>(cfg, *min_pass_fraction),
                Mode::Float => simulate::<f64>(cfg, *min_pass_fraction),
            }
        }
    }
}

fn compute<S: Scalar + ToCell>(d: &IncrementDistribution, n: usize) -> Result<(Document, Status), CliError> {
    let p = compute_renewal::<S>(d, n)?;
    let d1 = p.differences(1);
    let d2 = p.differences(2);
    let mut doc = Document::new(vec!["n", "p_n", "delta1", "delta2"]);
    if !S::EXACT {
        doc.field("error_bound", p.error_bound());
    }
    for i in 0..=n {
        doc.row(vec![i.into(), p.terms().terms()[i].cell(), d1.terms()[i].cell(), d2.terms()[i].cell()]);
    }
    Ok((doc, Status::Ok))
}

fn limit(d: &IncrementDistribution, tol: f64, budget: usize) -> Result<(Document, Status), CliError> {
    let (est, status) = match estimate_limit(d, tol, budget) {
        Ok(est) => (est, Status::Ok),
        Err(RenewalError::BudgetExhausted { partial, .. }) => (*partial, Status::BudgetExhausted),
        Err(e) => return Err(e.into()),
    };
    Ok((limit_document(d, &est), status))
}

fn limit_document(d: &IncrementDistribution, est: &LimitEstimate) -> Document {
    let mut doc = Document::new(vec!["M", "lo", "hi", "window_osc"]);
    doc.field("estimate", est.estimate);
    doc.field("lo", est.bracket.lo);
    doc.field("hi", est.bracket.hi);
    doc.field("lo_valid", est.bracket.lo_valid());
    doc.field("converged", est.converged);
    doc.field("cutoff", est.bracket.cutoff);
    doc.field("n_used", est.n_used);
    doc.field("window_osc", est.oscillation);
    doc.field("inverse_mean", d.mean().recip());
    for row in &est.trace {
        doc.row(vec![row.cutoff.into(), row.lo.into(), row.hi.into(), row.window_osc.into()]);
    }
    doc
}

struct Checks {
    doc: Document,
    failed: bool,
}

impl Checks {
    fn new() -> Self {
        Self {
            doc: Document::new(vec!["check", "status", "detail"]),
            failed: false,
        }
    }

    fn record(&mut self, name: &str, passed: bool, detail: String) {
        self.failed |= !passed;
        self.doc
            .row(vec![name.into(), if passed { "pass" } else { "fail" }.into(), detail.into()]);
    }

    fn skip(&mut self, name: &str, reason: &str) {
        self.doc.row(vec![name.into(), "skip".into(), reason.into()]);
    }
}

fn verify(d: &IncrementDistribution, n: usize, m: usize, mode: Mode) -> Result<(Document, Status), CliError> {
    let mut c = Checks::new();
    let mean = match d.mean() {
        ExtendedReal::Finite(x) => format!("{x}"),
        ExtendedReal::Infinite => "infinite".into(),
    };
    c.record(
        "distribution",
        true,
        format!("{}; support gcd {}; mean {mean}", d.label(), d.support_gcd()),
    );

    let exact = mode == Mode::Exact && d.is_rational();
    if exact {
        let p = compute_renewal::<Rational>(d, n)?;
        let report = check_identities(&p)?;
        for check in &report.checks {
            let detail = match check.first_mismatch {
                None => format!("exact on indices 0..={n}"),
                Some(i) => format!("first mismatch at index {i}"),
            };
            c.record(check.name, check.passed, detail);
        }
        c.record("0 <= p_n <= 1", within_unit_interval(&p), format!("exact on indices 0..={n}"));
    } else {
        c.skip("identities", "needs exact mode and rational weights");
        let p = compute_renewal::<f64>(d, n)?;
        c.record("0 <= p_n <= 1", within_unit_interval(&p), format!("float on indices 0..={n}"));
    }

    match (exact, d.mean_exact()) {
        (true, Some(mu)) => {
            let b = limit_bracket::<Rational>(d, m)?;
            let limit = mu.recip();
            c.record("limit bracket", b.contains(&limit), format!("lo <= 1/mean <= hi at M = {m} (exact)"));
        }
        _ => {
            let b = limit_bracket::<f64>(d, m)?;
            let target = d.mean().recip();
            let ok = b.hi >= target && b.lo.map_or(!d.has_finite_mean(), |lo| lo <= target);
            c.record(
                "limit bracket",
                ok,
                format!("M = {m}: hi = {}, lo = {:?}, 1/mean = {target}", b.hi, b.lo),
            );
        }
    }

    let grid = default_grid();
    let cos = check_cos_sum_below_one(d, &grid, None).map_err(|e| CliError::Validation(e.to_string()))?;
    c.record(
        "cosine sum below one",
        cos.passed(),
        format!("{} points, {} failures, min margin {:e}", cos.points, cos.failures.len(), cos.min_margin),
    );
    let modulus = check_delta2_modulus_bound(d, &grid, None).map_err(|e| CliError::Validation(e.to_string()))?;
    let gap = modulus.real_axis_gap().unwrap_or(0.0);
    c.record(
        "second-difference modulus bound",
        modulus.passed() && gap <= 1e-12,
        format!(
            "{} points, {} failures, real-axis gap {gap:e}",
            modulus.points.len(),
            modulus.failures()
        ),
    );

    let sample: Vec<_> = grid.iter().step_by(DECOMPOSITION_STRIDE).collect();
    let split_failures = sample.iter().filter(|p| !check_decomposition(d, p, None).passed()).count();
    c.record(
        "chord and gap decomposition",
        split_failures == 0,
        format!("{} points, {split_failures} failures", sample.len()),
    );

    if d.has_finite_mean() {
        let mut worst = 0.0f64;
        let mut zero = false;
        for p in &grid {
            let ft = eval_tail_gf(d, p, None).map_err(|e| CliError::Validation(e.to_string()))?;
            let gap = one_minus_step_gf(d, p, None);
            let tol = 1e-12 + ft.error_bound * 2.0 + gap.error_bound;
            worst = worst.max((p.one_minus_z() * ft.value - gap.value).norm() - tol);
            zero |= ft.value.norm() == 0.0;
        }
        c.record(
            "tail generating function",
            worst <= 0.0 && !zero,
            format!("(1-z) f_Q = 1 - f_q and f_Q != 0 on {} points", grid.len()),
        );
        c.skip("second-difference gf near z = 1", "finite mean");
    } else {
        c.skip("tail generating function", "infinite mean");
        match find_delta2_neighbourhood(d, NEIGHBOURHOOD_EPS, 1.0, 1e-12, None) {
            Some(b) => c.record(
                "second-difference gf near z = 1",
                true,
                format!("|H| <= {} when (1-r) + |theta| <= {:e}", b.eps, b.delta),
            ),
            None => c.record("second-difference gf near z = 1", false, "no neighbourhood found".into()),
        }
    }

    let status = if c.failed { Status::CheckFailed } else { Status::Ok };
    c.doc.field("all_passed", !c.failed);
    Ok((c.doc, status))
}

struct QuadratureArgs {
    l: u32,
    m_min: usize,
    m_max: usize,
    r: f64,
    panels: usize,
    tol: Option<f64>,
}

fn quadrature<S: Scalar>(d: &IncrementDistribution, q: &QuadratureArgs) -> Result<(Document, Status), CliError> {
    if q.l > 2 {
        return Err(CliError::Validation(format!("difference order must be 0, 1 or 2, got {}", q.l)));
    }
    if q.m_min > q.m_max {
        return Err(CliError::Validation(format!("m-min {} exceeds m-max {}", q.m_min, q.m_max)));
    }
    let boundary = q.r == 1.0;
    if boundary {
        let fits = (q.l == 1 && d.has_finite_mean()) || (q.l == 2 && !d.has_finite_mean());
        if !fits {
            return Err(CliError::Validation(
                "r = 1 needs l = 1 with finite mean or l = 2 with infinite mean".into(),
            ));
        }
    }
    let p = compute_renewal::<S>(d, q.m_max)?;
    let diffs = p.differences(q.l as usize);
    let mut doc = Document::new(vec![
        "l",
        "m",
        "r",
        "recurrence_value",
        "integral_value",
        "abs_diff",
        "est_error",
    ]);
    let mut worst = 0.0f64;
    let mut failed = false;
    for m in q.m_min..=q.m_max {
        let res = match (boundary, q.l) {
            (true, 1) => boundary_delta1_integral(d, m, q.panels)?,
            (true, _) => boundary_delta2_integral(d, m, q.panels)?,
            (false, l) => disk_coefficient_integral(d, l, m, q.r, q.panels)?,
        };
        let scale = 2.0 * PI * q.r.powi(m as i32);
        let integral = res.value.re / scale;
        let est_error = res.est_error / scale;
        let recurrence = diffs.terms()[m].to_f64();
        let diff = (integral - recurrence).abs();
        worst = worst.max(diff);
        if let Some(tol) = q.tol {
            failed |= diff > tol;
        }
        doc.row(vec![
            (q.l as usize).into(),
            m.into(),
            q.r.into(),
            recurrence.into(),
            integral.into(),
            diff.into(),
            est_error.into(),
        ]);
    }
    doc.field("panels", q.panels);
    doc.field("max_abs_diff", worst);
    Ok((doc, if failed { Status::CheckFailed } else { Status::Ok }))
}

fn simulate<S: Scalar>(cfg: SimConfig, min_pass_fraction: f64) -> Result<(Document, Status), CliError> {
    let est = run_simulation(&cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let p = compute_renewal::<S>(&cfg.dist, cfg.n_max)?;
    let report = compare_with_recurrence(&est, &p, cfg.z).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut doc = Document::new(vec!["n", "hits", "estimate", "exact", "std_error", "passed"]);
    doc.field("trials", est.trials);
    doc.field("passed", report.passed);
    doc.field("failed", report.failed);
    doc.field("pass_fraction", report.pass_fraction());
    doc.field("expected_false_failures", report.expected_false_failures);
    doc.field("insufficient_trials", report.insufficient_trials);
    doc.field("sampling_bias", est.sampling_bias);
    for l in &report.levels {
        doc.row(vec![
            l.n.into(),
            l.hits.into(),
            l.estimate.into(),
            l.exact.into(),
            l.std_error.into(),
            l.passed.into(),
        ]);
    }
    let status = if report.pass_fraction() < min_pass_fraction {
        Status::CheckFailed
    } else {
        Status::Ok
    };
    Ok((doc, status))
}
