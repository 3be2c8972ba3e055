//! Acceptance gate: one `[PASS]`/`[FAIL]` line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use renewal_kit::fourier::{boundary_delta1_integral, boundary_delta2_integral, disk_coefficient_integral, DEFAULT_PANELS};
use renewal_kit::gentools::{
    check_cos_sum_below_one, check_delta2_modulus_bound, default_grid, eval_delta2_gf,
    find_delta2_neighbourhood, versine_ratio, PolarPoint,
};
use renewal_kit::mcsim::{compare_with_recurrence, simulate, SimConfig};
use renewal_kit::renewal::{check_identities, compute_renewal, estimate_limit, limit_bracket};
use renewal_kit::{parse_rational, IncrementDistribution, Rational};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

/// Integer weights 1..=9 on a random support inside [1, 12] with gcd 1.
fn random_raw_weights(rng: &mut ChaCha8Rng) -> Vec<i64> {
    loop {
        let mut raw = vec![0i64; 13];
        let size = rng.random_range(1..=6);
        for _ in 0..size {
            raw[rng.random_range(1..=12)] = rng.random_range(1..=9);
        }
        let g = (1..13).filter(|&i| raw[i] > 0).fold(0usize, |g, i| g.gcd(&i));
        if g != 1 {
            continue;
        }
        return raw;
    }
}

fn normalized(raw: &[i64]) -> IncrementDistribution {
    let total: i64 = raw.iter().sum();
    IncrementDistribution::explicit(raw.iter().map(|&w| Rational::new(w.into(), total.into())).collect()).unwrap()
}

fn random_laws(seed: u64, count: usize) -> Vec<IncrementDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| normalized(&random_raw_weights(&mut rng))).collect()
}

fn explicit(ws: &[&str]) -> IncrementDistribution {
    IncrementDistribution::explicit(ws.iter().map(|s| r(s)).collect()).unwrap()
}

fn half_geometric() -> IncrementDistribution {
    IncrementDistribution::geometric(r("1/2")).unwrap()
}

/// Integer oracle for weights `w_i / W`: `P_n = p_n·Wⁿ` satisfies
/// `P_n = Σ w_i W^{i-1} P_{n-i}`, and `p*Q = 1` becomes
/// `Σ P_i T_{n-i} W^{n-i} = W^{n+1}` with `T_j = Σ_{i>j} w_i`.
struct ScaledOracle {
    w: Vec<BigInt>,
    total: BigInt,
    scaled: Vec<BigInt>,
}

impl ScaledOracle {
    fn new(w: &[i64], upto: usize) -> Self {
        let total = BigInt::from(w.iter().sum::<i64>());
        let w: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
        let pow: Vec<BigInt> = (0..w.len()).map(|k| num_traits::pow(total.clone(), k)).collect();
        let mut scaled = vec![BigInt::one()];
        for n in 1..=upto {
            let s = (1..=n.min(w.len() - 1))
                .filter(|&i| !w[i].is_zero())
                .fold(BigInt::zero(), |acc, i| acc + &w[i] * &pow[i - 1] * &scaled[n - i]);
            scaled.push(s);
        }
        Self { w, total, scaled }
    }

    fn p(&self, n: usize) -> Rational {
        Rational::new(self.scaled[n].clone(), num_traits::pow(self.total.clone(), n))
    }

    fn p_star_tails_is_one(&self) -> bool {
        let tails: Vec<BigInt> = (0..self.w.len())
            .map(|j| self.w.iter().skip(j + 1).fold(BigInt::zero(), |a, b| a + b))
            .collect();
        let mut pow = vec![BigInt::one()];
        for k in 1..=self.scaled.len() {
            pow.push(&pow[k - 1] * &self.total);
        }
        (0..self.scaled.len()).all(|n| {
            let lhs = (n.saturating_sub(tails.len() - 1)..=n)
                .fold(BigInt::zero(), |a, i| a + &self.scaled[i] * &tails[n - i] * &pow[n - i]);
            lhs == pow[n + 1]
        })
    }
}

fn naive_delta(p: &[f64], order: usize) -> Vec<f64> {
    let mut a = p.to_vec();
    for _ in 0..order {
        a = (0..a.len()).map(|n| if n == 0 { a[0] } else { a[n] - a[n - 1] }).collect();
    }
    a
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let upto = 199;
    let mut failures = 0;
    for _ in 0..100 {
        let raw = random_raw_weights(&mut rng);
        let d = normalized(&raw);
        let p = compute_renewal::<Rational>(&d, upto).unwrap();
        let report = check_identities(&p).unwrap();
        let oracle = ScaledOracle::new(&raw, upto);
        let same = (0..=upto).all(|n| *p.get(n).unwrap() == oracle.p(n));
        if !(report.all_passed() && report.checks.len() == 4 && same && oracle.p_star_tails_is_one()) {
            failures += 1;
        }
    }
    Outcome::new(failures == 0, format!("100 laws, prefix 200, {failures} failing"))
}

fn criterion_2() -> Outcome {
    let d = explicit(&["0", "1/2", "1/2"]);
    let p = compute_renewal::<Rational>(&d, 60).unwrap();
    let two_thirds = r("2/3");
    let closed_form = (0..=60).all(|n| {
        let gap = (p.get(n).unwrap() - &two_thirds).abs();
        gap == Rational::new(BigInt::one(), BigInt::from(3) * num_traits::pow(BigInt::from(2), n))
    });
    let est = estimate_limit(&d, 1e-9, 1 << 22).unwrap();
    let est_ok = (est.estimate - 2.0 / 3.0).abs() <= 1e-9;

    let g = half_geometric();
    let p = compute_renewal::<Rational>(&g, 1000).unwrap();
    let flat = (1..=1000).all(|n| *p.get(n).unwrap() == r("1/2"));
    Outcome::new(
        closed_form && est_ok && flat,
        format!(
            "closed form n≤60: {closed_form}, |estimate - 2/3| = {:.2e}, geometric flat to 1000: {flat}",
            (est.estimate - 2.0 / 3.0).abs()
        ),
    )
}

fn criterion_3() -> Outcome {
    let h = IncrementDistribution::harmonic();
    let harmonic = |m: usize| (1..=m as i64 + 1).fold(Rational::zero(), |a, k| a + Rational::new(1.into(), k.into()));
    let exact_hi = [0usize, 1, 5, 9, 40, 616]
        .iter()
        .all(|&m| limit_bracket::<Rational>(&h, m).unwrap().hi == harmonic(m).recip());
    let hi_616 = limit_bracket::<f64>(&h, 616).unwrap().hi;

    let n = 100_000;
    let m = n / 10;
    let p = compute_renewal::<f64>(&h, n).unwrap();
    let max_window = p.terms().terms()[n / 2..=n].iter().copied().fold(f64::MIN, f64::max);
    let hi_m = limit_bracket::<f64>(&h, m).unwrap().hi;
    let ok = exact_hi && hi_616 <= 0.15 && max_window < hi_m + 0.02;
    Outcome::new(
        ok,
        format!("hi = 1/H_(M+1): {exact_hi}, hi(616) = {hi_616:.6}, max p on [5e4, 1e5] = {max_window:.6} vs hi({m}) + 0.02 = {:.6}", hi_m + 0.02),
    )
}

fn criterion_4() -> Outcome {
    let laws = random_laws(0xB0B, 20);
    let mut failures = 0;
    for d in &laws {
        let inv_mean = d.mean_exact().unwrap().recip();
        let mut prev: Option<(Rational, Rational)> = None;
        for m in 0..=1000 {
            let b = limit_bracket::<Rational>(d, m).unwrap();
            let lo = b.lo.clone().unwrap();
            let ok_here = lo <= inv_mean && inv_mean <= b.hi;
            let ok_step = prev.as_ref().is_none_or(|(plo, phi)| b.hi <= *phi && lo >= *plo);
            if !(ok_here && ok_step) {
                failures += 1;
                break;
            }
            prev = Some((lo, b.hi));
        }
    }
    Outcome::new(failures == 0, format!("{} laws, M = 0..1000, {failures} failing", laws.len()))
}

fn criterion_5() -> Outcome {
    let laws = random_laws(0xC0FFEE, 10);
    let mut worst = 0.0f64;
    for d in &laws {
        let p = compute_renewal::<Rational>(d, 50).unwrap();
        let pf: Vec<f64> = p.terms().to_f64().into_terms();
        for order in 0..=2u32 {
            let diffs = naive_delta(&pf, order as usize);
            for radius in [0.5, 0.9] {
                for (m, expected) in diffs.iter().enumerate() {
                    let q = disk_coefficient_integral(d, order, m, radius, DEFAULT_PANELS).unwrap();
                    let got = q.value.re / (2.0 * PI * radius.powi(m as i32));
                    worst = worst.max((got - expected).abs());
                }
            }
        }
    }
    Outcome::new(worst <= 1e-8, format!("max |integral/(2π r^m) - Δ^l[p]_m| = {worst:.3e} (tol 1e-8)"))
}

fn criterion_6() -> Outcome {
    let g = half_geometric();
    // 1/f_Q = 1 - z/2
    let oracle = |m: usize| match m {
        0 => 1.0,
        1 => -0.5,
        _ => 0.0,
    };
    let worst = (0..=10)
        .map(|m| (boundary_delta1_integral(&g, m, DEFAULT_PANELS).unwrap().coefficient().re - oracle(m)).abs())
        .fold(0.0, f64::max);
    Outcome::new(worst <= 1e-6, format!("max deviation from (1, -1/2, 0, …) = {worst:.3e} (tol 1e-6)"))
}

fn criterion_7() -> Outcome {
    let h = IncrementDistribution::harmonic();
    let p = compute_renewal::<f64>(&h, 30).unwrap();
    let d2 = naive_delta(p.terms().terms(), 2);
    let mut failing = Vec::new();
    let mut worst_ratio = 0.0f64;
    let mut worst_diff = 0.0f64;
    for (m, expected) in d2.iter().enumerate() {
        let q = boundary_delta2_integral(&h, m, DEFAULT_PANELS).unwrap();
        let diff = (q.coefficient().re - expected).abs();
        let tol = 1e-4f64.max(10.0 * q.est_error / (2.0 * PI));
        worst_ratio = worst_ratio.max(diff / tol);
        worst_diff = worst_diff.max(diff);
        if diff > tol {
            failing.push(m);
        }
    }
    Outcome::new(
        failing.is_empty(),
        format!("m = 0..30, max |integral/2π - Δ²[p]_m| = {worst_diff:.3e}, worst deviation/tolerance = {worst_ratio:.2e}, failing m: {failing:?}"),
    )
}

fn criterion_8() -> Outcome {
    let mut laws = random_laws(0xD1CE, 10);
    laws.push(half_geometric());
    laws.push(IncrementDistribution::harmonic());
    let grid = default_grid();
    let mut failures = 0;
    let mut worst_gap = 0.0f64;
    for d in &laws {
        let cos = check_cos_sum_below_one(d, &grid, None).unwrap();
        let modulus = check_delta2_modulus_bound(d, &grid, None).unwrap();
        let gap = modulus.real_axis_gap().unwrap();
        worst_gap = worst_gap.max(gap);
        if !(cos.passed() && modulus.passed() && gap <= 1e-12) {
            failures += 1;
        }
    }
    Outcome::new(
        failures == 0,
        format!("{} laws × {} points, {failures} failing, worst real-axis gap = {worst_gap:.3e}", laws.len(), grid.len()),
    )
}

fn criterion_9() -> Outcome {
    let at_zero = versine_ratio(0.0) == 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let worst_g = (0..1000)
        .map(|_| {
            let x: f64 = rng.random_range(-PI..=PI);
            (x * x * versine_ratio(x) - (1.0 - x.cos())).abs()
        })
        .fold(0.0, f64::max);

    let h = IncrementDistribution::harmonic();
    let eps = 1e-2;
    let found = find_delta2_neighbourhood(&h, eps, 1.0, 1e-12, None);
    // independent spot check inside the reported neighbourhood
    let spot = found.map(|b| {
        (0..2000)
            .map(|_| {
                let radial = rng.random_range(0.0..=b.delta);
                let angular = (b.delta - radial) * rng.random_range(-1.0..=1.0);
                match PolarPoint::new(1.0 - radial, angular) {
                    Ok(p) => eval_delta2_gf(&h, &p, None).value.norm(),
                    Err(_) => 0.0,
                }
            })
            .fold(0.0, f64::max)
    });
    let ok = at_zero && worst_g <= 1e-14 && spot.is_some_and(|s| s <= eps);
    let detail = match found {
        Some(b) => format!(
            "G(0) = 1/2: {at_zero}, max |x²G - (1 - cos x)| = {worst_g:.2e}, δ = {:.4e} with max |H| = {:.4e} ({} samples), spot max = {:.4e}",
            b.delta,
            b.max_modulus,
            b.samples,
            spot.unwrap_or(f64::NAN)
        ),
        None => format!("G(0) = 1/2: {at_zero}, max |x²G - (1 - cos x)| = {worst_g:.2e}, no δ found"),
    };
    Outcome::new(ok, detail)
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, d) in [("(0,1/2,1/2)", explicit(&["0", "1/2", "1/2"])), ("geometric(1/2)", half_geometric())] {
        let mut cfg = SimConfig::new(d.clone(), 100, 1_000_000, 20_240_601);
        cfg.z = 4.0;
        let est = simulate(&cfg).unwrap();
        let again = simulate(&cfg).unwrap();
        let reproducible = est.hits == again.hits && est.estimates() == again.estimates();
        let p = compute_renewal::<Rational>(&d, 100).unwrap();
        let report = compare_with_recurrence(&est, &p, 4.0).unwrap();
        let frac = report.pass_fraction();
        ok &= frac >= 0.999 && reproducible;
        parts.push(format!("{name}: {}/{} levels pass, reproducible: {reproducible}", report.passed, report.levels.len()));
    }
    Outcome::new(ok, parts.join("; "))
}

/// Name, wall-clock limit, check.
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact convolution identities", Some(Duration::from_secs(10)), criterion_1),
        ("finite-mean limit", None, criterion_2),
        ("infinite-mean limit", Some(Duration::from_secs(60)), criterion_3),
        ("bracket monotonicity", None, criterion_4),
        ("disk quadrature equivalence", Some(Duration::from_secs(60)), criterion_5),
        ("finite-mean boundary integral", None, criterion_6),
        ("infinite-mean boundary integral", None, criterion_7),
        ("generating-function grid checks", None, criterion_8),
        ("versine ratio and removable singularity", None, criterion_9),
        ("Monte Carlo cross-validation", Some(Duration::from_secs(120)), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = outcome.passed && in_time;
        if !passed {
            failed += 1;
        }
        let budget = match limit {
            Some(l) => format!(" (limit {:.0} s)", l.as_secs_f64()),
            None => String::new(),
        };
        println!(
            "[{}] {:>2}. {name}: {} [{:.2} s{budget}]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
