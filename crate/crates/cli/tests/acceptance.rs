//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use fss_core::analysis::{ring_frechet_function, ring_hessian_coefficient};
use fss_core::distributions::sample as draw;
use fss_core::frechet::circular_mean_by_candidates;
use fss_core::geometry::{circle_distance, sphere_exp_ambient, tangent_basis};
use fss_core::io::{read_curve, read_rejection_table};
use fss_core::{
    antipodal_density, circle_limit_modulation, feasibility_threshold, frechet_function, frechet_mean, rotsym_hessian_coefficient,
    DistributionSpec, MeanOptions, ModulationCurve, RandomStream, RejectionRow, Sample, SpherePoint, TestMethod,
};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;
use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

const TWO_POINT: &str = r#"{"type":"two_point","a":-0.7853981633974483,"b":0.7853981633974483,"w":0.5}"#;
const VON_MISES: &str = r#"{"type":"von_mises","mu":0.0,"kappa":0.5}"#;
const CONDITIONED: &str =
    r#"{"type":"conditioned_von_mises","mu":0.0,"kappa":0.5,"support":[[-2.941592653589793,2.941592653589793]]}"#;
const RING: &str = r#"{"type":"ring_mixture","m":2,"theta":1.5707963267948966,"alpha":1.0}"#;

fn fss(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fss"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run fss: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "fss {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn json(args: &[&str]) -> Result<Value, String> {
    let bytes = fss(args)?;
    serde_json::from_slice(&bytes).map_err(|e| format!("invalid JSON from fss {}: {e}", args.join(" ")))
}

fn read_file(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn curve_file(path: &Path) -> Result<ModulationCurve, String> {
    read_curve(read_file(path)?.as_slice()).map_err(|e| e.to_string())
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(elapsed: Duration, budget_secs: u64) -> Result<(), String> {
    if elapsed > Duration::from_secs(budget_secs) {
        return Err(format!("took {:.1}s, budget {budget_secs}s", elapsed.as_secs_f64()));
    }
    Ok(())
}

fn number(v: &Value, key: &str) -> Result<f64, String> {
    v.get(key).and_then(Value::as_f64).ok_or_else(|| format!("missing numeric field '{key}'"))
}

/// Output files of the deterministic criteria, keyed for the rerun check.
struct Runs {
    dir: PathBuf,
}

impl Runs {
    fn path(&self, name: &str, threads: usize) -> PathBuf {
        self.dir.join(format!("{name}-t{threads}.csv"))
    }

    fn euclidean(&self, threads: usize) -> Result<PathBuf, String> {
        let out = self.path("c1", threads);
        let t = threads.to_string();
        fss(&[
            "--seed", "11", "--threads", &t, "--out", out.to_str().unwrap(),
            "simulate-modulation", "--dist", TWO_POINT, "--n-grid", "5,50,500", "--replicates", "10000",
        ])?;
        Ok(out)
    }

    fn ring(&self, threads: usize) -> Result<PathBuf, String> {
        let out = self.path("c6", threads);
        let t = threads.to_string();
        fss(&[
            "--seed", "66", "--threads", &t, "--out", out.to_str().unwrap(),
            "simulate-modulation", "--dist", RING, "--n-grid", "1000", "--replicates", "10000",
        ])?;
        Ok(out)
    }

    fn rejection(&self, threads: usize) -> Result<PathBuf, String> {
        let out = self.path("c8", threads);
        let t = threads.to_string();
        fss(&[
            "--seed", "1", "--threads", &t, "--out", out.to_str().unwrap(),
            "rejection-curve", "--dist", VON_MISES, "--offsets", "0", "--n", "50", "--replicates", "2000",
            "--method", "both", "--level", "0.05", "--B", "300",
        ])?;
        Ok(out)
    }
}

fn criterion_1(runs: &Runs) -> Outcome {
    let start = Instant::now();
    let curve = curve_file(&runs.euclidean(1)?)?;
    within_budget(start.elapsed(), 30)?;
    let mut detail = Vec::new();
    let mut ok = curve.entries.len() == 3;
    for e in &curve.entries {
        let band = (3.0 * e.se).max(0.05);
        ok &= (e.modulation - 1.0).abs() <= band && e.replicates == 10_000;
        detail.push(format!("n={} m={:.4}±{:.4}", e.n, e.modulation, e.se));
    }
    detail.push(format!("{:.1}s", start.elapsed().as_secs_f64()));
    check(ok, detail.join(", "))
}

/// `I₀(κ)` by the trapezoidal rule on a full period, which converges
/// geometrically for analytic periodic integrands.
fn bessel_i0_trapezoid(kappa: f64) -> f64 {
    let k = 4096;
    (0..k).map(|i| (kappa * (TAU * i as f64 / k as f64).cos()).exp()).sum::<f64>() / k as f64
}

fn criterion_2(dir: &Path) -> Outcome {
    let start = Instant::now();
    let kappa = 0.5;
    let spec = DistributionSpec::von_mises(0.0, kappa).map_err(|e| e.to_string())?;
    let f_oracle = (-kappa).exp() / (TAU * bessel_i0_trapezoid(kappa));
    let expect = 1.0 / (1.0 - TAU * f_oracle).powi(2);
    let f = antipodal_density(&spec).map_err(|e| e.to_string())?;
    let limit = circle_limit_modulation(f).map_err(|e| e.to_string())?;
    let cli_limit = number(&json(&["limit", "--dist", VON_MISES])?, "limit_modulation")?;
    let analytic_ok = ((limit - expect) / expect).abs() < 1e-8 && ((cli_limit - expect) / expect).abs() < 1e-8;

    let out = dir.join("c2.csv");
    fss(&[
        "--seed", "22", "--out", out.to_str().unwrap(),
        "simulate-modulation", "--dist", VON_MISES, "--n-grid", "1,10,32,100,316,1000,3162,10000", "--replicates", "1000",
    ])?;
    let curve = curve_file(&out)?;
    within_budget(start.elapsed(), 600)?;
    let monotone = curve.entries.windows(2).all(|w| {
        let noise = 3.0 * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt();
        w[1].modulation >= w[0].modulation - noise
    });
    let last = curve.entries.last().ok_or("empty curve")?;
    let ok = analytic_ok && monotone && last.n == 10_000 && last.modulation > 2.0;
    let shape: Vec<String> = curve.entries.iter().map(|e| format!("{:.2}", e.modulation)).collect();
    check(
        ok,
        format!(
            "limit {limit:.10} vs oracle {expect:.10}, curve [{}], nondecreasing={monotone}",
            shape.join(", ")
        ),
    )
}

fn criterion_3(dir: &Path) -> Outcome {
    let spec = DistributionSpec::conditioned_von_mises(0.0, 0.5, vec![(-PI + 0.2, PI - 0.2)]).map_err(|e| e.to_string())?;
    let f = antipodal_density(&spec).map_err(|e| e.to_string())?;
    let limit = circle_limit_modulation(f).map_err(|e| e.to_string())?;
    let cli_limit = number(&json(&["limit", "--dist", CONDITIONED])?, "limit_modulation")?;

    let small = dir.join("c3-small.csv");
    fss(&[
        "--seed", "33", "--out", small.to_str().unwrap(),
        "simulate-modulation", "--dist", CONDITIONED, "--n-grid", "2,5,10,20,50,100", "--replicates", "10000",
    ])?;
    let large = dir.join("c3-large.csv");
    fss(&[
        "--seed", "34", "--out", large.to_str().unwrap(),
        "simulate-modulation", "--dist", CONDITIONED, "--n-grid", "10000", "--replicates", "2000",
    ])?;
    let small = curve_file(&small)?;
    let big = curve_file(&large)?.entries[0];
    let peak = small
        .entries
        .iter()
        .max_by(|a, b| (a.modulation - 3.0 * a.se).total_cmp(&(b.modulation - 3.0 * b.se)))
        .ok_or("empty curve")?;
    let ok = f == 0.0
        && limit == 1.0
        && (cli_limit - 1.0).abs() < 1e-9
        && (big.modulation - 1.0).abs() <= (3.0 * big.se).max(0.1)
        && peak.modulation > 1.0 + 3.0 * peak.se;
    check(
        ok,
        format!(
            "f(antipode)={f}, limit={limit}, peak m={:.3}±{:.3} at n={}, n=10000 m={:.3}±{:.3}",
            peak.modulation, peak.se, peak.n, big.modulation, big.se
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for m in [2usize, 3, 4, 8] {
        for theta in [0.3, 1.0, PI / 2.0, 2.0, 2.8] {
            let f = |psi: f64| ring_frechet_function(m, theta, psi).map_err(|e| e.to_string());
            // Fourth-order central difference; F is even in ψ, so the
            // left-hand nodes mirror the right-hand ones.
            let fd = (-2.0 * f(2.0 * h)? + 32.0 * f(h)? - 30.0 * f(0.0)?) / (12.0 * h * h);
            let analytic = 2.0 * ring_hessian_coefficient(m, theta);
            worst = worst.max(((fd - analytic) / analytic).abs());
        }
    }
    within_budget(start.elapsed(), 60)?;
    check(worst < 1e-5, format!("max relative error {worst:.2e}"))
}

fn criterion_5(dir: &Path) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for kappa in [0.5, 1.0, 4.0] {
        let spec = DistributionSpec::von_mises_fisher(2, None, kappa).map_err(|e| e.to_string())?;
        let law = spec.polar_law().map_err(|e| e.to_string())?.ok_or("vMF has no polar law")?;
        let coefficient = rotsym_hessian_coefficient(2, law.as_ref()).map_err(|e| e.to_string())?;
        let dist = format!(r#"{{"type":"vmf","m":2,"kappa":{kappa:?}}}"#);
        let limit = number(&json(&["limit", "--dist", &dist])?, "limit_modulation")?;
        let out = dir.join(format!("c5-{kappa}.csv"));
        fss(&[
            "--seed", "55", "--out", out.to_str().unwrap(),
            "simulate-modulation", "--dist", &dist, "--n-grid", "100", "--replicates", "10000",
        ])?;
        let e = curve_file(&out)?.entries[0];
        ok &= coefficient < 2.0 && limit > 1.0 && e.modulation - 1.0 >= 3.0 * e.se;
        detail.push(format!(
            "κ={kappa}: coef {coefficient:.4}, limit {limit:.3}, m̂ {:.3}±{:.3}",
            e.modulation, e.se
        ));
    }
    check(ok, detail.join("; "))
}

fn criterion_6(runs: &Runs) -> Outcome {
    let limit = number(&json(&["limit", "--dist", RING])?, "limit_modulation")?;
    let e = curve_file(&runs.ring(1)?)?.entries[0];
    let ok = (limit - 4.0).abs() < 1e-9 && (e.modulation - limit).abs() <= 3.0 * e.se;
    check(ok, format!("limit {limit:.12}, m̂ at n=1000 {:.3}±{:.3}", e.modulation, e.se))
}

/// Illinois regula falsi on a sign-changing bracket.
fn regula_falsi(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let (mut fa, mut fb) = (g(a), g(b));
    assert!(fa * fb < 0.0);
    let mut side = 0;
    for _ in 0..500 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            fa *= if side == 1 { 0.5 } else { 1.0 };
            side = 1;
        }
        b = c;
        fb = fc;
    }
    b
}

fn criterion_7() -> Outcome {
    let search = json(&["ring-search", "--m", "4", "--target", "100"])?;
    let theta = number(&search, "theta")?;
    let alpha = number(&search, "alpha")?;
    let achieved = number(&search, "achieved_limit")?;
    let dist = format!(r#"{{"type":"ring_mixture","m":4,"theta":{theta:?},"alpha":{alpha:?}}}"#);
    let recomputed = number(&json(&["limit", "--dist", &dist])?, "limit_modulation")?;
    let search_ok = achieved > 100.0 && recomputed > 100.0 && ((recomputed - achieved) / achieved).abs() < 1e-6;

    let mut thresholds = Vec::new();
    let mut worst: f64 = 0.0;
    for m in 2..=64usize {
        let t = feasibility_threshold(m).map_err(|e| e.to_string())?;
        let c = -1.0 / (m as f64 - 1.0);
        let root = regula_falsi(|x| x / x.tan() - c, PI / 2.0 + 1e-9, PI - 1e-6);
        worst = worst.max((t - root).abs());
        thresholds.push(t);
    }
    let decreasing = thresholds.windows(2).all(|w| w[1] < w[0]) && thresholds.iter().all(|&t| t > PI / 2.0);
    // θ* - π/2 ≈ 2/(π(m-1)) for large m.
    let scaled: Vec<f64> = thresholds
        .iter()
        .enumerate()
        .map(|(i, t)| (t - PI / 2.0) * (i as f64 + 1.0))
        .collect();
    let trend = scaled.iter().all(|s| (0.4..0.7).contains(s)) && (scaled[scaled.len() - 1] - 2.0 / PI).abs() < 0.01;
    let ok = search_ok && worst < 1e-6 && decreasing && trend;
    check(
        ok,
        format!(
            "θ={theta:.4} α={alpha:.4} limit {achieved:.1}, root error {worst:.1e}, θ*(2)={:.5} θ*(64)={:.5}",
            thresholds[0],
            thresholds[thresholds.len() - 1]
        ),
    )
}

fn criterion_8(runs: &Runs) -> Outcome {
    let start = Instant::now();
    let path = runs.rejection(1)?;
    within_budget(start.elapsed(), 1800)?;
    let rows = read_rejection_table(read_file(&path)?.as_slice()).map_err(|e| e.to_string())?;
    let find = |m: TestMethod| -> Result<&RejectionRow, String> {
        rows.iter().find(|r| r.method == m && r.offset == 0.0).ok_or(format!("no {m} row"))
    };
    let q = find(TestMethod::Quantile)?;
    let b = find(TestMethod::Bootstrap)?;
    let null_se = (0.05 * 0.95 / q.replicates as f64).sqrt();
    let q_ok = q.replicates == 2000 && q.rate - 0.05 >= 3.0 * q.se.max(null_se);
    let b_ok = b.replicates == 2000 && (0.03..=0.075).contains(&b.rate);
    let gap_ok = q.rate - b.rate > 3.0 * (q.se.powi(2) + b.se.powi(2)).sqrt();
    check(
        q_ok && b_ok && gap_ok,
        format!(
            "quantile {:.4}±{:.4}, bootstrap {:.4}±{:.4}, {:.1}s",
            q.rate,
            q.se,
            b.rate,
            b.se,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn synthetic_year(path: &Path, stream: u64, mu: f64) -> Result<(), String> {
    let spec = DistributionSpec::von_mises(mu, 1.5).map_err(|e| e.to_string())?;
    let Sample::Circle(angles) = draw(&spec, 365, &RandomStream::new(stream)).map_err(|e| e.to_string())? else {
        return Err("expected a circular sample".into());
    };
    let mut text = String::from("day,angle,calm\n");
    for (day, a) in angles.iter().enumerate() {
        // Degrees on [0, 360) with one decimal, as in station records.
        let deg = (a.to_degrees().rem_euclid(360.0) * 10.0).round() / 10.0 % 360.0;
        text.push_str(&format!("{},{deg:.1},0\n", day + 1));
    }
    std::fs::write(path, text).map_err(|e| e.to_string())
}

fn require(v: &Value, key: &str, pred: fn(&Value) -> bool) -> Result<(), String> {
    match v.get(key) {
        Some(x) if pred(x) => Ok(()),
        Some(x) => Err(format!("field '{key}' has unexpected value {x}")),
        None => Err(format!("missing field '{key}'")),
    }
}

fn is_prob(v: &Value) -> bool {
    v.as_f64().is_some_and(|p| (0.0..=1.0).contains(&p))
}

fn is_nonneg(v: &Value) -> bool {
    v.as_f64().is_some_and(|x| x >= 0.0)
}

fn is_count(v: &Value) -> bool {
    v.as_u64().is_some()
}

fn criterion_9(dir: &Path) -> Outcome {
    let mut detail = Vec::new();
    let mut radians = Vec::new();
    for (year, mu) in [(2017u64, -2.0), (2018, -1.7)] {
        let raw = dir.join(format!("wind-{year}.csv"));
        synthetic_year(&raw, year, mu)?;
        let dataset = json(&["--json", "ingest-angles", "--input", raw.to_str().unwrap(), "--unit", "deg"])?;
        require(&dataset, "n", |v| v.as_u64() == Some(365))?;
        require(&dataset, "calm_skipped", is_count)?;
        require(&dataset, "source_unit", |v| v.as_str() == Some("degrees"))?;
        require(&dataset, "angles", |v| {
            v.as_array()
                .is_some_and(|a| a.iter().all(|x| x.as_f64().is_some_and(|t| (-PI..PI).contains(&t))))
        })?;
        let rad = dir.join(format!("wind-{year}-rad.csv"));
        fss(&["--out", rad.to_str().unwrap(), "ingest-angles", "--input", raw.to_str().unwrap(), "--unit", "deg"])?;
        radians.push(rad);
    }
    let reports = json(&[
        "--seed", "9", "test", "--method", "both",
        "--sample1", radians[0].to_str().unwrap(), "--sample2", radians[1].to_str().unwrap(), "--B", "10000",
    ])?;
    let reports = reports.as_array().ok_or("test --method both should emit an array")?;
    if reports.len() != 2 {
        return Err(format!("expected 2 reports, got {}", reports.len()));
    }
    for r in reports {
        require(r, "method", |v| matches!(v.as_str(), Some("quantile" | "bootstrap")))?;
        require(r, "statistic", is_nonneg)?;
        require(r, "dof", |v| v.as_u64() == Some(1))?;
        require(r, "p_value", is_prob)?;
        require(r, "n1", |v| v.as_u64() == Some(365))?;
        require(r, "n2", |v| v.as_u64() == Some(365))?;
        require(r, "B", is_count)?;
        require(r, "seed", is_count)?;
        detail.push(format!("{} p={:.3e}", r["method"].as_str().unwrap(), r["p_value"].as_f64().unwrap()));
    }
    for rad in &radians {
        let b = json(&["--seed", "9", "bootstrap-modulation", "--input", rad.to_str().unwrap(), "--B", "10000"])?;
        require(&b, "estimate", is_nonneg)?;
        require(&b, "se", is_nonneg)?;
        require(&b, "n", |v| v.as_u64() == Some(365))?;
        require(&b, "B", |v| v.as_u64() == Some(10_000))?;
        require(&b, "seed", |v| v.as_u64() == Some(9))?;
        detail.push(format!("m̂={:.3}±{:.3}", number(&b, "estimate")?, number(&b, "se")?));
    }
    Ok(detail.join(", "))
}

fn grid_minimum(angles: &[f64], grid: usize) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    for i in 0..grid {
        let p = -PI + TAU * i as f64 / grid as f64;
        let mut s = 0.0;
        for &x in angles {
            let mut d = (x - p).abs();
            if d > PI {
                d = TAU - d;
            }
            s += d * d;
        }
        if s < best.1 {
            best = (p, s);
        }
    }
    (best.0, best.1 / angles.len() as f64)
}

fn uniform_direction<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn criterion_10() -> Outcome {
    let opts = MeanOptions::default();
    let tie = RandomStream::new(1010);
    let spec = DistributionSpec::von_mises(0.0, 0.5).map_err(|e| e.to_string())?;
    let mut worst_gap: f64 = 0.0;
    let mut candidate_ok = true;
    for r in 0..100 {
        let s = draw(&spec, 50, &RandomStream::with_id(10, r)).map_err(|e| e.to_string())?;
        let Sample::Circle(a) = &s else { unreachable!() };
        let exact = frechet_mean(&s, &opts, &tie).map_err(|e| e.to_string())?;
        let mu = exact.mean.as_angle().ok_or("circle mean expected")?;
        let (p, v) = grid_minimum(a, 1_000_000);
        if exact.value > v + 1e-12 {
            return Err(format!("replicate {r}: grid value {v} below exact {}", exact.value));
        }
        worst_gap = worst_gap.max(circle_distance(mu, p));
        candidate_ok &= (circular_mean_by_candidates(a).1 - exact.value).abs() < 1e-12;
    }
    let circle_ok = worst_gap <= TAU * 1e-6 && candidate_ok;

    let mut improved = 0;
    let mut rng = RandomStream::new(1011).rng();
    for m in [2usize, 4] {
        let spec = DistributionSpec::von_mises_fisher(m, None, 1.5).map_err(|e| e.to_string())?;
        for r in 0..5 {
            let s = draw(&spec, 50, &RandomStream::with_id(100 + m as u64, r)).map_err(|e| e.to_string())?;
            let mean = frechet_mean(&s, &opts, &tie).map_err(|e| e.to_string())?;
            let center = mean.mean.as_slice().ok_or("sphere mean expected")?.to_vec();
            let basis = tangent_basis(&center);
            for k in 0..1000 {
                let q = if k % 2 == 0 {
                    uniform_direction(&mut rng, m + 1)
                } else {
                    let dir = uniform_direction(&mut rng, m);
                    let radius = 0.3 * rng.random::<f64>();
                    let v: Vec<f64> =
                        (0..=m).map(|i| radius * (0..m).map(|j| dir[j] * basis[j][i]).sum::<f64>()).collect();
                    let mut q = vec![0.0; m + 1];
                    sphere_exp_ambient(&center, &v, &mut q);
                    q
                };
                let f = frechet_function(&s, &SpherePoint::normalized(q).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                if f < mean.value - 1e-12 {
                    improved += 1;
                }
            }
        }
    }
    check(
        circle_ok && improved == 0,
        format!("max grid distance {worst_gap:.2e} (limit {:.2e}), improving probes {improved}/10000", TAU * 1e-6),
    )
}

fn criterion_11(runs: &Runs) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    type Rerun = fn(&Runs, usize) -> Result<PathBuf, String>;
    let pairs: [(&str, Rerun); 3] =
        [("1", Runs::euclidean), ("6", Runs::ring), ("8", Runs::rejection)];
    for (name, run) in pairs {
        let single = read_file(&runs.path(&format!("c{name}"), 1))?;
        let multi = read_file(&run(runs, 8)?)?;
        let same = !single.is_empty() && single == multi;
        ok &= same;
        detail.push(format!("criterion {name} {}", if same { "identical" } else { "differs" }));
    }
    check(ok, detail.join(", "))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let runs = Runs {
        dir: dir.path().to_path_buf(),
    };
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(|| criterion_1(&runs))),
        (2, Box::new(|| criterion_2(dir.path()))),
        (3, Box::new(|| criterion_3(dir.path()))),
        (4, Box::new(criterion_4)),
        (5, Box::new(|| criterion_5(dir.path()))),
        (6, Box::new(|| criterion_6(&runs))),
        (7, Box::new(criterion_7)),
        (8, Box::new(|| criterion_8(&runs))),
        (9, Box::new(|| criterion_9(dir.path()))),
        (10, Box::new(criterion_10)),
        (11, Box::new(|| criterion_11(&runs))),
    ];
    let mut failed = 0;
    for (id, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id}: FAIL ({detail}) [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
