//! The fourteen acceptance criteria. Each criterion prints one line,
//! `criterion N PASS|FAIL  title: details [seconds]`, straight to stderr so
//! the lines survive output capture; the test fails if any criterion does.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavelab::report::Outcome;
use wavelab::{run, Config};
use wavelab_core::experiments::{fs_membership, FsParams, TRIVIAL_GROWTH};
use wavelab_core::model::Model;
use wavelab_core::numerics::Matrix;
use wavelab_core::triple::{green_residual, green_sides, vishik_decompose, DomainElement};
use wavelab_core::Error;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn outcome(json: &str) -> Outcome {
    let cfg = Config::from_json(json).expect("config parses");
    run::validate(&cfg).expect("config valid");
    let model = cfg.model.build().expect("model builds");
    run::execute(&cfg, &model).expect("experiment runs")
}

fn num(o: &Outcome, key: &str) -> f64 {
    o.results[key].as_f64().unwrap_or_else(|| panic!("no scalar result {key}"))
}

fn verdicts(o: &Outcome) -> Check {
    match o.verdicts.iter().find(|v| !v.pass) {
        None => Ok(String::new()),
        Some(v) => Err(format!("failed check '{}' (value {:?}, threshold {:?})", v.check, v.value, v.threshold)),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: f64) -> Result<(), String> {
    let s = start.elapsed().as_secs_f64();
    ensure(s < limit, || format!("took {s:.1} s, limit {limit} s"))
}

/// Random SPD mock model of dimension `n` with a random well-conditioned
/// splitting.
fn random_mock(n: usize, rng: &mut ChaCha8Rng) -> Model<f64> {
    let k = rng.gen_range(1..n);
    let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut l = a.tr_mul(&a);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] /= n as f64;
        }
        l[(i, i)] += 0.5;
    }
    let eps = 0.3 / (n as f64).sqrt();
    let basis = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { eps * rng.gen_range(-1.0..1.0) });
    let kb = basis.select_cols(&(0..k).collect::<Vec<_>>());
    let vb = basis.select_cols(&(k..n).collect::<Vec<_>>());
    Model::mock(l, kb, vb).expect("random mock is valid")
}

fn mock2() -> Model<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Model::mock(
        Matrix::diagonal(&[1.0, 2.0]),
        Matrix::from_columns(&[vec![s, s]]),
        Matrix::from_columns(&[vec![1.0, 0.0]]),
    )
    .unwrap()
}

const MOCK3: &str = r#"{"kind": "mock", "l": [[1, 0, 0], [0, 4, 0], [0, 0, 9]],
    "k_basis": [[1, 1, 1]], "complement": [[1, 0, 0], [0, 1, 0]], "seed": 5}"#;

fn c1_green() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mock_worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=64);
        let m = random_mock(n, &mut rng);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = green_residual(&m, &DomainElement::Ambient(u), &DomainElement::Ambient(v)).map_err(|e| e.to_string())?;
        mock_worst = mock_worst.max(r);
    }
    ensure(mock_worst <= 1e-12, || format!("mock residual {mock_worst:e}"))?;
    let interval = Model::interval(8).unwrap();
    let mut poly_worst = 0.0f64;
    for _ in 0..100 {
        let mut p = || -> Vec<f64> { (0..rng.gen_range(1..7)).map(|_| rng.gen_range(-3.0..3.0)).collect() };
        let (u, v) = (p(), p());
        let r = green_residual(&interval, &DomainElement::poly(u), &DomainElement::poly(v)).map_err(|e| e.to_string())?;
        poly_worst = poly_worst.max(r);
    }
    ensure(poly_worst <= 1e-8, || format!("interval residual {poly_worst:e}"))?;
    let (a, b) = green_sides(&interval, &DomainElement::poly(vec![0.0, 1.0, -1.0]), &DomainElement::poly(vec![0.0, 1.0])).unwrap();
    ensure((a - 1.0).abs() <= 1e-12 && (b - 1.0).abs() <= 1e-12, || format!("interval fixture sides {a}, {b}"))?;
    let (a, b) = green_sides(&mock2(), &DomainElement::Ambient(vec![2.0, 3.0]), &DomainElement::Ambient(vec![0.0, 1.0])).unwrap();
    ensure((a - 2.0).abs() <= 1e-13 && (b - 2.0).abs() <= 1e-13, || format!("mock fixture sides {a}, {b}"))?;
    within(start, 5.0)?;
    Ok(format!("mock max {mock_worst:.1e}, interval max {poly_worst:.1e}, fixtures 1 and 2"))
}

fn c2_vishik() -> Check {
    let start = Instant::now();
    let m = Model::interval(512).unwrap();
    let c = vishik_decompose(&m, &DomainElement::poly(vec![0.0, 1.0, -1.0])).map_err(|e| e.to_string())?;
    let h = c.h.k_part.iter().map(|v: &f64| v.abs()).fold(0.0, f64::max);
    let g = c.g.iter().map(|v: &f64| (v - 2.0).abs()).fold(0.0, f64::max);
    let y0 = c.y0_profile.as_ref().ok_or("no closed-form y0")?;
    let y0_sup = (0..=1000).map(|i| y0.value(i as f64 / 1000.0).abs()).fold(0.0, f64::max);
    ensure(h <= 1e-12 && g <= 1e-12 && y0_sup <= 1e-12, || format!("h {h:e}, g−2 {g:e}, y0 {y0_sup:e}"))?;
    within(start, 1.0)?;
    Ok(format!("h = 0, g = 2, y0 = 0 within {:.1e}", h.max(g).max(y0_sup)))
}

fn c3_oracle() -> Check {
    let start = Instant::now();
    let o = outcome(r#"{"model": {"kind": "interval", "n_modes": 1024}, "experiment": {"name": "alpha_oracle"}}"#);
    verdicts(&o)?;
    let e: Vec<f64> = serde_json::from_value(o.results["rel_errors"].clone()).unwrap();
    within(start, 120.0)?;
    Ok(format!("rel L² errors {:.1e} → {:.1e} → {:.1e}", e[0], e[1], e[2]))
}

fn c4_representation() -> Check {
    let mock = outcome(&format!(r#"{{"model": {MOCK3}, "experiment": {{"name": "representation"}}}}"#));
    verdicts(&mock)?;
    let interval = outcome(r#"{"model": {"kind": "interval", "n_modes": 64}, "experiment": {"name": "representation"}}"#);
    verdicts(&interval)?;
    Ok(format!(
        "sine vs 1−cos forms: mock {:.1e}, interval {:.1e}",
        num(&mock, "max_difference"),
        num(&interval, "max_difference")
    ))
}

fn c5_duality() -> Check {
    let mock = outcome(&format!(r#"{{"model": {MOCK3}, "experiment": {{"name": "duality"}}}}"#));
    verdicts(&mock)?;
    let interval = outcome(r#"{"model": {"kind": "interval", "n_modes": 128, "seed": 4}, "experiment": {"name": "duality"}}"#);
    verdicts(&interval)?;
    ensure(mock.results["lemma2_sign"] == -1, || "sign not resolved to minus".into())?;
    Ok(format!(
        "20 triples: mock {:.1e}, interval {:.1e}; oracle sign −1",
        num(&mock, "max_residual"),
        num(&interval, "max_residual")
    ))
}

fn c6_finite_speed() -> Check {
    let start = Instant::now();
    let o = outcome(r#"{"model": {"kind": "interval", "n_modes": 512}, "experiment": {"name": "fs_membership"}}"#);
    verdicts(&o)?;
    let max = |k: &str| -> f64 {
        serde_json::from_value::<Vec<f64>>(o.results[k].clone()).unwrap().into_iter().fold(0.0, f64::max)
    };
    within(start, 300.0)?;
    Ok(format!(
        "leakage inner {:.1e}, outer {:.1e}; refined {:.1e}, {:.1e}",
        max("leakage_inner"),
        max("leakage_outer"),
        max("refined_leakage_inner"),
        max("refined_leakage_outer")
    ))
}

fn c7_support() -> Check {
    let o = outcome(r#"{"model": {"kind": "interval", "n_modes": 1024}, "experiment": {"name": "wave_support"}}"#);
    verdicts(&o)?;
    Ok(format!("energy outside Ω^t at t = 0.1, 0.3: {:.1e} of total", num(&o, "max_outside_energy")))
}

fn c8_local_controllability() -> Check {
    let lc = outcome(r#"{"model": {"kind": "interval", "n_modes": 1024, "seed": 11}, "experiment": {"name": "local_controllability"}}"#);
    verdicts(&lc)?;
    let growth = outcome(r#"{"model": {"kind": "interval", "n_modes": 128, "seed": 9}, "experiment": {"name": "growth_profile"}}"#);
    verdicts(&growth)?;
    Ok(format!("angle U^0.25 vs H^0.25 {:.1e} rad; ranks {}", num(&lc, "largest_angle"), growth.results["ranks"]))
}

fn c9_triviality() -> Check {
    let growth = outcome(&format!(
        r#"{{"model": {MOCK3}, "experiment": {{"name": "growth_profile", "taus": [0.1, 0.5, 1.0], "n_samples": 12, "dt": 1e-3, "ramp_width": 0.1}}}}"#
    ));
    verdicts(&growth)?;
    let m = Config::from_json(&format!(r#"{{"model": {MOCK3}, "experiment": {{"name": "fs_membership"}}}}"#)).unwrap();
    let cli = run::validate(&m).err().map(|e| e.to_string()).unwrap_or_default();
    ensure(cli.contains(TRIVIAL_GROWTH), || format!("CLI message: {cli}"))?;
    let core = fs_membership(&m.model.build().unwrap(), &FsParams::new(0.1, 0.2, vec![0.02]));
    ensure(matches!(core, Err(Error::Precondition(ref s)) if s == TRIVIAL_GROWTH), || format!("{core:?}"))?;
    Ok(format!("mock ranks {} flat; fs_membership rejected", growth.results["ranks"]))
}

fn c10_splitting() -> Check {
    let o = outcome(
        r#"{"model": {"kind": "mock", "l": [[1, 0, 0, 0], [0, 4, 0, 0], [0, 0, 9, 0], [0, 0, 0, 16]],
            "k_basis": [[1, 0, 1, 0]], "complement": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]], "seed": 3},
            "experiment": {"name": "splitting"}}"#,
    );
    verdicts(&o)?;
    let nodes = o.tables[0].rows.len() / 2;
    ensure(nodes >= 50, || format!("{nodes} nodes"))?;
    Ok(format!(
        "{nodes} nodes: cross norms {:.1e} (from U), {:.1e} (from D)",
        num(&o, "cross_norm_from_U"),
        num(&o, "cross_norm_from_D")
    ))
}

fn c11_blagoveshchenskii() -> Check {
    let interval = outcome(
        r#"{"model": {"kind": "interval", "n_modes": 64}, "experiment": {"name": "blagoveshchenskii", "t_max": 1.0, "n_intervals": 200}}"#,
    );
    verdicts(&interval)?;
    let mock = outcome(&format!(r#"{{"model": {MOCK3}, "experiment": {{"name": "blagoveshchenskii"}}}}"#));
    verdicts(&mock)?;
    Ok(format!(
        "PDE ratio {:.3} (h = 1/200); mock cones C {:.1e}, C' {:.1e}",
        num(&interval, "order_ratio"),
        num(&mock, "cone_residual_c"),
        num(&mock, "cone_residual_cprime")
    ))
}

fn c12_completeness() -> Check {
    let o = outcome(r#"{"model": {"kind": "interval", "n_modes": 256, "seed": 1}, "experiment": {"name": "completeness"}}"#);
    verdicts(&o)?;
    Ok(format!(
        "angle {:.3} rad at 128 sources, {:.3} at 256; impulse leakage {:.1e}",
        num(&o, "largest_angle"),
        num(&o, "largest_angle_doubled"),
        num(&o, "impulse_leakage")
    ))
}

fn c13_interior() -> Check {
    let o = outcome(r#"{"model": {"kind": "interval", "n_modes": 256}, "experiment": {"name": "interior_domain"}}"#);
    verdicts(&o)?;
    ensure(o.results.contains_key("parabola_rejection"), || "parabola not rejected".into())?;
    Ok(format!("bump and windowed e₁ in Dom L₀, parabola rejected; ‖Γ₂y‖ = {:.1e}", num(&o, "windowed_e1_gamma2_norm")))
}

fn c14_determinism() -> Check {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, r#"{"model": {"kind": "interval", "n_modes": 128}, "experiment": {"name": "duality", "triples": 5}}"#)
        .map_err(|e| e.to_string())?;
    let hash = |sub: &str| -> Result<String, String> {
        let out = dir.join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_wavelab"))
            .args(["run", cfg.to_str().unwrap(), "--seed", "7", "--threads", "2", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
        let text = std::fs::read_to_string(out.join("report.json")).map_err(|e| e.to_string())?;
        let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        Ok(report["results_hash"].as_str().unwrap_or_default().to_string())
    };
    let (a, b) = (hash("first")?, hash("second")?);
    ensure(!a.is_empty() && a == b, || format!("{a} vs {b}"))?;
    Ok(format!("two runs, seed 7, 2 threads: hash {}…", &a[..16]))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 14] = [
        ("Green identity", c1_green),
        ("Vishik decomposition fixture", c2_vishik),
        ("oracle equivalence", c3_oracle),
        ("representation equivalence", c4_representation),
        ("duality", c5_duality),
        ("finite-speed principle", c6_finite_speed),
        ("wave support", c7_support),
        ("local controllability", c8_local_controllability),
        ("triviality detection", c9_triviality),
        ("splitting", c10_splitting),
        ("Blagoveshchenskii identities", c11_blagoveshchenskii),
        ("completeness", c12_completeness),
        ("interior domain", c13_interior),
        ("determinism", c14_determinism),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let line = match &result {
            Ok(detail) => format!("criterion {:2} PASS  {title}: {detail} [{secs:.1} s]", i + 1),
            Err(why) => format!("criterion {:2} FAIL  {title}: {why} [{secs:.1} s]", i + 1),
        };
        writeln!(err, "{line}").unwrap();
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
