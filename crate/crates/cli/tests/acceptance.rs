//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use critsurf::calibrate::{
    calibrate_eta, exceedance_fraction, load_surfaces, null_permutation, save_surfaces, surfaces_from_json,
    surfaces_to_json, CalibrationConfig, NullEnsemble,
};
use critsurf::depcore::{copula_grid, hypergeom_pmf, normal_approx_gap, normal_cdf, HypergeomParams, RankPairs};
use critsurf::rng::split_seed;
use critsurf::{empirical_power, generate, CriticalSurfaces, ModelSpec};
use critsurf_cli::report::ReportFile;

const ALPHA: f64 = 0.05;
const AC1_TV_MAX: f64 = 0.01;
const AC2_SE: f64 = 0.00069;
const AC3_TOLERANCE: f64 = 0.20;
const AC3_ETA_392: f64 = 0.000464;
const AC3_ETA_517: f64 = 0.000366;
const AC5_EXACT_TOL: f64 = 1e-12;

struct Suite {
    failures: usize,
    all_eta: Vec<(usize, usize, f64)>,
}

impl Suite {
    fn check(&mut self, id: &str, what: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {id} {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn calibrate(&mut self, n: usize, k: usize, reps: usize, seed: u64) -> CriticalSurfaces {
        let config = CalibrationConfig::new(n).with_k(k).with_replicates(reps).with_seed(seed);
        let cs = calibrate_eta(&NullEnsemble::generate(&config).unwrap(), ALPHA).unwrap();
        self.all_eta.push((n, k, cs.eta));
        cs
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn ac1(suite: &mut Suite) {
    let (n, m, l) = (25usize, 10u64, 15u64);
    let reps = 100_000u64;
    let mut freq = vec![0u64; n + 1];
    let identity: Vec<usize> = (1..=n).collect();
    for r in 0..reps {
        let ranks = RankPairs::new(identity.clone(), null_permutation(n, split_seed(2024, r))).unwrap();
        freq[copula_grid(&ranks).count(m as usize, l as usize) as usize] += 1;
    }
    let total = binomial(25, 10) as f64;
    let params = HypergeomParams::at_point(n as u64, 0.4, 0.6).unwrap();
    let mut tv = 0.0;
    let mut pmf_err: f64 = 0.0;
    for x in 0..=n as u64 {
        let exact = if x <= m && x <= l && m - x <= 25 - l {
            (binomial(l, x) * binomial(25 - l, m - x)) as f64 / total
        } else {
            0.0
        };
        pmf_err = pmf_err.max((hypergeom_pmf(&params, x as i64) - exact).abs());
        tv += (freq[x as usize] as f64 / reps as f64 - exact).abs();
    }
    tv *= 0.5;
    suite.check(
        "AC1",
        "MC law of n*C_n(0.4,0.6) at n=25 vs Hyp(10,15,25)",
        tv <= AC1_TV_MAX && pmf_err < 1e-14,
        format!("TV = {tv:.5} (limit {AC1_TV_MAX}), |pmf - exact| <= {pmf_err:.1e}"),
    );

    let mut mismatches = 0u64;
    let mut checked = 0u64;
    let mut law_err: f64 = 0.0;
    for n in 2..=8usize {
        let mut perm: Vec<usize> = (1..=n).collect();
        let identity: Vec<usize> = (1..=n).collect();
        let mut laws = vec![vec![0u64; n + 1]; (n + 1) * (n + 1)];
        let mut count = 0u64;
        loop {
            let grid = copula_grid(&RankPairs::new(identity.clone(), perm.clone()).unwrap());
            for i in 0..=n {
                for j in 0..=n {
                    let brute = perm[..i].iter().filter(|&&s| s <= j).count() as u32;
                    checked += 1;
                    if grid.count(i, j) != brute {
                        mismatches += 1;
                    }
                    laws[i * (n + 1) + j][brute as usize] += 1;
                }
            }
            count += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        for i in 1..n {
            for j in 1..n {
                let params = HypergeomParams::new(i as u64, j as u64, n as u64).unwrap();
                for (x, &f) in laws[i * (n + 1) + j].iter().enumerate() {
                    law_err = law_err.max((f as f64 / count as f64 - hypergeom_pmf(&params, x as i64)).abs());
                }
            }
        }
    }
    suite.check(
        "AC1",
        "exhaustive copula counts for n <= 8",
        mismatches == 0 && law_err < 1e-12,
        format!("{checked} counts checked, {mismatches} mismatches, exact law error {law_err:.1e}"),
    );
}

fn ac2(suite: &mut Suite) -> CriticalSurfaces {
    let cs = suite.calibrate(100, 10, 100_000, 7);
    let held_out = NullEnsemble::generate(&CalibrationConfig::new(100).with_k(10).with_seed(8_000_001)).unwrap();
    let size = exceedance_fraction(&held_out, &cs.lower, &cs.upper);
    let (lo, hi) = (ALPHA - 4.0 * AC2_SE, ALPHA + 4.0 * AC2_SE);
    suite.check(
        "AC2",
        "held-out global level at n=100, k=10",
        (lo..=hi).contains(&size),
        format!(
            "held-out size {size:.5} in [{lo:.5}, {hi:.5}]; calibration size {:.5}, eta {:.6}",
            cs.achieved_global_size, cs.eta
        ),
    );
    cs
}

fn ac3(suite: &mut Suite) {
    for (n, k, target) in [(392, 19, AC3_ETA_392), (517, 22, AC3_ETA_517)] {
        let cs = suite.calibrate(n, k, 100_000, 1);
        let rel = (cs.eta - target).abs() / target;
        suite.check(
            "AC3",
            &format!("eta anchor n={n}, k={k}, 1e5 replicates"),
            rel <= AC3_TOLERANCE,
            format!("eta = {:.6} vs {target}, relative error {:.3} (limit {AC3_TOLERANCE})", cs.eta, rel),
        );
    }
}

fn ac3_bounds(suite: &mut Suite) {
    let bad: Vec<_> = suite
        .all_eta
        .iter()
        .filter(|&&(n, _, eta)| !(eta >= ALPHA / (n * n) as f64 && eta <= ALPHA))
        .collect();
    let detail = format!("{} calibrations checked, {} outside [alpha/n^2, alpha]", suite.all_eta.len(), bad.len());
    suite.check("AC3", "alpha/n^2 <= eta <= alpha for every calibration", bad.is_empty(), detail);
}

fn ac4(suite: &mut Suite, cs100: &CriticalSurfaces) {
    let cs25 = suite.calibrate(25, 5, 20_000, 11);
    let cs400 = suite.calibrate(400, 20, 20_000, 12);
    let all = [&cs25, cs100, &cs400];
    let noiseless = ModelSpec::family("linear").with_param("noise", 0.0);
    let noisy = ModelSpec::family("linear").with_param("noise", 1.0);
    let p_clean: Vec<f64> = all.iter().map(|cs| empirical_power(&noiseless, cs, 1000, 41).unwrap().power).collect();
    let p_noisy: Vec<f64> = all.iter().map(|cs| empirical_power(&noisy, cs, 1000, 42).unwrap().power).collect();
    let nondecreasing = |p: &[f64]| p.windows(2).all(|w| w[1] >= w[0]);
    suite.check(
        "AC4",
        "noiseless linear power at n=400 (1e3 reps)",
        p_clean[2] >= 0.99,
        format!("power {:.3}", p_clean[2]),
    );
    suite.check(
        "AC4",
        "power nondecreasing over n = 25, 100, 400",
        nondecreasing(&p_clean) && nondecreasing(&p_noisy),
        format!("noiseless {p_clean:?}, noise 1.0 {p_noisy:?}"),
    );

    let maxabs = |cs: &CriticalSurfaces| {
        let up = cs.upper.as_slice().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let lo = cs.lower.as_slice().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        (up, lo)
    };
    let sizes: Vec<(f64, f64)> = [25, 100, 400]
        .iter()
        .map(|&n| maxabs(&suite.calibrate(n, 5, 20_000, 13)))
        .collect();
    let shrinks = sizes.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    suite.check(
        "AC4",
        "null surfaces shrink with n at k=5",
        shrinks,
        format!("max |upper|, max |lower| = {:?}", sizes.iter().map(|(a, b)| format!("({a:.4}, {b:.4})")).collect::<Vec<_>>()),
    );
}

/// Exact law of `n C_n(u, v)` over all `n!` permutations.
fn brute_gap(n: usize, u: f64, v: f64) -> f64 {
    let m = (n as f64 * u).floor() as usize;
    let l = (n as f64 * v).floor() as usize;
    let mut freq = vec![0u64; n + 1];
    let mut perm: Vec<usize> = (1..=n).collect();
    loop {
        freq[perm[..m].iter().filter(|&&s| s <= l).count()] += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let total: u64 = freq.iter().sum();
    let nf = n as f64;
    let d = (m as f64 / nf) * (1.0 - m as f64 / nf) * (l as f64 / nf) * (1.0 - l as f64 / nf);
    let mut cum = 0u64;
    let mut sup: f64 = 0.0;
    for (x, &f) in freq.iter().enumerate() {
        if f == 0 {
            continue;
        }
        let phi = normal_cdf((nf / d).sqrt() * (x as f64 / nf - u * v));
        let before = cum as f64 / total as f64;
        cum += f;
        let after = cum as f64 / total as f64;
        sup = sup.max((before - phi).abs()).max((after - phi).abs());
    }
    sup
}

fn ac5(suite: &mut Suite) {
    let g25 = normal_approx_gap(25, 0.5, 0.5).unwrap();
    let g400 = normal_approx_gap(400, 0.5, 0.5).unwrap();
    suite.check("AC5", "gap(400) < gap(25) at (0.5, 0.5)", g400 < g25, format!("gap(25) = {g25:.6}, gap(400) = {g400:.6}"));
    let exact = normal_approx_gap(6, 0.5, 0.5).unwrap();
    let brute = brute_gap(6, 0.5, 0.5);
    suite.check(
        "AC5",
        "gap at n=6 vs exhaustive permutations",
        (exact - brute).abs() <= AC5_EXACT_TOL,
        format!("exact {exact:.15}, brute force {brute:.15}, difference {:.1e}", (exact - brute).abs()),
    );
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn ac6(suite: &mut Suite, cs100: &CriticalSurfaces) {
    let reps = 4000;
    let null = empirical_power(&ModelSpec::family("independent-uniform"), cs100, reps, 61).unwrap();
    let se0 = (ALPHA * (1.0 - ALPHA) / reps as f64).sqrt();
    suite.check(
        "AC6",
        "null-model size within MC noise of alpha at n=100",
        (null.power - ALPHA).abs() <= 4.0 * se0,
        format!("size {:.4}, |size - alpha| <= 4 se = {:.4}", null.power, 4.0 * se0),
    );

    let w = ModelSpec::family("w-shaped");
    let big = generate(&w, 100_000, 5).unwrap();
    let r_big = pearson(&big.xs(), &big.ys());
    let r_mean = (0..200)
        .map(|i| {
            let s = generate(&w, 100, split_seed(6, i)).unwrap();
            pearson(&s.xs(), &s.ys())
        })
        .sum::<f64>()
        / 200.0;
    let pw = empirical_power(&w, cs100, reps, 62).unwrap();
    suite.check(
        "AC6",
        "W-shaped power >= 0.3 at n=100 with Pearson < 0.1",
        pw.power >= 0.3 && r_big.abs() < 0.1 && r_mean.abs() < 0.1,
        format!("power {:.4}; Pearson {r_big:.4} (n=1e5), mean {r_mean:.4} (n=100)", pw.power),
    );

    let cc = empirical_power(&ModelSpec::family("center-cluster"), cs100, reps, 63).unwrap();
    let se = (cc.standard_error().powi(2) + null.standard_error().powi(2)).sqrt();
    let z = (cc.power - null.power) / se;
    suite.check(
        "AC6",
        "center-of-square dependence detected above null size",
        z >= 10.0,
        format!("power {:.4} vs null {:.4}: {z:.1} standard errors (need 10)", cc.power, null.power),
    );
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_critsurf")).args(args).output().expect("binary runs")
}

fn pipeline(dir: &Path, threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    std::fs::write(
        p("models.toml"),
        "[[model]]\nname = \"null\"\nfamily = \"independent-uniform\"\n\n[[model]]\nname = \"w\"\nfamily = \"w-shaped\"\n",
    )
    .unwrap();
    let steps: Vec<Vec<String>> = vec![
        vec!["calibrate", "--n", "120", "--k", "10", "--reps", "5000", "--seed", "99", "--threads", threads, "--out", &p("surf.json")],
        vec!["generate", "--family", "center-cluster", "--n", "120", "--seed", "5", "--out", &p("data.csv")],
        vec!["test", "--data", &p("data.csv"), "--surfaces", &p("surf.json"), "--seed", "3", "--out", &p("report.json"), "--heatmap-prefix", &p("plot")],
        vec!["diagnose", "--data", &p("data.csv"), "--surfaces", &p("surf.json"), "--out", &p("diag.json")],
        vec!["power", "--models", &p("models.toml"), "--surfaces", &p("surf.json"), "--reps", "200", "--seed", "1", "--out", &p("power.csv")],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(|s| s.to_string()).collect())
    .collect();
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let out = bin(&args);
        if !out.status.success() {
            return Err(format!("{:?} failed: {}", &args[..1], String::from_utf8_lossy(&out.stderr)));
        }
    }
    let names = ["surf.json", "data.csv", "report.json", "diag.json", "power.csv", "plot_qhat.svg", "plot_significant.svg", "plot_scatter.svg"];
    Ok(names.iter().map(|n| (n.to_string(), std::fs::read(dir.join(n)).unwrap())).collect())
}

fn ac7(suite: &mut Suite, cs100: &CriticalSurfaces) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let result = pipeline(a.path(), "1").and_then(|x| pipeline(b.path(), "3").map(|y| (x, y)));
    let (pass, detail) = match &result {
        Ok((x, y)) => {
            let differ: Vec<&str> = x.iter().zip(y).filter(|(p, q)| p.1 != q.1).map(|(p, _)| p.0.as_str()).collect();
            (differ.is_empty(), format!("{} artifacts compared across runs with 1 and 3 threads, differing: {differ:?}", x.len()))
        }
        Err(e) => (false, e.clone()),
    };
    suite.check("AC7", "calibrate -> test -> heatmap -> power is byte-identical", pass, detail);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cs.json");
    save_surfaces(cs100, &path).unwrap();
    let loaded = load_surfaces(&path).unwrap();
    let cache_ok = loaded == *cs100 && surfaces_to_json(&loaded).unwrap() == std::fs::read_to_string(&path).unwrap();
    let report_ok = match &result {
        Ok((x, _)) => {
            let text = String::from_utf8(x[2].1.clone()).unwrap();
            let r = ReportFile::from_json(&text).unwrap();
            r.to_json() == text
        }
        Err(_) => false,
    };
    let sample = generate(&ModelSpec::family("root"), 100, 3).unwrap();
    let direct = ReportFile::from_report(&critsurf::run_test(&sample, cs100, 4).unwrap());
    let reparsed = ReportFile::from_json(&direct.to_json()).unwrap();
    suite.check(
        "AC7",
        "surface cache and report round-trip losslessly",
        cache_ok && report_ok && reparsed == direct,
        format!("cache equal: {cache_ok}, report text stable: {report_ok}, report values equal: {}", reparsed == direct),
    );

    let text = surfaces_to_json(cs100).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut bad = Vec::new();
    let mut mutate = |name: &str, f: &dyn Fn(&mut serde_json::Value)| {
        let mut m = v.clone();
        f(&mut m);
        bad.push((name.to_string(), m.to_string()));
    };
    mutate("lower above upper", &|m| {
        let up = m["upper"][2][3].clone();
        m["lower"][2][3] = serde_json::json!(up.as_f64().unwrap() + 1.0);
    });
    mutate("positive lower", &|m| m["lower"][0][0] = serde_json::json!(0.5));
    mutate("eta above alpha", &|m| m["eta"] = serde_json::json!(0.2));
    mutate("k mismatch", &|m| m["k"] = serde_json::json!(9));
    mutate("ragged rows", &|m| {
        m["upper"][1].as_array_mut().unwrap().pop();
    });
    mutate("missing field", &|m| {
        m.as_object_mut().unwrap().remove("eta");
    });
    mutate("future version", &|m| m["version"] = serde_json::json!(99));
    bad.push(("truncated".into(), text[..text.len() / 3].to_string()));
    let accepted: Vec<&str> = bad.iter().filter(|(_, t)| surfaces_from_json(t).is_ok()).map(|(n, _)| n.as_str()).collect();
    suite.check(
        "AC7",
        "invariant-violating caches rejected on load",
        accepted.is_empty(),
        format!("{} corrupted caches, accepted: {accepted:?}", bad.len()),
    );
}

fn main() {
    let start = Instant::now();
    let mut suite = Suite { failures: 0, all_eta: Vec::new() };
    ac1(&mut suite);
    let cs100 = ac2(&mut suite);
    ac3(&mut suite);
    ac4(&mut suite, &cs100);
    ac5(&mut suite);
    ac6(&mut suite, &cs100);
    ac3_bounds(&mut suite);
    ac7(&mut suite, &cs100);
    println!("acceptance: {} failure(s) in {:.1} s", suite.failures, start.elapsed().as_secs_f64());
    if suite.failures > 0 {
        std::process::exit(1);
    }
}
