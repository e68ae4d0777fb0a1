//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::process::Command;
use std::time::{Duration, Instant};

use hotstreak::parallel::par_batch_analyze;
use hotstreak_core::analysis::null_component_histograms;
use hotstreak_core::analysis::{ConfigGrid, Observation, ObservationKey, Scope};
use hotstreak_core::resampling::{
    bernoulli_draw, exact_null, null_mean_bias, p_value, permutation_draw, permutation_null, TestConfig,
};
use hotstreak_core::{
    components, conditional_counts, t_k, t_k_miss, Depth, Fraction, Outcome, ShotString, StatValue, Statistic,
};

const X60: &str = "11011110010111111001110111101110111101010101";
const THOMPSON_DET: &str = "1110100110000011";

fn depth(k: usize) -> Depth {
    Depth::new(k).unwrap()
}

fn frac(n: i64, d: i64) -> StatValue {
    StatValue::Defined(Fraction::new(n, d))
}

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn worked_example() -> Check {
    let s: ShotString = THOMPSON_DET.parse().unwrap();
    let c = components(&s, depth(2));
    let hit = conditional_counts(&s, depth(2), Outcome::Hit);
    let miss = conditional_counts(&s, depth(2), Outcome::Miss);
    let unrealized = hit.unrealized_sets + miss.unrealized_sets;
    ensure(
        c.tk == frac(-1, 15) && c.hit == frac(1, 3) && c.miss == frac(2, 5) && unrealized == 1,
        format!("t_2 = {}, hit = {}, miss = {}, unrealized = {unrealized}", c.tk, c.hit, c.miss),
    )
}

fn sixty_point_game() -> Check {
    let s: ShotString = X60.parse().unwrap();
    let hit = conditional_counts(&s, depth(2), Outcome::Hit);
    let ok = hit.realized_sets == 19
        && hit.successes == 12
        && t_k_miss(&s, depth(2)) == frac(1, 1)
        && t_k(&s, depth(2)) == frac(-7, 19);
    ensure(ok, format!("hit sets {}/{}, t_2 = {}", hit.successes, hit.realized_sets, t_k(&s, depth(2))))
}

fn sixty_point_p_value() -> Check {
    let s: ShotString = X60.parse().unwrap();
    let observed = t_k(&s, depth(2));
    let mut worst: (f64, Duration) = (0.0, Duration::ZERO);
    let mut ps = Vec::new();
    for seed in 1..=10 {
        let cfg = TestConfig::new(depth(2)).with_resamples(10_000).with_seed(seed);
        let start = Instant::now();
        let p = p_value(observed, &permutation_null(&s, &cfg).unwrap()).unwrap().value();
        let elapsed = start.elapsed();
        worst = (worst.0.max((p - 0.84).abs()), worst.1.max(elapsed));
        ps.push(p);
    }
    ensure(
        worst.0 <= 0.03 && worst.1 < Duration::from_secs(5),
        format!("p over 10 seeds in [{:.4}, {:.4}], slowest run {:?}", min(&ps), max(&ps), worst.1),
    )
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn monte_carlo_vs_exact() -> Check {
    let (mut cases, mut agree, mut attempt) = (0, 0, 0u64);
    while cases < 200 {
        attempt += 1;
        let len = 4 + (attempt % 9) as usize;
        let k = 1 + (attempt % 2) as usize;
        let hit_rate = [0.3, 0.5, 0.7][(attempt % 3) as usize];
        let shots = bernoulli_draw(len, hit_rate, 0xACCE_0004, attempt);
        let observed = t_k(&shots, depth(k));
        if !observed.is_defined() {
            continue;
        }
        cases += 1;
        let cfg = TestConfig::new(depth(k)).with_resamples(10_000).with_seed(attempt);
        let exact = p_value(observed, &exact_null(&shots, &cfg).unwrap()).unwrap().value();
        let mc = p_value(observed, &permutation_null(&shots, &cfg).unwrap()).unwrap().value();
        if (mc - exact).abs() <= 4.0 * (mc * (1.0 - mc) / 10_000.0).sqrt() {
            agree += 1;
        }
    }
    ensure(agree * 100 >= cases * 99, format!("{agree}/{cases} within tolerance"))
}

fn null_bias() -> Check {
    let mut worst = f64::NEG_INFINITY;
    let mut cells = 0;
    for len in 5..=12 {
        for hits in 2..=len - 2 {
            let bias = null_mean_bias(len, hits, depth(1), Statistic::Tk).unwrap();
            let Some(bias) = bias else {
                return Err(format!("undefined mean at L={len}, h={hits}"));
            };
            worst = worst.max(bias.to_f64());
            cells += 1;
        }
    }
    ensure(worst < 0.0, format!("{cells} cells, largest mean {worst:.6}"))
}

fn rejection_rate() -> Check {
    let dataset: Vec<Observation> = (0..1000u64)
        .map(|i| Observation {
            key: ObservationKey {
                subject: format!("S{i:04}"),
                date: "2016-10-25".into(),
                opponent: "NUL".into(),
                scope: Scope::Game,
            },
            shots: ShotString::new(bernoulli_draw(20, 0.5, 0xACCE_0006, i)),
            sequence_index: 0,
        })
        .collect();
    let grid = ConfigGrid { depths: vec![depth(2)], ..ConfigGrid::default() };
    let results = par_batch_analyze(&dataset, &grid, None).unwrap();
    let rejected = results.iter().filter(|r| r.is_significant()).count();
    let rate = rejected as f64 / results.len() as f64;
    let bound = 0.05 + 3.0 * (0.0475f64 / 1000.0).sqrt();
    ensure(rate <= bound, format!("{rejected}/1000 rejected, rate {rate:.4} <= {bound:.4}"))
}

fn miss_spike() -> Check {
    let base: ShotString = X60.parse().unwrap();
    let mut strings = vec![base.clone()];
    strings.extend((0..9).map(|i| ShotString::new(permutation_draw(&base, 0xACCE_0007, i))));
    let mut violations = 0;
    for s in &strings {
        assert_eq!((s.len(), s.hits()), (44, 31));
        let cfg = TestConfig::new(depth(2)).with_resamples(10_000).with_seed(3);
        let h = null_component_histograms(s, &cfg, 40).unwrap();
        violations += h.identity_violations;
        if h.miss_null.mode() != Some(Fraction::from_integer(1)) {
            return Err(format!("{s}: t_2,miss mode {:?}", h.miss_null.mode()));
        }
    }
    ensure(violations == 0, format!("{} strings, mode 1 everywhere, {violations} identity violations", strings.len()))
}

fn thread_invariance() -> Check {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/shots.csv");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let out_dir = dir.path().join(threads);
        let status = Command::new(env!("CARGO_BIN_EXE_hotstreak"))
            .args(["batch", "--input", fixtures.to_str().unwrap(), "--output", out_dir.to_str().unwrap()])
            .args(["--k", "1,2,3", "--null", "perm,bern-game,bern-season", "--threads", threads])
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return Err(format!("batch with {threads} threads exited {status}"));
        }
        outputs.push(std::fs::read(out_dir.join("results.json")).unwrap());
    }
    ensure(
        outputs.windows(2).all(|w| w[0] == w[1]),
        format!("results.json for 1, 3, 8 threads ({} bytes)", outputs[0].len()),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1 worked example t_2 = -1/15", worked_example),
        ("AC2 sixty-point game t_2 = -7/19", sixty_point_game),
        ("AC3 sixty-point game p ~ 0.84", sixty_point_p_value),
        ("AC4 Monte Carlo agrees with enumeration", monte_carlo_vs_exact),
        ("AC5 null mean of t_1 is negative", null_bias),
        ("AC6 rejection rate under fair coin", rejection_rate),
        ("AC7 t_2,miss spike at 1", miss_spike),
        ("AC8 batch output independent of threads", thread_invariance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
