mod common;

use common::*;
use hotstreak_core::resampling::{exact_null, p_value, TestConfig};
use hotstreak_core::{Depth, ShotString, Statistic};

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_sixty_point_game() {
    let out = hotstreak(&["analyze", "--shots", X60, "--k", "2", "--resamples", "10000", "--seed", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["t"], "-7/19");
    assert!((v["p"].as_f64().unwrap() - 0.84).abs() < 0.03);
    assert_eq!(v["significant"], false);

    let human = stdout(&hotstreak(&["analyze", "--shots", X60]));
    assert!(human.contains("-7/19"));
    assert!(human.contains("not significant"));
}

#[test]
fn analyze_untestable_exit_code() {
    let out = hotstreak(&["analyze", "--shots", "1111", "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("untestable"));
}

#[test]
fn analyze_exact_matches_enumeration() {
    let out = hotstreak(&["analyze", "--shots", THOMPSON_DET, "--k", "2", "--exact", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let s: ShotString = THOMPSON_DET.parse().unwrap();
    let cfg = TestConfig::new(Depth::new(2).unwrap());
    let expected = p_value(Statistic::Tk.evaluate(&s, cfg.depth), &exact_null(&s, &cfg).unwrap()).unwrap();
    assert_eq!(v["total_draws"], 12_870);
    assert_eq!(v["exceed_count"], expected.exceed_count);
    assert_eq!(v["t"], "-1/15");
}

#[test]
fn analyze_bernoulli_nulls() {
    let out = hotstreak(&["analyze", "--shots", X60, "--null", "bern-game", "--resamples", "2000"]);
    assert!(out.status.success());
    let out = hotstreak(&["analyze", "--shots", X60, "--null", "bern-season", "--p", "0.51", "--resamples", "2000"]);
    assert!(out.status.success());
    let out = hotstreak(&["analyze", "--shots", X60, "--null", "bern-season"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_writes_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("histogram.json");
    let out = hotstreak(&["analyze", "--shots", X60, "--histogram", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc = read_json(&path);
    assert_valid("histogram", &doc);
    let hists = doc["histograms"].as_array().unwrap();
    assert_eq!(hists.len(), 3);
    assert_eq!(hists[2]["statistic"], "tk-miss");
    assert_eq!(hists[2]["modal_value_fraction"], "1");
    assert_eq!(hists[0]["edges"].as_array().unwrap().len(), 41);
    let mass: u64 = hists[0]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(mass + hists[0]["undefined_count"].as_u64().unwrap(), 10_000);
}

#[test]
fn usage_errors() {
    for args in [
        &["analyze", "--shots", "11x0"][..],
        &["analyze", "--shots", "1010", "--k", "0"],
        &["analyze", "--shots", "1010", "--alpha", "1.5"],
        &["analyze", "--shots", "1010", "--stat", "bogus"],
        &["analyze", "--shots", "1010", "--resamples", "0"],
        &["batch", "--input", "/nonexistent/shots.csv", "--output", "/tmp/x"],
        &[],
    ] {
        assert_eq!(hotstreak(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn batch_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = hotstreak(&[
        "batch", "--input", fixtures().to_str().unwrap(), "--output", dir.path().to_str().unwrap(),
        "--k", "1,2,3", "--resamples", "2000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("2 observations, 6 results"));

    let results = read_json(&dir.path().join("results.json"));
    assert_valid("results", &results);
    let rows = results["results"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let ts: Vec<_> = rows.iter().map(|r| r["t"].as_str().unwrap_or("-")).collect();
    assert!(ts.contains(&"-7/19"));
    assert!(ts.contains(&"-1/15"));

    let summary = read_json(&dir.path().join("summary.json"));
    assert_valid("summary", &summary);
    assert_eq!(summary["subjects"][0]["games"], 2);
    assert_eq!(summary["subjects"][0]["season_pct_fraction"], "13/20");

    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(csv.starts_with(",Thompson\nGames,2\nObservations,2\n"));
    assert!(dir.path().join("significance.csv").exists());

    let report = hotstreak(&["report", "--input", dir.path().join("results.json").to_str().unwrap(), "--format", "json"]);
    assert!(report.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_valid("pvalue_distribution", &doc);
    assert_eq!(doc["subjects"][0]["tested"], 2);
}

#[test]
fn batch_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "subject,date,opponent,scope,shots\nA,2016-10-01,X,game,1101\nA,2016-10-02,X,game,11x0\n").unwrap();
    let out_dir = dir.path().join("out");
    let args = ["batch", "--input", input.to_str().unwrap(), "--output", out_dir.to_str().unwrap(), "--resamples", "100"];
    let out = hotstreak(&args);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv") && err.contains("line 3") && err.contains("'x'"), "{err}");
    assert!(!out_dir.join("results.json").exists());

    let mut lenient = args.to_vec();
    lenient.push("--lenient");
    let out = hotstreak(&lenient);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped line 3"));
    assert_eq!(read_json(&out_dir.join("results.json"))["results"].as_array().unwrap().len(), 1);
}

#[test]
fn batch_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out_dir = dir.path().join(name);
        let out = hotstreak(&[
            "batch", "--input", fixtures().to_str().unwrap(), "--output", out_dir.to_str().unwrap(),
            "--k", "1,2", "--null", "perm,bern-game", "--resamples", "1000", "--seed", "7", "--threads", threads,
        ]);
        assert!(out.status.success());
        std::fs::read(out_dir.join("results.json")).unwrap()
    };
    assert_eq!(run("a", "1"), run("b", "4"));
}

#[test]
fn bias_table() {
    let out = hotstreak(&["bias", "--lengths", "2-3", "--k", "1"]);
    assert!(out.status.success());
    let table = stdout(&out);
    assert!(table.contains("3,2,1,tk,-0.500000,-1/2,2,3\n"));
    assert!(table.contains("2,1,1,tk,UNDEFINED,"));

    let out = hotstreak(&["bias", "--lengths", "16", "--hits", "8", "--k", "2"]);
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    let mean: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!(mean < 0.0, "{row}");

    let out = hotstreak(&["bias", "--lengths", "40", "--hits", "20"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("C(40, 20)"));
}

#[test]
fn bias_grid_is_nonpositive() {
    let out = hotstreak(&["bias", "--lengths", "5-12", "--k", "1"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let fields: Vec<_> = line.split(',').collect();
        let (len, hits): (usize, usize) = (fields[0].parse().unwrap(), fields[1].parse().unwrap());
        if let Ok(mean) = fields[4].parse::<f64>() {
            assert!(mean <= 0.0, "{line}");
            if (2..=len - 2).contains(&hits) {
                assert!(mean < 0.0, "{line}");
            }
        }
    }
}
