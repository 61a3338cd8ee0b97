use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use llr_lab::csv::{format_number, parse_number};
use llr_lab::llrdist::{marginal_density, score_grid};
use llr_lab::{reference_problem, Class};
use tempfile::TempDir;

fn llr_lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llr-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("LLR_LAB_SEED")
        .env("LLR_LAB_LOG", "off")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Parses a CSV body, checking that every numeric field re-renders to the
/// same text.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|f| {
                    let v = parse_number(f).unwrap_or_else(|| panic!("field `{f}`"));
                    if !f.chars().all(|c| c.is_ascii_digit()) {
                        assert_eq!(format_number(v), f);
                    }
                    v
                })
                .collect()
        })
        .collect();
    (header, rows)
}

fn trapezoid(rows: &[Vec<f64>]) -> f64 {
    rows.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[1][1] + w[0][1])).sum()
}

#[test]
fn density_outputs_are_normalized_and_exact() {
    let tmp = TempDir::new().unwrap();
    let out = llr_lab(&["density", "--seed", "3", "--out", "d"], tmp.path());
    ok(&out);
    let dir = tmp.path().join("d");
    let p = reference_problem();
    let h = score_grid(&p, 2001, 40.0).unwrap();
    for (name, class) in [("density_class1.csv", Class::One), ("density_class2.csv", Class::Two)] {
        let (header, rows) = parse_csv(&read(&dir, name));
        assert_eq!(header, ["h", "density", "est_error", "class"]);
        assert_eq!(rows.len(), 2001);
        assert!((trapezoid(&rows) - 1.0).abs() < 1e-3, "{name}");
        // the file carries the library's numbers bit for bit
        let g = marginal_density(&h, class, &p).unwrap();
        for (r, (x, d)) in rows.iter().zip(h.iter().zip(&g.density)) {
            assert_eq!((r[0], r[1]), (*x, *d));
            assert_eq!(r[3], class.index() as f64);
        }
    }
    let svg = read(&dir, "density_overlay.svg");
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 4);
}

#[test]
fn learning_curve_defaults_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    ok(&llr_lab(&["learning-curve", "--seed", "9", "--out", "a"], tmp.path()));
    ok(&llr_lab(&["learning-curve", "--seed", "9", "--out", "b"], tmp.path()));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for f in ["learning_curve.csv", "learning_curve.svg"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    let csv = read(&a, "learning_curve.csv");
    let (header, rows) = parse_csv(&csv);
    assert_eq!(
        header,
        ["p", "n", "mean_auc_true", "mean_auc_apparent", "var_auc_true", "var_auc_apparent", "n_trials"]
    );
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r[6] == 100.0));

    let svg = read(&a, "learning_curve.svg");
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
    let texts: Vec<String> = doc
        .descendants()
        .filter(|n| n.has_tag_name("text"))
        .filter_map(|n| n.text().map(String::from))
        .collect();
    assert!(lines >= 6);
    for p in [3, 7, 11] {
        for kind in ["true", "apparent"] {
            assert!(
                texts.iter().any(|t| t.contains(&format!("p = {p}")) && t.contains(kind)),
                "no legend entry for p = {p} ({kind}) in {texts:?}"
            );
        }
    }
}

#[test]
fn seed_sources_and_overrides() {
    let tmp = TempDir::new().unwrap();
    let run = |args: &[&str], env_seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_llr-lab"));
        cmd.args(args).current_dir(tmp.path()).env_remove("LLR_LAB_SEED");
        if let Some(s) = env_seed {
            cmd.env("LLR_LAB_SEED", s);
        }
        let out = cmd.output().unwrap();
        ok(&out);
    };
    run(&["simulate", "--seed", "5", "--samples_per_class", "200", "--out", "flag"], None);
    run(&["simulate", "--samples_per_class", "200", "--out", "env"], Some("5"));
    run(&["simulate", "--seed", "5", "--samples_per_class", "200", "--out", "both"], Some("6"));
    run(&["simulate", "--samples_per_class", "200", "--out", "other"], Some("6"));
    let get = |d: &str| read(&tmp.path().join(d), "scores.csv");
    assert_eq!(get("flag"), get("env"));
    assert_eq!(get("flag"), get("both"));
    assert_ne!(get("flag"), get("other"));
    let (header, rows) = parse_csv(&get("flag"));
    assert_eq!(header, ["label", "score"]);
    assert_eq!(rows.len(), 400);
    assert_eq!(rows.iter().filter(|r| r[0] == 1.0).count(), 200);
}

#[test]
fn config_file_and_no_svg() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("run.cfg"),
        "# small curve\nseed = 4\n\n[experiment]\ndims = 2\ntrain_sizes = 10, 40\nn_trials = 5\ntest_size = 100\n",
    )
    .unwrap();
    ok(&llr_lab(&["learning-curve", "--config", "run.cfg", "--no-svg", "--out", "o"], tmp.path()));
    let dir = tmp.path().join("o");
    assert!(!dir.join("learning_curve.svg").exists());
    let (_, rows) = parse_csv(&read(&dir, "learning_curve.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][1], rows[1][1], rows[0][6]), (2.0, 10.0, 40.0, 5.0));
}

#[test]
fn roc_and_deviate_commands() {
    let tmp = TempDir::new().unwrap();
    ok(&llr_lab(&["roc", "--samples_per_class", "500", "--out", "r"], tmp.path()));
    let (header, rows) = {
        // thresholds at the anchors are infinite
        let text = read(&tmp.path().join("r"), "roc.csv");
        let mut lines = text.lines();
        let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|f| parse_number(f).unwrap()).collect())
            .collect();
        (header, rows)
    };
    assert_eq!(header, ["fpf", "tpf", "threshold"]);
    assert_eq!((rows[0][0], rows[0][1]), (0.0, 0.0));
    assert_eq!((rows.last().unwrap()[0], rows.last().unwrap()[1]), (1.0, 1.0));
    assert!(read(&tmp.path().join("r"), "roc.svg").contains("<polyline"));

    // equal covariances: the binormal model is exact and the slope is one
    fs::write(
        tmp.path().join("eq.cfg"),
        "[problem]\nmu1 = 1, 0.5\nsigma1 = [[1, .3], [.3, .8]]\nmu2 = 0, 0\nsigma2 = [[1, .3], [.3, .8]]\n",
    )
    .unwrap();
    ok(&llr_lab(
        &["normal-deviate", "--config", "eq.cfg", "--samples_per_class", "20000", "--out", "n"],
        tmp.path(),
    ));
    let dir = tmp.path().join("n");
    let (header, rows) = parse_csv(&read(&dir, "deviate_fit.csv"));
    assert_eq!(header, ["a", "b", "residual", "n_points"]);
    assert!((rows[0][1] - 1.0).abs() < 0.05, "b = {}", rows[0][1]);
    let (header, pts) = parse_csv(&read(&dir, "deviate_points.csv"));
    assert_eq!(header, ["z_fpf", "z_tpf"]);
    assert_eq!(pts.len() as f64, rows[0][3]);
    assert!(read(&dir, "normal_deviate.svg").contains("<polyline"));
}

#[test]
fn variance_study_command() {
    let tmp = TempDir::new().unwrap();
    ok(&llr_lab(&["variance-study", "--n_trials", "20", "--out", "v"], tmp.path()));
    let dir = tmp.path().join("v");
    let (_, rows) = parse_csv(&read(&dir, "variance_study.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[0] == 11.0 && r[4] >= 0.0));
    roxmltree::Document::parse(&read(&dir, "variance_study.svg")).unwrap();
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let code = |args: &[&str]| llr_lab(args, tmp.path()).status.code();
    assert_eq!(code(&["transmogrify"]), Some(2));
    assert_eq!(code(&[]), Some(2));
    assert_eq!(code(&["density", "--seed", "minus-one"]), Some(2));
    assert_eq!(code(&["density", "--config", "missing.cfg"]), Some(2));

    fs::write(tmp.path().join("bad.cfg"), "seed = 1\n[problem]\nsigma1 = [[1, 2], [2, 1]]\n").unwrap();
    let out = llr_lab(&["density", "--config", "bad.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("positive definite"), "{err}");

    fs::write(tmp.path().join("typo.cfg"), "seeed = 1\n").unwrap();
    let out = llr_lab(&["density", "--config", "typo.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert!(!tmp.path().join("llr-lab-out").exists());
}

#[test]
fn numerical_errors_exit_3() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("p3.cfg"),
        "[problem]\nmu1 = 1, 1, 1\nsigma1 = [[1,0,0],[0,1,0],[0,0,1]]\nmu2 = 0, 0, 0\nsigma2 = [[2,0,0],[0,1,0],[0,0,1]]\n",
    )
    .unwrap();
    let out = llr_lab(&["density", "--config", "p3.cfg", "--out", "x"], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stderr.is_empty());
    assert!(!tmp.path().join("x").join("density_class1.csv").exists());
}

#[test]
fn io_errors_exit_4_and_leave_nothing_behind() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("plain-file"), "not a directory").unwrap();
    let out = llr_lab(&["simulate", "--samples_per_class", "10", "--out", "plain-file"], tmp.path());
    assert_eq!(out.status.code(), Some(4));

    // the second output cannot be written: the first must be removed again
    let dir = tmp.path().join("partial");
    fs::create_dir_all(dir.join("density_class2.csv")).unwrap();
    let out = llr_lab(&["density", "--grid_points", "201", "--out", "partial"], tmp.path());
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.join("density_class1.csv").exists());
    assert!(!dir.join("density_overlay.svg").exists());
}
