use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gpdiag::config::parse_config;
use gpdiag::recipes::{compute_recipe, RecipeId, RecipeOptions};
use gpdiag::sweep::{run_sweep, thread_pool};

fn gpdiag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpdiag")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gpdiag-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| if f.is_empty() { None } else { Some(f.parse().unwrap()) }).collect())
        .collect();
    (header, rows)
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(gpdiag(&["--help"]).status.code(), Some(0));
    assert_eq!(gpdiag(&["--version"]).status.code(), Some(0));
    assert_eq!(gpdiag(&["recipe", "fig9"]).status.code(), Some(1));
    assert_eq!(gpdiag(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gpdiag(&["steady", "--gamma2", "-1"]).status.code(), Some(1));
    assert_eq!(gpdiag(&["steady", "--scheme", "II", "--gamma3", "0.5"]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_one_with_line_number() {
    let dir = scratch("badconfig");
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "scheme = I\noutputs = purity\nwavelength = 780\n").unwrap();
    let out = gpdiag(&["sweep", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn path_without_steady_state_exits_two() {
    let dir = scratch("degenerate");
    let cfg = dir.join("deg.cfg");
    fs::write(
        &cfg,
        "scheme = II\nomega1 = 0\nomega2 = 0\noutputs = purity\n[axis1]\nparam = delta1\nstart = -1\nend = 1\nsamples = 5\n",
    )
    .unwrap();
    let out = gpdiag(&["sweep", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = gpdiag(&["steady", "--scheme", "II", "--omega1", "0", "--omega2", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn steady_prints_state_summary() {
    let out = gpdiag(&["steady", "--scheme", "II", "--omega1", "6", "--omega2", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("density matrix"));
    assert!(text.contains("eigenvalues: 1 "));
    assert!(text.contains("purity: 1\n"));
    assert!(text.contains("concurrence: 1\n"));
}

#[test]
fn recipe_into_empty_directory() {
    let dir = scratch("fig5").join("nested");
    let out = gpdiag(&["recipe", "fig5", "--samples", "41", "--jobs", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig5: wrote 5 files"));
    for panel in ["ab", "cd", "ef", "gh", "ij"] {
        let (header, rows) = read_csv(&dir.join(format!("fig5_{panel}.csv")));
        assert_eq!(header, ["delta1", "gamma_g", "dgamma"]);
        assert_eq!(rows.len(), 41);
        assert_eq!(rows[0][1], Some(0.0));
    }
    assert!(dir.join("fig5.meta").exists());
}

#[test]
fn recipe_runs_are_byte_identical() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let out = gpdiag(&["recipe", "fig3b", "--samples", "15", "--jobs", jobs, "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(a.join("fig3b.csv")).unwrap(), fs::read(b.join("fig3b.csv")).unwrap());
}

#[test]
fn fig2_ideal_resonance_is_pure() {
    let pool = thread_pool(Some(1)).unwrap();
    let run = compute_recipe(RecipeId::Fig2, &RecipeOptions::default(), &pool).unwrap();
    let panel = run.panels.iter().find(|p| p.file == "fig2_ab_scheme_II.csv").unwrap();
    let row = panel.table.rows.iter().find(|r| r[0] == Some(0.0)).unwrap();
    assert!((row[1].unwrap() - 1.0).abs() <= 1e-8);
    assert_eq!(panel.table.rows.len(), 601);
}

#[test]
fn sweep_matches_fig5_panel() {
    let dir = scratch("equiv");
    let text = format!(
        "scheme = I\nomega1 = 6\nomega2 = 6\ndelta2 = 0\noutputs = gamma_g\noutput = {}\n\
         [axis1]\nparam = delta1\nstart = -3\nend = 3\nsamples = 601\n",
        dir.join("sweep.csv").display()
    );
    let spec = parse_config(&text).unwrap();
    let pool = thread_pool(Some(2)).unwrap();
    let summary = run_sweep(&spec, &pool).unwrap();
    assert_eq!(summary.rows, 601);
    let (header, rows) = read_csv(&spec.output);
    assert_eq!(header, ["delta1", "gamma_g"]);
    let run = compute_recipe(RecipeId::Fig5, &RecipeOptions::default(), &pool).unwrap();
    let panel = &run.panels.iter().find(|p| p.file == "fig5_ab.csv").unwrap().table;
    for (a, b) in rows.iter().zip(&panel.rows) {
        assert!((a[1].unwrap() - b[1].unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn recipe_scalars_stay_in_range() {
    let pool = thread_pool(None).unwrap();
    let opts = RecipeOptions {
        samples: 21,
        ..RecipeOptions::default()
    };
    for id in [RecipeId::Fig2, RecipeId::Fig3a, RecipeId::Fig3b] {
        for panel in compute_recipe(id, &opts, &pool).unwrap().panels {
            let cols: Vec<usize> = panel
                .table
                .header
                .iter()
                .enumerate()
                .filter(|(_, h)| h.starts_with("lambda") || *h == "concurrence" || *h == "purity")
                .map(|(i, _)| i)
                .collect();
            for row in &panel.table.rows {
                for &c in &cols {
                    let v = row[c].unwrap();
                    assert!((-1e-10..=1.0 + 1e-10).contains(&v), "{} {v}", panel.file);
                }
            }
        }
    }
}
