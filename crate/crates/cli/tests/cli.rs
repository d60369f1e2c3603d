use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_susywalk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("susywalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary_value(text: &str, key: &str) -> String {
    text.lines()
        .map(|l| l.trim_start_matches("# "))
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in summary"))
        .to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn evolve_table_shape_and_normalization() {
    let o = run(&["evolve", "--steps", "13"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = csv_rows(&text);
    let header = &rows[0];
    assert_eq!(header[..2], ["step", "site"]);
    let sites: usize = summary_value(&text, "lattice")
        .trim_matches('"')
        .trim_start_matches("segment[")
        .trim_end_matches(']')
        .split("..=")
        .map(|x| x.parse::<i64>().unwrap())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[1] - w[0] + 1) as usize)
        .next()
        .unwrap();
    assert_eq!(rows.len() - 1, 14 * sites);
    for step in 0..=13 {
        let total: f64 = rows[1..]
            .iter()
            .filter(|r| r[0] == step.to_string())
            .map(|r| r[2].parse::<f64>().unwrap() + r[3].parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
    // the interface pair holds most of the weight
    let pair: f64 = summary_value(&text, "interface_pair_mean").parse().unwrap();
    assert!(pair > 0.8, "{pair}");
    let bulk = stdout(&run(&["evolve", "--steps", "13", "--config", &write_config("bulk.toml", "configuration = \"bulk\"")]));
    let bulk_pair: f64 = summary_value(&bulk, "interface_pair_mean").parse().unwrap();
    assert!(bulk_pair < pair);
}

fn write_config(name: &str, body: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn bands_report_residual_and_closed_gap() {
    let o = run(&["bands", "--phi1", "1", "--phi2", "0.2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 513);
    for r in &rows[1..] {
        assert!(r[6].parse::<f64>().unwrap() < 1e-10);
    }
    let closed = stdout(&run(&["bands", "--phi1", "0.7", "--phi2", "0.7"]));
    let gap: f64 = summary_value(&closed, "gap_pm_i").parse().unwrap();
    assert!(gap.abs() < 1e-12);
}

#[test]
fn bands_refinement_keeps_shared_points() {
    let coarse = csv_rows(&stdout(&run(&["bands", "--resolution", "64"])));
    let fine = csv_rows(&stdout(&run(&["bands", "--resolution", "128"])));
    for (j, row) in coarse[1..].iter().enumerate() {
        let other = &fine[1 + 2 * j];
        for c in 1..5 {
            let a: f64 = row[c].parse().unwrap();
            let b: f64 = other[c].parse().unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn winding_report_and_transition_error() {
    let o = run(&["winding"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(summary_value(&text, "distinct"), "true");
    assert!(text.contains("windings = [[1, 0, 1]"));

    let near = run(&["winding", "--phi1", "0.7", "--phi2", "0.69999999"]);
    assert_eq!(near.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&near.stderr).contains("phase transition"));
    assert!(near.stdout.is_empty());
}

#[test]
fn midgap_report_and_polarization_table() {
    let out = scratch("midgap.csv");
    let o = run(&["midgap", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(summary_value(&text, "count"), "4");
    let table = std::fs::read_to_string(&out).unwrap();
    let rows = csv_rows(&table);
    assert_eq!(rows[0], ["state", "eigenvalue_re", "eigenvalue_im", "site", "probability", "s1", "s2", "s3"]);
    let mut checked = 0;
    for r in &rows[1..] {
        if r[7].is_empty() {
            continue;
        }
        let s3: f64 = r[7].parse().unwrap();
        assert!((s3.abs() - 1.0).abs() < 1e-3);
        checked += 1;
    }
    assert!(checked > 20);
    // alternation: neighbours within one state carry opposite circularity
    for w in rows[1..].windows(2) {
        if w[0][0] == w[1][0] && !w[0][7].is_empty() && !w[1][7].is_empty() {
            let a: f64 = w[0][7].parse().unwrap();
            let b: f64 = w[1][7].parse().unwrap();
            assert!(a * b < 0.0);
        }
    }

    let trivial = stdout(&run(&["midgap", "--phi1", "0.7", "--phi2", "0.7"]));
    assert_eq!(summary_value(&trivial, "count"), "0");
}

#[test]
fn scan_summary_and_empty_grid() {
    let o = run(&["scan"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let min: f64 = summary_value(&text, "interface_min").parse().unwrap();
    let iface: f64 = summary_value(&text, "interface_range").parse().unwrap();
    let bulk: f64 = summary_value(&text, "bulk_range").parse().unwrap();
    assert!(min <= 0.30);
    assert!(bulk < iface);
    assert_eq!(csv_rows(&text).len(), 181);

    let empty = run(&["scan", "--config", &write_config("empty.toml", "scan_points = 0")]);
    assert_eq!(empty.status.code(), Some(2));
    assert!(!empty.stderr.is_empty());
}

#[test]
fn tomo_reproduces_interface_state() {
    let o = run(&["tomo"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let amp_h: f64 = summary_value(&text, "amp_h").parse().unwrap();
    let amp_v: f64 = summary_value(&text, "amp_v").parse().unwrap();
    let phase: f64 = summary_value(&text, "phase_over_pi").parse().unwrap();
    assert!((amp_h - 0.72).abs() < 0.05 && (amp_v - 0.69).abs() < 0.05);
    assert!((phase - 0.5).abs() < 0.05);
    for r in &csv_rows(&text)[1..] {
        assert!(r[14].parse::<f64>().unwrap() > 1.0 - 1e-10);
    }
}

#[test]
fn seeded_noise_is_reproducible_and_seed_dependent() {
    let a = run(&["tomo", "--noise", "0.01", "--seed", "11"]);
    let b = run(&["tomo", "--noise", "0.01", "--seed", "11"]);
    let c = run(&["tomo", "--noise", "0.01", "--seed", "12"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let clean = run(&["tomo"]);
    assert_ne!(a.stdout, clean.stdout);
}

#[test]
fn reruns_are_byte_identical() {
    for cmd in [
        vec!["evolve"],
        vec!["bands", "--resolution", "256"],
        vec!["winding", "--resolution", "256"],
        vec!["midgap", "--lattice", "24"],
        vec!["scan"],
        vec!["tomo", "--frame", "lab"],
    ] {
        let first = scratch(&format!("{}-1.csv", cmd[0]));
        let second = scratch(&format!("{}-2.csv", cmd[0]));
        let mut outputs = Vec::new();
        for path in [&first, &second] {
            let mut args = cmd.clone();
            args.extend(["--out", path.to_str().unwrap()]);
            let o = run(&args);
            assert!(o.status.success(), "{cmd:?}");
            outputs.push(o.stdout);
        }
        assert_eq!(outputs[0], outputs[1], "{cmd:?} summary");
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap(), "{cmd:?}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let unknown = write_config("typo.toml", "phi_1 = 1.29\n");
    let o = run(&["bands", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("phi_1"));

    let odd = run(&["midgap", "--lattice", "41"]);
    assert_eq!(odd.status.code(), Some(2));

    let missing = run(&["bands", "--config", "/nonexistent/run.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_angle = run(&["bands", "--phi1", "one"]);
    assert_eq!(bad_angle.status.code(), Some(2));

    let coarse = run(&["winding", "--resolution", "64"]);
    assert_eq!(coarse.status.code(), Some(2));
}

#[test]
fn degree_suffix_matches_radians() {
    let rad = stdout(&run(&["bands", "--phi1", "1.0", "--resolution", "16"]));
    let deg = stdout(&run(&["bands", "--phi1", "57.29577951308232deg", "--resolution", "16"]));
    let a: f64 = summary_value(&rad, "gap_pm_i").parse().unwrap();
    let b: f64 = summary_value(&deg, "gap_pm_i").parse().unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn config_file_with_plates() {
    let cfg = write_config(
        "plates.toml",
        "steps = 5\nplates = [{ kind = \"quarter\", angle = 137 }, { kind = \"half\", angle = \"50deg\" }]\n",
    );
    let o = run(&["evolve", "--config", &cfg]);
    assert!(o.status.success());
    assert_eq!(summary_value(&stdout(&o), "steps"), "5");
}
