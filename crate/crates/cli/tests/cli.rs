use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

const K_ROW: usize = 23;
const N_ROW: usize = 25;
const INFO_BLOCK: usize = 178 * K_ROW;
const CODE_BLOCK: usize = 195 * N_ROW;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebch-tpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn info_file(blocks: usize) -> Vec<u8> {
    // pseudo-random payload with the row padding bits cleared
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut data = vec![0u8; blocks * INFO_BLOCK];
    for (i, b) in data.iter_mut().enumerate() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        *b = state as u8;
        if i % K_ROW == K_ROW - 1 {
            *b &= 0xc0;
        }
    }
    data
}

fn flip(code: &mut [u8], block: usize, row: usize, col: usize) {
    code[block * CODE_BLOCK + row * N_ROW + col / 8] ^= 0x80 >> (col % 8);
}

#[test]
fn zero_block_encodes_to_zero_block() {
    let dir = tempdir().unwrap();
    let (info, code) = (dir.path().join("info"), dir.path().join("code"));
    std::fs::write(&info, vec![0u8; INFO_BLOCK]).unwrap();
    ok(&["encode", "--input", p(&info), "--output", p(&code)]);
    assert_eq!(std::fs::read(&code).unwrap(), vec![0u8; CODE_BLOCK]);
}

#[test]
fn encode_decode_round_trip_with_light_noise() {
    let dir = tempdir().unwrap();
    let info = dir.path().join("info");
    let code = dir.path().join("code");
    let back = dir.path().join("back");
    let report = dir.path().join("report.json");
    let payload = info_file(3);
    std::fs::write(&info, &payload).unwrap();
    ok(&["encode", "--input", p(&info), "--output", p(&code)]);

    let mut cw = std::fs::read(&code).unwrap();
    assert_eq!(cw.len(), 3 * CODE_BLOCK);
    flip(&mut cw, 1, 5, 7);
    flip(&mut cw, 1, 5, 190);
    flip(&mut cw, 2, 100, 100);
    std::fs::write(&code, &cw).unwrap();

    ok(&[
        "decode",
        "--input",
        p(&code),
        "--output",
        p(&back),
        "--report",
        p(&report),
    ]);
    assert_eq!(std::fs::read(&back).unwrap(), payload);
    let rep: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let frames = rep.as_array().unwrap();
    assert_eq!(frames.len(), 3);
    for f in frames {
        assert_eq!(f["success"], true);
        assert_eq!(f["pp_applied"], false);
        assert_eq!(f["half_iterations"], 4);
    }
}

#[test]
fn stall_needs_post_processing() {
    let dir = tempdir().unwrap();
    let info = dir.path().join("info");
    let code = dir.path().join("code");
    let back = dir.path().join("back");
    let payload = info_file(1);
    std::fs::write(&info, &payload).unwrap();
    ok(&["encode", "--input", p(&info), "--output", p(&code)]);
    let mut cw = std::fs::read(&code).unwrap();
    for r in [3, 77, 150] {
        for c in [20, 21, 194] {
            flip(&mut cw, 0, r, c);
        }
    }
    std::fs::write(&code, &cw).unwrap();

    let decode = |extra: &[&str]| {
        let mut args = vec!["decode", "--input", p(&code), "--output", p(&back)];
        args.extend_from_slice(extra);
        let out = ok(&args);
        let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
        rep[0].clone()
    };
    let bare = decode(&["--no-pp"]);
    assert_eq!(bare["success"], false);
    assert_ne!(std::fs::read(&back).unwrap(), payload);

    for schedule in ["reference", "hardware"] {
        let rep = decode(&["--pp", "--schedule", schedule]);
        assert_eq!(rep["success"], true);
        assert_eq!(rep["pp_applied"], true);
        assert_eq!(std::fs::read(&back).unwrap(), payload);
    }
}

#[test]
fn malformed_sizes_are_rejected() {
    let dir = tempdir().unwrap();
    let (input, output) = (dir.path().join("in"), dir.path().join("out"));
    std::fs::write(&input, vec![0u8; INFO_BLOCK - 1]).unwrap();
    let out = run(&["encode", "--input", p(&input), "--output", p(&output)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("4094"));

    std::fs::write(&input, vec![0u8; CODE_BLOCK + 1]).unwrap();
    assert!(
        !run(&["decode", "--input", p(&input), "--output", p(&output)])
            .status
            .success()
    );
    assert!(!run(&[
        "encode",
        "--input",
        p(&input),
        "--output",
        p(&output),
        "--code-shorten",
        "62"
    ])
    .status
    .success());
}

#[test]
fn sim_is_byte_identical_across_runs_and_workers() {
    let dir = tempdir().unwrap();
    let mut csvs = Vec::new();
    for (i, workers) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        ok(&[
            "sim",
            "--p",
            "0.011,0.009,0",
            "--seed",
            "42",
            "--min-frames",
            "40",
            "--max-frames",
            "200",
            "--min-frame-errors",
            "5",
            "--workers",
            workers,
            "--output",
            p(&out),
        ]);
        csvs.push(std::fs::read(&out).unwrap());
        let manifest: Value = serde_json::from_slice(
            &std::fs::read(dir.path().join(format!("run{i}.csv.manifest.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["master_seed"], 42);
        assert_eq!(manifest["command"], "sim");
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);

    let text = String::from_utf8(csvs.remove(0)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "p_nominal,measured_p,frames,pre_fec_bit_errors,post_fec_bit_errors,frame_errors,ber,fer,pp_rate"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("0.00000e0,0.00000e0,200,0,0,0,0.00000e0,"));
}

#[test]
fn sim_rejects_bad_sweeps() {
    assert!(!run(&["sim", "--p", "0.7"]).status.success());
    assert!(!run(&["sim"]).status.success());
    assert!(!run(&["sim", "--noise-std", "0.2"]).status.success());
    assert!(!run(&["sim", "--channel", "pam4", "--noise-std", "-1"])
        .status
        .success());
    assert!(!run(&["sim", "--p", "0.01", "--iterations", "0"])
        .status
        .success());
}

#[test]
fn analyze_reports() {
    let json = |args: &[&str]| -> Value { serde_json::from_slice(&ok(args).stdout).unwrap() };

    let ncg = json(&["analyze", "ncg", "4e-3", "1e-15"]);
    assert!((ncg["ncg_db"].as_f64().unwrap() - 9.526).abs() < 0.02);

    let lat = json(&["analyze", "latency"]);
    assert_eq!(lat["cycles"], 193);
    assert_eq!(lat["bits_per_cycle"], 164);
    let gbps = lat["throughput_gbps"].as_f64().unwrap();
    assert!((99.9..100.1).contains(&gbps), "{gbps}");

    let floor = json(&["analyze", "floor", "4e-3"]);
    assert_eq!(floor["pattern_weight"], 12);
    let ber = floor["ber_floor"].as_f64().unwrap();
    assert!(ber > 1e-16 && ber < 1e-14);
    assert_eq!(
        json(&["analyze", "floor", "4e-3", "--no-pp"])["pattern_weight"],
        9
    );

    assert!(!run(&["analyze", "ncg", "0.7", "1e-15"]).status.success());
    assert!(!run(&["analyze", "floor", "0"]).status.success());
    assert!(!run(&["analyze", "latency", "--clock-mhz", "0"])
        .status
        .success());
}
