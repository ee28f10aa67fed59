use std::path::Path;
use std::process::{Command, Output};

fn mebc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mebc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should launch")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn round_trip_through_the_binary_respects_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_exit(&mebc(d, &["gen", "-o", "f.raw", "-t", "f64", "-d", "20,17,9", "-k", "SINES", "-s", "11"]), 0);
    assert_exit(
        &mebc(d, &["compress", "-i", "f.raw", "-o", "f.mebc", "-t", "f64", "-d", "20,17,9", "-M", "abs", "-e", "1e-4", "-p", "lr"]),
        0,
    );
    assert_exit(&mebc(d, &["decompress", "-i", "f.mebc", "-o", "g.raw"]), 0);
    assert_exit(&mebc(d, &["eval", "-a", "f.raw", "-b", "g.raw", "-t", "f64", "-d", "20,17,9", "-e", "1e-4"]), 0);

    let raw = std::fs::metadata(d.join("f.raw")).unwrap().len();
    let packed = std::fs::metadata(d.join("f.mebc")).unwrap().len();
    assert!(packed < raw, "compressed {} should undercut raw {}", packed, raw);
}

#[test]
fn config_mistakes_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = mebc(d, &["compress", "-i", "missing.raw", "-o", "x", "-t", "f32", "-d", "4,4", "-e", "0.1"]);
    assert_exit(&out, 2);

    assert_exit(&mebc(d, &["gen", "-o", "f.raw", "-t", "f32", "-d", "4,4", "-k", "NOISE", "-s", "1"]), 0);
    // A bound of zero passes argument parsing but fails configuration checks.
    assert_exit(&mebc(d, &["compress", "-i", "f.raw", "-o", "x", "-t", "f32", "-d", "4,4", "-e", "0"]), 2);
    // Shape says 4x4 f64 = 128 bytes, file holds 64.
    assert_exit(&mebc(d, &["compress", "-i", "f.raw", "-o", "x", "-t", "f64", "-d", "4,4", "-e", "0.1"]), 2);
    // Unknown pipeline name is a usage error.
    assert_exit(&mebc(d, &["compress", "-i", "f.raw", "-o", "x", "-t", "f32", "-d", "4,4", "-e", "0.1", "-p", "wavelet"]), 2);
    // Unknown synthetic field kind.
    assert_exit(&mebc(d, &["gen", "-o", "g.raw", "-t", "f32", "-d", "4,4", "-k", "PLASMA", "-s", "1"]), 2);
}

#[test]
fn damaged_streams_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_exit(&mebc(d, &["gen", "-o", "f.raw", "-t", "f32", "-d", "16,16", "-k", "AFFINE", "-s", "2"]), 0);
    assert_exit(&mebc(d, &["compress", "-i", "f.raw", "-o", "f.mebc", "-t", "f32", "-d", "16,16", "-e", "1e-3"]), 0);

    let stream = std::fs::read(d.join("f.mebc")).unwrap();
    std::fs::write(d.join("cut.mebc"), &stream[..stream.len() / 2]).unwrap();
    assert_exit(&mebc(d, &["decompress", "-i", "cut.mebc", "-o", "x.raw"]), 3);

    let mut flipped = stream.clone();
    flipped[0] ^= 0xFF;
    std::fs::write(d.join("flip.mebc"), &flipped).unwrap();
    assert_exit(&mebc(d, &["decompress", "-i", "flip.mebc", "-o", "x.raw"]), 3);
}

#[test]
fn bound_violations_exit_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_exit(&mebc(d, &["gen", "-o", "f.raw", "-t", "f32", "-d", "12,12", "-k", "NOISE", "-s", "5"]), 0);
    assert_exit(&mebc(d, &["compress", "-i", "f.raw", "-o", "f.mebc", "-t", "f32", "-d", "12,12", "-e", "1e-2"]), 0);
    assert_exit(&mebc(d, &["decompress", "-i", "f.mebc", "-o", "g.raw"]), 0);
    // The reconstruction honors 1e-2, so demanding 1e-8 must fail loudly.
    assert_exit(&mebc(d, &["eval", "-a", "f.raw", "-b", "g.raw", "-t", "f32", "-d", "12,12", "-e", "1e-8"]), 4);
}

#[test]
fn rd_writes_the_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_exit(&mebc(d, &["gen", "-o", "f.raw", "-t", "f32", "-d", "24,24,24", "-k", "SINES", "-s", "9"]), 0);
    let out = mebc(
        d,
        &["rd", "-i", "f.raw", "-t", "f32", "-d", "24,24,24", "-p", "interp", "--eb-list", "1e-2,1e-3,1e-4", "--csv", "curve.csv"],
    );
    assert_exit(&out, 0);

    let csv = std::fs::read_to_string(d.join("curve.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4, "header plus one row per bound:\n{csv}");
    assert_eq!(lines[0], "eb,compressed_bytes,ratio,bit_rate,psnr,max_abs_err,c_MBps,d_MBps");
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 8, "row {row:?}");
    }
    // Each row honors its own bound, and tighter bounds buy fidelity.
    let mut psnrs = Vec::new();
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        let eb: f64 = cells[0].parse().unwrap();
        let max_err: f64 = cells[5].parse().unwrap();
        assert!(max_err <= eb, "row {row:?}");
        psnrs.push(cells[4].parse::<f64>().unwrap());
    }
    assert!(psnrs[0] < psnrs[1] && psnrs[1] < psnrs[2], "psnr {psnrs:?}");
}

#[test]
fn truncation_pipeline_round_trips_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_exit(&mebc(d, &["gen", "-o", "f.raw", "-t", "f64", "-d", "300", "-k", "SINES", "-s", "4"]), 0);
    assert_exit(&mebc(d, &["compress", "-i", "f.raw", "-o", "f.mebc", "-t", "f64", "-d", "300", "-e", "1", "-p", "trunc:8"]), 0);
    assert_exit(&mebc(d, &["decompress", "-i", "f.mebc", "-o", "g.raw"]), 0);
    // Keeping all 8 bytes reproduces the input bit for bit.
    let a = std::fs::read(d.join("f.raw")).unwrap();
    let b = std::fs::read(d.join("g.raw")).unwrap();
    assert_eq!(a, b);
}
