use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn molcode(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_molcode"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn molcode");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &[u8]) -> String {
    let out = molcode(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{}-{name}", std::process::id()))
}

#[test]
fn worked_example_encodings() {
    for (scheme, want) in [("ac", "011"), ("sac", "01010"), ("moac", "01000")] {
        assert_eq!(ok(&["-a", "xyz", "encode", "-s", scheme], b"YZ\n").trim(), want);
        assert_eq!(ok(&["-a", "xyz", "decode", "-s", scheme], want.as_bytes()).trim(), "Y");
    }
}

#[test]
fn text_and_binary_round_trips() {
    let word = b"ATTACGCATTAGACCA";
    for scheme in ["huffman", "mopc", "ac", "sac", "moac", "moapc"] {
        let bits = ok(&["encode", "-s", scheme], word);
        let back = ok(&["decode", "-s", scheme, "--length", "16"], bits.as_bytes());
        assert_eq!(back.trim().as_bytes(), word, "{scheme}");
    }
    let file = scratch("word.bin");
    let path = file.to_str().unwrap();
    let out = molcode(&["-a", "alphabet2", "encode", "-s", "moapc", "--binary", "-o", path], b"GATTACA");
    assert!(out.status.success());
    let n: String = String::from_utf8(out.stderr).unwrap().split_whitespace().next().unwrap().into();
    let back = ok(&["-a", "alphabet2", "decode", "-s", "moapc", "--binary", &n, "-i", path], b"");
    assert_eq!(back.trim(), "GATTACA");
}

#[test]
fn length_hint_rules() {
    let out = molcode(&["decode", "-s", "ac"], b"0110");
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--length"));
    assert!(!molcode(&["encode", "-s", "nonsense"], b"A").status.success());
    assert_eq!(ok(&["decode", "-s", "huffman"], b"0101100").trim(), "ATCA");
}

#[test]
fn codebook_and_stats_tables() {
    let csv = ok(&["codebook", "--schemes", "mohuffman"], b"");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "scheme,symbol,probability,code,length,ones");
    assert_eq!(lines[1], "mohuffman,A,0.5,0,1,0");
    assert_eq!(lines.len(), 5);
    let text = ok(&["codebook", "--schemes", "mopc", "--text", "-a", "alphabet2"], b"");
    assert_eq!(text.lines().count(), 5);

    let stats = ok(&["stats", "--schemes", "uncoded,mopc", "-a", "alphabet2"], b"");
    assert_eq!(stats, "scheme,expected_bits,expected_ones\nuncoded,63.000000,16.736842\nmopc,68.842105,16.736842\n");

    let norm = ok(&["normalize", "--schemes", "isi,huffman", "--set", "samples=1000"], b"");
    let rows: Vec<Vec<&str>> = norm.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!((rows[0][3], rows[1][3]), ("100", "229"));
}

#[test]
fn seeded_commands_are_reproducible() {
    let sim = |seed: &str| ok(&["simulate", "--bits", "1010010", "--seed", seed, "--set", "molecules=50"], b"");
    assert_eq!(sim("4"), sim("4"));
    assert_ne!(sim("4"), sim("5"));
    assert_eq!(sim("4").lines().count(), 8);

    let curve = |seed: &str| {
        ok(&["curve", "--analysis", "ratio", "--schemes", "sac,moac", "--lens", "20,40", "--samples", "20", "--seed", seed], b"")
    };
    assert_eq!(curve("1"), curve("1"));
    assert!(curve("1").starts_with("word_len,"));
}

#[test]
fn calibrate_then_evaluate() {
    let config = scratch("sweep.conf");
    std::fs::write(&config, "words = 8\npilots = 4\ngrid = 200\nsamples = 500\n").unwrap();
    let table = scratch("cal.txt");
    let (config, table) = (config.to_str().unwrap(), table.to_str().unwrap());
    let cal = ok(&["calibrate", "-c", config, "--schemes", "mopc", "--table", table], b"");
    assert!(cal.starts_with("scheme,molecules,signal_interval"));
    assert_eq!(cal.lines().count(), 2);
    let saved = ok(&["evaluate", "-c", config, "--schemes", "mopc", "--calibration", table], b"");
    let fresh = ok(&["evaluate", "-c", config, "--schemes", "mopc"], b"");
    let tail = |s: &str| s.lines().nth(1).unwrap().rsplit(',').take(3).map(String::from).collect::<Vec<_>>();
    // the saved settings are the ones a fresh run derives
    assert_eq!(tail(&saved), tail(&fresh));
    assert!(saved.lines().nth(1).unwrap().contains("NaN"));
}
