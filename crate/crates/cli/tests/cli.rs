use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use pennant_testkit::{corpus6, to_jsonl};
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pennant"));
    cmd.env_remove("PENNANT_K")
        .env_remove("PENNANT_MIN_TF")
        .env_remove("PENNANT_LOG_BASE");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("c6.jsonl"), to_jsonl(&corpus6())).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn index(&self) -> String {
        let out = self.s("c6.idx");
        if !Path::new(&out).exists() {
            let o = run(&["build-index", "--corpus", &self.s("c6.jsonl"), "--mode", "citation", "--out", &out]);
            assert!(o.status.success());
        }
        out
    }
}

#[test]
fn ingest_reports() {
    let f = Fixture::new();
    let o = run(&["ingest", "--corpus", &f.s("c6.jsonl")]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["records_accepted"], 6);
    assert_eq!(report["records_rejected"], 0);

    let o = run(&["ingest", "--corpus", &f.s("c6.jsonl"), "--report", &f.s("r.json")]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(f.path("r.json")).unwrap()).unwrap();
    assert_eq!(report["records_accepted"], 6);
}

#[test]
fn ingest_with_rejects_still_succeeds() {
    let f = Fixture::new();
    std::fs::write(f.path("bad.jsonl"), "{\"id\":\"a\"}\nnot json\n{\"id\":\"b\"}\n").unwrap();
    let o = run(&["ingest", "--corpus", &f.s("bad.jsonl")]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["records_rejected"], 1);
    assert_eq!(report["rejects"][0], serde_json::json!({"line": 2, "reason": "parse error"}));
}

#[test]
fn ingest_exit_codes() {
    let f = Fixture::new();
    std::fs::write(f.path("empty.jsonl"), "").unwrap();
    assert_eq!(run(&["ingest", "--corpus", &f.s("empty.jsonl")]).status.code(), Some(2));
    assert_eq!(run(&["ingest", "--corpus", &f.s("missing.jsonl")]).status.code(), Some(1));
}

#[test]
fn build_index_prints_counts_and_is_deterministic() {
    let f = Fixture::new();
    let a = run(&["build-index", "--corpus", &f.s("c6.jsonl"), "--mode", "citation", "--out", &f.s("a.idx")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&a.stdout), "n_docs=6 n_keys=4\n");
    let b = run(&["build-index", "--corpus", &f.s("c6.jsonl"), "--mode", "citation", "--out", &f.s("b.idx")]);
    assert!(b.status.success());
    assert_eq!(std::fs::read(f.path("a.idx")).unwrap(), std::fs::read(f.path("b.idx")).unwrap());
}

#[test]
fn build_index_degenerate_and_fatal() {
    let f = Fixture::new();
    let o = run(&["build-index", "--corpus", &f.s("c6.jsonl"), "--mode", "descriptor", "--out", &f.s("d.idx")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "n_docs=6 n_keys=0\n");
    let o = run(&["build-index", "--corpus", &f.s("c6.jsonl"), "--mode", "citation", "--out", &f.s("no/such/dir/x.idx")]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(f.path("empty.jsonl"), "\n\n").unwrap();
    let o = run(&["build-index", "--corpus", &f.s("empty.jsonl"), "--mode", "citation", "--out", &f.s("e.idx")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pennant_json_matches_fixture() {
    let f = Fixture::new();
    let o = run(&["pennant", "--index", &f.index(), "--seed", "S", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let got: Vec<_> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["id"].as_str().unwrap().to_string(), p["tf"].as_u64().unwrap(), p["df"].as_u64().unwrap()))
        .collect();
    assert_eq!(
        got,
        [("A".to_string(), 2, 3), ("B".to_string(), 2, 3), ("C".to_string(), 1, 2)]
    );
}

#[test]
fn pennant_unknown_seed_exit_3() {
    let f = Fixture::new();
    let o = run(&["pennant", "--index", &f.index(), "--seed", "NOPE"]);
    assert_eq!(o.status.code(), Some(3));
    let first = String::from_utf8_lossy(&o.stderr).lines().next().unwrap().to_string();
    let err: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(err["error"], "seed not found");
}

#[test]
fn pennant_corrupt_index_exit_1() {
    let f = Fixture::new();
    let mut bytes = std::fs::read(f.index()).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(f.path("bad.idx"), bytes).unwrap();
    assert_eq!(run(&["pennant", "--index", &f.s("bad.idx"), "--seed", "S"]).status.code(), Some(1));
    assert_eq!(run(&["pennant", "--index", &f.s("absent.idx"), "--seed", "S"]).status.code(), Some(1));
}

#[test]
fn pennant_svg_output() {
    let f = Fixture::new();
    let o = run(&["pennant", "--index", &f.index(), "--seed", "S", "--format", "svg", "--out", &f.s("p.svg")]);
    assert!(o.status.success());
    let svg = std::fs::read_to_string(f.path("p.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 3);
    let o = run(&["pennant", "--index", &f.index(), "--seed", "S", "--format", "svg", "--labels", "none"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).matches("class=\"label\"").count(), 0);
}

#[test]
fn flags_override_environment() {
    let f = Fixture::new();
    let idx = f.index();
    let count = |o: Output| {
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["points"].as_array().unwrap().len()
    };
    let env_only = bin().args(["pennant", "--index", &idx, "--seed", "S"]).env("PENNANT_K", "1").output().unwrap();
    assert_eq!(count(env_only), 1);
    let flag = bin()
        .args(["pennant", "--index", &idx, "--seed", "S", "--k", "2"])
        .env("PENNANT_K", "1")
        .output()
        .unwrap();
    assert_eq!(count(flag), 2);
    let min_tf = bin().args(["pennant", "--index", &idx, "--seed", "S"]).env("PENNANT_MIN_TF", "2").output().unwrap();
    assert_eq!(count(min_tf), 2);
    let base = bin().args(["pennant", "--index", &idx, "--seed", "S"]).env("PENNANT_LOG_BASE", "10").output().unwrap();
    let v: Value = serde_json::from_slice(&base.stdout).unwrap();
    assert_eq!(v["config"]["log_base"], 10.0);
}

#[test]
fn invalid_parameters_exit_2() {
    let f = Fixture::new();
    let idx = f.index();
    for extra in [&["--k", "0"][..], &["--log-base", "0.5"], &["--sectors", "2,1"], &["--idf-style", "raw"]] {
        let mut args = vec!["pennant", "--index", &idx, "--seed", "S"];
        args.extend_from_slice(extra);
        assert_eq!(run(&args).status.code(), Some(2), "{extra:?}");
    }
}

#[test]
fn stats_command() {
    let f = Fixture::new();
    let o = run(&["stats", "--index", &f.index()]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["citation"]["n_docs"], 6);
    assert_eq!(v["citation"]["n_keys"], 4);
}

fn http_get(addr: &str, path: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    write!(stream, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    let status = resp[9..12].parse().unwrap();
    let body = resp.split_once("\r\n\r\n").map(|(_, b)| b.to_string()).unwrap_or_default();
    (status, body)
}

#[test]
fn serve_answers_and_shuts_down_on_sigint() {
    let f = Fixture::new();
    let mut corpus = corpus6();
    corpus[0].descriptors = vec!["t1".into(), "t2".into()];
    corpus[1].descriptors = vec!["t2".into()];
    std::fs::write(f.path("c6d.jsonl"), to_jsonl(&corpus)).unwrap();
    let o = run(&["build-index", "--corpus", &f.s("c6d.jsonl"), "--mode", "descriptor", "--out", &f.s("d.idx")]);
    assert!(o.status.success());

    let mut child = bin()
        .args(["serve", "--index", &f.index(), "--index2", &f.s("d.idx"), "--bind", "127.0.0.1:0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let addr = loop {
        let mut line = String::new();
        assert!(stderr.read_line(&mut line).unwrap() > 0, "server exited early");
        if let Some(rest) = line.split("listening on ").nth(1) {
            break rest.trim().to_string();
        }
    };

    let (status, body) = http_get(&addr, "/api/stats");
    assert_eq!(status, 200);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["modes"], serde_json::json!(["citation", "descriptor"]));
    let (status, _) = http_get(&addr, "/api/pennant?seed=t1&mode=descriptor");
    assert_eq!(status, 200);
    let (status, _) = http_get(&addr, "/api/pennant?seed=S&mode=citation");
    assert_eq!(status, 200);

    // one log line per request
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    assert!(line.contains("GET /api/stats 200"), "{line}");

    let kill = Command::new("kill").args(["-INT", &child.id().to_string()]).status().unwrap();
    assert!(kill.success());
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn serve_bind_failure_exit_1() {
    let f = Fixture::new();
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let o = run(&["serve", "--index", &f.index(), "--bind", &addr]);
    assert_eq!(o.status.code(), Some(1));
}
