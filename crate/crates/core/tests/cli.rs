// Copyright 2026 The slitport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::{Command, Output};

fn slitport(args: &[&str]) -> Output
{
    Command::new(env!("CARGO_BIN_EXE_slitport")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32
{
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String
{
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String
{
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf
{
    let dir = std::env::temp_dir().join(format!("slitport-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn scenario() -> String
{
    format!("{}/examples/paper.qprot", env!("CARGO_MANIFEST_DIR"))
}

fn json(path: &PathBuf) -> serde_json::Value
{
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn paper_verifies_every_checkpoint()
{
    let o = slitport(&["paper"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<f64> = out.lines()
        .skip_while(|l| !l.starts_with("checkpoint fidelities:"))
        .skip(1)
        .filter(|l| !l.trim_start().starts_with("worst"))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|f| *f >= 1.0 - 1e-9));
}

#[test]
fn paper_basis_input()
{
    let out = scratch("basis.json");
    let o = slitport(&["paper", "--cb", "1", "--cc", "0", "--json", out.to_str().unwrap(), "--min-fidelity", "0.99999999"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&out);
    assert!((v["final_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(v["inputs"]["cb"][0].as_f64().unwrap(), 1.0);
}

#[test]
fn run_writes_report()
{
    let out = scratch("run.json");
    let o = slitport(&["run", &scenario(), "--cb", "0.6", "--cc", "0.8", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&out);
    assert!((v["final_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);
    for s in v["steps"].as_array().unwrap()
    {
        let keys: Vec<&str> = s.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 5);
        for k in ["name", "kind", "outcome", "probability", "checkpoint_fidelity"]
        {
            assert!(keys.contains(&k));
        }
    }
}

#[test]
fn sampling_is_reproducible()
{
    let (a, b) = (scratch("s1.json"), scratch("s2.json"));
    let oa = slitport(&["run", &scenario(), "--sample", "--seed", "7", "--json", a.to_str().unwrap()]);
    let ob = slitport(&["run", &scenario(), "--sample", "--seed", "7", "--json", b.to_str().unwrap()]);
    assert_eq!(code(&oa), code(&ob));
    assert_eq!(stdout(&oa), stdout(&ob));
    if code(&oa) == 0 || code(&oa) == 1
    {
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn truncation_violation_is_an_input_error()
{
    let o = slitport(&["run", &scenario(), "--truncation", "8", "--alpha", "2"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("tail bound"), "{}", stderr(&o));
}

#[test]
fn impossible_outcome_exit_code()
{
    let path = scratch("vacuum.qprot");
    std::fs::write(&path, "cavity C alpha 0 truncation 4\natom P qubit2 state f\njcpass P C gt 1\ndetect P internal e\n").unwrap();
    let o = slitport(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stdout(&o).contains("jc_pass"), "partial table expected");
}

#[test]
fn low_fidelity_exit_code()
{
    let o = slitport(&["paper", "--min-fidelity", "1.5"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn check_reports_lines()
{
    let bad = format!("{}/tests/fixtures/malformed.qprot", env!("CARGO_MANIFEST_DIR"));
    let o = slitport(&["check", &bad]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 11);
    assert!(err.contains("line 3: invalid number 'two'"), "{err}");
    let o = slitport(&["check", &scenario()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("6 screens, 2 cavities"));
    assert_eq!(code(&slitport(&["check", "/nonexistent.qprot"])), 2);
}

#[test]
fn unnormalized_flags_are_rejected()
{
    let o = slitport(&["paper", "--cb", "1", "--cc", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not normalized"));
}

#[test]
fn sweep_alpha()
{
    let out = scratch("sweep.json");
    let o = slitport(&["sweep", "--param", "alpha", "--values", "1,2", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&out);
    assert_eq!(v["param"], "alpha");
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for r in runs
    {
        assert!(r["final_fidelity"].as_f64().unwrap() >= 1.0 - 1e-6);
        assert!(r["error"].is_null());
    }
    assert_eq!(runs[0]["truncation"], 27);
}

#[test]
fn sweep_cb_keeps_inputs_normalized()
{
    let o = slitport(&["sweep", "--param", "cb", "--values", "0,0.6,1,1.2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json_line = stdout(&o).lines().last().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&json_line).unwrap();
    let runs = v["runs"].as_array().unwrap();
    let probs: Vec<f64> = runs[..3].iter().map(|r| r["cumulative_probability"].as_f64().unwrap()).collect();
    assert!(probs.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-10));
    assert!(runs[3]["error"].as_str().unwrap().contains("above 1"));
}

#[test]
fn sweep_gt_zero_records_the_failure()
{
    let o = slitport(&["sweep", "--param", "gt", "--values", "0"]);
    let last = stdout(&o).lines().last().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert!(v["runs"][0]["error"].as_str().unwrap().contains("impossible"));
    assert_eq!(code(&o), 3);
}

#[test]
fn sweep_needs_values()
{
    assert_eq!(code(&slitport(&["sweep", "--param", "alpha", "--values", ""])), 2);
    assert_eq!(code(&slitport(&["sweep", "--param", "alpha", "--values", "x"])), 2);
    assert_eq!(code(&slitport(&["sweep", "--param", "phase", "--values", "1"])), 2);
}
