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

//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any of them fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slitport::fockspace::{reduced_fidelity, CompositeState, Register};
use slitport::gates::{
    cat_state, coherent_amplitudes, dispersive_lambda, displacement, jc_unitary, parity_phase, pi_projector,
    tail_bound, Sign,
};
use slitport::oracle::{jc_excited_probability, CheckpointId};
use slitport::protocol::{run_protocol, Engine, RunInputs, RunOptions, RunReport, Step};
use slitport::script::{parse, parse_lenient, validate, Program, PAPER_SCENARIO};

type C64 = Complex64;

struct Verdict
{
    pass: bool,
    detail: String,
}

impl Verdict
{
    fn new(pass: bool, detail: String) -> Self
    {
        Verdict { pass, detail }
    }
}

fn c(re: f64, im: f64) -> C64
{
    C64::new(re, im)
}

fn paper(inputs: &RunInputs) -> Program
{
    validate(&parse(PAPER_SCENARIO).unwrap(), inputs).unwrap()
}

fn run(inputs: &RunInputs, verify: bool) -> RunReport
{
    let p = paper(inputs);
    let opts = RunOptions { verify_checkpoints: verify, ..RunOptions::default() };
    run_protocol(&p.layout, &p.steps, inputs, opts).unwrap()
}

fn random_inputs(rng: &mut ChaCha8Rng) -> RunInputs
{
    let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    RunInputs { cb: c(v[0] / n, v[1] / n), cc: c(v[2] / n, v[3] / n), ..RunInputs::default() }
}

fn max_abs(m: &DMatrix<C64>) -> f64
{
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs_vec(v: &[C64]) -> f64
{
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn apply(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64>
{
    (m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect()
}

fn unitarity_error(m: &DMatrix<C64>) -> f64
{
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - DMatrix::<C64>::identity(n, n)))
}

fn end_to_end() -> Verdict
{
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let inputs: Vec<RunInputs> = (0..20).map(|_| random_inputs(&mut rng)).collect();
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for i in &inputs
    {
        worst = worst.min(run(i, false).final_fidelity.unwrap_or(0.0));
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(worst >= 1.0 - 1e-8 && secs < 10.0,
        format!("20 random inputs, min fidelity {worst:.15}, {secs:.2} s"))
}

fn checkpoints() -> Verdict
{
    let inputs = RunInputs { cb: c(0.6, 0.0), cc: c(0.0, 0.8), ..RunInputs::default() };
    let r = run(&inputs, true);
    let cps: Vec<_> = r.checkpoints().collect();
    let (name, worst) = cps.iter()
        .map(|s| (s.name.as_str(), s.checkpoint_fidelity.unwrap_or(0.0)))
        .fold(("", f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    Verdict::new(cps.len() == 17 && worst >= 1.0 - 1e-9,
        format!("{} checkpoints, min fidelity {worst:.15} at {name}", cps.len()))
}

fn projector_algebra() -> Verdict
{
    let n = 64;
    let pp = pi_projector(Sign::Plus, n).unwrap().matrix().clone();
    let pm = pi_projector(Sign::Minus, n).unwrap().matrix().clone();
    let parity = parity_phase(n).unwrap().matrix().clone();
    let mut checks: Vec<(String, f64)> = vec![
        ("P+^2=P+".into(), max_abs(&(&pp * &pp - &pp))),
        ("P-^2=P-".into(), max_abs(&(&pm * &pm - &pm))),
        ("P+P-=0".into(), max_abs(&(&pp * &pm))),
        ("P++P-=parity".into(), max_abs(&(&pp + &pm - &parity))),
    ];
    for alpha in [1.0, 2.0, 3.0]
    {
        let plus = cat_state(c(alpha, 0.0), Sign::Plus, n).unwrap();
        let minus = cat_state(c(alpha, 0.0), Sign::Minus, n).unwrap();
        let diff = |a: Vec<C64>, b: &[C64]| max_abs_vec(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>());
        let neg: Vec<C64> = minus.iter().map(|z| -z).collect();
        checks.push((format!("P+|+>=|+> a={alpha}"), diff(apply(&pp, &plus), &plus)));
        checks.push((format!("P-|->=-|-> a={alpha}"), diff(apply(&pm, &minus), &neg)));
        checks.push((format!("P+|->=0 a={alpha}"), max_abs_vec(&apply(&pp, &minus))));
        checks.push((format!("P-|+>=0 a={alpha}"), max_abs_vec(&apply(&pm, &plus))));
    }
    let failed: Vec<String> = checks.iter()
        .filter(|(_, e)| !(*e < 1e-12))
        .map(|(k, e)| format!("{k} off by {e:.3e}"))
        .collect();
    let detail = if failed.is_empty()
    {
        format!("{} checks below 1e-12", checks.len())
    }
    else
    {
        format!("{}/{} checks below 1e-12; violated: {}", checks.len() - failed.len(), checks.len(),
            failed.join(", "))
    };
    Verdict::new(failed.is_empty(), detail)
}

fn unitarity() -> Verdict
{
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 64;
    let mut disp = 0.0f64;
    let mut jc = 0.0f64;
    for _ in 0..100
    {
        let phi = rng.random_range(-2.0 * PI..2.0 * PI);
        disp = disp.max(unitarity_error(dispersive_lambda(phi, n).unwrap().matrix()));
        let gt = rng.random_range(0.0..2.0 * PI);
        jc = jc.max(unitarity_error(jc_unitary(gt, n).unwrap().matrix()));
    }
    let mut round = 0.0f64;
    for alpha in [1.0, 2.0, 3.0]
    {
        let beta = c(alpha, 0.0);
        let dim = tail_bound(4.0 * alpha * alpha);
        let fwd = displacement(beta, dim).unwrap().matrix().clone();
        let back = displacement(-beta, dim).unwrap().matrix().clone();
        round = round.max(max_abs(&(&fwd * &back - DMatrix::<C64>::identity(dim, dim))));
        // a coherent state shifted there and back
        let v = coherent_amplitudes(beta, dim).unwrap().amplitudes;
        let w = apply(&back, &apply(&fwd, &v));
        round = round.max(max_abs_vec(&w.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<_>>()));
    }
    Verdict::new(disp < 1e-12 && jc < 1e-12 && round < 1e-8,
        format!("dispersive {disp:.2e}, jc {jc:.2e} over 100 draws; displacement round trip {round:.2e}"))
}

fn input_independence() -> Verdict
{
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut probs = Vec::new();
    let mut b3 = 0.0f64;
    for _ in 0..10
    {
        let r = run(&random_inputs(&mut rng), false);
        probs.push(r.cumulative_probability);
        let p = r.steps.iter().find(|s| s.name == "detect A3 internal b").map_or(0.0, |s| s.probability);
        b3 = b3.max((p - 0.5).abs());
    }
    let lo = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Verdict::new(hi - lo <= 1e-10 && b3 <= 1e-10,
        format!("cumulative probability {lo:.12e} spread {:.2e}; |P(b3)-0.5| <= {b3:.2e}", hi - lo))
}

fn jc_disentanglement() -> Verdict
{
    let j = jc_excited_probability(16.0, PI / 8.0, 64).unwrap();
    let text = "cavity C alpha 4 truncation 64\natom P qubit2 state f\njcpass P C gt pi/8\ndetect P internal e\n";
    let s = parse(text).unwrap();
    let p = validate(&s, &s.inputs()).unwrap();
    let r = run_protocol(&p.layout, &p.steps, &p.inputs, RunOptions::default()).unwrap();
    let engine = r.steps[1].probability;
    let in_run = run(&RunInputs::default(), false);
    let e1 = in_run.steps.iter().find(|s| s.name == "detect A51 internal e").map_or(0.0, |s| s.probability);
    Verdict::new(j >= 0.9 && (engine - j).abs() <= 1e-10,
        format!("oracle {j:.16}, engine probe on |2a> {engine:.16}; inside the scenario P(e) = {e1:.6}"))
}

fn injection() -> Verdict
{
    let mut worst = f64::INFINITY;
    for (cb, cc, signs) in [(1.0, 0.0, [1.0, -1.0]), (0.0, 1.0, [-1.0, 1.0])]
    {
        let inputs = RunInputs { cb: c(cb, 0.0), cc: c(cc, 0.0), ..RunInputs::default() };
        let p = paper(&inputs);
        let mut e = Engine::new(&p.layout, inputs, RunOptions::default()).unwrap();
        for s in &p.steps
        {
            e.step(s).unwrap();
            if *s == Step::Checkpoint(CheckpointId::PostInjection)
            {
                break;
            }
        }
        let n = inputs.truncation;
        let doubled = coherent_amplitudes(c(2.0 * inputs.alpha, 0.0), n).unwrap().amplitudes;
        for (cav, sign) in ["C1", "C2"].into_iter().zip(signs)
        {
            let mut v = doubled.clone();
            v[0] += sign;
            let target = CompositeState::single(Register::mode(cav, n).unwrap(), v).unwrap().normalized().unwrap();
            worst = worst.min(reduced_fidelity(e.state(), &[cav], &target).unwrap());
        }
    }
    Verdict::new(worst >= 1.0 - 1e-8, format!("4 cavity states, min fidelity {worst:.15}"))
}

fn parser() -> Verdict
{
    let mut texts = vec![PAPER_SCENARIO.to_owned()];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    texts.extend((0..10).map(|_| common::random_script(&mut rng)));
    let mut round_trips = 0;
    for t in &texts
    {
        let first = parse(t).unwrap();
        let second = parse(&first.serialize()).unwrap();
        if first == second && validate(&first, &first.inputs()).is_ok()
        {
            round_trips += 1;
        }
    }
    let path = format!("{}/tests/fixtures/malformed.qprot", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    let (script, errors) = parse_lenient(&text);
    let lines: Vec<usize> = errors.iter().map(|e| e.line).collect();
    let kept: Vec<usize> = script.commands.iter().map(|c| c.line).collect();
    let labelled = errors.iter().all(|e| e.line > 0 && e.to_string().starts_with(&format!("line {}: ", e.line)));
    let ok = round_trips == texts.len()
        && lines == [3, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15]
        && kept == [2, 4, 9, 16]
        && labelled;
    Verdict::new(ok, format!("{round_trips}/{} round trips; malformed fixture errors at lines {lines:?}, kept {kept:?}",
        texts.len()))
}

fn main() -> ExitCode
{
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("end-to-end teleportation", end_to_end),
        ("checkpoint equivalence", checkpoints),
        ("projector algebra", projector_algebra),
        ("unitarity", unitarity),
        ("input independence", input_independence),
        ("jc disentanglement", jc_disentanglement),
        ("injection identity", injection),
        ("parser", parser),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate()
    {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Verdict::new(false, "panicked".into()));
        if !v.pass
        {
            failed += 1;
        }
        println!("criterion {} {} {title}: {} [{:.2} s]", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail,
            start.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
