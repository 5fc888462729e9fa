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

//! Random generator of valid protocol scripts.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

fn real(rng: &mut impl Rng, lo: f64, hi: f64) -> f64
{
    rng.random_range(lo..hi)
}

fn complex_text(re: f64, im: f64) -> String
{
    if im == 0.0 { format!("{re}") } else if im < 0.0 { format!("{re}{im}i") } else { format!("{re}+{im}i") }
}

fn angle(rng: &mut impl Rng) -> String
{
    match rng.random_range(0..4)
    {
        0 => "pi".into(),
        1 => format!("pi/{}", rng.random_range(1..17)),
        2 => "$gt".into(),
        _ => format!("{}", real(rng, -7.0, 7.0)),
    }
}

const CHECKPOINTS: [&str; 5] = ["A1_split", "TELEPST1", "TELEPST2", "POST_JC", "FINAL"];

/// A script that parses and validates, exercising every command.
pub fn random_script(rng: &mut impl Rng) -> String
{
    let mut out = Vec::new();
    let alpha = real(rng, 0.3, 1.5);
    out.push(format!("config alpha {alpha}"));
    out.push("config truncation 80".to_string());
    if rng.random_bool(0.5)
    {
        out.push(format!("config gt {}", ["pi", "pi/8", "0.25"].choose(rng).unwrap()));
    }
    if rng.random_bool(0.5)
    {
        let (a, b, c, d) = (real(rng, -1.0, 1.0), real(rng, -1.0, 1.0), real(rng, -1.0, 1.0), real(rng, -1.0, 1.0));
        let n = (a * a + b * b + c * c + d * d).sqrt();
        out.push(format!("config cb {}", complex_text(a / n, b / n)));
        out.push(format!("config cc {}", complex_text(c / n, d / n)));
    }

    let ncav = rng.random_range(2..4);
    let cavities: Vec<String> = (0..ncav).map(|i| format!("C{i}")).collect();
    for c in &cavities
    {
        let a = if rng.random_bool(0.5) { "$alpha".to_string() } else {
            complex_text(real(rng, -0.7, 0.7), if rng.random_bool(0.5) { real(rng, -0.7, 0.7) } else { 0.0 })
        };
        let t = ["", " truncation 80", " truncation $truncation"].choose(rng).unwrap();
        out.push(format!("cavity {c} alpha {a}{t}"));
    }

    let nscreen = rng.random_range(2..5);
    let mut screens: Vec<(String, Vec<String>)> = Vec::new();
    for s in 0..nscreen
    {
        let k = if s == 0 { 2 } else { rng.random_range(1..4) };
        let slits = (0..k).map(|i| format!("s{s}_{i}")).collect();
        screens.push((format!("SC{s}"), slits));
    }
    for (name, slits) in &screens
    {
        out.push(format!("screen {name} {}", slits.join(" ")));
    }
    let mut bound = Vec::new();
    for (name, slits) in &screens
    {
        if slits.len() == 2 && (name == "SC0" || rng.random_bool(0.5))
        {
            let mut cavs = cavities.clone();
            cavs.shuffle(rng);
            out.push(format!("bind {name} {} {}", slits[0], cavs[0]));
            out.push(format!("bind {name} {} {}", slits[1], cavs[1]));
            bound.push(name.clone());
        }
    }
    let mut kernels = Vec::new();
    for k in 0..rng.random_range(1..4)
    {
        let from = screens.choose(rng).unwrap();
        let to = screens.choose(rng).unwrap();
        let (rows, cols) = (to.1.len(), from.1.len());
        let scale = 1.0 / (rows as f64).sqrt();
        let row_text: Vec<String> = (0..rows).map(|_| {
            (0..cols).map(|_| {
                let (re, im) = (real(rng, -1.0, 1.0) * scale * 0.7, real(rng, -1.0, 1.0) * scale * 0.7);
                complex_text(re, if rng.random_bool(0.5) { im } else { 0.0 })
            }).collect::<Vec<_>>().join(" ")
        }).collect();
        out.push(format!("kernel K{k} {} {} [{}]", from.0, to.0, row_text.join("; ")));
        kernels.push((format!("K{k}"), from.0.clone(), to.0.clone()));
    }

    let nl = rng.random_range(1..4);
    let nq = rng.random_range(0..3);
    for a in 0..nl
    {
        let st = if a == 0 { "input" } else { ["a", "b", "c"].choose(rng).unwrap() };
        out.push(format!("atom L{a} lambda3 state {st}"));
    }
    for q in 0..nq
    {
        out.push(format!("atom Q{q} qubit2 state {}", ["f", "e"].choose(rng).unwrap()));
    }

    let mut injected = 0.0;
    for a in 0..nl
    {
        let atom = format!("L{a}");
        let two: Vec<&(String, Vec<String>)> = screens.iter().filter(|s| s.1.len() == 2).collect();
        let screen = two.choose(rng).unwrap();
        out.push(format!("split {atom} {}", screen.0));
        let mut at = screen.0.clone();
        if bound.contains(&at) && rng.random_bool(0.8)
        {
            out.push(format!("pass {atom} {at} phi {}", angle(rng)));
        }
        if rng.random_bool(0.7)
        {
            out.push(format!("detect {atom} internal {}", ["a", "b", "c"].choose(rng).unwrap()));
        }
        for _ in 0..2
        {
            let next: Vec<&(String, String, String)> = kernels.iter().filter(|k| k.1 == at).collect();
            if let Some(k) = next.choose(rng)
            {
                out.push(format!("propagate {atom} {}", k.0));
                at = k.2.clone();
            }
        }
        if rng.random_bool(0.6)
        {
            let slits = &screens.iter().find(|s| s.0 == at).unwrap().1;
            out.push(format!("detect {atom} position {}", slits.choose(rng).unwrap()));
        }
        if rng.random_bool(0.3)
        {
            out.push(format!("checkpoint {}", CHECKPOINTS.choose(rng).unwrap()));
        }
    }
    for c in &cavities
    {
        if injected < 1.0 && rng.random_bool(0.5)
        {
            let b = real(rng, 0.0, 0.5);
            injected += b;
            out.push(format!("inject {c} {}", if rng.random_bool(0.3) { format!("0+{b}i") } else { format!("{b}") }));
        }
    }
    if rng.random_bool(0.3)
    {
        out.push("inject C0 $alpha".into());
    }
    for q in 0..nq
    {
        out.push(format!("jcpass Q{q} {} gt {}", cavities.choose(rng).unwrap(), angle(rng)));
        if rng.random_bool(0.5)
        {
            out.push(format!("detect Q{q} internal {}", ["f", "e"].choose(rng).unwrap()));
        }
    }
    out.push(format!("checkpoint {}", CHECKPOINTS.choose(rng).unwrap()));
    let mut text = out.join("\n");
    text.push('\n');
    text
}
