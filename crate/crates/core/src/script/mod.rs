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

//! Line-oriented protocol scripts (`.qprot`).
//!
//! One command per line, whitespace-separated tokens, `#` starts a comment.
//!
//! ```text
//! config alpha 2.0
//! cavity C1 alpha $alpha truncation $truncation
//! atom A1 lambda3 state b
//! screen SC1 zeta1 zeta2
//! bind SC1 zeta1 C1
//! kernel K2 SC1 SC2 [1 0]
//! split A1 SC1
//! pass A1 SC1 phi pi
//! detect A1 internal c
//! propagate A1 K2
//! inject C1 $alpha
//! jcpass A51 C1 gt pi/8
//! checkpoint FINAL
//! ```
//!
//! Numbers may be complex (`0.5-0.5i`). Angles are a number, `pi`, `pi/N` or
//! `$gt`. `$alpha` and `$truncation` refer to the run inputs.

mod parse;
mod validate;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::oracle::CheckpointId;
use crate::protocol::{AtomKind, DetectTarget, ExperimentLayout, RunInputs, Step};

pub use parse::{angle as parse_angle, complex as parse_complex, parse, parse_lenient};
pub use validate::validate;

/// The built-in two-slit teleportation scenario.
pub const PAPER_SCENARIO: &str = include_str!("../../examples/paper.qprot");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle
{
    Number(f64),
    Pi,
    /// `pi/N`
    PiOver(u32),
    /// `$gt`
    Gt,
}

impl Angle
{
    pub fn resolve(self, inputs: &RunInputs) -> f64
    {
        match self
        {
            Angle::Number(x) => x,
            Angle::Pi => std::f64::consts::PI,
            Angle::PiOver(n) => std::f64::consts::PI / n as f64,
            Angle::Gt => inputs.gt,
        }
    }
}

/// Complex literal or `$alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Amplitude
{
    Value(Complex64),
    Alpha,
}

impl Amplitude
{
    pub fn resolve(self, inputs: &RunInputs) -> Complex64
    {
        match self
        {
            Amplitude::Value(z) => z,
            Amplitude::Alpha => Complex64::new(inputs.alpha, 0.0),
        }
    }
}

/// Integer literal or `$truncation`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation
{
    Value(usize),
    Param,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigEntry
{
    Alpha(f64),
    Truncation(usize),
    Gt(Angle),
    Cb(Complex64),
    Cc(Complex64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AtomState
{
    Label(String),
    Input,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommandKind
{
    Config(ConfigEntry),
    Cavity { id: String, alpha: Amplitude, truncation: Option<Truncation> },
    Atom { id: String, kind: AtomKind, state: AtomState },
    Screen { id: String, slits: Vec<String> },
    Bind { screen: String, slit: String, cavity: String },
    Kernel { id: String, from: String, to: String, matrix: DMatrix<Complex64> },
    Split { atom: String, screen: String },
    Pass { atom: String, screen: String, phi: Angle },
    Detect { atom: String, target: DetectTarget, label: String },
    Propagate { atom: String, kernel: String },
    Inject { cavity: String, beta: Amplitude },
    JcPass { atom: String, cavity: String, gt: Angle },
    Checkpoint(CheckpointId),
}

/// A parsed command and the 1-based line it came from. Equality ignores the
/// line number.
#[derive(Clone, Debug)]
pub struct Command
{
    pub line: usize,
    pub kind: CommandKind,
}

impl PartialEq for Command
{
    fn eq(&self, other: &Self) -> bool
    {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProtocolScript
{
    pub commands: Vec<Command>,
}

/// A message tied to a script line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic
{
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// A validated script with every parameter substituted.
#[derive(Clone, Debug, PartialEq)]
pub struct Program
{
    pub layout: ExperimentLayout,
    pub steps: Vec<Step>,
    pub inputs: RunInputs,
}

impl ProtocolScript
{
    /// Run inputs declared by `config` lines, on top of the defaults.
    pub fn inputs(&self) -> RunInputs
    {
        let mut inputs = RunInputs::default();
        for c in &self.commands
        {
            if let CommandKind::Config(e) = &c.kind
            {
                match *e
                {
                    ConfigEntry::Alpha(a) => inputs.alpha = a,
                    ConfigEntry::Truncation(n) => inputs.truncation = n,
                    ConfigEntry::Gt(g) => inputs.gt = g.resolve(&inputs),
                    ConfigEntry::Cb(z) => inputs.cb = z,
                    ConfigEntry::Cc(z) => inputs.cc = z,
                }
            }
        }
        inputs
    }

    /// Canonical text: one command per line, single spaces, numbers with 17
    /// significant digits, symbolic angles kept.
    pub fn serialize(&self) -> String
    {
        let mut out = String::new();
        for c in &self.commands
        {
            out.push_str(&c.kind.to_string());
            out.push('\n');
        }
        out
    }
}

pub(crate) fn fmt_real(x: f64) -> String
{
    format!("{x:.16e}")
}

pub(crate) fn fmt_complex(z: Complex64) -> String
{
    if z.im == 0.0
    {
        return fmt_real(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt_real(z.re), sign, fmt_real(z.im.abs()))
}

impl fmt::Display for Angle
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        match self
        {
            Angle::Number(x) => f.write_str(&fmt_real(*x)),
            Angle::Pi => f.write_str("pi"),
            Angle::PiOver(n) => write!(f, "pi/{n}"),
            Angle::Gt => f.write_str("$gt"),
        }
    }
}

impl fmt::Display for Amplitude
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        match self
        {
            Amplitude::Value(z) => f.write_str(&fmt_complex(*z)),
            Amplitude::Alpha => f.write_str("$alpha"),
        }
    }
}

impl fmt::Display for Truncation
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        match self
        {
            Truncation::Value(n) => write!(f, "{n}"),
            Truncation::Param => f.write_str("$truncation"),
        }
    }
}

impl fmt::Display for CommandKind
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        match self
        {
            CommandKind::Config(e) => match e
            {
                ConfigEntry::Alpha(a) => write!(f, "config alpha {}", fmt_real(*a)),
                ConfigEntry::Truncation(n) => write!(f, "config truncation {n}"),
                ConfigEntry::Gt(g) => write!(f, "config gt {g}"),
                ConfigEntry::Cb(z) => write!(f, "config cb {}", fmt_complex(*z)),
                ConfigEntry::Cc(z) => write!(f, "config cc {}", fmt_complex(*z)),
            },
            CommandKind::Cavity { id, alpha, truncation } =>
            {
                write!(f, "cavity {id} alpha {alpha}")?;
                if let Some(t) = truncation
                {
                    write!(f, " truncation {t}")?;
                }
                Ok(())
            }
            CommandKind::Atom { id, kind, state } => match state
            {
                AtomState::Label(l) => write!(f, "atom {id} {kind} state {l}"),
                AtomState::Input => write!(f, "atom {id} {kind} state input"),
            },
            CommandKind::Screen { id, slits } => write!(f, "screen {id} {}", slits.join(" ")),
            CommandKind::Bind { screen, slit, cavity } => write!(f, "bind {screen} {slit} {cavity}"),
            CommandKind::Kernel { id, from, to, matrix } =>
            {
                let rows: Vec<String> = matrix.row_iter()
                    .map(|r| r.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(" "))
                    .collect();
                write!(f, "kernel {id} {from} {to} [{}]", rows.join("; "))
            }
            CommandKind::Split { atom, screen } => write!(f, "split {atom} {screen}"),
            CommandKind::Pass { atom, screen, phi } => write!(f, "pass {atom} {screen} phi {phi}"),
            CommandKind::Detect { atom, target, label } =>
                write!(f, "detect {atom} {} {label}", target.keyword()),
            CommandKind::Propagate { atom, kernel } => write!(f, "propagate {atom} {kernel}"),
            CommandKind::Inject { cavity, beta } => write!(f, "inject {cavity} {beta}"),
            CommandKind::JcPass { atom, cavity, gt } => write!(f, "jcpass {atom} {cavity} gt {gt}"),
            CommandKind::Checkpoint(id) => write!(f, "checkpoint {id}"),
        }
    }
}
