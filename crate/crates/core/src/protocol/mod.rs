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

//! Screens, slits, cavities and atoms, and the engine that drives a composite
//! state through a straight-line list of protocol steps.

mod engine;
mod layout;
mod report;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::fockspace::{StateError, INPUT_NORM_TOLERANCE};
use crate::gates::GateError;
use crate::oracle::{CheckpointId, OracleError};

pub use engine::{run_protocol, Engine};
pub use layout::{
    internal_register, path_register, AtomKind, AtomSpec, Binding, CavitySpec, ExperimentLayout,
    InitialInternal, PropagationKernel, Screen, KERNEL_NORM_SLACK,
};
pub use report::{to_canonical_json, CanonicalFormatter, RunFailure, RunReport, StepKind, StepRecord};

/// Free parameters of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunInputs
{
    /// Amplitude on `|b⟩` of the state being teleported.
    pub cb: Complex64,
    /// Amplitude on `|c⟩` of the state being teleported.
    pub cc: Complex64,
    /// Coherent amplitude prepared in (and later injected into) the cavities.
    pub alpha: f64,
    /// Fock dimension of each cavity.
    pub truncation: usize,
    /// Probe interaction angle `g·t`.
    pub gt: f64,
}

impl Default for RunInputs
{
    fn default() -> Self
    {
        RunInputs {
            cb: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            cc: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            alpha: 2.0,
            truncation: 64,
            gt: std::f64::consts::PI / 8.0,
        }
    }
}

impl RunInputs
{
    pub fn check(&self) -> Result<(), ProtocolError>
    {
        let n = self.cb.norm_sqr() + self.cc.norm_sqr();
        if !((n - 1.0).abs() <= INPUT_NORM_TOLERANCE)
        {
            return Err(ProtocolError::InputsNotNormalized(n));
        }
        if !self.alpha.is_finite() || !self.gt.is_finite()
        {
            return Err(ProtocolError::Layout("alpha and gt must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectTarget
{
    Internal,
    Position,
}

impl DetectTarget
{
    pub fn keyword(self) -> &'static str
    {
        match self
        {
            DetectTarget::Internal => "internal",
            DetectTarget::Position => "position",
        }
    }
}

/// One resolved protocol instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum Step
{
    /// Send the atom through a two-slit screen.
    Split { atom: String, screen: String },
    /// Dispersive pass through the cavities behind the screen's slits.
    Pass { atom: String, screen: String, phi: f64 },
    Detect { atom: String, target: DetectTarget, label: String },
    Propagate { atom: String, kernel: String },
    /// Displace a cavity field by `beta`.
    Inject { cavity: String, beta: Complex64 },
    /// Resonant exchange between a probe and a cavity.
    JcPass { atom: String, cavity: String, gt: f64 },
    Checkpoint(CheckpointId),
}

impl fmt::Display for Step
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        match self
        {
            Step::Split { atom, screen } => write!(f, "split {atom} {screen}"),
            Step::Pass { atom, screen, phi } => write!(f, "pass {atom} {screen} phi {phi}"),
            Step::Detect { atom, target, label } => write!(f, "detect {atom} {} {label}", target.keyword()),
            Step::Propagate { atom, kernel } => write!(f, "propagate {atom} {kernel}"),
            Step::Inject { cavity, beta } => write!(f, "inject {cavity} {beta}"),
            Step::JcPass { atom, cavity, gt } => write!(f, "jcpass {atom} {cavity} gt {gt}"),
            Step::Checkpoint(id) => write!(f, "checkpoint {id}"),
        }
    }
}

/// How detection outcomes are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode
{
    /// Force the label written in the step and record its probability.
    PostSelect,
    /// Draw the outcome from the Born rule with a seeded generator.
    Sample { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions
{
    pub mode: Mode,
    /// Compare against the oracle at checkpoint steps.
    pub verify_checkpoints: bool,
}

impl Default for RunOptions
{
    fn default() -> Self
    {
        RunOptions { mode: Mode::PostSelect, verify_checkpoints: true }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError
{
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("inputs not normalized: |cb|^2 + |cc|^2 = {0}")]
    InputsNotNormalized(f64),
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("unknown screen {0}")]
    UnknownScreen(String),
    #[error("unknown cavity {0}")]
    UnknownCavity(String),
    #[error("unknown kernel {0}")]
    UnknownKernel(String),
    #[error("screen {screen} has {found} slits, a split needs 2")]
    SlitCount { screen: String, found: usize },
    #[error("atom {0} is already split")]
    AlreadySplit(String),
    #[error("atom {atom} is not at screen {expected}")]
    NotAtScreen { atom: String, expected: String },
    #[error("slit {slit} has no cavity")]
    UnboundSlit { screen: String, slit: String },
    #[error("cavity register {0} missing from the state")]
    MissingCavity(String),
    #[error("atom {atom} is {found}, step needs {expected}")]
    WrongKind { atom: String, expected: AtomKind, found: AtomKind },
    #[error("internal state of {0} was already measured")]
    InternalConsumed(String),
    #[error("atom {0} has no path register")]
    NoPath(String),
    #[error("atom {atom} missed every detector (undetected weight {flux})")]
    Undetected { atom: String, flux: f64 },
    #[error("checkpoint {id} cannot be compared: {reason}")]
    CheckpointMismatch { id: CheckpointId, reason: String },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl ProtocolError
{
    /// True when the error is a post-selected outcome with (numerically)
    /// zero probability.
    pub fn is_impossible_outcome(&self) -> bool
    {
        matches!(self, ProtocolError::State(StateError::ImpossibleOutcome { .. })
            | ProtocolError::Gate(GateError::State(StateError::ImpossibleOutcome { .. })))
    }
}
