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

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::{Mode, ProtocolError, RunInputs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind
{
    Split,
    CavityPass,
    DetectInternal,
    Propagate,
    DetectPosition,
    Inject,
    JcPass,
    DetectProbe,
    Checkpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord
{
    pub name: String,
    pub kind: StepKind,
    pub outcome: Option<String>,
    /// Absolute weight of the recorded outcome for detections, 1 otherwise.
    pub probability: f64,
    pub checkpoint_fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport
{
    pub steps: Vec<StepRecord>,
    pub cumulative_probability: f64,
    pub final_fidelity: Option<f64>,
    pub truncation_tail_mass: f64,
    pub inputs: RunInputs,
    pub mode: Mode,
}

/// A failed run: the error and everything recorded before it.
#[derive(Clone, Debug)]
pub struct RunFailure
{
    pub error: ProtocolError,
    pub report: RunReport,
}

impl std::fmt::Display for RunFailure
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result
    {
        write!(f, "{} (after {} steps)", self.error, self.report.steps.len())
    }
}

impl std::error::Error for RunFailure {}

struct Pair(Complex64);

impl Serialize for Pair
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error>
    {
        [self.0.re, self.0.im].serialize(s)
    }
}

struct InputsView<'a>(&'a RunInputs, Mode);

impl Serialize for InputsView<'_>
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error>
    {
        let i = self.0;
        let mut st = s.serialize_struct("inputs", 7)?;
        st.serialize_field("cb", &Pair(i.cb))?;
        st.serialize_field("cc", &Pair(i.cc))?;
        st.serialize_field("alpha", &i.alpha)?;
        st.serialize_field("truncation", &i.truncation)?;
        st.serialize_field("gt", &i.gt)?;
        match self.1
        {
            Mode::PostSelect =>
            {
                st.serialize_field("mode", "post_select")?;
                st.serialize_field("seed", &Option::<u64>::None)?;
            }
            Mode::Sample { seed } =>
            {
                st.serialize_field("mode", "sample")?;
                st.serialize_field("seed", &Some(seed))?;
            }
        }
        st.end()
    }
}

impl Serialize for RunReport
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error>
    {
        let mut st = s.serialize_struct("RunReport", 5)?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("cumulative_probability", &self.cumulative_probability)?;
        st.serialize_field("final_fidelity", &self.final_fidelity)?;
        st.serialize_field("truncation_tail_mass", &self.truncation_tail_mass)?;
        st.serialize_field("inputs", &InputsView(&self.inputs, self.mode))?;
        st.end()
    }
}

/// Compact JSON with every float written to 17 significant digits.
#[derive(Clone, Copy, Debug, Default)]
pub struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter
{
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()>
    {
        if value.is_finite()
        {
            write!(w, "{value:.16e}")
        }
        else
        {
            w.write_all(b"null")
        }
    }
}

/// Serialize any value with [`CanonicalFormatter`].
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String
{
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

impl RunReport
{
    pub(crate) fn empty(inputs: RunInputs, mode: Mode) -> Self
    {
        RunReport {
            steps: Vec::new(),
            cumulative_probability: 1.0,
            final_fidelity: None,
            truncation_tail_mass: 0.0,
            inputs,
            mode,
        }
    }

    pub fn to_json(&self) -> String
    {
        to_canonical_json(self)
    }

    /// Records of the checkpoint steps only.
    pub fn checkpoints(&self) -> impl Iterator<Item = &StepRecord>
    {
        self.steps.iter().filter(|s| s.kind == StepKind::Checkpoint)
    }

    /// Plain-text table, one row per step.
    pub fn table(&self) -> String
    {
        let width = self.steps.iter().map(|s| s.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:<15}  {:<8}  {:>13}  {:>20}", "step", "kind", "outcome",
            "probability", "checkpoint fidelity");
        for s in &self.steps
        {
            let kind = serde_json::to_value(s.kind).ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            let fid = s.checkpoint_fidelity.map(|f| format!("{f:.15}")).unwrap_or_default();
            let _ = writeln!(out, "{:<width$}  {:<15}  {:<8}  {:>13.10}  {:>20}", s.name, kind,
                s.outcome.as_deref().unwrap_or("-"), s.probability, fid);
        }
        let _ = writeln!(out, "cumulative probability: {:.16e}", self.cumulative_probability);
        match self.final_fidelity
        {
            Some(f) => { let _ = writeln!(out, "final fidelity: {f:.15}"); }
            None => { let _ = writeln!(out, "final fidelity: n/a"); }
        }
        let _ = writeln!(out, "truncation tail mass: {:.3e}", self.truncation_tail_mass);
        out
    }
}
