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

use std::fmt;

use super::StateError;

/// Kind of degree of freedom a register describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegisterKind
{
    /// Which-slit / detection-point qudit of an atom.
    Path,
    /// Three-level lambda atom with levels `a`, `b`, `c`.
    Lambda3,
    /// Two-level atom with lower level `f` and upper level `e`.
    Qubit2,
    /// Truncated bosonic mode with Fock labels `0 .. dim-1`.
    Mode,
}

impl fmt::Display for RegisterKind
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        let s = match self
        {
            RegisterKind::Path => "path",
            RegisterKind::Lambda3 => "lambda3",
            RegisterKind::Qubit2 => "qubit2",
            RegisterKind::Mode => "mode",
        };
        f.write_str(s)
    }
}

pub const LAMBDA3_LABELS: [&str; 3] = ["a", "b", "c"];
pub const QUBIT2_LABELS: [&str; 2] = ["f", "e"];

/// A named tensor factor with an ordered basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register
{
    name: String,
    kind: RegisterKind,
    labels: Vec<String>,
}

impl Register
{
    /// Path register over the given (unique, non-empty) position labels.
    pub fn path<S: AsRef<str>>(name: &str, labels: &[S]) -> Result<Self, StateError>
    {
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_owned()).collect();
        if labels.is_empty()
        {
            return Err(StateError::InvalidRegister(format!("path register {} has no labels", name)));
        }
        for (i, l) in labels.iter().enumerate()
        {
            if labels[..i].contains(l)
            {
                return Err(StateError::InvalidRegister(
                    format!("label {} repeated in register {}", l, name)));
            }
        }
        Ok(Register { name: name.to_owned(), kind: RegisterKind::Path, labels })
    }

    pub fn lambda3(name: &str) -> Self
    {
        Register {
            name: name.to_owned(),
            kind: RegisterKind::Lambda3,
            labels: LAMBDA3_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn qubit2(name: &str) -> Self
    {
        Register {
            name: name.to_owned(),
            kind: RegisterKind::Qubit2,
            labels: QUBIT2_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Fock mode truncated to `dim` levels.
    pub fn mode(name: &str, dim: usize) -> Result<Self, StateError>
    {
        if dim == 0
        {
            return Err(StateError::InvalidRegister(format!("mode {} has zero dimension", name)));
        }
        Ok(Register {
            name: name.to_owned(),
            kind: RegisterKind::Mode,
            labels: (0..dim).map(|n| n.to_string()).collect(),
        })
    }

    pub fn name(&self) -> &str
    {
        &self.name
    }

    pub fn kind(&self) -> RegisterKind
    {
        self.kind
    }

    pub fn dim(&self) -> usize
    {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String]
    {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize>
    {
        self.labels.iter().position(|l| l == label)
    }

    /// Index of `label`, or an unknown-label error naming this register.
    pub fn require_index(&self, label: &str) -> Result<usize, StateError>
    {
        self.index_of(label).ok_or_else(|| StateError::UnknownLabel {
            register: self.name.clone(),
            label: label.to_owned(),
            valid: self.labels.join(","),
        })
    }

    pub fn renamed(&self, name: &str) -> Self
    {
        Register { name: name.to_owned(), ..self.clone() }
    }
}
