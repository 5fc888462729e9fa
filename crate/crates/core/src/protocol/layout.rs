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

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ProtocolError;

/// Name of the register holding an atom's internal level.
pub fn internal_register(atom: &str) -> String
{
    format!("{atom}.internal")
}

/// Name of the register holding an atom's which-slit amplitude.
pub fn path_register(atom: &str) -> String
{
    format!("{atom}.path")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind
{
    /// Three-level atom with levels `a, b, c`.
    Lambda3,
    /// Two-level probe with levels `f, e`.
    Qubit2,
}

impl AtomKind
{
    pub fn keyword(self) -> &'static str
    {
        match self
        {
            AtomKind::Lambda3 => "lambda3",
            AtomKind::Qubit2 => "qubit2",
        }
    }

    pub fn labels(self) -> &'static [&'static str]
    {
        match self
        {
            AtomKind::Lambda3 => &crate::fockspace::LAMBDA3_LABELS,
            AtomKind::Qubit2 => &crate::fockspace::QUBIT2_LABELS,
        }
    }
}

impl fmt::Display for AtomKind
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        f.write_str(self.keyword())
    }
}

/// Internal state an atom carries when it first enters the apparatus.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialInternal
{
    Label(String),
    /// The unknown input `c_b|b⟩ - c_c|c⟩`.
    Input,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomSpec
{
    pub name: String,
    pub kind: AtomKind,
    pub initial: InitialInternal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Screen
{
    pub name: String,
    pub slits: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CavitySpec
{
    pub name: String,
    pub alpha: Complex64,
    pub truncation: usize,
}

/// Linear map from the slits of one screen to the slits of the next.
///
/// `matrix[(j, i)]` is the amplitude for going from source slit `i` to target
/// slit `j`. Columns may have norm below one: the remainder misses the target
/// screen.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationKernel
{
    pub name: String,
    pub source: String,
    pub target: String,
    pub matrix: DMatrix<Complex64>,
}

impl PropagationKernel
{
    /// Uniform far-field kernel, every entry `1/√n_source`.
    pub fn far_field(name: &str, source: &Screen, target: &Screen) -> Self
    {
        let amp = 1.0 / (source.slits.len() as f64).sqrt();
        PropagationKernel {
            name: name.to_owned(),
            source: source.name.clone(),
            target: target.name.clone(),
            matrix: DMatrix::from_element(target.slits.len(), source.slits.len(), Complex64::new(amp, 0.0)),
        }
    }

    pub fn max_column_norm(&self) -> f64
    {
        self.matrix.column_iter()
            .map(|c| c.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding
{
    pub screen: String,
    pub slit: String,
    pub cavity: String,
}

/// Static description of the apparatus: screens, cavities, atoms, which slit
/// feeds which cavity, and the propagation kernels between screens.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentLayout
{
    pub screens: Vec<Screen>,
    pub cavities: Vec<CavitySpec>,
    pub atoms: Vec<AtomSpec>,
    pub bindings: Vec<Binding>,
    pub kernels: Vec<PropagationKernel>,
}

/// Columns of a kernel may carry at most this much more than unit norm.
pub const KERNEL_NORM_SLACK: f64 = 1e-12;

impl ExperimentLayout
{
    pub fn screen(&self, name: &str) -> Option<&Screen>
    {
        self.screens.iter().find(|s| s.name == name)
    }

    pub fn cavity(&self, name: &str) -> Option<&CavitySpec>
    {
        self.cavities.iter().find(|c| c.name == name)
    }

    pub fn atom(&self, name: &str) -> Option<&AtomSpec>
    {
        self.atoms.iter().find(|a| a.name == name)
    }

    pub fn kernel(&self, name: &str) -> Option<&PropagationKernel>
    {
        self.kernels.iter().find(|k| k.name == name)
    }

    pub fn cavity_for(&self, screen: &str, slit: &str) -> Option<&str>
    {
        self.bindings.iter()
            .find(|b| b.screen == screen && b.slit == slit)
            .map(|b| b.cavity.as_str())
    }

    /// Structural checks that do not depend on the step sequence.
    pub fn validate(&self) -> Result<(), ProtocolError>
    {
        let mut seen = std::collections::HashSet::new();
        let names = self.screens.iter().map(|s| &s.name)
            .chain(self.cavities.iter().map(|c| &c.name))
            .chain(self.atoms.iter().map(|a| &a.name))
            .chain(self.kernels.iter().map(|k| &k.name));
        for n in names
        {
            if !seen.insert(n.as_str())
            {
                return Err(ProtocolError::Layout(format!("name {n} declared twice")));
            }
        }
        for s in &self.screens
        {
            let mut slits = std::collections::HashSet::new();
            if s.slits.is_empty()
            {
                return Err(ProtocolError::Layout(format!("screen {} has no slits", s.name)));
            }
            for sl in &s.slits
            {
                if !slits.insert(sl)
                {
                    return Err(ProtocolError::Layout(format!("screen {} repeats slit {sl}", s.name)));
                }
            }
        }
        for c in &self.cavities
        {
            if c.truncation < 2
            {
                return Err(ProtocolError::Layout(format!(
                    "cavity {} has truncation {}", c.name, c.truncation)));
            }
        }
        for (i, b) in self.bindings.iter().enumerate()
        {
            let screen = self.screen(&b.screen)
                .ok_or_else(|| ProtocolError::UnknownScreen(b.screen.clone()))?;
            if !screen.slits.contains(&b.slit)
            {
                return Err(ProtocolError::Layout(format!("screen {} has no slit {}", b.screen, b.slit)));
            }
            if self.cavity(&b.cavity).is_none()
            {
                return Err(ProtocolError::UnknownCavity(b.cavity.clone()));
            }
            for other in &self.bindings[..i]
            {
                if other.screen == b.screen && other.slit == b.slit
                {
                    return Err(ProtocolError::Layout(format!(
                        "slit {} of {} bound twice", b.slit, b.screen)));
                }
                if other.screen == b.screen && other.cavity == b.cavity
                {
                    return Err(ProtocolError::Layout(format!(
                        "cavity {} bound to two slits of {}", b.cavity, b.screen)));
                }
            }
        }
        for k in &self.kernels
        {
            let src = self.screen(&k.source).ok_or_else(|| ProtocolError::UnknownScreen(k.source.clone()))?;
            let tgt = self.screen(&k.target).ok_or_else(|| ProtocolError::UnknownScreen(k.target.clone()))?;
            if k.matrix.nrows() != tgt.slits.len() || k.matrix.ncols() != src.slits.len()
            {
                return Err(ProtocolError::Layout(format!(
                    "kernel {} is {}x{}, screens need {}x{}", k.name, k.matrix.nrows(), k.matrix.ncols(),
                    tgt.slits.len(), src.slits.len())));
            }
            if k.max_column_norm() > 1.0 + KERNEL_NORM_SLACK
            {
                return Err(ProtocolError::Layout(format!("kernel {} column exceeds unit norm", k.name)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests
{
    use super::*;

    fn screen(name: &str, slits: &[&str]) -> Screen
    {
        Screen { name: name.into(), slits: slits.iter().map(|s| s.to_string()).collect() }
    }

    fn base() -> ExperimentLayout
    {
        ExperimentLayout {
            screens: vec![screen("S1", &["x1", "x2"]), screen("S2", &["y"])],
            cavities: vec![
                CavitySpec { name: "C1".into(), alpha: Complex64::new(1.0, 0.0), truncation: 30 },
                CavitySpec { name: "C2".into(), alpha: Complex64::new(1.0, 0.0), truncation: 30 },
            ],
            atoms: vec![],
            bindings: vec![
                Binding { screen: "S1".into(), slit: "x1".into(), cavity: "C1".into() },
                Binding { screen: "S1".into(), slit: "x2".into(), cavity: "C2".into() },
            ],
            kernels: vec![],
        }
    }

    #[test]
    fn lookups()
    {
        let l = base();
        assert_eq!(l.cavity_for("S1", "x2"), Some("C2"));
        assert_eq!(l.cavity_for("S2", "y"), None);
        assert!(l.validate().is_ok());
    }

    #[test]
    fn far_field_columns_are_unit()
    {
        let l = base();
        let k = PropagationKernel::far_field("K", &l.screens[0], &l.screens[0]);
        assert!((k.max_column_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_overfull_kernel()
    {
        let mut l = base();
        l.kernels.push(PropagationKernel {
            name: "K".into(),
            source: "S1".into(),
            target: "S2".into(),
            matrix: DMatrix::from_row_slice(1, 2, &[Complex64::new(1.1, 0.0), Complex64::new(0.0, 0.0)]),
        });
        let err = l.validate().unwrap_err().to_string();
        assert!(err.contains("exceeds unit norm"), "{err}");
    }

    #[test]
    fn rejects_shared_cavity()
    {
        let mut l = base();
        l.bindings[1].cavity = "C1".into();
        assert!(l.validate().is_err());
    }
}
