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

//! Closed-form intermediate states of the two-slit teleportation scenario.
//!
//! Every ket here is assembled from coherent-state amplitudes and basis
//! vectors with tensor products and sums. No gate matrix is applied, so the
//! checkpoint comparison in the engine is independent of the engine.
//!
//! Cat states are the unnormalized `|±⟩ = |α⟩ ± |-α⟩`, which keeps the
//! identity `|α⟩ = (|+⟩ + |-⟩)/2` exact; every result is normalized at the end.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::fockspace::{CompositeState, Register, StateError};
use crate::gates::{self, GateError};
use crate::protocol::{internal_register, path_register, RunInputs};

type C64 = Complex64;

/// Slit labels of the built-in scenario.
pub const SC1_SLITS: [&str; 2] = ["zeta1", "zeta2"];
pub const SC3_SLITS: [&str; 2] = ["gamma1", "gamma2"];
pub const SC5_SLITS: [&str; 2] = ["rho1", "rho2"];
pub const CAVITIES: [&str; 2] = ["C1", "C2"];

/// Far-field amplitude used by the split and the default kernels.
pub const FAR_FIELD: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckpointId
{
    A1Split,
    A1AfterCavities,
    A12AfterCavities,
    A12PostC1B2,
    A123AfterCavities,
    A123PostB3,
    A123PostZeta31,
    A12PreSc3,
    A2PostGamma1,
    Telepst1,
    A24AfterCavities,
    A24PostRho1,
    A24PostB4,
    Telepst2,
    PostInjection,
    PostJc,
    Final,
}

impl CheckpointId
{
    pub const ALL: [CheckpointId; 17] = [
        CheckpointId::A1Split,
        CheckpointId::A1AfterCavities,
        CheckpointId::A12AfterCavities,
        CheckpointId::A12PostC1B2,
        CheckpointId::A123AfterCavities,
        CheckpointId::A123PostB3,
        CheckpointId::A123PostZeta31,
        CheckpointId::A12PreSc3,
        CheckpointId::A2PostGamma1,
        CheckpointId::Telepst1,
        CheckpointId::A24AfterCavities,
        CheckpointId::A24PostRho1,
        CheckpointId::A24PostB4,
        CheckpointId::Telepst2,
        CheckpointId::PostInjection,
        CheckpointId::PostJc,
        CheckpointId::Final,
    ];

    pub fn name(self) -> &'static str
    {
        match self
        {
            CheckpointId::A1Split => "A1_split",
            CheckpointId::A1AfterCavities => "A1_after_cavities",
            CheckpointId::A12AfterCavities => "A12_after_cavities",
            CheckpointId::A12PostC1B2 => "A12_post_c1b2",
            CheckpointId::A123AfterCavities => "A123_after_cavities",
            CheckpointId::A123PostB3 => "A123_post_b3",
            CheckpointId::A123PostZeta31 => "A123_post_zeta31",
            CheckpointId::A12PreSc3 => "A12_pre_SC3",
            CheckpointId::A2PostGamma1 => "A2_post_gamma1",
            CheckpointId::Telepst1 => "TELEPST1",
            CheckpointId::A24AfterCavities => "A24_after_cavities",
            CheckpointId::A24PostRho1 => "A24_post_rho1",
            CheckpointId::A24PostB4 => "A24_post_b4",
            CheckpointId::Telepst2 => "TELEPST2",
            CheckpointId::PostInjection => "POST_INJECTION",
            CheckpointId::PostJc => "POST_JC",
            CheckpointId::Final => "FINAL",
        }
    }
}

impl fmt::Display for CheckpointId
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    {
        f.write_str(self.name())
    }
}

impl FromStr for CheckpointId
{
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err>
    {
        CheckpointId::ALL.iter().copied().find(|c| c.name() == s)
            .ok_or_else(|| OracleError::UnknownCheckpoint(s.to_owned()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError
{
    #[error("unknown checkpoint {0}")]
    UnknownCheckpoint(String),
    #[error("inputs not normalized: |cb|^2 + |cc|^2 = {0}")]
    Unnormalized(f64),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Cavity kets and register factories shared by all checkpoints.
struct Kets
{
    n: usize,
    cb: C64,
    cc: C64,
    gt: f64,
    /// `|α⟩`
    coh: Vec<C64>,
    /// `|α⟩ + |-α⟩`
    plus: Vec<C64>,
    /// `|α⟩ - |-α⟩`
    minus: Vec<C64>,
    /// `|2α⟩ + |0⟩`
    shifted_plus: Vec<C64>,
    /// `|2α⟩ - |0⟩`
    shifted_minus: Vec<C64>,
    /// Coherent amplitudes of `|2α⟩`.
    doubled: Vec<C64>,
}

fn one(x: f64) -> C64
{
    C64::new(x, 0.0)
}

impl Kets
{
    fn new(inputs: &RunInputs) -> Result<Self, OracleError>
    {
        let n = inputs.truncation;
        let alpha = one(inputs.alpha);
        let coh = gates::coherent_amplitudes(alpha, n)?.amplitudes;
        let anti = gates::coherent_amplitudes(-alpha, n)?.amplitudes;
        let doubled = gates::coherent_amplitudes(alpha * 2.0, n)?.amplitudes;
        let plus = coh.iter().zip(&anti).map(|(a, b)| a + b).collect();
        let minus = coh.iter().zip(&anti).map(|(a, b)| a - b).collect();
        let mut shifted_plus = doubled.clone();
        let mut shifted_minus = doubled.clone();
        shifted_plus[0] += 1.0;
        shifted_minus[0] -= 1.0;
        Ok(Kets { n, cb: inputs.cb, cc: inputs.cc, gt: inputs.gt, coh, plus, minus,
            shifted_plus, shifted_minus, doubled })
    }

    fn mode(&self, cavity: &str, v: &[C64]) -> CompositeState
    {
        let reg = Register::mode(cavity, self.n).expect("truncation checked by coherent_amplitudes");
        CompositeState::single(reg, v.to_vec()).expect("length matches truncation")
    }

    fn cavities(&self, c1: &[C64], c2: &[C64]) -> Vec<CompositeState>
    {
        vec![self.mode(CAVITIES[0], c1), self.mode(CAVITIES[1], c2)]
    }

    fn path(atom: &str, slits: &[&str], label: &str) -> CompositeState
    {
        let reg = Register::path(&path_register(atom), slits).expect("static labels");
        CompositeState::basis(reg, label).expect("static labels")
    }

    fn internal(atom: &str, label: &str) -> CompositeState
    {
        CompositeState::basis(Register::lambda3(&internal_register(atom)), label).expect("static labels")
    }

    fn probe(atom: &str, label: &str) -> CompositeState
    {
        CompositeState::basis(Register::qubit2(&internal_register(atom)), label).expect("static labels")
    }

    /// Joint probe-cavity ket after the probe in `|f⟩` meets `|2α⟩ + s|0⟩`.
    fn jc_joint(&self, probe: &str, cavity: &str, s: f64) -> Result<CompositeState, OracleError>
    {
        let n = self.n;
        let mut chi_f = vec![C64::new(0.0, 0.0); n];
        let mut chi_e = vec![C64::new(0.0, 0.0); n];
        for k in 0..n
        {
            chi_f[k] = self.doubled[k] * (self.gt * (k as f64).sqrt()).cos();
            if k + 1 < n
            {
                chi_e[k] = self.doubled[k + 1] * C64::new(0.0, -(self.gt * ((k + 1) as f64).sqrt()).sin());
            }
        }
        chi_f[0] += s;
        let f = Self::probe(probe, "f").tensor(&self.mode(cavity, &chi_f))?;
        let e = Self::probe(probe, "e").tensor(&self.mode(cavity, &chi_e))?;
        Ok(f.add_scaled(one(1.0), &e)?)
    }
}

fn product(parts: &[CompositeState]) -> Result<CompositeState, OracleError>
{
    let mut acc = CompositeState::scalar();
    for p in parts
    {
        acc = acc.tensor(p)?;
    }
    Ok(acc)
}

fn sum(terms: Vec<(C64, CompositeState)>) -> Result<CompositeState, OracleError>
{
    let mut it = terms.into_iter();
    let (c0, s0) = it.next().expect("at least one term");
    let mut acc = s0.scaled(c0);
    for (c, s) in it
    {
        acc = acc.add_scaled(c, &s)?;
    }
    Ok(acc)
}

fn term(coef: C64, parts: Vec<CompositeState>) -> Result<(C64, CompositeState), OracleError>
{
    Ok((coef, product(&parts)?))
}

/// Exact `e`-branch weight `Σ |C_n|² sin²(gt√n)` of a ground-state probe
/// after resonant exchange with a coherent field of mean photon number
/// `mean_n`.
pub fn jc_excited_probability(mean_n: f64, gt: f64, truncation: usize) -> Result<f64, GateError>
{
    let c = gates::coherent_amplitudes(one(mean_n.max(0.0).sqrt()), truncation)?;
    Ok(c.amplitudes.iter().enumerate()
        .map(|(n, a)| a.norm_sqr() * (gt * (n as f64).sqrt()).sin().powi(2))
        .sum())
}

/// Normalized ket expected at checkpoint `id`.
///
/// Register order: cavities first, then atoms in order of appearance with
/// the internal register before the path register. Callers comparing against
/// another ordering should permute by name.
pub fn expected_state(id: CheckpointId, inputs: &RunInputs) -> Result<CompositeState, OracleError>
{
    let norm = inputs.cb.norm_sqr() + inputs.cc.norm_sqr();
    if (norm - 1.0).abs() > crate::fockspace::INPUT_NORM_TOLERANCE
    {
        return Err(OracleError::Unnormalized(norm));
    }
    let k = Kets::new(inputs)?;
    let state = build(id, &k)?;
    Ok(state.normalized()?)
}

fn build(id: CheckpointId, k: &Kets) -> Result<CompositeState, OracleError>
{
    use CheckpointId::*;
    let z = one(FAR_FIELD);
    let (cb, cc) = (k.cb, k.cc);
    let p1 = |atom: &str, l: &str| Kets::path(atom, &SC1_SLITS, l);
    let int = Kets::internal;
    let (a, pl, mi) = (&k.coh[..], &k.plus[..], &k.minus[..]);
    let half = one(0.5);
    let quarter = one(0.25);

    // c_b branch carries |+⟩₁|-⟩₂, c_c branch |-⟩₁|+⟩₂.
    let t1 = || k.cavities(pl, mi);
    let t2 = || k.cavities(mi, pl);
    let cat = |c: Vec<CompositeState>, rest: Vec<CompositeState>| -> Vec<CompositeState> {
        c.into_iter().chain(rest).collect()
    };

    match id
    {
        A1Split => sum(vec![
            term(z, cat(k.cavities(a, a), vec![int("A1", "b"), p1("A1", "zeta1")]))?,
            term(z, cat(k.cavities(a, a), vec![int("A1", "b"), p1("A1", "zeta2")]))?,
        ]),
        A1AfterCavities => sum(vec![
            term(z * half, cat(k.cavities(pl, a), vec![int("A1", "b"), p1("A1", "zeta1")]))?,
            term(-z * half, cat(k.cavities(mi, a), vec![int("A1", "c"), p1("A1", "zeta1")]))?,
            term(z * half, cat(k.cavities(a, pl), vec![int("A1", "b"), p1("A1", "zeta2")]))?,
            term(-z * half, cat(k.cavities(a, mi), vec![int("A1", "c"), p1("A1", "zeta2")]))?,
        ]),
        A12AfterCavities =>
        {
            let zz = z * z;
            let regs = |c1: &[C64], c2: &[C64], i1: &str, s1: &str, i2: &str, s2: &str| {
                cat(k.cavities(c1, c2), vec![int("A1", i1), p1("A1", s1), int("A2", i2), p1("A2", s2)])
            };
            sum(vec![
                // both atoms through C1
                term(zz * half, regs(pl, a, "b", "zeta1", "b", "zeta1"))?,
                term(zz * half, regs(mi, a, "c", "zeta1", "c", "zeta1"))?,
                // A1 through C1, A2 through C2
                term(zz * quarter, regs(pl, pl, "b", "zeta1", "b", "zeta2"))?,
                term(-zz * quarter, regs(pl, mi, "b", "zeta1", "c", "zeta2"))?,
                term(-zz * quarter, regs(mi, pl, "c", "zeta1", "b", "zeta2"))?,
                term(zz * quarter, regs(mi, mi, "c", "zeta1", "c", "zeta2"))?,
                // A1 through C2, A2 through C1
                term(zz * quarter, regs(pl, pl, "b", "zeta2", "b", "zeta1"))?,
                term(-zz * quarter, regs(mi, pl, "b", "zeta2", "c", "zeta1"))?,
                term(-zz * quarter, regs(pl, mi, "c", "zeta2", "b", "zeta1"))?,
                term(zz * quarter, regs(mi, mi, "c", "zeta2", "c", "zeta1"))?,
                // both atoms through C2
                term(zz * half, regs(a, pl, "b", "zeta2", "b", "zeta2"))?,
                term(zz * half, regs(a, mi, "c", "zeta2", "c", "zeta2"))?,
            ])
        }
        A12PostC1B2 => sum(vec![
            term(z * z, cat(t1(), vec![p1("A1", "zeta2"), p1("A2", "zeta1")]))?,
            term(z * z, cat(t2(), vec![p1("A1", "zeta1"), p1("A2", "zeta2")]))?,
        ]),
        A123AfterCavities =>
        {
            let zz = z * z;
            let b1 = |t: Vec<CompositeState>, s1: &str, s2: &str, i3: &str, s3: &str| {
                cat(t, vec![p1("A1", s1), p1("A2", s2), int("A3", i3), p1("A3", s3)])
            };
            sum(vec![
                // |+⟩₁|-⟩₂: slit 1 leaves A3 alone, slit 2 swaps b and c with a sign
                term(zz * z * cb, b1(t1(), "zeta2", "zeta1", "b", "zeta1"))?,
                term(-zz * z * cc, b1(t1(), "zeta2", "zeta1", "c", "zeta1"))?,
                term(zz * z * cc, b1(t1(), "zeta2", "zeta1", "b", "zeta2"))?,
                term(-zz * z * cb, b1(t1(), "zeta2", "zeta1", "c", "zeta2"))?,
                term(zz * z * cc, b1(t2(), "zeta1", "zeta2", "b", "zeta1"))?,
                term(-zz * z * cb, b1(t2(), "zeta1", "zeta2", "c", "zeta1"))?,
                term(zz * z * cb, b1(t2(), "zeta1", "zeta2", "b", "zeta2"))?,
                term(-zz * z * cc, b1(t2(), "zeta1", "zeta2", "c", "zeta2"))?,
            ])
        }
        A123PostB3 =>
        {
            let zzz = z * z * z;
            let b1 = |t: Vec<CompositeState>, s1: &str, s2: &str, s3: &str| {
                cat(t, vec![p1("A1", s1), p1("A2", s2), p1("A3", s3)])
            };
            sum(vec![
                term(zzz * cb, b1(t1(), "zeta2", "zeta1", "zeta1"))?,
                term(zzz * cc, b1(t1(), "zeta2", "zeta1", "zeta2"))?,
                term(zzz * cc, b1(t2(), "zeta1", "zeta2", "zeta1"))?,
                term(zzz * cb, b1(t2(), "zeta1", "zeta2", "zeta2"))?,
            ])
        }
        A123PostZeta31 => sum(vec![
            term(z * z * cb, cat(t1(), vec![p1("A1", "zeta2"), p1("A2", "zeta1")]))?,
            term(z * z * cc, cat(t2(), vec![p1("A1", "zeta1"), p1("A2", "zeta2")]))?,
        ]),
        A12PreSc3 =>
        {
            let g = |l: &str| Kets::path("A1", &SC3_SLITS, l);
            sum(vec![
                term(z * z * z * cb, cat(t1(), vec![g("gamma1"), p1("A2", "zeta1")]))?,
                term(z * z * z * cb, cat(t1(), vec![g("gamma2"), p1("A2", "zeta1")]))?,
                term(z * z * z * cc, cat(t2(), vec![g("gamma1"), p1("A2", "zeta2")]))?,
                term(z * z * z * cc, cat(t2(), vec![g("gamma2"), p1("A2", "zeta2")]))?,
            ])
        }
        A2PostGamma1 | Telepst1 => sum(vec![
            term(z * cb, cat(t1(), vec![p1("A2", "zeta1")]))?,
            term(z * cc, cat(t2(), vec![p1("A2", "zeta2")]))?,
        ]),
        A24AfterCavities =>
        {
            let b1 = |t: Vec<CompositeState>, s2: &str, i4: &str, s4: &str| {
                cat(t, vec![p1("A2", s2), int("A4", i4), p1("A4", s4)])
            };
            let zz = z * z;
            sum(vec![
                term(zz * cb, b1(t1(), "zeta1", "b", "zeta1"))?,
                term(-zz * cb, b1(t1(), "zeta1", "c", "zeta2"))?,
                term(-zz * cc, b1(t2(), "zeta2", "c", "zeta1"))?,
                term(zz * cc, b1(t2(), "zeta2", "b", "zeta2"))?,
            ])
        }
        A24PostRho1 =>
        {
            let b1 = |t: Vec<CompositeState>, i4: &str, s4: &str| cat(t, vec![int("A4", i4), p1("A4", s4)]);
            let zz = z * z;
            sum(vec![
                term(zz * cb, b1(t1(), "b", "zeta1"))?,
                term(-zz * cb, b1(t1(), "c", "zeta2"))?,
                term(-zz * cc, b1(t2(), "c", "zeta1"))?,
                term(zz * cc, b1(t2(), "b", "zeta2"))?,
            ])
        }
        A24PostB4 | Telepst2 => sum(vec![
            term(z * cb, cat(t1(), vec![p1("A4", "zeta1")]))?,
            term(z * cc, cat(t2(), vec![p1("A4", "zeta2")]))?,
        ]),
        PostInjection =>
        {
            let (sp, sm) = (&k.shifted_plus[..], &k.shifted_minus[..]);
            sum(vec![
                term(z * cb, cat(k.cavities(sp, sm), vec![p1("A4", "zeta1")]))?,
                term(z * cc, cat(k.cavities(sm, sp), vec![p1("A4", "zeta2")]))?,
            ])
        }
        PostJc =>
        {
            let order = [
                CAVITIES[0].to_owned(),
                CAVITIES[1].to_owned(),
                path_register("A4"),
                internal_register("A51"),
                internal_register("A52"),
            ];
            let branch = |coef: C64, s1: f64, s2: f64, slit: &str| -> Result<(C64, CompositeState), OracleError> {
                let s = product(&[
                    k.jc_joint("A51", CAVITIES[0], s1)?,
                    k.jc_joint("A52", CAVITIES[1], s2)?,
                    p1("A4", slit),
                ])?;
                Ok((coef, s.permuted(&order)?))
            };
            sum(vec![branch(z * cb, 1.0, -1.0, "zeta1")?, branch(z * cc, -1.0, 1.0, "zeta2")?])
        }
        Final => sum(vec![
            term(z * cb, vec![p1("A4", "zeta1")])?,
            term(z * cc, vec![p1("A4", "zeta2")])?,
        ]),
    }
}

#[cfg(test)]
mod tests
{
    use super::*;
    use crate::fockspace::fidelity;

    fn inputs(cb: f64, cc: f64) -> RunInputs
    {
        RunInputs { cb: one(cb), cc: one(cc), ..RunInputs::default() }
    }

    #[test]
    fn names_round_trip()
    {
        for id in CheckpointId::ALL
        {
            assert_eq!(id.name().parse::<CheckpointId>().unwrap(), id);
        }
        assert!("A9_nowhere".parse::<CheckpointId>().is_err());
    }

    #[test]
    fn all_checkpoints_are_normalized()
    {
        let inp = inputs(0.6, 0.8);
        for id in CheckpointId::ALL
        {
            let s = expected_state(id, &inp).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12, "{id}");
        }
    }

    #[test]
    fn split_is_even_over_slits()
    {
        let s = expected_state(CheckpointId::A1Split, &RunInputs::default()).unwrap();
        let reduced = s.probabilities(&path_register("A1")).unwrap();
        assert!((reduced[0] - 0.5).abs() < 1e-12 && (reduced[1] - 0.5).abs() < 1e-12);
        let internal = s.probabilities(&internal_register("A1")).unwrap();
        assert!((internal[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleported_states_relabel_into_each_other()
    {
        let inp = RunInputs { cb: C64::new(0.6, 0.0), cc: C64::new(0.0, 0.8), ..RunInputs::default() };
        let t1 = expected_state(CheckpointId::Telepst1, &inp).unwrap();
        let t2 = expected_state(CheckpointId::Telepst2, &inp).unwrap();
        let moved = t1.rename_register(&path_register("A2"), &path_register("A4")).unwrap();
        assert!((fidelity(&moved, &t2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cb_branch_alone_teleports_to_first_slit()
    {
        let s = expected_state(CheckpointId::Final, &inputs(1.0, 0.0)).unwrap();
        assert!((s.amplitude(&["zeta1"]).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_inputs()
    {
        assert!(matches!(expected_state(CheckpointId::Final, &inputs(1.0, 1.0)),
            Err(OracleError::Unnormalized(_))));
    }

    #[test]
    fn excited_probability_fixtures()
    {
        let j = jc_excited_probability(16.0, std::f64::consts::PI / 8.0, 64).unwrap();
        assert!((j - 0.9618802369699015).abs() < 1e-12);
        assert!(j >= 0.9);
        assert_eq!(jc_excited_probability(16.0, 0.0, 64).unwrap(), 0.0);
        assert_eq!(jc_excited_probability(0.0, 1.3, 8).unwrap(), 0.0);
        assert!(jc_excited_probability(16.0, 0.3, 20).is_err());
    }

    #[test]
    fn post_jc_excited_weight_matches_closed_form()
    {
        // P(e on both probes) = J² / (4(1 - x²)) with x = e^{-2|α|²}.
        let inp = RunInputs::default();
        let s = expected_state(CheckpointId::PostJc, &inp).unwrap();
        let (e1, w1) = s.project(&internal_register("A51"), "e").unwrap();
        let (_, w2) = e1.project(&internal_register("A52"), "e").unwrap();
        let j = jc_excited_probability(16.0, inp.gt, 64).unwrap();
        let x = (-2.0 * inp.alpha * inp.alpha).exp();
        let expected = j * j / (4.0 * (1.0 - x * x));
        assert!((w1 * w2 - expected).abs() < 1e-9, "{} vs {expected}", w1 * w2);
    }
}
