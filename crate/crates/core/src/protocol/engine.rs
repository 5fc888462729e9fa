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

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::{internal_register, path_register, AtomKind, ExperimentLayout, InitialInternal};
use super::report::{RunFailure, RunReport, StepKind, StepRecord};
use super::{DetectTarget, Mode, ProtocolError, RunInputs, RunOptions, Step};
use crate::fockspace::{reduced_fidelity, fidelity, CompositeState, OperatorMatrix, Register};
use crate::gates::{self, GateError, NORM_LOSS_TOLERANCE};
use crate::oracle::{self, CheckpointId};

#[derive(Clone, Debug, PartialEq)]
enum Internal
{
    Absent,
    Live,
    Measured,
}

#[derive(Clone, Debug)]
struct AtomState
{
    internal: Internal,
    /// Screen whose slit labels the path register currently carries.
    location: Option<String>,
    split: bool,
}

/// Steps a composite state through a protocol, one instruction at a time.
pub struct Engine<'a>
{
    layout: &'a ExperimentLayout,
    inputs: RunInputs,
    options: RunOptions,
    rng: Option<ChaCha8Rng>,
    state: CompositeState,
    atoms: HashMap<String, AtomState>,
    split_order: Vec<String>,
    tail_mass: f64,
    cumulative: f64,
    records: Vec<StepRecord>,
    dispersive: HashMap<(u64, usize), OperatorMatrix>,
    jc: HashMap<(u64, usize), OperatorMatrix>,
}

fn same_op_key(x: f64, n: usize) -> (u64, usize)
{
    (x.to_bits(), n)
}

impl<'a> Engine<'a>
{
    /// Prepare every cavity in its coherent state.
    pub fn new(layout: &'a ExperimentLayout, inputs: RunInputs, options: RunOptions)
        -> Result<Self, ProtocolError>
    {
        layout.validate()?;
        inputs.check()?;
        let mut state = CompositeState::scalar();
        let mut tail_mass = 0.0f64;
        for c in &layout.cavities
        {
            let coh = gates::coherent_amplitudes(c.alpha, c.truncation)?;
            tail_mass = tail_mass.max(coh.tail_mass);
            let reg = Register::mode(&c.name, c.truncation)?;
            state = state.tensor(&CompositeState::single(reg, coh.amplitudes)?)?;
        }
        let atoms = layout.atoms.iter()
            .map(|a| (a.name.clone(), AtomState { internal: Internal::Absent, location: None, split: false }))
            .collect();
        let rng = match options.mode
        {
            Mode::Sample { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            Mode::PostSelect => None,
        };
        Ok(Engine {
            layout,
            inputs,
            options,
            rng,
            state,
            atoms,
            split_order: Vec::new(),
            tail_mass,
            cumulative: 1.0,
            records: Vec::new(),
            dispersive: HashMap::new(),
            jc: HashMap::new(),
        })
    }

    pub fn state(&self) -> &CompositeState
    {
        &self.state
    }

    pub fn records(&self) -> &[StepRecord]
    {
        &self.records
    }

    pub fn cumulative_probability(&self) -> f64
    {
        self.cumulative
    }

    /// Largest truncation diagnostic seen so far: coherent tail mass at
    /// preparation or norm leaked by an injection.
    pub fn truncation_tail_mass(&self) -> f64
    {
        self.tail_mass
    }

    /// Execute one step and append its record.
    pub fn step(&mut self, step: &Step) -> Result<&StepRecord, ProtocolError>
    {
        let record = self.execute(step)?;
        self.cumulative *= record.probability;
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    /// Reduced fidelity of the most recently split atom that still has a
    /// two-slit path register, against `cb|slit₁⟩ + cc|slit₂⟩`.
    pub fn final_fidelity(&self) -> Option<f64>
    {
        let atom = self.split_order.iter().rev().find(|a| self.state.contains(&path_register(a)))?;
        let reg = self.state.register(&path_register(atom))?.clone();
        if reg.dim() != 2
        {
            return None;
        }
        let target = CompositeState::single(reg.clone(), vec![self.inputs.cb, self.inputs.cc]).ok()?;
        reduced_fidelity(&self.state, &[reg.name()], &target).ok()
    }

    pub fn report(&self) -> RunReport
    {
        RunReport {
            steps: self.records.clone(),
            cumulative_probability: self.cumulative,
            final_fidelity: self.final_fidelity(),
            truncation_tail_mass: self.tail_mass,
            inputs: self.inputs,
            mode: self.options.mode,
        }
    }

    fn atom(&self, name: &str) -> Result<(&super::AtomSpec, &AtomState), ProtocolError>
    {
        let spec = self.layout.atom(name).ok_or_else(|| ProtocolError::UnknownAtom(name.to_owned()))?;
        Ok((spec, &self.atoms[name]))
    }

    /// Make sure the atom's internal register is in the state, creating it
    /// from the declared initial state on first use.
    fn ensure_internal(&mut self, name: &str) -> Result<String, ProtocolError>
    {
        let (spec, st) = self.atom(name)?;
        let reg_name = internal_register(name);
        match st.internal
        {
            Internal::Live => return Ok(reg_name),
            Internal::Measured => return Err(ProtocolError::InternalConsumed(name.to_owned())),
            Internal::Absent => {}
        }
        let reg = match spec.kind
        {
            AtomKind::Lambda3 => Register::lambda3(&reg_name),
            AtomKind::Qubit2 => Register::qubit2(&reg_name),
        };
        let local = match &spec.initial
        {
            InitialInternal::Label(l) => CompositeState::basis(reg, l)?,
            InitialInternal::Input =>
            {
                if spec.kind != AtomKind::Lambda3
                {
                    return Err(ProtocolError::WrongKind {
                        atom: name.to_owned(),
                        expected: AtomKind::Lambda3,
                        found: spec.kind,
                    });
                }
                let z = Complex64::new(0.0, 0.0);
                CompositeState::single(reg, vec![z, self.inputs.cb, -self.inputs.cc])?
            }
        };
        self.state = self.state.tensor(&local)?;
        self.atoms.get_mut(name).expect("declared").internal = Internal::Live;
        Ok(reg_name)
    }

    fn require_kind(&self, name: &str, kind: AtomKind) -> Result<(), ProtocolError>
    {
        let (spec, _) = self.atom(name)?;
        if spec.kind != kind
        {
            return Err(ProtocolError::WrongKind { atom: name.to_owned(), expected: kind, found: spec.kind });
        }
        Ok(())
    }

    fn require_at(&self, name: &str, screen: &str) -> Result<(), ProtocolError>
    {
        let (_, st) = self.atom(name)?;
        if st.location.as_deref() != Some(screen)
        {
            return Err(ProtocolError::NotAtScreen { atom: name.to_owned(), expected: screen.to_owned() });
        }
        Ok(())
    }

    fn record(step: &Step, kind: StepKind) -> StepRecord
    {
        StepRecord { name: step.to_string(), kind, outcome: None, probability: 1.0, checkpoint_fidelity: None }
    }

    fn execute(&mut self, step: &Step) -> Result<StepRecord, ProtocolError>
    {
        match step
        {
            Step::Split { atom, screen } =>
            {
                self.split(atom, screen)?;
                Ok(Self::record(step, StepKind::Split))
            }
            Step::Pass { atom, screen, phi } =>
            {
                self.pass(atom, screen, *phi)?;
                Ok(Self::record(step, StepKind::CavityPass))
            }
            Step::Detect { atom, target, label } =>
            {
                let (kind, register) = match target
                {
                    DetectTarget::Internal =>
                    {
                        let reg = self.ensure_internal(atom)?;
                        let kind = match self.atom(atom)?.0.kind
                        {
                            AtomKind::Lambda3 => StepKind::DetectInternal,
                            AtomKind::Qubit2 => StepKind::DetectProbe,
                        };
                        (kind, reg)
                    }
                    DetectTarget::Position =>
                    {
                        let (_, st) = self.atom(atom)?;
                        let Some(screen) = st.location.clone()
                        else
                        {
                            return Err(ProtocolError::NoPath(atom.clone()));
                        };
                        let valid = &self.layout.screen(&screen).expect("validated").slits;
                        if !valid.contains(label)
                        {
                            return Err(crate::fockspace::StateError::UnknownLabel {
                                register: path_register(atom),
                                label: label.clone(),
                                valid: valid.join(","),
                            }.into());
                        }
                        (StepKind::DetectPosition, path_register(atom))
                    }
                };
                let (outcome, p) = self.detect(atom, &register, label)?;
                match target
                {
                    DetectTarget::Internal => self.atoms.get_mut(atom).expect("declared").internal = Internal::Measured,
                    DetectTarget::Position => self.atoms.get_mut(atom).expect("declared").location = None,
                }
                let mut r = Self::record(step, kind);
                r.outcome = Some(outcome);
                r.probability = p;
                Ok(r)
            }
            Step::Propagate { atom, kernel } =>
            {
                self.propagate(atom, kernel)?;
                Ok(Self::record(step, StepKind::Propagate))
            }
            Step::Inject { cavity, beta } =>
            {
                self.inject(cavity, *beta)?;
                Ok(Self::record(step, StepKind::Inject))
            }
            Step::JcPass { atom, cavity, gt } =>
            {
                self.jc_pass(atom, cavity, *gt)?;
                Ok(Self::record(step, StepKind::JcPass))
            }
            Step::Checkpoint(id) =>
            {
                let mut r = Self::record(step, StepKind::Checkpoint);
                if self.options.verify_checkpoints
                {
                    r.checkpoint_fidelity = Some(self.checkpoint_fidelity(*id)?);
                }
                Ok(r)
            }
        }
    }

    fn split(&mut self, atom: &str, screen: &str) -> Result<(), ProtocolError>
    {
        let sc = self.layout.screen(screen).ok_or_else(|| ProtocolError::UnknownScreen(screen.to_owned()))?;
        if sc.slits.len() != 2
        {
            return Err(ProtocolError::SlitCount { screen: screen.to_owned(), found: sc.slits.len() });
        }
        if self.atom(atom)?.1.split
        {
            return Err(ProtocolError::AlreadySplit(atom.to_owned()));
        }
        if self.atom(atom)?.1.internal == Internal::Absent
        {
            self.ensure_internal(atom)?;
        }
        let reg = Register::path(&path_register(atom), &sc.slits)?;
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.state = self.state.tensor(&CompositeState::single(reg, vec![amp, amp])?)?;
        let st = self.atoms.get_mut(atom).expect("declared");
        st.split = true;
        st.location = Some(screen.to_owned());
        self.split_order.push(atom.to_owned());
        Ok(())
    }

    fn pass(&mut self, atom: &str, screen: &str, phi: f64) -> Result<(), ProtocolError>
    {
        self.require_kind(atom, AtomKind::Lambda3)?;
        self.require_at(atom, screen)?;
        let internal = self.ensure_internal(atom)?;
        let sc = self.layout.screen(screen).expect("atom located at a declared screen");
        let mut plan = Vec::with_capacity(sc.slits.len());
        for slit in &sc.slits
        {
            let cavity = self.layout.cavity_for(screen, slit).ok_or_else(|| ProtocolError::UnboundSlit {
                screen: screen.to_owned(),
                slit: slit.clone(),
            })?;
            let reg = self.state.register(cavity).ok_or_else(|| ProtocolError::MissingCavity(cavity.to_owned()))?;
            plan.push((slit.clone(), cavity.to_owned(), reg.dim()));
        }
        let path = path_register(atom);
        for (slit, cavity, n) in plan
        {
            let key = same_op_key(phi, n);
            if !self.dispersive.contains_key(&key)
            {
                self.dispersive.insert(key, gates::dispersive_lambda(phi, n)?);
            }
            let op = self.dispersive[&key].clone().on(&[internal.as_str(), cavity.as_str()])?;
            self.state = self.state.apply_controlled(&op, &path, &slit)?;
        }
        Ok(())
    }

    fn detect(&mut self, atom: &str, register: &str, label: &str) -> Result<(String, f64), ProtocolError>
    {
        let outcome = match self.rng.as_mut()
        {
            None => label.to_owned(),
            Some(rng) =>
            {
                let probs = self.state.probabilities(register)?;
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = None;
                for (i, p) in probs.iter().enumerate()
                {
                    acc += p;
                    if u < acc
                    {
                        pick = Some(i);
                        break;
                    }
                }
                let Some(i) = pick
                else
                {
                    return Err(ProtocolError::Undetected { atom: atom.to_owned(), flux: (1.0 - acc).max(0.0) });
                };
                self.state.register(register).expect("probabilities succeeded").labels()[i].clone()
            }
        };
        let (projected, p) = self.state.project(register, &outcome)?;
        self.state = projected.collapse(register, &outcome)?;
        Ok((outcome, p))
    }

    fn propagate(&mut self, atom: &str, kernel: &str) -> Result<(), ProtocolError>
    {
        let k = self.layout.kernel(kernel).ok_or_else(|| ProtocolError::UnknownKernel(kernel.to_owned()))?;
        self.require_at(atom, &k.source)?;
        let target = self.layout.screen(&k.target).expect("validated");
        let reg = Register::path(&path_register(atom), &target.slits)?;
        self.state = self.state.remap(&path_register(atom), reg, &k.matrix)?;
        self.atoms.get_mut(atom).expect("declared").location = Some(k.target.clone());
        Ok(())
    }

    fn inject(&mut self, cavity: &str, beta: Complex64) -> Result<(), ProtocolError>
    {
        if self.layout.cavity(cavity).is_none()
        {
            return Err(ProtocolError::UnknownCavity(cavity.to_owned()));
        }
        let n = self.state.register(cavity).ok_or_else(|| ProtocolError::MissingCavity(cavity.to_owned()))?.dim();
        let leak: DMatrix<Complex64> = gates::displacement_leak_map(beta, n);
        let spill = Register::mode(cavity, n)?;
        let loss = self.state.remap(cavity, spill, &leak)?.norm_sqr() / self.state.norm_sqr();
        if loss > NORM_LOSS_TOLERANCE
        {
            return Err(GateError::NormLoss { beta, truncation: n, loss }.into());
        }
        self.tail_mass = self.tail_mass.max(loss);
        let op = gates::displacement(beta, n)?.on(&[cavity])?;
        self.state = self.state.apply(&op)?;
        Ok(())
    }

    fn jc_pass(&mut self, atom: &str, cavity: &str, gt: f64) -> Result<(), ProtocolError>
    {
        self.require_kind(atom, AtomKind::Qubit2)?;
        if self.layout.cavity(cavity).is_none()
        {
            return Err(ProtocolError::UnknownCavity(cavity.to_owned()));
        }
        let internal = self.ensure_internal(atom)?;
        let n = self.state.register(cavity).ok_or_else(|| ProtocolError::MissingCavity(cavity.to_owned()))?.dim();
        let key = same_op_key(gt, n);
        if !self.jc.contains_key(&key)
        {
            self.jc.insert(key, gates::jc_unitary(gt, n)?);
        }
        let op = self.jc[&key].clone().on(&[internal.as_str(), cavity])?;
        self.state = self.state.apply(&op)?;
        Ok(())
    }

    /// Fidelity between the live state and the oracle ket for `id`.
    ///
    /// When the oracle covers every register the comparison is a full
    /// overlap; when it covers a strict subset the rest is traced out.
    pub fn checkpoint_fidelity(&self, id: CheckpointId) -> Result<f64, ProtocolError>
    {
        let expected = oracle::expected_state(id, &self.inputs)?;
        let mismatch = |reason: String| ProtocolError::CheckpointMismatch { id, reason };
        let names = self.state.register_names();
        let wanted = expected.register_names();
        for w in &wanted
        {
            let Some(mine) = self.state.register(w)
            else
            {
                return Err(mismatch(format!("register {w} not in the state")));
            };
            if mine != expected.register(w).expect("listed")
            {
                return Err(mismatch(format!("register {w} differs in labels or dimension")));
            }
        }
        if wanted.len() == names.len()
        {
            let aligned = expected.permuted(&names)?;
            Ok(fidelity(&self.state, &aligned)?)
        }
        else
        {
            Ok(reduced_fidelity(&self.state, &wanted, &expected)?)
        }
    }
}

/// Run every step in order. On failure the records gathered so far travel
/// with the error.
pub fn run_protocol(layout: &ExperimentLayout, steps: &[Step], inputs: &RunInputs, options: RunOptions)
    -> Result<RunReport, Box<RunFailure>>
{
    let mut engine = match Engine::new(layout, *inputs, options)
    {
        Ok(e) => e,
        Err(error) => {
            return Err(Box::new(RunFailure { error, report: RunReport::empty(*inputs, options.mode) }));
        }
    };
    for s in steps
    {
        if let Err(error) = engine.step(s)
        {
            return Err(Box::new(RunFailure { error, report: engine.report() }));
        }
    }
    Ok(engine.report())
}
