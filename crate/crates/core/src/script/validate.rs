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

use super::{AtomState, CommandKind, Diagnostic, Program, ProtocolScript, Truncation};
use crate::gates::{coherent_amplitudes, tail_bound};
use crate::protocol::{
    AtomKind, AtomSpec, Binding, CavitySpec, DetectTarget, ExperimentLayout, InitialInternal,
    PropagationKernel, RunInputs, Screen, Step, KERNEL_NORM_SLACK,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decl
{
    Cavity,
    Atom,
    Screen,
    Kernel,
}

impl Decl
{
    fn noun(self) -> &'static str
    {
        match self
        {
            Decl::Cavity => "cavity",
            Decl::Atom => "atom",
            Decl::Screen => "screen",
            Decl::Kernel => "kernel",
        }
    }
}

struct Track
{
    kind: AtomKind,
    measured: bool,
    split: bool,
    location: Option<String>,
}

#[derive(Default)]
struct Checker
{
    names: HashMap<String, (Decl, usize)>,
    layout: ExperimentLayout,
    cavity_lines: HashMap<String, usize>,
    injected: HashMap<String, f64>,
    atoms: HashMap<String, Track>,
    steps: Vec<Step>,
}

type Check<T> = Result<T, String>;

impl Checker
{
    fn declare(&mut self, id: &str, what: Decl, line: usize) -> Check<()>
    {
        if let Some((d, l)) = self.names.get(id)
        {
            return Err(format!("{id} already declared as {} on line {l}", d.noun()));
        }
        self.names.insert(id.to_owned(), (what, line));
        Ok(())
    }

    fn require(&self, id: &str, what: Decl) -> Check<()>
    {
        match self.names.get(id)
        {
            Some((d, _)) if *d == what => Ok(()),
            Some((d, _)) => Err(format!("{id} is a {}, expected a {}", d.noun(), what.noun())),
            None => Err(format!("{} {id} used before declaration", what.noun())),
        }
    }

    fn screen(&self, id: &str) -> Check<&Screen>
    {
        self.require(id, Decl::Screen)?;
        Ok(self.layout.screen(id).expect("declared screens are stored"))
    }

    fn atom(&mut self, id: &str) -> Check<&mut Track>
    {
        self.require(id, Decl::Atom)?;
        Ok(self.atoms.get_mut(id).expect("declared atoms are tracked"))
    }

    fn live_internal(&mut self, id: &str) -> Check<AtomKind>
    {
        let t = self.atom(id)?;
        if t.measured
        {
            return Err(format!("internal state of {id} was already measured"));
        }
        Ok(t.kind)
    }

    fn command(&mut self, kind: &CommandKind, line: usize, inputs: &RunInputs) -> Check<()>
    {
        match kind
        {
            CommandKind::Config(_) => {}
            CommandKind::Cavity { id, alpha, truncation } =>
            {
                self.declare(id, Decl::Cavity, line)?;
                let n = match truncation
                {
                    Some(Truncation::Value(n)) => *n,
                    Some(Truncation::Param) | None => inputs.truncation,
                };
                if n < 2
                {
                    return Err(format!("cavity {id} needs truncation of at least 2, got {n}"));
                }
                self.cavity_lines.insert(id.clone(), line);
                self.layout.cavities.push(CavitySpec { name: id.clone(), alpha: alpha.resolve(inputs), truncation: n });
            }
            CommandKind::Atom { id, kind, state } =>
            {
                self.declare(id, Decl::Atom, line)?;
                let initial = match state
                {
                    AtomState::Input if *kind == AtomKind::Lambda3 => InitialInternal::Input,
                    AtomState::Input => return Err(format!("only lambda3 atoms take the input state, {id} is {kind}")),
                    AtomState::Label(l) =>
                    {
                        check_label(*kind, l)?;
                        InitialInternal::Label(l.clone())
                    }
                };
                self.atoms.insert(id.clone(), Track { kind: *kind, measured: false, split: false, location: None });
                self.layout.atoms.push(AtomSpec { name: id.clone(), kind: *kind, initial });
            }
            CommandKind::Screen { id, slits } =>
            {
                self.declare(id, Decl::Screen, line)?;
                for (i, s) in slits.iter().enumerate()
                {
                    if slits[..i].contains(s)
                    {
                        return Err(format!("screen {id} repeats slit {s}"));
                    }
                }
                self.layout.screens.push(Screen { name: id.clone(), slits: slits.clone() });
            }
            CommandKind::Bind { screen, slit, cavity } =>
            {
                if !self.screen(screen)?.slits.contains(slit)
                {
                    return Err(format!("screen {screen} has no slit {slit}"));
                }
                self.require(cavity, Decl::Cavity)?;
                for b in &self.layout.bindings
                {
                    if &b.screen == screen && &b.slit == slit
                    {
                        return Err(format!("slit {slit} of {screen} is already bound to {}", b.cavity));
                    }
                    if &b.screen == screen && &b.cavity == cavity
                    {
                        return Err(format!("cavity {cavity} is already bound to slit {} of {screen}", b.slit));
                    }
                }
                self.layout.bindings.push(Binding { screen: screen.clone(), slit: slit.clone(), cavity: cavity.clone() });
            }
            CommandKind::Kernel { id, from, to, matrix } =>
            {
                let (ns, nt) = (self.screen(from)?.slits.len(), self.screen(to)?.slits.len());
                self.declare(id, Decl::Kernel, line)?;
                if matrix.nrows() != nt || matrix.ncols() != ns
                {
                    return Err(format!("kernel {id} is {}x{}, {to}x{from} needs {nt}x{ns}",
                        matrix.nrows(), matrix.ncols()));
                }
                let k = PropagationKernel { name: id.clone(), source: from.clone(), target: to.clone(), matrix: matrix.clone() };
                if k.max_column_norm() > 1.0 + KERNEL_NORM_SLACK
                {
                    return Err(format!("kernel {id}: kernel column exceeds unit norm"));
                }
                self.layout.kernels.push(k);
            }
            CommandKind::Split { atom, screen } =>
            {
                let n = self.screen(screen)?.slits.len();
                if n != 2
                {
                    return Err(format!("screen {screen} has {n} slits, a split needs 2"));
                }
                let t = self.atom(atom)?;
                if t.split
                {
                    return Err(format!("atom {atom} is already split"));
                }
                t.split = true;
                t.location = Some(screen.clone());
                self.steps.push(Step::Split { atom: atom.clone(), screen: screen.clone() });
            }
            CommandKind::Pass { atom, screen, phi } =>
            {
                let slits = self.screen(screen)?.slits.clone();
                for s in &slits
                {
                    if self.layout.cavity_for(screen, s).is_none()
                    {
                        return Err(format!("slit {s} has no cavity"));
                    }
                }
                let kind = self.live_internal(atom)?;
                if kind != AtomKind::Lambda3
                {
                    return Err(format!("atom {atom} is {kind}, pass needs lambda3"));
                }
                if self.atom(atom)?.location.as_deref() != Some(screen.as_str())
                {
                    return Err(format!("atom {atom} is not at screen {screen}"));
                }
                self.steps.push(Step::Pass { atom: atom.clone(), screen: screen.clone(), phi: phi.resolve(inputs) });
            }
            CommandKind::Detect { atom, target, label } =>
            {
                match target
                {
                    DetectTarget::Internal =>
                    {
                        let kind = self.live_internal(atom)?;
                        check_label(kind, label)?;
                        self.atom(atom)?.measured = true;
                    }
                    DetectTarget::Position =>
                    {
                        let Some(at) = self.atom(atom)?.location.clone()
                        else
                        {
                            return Err(format!("atom {atom} has no position to detect"));
                        };
                        let slits = &self.screen(&at)?.slits;
                        if !slits.contains(label)
                        {
                            return Err(format!("unknown label {label} (valid: {})", slits.join(",")));
                        }
                        self.atom(atom)?.location = None;
                    }
                }
                self.steps.push(Step::Detect { atom: atom.clone(), target: *target, label: label.clone() });
            }
            CommandKind::Propagate { atom, kernel } =>
            {
                self.require(kernel, Decl::Kernel)?;
                let k = self.layout.kernel(kernel).expect("declared kernels are stored");
                let (from, to) = (k.source.clone(), k.target.clone());
                let t = self.atom(atom)?;
                if t.location.as_deref() != Some(from.as_str())
                {
                    return Err(format!("kernel {kernel} starts at {from}, atom {atom} is not there"));
                }
                t.location = Some(to);
                self.steps.push(Step::Propagate { atom: atom.clone(), kernel: kernel.clone() });
            }
            CommandKind::Inject { cavity, beta } =>
            {
                self.require(cavity, Decl::Cavity)?;
                let b = beta.resolve(inputs);
                *self.injected.entry(cavity.clone()).or_default() += b.norm();
                self.steps.push(Step::Inject { cavity: cavity.clone(), beta: b });
            }
            CommandKind::JcPass { atom, cavity, gt } =>
            {
                self.require(cavity, Decl::Cavity)?;
                let kind = self.live_internal(atom)?;
                if kind != AtomKind::Qubit2
                {
                    return Err(format!("atom {atom} is {kind}, jcpass needs qubit2"));
                }
                self.steps.push(Step::JcPass { atom: atom.clone(), cavity: cavity.clone(), gt: gt.resolve(inputs) });
            }
            CommandKind::Checkpoint(id) => self.steps.push(Step::Checkpoint(*id)),
        }
        Ok(())
    }
}

fn check_label(kind: AtomKind, label: &str) -> Check<()>
{
    if kind.labels().contains(&label)
    {
        Ok(())
    }
    else
    {
        Err(format!("unknown label {label} (valid: {})", kind.labels().join(",")))
    }
}

/// Check a parsed script against `inputs` and resolve it into a layout and
/// a step list.
///
/// Checks declaration before use, cavity bindings for every screen used in a
/// pass, kernel shapes and norms, atom kinds and labels, and truncations: a
/// cavity that receives injections must satisfy the tail bound for its
/// coherent amplitude plus everything injected, any other cavity only needs
/// its coherent tail below tolerance.
pub fn validate(script: &ProtocolScript, inputs: &RunInputs) -> Result<Program, Vec<Diagnostic>>
{
    let mut errors = Vec::new();
    let mut ck = Checker::default();
    for c in &script.commands
    {
        if let Err(message) = ck.command(&c.kind, c.line, inputs)
        {
            errors.push(Diagnostic { line: c.line, message });
        }
    }
    for cav in &ck.layout.cavities
    {
        let line = ck.cavity_lines[&cav.name];
        let Some(&pushed) = ck.injected.get(&cav.name)
        else
        {
            if let Err(e) = coherent_amplitudes(cav.alpha, cav.truncation)
            {
                errors.push(Diagnostic { line, message: format!("cavity {}: {e}", cav.name) });
            }
            continue;
        };
        let reach = cav.alpha.norm() + pushed;
        let mean = reach * reach;
        let need = tail_bound(mean);
        if cav.truncation < need
        {
            errors.push(Diagnostic {
                line,
                message: format!("cavity {}: truncation {} violates the tail bound {} for mean photon number {}",
                    cav.name, cav.truncation, need, mean),
            });
        }
    }
    if let Err(e) = inputs.check()
    {
        let line = script.commands.iter().rev()
            .find(|c| matches!(c.kind, CommandKind::Config(super::ConfigEntry::Cb(_) | super::ConfigEntry::Cc(_))))
            .map_or(0, |c| c.line);
        errors.push(Diagnostic { line, message: e.to_string() });
    }
    if errors.is_empty()
    {
        if let Err(e) = ck.layout.validate()
        {
            errors.push(Diagnostic { line: 0, message: e.to_string() });
        }
    }
    if errors.is_empty()
    {
        Ok(Program { layout: ck.layout, steps: ck.steps, inputs: *inputs })
    }
    else
    {
        errors.sort_by_key(|d| d.line);
        Err(errors)
    }
}
