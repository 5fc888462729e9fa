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

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{OperatorMatrix, Register, StateError, IMPOSSIBLE_OUTCOME};

pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-10;

/// Pure state over a tensor product of named registers.
///
/// Amplitudes are stored densely in row-major order: the last register varies
/// fastest. A state with no registers is a scalar with a single amplitude.
#[derive(Clone, Debug)]
pub struct CompositeState
{
    registers: Vec<Register>,
    amplitudes: Vec<Complex64>,
    norm_tolerance: f64,
}

/// Strides for row-major layout of `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize>
{
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev()
    {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Every offset reachable by varying the registers in `which` (mixed radix,
/// last listed varies fastest), starting from `start`.
fn offsets(dims: &[usize], strides: &[usize], which: &[usize], start: usize) -> Vec<usize>
{
    let mut out = vec![start];
    for &r in which
    {
        let mut next = Vec::with_capacity(out.len() * dims[r]);
        for &base in &out
        {
            for d in 0..dims[r]
            {
                next.push(base + d * strides[r]);
            }
        }
        out = next;
    }
    out
}

impl CompositeState
{
    /// The empty product: no registers, amplitude 1.
    pub fn scalar() -> Self
    {
        CompositeState {
            registers: Vec::new(),
            amplitudes: vec![Complex64::new(1.0, 0.0)],
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
        }
    }

    pub fn from_parts(registers: Vec<Register>, amplitudes: Vec<Complex64>) -> Result<Self, StateError>
    {
        for (i, r) in registers.iter().enumerate()
        {
            if registers[..i].iter().any(|o| o.name() == r.name())
            {
                return Err(StateError::DuplicateRegister(r.name().to_owned()));
            }
        }
        let total: usize = registers.iter().map(Register::dim).product();
        if amplitudes.len() != total
        {
            return Err(StateError::DimensionMismatch { expected: total, found: amplitudes.len() });
        }
        Ok(CompositeState { registers, amplitudes, norm_tolerance: DEFAULT_NORM_TOLERANCE })
    }

    /// Single-register state with the given amplitudes.
    pub fn single(register: Register, amplitudes: Vec<Complex64>) -> Result<Self, StateError>
    {
        Self::from_parts(vec![register], amplitudes)
    }

    /// Single-register basis state.
    pub fn basis(register: Register, label: &str) -> Result<Self, StateError>
    {
        let idx = register.require_index(label)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); register.dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Self::single(register, amps)
    }

    pub fn with_norm_tolerance(mut self, tol: f64) -> Self
    {
        self.norm_tolerance = tol;
        self
    }

    pub fn norm_tolerance(&self) -> f64
    {
        self.norm_tolerance
    }

    pub fn registers(&self) -> &[Register]
    {
        &self.registers
    }

    pub fn register_names(&self) -> Vec<&str>
    {
        self.registers.iter().map(Register::name).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64]
    {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64>
    {
        self.amplitudes
    }

    pub fn dims(&self) -> Vec<usize>
    {
        self.registers.iter().map(Register::dim).collect()
    }

    pub fn len(&self) -> usize
    {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool
    {
        self.amplitudes.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize>
    {
        self.registers.iter().position(|r| r.name() == name)
    }

    pub fn register(&self, name: &str) -> Option<&Register>
    {
        self.registers.iter().find(|r| r.name() == name)
    }

    fn require(&self, name: &str) -> Result<usize, StateError>
    {
        self.position(name).ok_or_else(|| StateError::UnknownRegister(name.to_owned()))
    }

    pub fn contains(&self, name: &str) -> bool
    {
        self.position(name).is_some()
    }

    pub fn norm_sqr(&self) -> f64
    {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64
    {
        self.norm_sqr().sqrt()
    }

    /// Whether the norm is within this state's tolerance of one.
    pub fn is_normalized(&self) -> bool
    {
        (self.norm() - 1.0).abs() < self.norm_tolerance
    }

    pub fn normalized(&self) -> Result<Self, StateError>
    {
        let n = self.norm();
        if !(n > 0.0)
        {
            return Err(StateError::ZeroState);
        }
        let mut out = self.clone();
        let inv = 1.0 / n;
        out.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> Self
    {
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a *= factor);
        out
    }

    /// Amplitude of the basis state given by one label per register, in
    /// register order.
    pub fn amplitude<S: AsRef<str>>(&self, labels: &[S]) -> Result<Complex64, StateError>
    {
        if labels.len() != self.registers.len()
        {
            return Err(StateError::DimensionMismatch {
                expected: self.registers.len(),
                found: labels.len(),
            });
        }
        let st = strides(&self.dims());
        let mut idx = 0;
        for (i, (r, l)) in self.registers.iter().zip(labels).enumerate()
        {
            idx += r.require_index(l.as_ref())? * st[i];
        }
        Ok(self.amplitudes[idx])
    }

    /// Tensor product `self ⊗ other`; `other`'s registers are appended.
    pub fn tensor(&self, other: &CompositeState) -> Result<Self, StateError>
    {
        if let Some(r) = other.registers.iter().find(|r| self.contains(r.name()))
        {
            return Err(StateError::DuplicateRegister(r.name().to_owned()));
        }
        let mut amps = Vec::with_capacity(self.len() * other.len());
        for a in &self.amplitudes
        {
            amps.extend(other.amplitudes.iter().map(|b| a * b));
        }
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        Ok(CompositeState { registers: regs, amplitudes: amps, norm_tolerance: self.norm_tolerance })
    }

    /// Elementwise `self + factor * other`; registers must agree exactly.
    pub fn add_scaled(&self, factor: Complex64, other: &CompositeState) -> Result<Self, StateError>
    {
        self.check_same_registers(other)?;
        let mut out = self.clone();
        out.amplitudes.iter_mut().zip(&other.amplitudes).for_each(|(a, b)| *a += factor * b);
        Ok(out)
    }

    pub(crate) fn check_same_registers(&self, other: &CompositeState) -> Result<(), StateError>
    {
        if self.registers != other.registers
        {
            return Err(StateError::RegisterMismatch(format!(
                "[{}] vs [{}]", self.register_names().join(","), other.register_names().join(","))));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CompositeState) -> Result<Complex64, StateError>
    {
        self.check_same_registers(other)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Apply `op` on its target registers, identity elsewhere.
    pub fn apply(&self, op: &OperatorMatrix) -> Result<Self, StateError>
    {
        self.apply_inner(op, None)
    }

    /// Apply `op` only on the subspace where `control` holds `label`.
    pub fn apply_controlled(&self, op: &OperatorMatrix, control: &str, label: &str)
        -> Result<Self, StateError>
    {
        let c = self.require(control)?;
        if op.targets().iter().any(|t| t == control)
        {
            return Err(StateError::RegisterMismatch(
                format!("control register {} is also a target", control)));
        }
        let l = self.registers[c].require_index(label)?;
        self.apply_inner(op, Some((c, l)))
    }

    fn apply_inner(&self, op: &OperatorMatrix, control: Option<(usize, usize)>) -> Result<Self, StateError>
    {
        let dims = self.dims();
        let mut targets = Vec::with_capacity(op.targets().len());
        for (t, &d) in op.targets().iter().zip(op.dims())
        {
            let pos = self.require(t)?;
            if targets.contains(&pos)
            {
                return Err(StateError::DuplicateRegister(t.clone()));
            }
            if dims[pos] != d
            {
                return Err(StateError::DimensionMismatch { expected: d, found: dims[pos] });
            }
            targets.push(pos);
        }
        let st = strides(&dims);
        let local = offsets(&dims, &st, &targets, 0);
        let rest: Vec<usize> = (0..dims.len())
            .filter(|i| !targets.contains(i) && control.map_or(true, |(c, _)| c != *i))
            .collect();
        let start = control.map_or(0, |(c, l)| l * st[c]);
        let bases = offsets(&dims, &st, &rest, start);
        let rows = op.sparse_rows();

        let mut out = self.amplitudes.clone();
        let mut buf = vec![Complex64::new(0.0, 0.0); local.len()];
        for &base in &bases
        {
            for (k, &off) in local.iter().enumerate()
            {
                buf[k] = self.amplitudes[base + off];
            }
            for (row, &off) in rows.iter().zip(&local)
            {
                out[base + off] = row.iter().map(|&(c, v)| v * buf[c]).sum();
            }
        }
        Ok(CompositeState { registers: self.registers.clone(), amplitudes: out, norm_tolerance: self.norm_tolerance })
    }

    /// Replace register `name` by `target`, mixing amplitudes with the
    /// rectangular `map[target_index][source_index]`. No renormalization.
    pub fn remap(&self, name: &str, target: Register, map: &DMatrix<Complex64>) -> Result<Self, StateError>
    {
        let pos = self.require(name)?;
        let old_dim = self.registers[pos].dim();
        if map.ncols() != old_dim || map.nrows() != target.dim()
        {
            return Err(StateError::DimensionMismatch {
                expected: old_dim * target.dim(),
                found: map.ncols() * map.nrows(),
            });
        }
        if self.registers.iter().enumerate().any(|(i, r)| i != pos && r.name() == target.name())
        {
            return Err(StateError::DuplicateRegister(target.name().to_owned()));
        }
        let old_dims = self.dims();
        let mut new_regs = self.registers.clone();
        new_regs[pos] = target;
        let new_dims: Vec<usize> = new_regs.iter().map(Register::dim).collect();
        let old_st = strides(&old_dims);
        let new_st = strides(&new_dims);
        let rest: Vec<usize> = (0..old_dims.len()).filter(|&i| i != pos).collect();
        let old_bases = offsets(&old_dims, &old_st, &rest, 0);
        let new_bases = offsets(&new_dims, &new_st, &rest, 0);

        let mut out = vec![Complex64::new(0.0, 0.0); new_dims.iter().product()];
        for (&ob, &nb) in old_bases.iter().zip(&new_bases)
        {
            for r in 0..map.nrows()
            {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..old_dim
                {
                    acc += map[(r, c)] * self.amplitudes[ob + c * old_st[pos]];
                }
                out[nb + r * new_st[pos]] = acc;
            }
        }
        Ok(CompositeState { registers: new_regs, amplitudes: out, norm_tolerance: self.norm_tolerance })
    }

    /// Absolute outcome weights `‖Π_l ψ‖²` for every label of a register.
    pub fn probabilities(&self, name: &str) -> Result<Vec<f64>, StateError>
    {
        let pos = self.require(name)?;
        let dims = self.dims();
        let st = strides(&dims);
        let mut probs = vec![0.0; dims[pos]];
        for (idx, a) in self.amplitudes.iter().enumerate()
        {
            probs[(idx / st[pos]) % dims[pos]] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Project register `name` onto `label`. Returns the renormalized branch
    /// and its absolute weight.
    pub fn project(&self, name: &str, label: &str) -> Result<(Self, f64), StateError>
    {
        let pos = self.require(name)?;
        let l = self.registers[pos].require_index(label)?;
        let dims = self.dims();
        let st = strides(&dims);
        let mut out = self.amplitudes.clone();
        let mut p = 0.0;
        for (idx, a) in out.iter_mut().enumerate()
        {
            if (idx / st[pos]) % dims[pos] == l
            {
                p += a.norm_sqr();
            }
            else
            {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if p < IMPOSSIBLE_OUTCOME
        {
            return Err(StateError::ImpossibleOutcome {
                register: name.to_owned(),
                label: label.to_owned(),
                probability: p,
            });
        }
        let inv = 1.0 / p.sqrt();
        out.iter_mut().for_each(|a| *a *= inv);
        Ok((CompositeState { registers: self.registers.clone(), amplitudes: out, norm_tolerance: self.norm_tolerance }, p))
    }

    /// Drop register `name`, keeping the slice where it holds `label`.
    ///
    /// After a projection onto `label` this is exact: the register is in a
    /// basis state and factors out.
    pub fn collapse(&self, name: &str, label: &str) -> Result<Self, StateError>
    {
        let pos = self.require(name)?;
        let l = self.registers[pos].require_index(label)?;
        let dims = self.dims();
        let st = strides(&dims);
        let rest: Vec<usize> = (0..dims.len()).filter(|&i| i != pos).collect();
        let amps = offsets(&dims, &st, &rest, l * st[pos]).into_iter()
            .map(|i| self.amplitudes[i])
            .collect();
        let mut regs = self.registers.clone();
        regs.remove(pos);
        Ok(CompositeState { registers: regs, amplitudes: amps, norm_tolerance: self.norm_tolerance })
    }

    /// Same state with registers reordered to `order` (a permutation of the
    /// current names).
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, StateError>
    {
        if order.len() != self.registers.len()
        {
            return Err(StateError::RegisterMismatch(format!(
                "permutation of {} names for {} registers", order.len(), self.registers.len())));
        }
        let mut perm = Vec::with_capacity(order.len());
        for name in order
        {
            let p = self.require(name.as_ref())?;
            if perm.contains(&p)
            {
                return Err(StateError::DuplicateRegister(name.as_ref().to_owned()));
            }
            perm.push(p);
        }
        let dims = self.dims();
        let st = strides(&dims);
        let amps = offsets(&dims, &st, &perm, 0).into_iter().map(|i| self.amplitudes[i]).collect();
        let regs = perm.iter().map(|&p| self.registers[p].clone()).collect();
        Ok(CompositeState { registers: regs, amplitudes: amps, norm_tolerance: self.norm_tolerance })
    }

    pub fn rename_register(&self, old: &str, new: &str) -> Result<Self, StateError>
    {
        let pos = self.require(old)?;
        if old != new && self.contains(new)
        {
            return Err(StateError::DuplicateRegister(new.to_owned()));
        }
        let mut out = self.clone();
        out.registers[pos] = out.registers[pos].renamed(new);
        Ok(out)
    }

    /// `⟨t|ρ_S|t⟩ / Tr ρ` for the reduced state on the registers `subset`.
    ///
    /// `target` must be a state over exactly `subset`, in that order.
    pub fn reduced_overlap(&self, target: &CompositeState) -> Result<f64, StateError>
    {
        if target.registers.is_empty()
        {
            return Err(StateError::RegisterMismatch("empty subset".to_owned()));
        }
        let dims = self.dims();
        let mut sub = Vec::with_capacity(target.registers.len());
        for r in &target.registers
        {
            let pos = self.require(r.name())?;
            if &self.registers[pos] != r
            {
                return Err(StateError::DimensionMismatch { expected: self.registers[pos].dim(), found: r.dim() });
            }
            if sub.contains(&pos)
            {
                return Err(StateError::DuplicateRegister(r.name().to_owned()));
            }
            sub.push(pos);
        }
        let st = strides(&dims);
        let local = offsets(&dims, &st, &sub, 0);
        let rest: Vec<usize> = (0..dims.len()).filter(|i| !sub.contains(i)).collect();
        let bases = offsets(&dims, &st, &rest, 0);
        let mut acc = 0.0;
        for &base in &bases
        {
            let ov: Complex64 = local.iter().zip(&target.amplitudes)
                .map(|(&off, t)| t.conj() * self.amplitudes[base + off])
                .sum();
            acc += ov.norm_sqr();
        }
        let norms = self.norm_sqr() * target.norm_sqr();
        if !(norms > 0.0)
        {
            return Err(StateError::ZeroState);
        }
        Ok((acc / norms).clamp(0.0, 1.0))
    }
}
