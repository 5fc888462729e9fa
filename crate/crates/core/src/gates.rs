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

//! Field states and atom-field operators on truncated Fock spaces.
//!
//! Operators come back bound to placeholder register names (`"mode"`,
//! `"internal"`, `"probe"`); use [`OperatorMatrix::on`] to bind them to the
//! registers of a concrete state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::fockspace::{OperatorMatrix, StateError};

/// Largest raw probability a coherent state may lose above the cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Largest norm a displaced state may lose to the truncation boundary.
pub const NORM_LOSS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError
{
    #[error("truncation {truncation} too small: tail mass {tail_mass:e} exceeds {TAIL_TOLERANCE:e}")]
    TruncationTooSmall { truncation: usize, tail_mass: f64 },
    #[error("displacement by {beta} at truncation {truncation} loses norm {loss:e}")]
    NormLoss { beta: Complex64, truncation: usize, loss: f64 },
    #[error("invalid truncation {0}")]
    InvalidTruncation(usize),
    #[error("odd cat state with zero amplitude is the zero vector")]
    ZeroState,
    #[error(transparent)]
    State(#[from] StateError),
}

/// Parity sector of a cat state, or sign of a parity projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign
{
    Plus,
    Minus,
}

impl Sign
{
    pub fn value(self) -> f64
    {
        match self
        {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Minimum Fock dimension for a field whose largest coherent amplitude has
/// mean photon number `mean_n`: `ceil(m + 10 sqrt(m + 1))`.
pub fn tail_bound(mean_n: f64) -> usize
{
    (mean_n + 10.0 * (mean_n + 1.0).sqrt()).ceil() as usize
}

/// Physical parameters of one atom-field interaction.
///
/// `phi = 2 g² τ / Δ` is the dispersive phase; `gt` the resonant
/// Jaynes-Cummings angle. Couplings, detunings and times are never needed
/// separately.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateParams
{
    pub phi: f64,
    pub alpha: Complex64,
    pub gt: f64,
    pub truncation: usize,
}

impl GateParams
{
    /// Whether `truncation` covers a field displaced by `alpha` out of a cat
    /// of amplitude `alpha`, i.e. mean photon number `|2 alpha|²`.
    pub fn satisfies_tail_bound(&self) -> bool
    {
        self.truncation >= tail_bound((2.0 * self.alpha).norm_sqr())
    }
}

/// Truncated coherent amplitudes together with the raw probability that fell
/// above the cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentAmplitudes
{
    pub amplitudes: Vec<Complex64>,
    pub tail_mass: f64,
}

fn log_modulus(alpha: Complex64, n: usize) -> f64
{
    // ln |α^n e^{-|α|²/2} / sqrt(n!)|
    let mut acc = -0.5 * alpha.norm_sqr();
    let ln_a = alpha.norm().ln();
    for k in 1..=n
    {
        acc += ln_a - 0.5 * (k as f64).ln();
    }
    acc
}

fn raw_coherent(alpha: Complex64, truncation: usize) -> Vec<Complex64>
{
    let mut out = vec![Complex64::new(0.0, 0.0); truncation];
    if alpha.norm() == 0.0
    {
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }
    let ln_a = alpha.norm().ln();
    let arg = alpha.arg();
    let mut lm = -0.5 * alpha.norm_sqr();
    for (n, c) in out.iter_mut().enumerate()
    {
        if n > 0
        {
            lm += ln_a - 0.5 * (n as f64).ln();
        }
        *c = Complex64::from_polar(lm.exp(), arg * n as f64);
    }
    out
}

fn coherent_tail(alpha: Complex64, truncation: usize) -> f64
{
    if alpha.norm() == 0.0
    {
        return 0.0;
    }
    let m = alpha.norm_sqr();
    let ln_a = alpha.norm().ln();
    let mut lm = log_modulus(alpha, truncation);
    let mut tail = 0.0;
    let mut n = truncation;
    loop
    {
        let term = (2.0 * lm).exp();
        tail += term;
        n += 1;
        if n as f64 > m + 1.0 && (term < 1e-40 || term < tail * 1e-18)
        {
            break;
        }
        lm += ln_a - 0.5 * (n as f64).ln();
    }
    tail
}

/// `C_n = e^{-|α|²/2} α^n / sqrt(n!)` for `n < truncation`, renormalized
/// over the truncated space.
pub fn coherent_amplitudes(alpha: Complex64, truncation: usize) -> Result<CoherentAmplitudes, GateError>
{
    if truncation == 0
    {
        return Err(GateError::InvalidTruncation(truncation));
    }
    let tail_mass = coherent_tail(alpha, truncation);
    if tail_mass > TAIL_TOLERANCE
    {
        return Err(GateError::TruncationTooSmall { truncation, tail_mass });
    }
    let mut amplitudes = raw_coherent(alpha, truncation);
    normalize(&mut amplitudes)?;
    Ok(CoherentAmplitudes { amplitudes, tail_mass })
}

fn normalize(v: &mut [Complex64]) -> Result<(), GateError>
{
    let n = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if !(n > 1e-300)
    {
        return Err(GateError::ZeroState);
    }
    v.iter_mut().for_each(|a| *a /= n);
    Ok(())
}

/// Normalized even (`Plus`) or odd (`Minus`) superposition `|α⟩ ± |-α⟩`.
pub fn cat_state(alpha: Complex64, sign: Sign, truncation: usize) -> Result<Vec<Complex64>, GateError>
{
    let plus = coherent_amplitudes(alpha, truncation)?.amplitudes;
    let minus = coherent_amplitudes(-alpha, truncation)?.amplitudes;
    let s = sign.value();
    let mut v: Vec<Complex64> = plus.iter().zip(&minus).map(|(a, b)| a + b * s).collect();
    // one parity sector vanishes identically
    let keep = if sign == Sign::Plus { 0 } else { 1 };
    v.iter_mut().enumerate().filter(|(n, _)| n % 2 != keep).for_each(|(_, a)| *a = Complex64::new(0.0, 0.0));
    if v.iter().map(Complex64::norm_sqr).sum::<f64>() < 1e-28
    {
        return Err(GateError::ZeroState);
    }
    normalize(&mut v)?;
    Ok(v)
}

/// Diagonal `e^{iφ a†a}`.
pub fn number_phase(phi: f64, truncation: usize) -> Vec<Complex64>
{
    (0..truncation).map(|n| Complex64::from_polar(1.0, phi * n as f64)).collect()
}

/// Photon-number parity `e^{iπ a†a} = (-1)^n`.
pub fn parity_phase(truncation: usize) -> Result<OperatorMatrix, GateError>
{
    if truncation == 0
    {
        return Err(GateError::InvalidTruncation(truncation));
    }
    let diag: Vec<Complex64> = (0..truncation)
        .map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    Ok(OperatorMatrix::new(&["mode"], &[truncation], m, true)?)
}

/// `Π± = (e^{iπ a†a} ± 1) / 2`.
pub fn pi_projector(sign: Sign, truncation: usize) -> Result<OperatorMatrix, GateError>
{
    if truncation == 0
    {
        return Err(GateError::InvalidTruncation(truncation));
    }
    let s = sign.value();
    let diag: Vec<Complex64> = (0..truncation)
        .map(|n| {
            let p = if n % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(0.5 * (p + s), 0.0)
        })
        .collect();
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    Ok(OperatorMatrix::new(&["mode"], &[truncation], m, false)?)
}

/// Far-detuned lambda atom in a cavity, on `internal ⊗ mode` with internal
/// order `(a, b, c)`:
///
/// `-e^{iφn}|a⟩⟨a| + ½(e^{iφn}+1)(|b⟩⟨b| + |c⟩⟨c|) + ½(e^{iφn}-1)(|b⟩⟨c| + |c⟩⟨b|)`.
pub fn dispersive_lambda(phi: f64, truncation: usize) -> Result<OperatorMatrix, GateError>
{
    if truncation == 0
    {
        return Err(GateError::InvalidTruncation(truncation));
    }
    let n = truncation;
    let mut m = DMatrix::<Complex64>::zeros(3 * n, 3 * n);
    let one = Complex64::new(1.0, 0.0);
    for (k, u) in number_phase(phi, n).into_iter().enumerate()
    {
        let (a, b, c) = (k, n + k, 2 * n + k);
        m[(a, a)] = -u;
        m[(b, b)] = 0.5 * (u + one);
        m[(c, c)] = 0.5 * (u + one);
        m[(b, c)] = 0.5 * (u - one);
        m[(c, b)] = 0.5 * (u - one);
    }
    Ok(OperatorMatrix::new(&["internal", "mode"], &[3, n], m, true)?)
}

fn displacement_matrix(beta: Complex64, truncation: usize) -> DMatrix<Complex64>
{
    // generator β a† - β* a on the truncated space
    let mut g = DMatrix::<Complex64>::zeros(truncation, truncation);
    for n in 1..truncation
    {
        let s = (n as f64).sqrt();
        g[(n, n - 1)] = beta * s;
        g[(n - 1, n)] = -beta.conj() * s;
    }
    g.exp()
}

/// `D(β) = exp(β a† - β* a)` as the exponential of the truncated generator.
pub fn displacement(beta: Complex64, truncation: usize) -> Result<OperatorMatrix, GateError>
{
    if truncation == 0
    {
        return Err(GateError::InvalidTruncation(truncation));
    }
    let m = displacement_matrix(beta, truncation);
    Ok(OperatorMatrix::new(&["mode"], &[truncation], m, true)?)
}

/// Block of `D(β)` computed in a space of size `2·truncation` that maps the
/// original levels onto the levels above the cutoff.
///
/// Applying it to a state and taking the squared norm gives the weight the
/// displacement would leak out of the truncated space.
pub fn displacement_leak_map(beta: Complex64, truncation: usize) -> DMatrix<Complex64>
{
    let big = displacement_matrix(beta, 2 * truncation);
    big.view((truncation, 0), (truncation, truncation)).into_owned()
}

/// Norm that `D(β)` would push above the cutoff when acting on the mode
/// vector `v`, estimated by displacing in a space twice as large.
pub fn displacement_norm_loss(beta: Complex64, v: &[Complex64]) -> f64
{
    let leak = displacement_leak_map(beta, v.len());
    let out = leak * nalgebra::DVector::from_column_slice(v);
    out.iter().map(Complex64::norm_sqr).sum()
}

/// Resonant Jaynes-Cummings evolution on `probe ⊗ mode`, probe order `(f, e)`.
///
/// `|f,n⟩ → cos(gt√n)|f,n⟩ - i sin(gt√n)|e,n-1⟩`; the top level
/// `|e, truncation-1⟩` has no partner inside the space and is left fixed.
pub fn jc_unitary(gt: f64, truncation: usize) -> Result<OperatorMatrix, GateError>
{
    if truncation < 2
    {
        return Err(GateError::InvalidTruncation(truncation));
    }
    let n = truncation;
    let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    let f = |k: usize| k;
    let e = |k: usize| n + k;
    m[(f(0), f(0))] = Complex64::new(1.0, 0.0);
    m[(e(n - 1), e(n - 1))] = Complex64::new(1.0, 0.0);
    for k in 1..n
    {
        let theta = gt * (k as f64).sqrt();
        let (s, c) = theta.sin_cos();
        m[(f(k), f(k))] = Complex64::new(c, 0.0);
        m[(e(k - 1), e(k - 1))] = Complex64::new(c, 0.0);
        m[(e(k - 1), f(k))] = Complex64::new(0.0, -s);
        m[(f(k), e(k - 1))] = Complex64::new(0.0, -s);
    }
    Ok(OperatorMatrix::new(&["probe", "mode"], &[2, n], m, true)?)
}
