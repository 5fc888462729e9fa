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

//! Registers, composite pure states and the operations every other module is
//! built on: operator application, projective measurement and fidelities.
//!
//! A [`CompositeState`] is a dense amplitude vector over the tensor product of
//! its registers, laid out row-major with the last register varying fastest.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

mod operator;
mod register;
mod state;

pub use operator::{OperatorMatrix, UNITARITY_TOLERANCE};
pub use register::{Register, RegisterKind, LAMBDA3_LABELS, QUBIT2_LABELS};
pub use state::{CompositeState, DEFAULT_NORM_TOLERANCE};

/// Branch weights below this are treated as outcomes that cannot occur.
pub const IMPOSSIBLE_OUTCOME: f64 = 1e-14;

/// Allowed deviation of a user-supplied amplitude vector from unit norm.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError
{
    #[error("unknown label {label} for register {register} (valid: {valid})")]
    UnknownLabel { register: String, label: String, valid: String },
    #[error("unknown register {0}")]
    UnknownRegister(String),
    #[error("duplicate register {0}")]
    DuplicateRegister(String),
    #[error("register {0} has no assignment")]
    MissingAssignment(String),
    #[error("amplitudes for register {register} have norm {norm}, expected 1")]
    Unnormalized { register: String, norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid register: {0}")]
    InvalidRegister(String),
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    #[error("outcome {label} on {register} is impossible (probability {probability:e})")]
    ImpossibleOutcome { register: String, label: String, probability: f64 },
    #[error("operator flagged unitary deviates by {0:e}")]
    NotUnitary(f64),
    #[error("state has zero norm")]
    ZeroState,
}

/// Initial value of one register in [`make_state`].
#[derive(Clone, Debug, PartialEq)]
pub enum Assignment
{
    Label(String),
    Amplitudes(Vec<Complex64>),
}

impl From<&str> for Assignment
{
    fn from(label: &str) -> Self
    {
        Assignment::Label(label.to_owned())
    }
}

impl From<Vec<Complex64>> for Assignment
{
    fn from(amps: Vec<Complex64>) -> Self
    {
        Assignment::Amplitudes(amps)
    }
}

/// Product state with every register assigned a basis label or a normalized
/// amplitude vector.
pub fn make_state(registers: Vec<Register>, assignment: &HashMap<String, Assignment>)
    -> Result<CompositeState, StateError>
{
    let mut state = CompositeState::scalar();
    for reg in registers
    {
        let factor = match assignment.get(reg.name())
        {
            None => return Err(StateError::MissingAssignment(reg.name().to_owned())),
            Some(Assignment::Label(l)) => CompositeState::basis(reg, l)?,
            Some(Assignment::Amplitudes(a)) =>
            {
                if a.len() != reg.dim()
                {
                    return Err(StateError::DimensionMismatch { expected: reg.dim(), found: a.len() });
                }
                let norm = a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > INPUT_NORM_TOLERANCE
                {
                    return Err(StateError::Unnormalized { register: reg.name().to_owned(), norm });
                }
                CompositeState::single(reg, a.clone())?
            }
        };
        state = state.tensor(&factor)?;
    }
    Ok(state)
}

/// Contract `op` into `state` on its target registers.
pub fn apply_op(state: &CompositeState, op: &OperatorMatrix) -> Result<CompositeState, StateError>
{
    state.apply(op)
}

/// Projective measurement of `register` with post-selection on `label`.
pub fn project(state: &CompositeState, register: &str, label: &str)
    -> Result<(CompositeState, f64), StateError>
{
    state.project(register, label)
}

/// `|⟨a|b⟩|²` for states over identical register lists, insensitive to
/// global phase and normalization.
pub fn fidelity(a: &CompositeState, b: &CompositeState) -> Result<f64, StateError>
{
    let ov = a.inner(b)?;
    let norms = a.norm_sqr() * b.norm_sqr();
    if !(norms > 0.0)
    {
        return Err(StateError::ZeroState);
    }
    Ok((ov.norm_sqr() / norms).clamp(0.0, 1.0))
}

/// `⟨target|ρ|target⟩` where `ρ` is `state` traced down to `subset`.
pub fn reduced_fidelity<S: AsRef<str>>(state: &CompositeState, subset: &[S], target: &CompositeState)
    -> Result<f64, StateError>
{
    if subset.is_empty()
    {
        return Err(StateError::RegisterMismatch("empty subset".to_owned()));
    }
    let names = target.register_names();
    if names.len() != subset.len() || names.iter().zip(subset).any(|(a, b)| *a != b.as_ref())
    {
        return Err(StateError::RegisterMismatch(format!(
            "target registers [{}] do not match subset", names.join(","))));
    }
    let tn = target.norm();
    if (tn - 1.0).abs() > INPUT_NORM_TOLERANCE
    {
        return Err(StateError::Unnormalized { register: names.join(","), norm: tn });
    }
    state.reduced_overlap(target)
}

#[cfg(test)]
mod tests
{
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64
    {
        Complex64::new(re, im)
    }

    fn random_unitary(dim: usize, seed: &[f64]) -> DMatrix<Complex64>
    {
        // exp(iH) for a Hermitian H built from the seed values
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        let mut k = 0;
        for i in 0..dim
        {
            for j in i..dim
            {
                let re = seed[k % seed.len()];
                let im = if i == j { 0.0 } else { seed[(k + 1) % seed.len()] };
                h[(i, j)] = c(re, im);
                h[(j, i)] = c(re, -im);
                k += 2;
            }
        }
        (h * c(0.0, 1.0)).exp()
    }

    fn random_state(regs: &[Register], vals: &[f64]) -> CompositeState
    {
        let n: usize = regs.iter().map(Register::dim).product();
        let amps: Vec<Complex64> = (0..n).map(|i| c(vals[(2 * i) % vals.len()] + 0.1 * i as f64,
            vals[(2 * i + 1) % vals.len()])).collect();
        CompositeState::from_parts(regs.to_vec(), amps).unwrap().normalized().unwrap()
    }

    fn regs() -> Vec<Register>
    {
        vec![Register::path("p", &["z1", "z2"]).unwrap(), Register::lambda3("i"), Register::mode("m", 4).unwrap()]
    }

    #[test]
    fn make_state_basis_assignment()
    {
        let mut asg = HashMap::new();
        asg.insert("A1".to_string(), Assignment::from("b"));
        let s = make_state(vec![Register::lambda3("A1")], &asg).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn make_state_vacuum_and_split()
    {
        let mut asg = HashMap::new();
        asg.insert("C1".to_string(), Assignment::from(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        asg.insert("A1".to_string(), Assignment::from(vec![c(h, 0.0), c(h, 0.0)]));
        let s = make_state(vec![Register::path("A1", &["z11", "z12"]).unwrap(), Register::mode("C1", 4).unwrap()],
            &asg).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_eq!(s.amplitude(&["z12", "0"]).unwrap(), c(h, 0.0));
        assert_eq!(s.amplitude(&["z12", "1"]).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn make_state_errors()
    {
        let mut asg = HashMap::new();
        asg.insert("A1".to_string(), Assignment::from("q"));
        assert!(matches!(make_state(vec![Register::lambda3("A1")], &asg),
            Err(StateError::UnknownLabel { .. })));
        asg.insert("A1".to_string(), Assignment::from(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(matches!(make_state(vec![Register::lambda3("A1")], &asg),
            Err(StateError::Unnormalized { .. })));
        asg.insert("A1".to_string(), Assignment::from("a"));
        assert!(matches!(make_state(vec![Register::lambda3("A1"), Register::lambda3("A1")], &asg),
            Err(StateError::DuplicateRegister(_))));
        assert!(matches!(make_state(vec![Register::lambda3("A2")], &asg),
            Err(StateError::MissingAssignment(_))));
    }

    #[test]
    fn identity_op_is_a_no_op()
    {
        let s = random_state(&regs(), &[0.3, -0.2, 0.9, 0.4, -0.7]);
        let op = OperatorMatrix::new(&["i", "m"], &[3, 4], DMatrix::identity(12, 12), true).unwrap();
        let t = apply_op(&s, &op).unwrap();
        assert_eq!(s.amplitudes(), t.amplitudes());
    }

    #[test]
    fn apply_op_errors()
    {
        let s = random_state(&regs(), &[0.3, 0.1]);
        let op = OperatorMatrix::new(&["q"], &[3], DMatrix::identity(3, 3), true).unwrap();
        assert!(matches!(apply_op(&s, &op), Err(StateError::UnknownRegister(_))));
        let op = OperatorMatrix::new(&["m"], &[3], DMatrix::identity(3, 3), true).unwrap();
        assert!(matches!(apply_op(&s, &op), Err(StateError::DimensionMismatch { .. })));
    }

    #[test]
    fn projection_on_eigenstate_and_orthogonal_state()
    {
        let s = CompositeState::basis(Register::lambda3("A"), "b").unwrap();
        let (t, p) = project(&s, "A", "b").unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(t.amplitudes(), s.amplitudes());
        assert!(matches!(project(&s, "A", "c"), Err(StateError::ImpossibleOutcome { .. })));
    }

    #[test]
    fn fidelity_basics()
    {
        let s = random_state(&regs(), &[0.5, -0.1, 0.3]);
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-14);
        let phased = s.scaled(Complex64::from_polar(1.0, 1.234));
        assert!((fidelity(&s, &phased).unwrap() - 1.0).abs() < 1e-14);
        let other = CompositeState::basis(Register::lambda3("i"), "a").unwrap();
        assert!(fidelity(&s, &other).is_err());
    }

    #[test]
    fn reduced_fidelity_of_product_component()
    {
        let x = CompositeState::single(Register::path("x", &["0", "1"]).unwrap(), vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let y = CompositeState::basis(Register::lambda3("y"), "c").unwrap();
        let s = x.tensor(&y).unwrap();
        assert!((reduced_fidelity(&s, &["x"], &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((reduced_fidelity(&s, &["y"], &y).unwrap() - 1.0).abs() < 1e-15);
        assert!(reduced_fidelity::<&str>(&s, &[], &x).is_err());
        assert!(reduced_fidelity(&s, &["y"], &x).is_err());
    }

    proptest! {
        #[test]
        fn unitaries_preserve_norm(seed in prop::collection::vec(-1.0f64..1.0, 8..20),
                                   svals in prop::collection::vec(-1.0f64..1.0, 5..30))
        {
            let s = random_state(&regs(), &svals);
            let u = OperatorMatrix::new(&["m", "p"], &[4, 2], random_unitary(8, &seed), true).unwrap();
            let t = apply_op(&s, &u).unwrap();
            prop_assert!((t.norm() - s.norm()).abs() < 1e-12);
        }

        #[test]
        fn projection_is_complete(svals in prop::collection::vec(-1.0f64..1.0, 5..30))
        {
            let s = random_state(&regs(), &svals);
            for name in ["p", "i", "m"]
            {
                let reg = s.register(name).unwrap().clone();
                let total: f64 = reg.labels().iter()
                    .map(|l| project(&s, name, l).map(|(_, p)| p).unwrap_or(0.0))
                    .sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn disjoint_ops_commute(s1 in prop::collection::vec(-1.0f64..1.0, 8..16),
                                s2 in prop::collection::vec(-1.0f64..1.0, 8..16),
                                svals in prop::collection::vec(-1.0f64..1.0, 5..30))
        {
            let s = random_state(&regs(), &svals);
            let u = OperatorMatrix::new(&["m"], &[4], random_unitary(4, &s1), true).unwrap();
            let v = OperatorMatrix::new(&["p", "i"], &[2, 3], random_unitary(6, &s2), true).unwrap();
            let a = apply_op(&apply_op(&s, &u).unwrap(), &v).unwrap();
            let b = apply_op(&apply_op(&s, &v).unwrap(), &u).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes())
            {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn fidelity_is_symmetric(v1 in prop::collection::vec(-1.0f64..1.0, 5..30),
                                 v2 in prop::collection::vec(-1.0f64..1.0, 5..30))
        {
            let a = random_state(&regs(), &v1);
            let b = random_state(&regs(), &v2);
            let ab = fidelity(&a, &b).unwrap();
            let ba = fidelity(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-15);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn permutation_round_trips(svals in prop::collection::vec(-1.0f64..1.0, 5..30))
        {
            let s = random_state(&regs(), &svals);
            let p = s.permuted(&["m", "p", "i"]).unwrap().permuted(&["p", "i", "m"]).unwrap();
            prop_assert_eq!(p.amplitudes(), s.amplitudes());
        }
    }
}
