//! Quantum model of the liar-paradox sentence pairs.
//!
//! Three variants are modelled:
//!
//! * **A** (double liar): "(1) sentence 2 is false / (2) sentence 1 is true".
//!   Lives in `C^4 (x) C^4`; position 3 of a factor means *true*, position 4
//!   *false*, positions 1 and 2 carry no definite value.
//! * **B**: "(1) sentence 2 is true / (2) sentence 1 is true". Triplet-like
//!   state in `C^2 (x) C^2`.
//! * **C**: "(1) sentence 2 is false / (2) sentence 1 is false". Singlet state
//!   in `C^2 (x) C^2`.
//!
//! For B and C spin up `(1, 0)` is *true* and spin down `(0, 1)` is *false*.
//!
//! Each reasoning step applies `U(tau) = exp(-i H tau)`. For A, `H` generates
//! the 4-cycle `phi_1 -> phi_2 -> phi_3 -> phi_4 -> phi_1` of the
//! post-measurement states and annihilates the initial state. For C,
//! `H = pi/(2 tau) (1 - X (x) X)` so that `U(tau) = X (x) X`. For B, `H = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ImpossibleOutcome, MeasurementError, ValidationError};
use crate::quantum::{
    born_probability, c, collapse, tensor_operator, tensor_state, HermitianOperator, Operator, ProjectorOperator,
    StateVector, C64, DYNAMICAL_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LiarVariant {
    A,
    B,
    C,
}

impl FromStr for LiarVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(LiarVariant::A),
            "B" | "b" => Ok(LiarVariant::B),
            "C" | "c" => Ok(LiarVariant::C),
            other => Err(format!("unknown liar variant `{other}` (expected A, B or C)")),
        }
    }
}

impl fmt::Display for LiarVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sentence {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
}

impl Sentence {
    pub fn number(self) -> u8 {
        match self {
            Sentence::First => 1,
            Sentence::Second => 2,
        }
    }

    fn index(self) -> usize {
        self.number() as usize - 1
    }
}

/// Initial measurement: make `sentence` true (`value = true`) or false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementChoice {
    pub sentence: Sentence,
    pub value: bool,
}

impl fmt::Display for MeasurementChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sentence {} {}", self.sentence.number(), if self.value { "true" } else { "false" })
    }
}

impl FromStr for MeasurementChoice {
    type Err = String;

    /// Parses `"1:true"`, `"2:false"`, `"1:T"`, `"2:f"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("cannot parse `{s}` as sentence:value (e.g. 1:true)");
        let (sent, val) = s.split_once(':').ok_or_else(bad)?;
        let sentence = match sent.trim() {
            "1" => Sentence::First,
            "2" => Sentence::Second,
            _ => return Err(bad()),
        };
        let value = match val.trim().to_ascii_lowercase().as_str() {
            "true" | "t" => true,
            "false" | "f" => false,
            _ => return Err(bad()),
        };
        Ok(MeasurementChoice { sentence, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    Latent,
}

impl TruthValue {
    fn letter(self) -> char {
        match self {
            TruthValue::True => 'T',
            TruthValue::False => 'F',
            TruthValue::Latent => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthAssignment {
    pub sentence1: TruthValue,
    pub sentence2: TruthValue,
}

impl TruthAssignment {
    pub fn new(sentence1: TruthValue, sentence2: TruthValue) -> Self {
        TruthAssignment { sentence1, sentence2 }
    }

    /// `"TF"` when both sentences are definite, `"1T"` / `"2F"` when only one
    /// is, `"--"` when neither is.
    pub fn label(&self) -> String {
        use TruthValue::Latent;
        match (self.sentence1, self.sentence2) {
            (Latent, Latent) => "--".into(),
            (v, Latent) => format!("1{}", v.letter()),
            (Latent, v) => format!("2{}", v.letter()),
            (a, b) => format!("{}{}", a.letter(), b.letter()),
        }
    }

    pub fn definite_count(&self) -> usize {
        [self.sentence1, self.sentence2].iter().filter(|v| **v != TruthValue::Latent).count()
    }
}

impl fmt::Display for TruthAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub probability: f64,
    pub post: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub assignment: TruthAssignment,
    pub state: StateVector,
}

#[derive(Debug, Clone)]
pub struct LiarEntity {
    variant: LiarVariant,
    factor_dim: usize,
    psi0: StateVector,
    // indexed [sentence][0 = true, 1 = false]
    projectors: [[ProjectorOperator; 2]; 2],
    hamiltonian: HermitianOperator,
    step_time: f64,
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn product(dim: usize, i: usize, j: usize) -> StateVector {
    tensor_state(&StateVector::basis(dim, i), &StateVector::basis(dim, j)).expect("nonzero dims")
}

/// The four post-measurement states of variant A, in cycle order:
/// `e3 (x) e2`, `e2 (x) e4`, `e4 (x) e1`, `e1 (x) e3`.
pub fn double_liar_cycle() -> [StateVector; 4] {
    [product(4, 2, 1), product(4, 1, 3), product(4, 3, 0), product(4, 0, 2)]
}

fn factor_projectors(dim: usize, true_pos: usize, false_pos: usize) -> [[ProjectorOperator; 2]; 2] {
    let unit = |pos: usize| {
        let mut d = vec![0.0; dim];
        d[pos] = 1.0;
        Operator::diagonal(&d)
    };
    let id = Operator::identity(dim);
    let first = |pos| ProjectorOperator::new(tensor_operator(&unit(pos), &id)).expect("projector");
    let second = |pos| ProjectorOperator::new(tensor_operator(&id, &unit(pos))).expect("projector");
    [[first(true_pos), first(false_pos)], [second(true_pos), second(false_pos)]]
}

/// Hamiltonian whose propagator over one step maps `phi_k` to `phi_{k+1}`,
/// has eigenvalue 0 on their uniform superposition and vanishes on the
/// orthogonal complement of their span.
fn double_liar_hamiltonian(step_time: f64) -> HermitianOperator {
    let phis = double_liar_cycle();
    // W v_m = i^m v_m for v_m = 1/2 sum_k (-i)^{mk} phi_k; pick theta_m in
    // (-pi, pi] with exp(-i theta_m) = i^m
    let thetas = [0.0, -PI / 2.0, PI, PI / 2.0];
    let spectrum: Vec<(f64, StateVector)> = thetas
        .iter()
        .enumerate()
        .map(|(m, &theta)| {
            let mut amps = vec![c(0.0, 0.0); 16];
            for (k, phi) in phis.iter().enumerate() {
                let phase = C64::from_polar(0.5, -PI / 2.0 * (m * k) as f64);
                for (a, p) in amps.iter_mut().zip(phi.amplitudes()) {
                    *a += phase * p;
                }
            }
            (theta / step_time, StateVector::new(amps).expect("unit DFT vector"))
        })
        .collect();
    HermitianOperator::from_spectrum(&spectrum).expect("Hermitian by construction")
}

/// `pi/(2 tau) (1 - X (x) X)`
fn singlet_hamiltonian(step_time: f64) -> HermitianOperator {
    let x = Operator::from_rows(2, &real(&[0.0, 1.0, 1.0, 0.0])).expect("2x2");
    let xx = tensor_operator(&x, &x);
    let gen = Operator::identity(4).sub(&xx).expect("same dims");
    let scaled = Operator::from_matrix(gen.matrix() * c(PI / (2.0 * step_time), 0.0)).expect("square");
    HermitianOperator::new(scaled).expect("Hermitian")
}

impl LiarEntity {
    /// Builds a variant with unit reasoning-step duration.
    pub fn build(variant: LiarVariant) -> Self {
        Self::with_step_time(variant, 1.0)
    }

    pub fn with_step_time(variant: LiarVariant, step_time: f64) -> Self {
        assert!(step_time > 0.0 && step_time.is_finite(), "step time must be positive");
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match variant {
            LiarVariant::A => {
                let amps = double_liar_cycle().iter().fold(vec![c(0.0, 0.0); 16], |mut acc, phi| {
                    for (a, p) in acc.iter_mut().zip(phi.amplitudes()) {
                        *a += p * 0.5;
                    }
                    acc
                });
                LiarEntity {
                    variant,
                    factor_dim: 4,
                    psi0: StateVector::new(amps).expect("normalized"),
                    projectors: factor_projectors(4, 2, 3),
                    hamiltonian: double_liar_hamiltonian(step_time),
                    step_time,
                }
            }
            LiarVariant::B => LiarEntity {
                variant,
                factor_dim: 2,
                psi0: StateVector::from_real(&[h, 0.0, 0.0, h]).expect("normalized"),
                projectors: factor_projectors(2, 0, 1),
                hamiltonian: HermitianOperator::zero(4),
                step_time,
            },
            LiarVariant::C => LiarEntity {
                variant,
                factor_dim: 2,
                psi0: StateVector::from_real(&[0.0, h, -h, 0.0]).expect("normalized"),
                projectors: factor_projectors(2, 0, 1),
                hamiltonian: singlet_hamiltonian(step_time),
                step_time,
            },
        }
    }

    pub fn variant(&self) -> LiarVariant {
        self.variant
    }

    /// Dimension of the full space (16 for A, 4 for B and C).
    pub fn space_dim(&self) -> usize {
        self.factor_dim * self.factor_dim
    }

    pub fn psi0(&self) -> &StateVector {
        &self.psi0
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn step_time(&self) -> f64 {
        self.step_time
    }

    pub fn projector(&self, sentence: Sentence, value: bool) -> &ProjectorOperator {
        &self.projectors[sentence.index()][usize::from(!value)]
    }

    /// Born probability of `choice` on `state`, and the collapsed state.
    pub fn measure(&self, state: &StateVector, choice: MeasurementChoice) -> Result<Measurement, MeasurementError> {
        let p = self.projector(choice.sentence, choice.value);
        let probability = born_probability(p, state)?;
        let post = collapse(p, state).map_err(|e| match e {
            MeasurementError::Impossible(_) => ImpossibleOutcome { outcome: choice.to_string(), probability }.into(),
            other => other,
        })?;
        Ok(Measurement { probability, post })
    }

    /// Measures the initial superposition.
    pub fn measure_initial(&self, choice: MeasurementChoice) -> Result<Measurement, MeasurementError> {
        self.measure(&self.psi0, choice)
    }

    /// One step of reasoning time: `U(tau) state`.
    pub fn reasoning_step(&self, state: &StateVector) -> Result<StateVector, ValidationError> {
        self.hamiltonian.evolve(self.step_time, state)
    }

    /// A sentence is True (False) when its true (false) projector fires with
    /// probability 1 within `1e-10`; otherwise it is Latent.
    pub fn assignment_of(&self, state: &StateVector) -> Result<TruthAssignment, ValidationError> {
        let mut values = [TruthValue::Latent; 2];
        for (sentence, slot) in [Sentence::First, Sentence::Second].into_iter().zip(values.iter_mut()) {
            if born_probability(self.projector(sentence, true), state)? >= 1.0 - DYNAMICAL_TOL {
                *slot = TruthValue::True;
            } else if born_probability(self.projector(sentence, false), state)? >= 1.0 - DYNAMICAL_TOL {
                *slot = TruthValue::False;
            }
        }
        Ok(TruthAssignment::new(values[0], values[1]))
    }

    /// Collapses the initial state on `start`, then applies `steps` reasoning
    /// steps, recording every intermediate state.
    pub fn truth_trace(
        &self,
        start: MeasurementChoice,
        steps: usize,
    ) -> Result<(f64, Vec<TraceStep>), MeasurementError> {
        let Measurement { probability, post } = self.measure_initial(start)?;
        let mut trace = Vec::with_capacity(steps + 1);
        let mut state = post;
        for step in 0..=steps {
            if step > 0 {
                state = self.reasoning_step(&state)?;
            }
            trace.push(TraceStep { step, assignment: self.assignment_of(&state)?, state: state.clone() });
        }
        Ok((probability, trace))
    }

    pub fn truth_cycle(
        &self,
        start: MeasurementChoice,
        steps: usize,
    ) -> Result<Vec<TruthAssignment>, MeasurementError> {
        Ok(self.truth_trace(start, steps)?.1.into_iter().map(|s| s.assignment).collect())
    }
}

pub fn build_entity(variant: LiarVariant) -> LiarEntity {
    LiarEntity::build(variant)
}
