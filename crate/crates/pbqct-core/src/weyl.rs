//! Weyl-Heisenberg operators, generalized Bell states, and resource states.
//!
//! Conventions, fixed once and used everywhere: the shift operator is
//! `P = sum_j |j><j+1 mod D|` (so `P|j> = |j-1 mod D>`), the clock operator is
//! `Q = sum_j w^j |j><j|` with `w = exp(2 pi i / D)`, and
//! `W(p,q) = P^p Q^q` (first index shift, second index phase). Generalized
//! Bell states are `|Psi(p,q)> = (W(p,q) x I)|Psi(0,0)>`.

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, StateVector, DIM_CAP};
use crate::C64;
use std::f64::consts::TAU;

/// Label `(p, q)` of a Weyl operator / generalized Bell state in dimension `d`:
/// `p` powers the shift, `q` the clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    pub shift: usize,
    pub phase: usize,
    pub dim: usize,
}

impl WeylIndex {
    pub fn new(dim: usize, shift: usize, phase: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::domain(format!("dimension {dim} must be at least 2")));
        }
        if shift >= dim || phase >= dim {
            return Err(Error::usage(format!(
                "index ({shift},{phase}) out of range for dimension {dim}"
            )));
        }
        Ok(WeylIndex { shift, phase, dim })
    }
}

fn check_qudit_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain(format!("dimension {d} must be at least 2")));
    }
    Ok(())
}

fn omega(d: usize, k: usize) -> C64 {
    let angle = TAU * (k % d) as f64 / d as f64;
    C64::new(angle.cos(), angle.sin())
}

/// Shift operator `P|j> = |j-1 mod D>`.
pub fn shift_op(d: usize) -> Result<DenseOperator> {
    check_qudit_dim(d)?;
    let mut op = DenseOperator::zeros(d);
    for j in 0..d {
        op.set_entry(j, (j + 1) % d, C64::ONE);
    }
    Ok(op)
}

/// Clock operator `Q|j> = w^j |j>`.
pub fn clock_op(d: usize) -> Result<DenseOperator> {
    check_qudit_dim(d)?;
    let mut op = DenseOperator::zeros(d);
    for j in 0..d {
        op.set_entry(j, j, omega(d, j));
    }
    Ok(op)
}

/// `W(p,q) = P^p Q^q`, built entrywise: `W|j> = w^(j q) |j - p mod D>`.
pub fn weyl_op(idx: WeylIndex) -> DenseOperator {
    let d = idx.dim;
    let mut op = DenseOperator::zeros(d);
    for j in 0..d {
        let row = (j + d - idx.shift) % d;
        op.set_entry(row, j, omega(d, (j * idx.phase) % d));
    }
    op
}

/// Maximally entangled pair `|Psi(0,0)> = D^(-1/2) sum_j |j>|j>`.
pub fn max_entangled_state(d: usize) -> Result<StateVector> {
    check_qudit_dim(d)?;
    let inv = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::ZERO; d * d];
    for j in 0..d {
        amps[j * d + j] = C64::new(inv, 0.0);
    }
    StateVector::unit(amps, Some(vec![d, d]))
}

/// Generalized Bell state `|Psi(p,q)> = (W(p,q) x I)|Psi(0,0)>`. The D^2 of
/// them form an orthonormal basis of the pair space.
pub fn bell_state(idx: WeylIndex) -> StateVector {
    let d = idx.dim;
    let inv = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::ZERO; d * d];
    for j in 0..d {
        let row = (j + d - idx.shift) % d;
        amps[row * d + j] = omega(d, (j * idx.phase) % d) * inv;
    }
    StateVector::unit(amps, Some(vec![d, d])).expect("bell states are normalized")
}

/// Qubit Bell label `s` in {0, 1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellLabel(pub u8);

impl BellLabel {
    pub fn new(s: u8) -> Result<Self> {
        if s > 3 {
            return Err(Error::usage(format!("bell label {s} out of range 0..=3")));
        }
        Ok(BellLabel(s))
    }

    /// The Weyl label whose projector equals this Bell projector:
    /// 0 -> (0,0) identity, 1 -> (1,0) `X`, 2 -> (1,1) `XZ`, 3 -> (0,1) `Z`.
    pub fn weyl_index(self) -> WeylIndex {
        let (shift, phase) = match self.0 {
            0 => (0, 0),
            1 => (1, 0),
            2 => (1, 1),
            _ => (0, 1),
        };
        WeylIndex {
            shift,
            phase,
            dim: 2,
        }
    }
}

/// The four qubit Bell states, including the conventional `-i` global phase on
/// `Psi^2` (the singlet); all downstream math uses projectors so the phase is
/// inert.
pub fn qubit_bell(label: BellLabel) -> StateVector {
    let inv = 1.0 / 2.0f64.sqrt();
    let c = |re: f64, im: f64| C64::new(re, im);
    let amps = match label.0 {
        0 => vec![c(inv, 0.0), C64::ZERO, C64::ZERO, c(inv, 0.0)],
        1 => vec![C64::ZERO, c(inv, 0.0), c(inv, 0.0), C64::ZERO],
        2 => vec![C64::ZERO, c(0.0, -inv), c(0.0, inv), C64::ZERO],
        _ => vec![c(inv, 0.0), C64::ZERO, C64::ZERO, c(-inv, 0.0)],
    };
    StateVector::unit(amps, Some(vec![2, 2])).expect("bell states are normalized")
}

/// Single-qubit Pauli `sigma_s` (`sigma_0 = I`).
pub fn pauli(s: u8) -> DenseOperator {
    let c = |re: f64, im: f64| C64::new(re, im);
    let data = match s {
        0 => vec![C64::ONE, C64::ZERO, C64::ZERO, C64::ONE],
        1 => vec![C64::ZERO, C64::ONE, C64::ONE, C64::ZERO],
        2 => vec![C64::ZERO, c(0.0, -1.0), c(0.0, 1.0), C64::ZERO],
        _ => vec![C64::ONE, C64::ZERO, C64::ZERO, c(-1.0, 0.0)],
    };
    DenseOperator::from_rows(2, data).expect("2x2")
}

/// `N` maximally entangled pairs, factors ordered `A_1..A_N, B_1..B_N`:
/// `D^(-N/2) sum over j-vectors of |j_1..j_N>|j_1..j_N>`.
pub fn resource_state(d: usize, n_ports: usize) -> Result<StateVector> {
    check_qudit_dim(d)?;
    if n_ports == 0 {
        return Err(Error::usage("port count must be at least 1"));
    }
    let half = d
        .checked_pow(n_ports as u32)
        .filter(|&h| h <= DIM_CAP)
        .ok_or(Error::Capacity {
            required: usize::MAX,
            cap: DIM_CAP,
        })?;
    let dim = half
        .checked_mul(half)
        .filter(|&x| x <= DIM_CAP)
        .ok_or(Error::Capacity {
            required: usize::MAX,
            cap: DIM_CAP,
        })?;
    let inv = 1.0 / (half as f64).sqrt();
    let mut amps = vec![C64::ZERO; dim];
    for j in 0..half {
        amps[j * half + j] = C64::new(inv, 0.0);
    }
    StateVector::unit(amps, Some(vec![d; 2 * n_ports]))
}
