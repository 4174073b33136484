//! Momentum lattice `(2 pi / L) {-K..K}^3` with shells grouped by `|n|^2`.

use crate::params::Model;
use crate::scalar::{bose, Real};

/// Lattice of a cubic box, stored as a histogram of `|n|^2` so each Bose sum
/// costs one exponential per distinct shell.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumLattice<T> {
    side: T,
    cutoff: usize,
    /// `(2 pi / L)^2 / 2m`.
    unit: T,
    /// `(|n|^2, multiplicity)` for every occupied nonzero shell.
    shells: Vec<(u64, T)>,
    /// Axis index of the lattice point standing in for the recoil momentum.
    q_index: u64,
}

impl<T: Real> MomentumLattice<T> {
    pub fn new(side: T, cutoff: usize, mass: T, q: T) -> Self {
        let k = cutoff as i64;
        let max_s = 3 * (k * k) as usize;
        let mut counts = vec![0u64; max_s + 1];
        // count the octant n >= 0 with sign multiplicities
        let mult = |n: i64| if n == 0 { 1u64 } else { 2u64 };
        for a in 0..=k {
            for b in 0..=k {
                let s2 = (a * a + b * b) as usize;
                let w2 = mult(a) * mult(b);
                for c in 0..=k {
                    counts[s2 + (c * c) as usize] += w2 * mult(c);
                }
            }
        }
        let shells = counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &n)| n > 0)
            .map(|(s, &n)| (s as u64, T::lit(n as f64)))
            .collect();
        let step = T::lit(2.0) * T::PI() / side;
        let nq = (q / step).round().to_u64().unwrap_or(1).clamp(1, cutoff.max(1) as u64);
        Self {
            side,
            cutoff,
            unit: step * step / (T::lit(2.0) * mass),
            shells,
            q_index: nq,
        }
    }

    pub fn side(&self) -> T {
        self.side
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn volume(&self) -> T {
        self.side * self.side * self.side
    }

    /// Kinetic energy of the lattice point that replaces `q`.
    pub fn q_energy(&self) -> T {
        let n = T::lit(self.q_index as f64);
        self.unit * n * n
    }

    pub fn q_index(&self) -> u64 {
        self.q_index
    }

    /// `sum_{k != 0} 1 / (e^{beta (eps(k) + delta)} - 1)` over the box.
    pub fn nonzero_sum(&self, beta: T, delta: T) -> T {
        // largest shells first keeps the small terms from being swamped
        self.shells
            .iter()
            .rev()
            .fold(T::zero(), |acc, &(s, n)| acc + n * bose(beta * (self.unit * T::lit(s as f64) + delta)))
    }

    /// Lattice sums over the non-special modes: both species for Raman
    /// (`k != 0` and `k != 0, q`), one species for Rayleigh (`k != 0, q`).
    pub fn regular_sum(&self, model: Model, beta: T, delta: T) -> T {
        let nz = self.nonzero_sum(beta, delta);
        let q_mode = bose(beta * (self.q_energy() + delta));
        match model {
            Model::Raman => T::lit(2.0) * nz - q_mode,
            Model::Rayleigh => nz - q_mode,
        }
    }
}
