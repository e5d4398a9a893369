// SPDX-License-Identifier: Apache-2.0
//! Block-diagonal quadrature covariance of the full lattice.
//!
//! Quadratures are x = a + a†, y = −i(a − a†) (vacuum variance 1); mode `i`
//! owns quadrature indices 2i (x) and 2i+1 (y).

use crate::comb::{Field, ModeId, ModeLattice};
use crate::error::{Error, Result};
use crate::sample::SampleSpec;
use crate::scalar::Real;

use super::{amplified, pairing_rule, Partner, SqueezingSpec, SqueezingStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Vacuum,
    Thermal,
    /// Two-mode squeezed pair.
    Pair,
    /// Pairing centre, single-mode squeezed (x squeezed).
    Centre,
    /// Partner outside the lattice, traced out.
    Boundary,
}

/// One or two modes and their (2k × 2k) row-major covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovBlock<T> {
    pub kind: BlockKind,
    pub modes: Vec<usize>,
    pub matrix: Vec<T>,
}

impl<T: Real> CovBlock<T> {
    fn diag(kind: BlockKind, mode: usize, vx: T, vy: T) -> Self {
        Self { kind, modes: vec![mode], matrix: vec![vx, T::zero(), T::zero(), vy] }
    }

    fn pair(m1: usize, m2: usize, g: T) -> Self {
        let c = amplified(g);
        let s = (g - g.recip()) / T::of(2.0);
        let z = T::zero();
        #[rustfmt::skip]
        let matrix = vec![
            c,  z, -s, z,
            z,  c,  z, s,
            -s, z,  c, z,
            z,  s,  z, c,
        ];
        Self { kind: BlockKind::Pair, modes: vec![m1, m2], matrix }
    }

    pub fn dim(&self) -> usize {
        2 * self.modes.len()
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.dim() + j]
    }

    /// vᵀ V v for a vector over this block's quadratures.
    pub fn form(&self, v: &[T]) -> T {
        let d = self.dim();
        let mut acc = T::zero();
        for i in 0..d {
            if v[i] == T::zero() {
                continue;
            }
            let row: T = (0..d).map(|j| self.matrix[i * d + j] * v[j]).sum();
            acc = acc + v[i] * row;
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct CovarianceModel<T> {
    lattice: ModeLattice,
    blocks: Vec<CovBlock<T>>,
    /// mode -> (block, slot within block)
    locator: Vec<(usize, usize)>,
    boundary: Vec<ModeId>,
}

impl<T: Real> CovarianceModel<T> {
    pub fn lattice(&self) -> &ModeLattice {
        &self.lattice
    }

    /// Number of real quadratures.
    pub fn dimension(&self) -> usize {
        2 * self.lattice.len()
    }

    pub fn blocks(&self) -> &[CovBlock<T>] {
        &self.blocks
    }

    pub fn block_of(&self, mode: usize) -> (usize, usize) {
        self.locator[mode]
    }

    /// Modes whose partner fell outside the lattice or that pair with themselves.
    pub fn boundary_modes(&self) -> &[ModeId] {
        &self.boundary
    }

    /// Matrix entry for quadrature indices (i, j).
    pub fn entry(&self, i: usize, j: usize) -> T {
        let (bi, si) = self.locator[i / 2];
        let (bj, sj) = self.locator[j / 2];
        if bi != bj {
            return T::zero();
        }
        self.blocks[bi].at(2 * si + i % 2, 2 * sj + j % 2)
    }

    /// Dense matrix, row-major. Intended for small lattices.
    pub fn to_dense(&self) -> Vec<T> {
        let d = self.dimension();
        let mut out = vec![T::zero(); d * d];
        for b in &self.blocks {
            let q: Vec<usize> = b.modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
            for (a, &qi) in q.iter().enumerate() {
                for (c, &qj) in q.iter().enumerate() {
                    out[qi * d + qj] = b.at(a, c);
                }
            }
        }
        out
    }
}

/// Covariance for comb A under `sqz_a`, comb B under `sqz_b`, environment at 1 + 2E_n.
pub fn build_covariance<T: Real>(
    lattice: &ModeLattice,
    sqz_a: &SqueezingSpec<T>,
    sqz_b: &SqueezingSpec<T>,
    sample: &SampleSpec<T>,
) -> Result<CovarianceModel<T>> {
    let n_half = lattice.n_half();
    for got in [sqz_a.n_half(), sqz_b.n_half(), sample.n_half()] {
        if got != n_half {
            return Err(Error::DimensionMismatch { expected: n_half, got });
        }
    }
    let len = lattice.len();
    let mut blocks = Vec::with_capacity(len);
    let mut locator = vec![(usize::MAX, 0); len];
    let mut boundary = Vec::new();
    let mut push = |blocks: &mut Vec<CovBlock<T>>, b: CovBlock<T>| {
        let id = blocks.len();
        for (slot, &m) in b.modes.iter().enumerate() {
            locator[m] = (id, slot);
        }
        blocks.push(b);
    };

    for (field, spec) in [(Field::A, sqz_a), (Field::B, sqz_b)] {
        let rule = match spec.structure() {
            SqueezingStructure::Classical => None,
            st => Some(pairing_rule(st, field, n_half)?),
        };
        for i in 0..lattice.block_len() {
            let idx = i + if field == Field::A { 0 } else { lattice.block_len() };
            let id = lattice.mode(idx);
            let Some(rule) = rule else {
                push(&mut blocks, CovBlock::diag(BlockKind::Vacuum, idx, T::one(), T::one()));
                continue;
            };
            let g = spec.gain(id.line);
            match rule.partner(id.line, id.detuning) {
                Partner::Mode { line, detuning } => {
                    let p = lattice.index(ModeId::new(field, line, detuning)).expect("partner inside lattice");
                    if p > idx {
                        push(&mut blocks, CovBlock::pair(idx, p, g));
                    }
                }
                Partner::SelfPaired => {
                    boundary.push(id);
                    push(&mut blocks, CovBlock::diag(BlockKind::Centre, idx, g.recip(), g));
                }
                Partner::OutsideLattice { .. } => {
                    boundary.push(id);
                    let c = amplified(g);
                    push(&mut blocks, CovBlock::diag(BlockKind::Boundary, idx, c, c));
                }
            }
        }
    }
    for i in 0..lattice.block_len() {
        let idx = 2 * lattice.block_len() + i;
        let v = T::one() + T::of(2.0) * sample.thermal(lattice.mode(idx).line);
        push(&mut blocks, CovBlock::diag(BlockKind::Thermal, idx, v, v));
    }
    debug_assert!(locator.iter().all(|l| l.0 != usize::MAX));
    Ok(CovarianceModel { lattice: *lattice, blocks, locator, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::build_mode_lattice;
    use SqueezingStructure::*;

    fn model(st: SqueezingStructure, g: f64, n: usize) -> CovarianceModel<f64> {
        let s = SqueezingSpec::uniform(st, n, g).unwrap();
        build_covariance(&build_mode_lattice(n), &s, &s, &SampleSpec::transparent(n)).unwrap()
    }

    #[test]
    fn classical_is_identity() {
        let m = model(Classical, 1.0, 1);
        let d = m.dimension();
        let dense = m.to_dense();
        for i in 0..d {
            for j in 0..d {
                assert_eq!(dense[i * d + j], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn epr_variances() {
        let m = model(CrossLineEntangled, 4.0, 1);
        let l = m.lattice();
        let a = l.index(ModeId::new(Field::A, 1, 2)).unwrap();
        let b = l.index(ModeId::new(Field::A, -1, -2)).unwrap();
        let var = |v: [(usize, f64); 2]| {
            let mut s = 0.0;
            for (i, ci) in v {
                for (j, cj) in v {
                    s += ci * cj * m.entry(i, j);
                }
            }
            s / 2.0
        };
        assert!((var([(2 * a, 1.0), (2 * b, 1.0)]) - 0.25).abs() < 1e-15);
        assert!((var([(2 * a, 1.0), (2 * b, -1.0)]) - 4.0).abs() < 1e-15);
        assert!((var([(2 * a + 1, 1.0), (2 * b + 1, -1.0)]) - 0.25).abs() < 1e-15);
        assert!((var([(2 * a + 1, 1.0), (2 * b + 1, 1.0)]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_modes_are_marginal() {
        let m = model(IntraCrossReferred, 4.0, 2);
        assert!(!m.boundary_modes().is_empty());
        let id = ModeId::new(Field::B, 2, -1);
        assert!(m.boundary_modes().contains(&id));
        let i = m.lattice().index(id).unwrap();
        assert_eq!(m.entry(2 * i, 2 * i), 2.125);
        assert_eq!(m.blocks()[m.block_of(i).0].kind, BlockKind::Boundary);
    }

    #[test]
    fn thermal_environment() {
        let n = 1;
        let s = SqueezingSpec::<f64>::classical(n);
        let sample = SampleSpec::transparent(n).with_uniform_thermal(0.05).unwrap();
        let m = build_covariance(&build_mode_lattice(n), &s, &s, &sample).unwrap();
        let e = m.lattice().index(ModeId::new(Field::Env, 0, 1)).unwrap();
        assert!((m.entry(2 * e + 1, 2 * e + 1) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions() {
        let s = SqueezingSpec::<f64>::classical(2);
        assert!(build_covariance(&build_mode_lattice(1), &s, &s, &SampleSpec::transparent(1)).is_err());
    }
}
