//! Explicit matrices for small lattices.
//!
//! Single-particle operators are `DP × DP` matrices indexed `m·P + i`; pair
//! operators are kept as sums of Kronecker products until materialized.

use nalgebra::DMatrix;

use super::{GridConfig, LatticeState};
use crate::error::{Error, Result};
use crate::measurement::{Factor, PairObservable};
use crate::spin::{spin_projector, SpinValue, C64};

/// Largest single-particle dimension accepted for materialization.
const MAX_SINGLE_DIM: usize = 64;

fn factor_matrix(factor: &Factor, grid: &GridConfig, spin: SpinValue) -> Result<DMatrix<C64>> {
    let d = spin.dim();
    let p = grid.sites();
    let n = d * p;
    Ok(match factor {
        Factor::Identity => DMatrix::identity(n, n),
        Factor::Region(region) => {
            let mask = grid.region_mask(region)?;
            DMatrix::from_fn(n, n, |r, c| {
                if r == c && mask[r % p] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
        Factor::Localized(proj) => {
            let mask = grid.region_mask(&proj.region)?;
            let spin_part = spin_projector(&proj.direction, proj.spin, proj.lambda)?;
            DMatrix::from_fn(n, n, |r, c| {
                let (mr, ir) = (r / p, r % p);
                let (mc, ic) = (c / p, c % p);
                if ir == ic && mask[ir] {
                    spin_part.get(mr, mc)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
    })
}

/// `Σ_i c_i A_i ⊗ B_i` with explicit single-particle matrices.
#[derive(Clone, Debug)]
pub struct DensePair {
    terms: Vec<(C64, DMatrix<C64>, DMatrix<C64>)>,
    single_dim: usize,
}

impl DensePair {
    pub fn from_pair(pair: &PairObservable, grid: &GridConfig, spin: SpinValue) -> Result<Self> {
        let single_dim = spin.dim() * grid.sites();
        if single_dim > MAX_SINGLE_DIM {
            return Err(Error::Unsupported(format!(
                "dense matrices need D·N^d <= {MAX_SINGLE_DIM}, got {single_dim}"
            )));
        }
        let terms = pair
            .terms
            .iter()
            .map(|(c, a, b)| {
                Ok((
                    C64::new(*c, 0.0),
                    factor_matrix(a, grid, spin)?,
                    factor_matrix(b, grid, spin)?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(DensePair { terms, single_dim })
    }

    /// Operator product, expanded term by term.
    pub fn mul(&self, other: &DensePair) -> DensePair {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, a1, b1) in &self.terms {
            for (c2, a2, b2) in &other.terms {
                terms.push((c1 * c2, a1 * a2, b1 * b2));
            }
        }
        DensePair {
            terms,
            single_dim: self.single_dim,
        }
    }

    pub fn sub(&self, other: &DensePair) -> DensePair {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, a, b)| (-c, a.clone(), b.clone())));
        DensePair {
            terms,
            single_dim: self.single_dim,
        }
    }

    /// Full matrix in Kronecker order `(mα·P + iα)·DP + (mβ·P + iβ)`.
    pub fn materialize(&self) -> DMatrix<C64> {
        let n = self.single_dim;
        let mut out = DMatrix::<C64>::zeros(n * n, n * n);
        for (c, a, b) in &self.terms {
            for ac in 0..n {
                for ar in 0..n {
                    let x = c * a[(ar, ac)];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for bc in 0..n {
                        for br in 0..n {
                            let y = b[(br, bc)];
                            if y != C64::new(0.0, 0.0) {
                                out[(ar * n + br, ac * n + bc)] += x * y;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Matrix of the lattice action of `pair`, assembled column by column from basis
/// states and reported in the same Kronecker order as [`DensePair::materialize`].
pub fn action_matrix(pair: &PairObservable, grid: &GridConfig, spin: SpinValue) -> Result<DMatrix<C64>> {
    let d = spin.dim();
    let p = grid.sites();
    let n = d * p;
    if n > MAX_SINGLE_DIM {
        return Err(Error::Unsupported(format!(
            "dense matrices need D·N^d <= {MAX_SINGLE_DIM}, got {n}"
        )));
    }
    let probe = LatticeState::zeros(*grid, spin, (1.0, 1.0));
    let kron = |lattice: usize| -> usize {
        let ib = lattice % p;
        let ia = (lattice / p) % p;
        let mb = (lattice / (p * p)) % d;
        let ma = lattice / (p * p * d);
        (ma * p + ia) * n + (mb * p + ib)
    };
    let mut out = DMatrix::<C64>::zeros(n * n, n * n);
    for col in 0..n * n {
        let mut basis = probe.clone();
        basis.amplitudes[col] = C64::new(1.0, 0.0);
        let image = basis.apply_pair(pair)?;
        for (row, v) in image.amplitudes.iter().enumerate() {
            if *v != C64::new(0.0, 0.0) {
                out[(kron(row), kron(col))] = *v;
            }
        }
    }
    Ok(out)
}
