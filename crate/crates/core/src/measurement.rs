//! Localized spin observables as symbolic operators.
//!
//! Nothing here is discretized. A [`PairObservable`] is a real linear
//! combination of tensor products of single-particle factors; the lattice
//! backend realizes it pointwise ([`crate::grid`]) and the closed-form backend
//! only ever needs the product projectors `Π_A ⊗ Π_B`.

use crate::error::{Error, Result};
use crate::grid::LatticeState;
use crate::spin::{Direction, HalfInt, SpinValue};

/// Below this, a measurement branch is reported as exactly zero probability.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Detector region: all of space, nothing, or an axis-aligned box `[lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    AllSpace,
    Empty,
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || !(1..=3).contains(&lo.len()) {
            return Err(Error::invalid("region", "lo and hi must have the same length in 1..=3"));
        }
        for (j, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) {
                return Err(Error::invalid("region", "bounds must be finite"));
            }
            if l >= h {
                return Err(Error::invalid(
                    "region",
                    format!("lo[{j}] = {l} is not below hi[{j}] = {h}"),
                ));
            }
        }
        Ok(Region::Box { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new_box(vec![lo], vec![hi])
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }

    /// Number of axes, when the region fixes one.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Region::Box { lo, .. } => Some(lo.len()),
            _ => None,
        }
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        match self {
            Region::AllSpace => (f64::NEG_INFINITY, f64::INFINITY),
            Region::Empty => (0.0, 0.0),
            Region::Box { lo, hi } => (lo[axis], hi[axis]),
        }
    }

    /// `{x + offset : x ∈ self}`.
    pub fn shifted(&self, offset: &[f64]) -> Region {
        match self {
            Region::Box { lo, hi } => Region::Box {
                lo: lo.iter().zip(offset).map(|(l, o)| l + o).collect(),
                hi: hi.iter().zip(offset).map(|(h, o)| h + o).collect(),
            },
            other => other.clone(),
        }
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        match self {
            Region::AllSpace => true,
            Region::Empty => false,
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| *l <= *x && *x < *h),
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Empty, _) | (_, Region::Empty) => true,
            (Region::AllSpace, _) | (_, Region::AllSpace) => false,
            (Region::Box { lo: l1, hi: h1 }, Region::Box { lo: l2, hi: h2 }) => {
                (0..l1.len()).any(|j| h1[j] <= l2[j] || h2[j] <= l1[j])
            }
        }
    }

    /// Whether `other ⊆ self`.
    pub fn contains_region(&self, other: &Region) -> bool {
        match (self, other) {
            (_, Region::Empty) | (Region::AllSpace, _) => true,
            (_, Region::AllSpace) | (Region::Empty, _) => false,
            (Region::Box { lo: l1, hi: h1 }, Region::Box { lo: l2, hi: h2 }) => {
                (0..l1.len()).all(|j| l1[j] <= l2[j] && h2[j] <= h1[j])
            }
        }
    }
}

/// `Π_{Ω,n}^{s,λ}`: particle inside `Ω` with spin component `λ` along `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedSpinProjector {
    pub region: Region,
    pub direction: Direction,
    pub lambda: HalfInt,
    pub spin: SpinValue,
}

pub fn localized_projector(
    region: Region,
    n: Direction,
    lambda: HalfInt,
    s: SpinValue,
) -> Result<LocalizedSpinProjector> {
    s.check(lambda, "lambda")?;
    Ok(LocalizedSpinProjector {
        region,
        direction: n,
        lambda,
        spin: s,
    })
}

/// One side of a tensor-product term.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Identity,
    /// `Π_Ω^s = Σ_λ Π_{Ω,n}^{s,λ}`, independent of `n`.
    Region(Region),
    Localized(LocalizedSpinProjector),
}

/// `Λ_{Ω,n}^s = Σ_λ λ Π_{Ω,n}^{s,λ}` on one particle.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalObservable {
    pub terms: Vec<(f64, LocalizedSpinProjector)>,
}

impl LocalObservable {
    /// `Λ ⊗ I`.
    pub fn on_alpha(&self) -> PairObservable {
        PairObservable {
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (*c, Factor::Localized(p.clone()), Factor::Identity))
                .collect(),
        }
    }

    /// `I ⊗ Λ`.
    pub fn on_beta(&self) -> PairObservable {
        self.on_alpha().exchanged()
    }
}

pub fn spin_observable(region: Region, n: Direction, s: SpinValue) -> LocalObservable {
    LocalObservable {
        terms: s
            .projections()
            .map(|lambda| {
                (
                    lambda.value(),
                    LocalizedSpinProjector {
                        region: region.clone(),
                        direction: n,
                        lambda,
                        spin: s,
                    },
                )
            })
            .collect(),
    }
}

/// `Σ_i c_i F_i ⊗ G_i`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PairObservable {
    pub terms: Vec<(f64, Factor, Factor)>,
}

impl PairObservable {
    pub fn identity() -> Self {
        PairObservable {
            terms: vec![(1.0, Factor::Identity, Factor::Identity)],
        }
    }

    pub fn product(coefficient: f64, alpha: Factor, beta: Factor) -> Self {
        PairObservable {
            terms: vec![(coefficient, alpha, beta)],
        }
    }

    pub fn plus(mut self, other: PairObservable) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for t in &mut self.terms {
            t.0 *= factor;
        }
        self
    }

    /// Swaps the two tensor slots.
    pub fn exchanged(&self) -> Self {
        PairObservable {
            terms: self.terms.iter().map(|(c, a, b)| (*c, b.clone(), a.clone())).collect(),
        }
    }

    /// Structural exchange symmetry: every term has its swapped partner with the same weight.
    pub fn is_exchange_symmetric(&self) -> bool {
        let swapped = self.exchanged();
        let mut unused: Vec<bool> = vec![true; self.terms.len()];
        swapped.terms.iter().all(|(c, a, b)| {
            let hit = self
                .terms
                .iter()
                .enumerate()
                .find(|(i, (c2, a2, b2))| unused[*i] && c2 == c && a2 == a && b2 == b);
            match hit {
                Some((i, _)) => {
                    unused[i] = false;
                    true
                }
                None => false,
            }
        })
    }
}

/// `Δ_{Ω,n} = Λ ⊗ I + I ⊗ Λ` for spin 1/2.
pub fn symmetric_observable(region: Region, n: Direction) -> PairObservable {
    let lambda = spin_observable(region, n, SpinValue::HALF);
    lambda.on_alpha().plus(lambda.on_beta())
}

/// `(Π^{(2)}, Π^{(1)}, Π^{(0)})`: two, one or no particles inside the region.
pub fn number_projectors(region: Region) -> (PairObservable, PairObservable, PairObservable) {
    let r = || Factor::Region(region.clone());
    let i = || Factor::Identity;
    let two = PairObservable::product(1.0, r(), r());
    let one = PairObservable {
        terms: vec![(1.0, r(), i()), (1.0, i(), r()), (-2.0, r(), r())],
    };
    let zero = PairObservable {
        terms: vec![(1.0, i(), i()), (-1.0, r(), i()), (-1.0, i(), r()), (1.0, r(), r())],
    };
    (two, one, zero)
}

/// Spectral projectors of `Δ_{Ω,n}` for spin 1/2, labelled `(N, total λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinHalfFamily {
    pub one_plus: PairObservable,
    pub one_minus: PairObservable,
    pub two_plus: PairObservable,
    pub two_minus: PairObservable,
    pub two_zero: PairObservable,
    pub zero: PairObservable,
}

impl SpinHalfFamily {
    pub fn members(&self) -> [(&'static str, &PairObservable); 6] {
        [
            ("(1,+)", &self.one_plus),
            ("(1,-)", &self.one_minus),
            ("(2,1)", &self.two_plus),
            ("(2,-1)", &self.two_minus),
            ("(2,0)", &self.two_zero),
            ("(0,0)", &self.zero),
        ]
    }

    /// Eigenvalue-weighted sum, which should reproduce `Δ_{Ω,n}`.
    pub fn spectral_sum(&self) -> PairObservable {
        self.one_plus
            .clone()
            .scaled(0.5)
            .plus(self.one_minus.clone().scaled(-0.5))
            .plus(self.two_plus.clone())
            .plus(self.two_minus.clone().scaled(-1.0))
    }

    /// `Π^{(1,λ)}` for `λ = ±1/2`.
    pub fn one_particle(&self, lambda: HalfInt) -> Option<&PairObservable> {
        match lambda {
            HalfInt::PLUS_HALF => Some(&self.one_plus),
            HalfInt::MINUS_HALF => Some(&self.one_minus),
            _ => None,
        }
    }
}

pub fn one_particle_spin_projectors(region: Region, n: Direction) -> SpinHalfFamily {
    let proj = |lambda| {
        Factor::Localized(LocalizedSpinProjector {
            region: region.clone(),
            direction: n,
            lambda,
            spin: SpinValue::HALF,
        })
    };
    let (p, m) = (|| proj(HalfInt::PLUS_HALF), || proj(HalfInt::MINUS_HALF));
    let i = || Factor::Identity;
    let one = |a: &dyn Fn() -> Factor| PairObservable {
        terms: vec![
            (1.0, a(), i()),
            (1.0, i(), a()),
            (-2.0, a(), a()),
            (-1.0, p(), m()),
            (-1.0, m(), p()),
        ],
    };
    SpinHalfFamily {
        one_plus: one(&p),
        one_minus: one(&m),
        two_plus: PairObservable::product(1.0, p(), p()),
        two_minus: PairObservable::product(1.0, m(), m()),
        two_zero: PairObservable {
            terms: vec![(1.0, p(), m()), (1.0, m(), p())],
        },
        zero: PairObservable {
            terms: vec![
                (1.0, i(), i()),
                (-1.0, p(), i()),
                (-1.0, m(), i()),
                (-1.0, i(), p()),
                (-1.0, i(), m()),
                (1.0, p(), p()),
                (1.0, m(), m()),
                (1.0, p(), m()),
                (1.0, m(), p()),
            ],
        },
    }
}

/// Outcome of a selective measurement.
#[derive(Clone, Debug)]
pub struct Luders {
    pub probability: f64,
    /// `Πψ/‖Πψ‖`, absent when the probability is below [`ZERO_PROBABILITY`].
    pub reduced: Option<LatticeState>,
}

impl Luders {
    pub(crate) fn from_projected(projected: LatticeState) -> Luders {
        let probability = projected.norm_squared();
        if probability < ZERO_PROBABILITY {
            Luders {
                probability: 0.0,
                reduced: None,
            }
        } else {
            Luders {
                probability,
                reduced: Some(projected.scaled(1.0 / probability.sqrt())),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.reduced.is_none()
    }

    pub fn into_state(self) -> Result<LatticeState> {
        self.reduced.ok_or(Error::ZeroProbability {
            probability: self.probability,
        })
    }
}

/// `p = ⟨ψ|Π|ψ⟩`, reduced state `Πψ/√p`.
pub fn luders_reduce(state: &LatticeState, projector: &PairObservable) -> Result<Luders> {
    Ok(Luders::from_projected(state.apply_pair(projector)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_invariants() {
        assert!(Region::interval(1.0, 1.0).is_err());
        assert!(Region::interval(2.0, 1.0).is_err());
        assert!(Region::new_box(vec![0.0, 0.0], vec![1.0]).is_err());
        let r = Region::interval(-4.0, -1.0).unwrap();
        assert_eq!(r.shifted(&[-1.0]), Region::interval(-5.0, -2.0).unwrap());
        assert!(r.is_disjoint(&Region::interval(1.0, 4.0).unwrap()));
        assert!(!r.is_disjoint(&Region::interval(-2.0, 4.0).unwrap()));
        assert!(Region::interval(-5.0, 0.0).unwrap().contains_region(&r));
        assert!(r.contains_point(&[-4.0]) && !r.contains_point(&[-1.0]));
    }

    #[test]
    fn rejects_out_of_range_lambda() {
        let r = Region::AllSpace;
        assert!(localized_projector(r.clone(), Direction::z(), HalfInt(3), SpinValue::HALF).is_err());
        assert!(localized_projector(r.clone(), Direction::z(), HalfInt(0), SpinValue::HALF).is_err());
        assert!(localized_projector(r, Direction::z(), HalfInt(0), SpinValue::ONE).is_ok());
    }

    #[test]
    fn spin_half_observable_weights() {
        let obs = spin_observable(Region::AllSpace, Direction::x(), SpinValue::HALF);
        let weights: Vec<_> = obs.terms.iter().map(|(c, p)| (*c, p.lambda)).collect();
        assert_eq!(weights, vec![(0.5, HalfInt(1)), (-0.5, HalfInt(-1))]);
    }

    #[test]
    fn delta_and_family_are_exchange_symmetric() {
        let region = Region::interval(0.0, 1.0).unwrap();
        assert!(symmetric_observable(region.clone(), Direction::z()).is_exchange_symmetric());
        let fam = one_particle_spin_projectors(region.clone(), Direction::z());
        for (_, p) in fam.members() {
            assert!(p.is_exchange_symmetric());
        }
        let (two, one, zero) = number_projectors(region);
        assert!(two.is_exchange_symmetric() && one.is_exchange_symmetric() && zero.is_exchange_symmetric());
        let lambda = spin_observable(Region::AllSpace, Direction::z(), SpinValue::HALF);
        assert!(!lambda.on_alpha().is_exchange_symmetric());
    }
}
