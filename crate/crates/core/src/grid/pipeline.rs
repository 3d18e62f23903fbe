//! Sequential two-observer measurement on the lattice.

use super::{
    apply_boost_grid, discretize, evolve_grid, evolve_grid_particle, from_observer_frame, kernel_identity_deviation,
    project_grid, to_observer_frame, GridConfig, KernelProbe, LatticeState, Particle, BOUNDARY_WARN,
};
use crate::correlation::{BackendKind, CorrelationResult, Diagnostics, ResultKind, Scenario};
use crate::error::{Error, Result};
use crate::measurement::{one_particle_spin_projectors, symmetric_observable, ZERO_PROBABILITY};
use crate::spin::{HalfInt, SpinValue};

/// Identical-particle outcome: the table holds `p(λ₁, λ₁')` for exactly one
/// particle seen by each observer, and `value` is the trace formula, which also
/// counts configurations with two particles inside a detector.
pub type IdenticalOutcome = CorrelationResult;

const KERNEL_SEED: u64 = 0x6b65_726e;
const KERNEL_STATES: usize = 3;

#[derive(Default)]
struct Tracker {
    drift: f64,
    boundary: f64,
}

impl Tracker {
    fn step(&mut self, before: &LatticeState, after: Result<LatticeState>) -> Result<LatticeState> {
        let after = after?;
        self.drift = self.drift.max((after.norm_squared() - before.norm_squared()).abs());
        self.boundary = self.boundary.max(after.peak_boundary_mass());
        Ok(after)
    }

    fn diagnostics(&self, kernel: f64, zero: Vec<f64>) -> Diagnostics {
        let mut warnings = Vec::new();
        if self.boundary > BOUNDARY_WARN {
            warnings.push(format!(
                "boundary mass {:.3e} exceeds {BOUNDARY_WARN:.0e}",
                self.boundary
            ));
        }
        if kernel > 1e-8 {
            warnings.push(format!("kernel identity deviation {kernel:.3e} exceeds 1e-8"));
        }
        Diagnostics {
            norm_drift: Some(self.drift),
            boundary_mass: Some(self.boundary),
            kernel_deviation: Some(kernel),
            zero_probability: zero,
            disjoint_form: None,
            warnings,
        }
    }
}

fn kernel_check(scenario: &Scenario, grid: &GridConfig) -> Result<f64> {
    let b = &scenario.observer_b;
    let spin = scenario.state.spin();
    let probe = KernelProbe {
        region: b.region.clone(),
        direction: b.direction,
        lambda: spin.projection_at(0),
        velocity: b.velocity.clone(),
        time: b.time,
        tau: b.time - scenario.observer_a.time,
    };
    kernel_identity_deviation(
        grid,
        spin,
        scenario.state.masses().1,
        &probe,
        KERNEL_SEED,
        KERNEL_STATES,
    )
}

/// Lattice realization of the sequential measurement:
/// into A's frame, project α, back, evolve to `t_B`, into B's frame, project β.
///
/// After the first projection only β is transported: unitaries acting on α
/// leave β's reduced state, and so every `p(λβ | λα)`, unchanged. This keeps
/// the sharp-edged α branch off the lattice boundary.
pub fn joint_probabilities_grid(scenario: &Scenario, grid: &GridConfig) -> Result<CorrelationResult> {
    let (a, b) = (&scenario.observer_a, &scenario.observer_b);
    let spin = scenario.state.spin();
    let tau = b.time - a.time;
    let mut track = Tracker::default();
    let psi = discretize(&scenario.state, grid)?.with_time(a.time);
    track.boundary = psi.peak_boundary_mass();
    let in_a = track.step(&psi, to_observer_frame(&psi, &a.velocity, a.time))?;

    let mut joint = Vec::with_capacity(spin.dim());
    let mut marginal_a = Vec::with_capacity(spin.dim());
    let mut zero = Vec::new();
    for lambda_a in spin.projections() {
        let first = project_grid(&in_a, &a.region, &a.direction, lambda_a, Particle::Alpha)?;
        marginal_a.push(first.probability);
        let Some(reduced) = first.reduced else {
            zero.push(lambda_a.value());
            joint.push(vec![0.0; spin.dim()]);
            continue;
        };
        let back = track.step(
            &reduced,
            apply_boost_grid(&reduced, &a.velocity, a.time, Particle::Beta),
        )?;
        let later = track.step(&back, evolve_grid_particle(&back, tau, Particle::Beta))?;
        let into_b: Vec<f64> = b.velocity.iter().map(|v| -v).collect();
        let in_b = track.step(&later, apply_boost_grid(&later, &into_b, b.time, Particle::Beta))?;
        let row = spin
            .projections()
            .map(|lambda_b| {
                let second = project_grid(&in_b, &b.region, &b.direction, lambda_b, Particle::Beta)?;
                Ok(first.probability * second.probability)
            })
            .collect::<Result<Vec<f64>>>()?;
        joint.push(row);
    }
    let kernel = kernel_check(scenario, grid)?;
    Ok(CorrelationResult::from_table(
        ResultKind::Distinguishable,
        BackendKind::Grid,
        spin,
        joint,
        marginal_a,
        track.diagnostics(kernel, zero),
    ))
}

/// `Σ_{λ₁} Tr{Π^{(1,λ₁)}_A ρ Π^{(1,λ₁)}_A K_B D_A}` with every operator
/// conjugated into the common frame; the free evolution is moved onto the
/// bra and ket so only forward propagation is needed.
pub fn correlation_identical_grid(scenario: &Scenario, grid: &GridConfig) -> Result<IdenticalOutcome> {
    let spin = scenario.state.spin();
    if spin != SpinValue::HALF {
        return Err(Error::Unsupported(
            "identical-particle correlation is defined for spin 1/2".into(),
        ));
    }
    let (a, b) = (&scenario.observer_a, &scenario.observer_b);
    let tau = b.time - a.time;
    let family_a = one_particle_spin_projectors(a.region.clone(), a.direction);
    let family_b = one_particle_spin_projectors(b.region.clone(), b.direction);
    let delta_a = symmetric_observable(a.region.clone(), a.direction);
    let delta_b = symmetric_observable(b.region.clone(), b.direction);

    let mut track = Tracker::default();
    let psi = discretize(&scenario.state, grid)?.with_time(a.time);
    track.boundary = psi.peak_boundary_mass();
    let in_a = track.step(&psi, to_observer_frame(&psi, &a.velocity, a.time))?;

    let to_b = |track: &mut Tracker, state: &LatticeState| -> Result<LatticeState> {
        let back = track.step(state, from_observer_frame(state, &a.velocity, a.time))?;
        let later = track.step(&back, evolve_grid(&back, tau))?;
        track.step(&later, to_observer_frame(&later, &b.velocity, b.time))
    };

    let lambdas = [HalfInt::PLUS_HALF, HalfInt::MINUS_HALF];
    let mut value = 0.0;
    let mut joint = Vec::new();
    let mut marginal_a = Vec::new();
    let mut zero = Vec::new();
    let mut imaginary: f64 = 0.0;
    for lambda in lambdas {
        let selector = family_a.one_particle(lambda).expect("spin-1/2 label");
        let chi = in_a.apply_pair(selector)?;
        let p = chi.norm_squared();
        if p < ZERO_PROBABILITY {
            zero.push(lambda.value());
            marginal_a.push(0.0);
            joint.push(vec![0.0; 2]);
            continue;
        }
        marginal_a.push(p);
        let eta = chi.apply_pair(&delta_a)?;
        let chi_b = to_b(&mut track, &chi)?;
        let eta_b = to_b(&mut track, &eta)?;
        let term = chi_b.inner(&eta_b.apply_pair(&delta_b)?);
        value += term.re;
        imaginary = imaginary.max(term.im.abs());
        let row = lambdas
            .iter()
            .map(|l| {
                Ok(chi_b
                    .inner(&chi_b.apply_pair(family_b.one_particle(*l).expect("spin-1/2 label"))?)
                    .re)
            })
            .collect::<Result<Vec<f64>>>()?;
        joint.push(row);
    }

    let kernel = kernel_check(scenario, grid)?;
    let mut diagnostics = track.diagnostics(kernel, zero);
    if imaginary > 1e-10 {
        diagnostics
            .warnings
            .push(format!("trace has imaginary part {imaginary:.3e}"));
    }
    if a.region.is_disjoint(&b.region) && a.is_at_rest() && b.is_at_rest() && scenario.equal_times() {
        let da = psi.apply_pair(&delta_a)?;
        let db = psi.apply_pair(&delta_b)?;
        diagnostics.disjoint_form = Some(da.inner(&db).re);
    }
    let mut out = CorrelationResult::from_table(
        ResultKind::Identical,
        BackendKind::Grid,
        spin,
        joint,
        marginal_a,
        diagnostics,
    );
    out.value = value;
    Ok(out)
}
