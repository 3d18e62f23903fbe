//! Named invariant checks with measured values and tolerances.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::corpus;
use crate::correlation::{
    chsh_value, correlation_distinguishable, correlation_equal_time, correlation_identical, correlation_symmetrized,
    singlet_closed_form, triplet_closed_form, Backend,
};
use crate::error::Result;
use crate::grid::{covariance_check, discretize, evolve_grid, DensePair, GridConfig};
use crate::measurement::{
    number_projectors, one_particle_spin_projectors, symmetric_observable, PairObservable, Region,
};
use crate::special::{erf, faddeeva, gaussian_interval_integral};
use crate::spin::{
    direction_rotation, spin_component, spin_generators, spin_projector, Direction, SpinMatrix, SpinValue, C64,
};
use crate::states::{make_singlet, make_triplet, Statistics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate corruption used to confirm the suite notices failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    SpinGenerator,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            let _ = write!(
                out,
                "{status}  {:width$}  measured {:.3e}  tolerance {:.1e}",
                c.name, c.measured, c.tolerance
            );
            if let Some(e) = &c.error {
                let _ = write!(out, "  ({e})");
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{} checks, {} failed, {:.1} s",
            self.checks.len(),
            failed,
            self.seconds
        );
        out
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn check(&mut self, name: &str, tolerance: f64, measure: impl FnOnce() -> Result<f64>) {
        let check = match measure() {
            Ok(measured) => Check {
                name: name.to_string(),
                measured,
                tolerance,
                passed: measured <= tolerance,
                error: None,
            },
            Err(e) => Check {
                name: name.to_string(),
                measured: f64::NAN,
                tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        };
        self.checks.push(check);
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

const SPINS: [SpinValue; 6] = [
    SpinValue::ZERO,
    SpinValue::HALF,
    SpinValue::ONE,
    SpinValue::from_twice(3),
    SpinValue::from_twice(4),
    SpinValue::from_twice(5),
];

fn sample_directions() -> Vec<Direction> {
    vec![
        Direction::z(),
        Direction::x(),
        Direction::y(),
        Direction::new(0.3, 5.9).unwrap(),
        Direction::new(2.4, 1.1).unwrap(),
        Direction::new(PI, 0.0).unwrap(),
    ]
}

fn commutation_defect(fault: Option<Fault>) -> f64 {
    let mut worst: f64 = 0.0;
    for s in SPINS {
        let (mut sx, sy, sz) = spin_generators(s);
        if fault == Some(Fault::SpinGenerator) {
            sx = sx.scale(C64::new(1.01, 0.0));
        }
        let i = C64::i();
        worst = worst
            .max(sx.commutator(&sy).max_abs_diff(&sz.scale(i)))
            .max(sy.commutator(&sz).max_abs_diff(&sx.scale(i)))
            .max(sz.commutator(&sx).max_abs_diff(&sy.scale(i)));
    }
    worst
}

fn quick_checks(suite: &mut Suite, fault: Option<Fault>) {
    suite.check("spin.commutation", 1e-12, || Ok(commutation_defect(fault)));
    suite.check("spin.casimir", 1e-12, || {
        Ok(SPINS
            .iter()
            .map(|&s| {
                let (x, y, z) = spin_generators(s);
                let sum = &(&(&x * &x) + &(&y * &y)) + &(&z * &z);
                let v = s.value();
                sum.max_abs_diff(&SpinMatrix::identity(s.dim()).scale(C64::new(v * (v + 1.0), 0.0)))
            })
            .fold(0.0, f64::max))
    });
    suite.check("spin.rotation_intertwining", 1e-12, || {
        let mut worst: f64 = 0.0;
        for s in SPINS {
            let (_, _, sz) = spin_generators(s);
            for n in sample_directions() {
                let u = direction_rotation(&n, s);
                let lhs = &spin_component(&n, s) * &u;
                worst = worst.max(lhs.max_abs_diff(&(&u * &sz))).max(u.unitarity_defect());
            }
        }
        Ok(worst)
    });
    suite.check("spin.projector_completeness", 1e-12, || {
        let mut worst: f64 = 0.0;
        for s in SPINS {
            for n in sample_directions() {
                let mut sum = SpinMatrix::zeros(s.dim());
                for l in s.projections() {
                    let p = spin_projector(&n, s, l)?;
                    worst = worst.max((&p * &p).max_abs_diff(&p));
                    sum = &sum + &p;
                }
                worst = worst.max(sum.max_abs_diff(&SpinMatrix::identity(s.dim())));
            }
        }
        Ok(worst)
    });
    suite.check("special.faddeeva_real_axis", 1e-13, || {
        let mut worst: f64 = 0.0;
        for x in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            worst = worst.max((faddeeva(C64::new(x, 0.0)).re - (-x * x).exp()).abs());
        }
        // Dawson's integral at 1
        let im = faddeeva(C64::new(1.0, 0.0)).im;
        Ok(worst.max((im - 2.0 / PI.sqrt() * 0.538_079_506_912_768_4).abs()))
    });
    suite.check("special.gaussian_full_line", 1e-13, || {
        let (a, b, c) = (C64::new(0.8, 0.3), C64::new(0.4, 1.0), C64::new(0.1, 0.0));
        let halves = gaussian_interval_integral(a, b, c, f64::NEG_INFINITY, 0.3)
            + gaussian_interval_integral(a, b, c, 0.3, f64::INFINITY);
        let closed = (PI / a).sqrt() * (c + b * b / (4.0 * a)).exp();
        Ok((halves - closed).norm())
    });
    suite.check("states.singlet_normalization", 1e-12, || {
        let s = corpus::desk_state();
        let half = {
            let (p, m) = (crate::spin::HalfInt::PLUS_HALF, crate::spin::HalfInt::MINUS_HALF);
            let comp = s.component(p, m);
            crate::states::component_overlap(&comp, &comp, &Region::AllSpace, &Region::AllSpace).re
        };
        Ok((s.norm_squared() - 1.0).abs().max((half - 0.5).abs()))
    });
    suite.check("states.fermion_antisymmetry", 1e-12, || {
        let s = corpus::desk_state().symmetrized(Statistics::Fermion)?;
        Ok(s.exchange_defect(-1.0))
    });

    let dense = dense_checks();
    for (name, value) in dense {
        suite.check(name, 1e-12, || value.clone());
    }

    suite.check("correlation.full_space_singlet", 1e-12, || {
        let n = Direction::new(1.0, 2.0)?;
        let sc = corpus::full_space(corpus::desk_state(), n, n);
        Ok((correlation_distinguishable(&sc)?.value + 0.25).abs())
    });
    suite.check("correlation.cosine_law", 1e-9, || {
        let base = correlation_distinguishable(&corpus::desk_scenario(
            Direction::z(),
            Direction::z(),
            Backend::Analytic,
        ))?
        .value;
        let mut worst: f64 = 0.0;
        for k in 0..19 {
            let theta = PI * k as f64 / 18.0;
            let sc = corpus::desk_scenario(Direction::z(), Direction::new(theta, 0.0)?, Backend::Analytic);
            worst = worst.max((correlation_distinguishable(&sc)?.value / base - theta.cos()).abs());
        }
        Ok(worst)
    });
    suite.check("correlation.chsh_optimum", 1e-6, || {
        let sc = corpus::full_space(corpus::desk_state(), Direction::z(), Direction::z());
        let d = |t: f64| Direction::new(t, 0.0);
        Ok((chsh_value(&sc, d(0.0)?, d(FRAC_PI_2)?, d(FRAC_PI_4)?, d(3.0 * FRAC_PI_4)?)? - 0.5f64.sqrt()).abs())
    });
    suite.check("correlation.desk_value", 1e-6, || {
        let c = correlation_distinguishable(&corpus::desk_scenario(
            Direction::z(),
            Direction::z(),
            Backend::Analytic,
        ))?
        .value;
        Ok((c - desk_oracle()).abs())
    });
    suite.check("correlation.frame_shift_analytic", 0.0, || {
        let boosted = correlation_distinguishable(&corpus::boosted_desk(Backend::Analytic))?.value;
        let mut rest = corpus::desk_scenario(Direction::z(), Direction::z(), Backend::Analytic);
        rest.observer_a.region = Region::interval(-5.0, -2.0)?;
        Ok((boosted - correlation_distinguishable(&rest)?.value).abs())
    });
    suite.check("correlation.boosted_desk_value", 1e-6, || {
        // region A sampled at [-5, -2]
        let oracle = -(normal_cdf(0.0) - normal_cdf(-6.0)) * (normal_cdf(2.0) - normal_cdf(-4.0)) / 4.0;
        Ok((correlation_distinguishable(&corpus::boosted_desk(Backend::Analytic))?.value - oracle).abs())
    });
    suite.check("correlation.triplet_full_space", 1e-12, || {
        let t = make_triplet(&corpus::packet(-2.0, 0.5), &corpus::packet(2.0, 0.5), 0, (1.0, 1.0))?;
        let zz = triplet_closed_form(&corpus::full_space(t.clone(), Direction::z(), Direction::z()))?;
        let xx = triplet_closed_form(&corpus::full_space(t, Direction::x(), Direction::x()))?;
        Ok((zz + 0.25).abs().max((xx - 0.25).abs()))
    });
    suite.check("correlation.equal_time_paths", 1e-10, || {
        let mut worst: f64 = 0.0;
        for (_, sc) in corpus::equal_time_corpus() {
            let c = correlation_distinguishable(&sc)?.value;
            worst = worst.max((c - correlation_equal_time(&sc)?).abs());
            if sc.state.is_singlet_class() {
                worst = worst.max((c - singlet_closed_form(&sc)?).abs());
            }
            if sc.state.is_triplet_class() {
                worst = worst.max((c - triplet_closed_form(&sc)?).abs());
            }
        }
        Ok(worst)
    });
}

/// Literal operator algebra of the identical-particle projectors on a 16-point lattice.
fn dense_checks() -> Vec<(&'static str, Result<f64>)> {
    let grid = GridConfig::new(1, 16, 4.0).expect("valid grid");
    let spin = SpinValue::HALF;
    let region_a = Region::interval(-3.0, 0.5).unwrap();
    let region_b = Region::interval(1.0, 3.5).unwrap();
    let n = Direction::new(0.9, 2.2).unwrap();
    let family = one_particle_spin_projectors(region_a.clone(), n);
    let dense = |p: &PairObservable| DensePair::from_pair(p, &grid, spin);
    let run = || -> Result<[f64; 7]> {
        let members: Vec<DensePair> = family.members().iter().map(|(_, p)| dense(p)).collect::<Result<_>>()?;
        let mats: Vec<DMatrix<C64>> = members.iter().map(DensePair::materialize).collect();
        let size = mats[0].nrows();
        let identity = DMatrix::<C64>::identity(size, size);
        let mut idempotent: f64 = 0.0;
        let mut orthogonal: f64 = 0.0;
        let mut hermitian: f64 = 0.0;
        for (i, pi) in members.iter().enumerate() {
            idempotent = idempotent.max(max_abs(&(pi.mul(pi).materialize() - &mats[i])));
            hermitian = hermitian.max(max_abs(&(&mats[i] - mats[i].adjoint())));
            for (j, pj) in members.iter().enumerate() {
                if i != j {
                    orthogonal = orthogonal.max(max_abs(&pi.mul(pj).materialize()));
                }
            }
        }
        let total = mats.iter().fold(DMatrix::<C64>::zeros(size, size), |acc, m| acc + m);
        let complete = max_abs(&(total - &identity));
        let delta_a = dense(&symmetric_observable(region_a.clone(), n))?;
        let spectral = max_abs(&(dense(&family.spectral_sum())?.materialize() - delta_a.materialize()));
        let (two, one, zero) = number_projectors(region_a.clone());
        let numbers = max_abs(
            &(dense(&two)?.materialize() + dense(&one)?.materialize() + dense(&zero)?.materialize() - &identity),
        );
        let delta_b = dense(&symmetric_observable(region_b.clone(), Direction::new(2.0, 0.4)?))?;
        let commute = max_abs(&(delta_a.mul(&delta_b).sub(&delta_b.mul(&delta_a))).materialize());
        let mut action: f64 = 0.0;
        for (k, (_, p)) in family.members().iter().enumerate() {
            let m = crate::grid::action_matrix(p, &grid, spin)?;
            action = action.max(max_abs(&(m - &mats[k])));
        }
        Ok([
            idempotent,
            orthogonal,
            complete,
            spectral,
            numbers,
            commute,
            action.max(hermitian),
        ])
    };
    let names = [
        "measurement.family_idempotent",
        "measurement.family_orthogonal",
        "measurement.family_complete",
        "measurement.spectral_decomposition",
        "measurement.number_complete",
        "measurement.disjoint_commutation",
        "measurement.action_matches_matrix",
    ];
    match run() {
        Ok(values) => names.iter().zip(values).map(|(n, v)| (*n, Ok(v))).collect(),
        Err(e) => names.iter().map(|n| (*n, Err(e.clone()))).collect(),
    }
}

fn grid(n: usize) -> Backend {
    Backend::Grid(GridConfig::new(1, n, 16.0).expect("valid grid"))
}

/// Largest analytic-vs-lattice gap over the equal-time corpus.
pub fn corpus_deviation(n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, sc) in corpus::equal_time_corpus() {
        let exact = correlation_distinguishable(&sc)?;
        let lattice = correlation_distinguishable(&sc.with_backend(grid(n))?)?;
        for (r1, r2) in exact.joint.iter().zip(&lattice.joint) {
            for (p1, p2) in r1.iter().zip(r2) {
                worst = worst.max((p1 - p2).abs());
            }
        }
        worst = worst.max((exact.value - lattice.value).abs());
    }
    Ok(worst)
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(C64::new(x / 2f64.sqrt(), 0.0)).re)
}

/// `-W²/4` with `W = Φ(2) - Φ(-4)`, the desk box weight of either packet.
fn desk_oracle() -> f64 {
    let w = normal_cdf(2.0) - normal_cdf(-4.0);
    -w * w / 4.0
}

fn full_checks(suite: &mut Suite) {
    suite.check("grid.desk_value_n512", 5e-3, || {
        let c = correlation_distinguishable(&corpus::desk_scenario(Direction::z(), Direction::z(), grid(512)))?.value;
        Ok((c - desk_oracle()).abs())
    });
    suite.check("grid.frame_shift_commensurate", 1e-12, || {
        let boosted = correlation_distinguishable(&corpus::boosted_desk(grid(512)))?;
        let mut rest = corpus::desk_scenario(Direction::z(), Direction::z(), grid(512));
        rest.observer_a.region = Region::interval(-5.0, -2.0)?;
        let rest = correlation_distinguishable(&rest)?;
        let mut worst = (boosted.value - rest.value).abs();
        for (r1, r2) in boosted.joint.iter().zip(&rest.joint) {
            for (a, b) in r1.iter().zip(r2) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    });
    suite.check("grid.kernel_identity", 1e-8, || {
        let mut sc = corpus::desk_scenario(Direction::z(), Direction::new(1.0, 0.5)?, grid(512));
        sc.observer_b.time = 1.0;
        sc.observer_b.velocity = vec![0.6];
        let r = correlation_distinguishable(&sc)?;
        Ok(r.diagnostics.kernel_deviation.unwrap_or(f64::NAN))
    });
    suite.check("grid.norm_drift_100_steps", 1e-12, || {
        let g = GridConfig::new(1, 512, 16.0)?;
        let mut psi = discretize(&corpus::desk_state(), &g)?;
        let mut worst: f64 = 0.0;
        // total time 1 keeps the spreading packets clear of the band
        for _ in 0..100 {
            psi = evolve_grid(&psi, 0.01)?;
            worst = worst.max((psi.norm_squared() - 1.0).abs());
        }
        Ok(worst)
    });
    suite.check("grid.evolution_matches_closed_form", 1e-8, || {
        let g = GridConfig::new(1, 512, 16.0)?;
        let s = corpus::desk_state();
        let evolved = evolve_grid(&discretize(&s, &g)?, 1.0)?;
        let want = crate::grid::sample(&s.evolve_free(1.0)?, &g)?;
        Ok(evolved.distance(&want))
    });
    suite.check("grid.convergence_ratio", 0.5, || {
        let coarse = corpus_deviation(256)?;
        let fine = corpus_deviation(1024)?;
        Ok(fine / coarse)
    });
    suite.check("grid.triplet_generic", 5e-3, || {
        let (_, sc) = corpus::equal_time_corpus()
            .into_iter()
            .find(|(n, _)| *n == "generic triplet")
            .expect("corpus entry");
        let closed = triplet_closed_form(&sc)?;
        Ok((closed - correlation_distinguishable(&sc.with_backend(grid(512))?)?.value).abs())
    });
    suite.check("grid.covariance_commensurate", 1e-12, || {
        let g = GridConfig::new(1, 256, 16.0)?;
        covariance_check(
            &Region::interval(-4.0, -1.0)?,
            &Direction::new(0.7, 1.0)?,
            crate::spin::HalfInt::PLUS_HALF,
            &[1.0],
            1.0,
            &g,
            SpinValue::HALF,
        )
    });
    suite.check("grid.covariance_generic", 1e-10, || {
        let g = GridConfig::new(1, 256, 16.0)?;
        covariance_check(
            &Region::interval(-4.0, -1.0)?,
            &Direction::x(),
            crate::spin::HalfInt::MINUS_HALF,
            &[0.73],
            1.1,
            &g,
            SpinValue::HALF,
        )
    });
    let separated = || -> Result<_> {
        let phi = corpus::packet(-4.0, 0.5);
        let chi = corpus::packet(4.0, 0.5);
        let distinguishable = make_singlet(&phi, &chi, (1.0, 1.0))?;
        let fermions = distinguishable.symmetrized(Statistics::Fermion)?;
        let regions = (Region::interval(-6.0, -2.0)?, Region::interval(2.0, 6.0)?);
        Ok((distinguishable, fermions, regions))
    };
    suite.check("grid.identical_disjoint_forms", 1e-10, || {
        let (_, fermions, (ra, rb)) = separated()?;
        let sc = corpus::with_regions(fermions, ra, rb, Direction::z(), Direction::new(0.8, 0.3)?, grid(512));
        let r = correlation_identical(&sc)?;
        Ok((r.value - r.diagnostics.disjoint_form.unwrap_or(f64::NAN)).abs())
    });
    suite.check("grid.fermion_matches_symmetrized", 1e-3, || {
        let (dist, fermions, (ra, rb)) = separated()?;
        let a = Direction::new(0.5, 0.0)?;
        let sym = correlation_symmetrized(&corpus::with_regions(
            dist,
            ra.clone(),
            rb.clone(),
            a,
            a,
            Backend::Analytic,
        ))?;
        let ident = correlation_identical(&corpus::with_regions(fermions, ra, rb, a, a, grid(512)))?.value;
        Ok((sym - ident).abs())
    });
    suite.check("grid.number_projector_expectations", 1e-6, || {
        let g = GridConfig::new(1, 256, 16.0)?;
        let s = corpus::desk_state();
        let psi = discretize(&s, &g)?;
        let (two, _, _) = number_projectors(Region::interval(-6.0, 6.0)?);
        let (_, _, none) = number_projectors(Region::interval(8.0, 12.0)?);
        let inside = psi.inner(&psi.apply_pair(&two)?).re;
        let outside = psi.inner(&psi.apply_pair(&none)?).re;
        Ok((inside - 1.0).abs().max((outside - 1.0).abs()))
    });
}

pub fn run_validate(level: Level, fault: Option<Fault>) -> Report {
    let start = Instant::now();
    let mut suite = Suite { checks: Vec::new() };
    quick_checks(&mut suite, fault);
    if level == Level::Full {
        full_checks(&mut suite);
    }
    Report {
        level,
        checks: suite.checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let report = run_validate(Level::Quick, None);
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn injected_fault_is_named() {
        let report = run_validate(Level::Quick, Some(Fault::SpinGenerator));
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"spin.commutation"), "{failed:?}");
    }
}
