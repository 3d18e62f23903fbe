//! Joint probabilities and spin correlations for two observers.
//!
//! Observer velocities are those of the common frame `O` relative to each
//! observer. A detector region `Ω` of an observer moving with `v` samples the
//! `O`-frame wavefunction on `Ω - v t` at its measurement time `t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, GridConfig, IdenticalOutcome};
use crate::measurement::Region;
use crate::spin::{spin_component, spin_projector, Direction, HalfInt, SpinMatrix, SpinValue, C64};
use crate::states::{component_overlap, Statistics, TwoParticleState};

#[derive(Clone, Debug, PartialEq)]
pub struct ObserverSpec {
    pub velocity: Vec<f64>,
    pub time: f64,
    pub region: Region,
    pub direction: Direction,
}

impl ObserverSpec {
    pub fn at_rest(region: Region, direction: Direction, dimension: usize) -> Self {
        ObserverSpec {
            velocity: vec![0.0; dimension],
            time: 0.0,
            region,
            direction,
        }
    }

    /// `Ω - v t`: where this detector samples the `O`-frame wavefunction.
    pub fn effective_region(&self) -> Region {
        let shift: Vec<f64> = self.velocity.iter().map(|v| -v * self.time).collect();
        self.region.shifted(&shift)
    }

    pub fn is_at_rest(&self) -> bool {
        self.velocity.iter().all(|v| *v == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Analytic,
    Grid(GridConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Analytic,
    Grid,
}

impl Backend {
    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Analytic => BackendKind::Analytic,
            Backend::Grid(_) => BackendKind::Grid,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub state: TwoParticleState,
    pub observer_a: ObserverSpec,
    pub observer_b: ObserverSpec,
    pub backend: Backend,
}

impl Scenario {
    pub fn new(
        state: TwoParticleState,
        observer_a: ObserverSpec,
        observer_b: ObserverSpec,
        backend: Backend,
    ) -> Result<Self> {
        let d = state.dimension();
        for (name, obs) in [("observers.a", &observer_a), ("observers.b", &observer_b)] {
            if obs.velocity.len() != d || obs.velocity.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(
                    format!("{name}.velocity"),
                    format!("expected {d} finite components"),
                ));
            }
            if !obs.time.is_finite() {
                return Err(Error::invalid(format!("{name}.time"), "not finite"));
            }
            if let Some(rd) = obs.region.dimension() {
                if rd != d {
                    return Err(Error::invalid(
                        format!("{name}.region"),
                        format!("region has {rd} axes, state has {d}"),
                    ));
                }
            }
        }
        if observer_b.time < observer_a.time {
            return Err(Error::invalid(
                "observers.b.time",
                format!("{} precedes observers.a.time = {}", observer_b.time, observer_a.time),
            ));
        }
        if let Backend::Grid(g) = &backend {
            if g.dimension() != d {
                return Err(Error::invalid(
                    "backend.grid",
                    format!("lattice has {} axes, state has {d}", g.dimension()),
                ));
            }
        }
        Ok(Scenario {
            state,
            observer_a,
            observer_b,
            backend,
        })
    }

    pub fn with_directions(&self, a: Direction, b: Direction) -> Scenario {
        let mut out = self.clone();
        out.observer_a.direction = a;
        out.observer_b.direction = b;
        out
    }

    pub fn with_backend(&self, backend: Backend) -> Result<Scenario> {
        Scenario::new(
            self.state.clone(),
            self.observer_a.clone(),
            self.observer_b.clone(),
            backend,
        )
    }

    /// Same observers, particle labels swapped: A now measures what was β.
    pub fn exchanged(&self) -> Scenario {
        Scenario {
            state: self.state.exchanged(),
            ..self.clone()
        }
    }

    pub fn equal_times(&self) -> bool {
        self.observer_a.time == self.observer_b.time
    }

    fn require_equal_times(&self, what: &str) -> Result<()> {
        if self.equal_times() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} needs equal measurement times (t_A = {}, t_B = {}); use the grid backend",
                self.observer_a.time, self.observer_b.time
            )))
        }
    }

    /// `θ_ab` between the two measurement directions.
    pub fn angle(&self) -> f64 {
        self.observer_a.direction.angle_to(&self.observer_b.direction)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    Distinguishable,
    Identical,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    /// Largest `|‖ψ‖² - 1|` after the unitary steps of a lattice run.
    pub norm_drift: Option<f64>,
    /// Largest relative probability seen in the lattice boundary band.
    pub boundary_mass: Option<f64>,
    /// Gap between the kernel form and the step sequence of the second measurement.
    pub kernel_deviation: Option<f64>,
    /// First-measurement outcomes whose probability fell below the zero threshold.
    pub zero_probability: Vec<f64>,
    /// Product form `⟨Δ_A Δ_B⟩`, reported for disjoint regions at rest and equal times.
    pub disjoint_form: Option<f64>,
    pub warnings: Vec<String>,
}

/// Table `p(λα, λβ)` with rows and columns in descending `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationResult {
    pub kind: ResultKind,
    pub backend: BackendKind,
    pub spin: f64,
    pub lambdas: Vec<f64>,
    pub joint: Vec<Vec<f64>>,
    pub marginal_a: Vec<f64>,
    pub marginal_b: Vec<f64>,
    pub value: f64,
    pub diagnostics: Diagnostics,
}

impl CorrelationResult {
    pub(crate) fn from_table(
        kind: ResultKind,
        backend: BackendKind,
        spin: SpinValue,
        joint: Vec<Vec<f64>>,
        marginal_a: Vec<f64>,
        diagnostics: Diagnostics,
    ) -> Self {
        let lambdas: Vec<f64> = spin.projections().map(HalfInt::value).collect();
        let marginal_b = (0..lambdas.len())
            .map(|j| joint.iter().map(|row| row[j]).sum())
            .collect();
        let value = joint
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, p)| lambdas[i] * lambdas[j] * p)
                    .sum::<f64>()
            })
            .sum();
        CorrelationResult {
            kind,
            backend,
            spin: spin.value(),
            lambdas,
            joint,
            marginal_a,
            marginal_b,
            value,
            diagnostics,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.joint.iter().flatten().sum()
    }
}

/// `Σ conj(ψ_{m'})(O_α)_{m'α mα}(O_β)_{m'β mβ} ψ_m` restricted to `A × B`.
struct ComponentGram {
    dim: usize,
    entries: Vec<C64>,
}

impl ComponentGram {
    fn new(state: &TwoParticleState, a: &Region, b: &Region) -> Self {
        let s = state.spin();
        let dim = s.dim();
        let labels: Vec<(HalfInt, HalfInt)> = s
            .projections()
            .flat_map(|ma| s.projections().map(move |mb| (ma, mb)))
            .collect();
        let comps: Vec<_> = labels.iter().map(|(ma, mb)| state.component(*ma, *mb)).collect();
        let mut entries = vec![C64::new(0.0, 0.0); labels.len() * labels.len()];
        for (i, f) in comps.iter().enumerate() {
            for (j, g) in comps.iter().enumerate() {
                if !f.is_empty() && !g.is_empty() {
                    entries[i * labels.len() + j] = component_overlap(f, g, a, b);
                }
            }
        }
        ComponentGram { dim, entries }
    }

    /// `∫∫ conj(ψ_{m'α m'β}) ψ_{mα mβ}` by spin indices.
    fn get(&self, mpa: usize, mpb: usize, ma: usize, mb: usize) -> C64 {
        let n = self.dim * self.dim;
        self.entries[(mpa * self.dim + mpb) * n + ma * self.dim + mb]
    }

    fn expectation(&self, oa: &SpinMatrix, ob: &SpinMatrix) -> C64 {
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for mpa in 0..d {
            for mpb in 0..d {
                for ma in 0..d {
                    for mb in 0..d {
                        let w = oa.get(mpa, ma) * ob.get(mpb, mb);
                        if w != C64::new(0.0, 0.0) {
                            acc += w * self.get(mpa, mpb, ma, mb);
                        }
                    }
                }
            }
        }
        acc
    }
}

fn analytic_joint(scenario: &Scenario) -> Result<CorrelationResult> {
    scenario.require_equal_times("the analytic backend")?;
    let state = &scenario.state;
    let s = state.spin();
    let (a, b) = (
        scenario.observer_a.effective_region(),
        scenario.observer_b.effective_region(),
    );
    let gram = ComponentGram::new(state, &a, &b);
    let gram_a = ComponentGram::new(state, &a, &Region::AllSpace);
    let proj =
        |n: &Direction| -> Result<Vec<SpinMatrix>> { s.projections().map(|l| spin_projector(n, s, l)).collect() };
    let pa = proj(&scenario.observer_a.direction)?;
    let pb = proj(&scenario.observer_b.direction)?;
    let identity = SpinMatrix::identity(s.dim());
    let joint = pa
        .iter()
        .map(|x| pb.iter().map(|y| gram.expectation(x, y).re.clamp(0.0, 1.0)).collect())
        .collect();
    let marginal_a = pa
        .iter()
        .map(|x| gram_a.expectation(x, &identity).re.clamp(0.0, 1.0))
        .collect();
    Ok(CorrelationResult::from_table(
        ResultKind::Distinguishable,
        BackendKind::Analytic,
        s,
        joint,
        marginal_a,
        Diagnostics::default(),
    ))
}

/// `p(λα, λβ) = p(λα) p(λβ | λα)` from the sequential measurement.
pub fn joint_probabilities(scenario: &Scenario) -> Result<CorrelationResult> {
    match &scenario.backend {
        Backend::Analytic => analytic_joint(scenario),
        Backend::Grid(g) => grid::joint_probabilities_grid(scenario, g),
    }
}

/// `C^{αβ} = Σ λα λβ p(λα, λβ)` with A measuring α.
pub fn correlation_distinguishable(scenario: &Scenario) -> Result<CorrelationResult> {
    joint_probabilities(scenario)
}

/// `C^{αβ} + C^{βα}`.
pub fn correlation_symmetrized(scenario: &Scenario) -> Result<f64> {
    let forward = correlation_distinguishable(scenario)?.value;
    let backward = correlation_distinguishable(&scenario.exchanged())?.value;
    Ok(forward + backward)
}

/// `⟨ψ|(a·S) ⊗ (b·S)|ψ⟩` with both position integrals restricted to the
/// effective regions, evaluated in closed form.
pub fn correlation_equal_time(scenario: &Scenario) -> Result<f64> {
    scenario.require_equal_times("the equal-time correlation")?;
    let s = scenario.state.spin();
    let gram = ComponentGram::new(
        &scenario.state,
        &scenario.observer_a.effective_region(),
        &scenario.observer_b.effective_region(),
    );
    let sa = spin_component(&scenario.observer_a.direction, s);
    let sb = spin_component(&scenario.observer_b.direction, s);
    Ok(gram.expectation(&sa, &sb).re)
}

/// `-(1/2) cos θ_ab W_s`, `W_s = ∫_A∫_B |ψ_{+-}|²` over the effective regions.
pub fn singlet_closed_form(scenario: &Scenario) -> Result<f64> {
    scenario.require_equal_times("the singlet closed form")?;
    if !scenario.state.is_singlet_class() {
        return Err(Error::invalid("state", "not a spin-1/2 singlet-class state"));
    }
    let (p, m) = (HalfInt::PLUS_HALF, HalfInt::MINUS_HALF);
    let comp = scenario.state.component(p, m);
    let weight = component_overlap(
        &comp,
        &comp,
        &scenario.observer_a.effective_region(),
        &scenario.observer_b.effective_region(),
    )
    .re;
    Ok(-0.5 * scenario.angle().cos() * weight)
}

/// Closed form for triplet-class spin-1/2 states (`ψ_{+-} = ψ_{-+}`), written
/// out in the three spatial components `ψ_{++}`, `ψ_{+-}`, `ψ_{--}`.
pub fn triplet_closed_form(scenario: &Scenario) -> Result<f64> {
    scenario.require_equal_times("the triplet closed form")?;
    let state = &scenario.state;
    if !state.is_triplet_class() {
        return Err(Error::invalid("state", "not a spin-1/2 triplet-class state"));
    }
    let (p, m) = (HalfInt::PLUS_HALF, HalfInt::MINUS_HALF);
    let (ra, rb) = (
        scenario.observer_a.effective_region(),
        scenario.observer_b.effective_region(),
    );
    let (pp, zero, mm) = (state.component(p, p), state.component(p, m), state.component(m, m));
    let overlap = |f, g| component_overlap(f, g, &ra, &rb);
    let i_pp = overlap(&pp, &pp).re;
    let i_mm = overlap(&mm, &mm).re;
    let i_00 = overlap(&zero, &zero).re;
    let x_p0 = overlap(&pp, &zero);
    let x_0m = overlap(&zero, &mm);
    let x_pm = overlap(&pp, &mm);
    let (a, b) = (scenario.observer_a.direction, scenario.observer_b.direction);
    let (ca, sa, fa) = (a.theta().cos(), a.theta().sin(), a.phi());
    let (cb, sb, fb) = (b.theta().cos(), b.theta().sin(), b.phi());
    let ea = C64::from_polar(1.0, -fa);
    let eb = C64::from_polar(1.0, -fb);
    let sum = ca * cb * (i_pp + i_mm - 2.0 * i_00)
        + 2.0 * sa * sb * (fa - fb).cos() * i_00
        + 2.0 * ((ca * sb * eb + sa * cb * ea) * x_p0).re
        - 2.0 * ((sa * cb * ea + ca * sb * eb) * x_0m).re
        + 2.0 * (sa * sb * ea * eb * x_pm).re;
    Ok(0.25 * sum)
}

/// Identical-particle correlation on the lattice backend.
pub fn correlation_identical(scenario: &Scenario) -> Result<IdenticalOutcome> {
    if scenario.state.statistics() == Statistics::Distinguishable {
        return Err(Error::invalid(
            "state.statistics",
            "identical-particle correlation needs boson or fermion statistics",
        ));
    }
    match &scenario.backend {
        Backend::Grid(g) => grid::correlation_identical_grid(scenario, g),
        Backend::Analytic => Err(Error::Unsupported(
            "identical-particle correlation runs on the grid backend only".into(),
        )),
    }
}

/// `|C(a,b) - C(a,b') + C(a',b) + C(a',b')|`.
pub fn chsh_value(scenario: &Scenario, a: Direction, a2: Direction, b: Direction, b2: Direction) -> Result<f64> {
    let c = |x: Direction, y: Direction| -> Result<f64> {
        Ok(correlation_distinguishable(&scenario.with_directions(x, y))?.value)
    };
    Ok((c(a, b)? - c(a, b2)? + c(a2, b)? + c(a2, b2)?).abs())
}
