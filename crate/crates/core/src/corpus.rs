//! Reference scenarios shared by the validation suite, benches and tests.

use std::f64::consts::FRAC_PI_3;

use crate::correlation::{Backend, ObserverSpec, Scenario};
use crate::measurement::Region;
use crate::spin::{Direction, HalfInt, SpinValue, C64};
use crate::states::{make_singlet, GaussianPacket, StateTerm, Statistics, TwoParticleState};

pub fn packet(center: f64, width: f64) -> GaussianPacket {
    GaussianPacket::centered(center, width).expect("valid packet")
}

/// Singlet with `φ` at -2 and `χ` at +2, both of width 0.5, unit masses.
pub fn desk_state() -> TwoParticleState {
    make_singlet(&packet(-2.0, 0.5), &packet(2.0, 0.5), (1.0, 1.0)).expect("valid singlet")
}

/// Observers at rest with `A = [-4, -1]`, `B = [1, 4]`.
pub fn desk_scenario(a: Direction, b: Direction, backend: Backend) -> Scenario {
    with_regions(
        desk_state(),
        Region::interval(-4.0, -1.0).unwrap(),
        Region::interval(1.0, 4.0).unwrap(),
        a,
        b,
        backend,
    )
}

pub fn with_regions(
    state: TwoParticleState,
    ra: Region,
    rb: Region,
    a: Direction,
    b: Direction,
    backend: Backend,
) -> Scenario {
    let d = state.dimension();
    Scenario::new(
        state,
        ObserverSpec::at_rest(ra, a, d),
        ObserverSpec::at_rest(rb, b, d),
        backend,
    )
    .expect("valid scenario")
}

pub fn full_space(state: TwoParticleState, a: Direction, b: Direction) -> Scenario {
    with_regions(state, Region::AllSpace, Region::AllSpace, a, b, Backend::Analytic)
}

/// Desk scenario with observer A moving: `v_A = 1`, both measuring at `t = 1`.
pub fn boosted_desk(backend: Backend) -> Scenario {
    let mut sc = desk_scenario(Direction::z(), Direction::z(), backend);
    sc.observer_a.velocity = vec![1.0];
    sc.observer_a.time = 1.0;
    sc.observer_b.time = 1.0;
    sc
}

/// Triplet-class state with distinct spatial parts for `ψ_{++}`, `ψ_{+-} = ψ_{-+}`, `ψ_{--}`.
pub fn generic_triplet() -> TwoParticleState {
    let (p, m) = (HalfInt::PLUS_HALF, HalfInt::MINUS_HALF);
    let term = |amp: C64, a: GaussianPacket, b: GaussianPacket, ma, mb| StateTerm {
        amplitude: amp,
        alpha: a,
        beta: b,
        m_alpha: ma,
        m_beta: mb,
    };
    let moving = |c: f64, w: f64, k: f64| GaussianPacket::new(vec![c], vec![w], vec![k]).unwrap();
    let terms = vec![
        term(C64::new(0.6, 0.0), moving(-2.2, 0.5, 0.3), moving(1.8, 0.6, 0.0), p, p),
        term(C64::new(0.5, 0.2), moving(-1.8, 0.6, 0.0), moving(2.3, 0.5, -0.4), p, m),
        term(C64::new(0.5, 0.2), moving(-1.8, 0.6, 0.0), moving(2.3, 0.5, -0.4), m, p),
        term(
            C64::new(-0.3, 0.4),
            moving(-2.0, 0.45, -0.2),
            moving(2.0, 0.55, 0.2),
            m,
            m,
        ),
    ];
    TwoParticleState::new(SpinValue::HALF, (1.0, 1.0), Statistics::Distinguishable, terms).expect("valid triplet")
}

/// Equal-time scenarios used for backend agreement and convergence.
pub fn equal_time_corpus() -> Vec<(&'static str, Scenario)> {
    let tilted = Direction::new(FRAC_PI_3, 0.7).unwrap();
    let mut out = vec![
        (
            "desk z-z",
            desk_scenario(Direction::z(), Direction::z(), Backend::Analytic),
        ),
        (
            "desk z-tilted",
            desk_scenario(Direction::z(), tilted, Backend::Analytic),
        ),
        ("desk boosted", boosted_desk(Backend::Analytic)),
    ];
    out.push((
        "generic triplet",
        with_regions(
            generic_triplet(),
            Region::interval(-3.0, -1.5).unwrap(),
            Region::interval(1.0, 2.5).unwrap(),
            Direction::new(0.4, 1.0).unwrap(),
            Direction::new(2.0, 4.5).unwrap(),
            Backend::Analytic,
        ),
    ));
    out
}
