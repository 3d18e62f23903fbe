use std::f64::consts::PI;

use epr_core::corpus;
use epr_core::spin::{spin_component, spin_projector};
use epr_core::{
    correlation_distinguishable, correlation_equal_time, singlet_closed_form, Backend, Direction, Region, SpinValue,
};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..=PI, 0.0..2.0 * PI).prop_map(|(t, p)| Direction::new(t, p).unwrap())
}

fn interval() -> impl Strategy<Value = Region> {
    (-6.0..4.0f64, 0.2..5.0f64).prop_map(|(lo, len)| Region::interval(lo, lo + len).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projectors_resolve_the_component(n in direction(), twice in 1u32..5) {
        let s = SpinValue::from_twice(twice);
        let component = spin_component(&n, s);
        let mut sum = nalgebra::DMatrix::zeros(s.dim(), s.dim());
        for lambda in s.projections() {
            let p = spin_projector(&n, s, lambda).unwrap();
            let square = p.matrix() * p.matrix();
            prop_assert!((square - p.matrix()).iter().all(|z| z.norm() < 1e-12));
            sum += p.matrix() * epr_core::C64::new(lambda.value(), 0.0);
        }
        prop_assert!((sum - component.matrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn full_space_singlet_follows_cosine(a in direction(), b in direction()) {
        let sc = corpus::full_space(corpus::desk_state(), a, b);
        let c = correlation_distinguishable(&sc).unwrap().value;
        prop_assert!((c + a.angle_to(&b).cos() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn equal_time_paths_agree(ra in interval(), rb in interval(), a in direction(), b in direction()) {
        let sc = corpus::with_regions(corpus::desk_state(), ra, rb, a, b, Backend::Analytic);
        let table = correlation_distinguishable(&sc).unwrap();
        let direct = correlation_equal_time(&sc).unwrap();
        let closed = singlet_closed_form(&sc).unwrap();
        prop_assert!((table.value - direct).abs() < 1e-12);
        prop_assert!((table.value - closed).abs() < 1e-12);
        prop_assert!(table.joint.iter().flatten().all(|p| *p >= -1e-15));
        prop_assert!(table.total_mass() <= 1.0 + 1e-12);
    }

    #[test]
    fn moving_observer_sees_shifted_region(v in -2.0..2.0f64, t in 0.0..2.0f64, a in direction()) {
        let mut moving = corpus::desk_scenario(a, Direction::z(), Backend::Analytic);
        moving.observer_a.velocity = vec![v];
        moving.observer_a.time = t;
        moving.observer_b.time = t;
        let mut rest = corpus::desk_scenario(a, Direction::z(), Backend::Analytic);
        rest.observer_a.region = Region::interval(-4.0 - v * t, -1.0 - v * t).unwrap();
        rest.observer_a.time = t;
        rest.observer_b.time = t;
        let lhs = correlation_distinguishable(&moving).unwrap().value;
        let rhs = correlation_distinguishable(&rest).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-15);
    }
}
