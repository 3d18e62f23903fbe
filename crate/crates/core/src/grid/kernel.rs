//! Lattice checks of the frame-change and kernel identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GridConfig, LatticeState, Particle};
use crate::error::{Error, Result};
use crate::measurement::Region;
use crate::spin::{spin_projector, Direction, HalfInt, SpinMatrix, SpinValue, C64};

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn masked_projection(
    psi: &LatticeState,
    region: &Region,
    proj: &SpinMatrix,
    particle: Particle,
) -> Result<LatticeState> {
    let mask = psi.grid.region_mask(region)?;
    let mut out = psi.clone();
    out.apply_local(particle, Some(&mask), Some(proj));
    Ok(out)
}

/// Single-particle test states for particle α (β parked at one site).
fn covariance_states(
    grid: &GridConfig,
    spin: SpinValue,
    region: &Region,
    shift: &[f64],
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Result<Vec<LatticeState>> {
    let p = grid.sites();
    let l = grid.half_extent();
    let h = grid.spacing();
    let commensurate = grid.is_commensurate(shift);
    let stays: Vec<bool> = (0..p)
        .map(|s| {
            grid.site_position(s)
                .iter()
                .zip(shift)
                .all(|(y, s)| (-l..l).contains(&(y + s)))
        })
        .collect();
    let moved = region.shifted(&shift.iter().map(|s| -s).collect::<Vec<_>>());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut psi = LatticeState::zeros(*grid, spin, (1.0, 1.0));
        if commensurate {
            for site in (0..p).filter(|s| stays[*s]) {
                for m in 0..spin.dim() {
                    let idx = psi.index(m, 0, site, 0);
                    psi.amplitudes[idx] = random_c64(rng);
                }
            }
        } else {
            // smooth packets kept well away from every edge the check can see
            let width = 4.0 * h;
            let margin = 12.0 * width;
            let band = grid.band_cells() as f64 * h;
            let clear = |c: f64, axis: usize| -> bool {
                let inside = |x: f64| x - margin > -l + band && x + margin < l - band;
                let away = |r: &Region| {
                    let (lo, hi) = r.bounds(axis);
                    (c - lo).abs() > margin && (c - hi).abs() > margin
                };
                inside(c) && inside(c + shift[axis]) && away(region) && away(&moved)
            };
            let mut centres = Vec::new();
            for _attempt in 0..10_000 {
                if centres.len() == 3 {
                    break;
                }
                let c: Vec<f64> = (0..grid.dimension()).map(|_| rng.gen_range(-l..l)).collect();
                if c.iter().enumerate().all(|(a, c)| clear(*c, a)) {
                    centres.push(c);
                }
            }
            if centres.is_empty() {
                return Err(Error::Unsupported("no room for smooth covariance test states".into()));
            }
            let weights: Vec<Vec<C64>> = centres
                .iter()
                .map(|_| (0..spin.dim()).map(|_| random_c64(rng)).collect())
                .collect();
            for site in 0..p {
                let x = grid.site_position(site);
                for (c, w) in centres.iter().zip(&weights) {
                    let r2: f64 = x.iter().zip(c).map(|(x, c)| (x - c) * (x - c)).sum();
                    let g = (-r2 / (4.0 * width * width)).exp();
                    for (m, wm) in w.iter().enumerate() {
                        let idx = psi.index(m, 0, site, 0);
                        psi.amplitudes[idx] += wm * g;
                    }
                }
            }
        }
        out.push(psi.normalized()?);
    }
    Ok(out)
}

/// `max ‖W†Π_{Ω,n}^λ W ψ - Π_{Ω-vt,n}^λ ψ‖` over random states, where `W`
/// changes into the frame of an observer moving with `v` at time `t`.
///
/// Commensurate shifts use white-noise states; otherwise smooth states whose
/// support avoids the region edges are used, since a fractional-cell shift of
/// a sharp mask is not itself a mask.
pub fn covariance_check(
    region: &Region,
    n: &Direction,
    lambda: HalfInt,
    v: &[f64],
    t: f64,
    grid: &GridConfig,
    spin: SpinValue,
) -> Result<f64> {
    if v.len() != grid.dimension() {
        return Err(Error::invalid("velocity", "dimension does not match the lattice"));
    }
    let proj = spin_projector(n, spin, lambda)?;
    let shift: Vec<f64> = v.iter().map(|v| v * t).collect();
    let back: Vec<f64> = v.iter().map(|v| -v).collect();
    let moved = region.shifted(&back.iter().map(|b| b * t).collect::<Vec<_>>());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for psi in covariance_states(grid, spin, region, &shift, &mut rng, 3)? {
        let mut w = psi.clone();
        w.boost_unchecked(Particle::Alpha, &back, t);
        let mut w = masked_projection(&w, region, &proj, Particle::Alpha)?;
        w.boost_unchecked(Particle::Alpha, v, t);
        let direct = masked_projection(&psi, &moved, &proj, Particle::Alpha)?;
        worst = worst.max(w.distance(&direct));
    }
    Ok(worst)
}

/// Measurement on particle β after free evolution, as seen by a moving observer.
#[derive(Clone, Debug)]
pub struct KernelProbe {
    pub region: Region,
    pub direction: Direction,
    pub lambda: HalfInt,
    pub velocity: Vec<f64>,
    pub time: f64,
    pub tau: f64,
}

/// Largest gap, over `count` random states, between the probability from the
/// step sequence (evolve, change frame, project) and the same probability from
/// the momentum-space kernel of the conjugated projector with the position
/// integral done in closed form.
pub fn kernel_identity_deviation(
    grid: &GridConfig,
    spin: SpinValue,
    mass: f64,
    probe: &KernelProbe,
    seed: u64,
    count: usize,
) -> Result<f64> {
    let p = grid.sites();
    let n = grid.points();
    let dim = grid.dimension();
    let d = spin.dim();
    if probe.velocity.len() != dim {
        return Err(Error::invalid("velocity", "dimension does not match the lattice"));
    }
    let proj = spin_projector(&probe.direction, spin, probe.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let back: Vec<f64> = probe.velocity.iter().map(|v| -v).collect();

    let k: Vec<f64> = (0..n).map(|i| grid.wavenumber(i)).collect();
    let x: Vec<f64> = (0..n).map(|i| grid.coordinate(i)).collect();
    let dft: Vec<C64> = (0..n * n).map(|r| C64::from_polar(1.0, -k[r / n] * x[r % n])).collect();
    let ranges: Vec<_> = (0..dim).map(|a| grid.axis_range(&probe.region, a)).collect();
    grid.check_region(&probe.region)?;
    // per-axis (1/N) Σ_{x∈Ω} e^{i(x - tv)(p - k)}
    let geometric: Vec<Vec<C64>> = (0..dim)
        .map(|a| {
            let r = &ranges[a];
            let count = r.len();
            let shift = probe.time * probe.velocity[a];
            (0..n * n)
                .map(|idx| {
                    let delta = k[idx % n] - k[idx / n];
                    if count == 0 {
                        return C64::new(0.0, 0.0);
                    }
                    let sum = if delta == 0.0 {
                        C64::new(count as f64, 0.0)
                    } else {
                        let step = C64::from_polar(1.0, grid.spacing() * delta);
                        C64::from_polar(1.0, x[r.start] * delta) * (C64::new(1.0, 0.0) - step.powu(count as u32))
                            / (C64::new(1.0, 0.0) - step)
                    };
                    sum * C64::from_polar(1.0, -shift * delta) / n as f64
                })
                .collect()
        })
        .collect();
    let axis = |site: usize, a: usize| grid.axis_index(site, a);
    let dispersion: Vec<C64> = (0..p)
        .map(|s| {
            let k2: f64 = (0..dim).map(|a| k[axis(s, a)].powi(2)).sum();
            C64::from_polar(1.0, -probe.tau * k2 / (2.0 * mass))
        })
        .collect();

    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let mut psi = LatticeState::zeros(*grid, spin, (mass, mass));
        let mut beta = vec![C64::new(0.0, 0.0); d * p];
        for b in beta.iter_mut() {
            *b = random_c64(&mut rng);
        }
        let b2: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
        for b in beta.iter_mut() {
            *b /= b2.sqrt();
        }
        // α sits on one site with spin index 0, so ψ is β up to the lattice weight
        let scale = 1.0 / grid.cell_volume();
        for m in 0..d {
            for site in 0..p {
                let idx = psi.index(0, m, 0, site);
                psi.amplitudes[idx] = beta[m * p + site] * scale;
            }
        }

        let mut stepped = psi.clone();
        stepped.evolve_unchecked(probe.tau);
        stepped.boost_unchecked(Particle::Beta, &back, probe.time);
        let stepped = masked_projection(&stepped, &probe.region, &proj, Particle::Beta)?;
        let by_steps = stepped.norm_squared();

        let xi: Vec<Vec<C64>> = (0..d)
            .map(|m| {
                (0..p)
                    .map(|kk| {
                        let mut acc = C64::new(0.0, 0.0);
                        for xs in 0..p {
                            let mut ph = C64::new(1.0, 0.0);
                            for a in 0..dim {
                                ph *= dft[axis(kk, a) * n + axis(xs, a)];
                            }
                            acc += ph * beta[m * p + xs];
                        }
                        acc * dispersion[kk] / (p as f64).sqrt()
                    })
                    .collect()
            })
            .collect();
        let mut by_kernel = C64::new(0.0, 0.0);
        for (mp, xi_mp) in xi.iter().enumerate() {
            let eta: Vec<C64> = (0..p)
                .map(|kk| {
                    let mut acc = C64::new(0.0, 0.0);
                    for (pp, x) in xi_mp.iter().enumerate() {
                        let mut g = C64::new(1.0, 0.0);
                        for (a, table) in geometric.iter().enumerate() {
                            g *= table[axis(kk, a) * n + axis(pp, a)];
                        }
                        acc += g * x;
                    }
                    acc
                })
                .collect();
            for (m, xi_m) in xi.iter().enumerate() {
                let c = proj.get(m, mp);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let dot: C64 = xi_m.iter().zip(&eta).map(|(a, b)| a.conj() * b).sum();
                by_kernel += c * dot;
            }
        }
        worst = worst.max((by_kernel.re - by_steps).abs().max(by_kernel.im.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commensurate_shift_is_exact() {
        let g = GridConfig::new(1, 128, 8.0).unwrap();
        let region = Region::interval(-2.0, 3.0).unwrap();
        let n = Direction::new(0.4, 2.0).unwrap();
        // t·v = 1.25 = 10 cells
        let dev = covariance_check(&region, &n, HalfInt::PLUS_HALF, &[0.5], 2.5, &g, SpinValue::HALF).unwrap();
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn generic_shift_on_smooth_states() {
        let g = GridConfig::new(1, 256, 16.0).unwrap();
        let region = Region::interval(-2.0, 3.0).unwrap();
        let dev = covariance_check(
            &region,
            &Direction::x(),
            HalfInt::MINUS_HALF,
            &[0.37],
            1.1,
            &g,
            SpinValue::HALF,
        )
        .unwrap();
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn kernel_matches_steps() {
        let g = GridConfig::new(1, 64, 8.0).unwrap();
        let probe = KernelProbe {
            region: Region::interval(0.5, 4.0).unwrap(),
            direction: Direction::new(1.0, 0.3).unwrap(),
            lambda: HalfInt::PLUS_HALF,
            velocity: vec![0.7],
            time: 1.3,
            tau: 0.9,
        };
        let dev = kernel_identity_deviation(&g, SpinValue::HALF, 1.0, &probe, 3, 3).unwrap();
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn kernel_matches_steps_in_two_dimensions() {
        let g = GridConfig::new(2, 16, 4.0).unwrap();
        let probe = KernelProbe {
            region: Region::new_box(vec![-1.0, 0.0], vec![2.0, 3.0]).unwrap(),
            direction: Direction::z(),
            lambda: HalfInt::MINUS_HALF,
            velocity: vec![0.3, -0.6],
            time: 0.8,
            tau: 0.5,
        };
        let dev = kernel_identity_deviation(&g, SpinValue::HALF, 2.0, &probe, 5, 2).unwrap();
        assert!(dev < 1e-12, "{dev}");
    }
}
