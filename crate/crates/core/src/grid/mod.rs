//! Spectral lattice representation of two-particle states.
//!
//! Points are cell-centred, `x_j = -L + (j + 1/2) h` with `h = 2L/N`, so box
//! edges snapped to cell boundaries give midpoint-rule integrals. Translations
//! and free evolution are applied exactly in Fourier space; the lattice is
//! periodic, so a boundary band is watched for leaking probability.

mod dense;
mod kernel;
mod pipeline;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::measurement::{Factor, Luders, PairObservable, Region};
use crate::spin::{direction_rotation, spin_projector, Direction, HalfInt, SpinMatrix, SpinValue, C64};
use crate::states::TwoParticleState;

pub use dense::{action_matrix, DensePair};
pub use kernel::{covariance_check, kernel_identity_deviation, KernelProbe};
pub use pipeline::{correlation_identical_grid, joint_probabilities_grid, IdenticalOutcome};

/// Relative mass in the boundary band above which a warning is raised.
pub const BOUNDARY_WARN: f64 = 1e-10;
/// Relative mass in the boundary band (or across the seam) that aborts a computation.
pub const BOUNDARY_FAIL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    dimension: usize,
    points: usize,
    half_extent: f64,
}

impl GridConfig {
    /// `points` per axis must be a power of two, at least 16.
    pub fn new(dimension: usize, points: usize, half_extent: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::invalid("grid.dimension", format!("{dimension} not in 1..=3")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::invalid(
                "grid.n",
                format!("{points} is not a power of two >= 16"),
            ));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::invalid("grid.extent", format!("{half_extent} is not positive")));
        }
        Ok(GridConfig {
            dimension,
            points,
            half_extent,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Lattice sites per particle, `N^d`.
    pub fn sites(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_extent + (i as f64 + 0.5) * self.spacing()
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        let n = self.points as f64;
        let j = if i < self.points / 2 { i as f64 } else { i as f64 - n };
        std::f64::consts::PI * j / self.half_extent
    }

    fn axis_stride(&self, axis: usize) -> usize {
        self.points.pow((self.dimension - 1 - axis) as u32)
    }

    pub fn axis_index(&self, site: usize, axis: usize) -> usize {
        (site / self.axis_stride(axis)) % self.points
    }

    pub fn site_position(&self, site: usize) -> Vec<f64> {
        (0..self.dimension)
            .map(|a| self.coordinate(self.axis_index(site, a)))
            .collect()
    }

    /// Cells whose centres lie in the region after snapping its edges to cell boundaries.
    pub fn axis_range(&self, region: &Region, axis: usize) -> std::ops::Range<usize> {
        let (lo, hi) = region.bounds(axis);
        if region.is_empty() {
            return 0..0;
        }
        let snap = |x: f64| -> usize {
            if x == f64::NEG_INFINITY {
                0
            } else if x == f64::INFINITY {
                self.points
            } else {
                ((x + self.half_extent) / self.spacing())
                    .round()
                    .clamp(0.0, self.points as f64) as usize
            }
        };
        snap(lo)..snap(hi).max(snap(lo))
    }

    fn check_region(&self, region: &Region) -> Result<()> {
        match region.dimension() {
            Some(d) if d != self.dimension => Err(Error::invalid(
                "region",
                format!("region has {d} axes, lattice has {}", self.dimension),
            )),
            _ => Ok(()),
        }
    }

    pub fn region_mask(&self, region: &Region) -> Result<Vec<bool>> {
        self.check_region(region)?;
        let ranges: Vec<_> = (0..self.dimension).map(|a| self.axis_range(region, a)).collect();
        Ok((0..self.sites())
            .map(|s| {
                ranges
                    .iter()
                    .enumerate()
                    .all(|(a, r)| r.contains(&self.axis_index(s, a)))
            })
            .collect())
    }

    /// Width of the watched band at each lattice edge, in cells.
    pub fn band_cells(&self) -> usize {
        (self.points / 32).max(1)
    }

    fn in_band(&self, site: usize) -> bool {
        let b = self.band_cells();
        (0..self.dimension).any(|a| {
            let i = self.axis_index(site, a);
            i < b || i >= self.points - b
        })
    }

    /// Whether every component of `shift` is a whole number of cells.
    pub fn is_commensurate(&self, shift: &[f64]) -> bool {
        shift.iter().all(|s| {
            let cells = s / self.spacing();
            (cells - cells.round()).abs() < 1e-9
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Particle {
    Alpha,
    Beta,
}

/// Two-particle amplitudes on a lattice, indexed `((mα·D + mβ)·P + iα)·P + iβ`.
#[derive(Clone, Debug)]
pub struct LatticeState {
    grid: GridConfig,
    spin: SpinValue,
    masses: (f64, f64),
    time: f64,
    amplitudes: Vec<C64>,
    peak_boundary: f64,
}

impl LatticeState {
    pub fn zeros(grid: GridConfig, spin: SpinValue, masses: (f64, f64)) -> Self {
        let d = spin.dim();
        let p = grid.sites();
        LatticeState {
            grid,
            spin,
            masses,
            time: 0.0,
            amplitudes: vec![C64::new(0.0, 0.0); d * d * p * p],
            peak_boundary: 0.0,
        }
    }

    pub fn from_amplitudes(
        grid: GridConfig,
        spin: SpinValue,
        masses: (f64, f64),
        amplitudes: Vec<C64>,
    ) -> Result<Self> {
        let mut s = Self::zeros(grid, spin, masses);
        if amplitudes.len() != s.amplitudes.len() {
            return Err(Error::invalid(
                "amplitudes",
                format!("expected {} values, got {}", s.amplitudes.len(), amplitudes.len()),
            ));
        }
        s.amplitudes = amplitudes;
        Ok(s)
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    pub fn masses(&self) -> (f64, f64) {
        self.masses
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    /// Largest relative boundary-band mass seen by checked operations so far.
    pub fn peak_boundary_mass(&self) -> f64 {
        self.peak_boundary
    }

    pub fn index(&self, ma: usize, mb: usize, ia: usize, ib: usize) -> usize {
        let d = self.spin.dim();
        let p = self.grid.sites();
        ((ma * d + mb) * p + ia) * p + ib
    }

    fn weight(&self) -> f64 {
        self.grid.cell_volume().powi(2)
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.weight()
    }

    pub fn inner(&self, other: &LatticeState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.weight()
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
        self
    }

    pub fn normalized(self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2.is_nan() || n2 <= 0.0 {
            return Err(Error::ZeroProbability { probability: n2 });
        }
        Ok(self.scaled(1.0 / n2.sqrt()))
    }

    fn add_scaled(&mut self, other: &LatticeState, c: f64) {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += c * b;
        }
    }

    /// Max-abs difference of amplitudes, scaled to the lattice norm.
    pub fn distance(&self, other: &LatticeState) -> f64 {
        let diff: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (diff * self.weight()).sqrt()
    }

    /// Relative probability in the boundary band of either particle.
    pub fn boundary_mass(&self) -> f64 {
        self.band_mass(&[Particle::Alpha, Particle::Beta])
    }

    /// Relative probability with the given particles' coordinates in the boundary band.
    pub fn band_mass(&self, particles: &[Particle]) -> f64 {
        let p = self.grid.sites();
        let band: Vec<bool> = (0..p).map(|s| self.grid.in_band(s)).collect();
        let (watch_a, watch_b) = (
            particles.contains(&Particle::Alpha),
            particles.contains(&Particle::Beta),
        );
        let mut total = 0.0;
        let mut edge = 0.0;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            total += w;
            let ib = idx % p;
            let ia = (idx / p) % p;
            if (watch_a && band[ia]) || (watch_b && band[ib]) {
                edge += w;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    fn record_boundary(self, context: &str) -> Result<Self> {
        self.record_band(&[Particle::Alpha, Particle::Beta], context)
    }

    fn record_band(mut self, particles: &[Particle], context: &str) -> Result<Self> {
        let mass = self.band_mass(particles);
        if mass >= BOUNDARY_FAIL {
            return Err(Error::BoundaryMass {
                mass,
                limit: BOUNDARY_FAIL,
                context: context.to_string(),
            });
        }
        self.peak_boundary = self.peak_boundary.max(mass);
        Ok(self)
    }

    fn site_stride(&self, particle: Particle) -> usize {
        match particle {
            Particle::Alpha => self.grid.sites(),
            Particle::Beta => 1,
        }
    }

    fn spin_stride(&self, particle: Particle) -> usize {
        let p = self.grid.sites();
        match particle {
            Particle::Alpha => self.spin.dim() * p * p,
            Particle::Beta => p * p,
        }
    }

    /// Calls `f(site, base)` for every fibre of `particle`'s spin index; the
    /// amplitude with spin index `m` sits at `base + m·spin_stride`.
    fn for_each_fibre(&self, particle: Particle, mut f: impl FnMut(usize, usize)) {
        let d = self.spin.dim();
        let p = self.grid.sites();
        for other in 0..d {
            for ia in 0..p {
                for ib in 0..p {
                    match particle {
                        Particle::Alpha => f(ia, self.index(0, other, ia, ib)),
                        Particle::Beta => f(ib, self.index(other, 0, ia, ib)),
                    }
                }
            }
        }
    }

    /// `(M_spin · 1_mask)` on one particle; `None` means identity for that part.
    pub fn apply_local(&mut self, particle: Particle, mask: Option<&[bool]>, op: Option<&SpinMatrix>) {
        let d = self.spin.dim();
        let stride = self.spin_stride(particle);
        let mut fibre = vec![C64::new(0.0, 0.0); d];
        let mut amps = std::mem::take(&mut self.amplitudes);
        self.for_each_fibre(particle, |site, base| {
            if let Some(mask) = mask {
                if !mask[site] {
                    for m in 0..d {
                        amps[base + m * stride] = C64::new(0.0, 0.0);
                    }
                    return;
                }
            }
            if let Some(op) = op {
                for (m, f) in fibre.iter_mut().enumerate() {
                    *f = amps[base + m * stride];
                }
                for m in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for (mp, f) in fibre.iter().enumerate() {
                        acc += op.get(m, mp) * f;
                    }
                    amps[base + m * stride] = acc;
                }
            }
        });
        self.amplitudes = amps;
    }

    pub fn apply_factor(&mut self, particle: Particle, factor: &Factor) -> Result<()> {
        match factor {
            Factor::Identity => {}
            Factor::Region(region) => {
                let mask = self.grid.region_mask(region)?;
                self.apply_local(particle, Some(&mask), None);
            }
            Factor::Localized(p) => {
                if p.spin != self.spin {
                    return Err(Error::invalid("projector", "spin does not match the state"));
                }
                let mask = self.grid.region_mask(&p.region)?;
                let proj = spin_projector(&p.direction, p.spin, p.lambda)?;
                self.apply_local(particle, Some(&mask), Some(&proj));
            }
        }
        Ok(())
    }

    /// `Σ_i c_i (F_i ⊗ G_i) ψ`.
    pub fn apply_pair(&self, pair: &PairObservable) -> Result<LatticeState> {
        let mut acc = LatticeState {
            amplitudes: vec![C64::new(0.0, 0.0); self.amplitudes.len()],
            ..self.clone_meta()
        };
        for (c, fa, fb) in &pair.terms {
            if matches!((fa, fb), (Factor::Identity, Factor::Identity)) {
                acc.add_scaled(self, *c);
                continue;
            }
            let mut term = self.clone();
            term.apply_factor(Particle::Alpha, fa)?;
            term.apply_factor(Particle::Beta, fb)?;
            acc.add_scaled(&term, *c);
        }
        Ok(acc)
    }

    fn clone_meta(&self) -> LatticeState {
        LatticeState {
            grid: self.grid,
            spin: self.spin,
            masses: self.masses,
            time: self.time,
            amplitudes: Vec::new(),
            peak_boundary: self.peak_boundary,
        }
    }

    fn fft_axes(&mut self, particle: Particle, inverse: bool) {
        let n = self.grid.points;
        let mut planner = FftPlanner::<f64>::new();
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let total = self.amplitudes.len();
        let mut buffer = vec![C64::new(0.0, 0.0); total];
        for axis in 0..self.grid.dimension {
            let stride = self.site_stride(particle) * self.grid.axis_stride(axis);
            let starts: Vec<usize> = (0..total).filter(|idx| (idx / stride).is_multiple_of(n)).collect();
            for (line, &start) in starts.iter().enumerate() {
                for j in 0..n {
                    buffer[line * n + j] = self.amplitudes[start + j * stride];
                }
            }
            fft.process(&mut buffer);
            let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
            for (line, &start) in starts.iter().enumerate() {
                for j in 0..n {
                    self.amplitudes[start + j * stride] = buffer[line * n + j] * scale;
                }
            }
        }
    }

    /// Multiplies each amplitude by `f(site)` of the chosen particle.
    fn multiply_sites(&mut self, particle: Particle, phases: &[C64]) {
        let p = self.grid.sites();
        for (idx, a) in self.amplitudes.iter_mut().enumerate() {
            let site = match particle {
                Particle::Alpha => (idx / p) % p,
                Particle::Beta => idx % p,
            };
            *a *= phases[site];
        }
    }

    fn wave_vector(&self, site: usize) -> Vec<f64> {
        (0..self.grid.dimension)
            .map(|a| self.grid.wavenumber(self.grid.axis_index(site, a)))
            .collect()
    }

    /// `ψ(x) → ψ(x + s)` for one particle, band-limited.
    pub(crate) fn shift_unchecked(&mut self, particle: Particle, s: &[f64]) {
        if s.iter().all(|x| *x == 0.0) {
            return;
        }
        self.fft_axes(particle, false);
        let phases: Vec<C64> = (0..self.grid.sites())
            .map(|site| {
                let k = self.wave_vector(site);
                C64::from_polar(1.0, k.iter().zip(s).map(|(k, s)| k * s).sum())
            })
            .collect();
        self.multiply_sites(particle, &phases);
        self.fft_axes(particle, true);
    }

    /// Mass (relative) whose content would cross the periodic seam under `ψ(x) → ψ(x + s)`.
    pub fn seam_mass(&self, particle: Particle, s: &[f64]) -> f64 {
        let l = self.grid.half_extent;
        let p = self.grid.sites();
        let leaves: Vec<bool> = (0..p)
            .map(|site| {
                self.grid
                    .site_position(site)
                    .iter()
                    .zip(s)
                    .any(|(y, s)| !(-l..l).contains(&(y - s)))
            })
            .collect();
        let mut total = 0.0;
        let mut out = 0.0;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let site = match particle {
                Particle::Alpha => (idx / p) % p,
                Particle::Beta => idx % p,
            };
            total += a.norm_sqr();
            if leaves[site] {
                out += a.norm_sqr();
            }
        }
        if total > 0.0 {
            out / total
        } else {
            0.0
        }
    }

    fn check_seam(&self, particle: Particle, s: &[f64], context: &str) -> Result<()> {
        let mass = self.seam_mass(particle, s);
        if mass >= BOUNDARY_FAIL {
            return Err(Error::BoundaryMass {
                mass,
                limit: BOUNDARY_FAIL,
                context: format!("{context}: content crosses the lattice seam"),
            });
        }
        Ok(())
    }

    fn check_vector(&self, v: &[f64], field: &str) -> Result<()> {
        if v.len() != self.grid.dimension || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(
                field,
                format!("expected {} finite components", self.grid.dimension),
            ));
        }
        Ok(())
    }

    pub(crate) fn boost_unchecked(&mut self, particle: Particle, v: &[f64], t: f64) {
        let s: Vec<f64> = v.iter().map(|v| v * t).collect();
        self.shift_unchecked(particle, &s);
        let mass = match particle {
            Particle::Alpha => self.masses.0,
            Particle::Beta => self.masses.1,
        };
        let v2: f64 = v.iter().map(|v| v * v).sum();
        let phases: Vec<C64> = (0..self.grid.sites())
            .map(|site| {
                let x = self.grid.site_position(site);
                let vx: f64 = v.iter().zip(&x).map(|(v, x)| v * x).sum();
                C64::from_polar(1.0, -mass * (t * v2 / 2.0 + vx))
            })
            .collect();
        self.multiply_sites(particle, &phases);
    }

    pub(crate) fn evolve_unchecked(&mut self, tau: f64) {
        self.evolve_particles_unchecked(&[Particle::Alpha, Particle::Beta], tau);
    }

    fn evolve_particles_unchecked(&mut self, particles: &[Particle], tau: f64) {
        if tau == 0.0 {
            return;
        }
        for &particle in particles {
            self.fft_axes(particle, false);
            let mass = match particle {
                Particle::Alpha => self.masses.0,
                Particle::Beta => self.masses.1,
            };
            let dispersion: Vec<C64> = (0..self.grid.sites())
                .map(|site| {
                    let k2: f64 = self.wave_vector(site).iter().map(|k| k * k).sum();
                    C64::from_polar(1.0, -tau * k2 / (2.0 * mass))
                })
                .collect();
            self.multiply_sites(particle, &dispersion);
            self.fft_axes(particle, true);
        }
        self.time += tau;
    }
}

/// Samples a state on the lattice without normalizing.
pub fn sample(state: &TwoParticleState, grid: &GridConfig) -> Result<LatticeState> {
    if state.dimension() != grid.dimension() {
        return Err(Error::invalid(
            "grid",
            format!("state has {} axes, lattice has {}", state.dimension(), grid.dimension()),
        ));
    }
    let spin = state.spin();
    let mut out = LatticeState::zeros(*grid, spin, state.masses());
    let p = grid.sites();
    let positions: Vec<Vec<f64>> = (0..p).map(|s| grid.site_position(s)).collect();
    for term in state.terms() {
        let ma = spin.index_of(term.m_alpha).expect("validated label");
        let mb = spin.index_of(term.m_beta).expect("validated label");
        let fa: Vec<C64> = positions.iter().map(|x| term.amplitude * term.alpha.eval(x)).collect();
        let fb: Vec<C64> = positions.iter().map(|x| term.beta.eval(x)).collect();
        let base = out.index(ma, mb, 0, 0);
        for (ia, a) in fa.iter().enumerate() {
            let row = &mut out.amplitudes[base + ia * p..base + (ia + 1) * p];
            for (slot, b) in row.iter_mut().zip(&fb) {
                *slot += a * b;
            }
        }
    }
    Ok(out)
}

/// Samples and normalizes a state, rejecting it if it reaches the boundary band.
pub fn discretize(state: &TwoParticleState, grid: &GridConfig) -> Result<LatticeState> {
    sample(state, grid)?.normalized()?.record_boundary("discretize")
}

/// Free evolution `e^{-iHτ}`, `τ ≥ 0`.
pub fn evolve_grid(psi: &LatticeState, tau: f64) -> Result<LatticeState> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau", format!("{tau} is not a non-negative time")));
    }
    let mut out = psi.clone();
    out.evolve_unchecked(tau);
    out.record_boundary("evolve")
}

/// Free evolution of one particle only; the other's coordinates are left alone
/// and are not watched.
pub fn evolve_grid_particle(psi: &LatticeState, tau: f64, particle: Particle) -> Result<LatticeState> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau", format!("{tau} is not a non-negative time")));
    }
    let mut out = psi.clone();
    out.evolve_particles_unchecked(&[particle], tau);
    out.record_band(&[particle], "evolve")
}

/// `U_t(v)` on one particle: `(Uψ)(x) = e^{-iM(tv²/2 + v·x)} ψ(x + tv)`.
pub fn apply_boost_grid(psi: &LatticeState, v: &[f64], t: f64, particle: Particle) -> Result<LatticeState> {
    psi.check_vector(v, "velocity")?;
    let s: Vec<f64> = v.iter().map(|v| v * t).collect();
    psi.check_seam(particle, &s, "boost")?;
    let mut out = psi.clone();
    out.boost_unchecked(particle, v, t);
    out.record_band(&[particle], "boost")
}

/// `U(a)` on one particle: `(Uψ)(x) = ψ(x + a)`.
pub fn apply_translation_grid(psi: &LatticeState, a: &[f64], particle: Particle) -> Result<LatticeState> {
    psi.check_vector(a, "translation")?;
    psi.check_seam(particle, a, "translation")?;
    let mut out = psi.clone();
    out.shift_unchecked(particle, a);
    out.record_band(&[particle], "translation")
}

/// Passive change into the frame of an observer moving with `v`, applied to both particles.
pub fn to_observer_frame(psi: &LatticeState, v: &[f64], t: f64) -> Result<LatticeState> {
    let back: Vec<f64> = v.iter().map(|v| -v).collect();
    let out = apply_boost_grid(psi, &back, t, Particle::Alpha)?;
    apply_boost_grid(&out, &back, t, Particle::Beta)
}

/// Inverse of [`to_observer_frame`].
pub fn from_observer_frame(psi: &LatticeState, v: &[f64], t: f64) -> Result<LatticeState> {
    let out = apply_boost_grid(psi, v, t, Particle::Alpha)?;
    apply_boost_grid(&out, v, t, Particle::Beta)
}

/// Spin rotation `R` on one particle's spin index.
pub fn apply_rotation_spin(psi: &LatticeState, rotation: &SpinMatrix, particle: Particle) -> Result<LatticeState> {
    if rotation.dim() != psi.spin.dim() {
        return Err(Error::invalid("rotation", "dimension does not match the spin"));
    }
    let mut out = psi.clone();
    out.apply_local(particle, None, Some(rotation));
    Ok(out)
}

/// Selective measurement of `Π_{Ω,n}^{λ}` on one particle: rotate into the
/// `n` basis, keep `λ` inside the region, rotate back.
pub fn project_grid(
    psi: &LatticeState,
    region: &Region,
    n: &Direction,
    lambda: HalfInt,
    particle: Particle,
) -> Result<Luders> {
    let spin = psi.spin;
    let keep = spin.check(lambda, "lambda")?;
    let u = direction_rotation(n, spin);
    let mut out = apply_rotation_spin(psi, &u.adjoint(), particle)?;
    let mut selector = vec![0.0; spin.dim()];
    selector[keep] = 1.0;
    let mask = psi.grid.region_mask(region)?;
    out.apply_local(particle, Some(&mask), Some(&SpinMatrix::diagonal(&selector)));
    let out = apply_rotation_spin(&out, &u, particle)?;
    Ok(Luders::from_projected(out))
}
