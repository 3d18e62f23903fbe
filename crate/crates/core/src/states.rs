//! Two-particle states as finite sums of Gaussian product terms.
//!
//! A packet along one axis is
//!
//! ```text
//! φ(x) = (2πσ²)^{-1/4} (σ²/q)^{1/2} exp(-(x - c)²/(4q) + i k (x - c))
//! ```
//!
//! with `q = σ² + iβ`. The chirp `β` is zero at preparation and grows by
//! `τ/(2M)` under free evolution; `|φ|²` then has variance `|q|²/σ²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Region;
use crate::special::gaussian_interval_integral;
use crate::spin::{HalfInt, SpinValue, C64};

/// Squared-norm tolerance for exchange and spin-class checks.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    center: Vec<f64>,
    width: Vec<f64>,
    momentum: Vec<f64>,
    chirp: Vec<f64>,
    phase: f64,
}

impl GaussianPacket {
    /// Normalized packet; `width` is the per-axis standard deviation of `|φ|²`.
    pub fn new(center: Vec<f64>, width: Vec<f64>, momentum: Vec<f64>) -> Result<Self> {
        let d = center.len();
        if !(1..=3).contains(&d) {
            return Err(Error::invalid("packet.center", format!("dimension {d} not in 1..=3")));
        }
        if width.len() != d || momentum.len() != d {
            return Err(Error::invalid("packet", "center, width and momentum lengths differ"));
        }
        if let Some(w) = width.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::invalid("packet.width", format!("{w} is not strictly positive")));
        }
        if center.iter().chain(&momentum).any(|x| !x.is_finite()) {
            return Err(Error::invalid("packet", "non-finite center or momentum"));
        }
        Ok(GaussianPacket {
            center,
            width,
            momentum,
            chirp: vec![0.0; d],
            phase: 0.0,
        })
    }

    pub fn centered(center: f64, width: f64) -> Result<Self> {
        Self::new(vec![center], vec![width], vec![0.0])
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn width(&self) -> &[f64] {
        &self.width
    }

    pub fn momentum(&self) -> &[f64] {
        &self.momentum
    }

    pub fn chirp(&self) -> &[f64] {
        &self.chirp
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Variance of `|φ|²` along each axis.
    pub fn position_variance(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let s2 = self.width[j] * self.width[j];
                (s2 * s2 + self.chirp[j] * self.chirp[j]) / s2
            })
            .collect()
    }

    fn q(&self, j: usize) -> C64 {
        C64::new(self.width[j] * self.width[j], self.chirp[j])
    }

    fn log_norm(&self, j: usize) -> C64 {
        let s2 = self.width[j] * self.width[j];
        let q = self.q(j);
        -0.25 * (2.0 * PI * s2).ln() + 0.5 * (C64::new(s2, 0.0) / q).ln()
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let mut log = C64::new(0.0, self.phase);
        for (j, (xj, cj)) in x.iter().zip(&self.center).enumerate() {
            let dx = xj - cj;
            log += self.log_norm(j) - dx * dx / (4.0 * self.q(j)) + C64::new(0.0, self.momentum[j] * dx);
        }
        log.exp()
    }

    /// `∫ conj(self) · other` over the region.
    pub fn overlap(&self, other: &GaussianPacket, region: &Region) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        if region.is_empty() {
            return C64::new(0.0, 0.0);
        }
        let mut total = C64::from_polar(1.0, other.phase - self.phase);
        for j in 0..self.dim() {
            let (lo, hi) = region.bounds(j);
            let (qf, qg) = (self.q(j).conj(), other.q(j));
            let (cf, cg) = (self.center[j], other.center[j]);
            let (kf, kg) = (self.momentum[j], other.momentum[j]);
            let a = 1.0 / (4.0 * qf) + 1.0 / (4.0 * qg);
            let b = cf / (2.0 * qf) + cg / (2.0 * qg) + C64::new(0.0, kg - kf);
            let c = -cf * cf / (4.0 * qf) - cg * cg / (4.0 * qg)
                + C64::new(0.0, kf * cf - kg * cg)
                + self.log_norm(j).conj()
                + other.log_norm(j);
            total *= gaussian_interval_integral(a, b, c, lo, hi);
        }
        total
    }

    /// Free evolution for time `tau` of a particle of the given mass.
    pub fn evolve(&self, tau: f64, mass: f64) -> GaussianPacket {
        let mut out = self.clone();
        for j in 0..self.dim() {
            let k = self.momentum[j];
            out.center[j] += k * tau / mass;
            out.chirp[j] += tau / (2.0 * mass);
            out.phase += k * k * tau / (2.0 * mass);
        }
        out
    }

    /// Action of the boost `U_t(v)`: `ψ(x) → e^{-iM(tv²/2 + v·x)} ψ(x + tv)`.
    pub fn boost(&self, v: &[f64], t: f64, mass: f64) -> GaussianPacket {
        let mut out = self.clone();
        let v2: f64 = v.iter().map(|x| x * x).sum();
        for (j, vj) in v.iter().enumerate() {
            out.center[j] -= t * vj;
            out.momentum[j] -= mass * vj;
            out.phase -= mass * vj * out.center[j];
        }
        out.phase -= mass * t * v2 / 2.0;
        out
    }

    /// `ψ(x) → ψ(x + a)`.
    pub fn translate(&self, a: &[f64]) -> GaussianPacket {
        let mut out = self.clone();
        for (c, a) in out.center.iter_mut().zip(a) {
            *c -= a;
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn approx_eq(&self, other: &GaussianPacket, tol: f64) -> bool {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
        close(&self.center, &other.center)
            && close(&self.width, &other.width)
            && close(&self.momentum, &other.momentum)
            && close(&self.chirp, &other.chirp)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    #[default]
    Distinguishable,
    Boson,
    Fermion,
}

impl Statistics {
    /// Sign picked up under particle exchange.
    pub fn exchange_sign(self) -> Option<f64> {
        match self {
            Statistics::Distinguishable => None,
            Statistics::Boson => Some(1.0),
            Statistics::Fermion => Some(-1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateTerm {
    pub amplitude: C64,
    pub alpha: GaussianPacket,
    pub beta: GaussianPacket,
    pub m_alpha: HalfInt,
    pub m_beta: HalfInt,
}

/// Spatial function `ψ_{mα mβ}(x, y)` as a list of weighted packet products.
pub type SpinComponent<'a> = Vec<(C64, &'a GaussianPacket, &'a GaussianPacket)>;

/// `∫_A dx ∫_B dy conj(f(x, y)) g(x, y)` for two spatial components.
pub fn component_overlap(f: &SpinComponent<'_>, g: &SpinComponent<'_>, a: &Region, b: &Region) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (af, pf, qf) in f {
        for (ag, pg, qg) in g {
            acc += af.conj() * ag * pf.overlap(pg, a) * qf.overlap(qg, b);
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleState {
    spin: SpinValue,
    dimension: usize,
    mass_alpha: f64,
    mass_beta: f64,
    statistics: Statistics,
    terms: Vec<StateTerm>,
}

impl TwoParticleState {
    /// Validates labels, dimensions and masses. The state is normalized, and for
    /// identical particles its exchange symmetry is checked.
    pub fn new(spin: SpinValue, masses: (f64, f64), statistics: Statistics, terms: Vec<StateTerm>) -> Result<Self> {
        let dimension = terms
            .first()
            .ok_or_else(|| Error::invalid("state.terms", "at least one term is required"))?
            .alpha
            .dim();
        for (i, t) in terms.iter().enumerate() {
            if t.alpha.dim() != dimension || t.beta.dim() != dimension {
                return Err(Error::invalid(format!("state.terms[{i}]"), "packet dimensions differ"));
            }
            spin.check(t.m_alpha, &format!("state.terms[{i}].m_alpha"))?;
            spin.check(t.m_beta, &format!("state.terms[{i}].m_beta"))?;
            if !(t.amplitude.re.is_finite() && t.amplitude.im.is_finite()) {
                return Err(Error::invalid(format!("state.terms[{i}].amplitude"), "not finite"));
            }
        }
        for (name, m) in [("state.masses[0]", masses.0), ("state.masses[1]", masses.1)] {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(name, format!("{m} is not a positive mass")));
            }
        }
        if statistics != Statistics::Distinguishable && masses.0 != masses.1 {
            return Err(Error::invalid(
                "state.statistics",
                "identical particles need equal masses",
            ));
        }
        let state = TwoParticleState {
            spin,
            dimension,
            mass_alpha: masses.0,
            mass_beta: masses.1,
            statistics,
            terms,
        }
        .normalize()?;
        if let Some(sign) = statistics.exchange_sign() {
            let defect = state.exchange_defect(sign);
            if defect > SYMMETRY_TOLERANCE {
                return Err(Error::invalid(
                    "state.statistics",
                    format!(
                        "state is not exchange-{} (defect {defect:.2e})",
                        if sign > 0.0 { "symmetric" } else { "antisymmetric" }
                    ),
                ));
            }
        }
        Ok(state)
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn masses(&self) -> (f64, f64) {
        (self.mass_alpha, self.mass_beta)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn terms(&self) -> &[StateTerm] {
        &self.terms
    }

    /// Same terms with other statistics; validated like [`TwoParticleState::new`].
    pub fn with_statistics(&self, statistics: Statistics) -> Result<Self> {
        Self::new(self.spin, self.masses(), statistics, self.terms.clone())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TwoParticleState) -> C64 {
        let all = Region::AllSpace;
        let mut acc = C64::new(0.0, 0.0);
        for s in &self.terms {
            for o in &other.terms {
                if s.m_alpha == o.m_alpha && s.m_beta == o.m_beta {
                    acc += s.amplitude.conj()
                        * o.amplitude
                        * s.alpha.overlap(&o.alpha, &all)
                        * s.beta.overlap(&o.beta, &all);
                }
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self).re
    }

    pub fn normalize(mut self) -> Result<Self> {
        let n2 = self.norm_squared();
        if !(n2.is_finite() && n2 > 1e-300) {
            return Err(Error::invalid(
                "state",
                format!("cannot normalize a state of norm² {n2:e}"),
            ));
        }
        let scale = 1.0 / n2.sqrt();
        for t in &mut self.terms {
            t.amplitude *= scale;
        }
        Ok(self)
    }

    /// Terms contributing to `ψ_{mα mβ}`.
    pub fn component(&self, m_alpha: HalfInt, m_beta: HalfInt) -> SpinComponent<'_> {
        self.terms
            .iter()
            .filter(|t| t.m_alpha == m_alpha && t.m_beta == m_beta)
            .map(|t| (t.amplitude, &t.alpha, &t.beta))
            .collect()
    }

    fn map_packets(&self, f: impl Fn(&GaussianPacket, f64) -> GaussianPacket) -> TwoParticleState {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.alpha = f(&t.alpha, self.mass_alpha);
            t.beta = f(&t.beta, self.mass_beta);
        }
        out
    }

    /// Free evolution `e^{-iHτ}` with `H = P²/2M` per particle.
    pub fn evolve_free(&self, tau: f64) -> Result<TwoParticleState> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::invalid("tau", format!("{tau} is not a non-negative time")));
        }
        Ok(self.map_packets(|p, m| p.evolve(tau, m)))
    }

    /// Galilean boost `U_t(v) ⊗ U_t(v)` with each particle's own mass.
    pub fn boost(&self, v: &[f64], t: f64) -> Result<TwoParticleState> {
        self.check_vector(v, "velocity")?;
        Ok(self.map_packets(|p, m| p.boost(v, t, m)))
    }

    /// Spatial translation `U(a) ⊗ U(a)`.
    pub fn translate(&self, a: &[f64]) -> Result<TwoParticleState> {
        self.check_vector(a, "translation")?;
        Ok(self.map_packets(|p, _| p.translate(a)))
    }

    fn check_vector(&self, v: &[f64], field: &str) -> Result<()> {
        if v.len() != self.dimension || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(
                field,
                format!("expected {} finite components", self.dimension),
            ));
        }
        Ok(())
    }

    /// Relabels particles: `ψ'_{mα mβ}(x, y) = ψ_{mβ mα}(y, x)`, masses swapped.
    pub fn exchanged(&self) -> TwoParticleState {
        let mut out = self.clone();
        std::mem::swap(&mut out.mass_alpha, &mut out.mass_beta);
        for t in &mut out.terms {
            std::mem::swap(&mut t.alpha, &mut t.beta);
            std::mem::swap(&mut t.m_alpha, &mut t.m_beta);
        }
        out
    }

    /// `‖Pψ - sign·ψ‖² / ‖ψ‖²` for the exchange map `P`.
    pub fn exchange_defect(&self, sign: f64) -> f64 {
        let swapped = self.exchanged();
        let n2 = self.norm_squared();
        let cross = swapped.inner(self).re;
        ((swapped.norm_squared() + n2 - 2.0 * sign * cross) / n2).max(0.0)
    }

    /// `(ψ ± Pψ)` normalized, tagged with the given identical-particle statistics.
    pub fn symmetrized(&self, statistics: Statistics) -> Result<TwoParticleState> {
        let sign = statistics
            .exchange_sign()
            .ok_or_else(|| Error::invalid("statistics", "symmetrization needs boson or fermion"))?;
        let mut terms = self.terms.clone();
        terms.extend(self.exchanged().terms.into_iter().map(|mut t| {
            t.amplitude *= sign;
            t
        }));
        Self::new(self.spin, self.masses(), statistics, terms)
    }

    /// `‖ψ_{mα mβ} - sign·ψ_{mβ mα}‖²` summed over label pairs, relative to `‖ψ‖²`.
    pub fn spin_swap_defect(&self, sign: f64) -> f64 {
        let all = Region::AllSpace;
        let mut acc = 0.0;
        for ma in self.spin.projections() {
            for mb in self.spin.projections() {
                let f = self.component(ma, mb);
                let g = self.component(mb, ma);
                let ff = component_overlap(&f, &f, &all, &all).re;
                let gg = component_overlap(&g, &g, &all, &all).re;
                let fg = component_overlap(&f, &g, &all, &all).re;
                acc += ff + gg - 2.0 * sign * fg;
            }
        }
        (acc / self.norm_squared()).max(0.0)
    }

    /// Spin-1/2 state with `ψ_{mα mβ} = -ψ_{mβ mα}`.
    pub fn is_singlet_class(&self) -> bool {
        self.spin == SpinValue::HALF && self.spin_swap_defect(-1.0) <= SYMMETRY_TOLERANCE
    }

    /// Spin-1/2 state with `ψ_{mα mβ} = ψ_{mβ mα}`.
    pub fn is_triplet_class(&self) -> bool {
        self.spin == SpinValue::HALF && self.spin_swap_defect(1.0) <= SYMMETRY_TOLERANCE
    }
}

fn spin_half_state(
    phi: &GaussianPacket,
    chi: &GaussianPacket,
    masses: (f64, f64),
    labels: &[(f64, HalfInt, HalfInt)],
) -> Result<TwoParticleState> {
    if phi.dim() != chi.dim() {
        return Err(Error::invalid("packets", "phi and chi dimensions differ"));
    }
    let terms = labels
        .iter()
        .map(|&(amp, ma, mb)| StateTerm {
            amplitude: C64::new(amp, 0.0),
            alpha: phi.clone(),
            beta: chi.clone(),
            m_alpha: ma,
            m_beta: mb,
        })
        .collect();
    TwoParticleState::new(SpinValue::HALF, masses, Statistics::Distinguishable, terms)
}

/// `φ(x)χ(y) (|+-⟩ - |-+⟩)/√2`.
pub fn make_singlet(phi: &GaussianPacket, chi: &GaussianPacket, masses: (f64, f64)) -> Result<TwoParticleState> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    spin_half_state(
        phi,
        chi,
        masses,
        &[
            (r, HalfInt::PLUS_HALF, HalfInt::MINUS_HALF),
            (-r, HalfInt::MINUS_HALF, HalfInt::PLUS_HALF),
        ],
    )
}

/// Triplet with total projection `m_total ∈ {-1, 0, 1}` and spatial part `φ(x)χ(y)`.
pub fn make_triplet(
    phi: &GaussianPacket,
    chi: &GaussianPacket,
    m_total: i32,
    masses: (f64, f64),
) -> Result<TwoParticleState> {
    let (p, m) = (HalfInt::PLUS_HALF, HalfInt::MINUS_HALF);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match m_total {
        1 => spin_half_state(phi, chi, masses, &[(1.0, p, p)]),
        -1 => spin_half_state(phi, chi, masses, &[(1.0, m, m)]),
        0 => spin_half_state(phi, chi, masses, &[(r, p, m), (r, m, p)]),
        other => Err(Error::invalid("m_total", format!("{other} not in {{-1, 0, 1}}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(c: f64, w: f64, k: f64) -> GaussianPacket {
        GaussianPacket::new(vec![c], vec![w], vec![k]).unwrap()
    }

    fn simpson_1d(f: impl Fn(f64) -> C64, lo: f64, hi: f64, n: usize) -> C64 {
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn packet_is_normalized_and_has_stated_variance() {
        let p = packet(-2.0, 0.5, 1.3).evolve(1.7, 0.8);
        let all = Region::AllSpace;
        assert!((p.overlap(&p, &all).re - 1.0).abs() < 1e-14);
        let var = simpson_1d(
            |x| C64::new((x - p.center()[0]).powi(2) * p.eval(&[x]).norm_sqr(), 0.0),
            -40.0,
            40.0,
            40_000,
        )
        .re;
        assert!((var - p.position_variance()[0]).abs() < 1e-10);
        // σ(τ)² = σ² + (τ/(2Mσ))²
        assert!((p.position_variance()[0] - (0.25 + (1.7f64 / (2.0 * 0.8 * 0.5)).powi(2))).abs() < 1e-14);
    }

    #[test]
    fn overlap_matches_quadrature_on_boxes() {
        let f = packet(-1.0, 0.6, 0.4).evolve(0.5, 1.0).with_phase(0.3);
        let g = packet(0.5, 0.9, -1.2).evolve(1.5, 2.0);
        let region = Region::interval(-2.0, 1.0).unwrap();
        let want = simpson_1d(|x| f.eval(&[x]).conj() * g.eval(&[x]), -2.0, 1.0, 20_000);
        assert!((f.overlap(&g, &region) - want).norm() < 1e-12);
    }

    #[test]
    fn overlap_factorizes_over_axes() {
        let f = GaussianPacket::new(vec![0.1, -0.4], vec![0.5, 0.7], vec![0.0, 1.0]).unwrap();
        let g = GaussianPacket::new(vec![0.3, 0.2], vec![0.6, 0.7], vec![0.5, 0.0]).unwrap();
        let region = Region::new_box(vec![-1.0, -1.0], vec![0.5, 1.5]).unwrap();
        let fx = packet(0.1, 0.5, 0.0);
        let gx = packet(0.3, 0.6, 0.5);
        let fy = packet(-0.4, 0.7, 1.0);
        let gy = packet(0.2, 0.7, 0.0);
        let want = fx.overlap(&gx, &Region::interval(-1.0, 0.5).unwrap())
            * fy.overlap(&gy, &Region::interval(-1.0, 1.5).unwrap());
        assert!((f.overlap(&g, &region) - want).norm() < 1e-14);
    }

    #[test]
    fn singlet_and_triplet_normalization() {
        let phi = packet(-2.0, 0.5, 0.0);
        let chi = packet(2.0, 0.5, 0.0);
        let s = make_singlet(&phi, &chi, (1.0, 1.0)).unwrap();
        assert!((s.norm_squared() - 1.0).abs() < 1e-14);
        let c = s.component(HalfInt::PLUS_HALF, HalfInt::MINUS_HALF);
        let all = Region::AllSpace;
        assert!((component_overlap(&c, &c, &all, &all).re - 0.5).abs() < 1e-14);
        assert!(s.is_singlet_class() && !s.is_triplet_class());

        let t0 = make_triplet(&phi, &chi, 0, (1.0, 1.0)).unwrap();
        let c = t0.component(HalfInt::PLUS_HALF, HalfInt::MINUS_HALF);
        assert!((2.0 * component_overlap(&c, &c, &all, &all).re - 1.0).abs() < 1e-14);
        assert!(t0.is_triplet_class());
        let t1 = make_triplet(&phi, &chi, 1, (1.0, 1.0)).unwrap();
        assert_eq!(t1.terms().len(), 1);
        assert!((t1.norm_squared() - 1.0).abs() < 1e-14);
        assert!(make_triplet(&phi, &chi, 2, (1.0, 1.0)).is_err());
    }

    #[test]
    fn singlet_is_antisymmetric_under_label_swap() {
        let phi = packet(-2.0, 0.5, 0.0);
        let chi = packet(2.0, 0.5, 0.3);
        let s = make_singlet(&phi, &chi, (1.0, 1.0)).unwrap();
        let t = s.terms();
        assert_eq!(t[0].m_alpha, t[1].m_beta);
        assert_eq!(t[0].m_beta, t[1].m_alpha);
        assert!((t[0].amplitude + t[1].amplitude).norm() < 1e-15);
        // equal packets: spatially symmetric, spin antisymmetric → fermion
        let same = make_singlet(&phi, &phi, (1.0, 1.0)).unwrap();
        assert!(same.with_statistics(Statistics::Fermion).is_ok());
        assert!(same.with_statistics(Statistics::Boson).is_err());
        assert!(s.with_statistics(Statistics::Fermion).is_err());
    }

    #[test]
    fn overlapping_terms_norm() {
        // two same-spin terms one width apart: ‖φ0 + φ1‖² = 2 + 2 exp(-1/8)
        let sigma = 0.5;
        let terms = vec![
            StateTerm {
                amplitude: C64::new(1.0, 0.0),
                alpha: packet(0.0, sigma, 0.0),
                beta: packet(0.0, sigma, 0.0),
                m_alpha: HalfInt(1),
                m_beta: HalfInt(1),
            },
            StateTerm {
                amplitude: C64::new(1.0, 0.0),
                alpha: packet(sigma, sigma, 0.0),
                beta: packet(0.0, sigma, 0.0),
                m_alpha: HalfInt(1),
                m_beta: HalfInt(1),
            },
        ];
        let raw = TwoParticleState {
            spin: SpinValue::HALF,
            dimension: 1,
            mass_alpha: 1.0,
            mass_beta: 1.0,
            statistics: Statistics::Distinguishable,
            terms,
        };
        assert!((raw.norm_squared() - (2.0 + 2.0 * (-0.125f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn evolution_boost_translation_identities() {
        let phi = packet(-2.0, 0.5, 1.0);
        let chi = packet(2.0, 0.4, -0.5);
        let s = make_singlet(&phi, &chi, (1.0, 2.0)).unwrap();
        assert_eq!(s.evolve_free(0.0).unwrap(), s);
        assert!(s.evolve_free(-1.0).is_err());
        assert_eq!(s.boost(&[0.0], 3.0).unwrap(), s);
        assert_eq!(s.translate(&[0.0]).unwrap(), s);

        let kicked = s.boost(&[0.7], 0.0).unwrap();
        assert_eq!(kicked.terms()[0].alpha.center(), &[-2.0]);
        assert!((kicked.terms()[0].alpha.momentum()[0] - (1.0 - 0.7)).abs() < 1e-15);
        assert!((kicked.terms()[0].beta.momentum()[0] - (-0.5 - 1.4)).abs() < 1e-15);

        let evolved = s.evolve_free(2.0).unwrap();
        assert!((evolved.terms()[0].alpha.center()[0] - 0.0).abs() < 1e-15);
        assert!((evolved.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boost_inverse_restores_all_fields() {
        let s = make_triplet(&packet(-1.0, 0.5, 0.2), &packet(1.5, 0.8, 0.0), 0, (1.0, 3.0)).unwrap();
        let back = s.boost(&[1.3], 0.7).unwrap().boost(&[-1.3], 0.7).unwrap();
        for (a, b) in s.terms().iter().zip(back.terms()) {
            assert!(a.alpha.approx_eq(&b.alpha, 1e-12) && a.beta.approx_eq(&b.beta, 1e-12));
            assert!((a.alpha.phase() - b.alpha.phase()).abs() < 1e-12);
            assert!((a.beta.phase() - b.beta.phase()).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_builds_exchange_eigenstates() {
        let phi = packet(-3.0, 0.5, 0.0);
        let chi = packet(3.0, 0.5, 0.0);
        // spatially symmetrized singlet is a valid fermion state
        let singlet = make_singlet(&phi, &chi, (1.0, 1.0)).unwrap();
        let fermion = singlet.symmetrized(Statistics::Fermion).unwrap();
        assert!(fermion.exchange_defect(-1.0) < 1e-12);
        assert!((fermion.norm_squared() - 1.0).abs() < 1e-12);
        let boson = make_triplet(&phi, &chi, 1, (1.0, 1.0))
            .unwrap()
            .symmetrized(Statistics::Boson)
            .unwrap();
        assert!(boson.exchange_defect(1.0) < 1e-12);
        assert!(singlet.symmetrized(Statistics::Distinguishable).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GaussianPacket::new(vec![0.0], vec![-0.1], vec![0.0]).is_err());
        assert!(GaussianPacket::new(vec![0.0], vec![0.0], vec![0.0]).is_err());
        assert!(GaussianPacket::new(vec![0.0, 1.0], vec![0.1], vec![0.0]).is_err());
        let p = packet(0.0, 1.0, 0.0);
        let bad = StateTerm {
            amplitude: C64::new(1.0, 0.0),
            alpha: p.clone(),
            beta: p.clone(),
            m_alpha: HalfInt(3),
            m_beta: HalfInt(1),
        };
        assert!(TwoParticleState::new(SpinValue::HALF, (1.0, 1.0), Statistics::Distinguishable, vec![bad]).is_err());
        let ok = StateTerm {
            amplitude: C64::new(1.0, 0.0),
            alpha: p.clone(),
            beta: p,
            m_alpha: HalfInt(1),
            m_beta: HalfInt(1),
        };
        assert!(TwoParticleState::new(
            SpinValue::HALF,
            (0.0, 1.0),
            Statistics::Distinguishable,
            vec![ok.clone()]
        )
        .is_err());
        assert!(TwoParticleState::new(SpinValue::HALF, (1.0, 2.0), Statistics::Boson, vec![ok]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_state() -> impl Strategy<Value = TwoParticleState> {
            (
                -3.0..3.0f64,
                0.3..1.2f64,
                -2.0..2.0f64,
                -3.0..3.0f64,
                0.3..1.2f64,
                -2.0..2.0f64,
                0.5..3.0f64,
                0usize..3,
            )
                .prop_map(|(c1, w1, k1, c2, w2, k2, m, kind)| {
                    let phi = packet(c1, w1, k1);
                    let chi = packet(c2, w2, k2);
                    match kind {
                        0 => make_singlet(&phi, &chi, (m, 1.0)).unwrap(),
                        1 => make_triplet(&phi, &chi, 0, (m, 1.0)).unwrap(),
                        _ => make_triplet(&phi, &chi, 1, (m, 1.0)).unwrap(),
                    }
                })
        }

        proptest! {
            #[test]
            fn unitary_operations_keep_norm(s in arb_state(), tau in 0.0..5.0f64, v in -2.0..2.0f64, t in -2.0..2.0f64, a in -3.0..3.0f64) {
                prop_assert!((s.evolve_free(tau).unwrap().norm_squared() - 1.0).abs() < 1e-12);
                prop_assert!((s.boost(&[v], t).unwrap().norm_squared() - 1.0).abs() < 1e-12);
                prop_assert!((s.translate(&[a]).unwrap().norm_squared() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn boost_group_law(s in arb_state(), v1 in -2.0..2.0f64, v2 in -2.0..2.0f64, t in -2.0..2.0f64) {
                let twice = s.boost(&[v1], t).unwrap().boost(&[v2], t).unwrap();
                let once = s.boost(&[v1 + v2], t).unwrap();
                for (a, b) in twice.terms().iter().zip(once.terms()) {
                    prop_assert!((a.amplitude.norm() - b.amplitude.norm()).abs() < 1e-12);
                    prop_assert!(a.alpha.approx_eq(&b.alpha, 1e-12));
                    prop_assert!(a.beta.approx_eq(&b.beta, 1e-12));
                }
                // the leftover is a global phase: |⟨once|twice⟩| = 1
                prop_assert!((once.inner(&twice).norm() - 1.0).abs() < 1e-10);
            }

            #[test]
            fn fermion_exchange_flips_sign(c in 0.5..4.0f64, w in 0.3..1.0f64) {
                let phi = packet(-c, w, 0.0);
                let chi = packet(c, w, 0.0);
                let f = make_singlet(&phi, &chi, (1.0, 1.0)).unwrap().symmetrized(Statistics::Fermion).unwrap();
                let swapped = f.exchanged();
                // term-by-term: the exchange of term i is -(term j) for its partner j
                for t in swapped.terms() {
                    let partner = f.terms().iter().find(|u| u.m_alpha == t.m_alpha && u.m_beta == t.m_beta
                        && u.alpha.approx_eq(&t.alpha, 0.0) && u.beta.approx_eq(&t.beta, 0.0));
                    let partner = partner.expect("exchanged term present");
                    prop_assert!((partner.amplitude + t.amplitude).norm() < 1e-12);
                }
            }
        }
    }
}
