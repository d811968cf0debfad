//! Two-sideband readout of a trapped ion. The red and blue sidebands combine
//! into `H = ½(Ω f A₂₁ + h.c.)` with `f = μa + νa†`; starting in `|2⟩⟨2| ⊗ ρ`,
//! the upper-level occupation is `p₂(t) = ½{1 + Tr[ρ cos(|Ω|t √(f†f+1))]}`.
//!
//! [`ReducedDynamics`] evaluates that closed form from one eigendecomposition
//! of `f†f`; [`OracleDynamics`] evolves the full two-level ⊗ Fock space and
//! serves as its independent check.

use crate::error::{Error, Result};
use crate::fock::{CMatrix, CVector, FockSpace, HermitianEigensystem, Operator, State, C64};
use crate::parallel::Execution;
use crate::states::SqueezeParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandDrive {
    omega_r_mag: f64,
    omega_b_mag: f64,
    phi_r: f64,
    delta_phi: f64,
}

impl SidebandDrive {
    pub fn new(omega_r_mag: f64, omega_b_mag: f64, phi_r: f64, delta_phi: f64) -> Result<Self> {
        if ![omega_r_mag, omega_b_mag, phi_r, delta_phi].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidDrive("drive parameters must be finite".into()));
        }
        if omega_b_mag < 0.0 {
            return Err(Error::InvalidDrive(format!("|Omega_b| = {omega_b_mag} is negative")));
        }
        if omega_r_mag <= omega_b_mag {
            return Err(Error::InvalidDrive(format!(
                "|Omega_r| = {omega_r_mag} must exceed |Omega_b| = {omega_b_mag}"
            )));
        }
        Ok(SidebandDrive { omega_r_mag, omega_b_mag, phi_r, delta_phi })
    }

    /// Red-sideband only: the Jaynes-Cummings coupling `f = a`.
    pub fn red(omega: f64) -> Result<Self> {
        Self::new(omega, 0.0, 0.0, 0.0)
    }

    pub fn omega_r_mag(&self) -> f64 {
        self.omega_r_mag
    }

    pub fn omega_b_mag(&self) -> f64 {
        self.omega_b_mag
    }

    pub fn phi_r(&self) -> f64 {
        self.phi_r
    }

    pub fn delta_phi(&self) -> f64 {
        self.delta_phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoupling {
    pub omega: C64,
    pub mu: f64,
    pub nu: C64,
}

impl EffectiveCoupling {
    pub fn omega_abs(&self) -> f64 {
        self.omega.norm()
    }

    pub fn squeeze_params(&self) -> Result<SqueezeParams> {
        SqueezeParams::new(self.mu, self.nu)
    }

    /// `f = μa + νa†` on the given space.
    pub fn detection_operator(&self, space: FockSpace) -> Operator {
        &space.annihilation().scale(C64::new(self.mu, 0.0)) + &space.creation().scale(self.nu)
    }
}

pub fn effective_params(drive: &SidebandDrive) -> Result<EffectiveCoupling> {
    let d = SidebandDrive::new(drive.omega_r_mag, drive.omega_b_mag, drive.phi_r, drive.delta_phi)?;
    let omega_abs = ((d.omega_r_mag - d.omega_b_mag) * (d.omega_r_mag + d.omega_b_mag)).sqrt();
    let nu = C64::from_polar(d.omega_b_mag / omega_abs, d.delta_phi);
    Ok(EffectiveCoupling {
        omega: C64::from_polar(omega_abs, d.phi_r),
        mu: (1.0 + nu.norm_sqr()).sqrt(),
        nu,
    })
}

/// Drive whose detection operator annihilates the squeezed vacuum of `params`,
/// with `|Ω| = omega_scale`.
pub fn match_drive(params: SqueezeParams, omega_scale: f64) -> Result<SidebandDrive> {
    if !(omega_scale > 0.0 && omega_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega scale {omega_scale} must be positive")));
    }
    let nu = params.nu();
    let b = nu.norm() * omega_scale;
    let phase = if nu.norm() > 0.0 { nu.arg() } else { 0.0 };
    SidebandDrive::new(omega_scale.hypot(b), b, 0.0, phase)
}

/// Sampled `p₂` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Neither the initial state nor the eigenmodes it occupies reach the
    /// top levels beyond the tail tolerance.
    pub reliable: bool,
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        Some(t) => Err(Error::InvalidParameter(format!("time {t} must be finite and non-negative"))),
        None => Ok(()),
    }
}

/// Tail mass of each eigenvector column over the top levels of every `dim`-sized block.
fn eigenvector_tails(v: &CMatrix, space: FockSpace) -> Vec<f64> {
    let (dim, top) = (space.dim(), space.tail_levels());
    (0..v.ncols())
        .map(|j| (0..v.nrows()).filter(|i| i % dim >= dim - top).map(|i| v[(i, j)].norm_sqr()).sum())
        .collect()
}

// Components with negligible weight are dropped; they cannot move p₂ measurably.
fn weighted_components(state: &State) -> Vec<(f64, CVector)> {
    state.components().into_iter().filter(|(w, _)| *w > 1e-20).collect()
}

/// Spectrum of `f†f` for one drive on one space, reusable across initial states.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    space: FockSpace,
    omega_abs: f64,
    eig: HermitianEigensystem,
    tails: Vec<f64>,
}

impl ReducedModel {
    pub fn new(space: FockSpace, drive: &SidebandDrive) -> Result<Self> {
        let coupling = effective_params(drive)?;
        let f = coupling.detection_operator(space);
        let eig = HermitianEigensystem::of_matrix(f.gram().matrix());
        let tails = eigenvector_tails(&eig.eigenvectors, space);
        Ok(ReducedModel { space, omega_abs: coupling.omega_abs(), eig, tails })
    }

    pub fn dynamics(&self, state: &State) -> Result<ReducedDynamics> {
        self.space.check(state.space())?;
        let mut weights = vec![0.0; self.eig.len()];
        for (w, psi) in weighted_components(state) {
            for (acc, c) in weights.iter_mut().zip(self.eig.coordinates(&psi).iter()) {
                *acc += w * c.norm_sqr();
            }
        }
        let frequencies = self.eig.eigenvalues.iter().map(|l| (l.max(0.0) + 1.0).sqrt()).collect();
        let mode_tail: f64 = weights.iter().zip(&self.tails).map(|(w, t)| w * t).sum();
        let reliable = state.reliable() && mode_tail <= self.space.tail_tol();
        Ok(ReducedDynamics { omega_abs: self.omega_abs, frequencies, weights, mode_tail, reliable })
    }
}

/// Closed-form evaluation from the spectrum of `f†f`.
#[derive(Debug, Clone)]
pub struct ReducedDynamics {
    omega_abs: f64,
    frequencies: Vec<f64>,
    weights: Vec<f64>,
    mode_tail: f64,
    reliable: bool,
}

impl ReducedDynamics {
    pub fn new(state: &State, drive: &SidebandDrive) -> Result<Self> {
        ReducedModel::new(*state.space(), drive)?.dynamics(state)
    }

    pub fn omega_abs(&self) -> f64 {
        self.omega_abs
    }

    /// Weight the initial state puts on the top levels through the eigenmodes of `f†f`.
    /// Eigenmodes reaching the top of the space carry truncated frequencies.
    pub fn mode_tail(&self) -> f64 {
        self.mode_tail
    }

    pub fn reliable(&self) -> bool {
        self.reliable
    }

    pub fn p2(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        let wt = self.omega_abs * t;
        let tr: f64 = self.weights.iter().zip(&self.frequencies).map(|(w, g)| w * (wt * g).cos()).sum();
        0.5 * (1.0 + tr)
    }

    pub fn curve(&self, times: &[f64], exec: Execution) -> Result<Curve> {
        check_times(times)?;
        let values = exec.map(times, |&t| self.p2(t));
        Ok(Curve { times: times.to_vec(), values, reliable: self.reliable })
    }
}

/// Eigendecomposition of the full two-level ⊗ Fock Hamiltonian for one drive.
///
/// `H` conserves the joint parity of electronic level and phonon number, so
/// it is diagonalized one parity sector at a time.
#[derive(Debug, Clone)]
pub struct OracleModel {
    space: FockSpace,
    omega_abs: f64,
    energies: Vec<f64>,
    /// Rows of the eigenvector matrix belonging to the upper level.
    upper: CMatrix,
    tails: Vec<f64>,
}

impl OracleModel {
    pub fn new(space: FockSpace, drive: &SidebandDrive) -> Result<Self> {
        let coupling = effective_params(drive)?;
        let dim = space.dim();
        let f = coupling.detection_operator(space);
        // block 0 holds |1⟩ ⊗ Fock, block 1 holds |2⟩ ⊗ Fock
        let mut h = CMatrix::zeros(2 * dim, 2 * dim);
        let half = coupling.omega * 0.5;
        for i in 0..dim {
            for j in 0..dim {
                let z = half * f.matrix()[(i, j)];
                h[(dim + i, j)] = z;
                h[(j, dim + i)] = z.conj();
            }
        }
        let mut energies = Vec::with_capacity(2 * dim);
        let mut vectors = CMatrix::zeros(2 * dim, 2 * dim);
        for parity in 0..2 {
            let sector: Vec<usize> = (0..2 * dim).filter(|i| (i / dim + i % dim) % 2 == parity).collect();
            let block = CMatrix::from_fn(sector.len(), sector.len(), |r, c| h[(sector[r], sector[c])]);
            let eig = HermitianEigensystem::of_matrix(&block);
            let offset = energies.len();
            for (c, e) in eig.eigenvalues.iter().enumerate() {
                for (r, &row) in sector.iter().enumerate() {
                    vectors[(row, offset + c)] = eig.eigenvectors[(r, c)];
                }
                energies.push(*e);
            }
        }
        let tails = eigenvector_tails(&vectors, space);
        let upper = vectors.rows(dim, dim).into_owned();
        Ok(OracleModel { space, omega_abs: coupling.omega_abs(), energies, upper, tails })
    }

    pub fn dynamics(&self, state: &State) -> Result<OracleDynamics> {
        self.space.check(state.space())?;
        let components: Vec<(f64, CVector)> = weighted_components(state)
            .into_iter()
            .map(|(w, psi)| (w, self.upper.ad_mul(&psi)))
            .collect();
        let mode_tail: f64 = components
            .iter()
            .map(|(w, c)| w * c.iter().zip(&self.tails).map(|(z, t)| z.norm_sqr() * t).sum::<f64>())
            .sum();
        Ok(OracleDynamics {
            model: self.clone(),
            components,
            reliable: state.reliable() && mode_tail <= self.space.tail_tol(),
        })
    }
}

/// Brute-force evolution of `|2⟩⟨2| ⊗ ρ` under the full `2·dim` Hamiltonian.
#[derive(Debug, Clone)]
pub struct OracleDynamics {
    model: OracleModel,
    /// Eigen-coordinates of each `|2⟩ ⊗ ψ` component, with its weight.
    components: Vec<(f64, CVector)>,
    reliable: bool,
}

impl OracleDynamics {
    pub fn new(state: &State, drive: &SidebandDrive) -> Result<Self> {
        OracleModel::new(*state.space(), drive)?.dynamics(state)
    }

    pub fn p2(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        let m = &self.model;
        let mut sum = 0.0;
        let mut upper2 = CVector::zeros(m.upper.nrows());
        for (w, c) in &self.components {
            upper2.fill(C64::new(0.0, 0.0));
            // coordinates vanish outside the parity sectors the component touches
            for (k, z) in c.iter().enumerate().filter(|(_, z)| z.norm_sqr() > 0.0) {
                upper2.axpy(*z * C64::from_polar(1.0, -m.energies[k] * t), &m.upper.column(k), C64::new(1.0, 0.0));
            }
            sum += w * upper2.norm_squared();
        }
        sum
    }

    pub fn reliable(&self) -> bool {
        self.reliable
    }

    pub fn omega_abs(&self) -> f64 {
        self.model.omega_abs
    }

    pub fn curve(&self, times: &[f64], exec: Execution) -> Result<Curve> {
        check_times(times)?;
        let values = exec.map(times, |&t| self.p2(t));
        Ok(Curve { times: times.to_vec(), values, reliable: self.reliable })
    }
}

pub fn p2_curve(state: &State, drive: &SidebandDrive, times: &[f64]) -> Result<Curve> {
    ReducedDynamics::new(state, drive)?.curve(times, Execution::default())
}

pub fn p2_oracle(state: &State, drive: &SidebandDrive, times: &[f64]) -> Result<Curve> {
    OracleDynamics::new(state, drive)?.curve(times, Execution::default())
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Deviation from the single-frequency oscillation `½(1 + cos|Ω|t)`.
pub fn coherent_deviation(curve: &Curve, omega_abs: f64) -> f64 {
    curve
        .times
        .iter()
        .zip(&curve.values)
        .map(|(t, p)| (p - 0.5 * (1.0 + (omega_abs * t).cos())).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent, fock, squeezed_vacuum, thermal, vacuum};
    use std::f64::consts::PI;

    fn space(dim: usize) -> FockSpace {
        FockSpace::new(dim).unwrap()
    }

    fn grid(omega: f64, n: usize) -> Vec<f64> {
        linspace(0.0, 6.0 * PI / omega, n)
    }

    #[test]
    fn jaynes_cummings_limit_parameters() {
        let c = effective_params(&SidebandDrive::red(1.7).unwrap()).unwrap();
        assert_eq!(c.nu, C64::new(0.0, 0.0));
        assert_eq!(c.mu, 1.0);
        assert!((c.omega_abs() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn two_to_one_drive() {
        let c = effective_params(&SidebandDrive::new(2.0, 1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((c.omega_abs() - 3f64.sqrt()).abs() < 1e-12);
        assert!((c.nu.re - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((c.mu - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((c.mu * c.mu - c.nu.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_of_red_sideband_only_rotates_omega() {
        let a = effective_params(&SidebandDrive::new(2.0, 1.2, 0.0, 0.4).unwrap()).unwrap();
        let b = effective_params(&SidebandDrive::new(2.0, 1.2, 1.3, 0.4).unwrap()).unwrap();
        assert!((a.omega_abs() - b.omega_abs()).abs() < 1e-14);
        assert_eq!((a.mu, a.nu), (b.mu, b.nu));
        assert!((b.omega.arg() - 1.3).abs() < 1e-14);
    }

    #[test]
    fn rejects_blue_dominant_drive() {
        assert!(SidebandDrive::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(SidebandDrive::new(1.0, 2.0, 0.0, 0.0).is_err());
        assert!(SidebandDrive::new(1.0, -0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn match_drive_round_trip() {
        for (r, theta) in [(0.0, 0.0), (0.5, 0.3), (0.88, -2.0), (1.5, 3.0)] {
            let p = SqueezeParams::from_r_theta(r, theta).unwrap();
            let d = match_drive(p, 2.5).unwrap();
            let c = effective_params(&d).unwrap();
            assert!((c.omega_abs() - 2.5).abs() < 1e-12);
            assert!((c.mu - p.mu()).abs() < 1e-12);
            assert!((c.nu - p.nu()).norm() < 1e-12);
        }
        let d = match_drive(SqueezeParams::from_r_theta(0.0, 0.0).unwrap(), 1.0).unwrap();
        assert_eq!(d.omega_b_mag(), 0.0);
    }

    #[test]
    fn fock_rabi_oscillation() {
        let s = space(24);
        let drive = SidebandDrive::red(1.0).unwrap();
        let times = grid(1.0, 97);
        for n in 0..4 {
            let st = State::from(fock(s, n).unwrap());
            let c = p2_curve(&st, &drive, &times).unwrap();
            let g = ((n + 1) as f64).sqrt();
            for (t, p) in times.iter().zip(&c.values) {
                assert!((p - 0.5 * (1.0 + (g * t).cos())).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn matched_squeezed_vacuum_oscillates_coherently() {
        let s = space(128);
        let p = SqueezeParams::from_r_theta(0.88, 0.0).unwrap();
        let st = State::from(squeezed_vacuum(s, p).unwrap());
        let drive = match_drive(p, 1.0).unwrap();
        let c = p2_curve(&st, &drive, &grid(1.0, 256)).unwrap();
        assert!(c.reliable);
        assert_eq!(c.values[0], 1.0);
        assert!(coherent_deviation(&c, 1.0) <= 1e-6);
    }

    #[test]
    fn closed_form_agrees_with_oracle() {
        let s = space(128);
        let p = SqueezeParams::from_r_theta(0.5, 0.0).unwrap();
        let states = [
            State::from(fock(s, 2).unwrap()),
            State::from(coherent(s, C64::new(1.0, 0.0)).unwrap()),
            State::from(squeezed_vacuum(s, p).unwrap()),
            State::from(thermal(s, 0.5).unwrap()),
        ];
        let drives = [match_drive(p, 1.0).unwrap(), SidebandDrive::new(1.5, 0.6, 0.7, 1.1).unwrap()];
        for st in &states {
            for d in &drives {
                let w = effective_params(d).unwrap().omega_abs();
                let times = grid(w, 64);
                let a = p2_curve(st, d, &times).unwrap();
                let b = p2_oracle(st, d, &times).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    assert!((x - y).abs() < 1e-8, "{x} vs {y}");
                    assert!(*x >= -1e-10 && *x <= 1.0 + 1e-10);
                }
            }
        }
    }

    #[test]
    fn red_sideband_phase_leaves_oracle_unchanged() {
        let s = space(40);
        let st = State::from(vacuum(s));
        let times = grid(1.0, 32);
        let a = p2_oracle(&st, &SidebandDrive::new(1.4, 0.5, 0.0, 0.2).unwrap(), &times).unwrap();
        let b = p2_oracle(&st, &SidebandDrive::new(1.4, 0.5, 2.1, 0.2).unwrap(), &times).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s = space(32);
        let st = State::from(coherent(s, C64::new(0.6, 0.2)).unwrap());
        let d = SidebandDrive::new(1.3, 0.4, 0.0, 0.0).unwrap();
        let dynamics = OracleDynamics::new(&st, &d).unwrap();
        let times = grid(1.0, 50);
        let a = dynamics.curve(&times, Execution::Sequential).unwrap();
        let b = dynamics.curve(&times, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_times_rejected() {
        let st = State::from(vacuum(space(8)));
        assert!(p2_curve(&st, &SidebandDrive::red(1.0).unwrap(), &[0.0, -1.0]).is_err());
    }
}
