//! Operational nonclassicality of a state seen through a measurement operator `f`.
//!
//! For `f` the report holds `⟨f†f⟩`, `⟨:f†f:⟩`, their difference
//! `Δ = ⟨:f†f:⟩ − ⟨f†f⟩` and the ratio `R = ⟨:f†f:⟩/Δ`, with `R = 0`
//! whenever `⟨:f†f:⟩ ≥ 0`. Since `⟨f†f⟩ ≥ 0` we always have
//! `Δ ≤ ⟨:f†f:⟩`, so `0 ≤ R ≤ 1`, and `R = 1` exactly when `⟨f†f⟩ = 0`.

use std::fmt;

use crate::algebra::{parse_polynomial, Polynomial};
use crate::error::{Error, Result};
use crate::fock::{hermitian_eig, CVector, FockSpace, HermitianEigensystem, Operator, State, C64};

/// `⟨:f†f:⟩` values in `[−CLAMP_TOL, 0)` are treated as numerical noise.
pub const CLAMP_TOL: f64 = 1e-10;
/// `⟨f†f⟩` at or below this counts as zero (perfect quantumness).
pub const PERFECT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum ObservableForm {
    Symbolic(Polynomial),
    Matrix(Operator),
    /// `f = 1 + e^{i(k x̂_φ + φ̃)}`.
    Characteristic { k: f64, phi: f64, phi_tilde: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    pub form: ObservableForm,
    /// Replace `f` by `f − ⟨f⟩` using the evaluated state.
    pub mean_shift: bool,
}

impl ObservableSpec {
    pub fn symbolic(p: Polynomial) -> Self {
        ObservableSpec { form: ObservableForm::Symbolic(p), mean_shift: false }
    }

    pub fn matrix(op: Operator) -> Self {
        ObservableSpec { form: ObservableForm::Matrix(op), mean_shift: false }
    }

    pub fn characteristic(k: f64, phi: f64, phi_tilde: f64) -> Result<Self> {
        if !(k.is_finite() && phi.is_finite() && phi_tilde.is_finite()) {
            return Err(Error::InvalidParameter("characteristic observable needs finite k, φ, φ̃".into()));
        }
        Ok(ObservableSpec { form: ObservableForm::Characteristic { k, phi, phi_tilde }, mean_shift: false })
    }

    pub fn shifted(mut self) -> Self {
        self.mean_shift = true;
        self
    }

    /// `delta:` prefix for a mean shift, then either `cf:k,phi,phi_tilde`
    /// or a ladder polynomial.
    pub fn parse(src: &str) -> Result<Self> {
        let s = src.trim();
        if let Some(rest) = s.strip_prefix("delta:") {
            return Ok(Self::parse(rest)?.shifted());
        }
        if let Some(rest) = s.strip_prefix("cf:") {
            let vals = rest
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{t}` in `{s}`"))))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != 3 {
                return Err(Error::Config(format!("`{s}` expects cf:k,phi,phi_tilde")));
            }
            return Self::characteristic(vals[0], vals[1], vals[2]);
        }
        Ok(Self::symbolic(parse_polynomial(s)?))
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mean_shift {
            write!(f, "delta:")?;
        }
        match &self.form {
            ObservableForm::Symbolic(p) => write!(f, "{p}"),
            ObservableForm::Matrix(op) => write!(f, "matrix[{}]", op.dim()),
            ObservableForm::Characteristic { k, phi, phi_tilde } => write!(f, "cf:{k},{phi},{phi_tilde}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    pub ff_mean: f64,
    pub normal_mean: f64,
    pub delta: f64,
    pub r: f64,
    /// False when the state (or the observable) is affected by truncation.
    pub reliable: bool,
    /// `⟨:f†f:⟩` fell in the noise band below zero and `R` was forced to 0.
    pub clamped: bool,
}

impl WitnessReport {
    pub fn from_means(ff_mean: f64, normal_mean: f64, reliable: bool) -> Self {
        let ff_mean = if (-CLAMP_TOL..0.0).contains(&ff_mean) { 0.0 } else { ff_mean };
        let delta = normal_mean - ff_mean;
        let (r, clamped) = if normal_mean >= 0.0 {
            (0.0, false)
        } else if normal_mean >= -CLAMP_TOL {
            (0.0, true)
        } else if ff_mean <= PERFECT_TOL {
            (1.0, false)
        } else {
            (normal_mean / delta, false)
        };
        WitnessReport { ff_mean, normal_mean, delta, r, reliable, clamped }
    }

    pub fn is_nonclassical(&self) -> bool {
        self.r > 0.0
    }
}

fn symbolic_means(state: &State, p: &Polynomial, mean_shift: bool) -> Result<(f64, f64)> {
    let space = *state.space();
    if space.dim() <= p.degree() + 4 {
        return Err(Error::InvalidParameter(format!(
            "dim {} must exceed polynomial degree {} + 4",
            space.dim(),
            p.degree()
        )));
    }
    let f = if mean_shift {
        let mean = state.expect(&p.normal_order().to_matrix(space))?;
        p.sub(&Polynomial::scalar(mean))
    } else {
        p.clone()
    };
    let gram = f.gram()?;
    let ff = state.expect(&gram.normal_order().to_matrix(space))?.re;
    let normal = state.expect(&gram.formal_normal_order().to_matrix(space))?.re;
    Ok((ff, normal))
}

fn matrix_ff(state: &State, op: &Operator, mean_shift: bool) -> Result<f64> {
    state.space().check(op.space())?;
    let f = if mean_shift {
        let mean = state.expect(op)?;
        op - &op.space().identity().scale(mean)
    } else {
        op.clone()
    };
    Ok(state.components().iter().map(|(w, psi)| w * f.apply(psi).norm_squared()).sum())
}

/// `⟨f†f⟩` alone; the only quantity available for a bare matrix observable.
pub fn ff_mean(state: &State, spec: &ObservableSpec) -> Result<f64> {
    match &spec.form {
        ObservableForm::Symbolic(p) => Ok(symbolic_means(state, p, spec.mean_shift)?.0),
        ObservableForm::Matrix(op) => matrix_ff(state, op, spec.mean_shift),
        ObservableForm::Characteristic { k, phi, phi_tilde } => {
            Ok(characteristic_means(state, *k, *phi, *phi_tilde, spec.mean_shift)?.0 .0)
        }
    }
}

pub fn evaluate(state: &State, spec: &ObservableSpec) -> Result<WitnessReport> {
    match &spec.form {
        ObservableForm::Symbolic(p) => {
            let (ff, normal) = symbolic_means(state, p, spec.mean_shift)?;
            Ok(WitnessReport::from_means(ff, normal, state.reliable()))
        }
        ObservableForm::Matrix(_) => Err(Error::NormalOrderUndefined),
        ObservableForm::Characteristic { k, phi, phi_tilde } => {
            let ((ff, normal), reliable) = characteristic_means(state, *k, *phi, *phi_tilde, spec.mean_shift)?;
            Ok(WitnessReport::from_means(ff, normal, reliable))
        }
    }
}

/// `⟨:(Δx̂_φ)²:⟩ = Var(x̂_φ) − 1`; negative iff the state is squeezed at `φ`.
pub fn squeezing_witness(state: &State, phi: f64) -> Result<f64> {
    Ok(symbolic_means(state, &Polynomial::quadrature(phi), true)?.1)
}

/// Characteristic functions `⟨e^{ikx̂_φ}⟩` of one state at a fixed phase,
/// using a single eigendecomposition of `x̂_φ` for every `k`.
#[derive(Debug, Clone)]
pub struct CharacteristicFunction {
    space: FockSpace,
    eigenvalues: Vec<f64>,
    /// `⟨v_j|ρ|v_j⟩` in the eigenbasis of `x̂_φ`.
    weights: Vec<f64>,
    state_reliable: bool,
}

impl CharacteristicFunction {
    pub fn new(state: &State, phi: f64) -> Result<Self> {
        let space = *state.space();
        let eig = hermitian_eig(&space.quadrature(phi))?;
        Ok(Self::with_eigensystem(state, &eig))
    }

    pub(crate) fn with_eigensystem(state: &State, eig: &HermitianEigensystem) -> Self {
        let mut weights = vec![0.0; eig.len()];
        for (w, psi) in state.components() {
            let c: CVector = eig.coordinates(&psi);
            for (acc, z) in weights.iter_mut().zip(c.iter()) {
                *acc += w * z.norm_sqr();
            }
        }
        CharacteristicFunction {
            space: *state.space(),
            eigenvalues: eig.eigenvalues.clone(),
            weights,
            state_reliable: state.reliable(),
        }
    }

    pub fn wigner(&self, k: f64) -> C64 {
        if k == 0.0 {
            return C64::new(1.0, 0.0);
        }
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(lam, w)| C64::from_polar(*w, k * lam))
            .sum()
    }

    /// `e^{k²/2} ⟨e^{ikx̂_φ}⟩`, the normally ordered counterpart.
    pub fn p(&self, k: f64) -> C64 {
        if k == 0.0 {
            return C64::new(1.0, 0.0);
        }
        self.wigner(k) * (k * k / 2.0).exp()
    }

    pub fn reliable(&self, k: f64) -> bool {
        self.state_reliable && k_within_space(self.space, k)
    }

    /// Report for `f = 1 + e^{i(k x̂_φ + φ̃)}`.
    pub fn witness(&self, k: f64, phi_tilde: f64, mean_shift: bool) -> WitnessReport {
        let (ff, normal) = cf_means(self.wigner(k), self.p(k), phi_tilde, mean_shift);
        WitnessReport::from_means(ff, normal, self.reliable(k))
    }
}

/// `e^{ikx̂}` displaces by `|k|`; beyond `|k| ≤ √dim/2` the top levels are reached.
pub fn k_within_space(space: FockSpace, k: f64) -> bool {
    k.abs() <= 0.5 * (space.dim() as f64).sqrt()
}

fn cf_means(cf_w: C64, cf_p: C64, phi_tilde: f64, mean_shift: bool) -> (f64, f64) {
    let phase = C64::from_polar(1.0, phi_tilde);
    let ff = 2.0 + 2.0 * (phase * cf_w).re;
    let normal = 2.0 + 2.0 * (phase * cf_p).re;
    if !mean_shift {
        return (ff, normal);
    }
    // Δf = f − ⟨f⟩: ⟨Δf†Δf⟩ = ⟨f†f⟩ − |⟨f⟩|², ⟨:Δf†Δf:⟩ = ⟨:f†f:⟩ − 2Re(⟨f⟩*⟨:f:⟩) + |⟨f⟩|²
    let mean = 1.0 + phase * cf_w;
    let normal_mean = 1.0 + phase * cf_p;
    (ff - mean.norm_sqr(), normal - 2.0 * (mean.conj() * normal_mean).re + mean.norm_sqr())
}

fn characteristic_means(state: &State, k: f64, phi: f64, phi_tilde: f64, mean_shift: bool) -> Result<((f64, f64), bool)> {
    let cf = CharacteristicFunction::new(state, phi)?;
    Ok((cf_means(cf.wigner(k), cf.p(k), phi_tilde, mean_shift), cf.reliable(k)))
}

pub fn cf_wigner(state: &State, k: f64, phi: f64) -> Result<C64> {
    Ok(CharacteristicFunction::new(state, phi)?.wigner(k))
}

pub fn cf_p(state: &State, k: f64, phi: f64) -> Result<C64> {
    Ok(CharacteristicFunction::new(state, phi)?.p(k))
}

pub fn cf_witness(state: &State, k: f64, phi: f64, phi_tilde: f64) -> Result<WitnessReport> {
    evaluate(state, &ObservableSpec::characteristic(k, phi, phi_tilde)?)
}

/// Truncated matrix of the observable, as handed to the solver: letter
/// products for a polynomial, `1 + e^{iφ̃} e^{ikx̂_φ}` for the characteristic form.
/// The mean shift is not applied here.
pub fn observable_operator(spec: &ObservableSpec, space: FockSpace) -> Result<Operator> {
    match &spec.form {
        ObservableForm::Symbolic(p) => Ok(p.direct_matrix(space)),
        ObservableForm::Matrix(op) => {
            space.check(op.space())?;
            Ok(op.clone())
        }
        ObservableForm::Characteristic { k, phi, phi_tilde } => {
            let eig = hermitian_eig(&space.quadrature(*phi))?;
            let phase = C64::from_polar(1.0, *phi_tilde);
            let m = eig.map(|lam| C64::new(1.0, 0.0) + phase * C64::from_polar(1.0, k * lam));
            Operator::from_matrix(space, m)
        }
    }
}

/// Writes a Hermitian `A` as `f†f − κ·1` with `κ = −λ_min(A)` and
/// `f = √(A + κ)` the positive square root.
pub fn hermitian_split(a: &Operator) -> Result<(Operator, f64)> {
    let eig = hermitian_eig(a)?;
    let kappa = -eig.eigenvalues[0];
    let m = eig.map(|lam| C64::new((lam + kappa).max(0.0).sqrt(), 0.0));
    Ok((Operator::from_matrix(*a.space(), crate::fock::hermitize(&m))?, kappa))
}
