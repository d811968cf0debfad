use super::{hermitize, CMatrix, CVector, FockSpace, Operator, C64};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const HERMITIAN_ABS_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-12;

/// Normalized state vector. `discarded` is the probability that fell
/// outside the space before renormalization (zero for exact constructions).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: FockSpace,
    amps: CVector,
    discarded: f64,
}

impl PureState {
    pub fn new(space: FockSpace, amps: CVector) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: amps.len() });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(PureState { space, amps, discarded: 0.0 })
    }

    /// Renormalizes `amps` and records `discarded` as the truncated-away mass.
    pub fn normalized(space: FockSpace, amps: CVector, discarded: f64) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: amps.len() });
        }
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("amplitudes have zero or non-finite norm".into()));
        }
        Ok(PureState { space, amps: amps / C64::new(norm, 0.0), discarded: discarded.max(0.0) })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn tail_mass(&self) -> f64 {
        self.space.tail_mass(&self.populations())
    }

    pub fn discarded_mass(&self) -> f64 {
        self.discarded
    }

    pub fn reliable(&self) -> bool {
        self.tail_mass() <= self.space.tail_tol() && self.discarded <= self.space.tail_tol()
    }

    pub fn expect(&self, obs: &Operator) -> Result<C64> {
        self.space.check(obs.space())?;
        Ok(self.amps.dotc(&obs.apply(&self.amps)))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.space.check(&other.space)?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn density(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    pub(crate) fn with_discarded(mut self, discarded: f64) -> Self {
        self.discarded = discarded.max(0.0);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MixedRepr {
    Density(CMatrix),
    /// Weighted pure components, kept separate so per-component checks stay available.
    Ensemble(Vec<(f64, PureState)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    space: FockSpace,
    repr: MixedRepr,
    discarded: f64,
}

impl MixedState {
    pub fn from_density(space: FockSpace, rho: CMatrix) -> Result<Self> {
        Self::from_density_discarded(space, rho, 0.0)
    }

    pub(crate) fn from_density_discarded(space: FockSpace, rho: CMatrix, discarded: f64) -> Result<Self> {
        let n = space.dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rho.nrows() });
        }
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if dev > HERMITIAN_ABS_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian (deviation {dev:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {tr} differs from 1")));
        }
        let rho = hermitize(&rho);
        if !is_diagonal(&rho) {
            let min = rho.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL {
                return Err(Error::InvalidState(format!("density matrix has eigenvalue {min:.3e}")));
            }
        } else if let Some(bad) = rho.diagonal().iter().find(|z| z.re < -PSD_TOL) {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {:.3e}", bad.re)));
        }
        Ok(MixedState { space, repr: MixedRepr::Density(rho), discarded: discarded.max(0.0) })
    }

    pub fn from_ensemble(components: Vec<(f64, PureState)>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidState("empty ensemble".into()));
        };
        let space = first.1.space;
        let mut total = 0.0;
        for (w, psi) in &components {
            space.check(&psi.space)?;
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidState(format!("ensemble weight {w} must be positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidState(format!("ensemble weights sum to {total}, not 1")));
        }
        let discarded = components.iter().map(|(w, p)| w * p.discarded).sum();
        Ok(MixedState { space, repr: MixedRepr::Ensemble(components), discarded })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn repr(&self) -> &MixedRepr {
        &self.repr
    }

    pub fn density(&self) -> CMatrix {
        match &self.repr {
            MixedRepr::Density(rho) => rho.clone(),
            MixedRepr::Ensemble(comps) => {
                let n = self.space.dim();
                comps.iter().fold(CMatrix::zeros(n, n), |acc, (w, psi)| acc + psi.density() * C64::new(*w, 0.0))
            }
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            MixedRepr::Density(rho) => rho.diagonal().iter().map(|z| z.re).collect(),
            MixedRepr::Ensemble(comps) => {
                let mut p = vec![0.0; self.space.dim()];
                for (w, psi) in comps {
                    for (acc, q) in p.iter_mut().zip(psi.populations()) {
                        *acc += w * q;
                    }
                }
                p
            }
        }
    }

    pub fn tail_mass(&self) -> f64 {
        self.space.tail_mass(&self.populations())
    }

    pub fn discarded_mass(&self) -> f64 {
        self.discarded
    }

    pub fn reliable(&self) -> bool {
        self.tail_mass() <= self.space.tail_tol() && self.discarded <= self.space.tail_tol()
    }

    pub fn expect(&self, obs: &Operator) -> Result<C64> {
        self.space.check(obs.space())?;
        match &self.repr {
            MixedRepr::Density(rho) => Ok(trace_product(rho, obs.matrix())),
            MixedRepr::Ensemble(comps) => {
                let mut acc = C64::new(0.0, 0.0);
                for (w, psi) in comps {
                    acc += psi.expect(obs)? * *w;
                }
                Ok(acc)
            }
        }
    }
}

/// A pure or mixed oscillator state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(MixedState),
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<MixedState> for State {
    fn from(m: MixedState) -> Self {
        State::Mixed(m)
    }
}

impl State {
    pub fn space(&self) -> &FockSpace {
        match self {
            State::Pure(p) => p.space(),
            State::Mixed(m) => m.space(),
        }
    }

    pub fn expect(&self, obs: &Operator) -> Result<C64> {
        match self {
            State::Pure(p) => p.expect(obs),
            State::Mixed(m) => m.expect(obs),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        match self {
            State::Pure(p) => p.populations(),
            State::Mixed(m) => m.populations(),
        }
    }

    pub fn tail_mass(&self) -> f64 {
        match self {
            State::Pure(p) => p.tail_mass(),
            State::Mixed(m) => m.tail_mass(),
        }
    }

    pub fn discarded_mass(&self) -> f64 {
        match self {
            State::Pure(p) => p.discarded_mass(),
            State::Mixed(m) => m.discarded_mass(),
        }
    }

    pub fn reliable(&self) -> bool {
        match self {
            State::Pure(p) => p.reliable(),
            State::Mixed(m) => m.reliable(),
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            State::Pure(p) => p.density(),
            State::Mixed(m) => m.density(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Mixed(_) => None,
        }
    }

    /// Decomposition into weighted vectors: the ensemble itself, the state
    /// vector with weight 1, or the eigenvectors of a density matrix
    /// (basis vectors when it is diagonal).
    pub fn components(&self) -> Vec<(f64, CVector)> {
        match self {
            State::Pure(p) => vec![(1.0, p.amplitudes().clone())],
            State::Mixed(m) => match m.repr() {
                MixedRepr::Ensemble(comps) => {
                    comps.iter().map(|(w, psi)| (*w, psi.amplitudes().clone())).collect()
                }
                MixedRepr::Density(rho) => {
                    let n = rho.nrows();
                    if is_diagonal(rho) {
                        (0..n)
                            .filter(|&i| rho[(i, i)].re > 0.0)
                            .map(|i| {
                                let mut v = CVector::zeros(n);
                                v[i] = C64::new(1.0, 0.0);
                                (rho[(i, i)].re, v)
                            })
                            .collect()
                    } else {
                        let eig = rho.clone().symmetric_eigen();
                        (0..n)
                            .filter(|&i| eig.eigenvalues[i] > 0.0)
                            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
                            .collect()
                    }
                }
            },
        }
    }
}

/// `Tr(ρ A)`.
pub(crate) fn trace_product(rho: &CMatrix, a: &CMatrix) -> C64 {
    let n = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * a[(j, i)];
        }
    }
    acc
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}
