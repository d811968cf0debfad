use super::{hermitize, CMatrix, CVector, FockSpace, MixedRepr, MixedState, Operator, PureState, State, C64};
use crate::error::Result;

/// Spectral decomposition `A = V diag(λ) V†` with ascending `λ`.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEigensystem {
    /// Decomposes an arbitrary Hermitian matrix; the caller vouches for hermiticity.
    pub fn of_matrix(m: &CMatrix) -> Self {
        let eig = hermitize(m).symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = CMatrix::zeros(m.nrows(), n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        HermitianEigensystem { eigenvalues, eigenvectors }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `V diag(g(λ)) V†` for a complex-valued `g`.
    pub fn map(&self, g: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let gj = g(lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= gj;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| C64::new(x, 0.0))
    }

    /// Columns of `V†ψ`: the coordinates of `ψ` in the eigenbasis.
    pub fn coordinates(&self, psi: &CVector) -> CVector {
        self.eigenvectors.adjoint() * psi
    }
}

pub fn hermitian_eig(obs: &Operator) -> Result<HermitianEigensystem> {
    obs.ensure_hermitian()?;
    Ok(HermitianEigensystem::of_matrix(obs.matrix()))
}

/// `g(A)` for Hermitian `A` and a real scalar function `g`.
pub fn matrix_function(obs: &Operator, g: impl Fn(f64) -> f64) -> Result<Operator> {
    let eig = hermitian_eig(obs)?;
    let m = hermitize(&eig.map(|x| C64::new(g(x), 0.0)));
    Operator::from_matrix(*obs.space(), m)
}

/// `e^{−iHt}` applied to a state (ħ = 1).
pub fn unitary_evolve(h: &Operator, t: f64, state: &State) -> Result<State> {
    h.space().check(state.space())?;
    let eig = hermitian_eig(h)?;
    let phases = |psi: &CVector| -> CVector {
        let mut c = eig.coordinates(psi);
        for (z, &lam) in c.iter_mut().zip(&eig.eigenvalues) {
            *z *= C64::from_polar(1.0, -lam * t);
        }
        &eig.eigenvectors * c
    };
    let space: FockSpace = *h.space();
    Ok(match state {
        State::Pure(p) => {
            let out = PureState::normalized(space, phases(p.amplitudes()), p.discarded_mass())?;
            State::Pure(out)
        }
        State::Mixed(m) => match m.repr() {
            MixedRepr::Ensemble(comps) => {
                let evolved = comps
                    .iter()
                    .map(|(w, p)| Ok((*w, PureState::normalized(space, phases(p.amplitudes()), p.discarded_mass())?)))
                    .collect::<Result<Vec<_>>>()?;
                State::Mixed(MixedState::from_ensemble(evolved)?)
            }
            MixedRepr::Density(rho) => {
                let u = eig.map(|lam| C64::from_polar(1.0, -lam * t));
                let out = &u * rho * u.adjoint();
                State::Mixed(MixedState::from_density_discarded(space, out, m.discarded_mass())?)
            }
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(space: FockSpace, rng: &mut ChaCha8Rng) -> Operator {
        let n = space.dim();
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        Operator::from_matrix(space, hermitize(&m)).unwrap()
    }

    fn fock(space: FockSpace, n: usize) -> PureState {
        let mut v = CVector::zeros(space.dim());
        v[n] = C64::new(1.0, 0.0);
        PureState::new(space, v).unwrap()
    }

    #[test]
    fn number_spectrum() {
        let s = FockSpace::new(4).unwrap();
        let eig = hermitian_eig(&s.number()).unwrap();
        for (k, lam) in eig.eigenvalues.iter().enumerate() {
            assert!((lam - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_spectrum_is_symmetric() {
        let s = FockSpace::new(20).unwrap();
        let eig = hermitian_eig(&s.quadrature(0.0)).unwrap();
        let n = eig.len();
        for k in 0..n {
            assert!((eig.eigenvalues[k] + eig.eigenvalues[n - 1 - k]).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_unitary_and_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = FockSpace::new(24).unwrap();
        for _ in 0..5 {
            let a = random_hermitian(s, &mut rng);
            let eig = hermitian_eig(&a).unwrap();
            let v = &eig.eigenvectors;
            let id = CMatrix::identity(24, 24);
            assert!((v.adjoint() * v - id).norm() < 1e-10);
            assert!((eig.reconstruct() - a.matrix()).norm() <= 1e-10 * a.norm());
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let s = FockSpace::new(4).unwrap();
        assert!(matches!(hermitian_eig(&s.annihilation()), Err(Error::NotHermitian { .. })));
        assert!(matrix_function(&s.annihilation(), f64::cos).is_err());
        let st = State::from(fock(s, 0));
        assert!(unitary_evolve(&s.annihilation(), 1.0, &st).is_err());
    }

    #[test]
    fn matrix_function_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = FockSpace::new(16).unwrap();
        let a = random_hermitian(s, &mut rng);
        let same = matrix_function(&a, |x| x).unwrap();
        assert!((same.matrix() - a.matrix()).norm() < 1e-10 * a.norm().max(1.0));
        let c = matrix_function(&s.zero(), f64::cos).unwrap();
        assert!((c.matrix() - CMatrix::identity(16, 16)).norm() < 1e-14);
        assert!(c.is_hermitian());

        let shifted = &s.number() + &s.identity();
        let t = 1.7;
        let f = matrix_function(&shifted, |x| (t * x.sqrt()).cos()).unwrap();
        for n in 0..16 {
            let v = f.matrix()[(n, n)];
            assert!((v.re - (t * ((n + 1) as f64).sqrt()).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_cosine_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = FockSpace::new(10).unwrap();
        let raw = random_hermitian(s, &mut rng);
        // rescale to spectral norm 5
        let eig = hermitian_eig(&raw).unwrap();
        let spec = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let a = raw.scale(C64::new(5.0 / spec, 0.0));
        let cos_a = matrix_function(&a, f64::cos).unwrap();

        let a2 = a.matrix() * a.matrix();
        let mut term = CMatrix::identity(10, 10);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &a2 * C64::new(-1.0 / ((2 * k - 1) * 2 * k) as f64, 0.0);
            sum += &term;
        }
        let err = (cos_a.matrix() - sum).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn evolution_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = FockSpace::new(12).unwrap();
        let v = CVector::from_fn(12, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let psi = State::from(PureState::normalized(s, v, 0.0).unwrap());

        let same = unitary_evolve(&s.number(), 0.0, &psi).unwrap();
        assert!((same.as_pure().unwrap().amplitudes() - psi.as_pure().unwrap().amplitudes()).norm() < 1e-12);

        let back = unitary_evolve(&s.number(), 2.0 * std::f64::consts::PI, &psi).unwrap();
        let overlap = back.as_pure().unwrap().inner(psi.as_pure().unwrap()).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);

        for _ in 0..4 {
            let h = random_hermitian(s, &mut rng);
            let t = rng.random_range(-10.0..10.0);
            let out = unitary_evolve(&h, t, &psi).unwrap();
            // normalized() renormalizes, so check the raw propagation instead
            let eig = hermitian_eig(&h).unwrap();
            let u = eig.map(|lam| C64::from_polar(1.0, -lam * t));
            let raw = &u * psi.as_pure().unwrap().amplitudes();
            assert!((raw.norm() - 1.0).abs() < 1e-10);
            assert!((raw - out.as_pure().unwrap().amplitudes()).norm() < 1e-10);
        }
    }

    #[test]
    fn evolving_density_matches_pure() {
        let s = FockSpace::new(8).unwrap();
        let p = fock(s, 1);
        let h = s.quadrature(0.4);
        let rho = State::from(MixedState::from_density(s, p.density()).unwrap());
        let a = unitary_evolve(&h, 0.9, &State::from(p)).unwrap();
        let b = unitary_evolve(&h, 0.9, &rho).unwrap();
        assert!((a.density() - b.density()).norm() < 1e-12);
    }
}
