//! Quantum-noise-free states for a measurement operator `f`: the (near)
//! kernel of `f†f`, and the mean-shifted problem `(f − λ)|ψ⟩ = 0` solved by
//! alternating `λ = ⟨ψ|f|ψ⟩` with the minimal eigenvector of `(f−λ)†(f−λ)`.

use crate::error::Result;
use crate::fock::{CVector, HermitianEigensystem, MixedRepr, Operator, PureState, State, C64};

pub const SHIFTED_MAX_ITERATIONS: usize = 200;
pub const SHIFTED_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-10;
const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QnfSolution {
    pub state: PureState,
    /// `‖(f − λ)|ψ⟩‖`.
    pub residual: f64,
    pub lambda: C64,
    pub iterations: usize,
    pub converged: bool,
    /// False when the solution puts more than `tail_tol` on the top levels.
    pub reliable: bool,
    /// Residual after each accepted iterate, non-increasing.
    pub history: Vec<f64>,
}

/// Minimal eigenvector of a Hermitian matrix with a deterministic choice
/// inside a degenerate eigenspace: the projection of the lowest basis vector
/// the eigenspace touches. The first significant amplitude is made real positive.
pub(crate) fn minimal_eigenvector(eig: &HermitianEigensystem) -> CVector {
    let lam0 = eig.eigenvalues[0];
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let degenerate: Vec<usize> =
        (0..eig.len()).take_while(|&i| eig.eigenvalues[i] - lam0 <= DEGENERACY_TOL * scale).collect();
    let v = &eig.eigenvectors;
    let mut out = if degenerate.len() == 1 {
        v.column(0).into_owned()
    } else {
        let n = v.nrows();
        let row_weight = |b: usize| degenerate.iter().map(|&j| v[(b, j)].norm_sqr()).sum::<f64>();
        let b = (0..n).find(|&b| row_weight(b) > 1e-16).unwrap_or(0);
        let mut acc = CVector::zeros(n);
        for &j in &degenerate {
            let col = v.column(j);
            acc += col * col[b].conj();
        }
        let norm = acc.norm();
        acc / C64::new(norm, 0.0)
    };
    fix_phase(&mut out);
    out
}

fn fix_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_TOL).copied() {
        let rot = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

fn solution(f: &Operator, psi: CVector, lambda: C64, iterations: usize, converged: bool, history: Vec<f64>) -> Result<QnfSolution> {
    let shifted = &f.apply(&psi) - &psi * lambda;
    let residual = shifted.norm();
    let state = PureState::normalized(*f.space(), psi, 0.0)?;
    let reliable = state.reliable();
    Ok(QnfSolution { state, residual, lambda, iterations, converged, reliable, history })
}

/// State minimizing `⟨f†f⟩`: the minimal eigenvector of `f†f`.
pub fn solve_kernel(f: &Operator) -> Result<QnfSolution> {
    let eig = HermitianEigensystem::of_matrix(f.gram().matrix());
    let psi = minimal_eigenvector(&eig);
    let residual = f.apply(&psi).norm();
    solution(f, psi, C64::new(0.0, 0.0), 1, true, vec![residual])
}

fn shifted_residual(f: &Operator, psi: &CVector) -> (C64, f64) {
    let fpsi = f.apply(psi);
    let lambda = psi.dotc(&fpsi);
    (lambda, (fpsi - psi * lambda).norm())
}

/// Alternating minimization of `‖(f − λ)|ψ⟩‖`, started from the kernel solution.
pub fn solve_shifted(f: &Operator) -> Result<QnfSolution> {
    let start = solve_kernel(f)?;
    let mut psi = start.state.amplitudes().clone();
    let (mut lambda, mut residual) = shifted_residual(f, &psi);
    let mut history = vec![residual];
    let mut iterations = 0;
    let mut converged = false;
    let id = f.space().identity();
    while iterations < SHIFTED_MAX_ITERATIONS {
        iterations += 1;
        let g = f - &id.scale(lambda);
        let eig = HermitianEigensystem::of_matrix(g.gram().matrix());
        let next = minimal_eigenvector(&eig);
        let (next_lambda, next_residual) = shifted_residual(f, &next);
        if next_residual > residual {
            // rounding-level increase: the previous iterate is the fixed point
            converged = true;
            break;
        }
        let change = residual - next_residual;
        psi = next;
        lambda = next_lambda;
        residual = next_residual;
        history.push(residual);
        if change < SHIFTED_TOL {
            converged = true;
            break;
        }
    }
    solution(f, psi, lambda, iterations, converged, history)
}

/// `⟨f†f⟩ ≤ tol`; for an ensemble every component must satisfy `‖f|ψ⟩‖² ≤ tol`.
pub fn verify_perfect(state: &State, f: &Operator, tol: f64) -> Result<bool> {
    state.space().check(f.space())?;
    if let State::Mixed(m) = state {
        if let MixedRepr::Ensemble(comps) = m.repr() {
            return Ok(comps.iter().all(|(_, psi)| f.apply(psi.amplitudes()).norm_squared() <= tol));
        }
    }
    let total: f64 = state.components().iter().map(|(w, psi)| w * f.apply(psi).norm_squared()).sum();
    Ok(total <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockSpace, MixedState};
    use crate::states::{fock, squeezed_vacuum, vacuum, SqueezeParams};

    fn space(dim: usize) -> FockSpace {
        FockSpace::new(dim).unwrap()
    }

    fn bogoliubov(s: FockSpace, p: SqueezeParams) -> Operator {
        &s.annihilation().scale(C64::new(p.mu(), 0.0)) + &s.creation().scale(p.nu())
    }

    #[test]
    fn kernel_of_annihilation_is_vacuum() {
        let s = space(20);
        let sol = solve_kernel(&s.annihilation()).unwrap();
        assert!(sol.residual <= 1e-10);
        assert!((sol.state.fidelity(&vacuum(s)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(sol.state.amplitudes()[0].im, 0.0);
    }

    #[test]
    fn kernel_recovers_squeezed_vacuum() {
        let s = space(128);
        let p = SqueezeParams::from_r_theta(0.75, 0.0).unwrap();
        let sol = solve_kernel(&bogoliubov(s, p)).unwrap();
        let analytic = squeezed_vacuum(s, p).unwrap();
        assert!(sol.state.fidelity(&analytic).unwrap() >= 1.0 - 1e-8);
        assert!(sol.reliable);
    }

    #[test]
    fn kernel_of_shifted_number() {
        let s = space(12);
        let f = &s.number() - &s.identity().scale(C64::new(2.0, 0.0));
        let sol = solve_kernel(&f).unwrap();
        assert!(sol.residual <= 1e-12);
        assert!((sol.state.fidelity(&fock(s, 2).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let lam_min = HermitianEigensystem::of_matrix(f.gram().matrix()).eigenvalues[0];
        assert!((sol.residual.powi(2) - lam_min).abs() < 1e-10);
    }

    #[test]
    fn shifted_number_returns_vacuum() {
        let s = space(10);
        let sol = solve_shifted(&s.number()).unwrap();
        assert!(sol.residual <= 1e-12);
        assert!((sol.state.fidelity(&vacuum(s)).unwrap() - 1.0).abs() < 1e-12);
        assert!(sol.converged);
    }

    #[test]
    fn shifted_annihilation_stays_at_kernel() {
        let s = space(40);
        let sol = solve_shifted(&s.annihilation()).unwrap();
        assert!(sol.residual <= 1e-10);
        assert!(sol.lambda.norm() < 1e-10);
    }

    #[test]
    fn degenerate_tie_break_is_deterministic() {
        // x̂² has a degenerate ± pair at the bottom of its spectrum
        let s = space(32);
        let x = s.quadrature(0.0);
        let a = solve_shifted(&x).unwrap();
        let b = solve_shifted(&x).unwrap();
        assert_eq!(a, b);
        assert!(a.residual > 0.0);
        assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
        let first = a.state.amplitudes().iter().find(|z| z.norm() > 1e-12).unwrap();
        assert!(first.im == 0.0 && first.re > 0.0);
        assert!(!a.reliable);
    }

    #[test]
    fn perfect_quantumness_checks() {
        let s = space(128);
        let p = SqueezeParams::from_r_theta(0.8, 0.3).unwrap();
        let sq = squeezed_vacuum(s, p).unwrap();
        let f = bogoliubov(s, p);
        assert!(verify_perfect(&State::from(sq.clone()), &f, 1e-8).unwrap());
        let vac = State::from(vacuum(s));
        assert!(!verify_perfect(&vac, &s.creation(), 0.99).unwrap());
        let mix = State::from(MixedState::from_ensemble(vec![(0.5, vacuum(s)), (0.5, fock(s, 1).unwrap())]).unwrap());
        assert!(!verify_perfect(&mix, &s.annihilation(), 1e-8).unwrap());
        let same = State::from(MixedState::from_ensemble(vec![(0.3, sq.clone()), (0.7, sq)]).unwrap());
        assert!(verify_perfect(&same, &f, 1e-8).unwrap());
    }
}
