//! Constructors for the oscillator states used throughout the crate, and the
//! textual state specification used by configuration files:
//! `fock:n`, `coherent:re,im`, `squeezed:r,theta`, `thermal:nbar`,
//! `mix:[w1 spec1; w2 spec2; ...]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{CMatrix, CVector, FockSpace, MixedState, PureState, State, C64};

/// Bogoliubov pair with `μ² − |ν|² = 1`; the squeezed vacuum is annihilated by `μa + νa†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    mu: f64,
    nu: C64,
}

impl SqueezeParams {
    pub fn new(mu: f64, nu: C64) -> Result<Self> {
        if !(mu >= 1.0 && mu.is_finite() && nu.re.is_finite() && nu.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeeze parameters mu={mu}, nu={nu} invalid")));
        }
        let defect = mu * mu - nu.norm_sqr() - 1.0;
        if defect.abs() > 1e-12 * (mu * mu).max(1.0) {
            return Err(Error::InvalidParameter(format!("mu^2 - |nu|^2 = 1 violated by {defect:.3e}")));
        }
        Ok(SqueezeParams { mu, nu })
    }

    /// `ν = e^{iθ} sinh r`, `μ = cosh r`.
    pub fn from_r_theta(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing r={r}, theta={theta} invalid")));
        }
        Self::new(r.cosh(), C64::from_polar(r.sinh(), theta))
    }

    pub fn from_nu(nu: C64) -> Result<Self> {
        Self::new((1.0 + nu.norm_sqr()).sqrt(), nu)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn r(&self) -> f64 {
        self.nu.norm().asinh()
    }

    pub fn theta(&self) -> f64 {
        self.nu.arg()
    }

    /// Quadrature phase `φ` at which `x̂_φ` has variance `e^{−2r}`.
    pub fn squeezed_phase(&self) -> f64 {
        self.theta() / 2.0
    }
}

pub fn fock(space: FockSpace, n: usize) -> Result<PureState> {
    if n >= space.dim() {
        return Err(Error::InvalidState(format!("Fock level {n} outside dim {}", space.dim())));
    }
    let mut v = CVector::zeros(space.dim());
    v[n] = C64::new(1.0, 0.0);
    PureState::new(space, v)
}

pub fn vacuum(space: FockSpace) -> PureState {
    fock(space, 0).expect("dim >= 2")
}

/// Coherent state `|α⟩`, truncated and renormalized.
pub fn coherent(space: FockSpace, alpha: C64) -> Result<PureState> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("coherent amplitude {alpha} not finite")));
    }
    let dim = space.dim();
    let mut amps = CVector::zeros(dim);
    // α^n/√n! scaled by e^{−|α|²/2} so partial sums are probabilities
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut kept = 0.0;
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        amps[n] = c;
        kept += c.norm_sqr();
    }
    if kept == 0.0 {
        return Err(Error::InvalidState(format!("coherent amplitude {alpha} has no weight below dim {dim}")));
    }
    PureState::normalized(space, amps, 1.0 - kept)
}

/// Squeezed vacuum from its even-level expansion
/// `c_{2m} ∝ (−ν/(2μ))^m √((2m)!)/m!`.
pub fn squeezed_vacuum(space: FockSpace, params: SqueezeParams) -> Result<PureState> {
    let dim = space.dim();
    let ratio = -params.nu / (2.0 * params.mu);
    let mut amps = CVector::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    let mut total = 0.0;
    let mut m = 0usize;
    while 2 * m < dim {
        if m > 0 {
            let k = (2 * m) as f64;
            c = c * ratio * ((k - 1.0) * k).sqrt() / (m as f64);
        }
        amps[2 * m] = c;
        total += c.norm_sqr();
        m += 1;
    }
    // untruncated norm² is μ
    let discarded = 1.0 - total / params.mu;
    PureState::normalized(space, amps, discarded)
}

/// Thermal state with mean occupation `nbar`, as a diagonal density matrix.
pub fn thermal(space: FockSpace, nbar: f64) -> Result<MixedState> {
    let p = thermal_populations(space, nbar)?;
    let dim = space.dim();
    let q = nbar / (1.0 + nbar);
    let mut rho = CMatrix::zeros(dim, dim);
    for (n, pn) in p.iter().enumerate() {
        rho[(n, n)] = C64::new(*pn, 0.0);
    }
    MixedState::from_density_discarded(space, rho, q.powi(dim as i32))
}

fn thermal_populations(space: FockSpace, nbar: f64) -> Result<Vec<f64>> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("thermal occupation {nbar} invalid")));
    }
    let q = nbar / (1.0 + nbar);
    let mut p = Vec::with_capacity(space.dim());
    let mut x = 1.0;
    for _ in 0..space.dim() {
        p.push(x);
        x *= q;
    }
    let s: f64 = p.iter().sum();
    Ok(p.into_iter().map(|v| v / s).collect())
}

/// Ensemble `Σ p_ψ |ψ⟩⟨ψ|`, kept as components.
pub fn mixture(components: Vec<(f64, PureState)>) -> Result<MixedState> {
    MixedState::from_ensemble(components)
}

/// Parsed, not yet instantiated state description.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Fock(usize),
    Coherent(C64),
    Squeezed { r: f64, theta: f64 },
    Thermal(f64),
    Mix(Vec<(f64, StateSpec)>),
}

impl StateSpec {
    pub fn parse(src: &str) -> Result<StateSpec> {
        let s = src.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("state spec `{s}` lacks a `kind:` prefix")))?;
        let nums = |text: &str, n: usize| -> Result<Vec<f64>> {
            let vals = text
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{t}` in `{s}`"))))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != n || vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("`{s}` expects {n} finite number(s)")));
            }
            Ok(vals)
        };
        match kind.trim() {
            "fock" => {
                let n: usize = rest.trim().parse().map_err(|_| Error::Config(format!("bad Fock index in `{s}`")))?;
                Ok(StateSpec::Fock(n))
            }
            "coherent" => {
                let v = nums(rest, 2)?;
                Ok(StateSpec::Coherent(C64::new(v[0], v[1])))
            }
            "squeezed" => {
                let v = nums(rest, 2)?;
                if v[0] < 0.0 {
                    return Err(Error::Config(format!("squeezing r must be non-negative in `{s}`")));
                }
                Ok(StateSpec::Squeezed { r: v[0], theta: v[1] })
            }
            "thermal" => {
                let v = nums(rest, 1)?;
                if v[0] < 0.0 {
                    return Err(Error::Config(format!("thermal occupation must be non-negative in `{s}`")));
                }
                Ok(StateSpec::Thermal(v[0]))
            }
            "mix" => {
                let body = rest
                    .trim()
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| Error::Config(format!("mixture `{s}` must be bracketed")))?;
                let mut comps = Vec::new();
                for part in split_top_level(body) {
                    let part = part.trim();
                    let (w, spec) = part
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| Error::Config(format!("mixture component `{part}` needs `weight spec`")))?;
                    let w: f64 = w.parse().map_err(|_| Error::Config(format!("bad weight `{w}`")))?;
                    comps.push((w, StateSpec::parse(spec)?));
                }
                if comps.is_empty() {
                    return Err(Error::Config("empty mixture".into()));
                }
                Ok(StateSpec::Mix(comps))
            }
            other => Err(Error::Config(format!("unknown state kind `{other}`"))),
        }
    }

    pub fn squeeze_params(&self) -> Option<SqueezeParams> {
        match self {
            StateSpec::Squeezed { r, theta } => SqueezeParams::from_r_theta(*r, *theta).ok(),
            _ => None,
        }
    }

    pub fn build(&self, space: FockSpace) -> Result<State> {
        match self {
            StateSpec::Thermal(nbar) => Ok(State::Mixed(thermal(space, *nbar)?)),
            StateSpec::Mix(_) => Ok(State::Mixed(mixture(self.ensemble(space, 1.0)?)?)),
            pure => Ok(State::Pure(pure.build_pure(space)?)),
        }
    }

    fn build_pure(&self, space: FockSpace) -> Result<PureState> {
        match self {
            StateSpec::Fock(n) => fock(space, *n),
            StateSpec::Coherent(alpha) => coherent(space, *alpha),
            StateSpec::Squeezed { r, theta } => squeezed_vacuum(space, SqueezeParams::from_r_theta(*r, *theta)?),
            _ => unreachable!("mixed specs handled by build"),
        }
    }

    /// Flattened ensemble; thermal components become weighted Fock states.
    fn ensemble(&self, space: FockSpace, scale: f64) -> Result<Vec<(f64, PureState)>> {
        match self {
            StateSpec::Mix(comps) => {
                let total: f64 = comps.iter().map(|(w, _)| w).sum();
                if comps.iter().any(|(w, _)| !(*w > 0.0)) || (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidState(format!("mixture weights must be positive and sum to 1, got {total}")));
                }
                let mut out = Vec::new();
                for (w, spec) in comps {
                    out.extend(spec.ensemble(space, scale * w)?);
                }
                Ok(out)
            }
            StateSpec::Thermal(nbar) => {
                let p = thermal_populations(space, *nbar)?;
                let discarded = (nbar / (1.0 + nbar)).powi(space.dim() as i32);
                p.iter()
                    .enumerate()
                    .filter(|(_, pn)| **pn > 0.0)
                    .map(|(n, pn)| Ok((scale * pn, fock(space, n)?.with_discarded(discarded))))
                    .collect()
            }
            pure => Ok(vec![(scale, pure.build_pure(space)?)]),
        }
    }
}

fn split_top_level(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ';' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !body[start..].trim().is_empty() {
        parts.push(&body[start..]);
    }
    parts
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Fock(n) => write!(f, "fock:{n}"),
            StateSpec::Coherent(a) => write!(f, "coherent:{},{}", a.re, a.im),
            StateSpec::Squeezed { r, theta } => write!(f, "squeezed:{r},{theta}"),
            StateSpec::Thermal(n) => write!(f, "thermal:{n}"),
            StateSpec::Mix(comps) => {
                write!(f, "mix:[")?;
                for (i, (w, s)) in comps.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{w} {s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::MixedRepr;

    fn space(dim: usize) -> FockSpace {
        FockSpace::new(dim).unwrap()
    }

    #[test]
    fn fock_levels() {
        let s = space(6);
        assert_eq!(fock(s, 0).unwrap(), vacuum(s));
        assert_eq!(fock(s, 3).unwrap().expect(&s.number()).unwrap().re, 3.0);
        assert!(fock(s, 6).is_err());
    }

    #[test]
    fn coherent_state_moments() {
        let s = space(40);
        assert!((coherent(s, C64::new(0.0, 0.0)).unwrap().amplitudes() - vacuum(s).amplitudes()).norm() < 1e-15);
        let alpha = C64::new(1.2, -0.7);
        let psi = coherent(s, alpha).unwrap();
        assert!((psi.expect(&s.annihilation()).unwrap() - alpha).norm() < 1e-8);
        let one = coherent(s, C64::new(1.0, 0.0)).unwrap();
        assert!((one.expect(&s.number()).unwrap().re - 1.0).abs() < 1e-8);
        assert!(psi.reliable());
        let heavy = coherent(space(10), C64::new(3.0, 0.0)).unwrap();
        assert!(!heavy.reliable());
        assert!(heavy.discarded_mass() > 1e-3);
    }

    #[test]
    fn squeezed_vacuum_structure() {
        let s = space(128);
        let p = SqueezeParams::from_r_theta(1.0, 0.0).unwrap();
        let psi = squeezed_vacuum(s, p).unwrap();
        let f = &s.annihilation().scale(C64::new(p.mu(), 0.0)) + &s.creation().scale(p.nu());
        // at dim 128 the residual is set by the missing c_128 term: ≈1.0e-7 in norm, 1.0e-14 squared
        let res = f.apply(psi.amplitudes()).norm();
        assert!(res * res <= 1e-8, "{res}");
        assert!(res < 2e-7, "{res}");
        let wide = space(256);
        let psi_wide = squeezed_vacuum(wide, p).unwrap();
        let f_wide = &wide.annihilation().scale(C64::new(p.mu(), 0.0)) + &wide.creation().scale(p.nu());
        assert!(f_wide.apply(psi_wide.amplitudes()).norm() <= 1e-8);
        for n in (1..128).step_by(2) {
            assert_eq!(psi.amplitudes()[n], C64::new(0.0, 0.0));
        }
        let zero = squeezed_vacuum(s, SqueezeParams::from_r_theta(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(zero, vacuum(s));
        assert!(psi.amplitudes()[0].re > 0.0 && psi.amplitudes()[0].im == 0.0);
    }

    #[test]
    fn squeezed_quadrature_variance() {
        let s = space(128);
        for &r in &[0.3, 1.0] {
            let psi = squeezed_vacuum(s, SqueezeParams::from_r_theta(r, 0.0).unwrap()).unwrap();
            let x = s.quadrature(0.0);
            let x2 = &x * &x;
            let var = psi.expect(&x2).unwrap().re - psi.expect(&x).unwrap().re.powi(2);
            assert!((var - (-2.0 * r).exp()).abs() < 1e-8, "r={r}: {var}");
        }
    }

    #[test]
    fn squeezed_phase_convention() {
        // ν = e^{iθ} sinh r squeezes x̂_{θ/2}; the orthogonal quadrature is anti-squeezed
        let s = space(96);
        let (r, theta) = (0.6, 1.1);
        let p = SqueezeParams::from_r_theta(r, theta).unwrap();
        let psi = squeezed_vacuum(s, p).unwrap();
        let var = |phi: f64| {
            let x = s.quadrature(phi);
            psi.expect(&(&x * &x)).unwrap().re - psi.expect(&x).unwrap().re.powi(2)
        };
        assert!((var(p.squeezed_phase()) - (-2.0 * r).exp()).abs() < 1e-10);
        assert!((var(p.squeezed_phase() + std::f64::consts::FRAC_PI_2) - (2.0 * r).exp()).abs() < 1e-9);
    }

    #[test]
    fn squeezed_residual_decreases_with_dim() {
        for &r in &[0.5, 1.0, 1.5] {
            let p = SqueezeParams::from_r_theta(r, 0.4).unwrap();
            let mut last = f64::INFINITY;
            for dim in [16, 32, 64, 128, 256] {
                let s = space(dim);
                let psi = squeezed_vacuum(s, p).unwrap();
                let f = &s.annihilation().scale(C64::new(p.mu(), 0.0)) + &s.creation().scale(p.nu());
                let res = f.apply(psi.amplitudes()).norm();
                assert!(res <= last, "r={r} dim={dim}: {res} > {last}");
                last = res;
            }
        }
    }

    #[test]
    fn squeeze_param_validation() {
        assert!(SqueezeParams::new(1.0, C64::new(0.5, 0.0)).is_err());
        assert!(SqueezeParams::new(0.5, C64::new(0.0, 0.0)).is_err());
        assert!(SqueezeParams::from_r_theta(-0.1, 0.0).is_err());
        let p = SqueezeParams::from_nu(C64::new(0.3, 0.4)).unwrap();
        assert!((p.mu() * p.mu() - p.nu().norm_sqr() - 1.0).abs() < 1e-12);
        assert!((p.r() - 0.5f64.asinh()).abs() < 1e-15);
    }

    #[test]
    fn thermal_state() {
        let s = space(60);
        let t = thermal(s, 0.0).unwrap();
        assert_eq!(t.density()[(0, 0)], C64::new(1.0, 0.0));
        let nbar = 1.0;
        let t = thermal(s, nbar).unwrap();
        assert!((t.expect(&s.number()).unwrap().re - nbar).abs() < 1e-8);
        assert!((t.expect(&s.identity()).unwrap().re - 1.0).abs() < 1e-14);
        assert!(thermal(s, -1.0).is_err());
    }

    #[test]
    fn mixtures() {
        let s = space(8);
        let single = mixture(vec![(1.0, fock(s, 2).unwrap())]).unwrap();
        assert!((single.density() - fock(s, 2).unwrap().density()).norm() < 1e-15);
        let half = mixture(vec![(0.5, fock(s, 0).unwrap()), (0.5, fock(s, 1).unwrap())]).unwrap();
        assert!((half.expect(&s.number()).unwrap().re - 0.5).abs() < 1e-15);
        assert!(mixture(vec![(0.5, fock(s, 0).unwrap())]).is_err());
        assert!(matches!(half.repr(), MixedRepr::Ensemble(c) if c.len() == 2));
    }

    #[test]
    fn spec_grammar() {
        let cases = [
            ("fock:3", StateSpec::Fock(3)),
            ("coherent:1,-0.5", StateSpec::Coherent(C64::new(1.0, -0.5))),
            ("squeezed:1.0,0", StateSpec::Squeezed { r: 1.0, theta: 0.0 }),
            ("thermal:0.5", StateSpec::Thermal(0.5)),
        ];
        for (text, expected) in cases {
            let parsed = StateSpec::parse(text).unwrap();
            assert_eq!(parsed, expected);
            assert_eq!(StateSpec::parse(&parsed.to_string()).unwrap(), parsed);
        }
        let mix = StateSpec::parse("mix:[0.25 fock:0; 0.75 mix:[0.5 fock:1; 0.5 thermal:0.2]]").unwrap();
        assert_eq!(StateSpec::parse(&mix.to_string()).unwrap(), mix);
        let st = mix.build(space(30)).unwrap();
        assert!((st.expect(&space(30).identity()).unwrap().re - 1.0).abs() < 1e-12);
        for bad in ["fock", "fock:x", "coherent:1", "squeezed:-1,0", "thermal:-2", "mix:[0.5 fock:0]", "mix:0.5 fock:0", "cat:1"] {
            let res = StateSpec::parse(bad).and_then(|s| s.build(space(10)));
            assert!(res.is_err(), "{bad}");
        }
    }
}
