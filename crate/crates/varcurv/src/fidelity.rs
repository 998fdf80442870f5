//! Power fidelities ψ(t) = |t|^p / p for p ∈ (1, 2], their conjugates,
//! uniform-convexity moduli and the induced dual-stability map.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct FidelitySpec {
    pub p: f64,
    /// Conjugate exponent q = p/(p−1) ∈ [2, ∞).
    pub q: f64,
}

impl FidelitySpec {
    pub fn new(p: f64) -> Result<FidelitySpec> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::InvalidParameter(format!("fidelity exponent p = {p} not in (1, 2]")));
        }
        Ok(FidelitySpec { p, q: p / (p - 1.0) })
    }

    pub fn quadratic() -> FidelitySpec {
        FidelitySpec { p: 2.0, q: 2.0 }
    }

    #[inline]
    pub fn psi(&self, t: f64) -> f64 {
        if self.p == 2.0 {
            0.5 * t * t
        } else {
            t.abs().powf(self.p) / self.p
        }
    }

    #[inline]
    pub fn psi_prime(&self, t: f64) -> f64 {
        if self.p == 2.0 {
            t
        } else {
            t.signum() * t.abs().powf(self.p - 1.0)
        }
    }

    #[inline]
    pub fn psi_second(&self, t: f64) -> f64 {
        if self.p == 2.0 {
            1.0
        } else {
            (self.p - 1.0) * t.abs().powf(self.p - 2.0)
        }
    }

    /// Conjugate ψ*(t) = |t|^q / q.
    #[inline]
    pub fn psi_conj(&self, t: f64) -> f64 {
        if self.q == 2.0 {
            0.5 * t * t
        } else {
            t.abs().powf(self.q) / self.q
        }
    }

    /// Modulus of uniform convexity of ψ*: exactly t²/2 for q = 2; for
    /// q > 2 the conservative convention t^q / (q·2^{q−2}).
    pub fn modulus_conj(&self, t: f64) -> f64 {
        if self.q == 2.0 {
            0.5 * t * t
        } else {
            t.abs().powf(self.q) / (self.q * 2f64.powf(self.q - 2.0))
        }
    }

    /// Dual-stability map: a bound for ‖v_{α,w} − v_{α,0}‖ in terms of
    /// s = ‖w‖/α. The uniform-monotonicity estimate yields
    /// 2 m_{ψ*}(T) ≤ T·s, i.e. T ≤ (m_{ψ*}(t)/t)⁻¹(s/2); for p = 2 this
    /// is the identity (the dual variable is a nonexpansive projection).
    pub fn sigma(&self, s: f64) -> f64 {
        if self.q == 2.0 {
            s
        } else {
            // invert t^{q-1}/(q·2^{q-2}) = s/2
            (self.q * 2f64.powf(self.q - 3.0) * s).powf(1.0 / (self.q - 1.0))
        }
    }

    /// Admissible ceiling m_{ψ*}(Θ_d)/Θ_d of the noise-to-α ratio for the
    /// hard parameter choice; √π for p = 2 in the plane.
    pub fn hard_rule_ceiling(&self, theta_d: f64) -> f64 {
        self.modulus_conj(theta_d) / theta_d
    }
}

/// Isoperimetric constant of the plane, Per(B)/|B|^{1/2} = 2√π.
pub const THETA_2: f64 = 3.5449077018110318;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_case_is_special() {
        let f = FidelitySpec::new(2.0).unwrap();
        assert_eq!(f.q, 2.0);
        assert_eq!(f.psi(3.0), 4.5);
        assert_eq!(f.psi_prime(-2.0), -2.0);
        assert_eq!(f.modulus_conj(2.0), 2.0);
        // σ is the identity
        assert_eq!(f.sigma(0.5), 0.5);
        // ceiling m(Θ)/Θ = Θ/2 = √π
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((f.hard_rule_ceiling(THETA_2) - sqrt_pi).abs() < 1e-12);
    }

    #[test]
    fn stability_example_values() {
        let f = FidelitySpec::quadratic();
        assert!((f.sigma(0.1 / 0.2) - 0.5).abs() < 1e-15);
        assert_eq!(f.sigma(0.0), 0.0);
    }

    #[test]
    fn modulus_satisfies_uniform_convexity_definition() {
        // ψ*((1−μ)s + μt) ≤ (1−μ)ψ*(s) + μψ*(t) − μ(1−μ) m(|s−t|),
        // with equality everywhere for the quadratic
        for &p in &[2.0, 1.5, 1.2] {
            let f = FidelitySpec::new(p).unwrap();
            for i in 0..40 {
                let s = -2.0 + 0.1 * i as f64;
                for j in 0..40 {
                    let t = -2.0 + 0.1 * j as f64;
                    for &mu in &[0.25, 0.5, 0.75] {
                        let lhs = f.psi_conj((1.0 - mu) * s + mu * t);
                        let rhs = (1.0 - mu) * f.psi_conj(s) + mu * f.psi_conj(t)
                            - mu * (1.0 - mu) * f.modulus_conj(s - t);
                        assert!(lhs <= rhs + 1e-12, "p={p} s={s} t={t} mu={mu}");
                        if p == 2.0 {
                            assert!((lhs - rhs).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_inverts_modulus_quotient_at_half() {
        for &p in &[1.5, 1.25, 2.0] {
            let f = FidelitySpec::new(p).unwrap();
            for &s in &[0.1, 0.7, 2.3] {
                let t = f.sigma(s);
                let quotient = f.modulus_conj(t) / t;
                assert!((quotient - s / 2.0).abs() < 1e-10, "p={p} s={s}");
            }
        }
    }

    #[test]
    fn invalid_exponents_rejected() {
        assert!(FidelitySpec::new(1.0).is_err());
        assert!(FidelitySpec::new(2.5).is_err());
    }
}
