//! Exponent bookkeeping `(δ, p, β, η)` derived from `(γ, q, d)`.
//!
//! Generic over the number type so the algebraic identities between the
//! exponents can be checked in exact rational arithmetic.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::BernsteinError;

pub trait ExponentField: Clone + PartialOrd + Num + Debug {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn approx(&self) -> f64;
}

impl ExponentField for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl ExponentField for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn min<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentsOf<T> {
    pub gamma: T,
    pub q: T,
    pub d: u32,
    pub delta: T,
    pub delta_max: T,
    /// Integrability exponent `p`, or the fallback `p̃` when `used_fallback`.
    pub p: T,
    pub beta: T,
    pub eta: T,
    pub used_fallback: bool,
}

pub type Exponents = ExponentsOf<f64>;

/// Derives the exponents. `delta = None` picks `min(delta_max/2, 1/10)`.
///
/// For `d ≥ 3`, `p = (2/d)(d/γ′) + ((d−2)/d)q` when that exceeds 2. Otherwise,
/// and always for `d ≤ 2`, `p̃ = (2 + q)/2` is used. `delta_max` is the
/// supremum of `δ ∈ (0, 1)` with `β > 1` and `δ·pq/(q−p) < 1`.
pub fn derive_exponents_in<T: ExponentField>(
    gamma: T,
    q: T,
    d: u32,
    delta: Option<T>,
) -> Result<ExponentsOf<T>, BernsteinError> {
    let one = T::one();
    let two = T::from_ratio(2, 1);
    if d == 0 {
        return Err(BernsteinError::Domain("dimension must be at least 1".into()));
    }
    if !(gamma > one) {
        return Err(BernsteinError::Admissibility(format!(
            "γ > 1 violated (γ = {})",
            gamma.approx()
        )));
    }
    let d_t = T::from_ratio(d as i64, 1);
    let critical = d_t.clone() * (gamma.clone() - one.clone()) / gamma.clone();
    if !(q > critical) {
        return Err(BernsteinError::Admissibility(format!(
            "q > d(γ−1)/γ violated (q = {}, d(γ−1)/γ = {})",
            q.approx(),
            critical.approx()
        )));
    }
    if !(q > one) {
        return Err(BernsteinError::Admissibility(format!(
            "q > 1 violated (q = {})",
            q.approx()
        )));
    }
    if !(q > two) {
        return Err(BernsteinError::Admissibility(format!(
            "q > 2 violated (q = {})",
            q.approx()
        )));
    }

    // (2/d)(d/γ′) = 2(γ−1)/γ.
    let p_formula = two.clone() * (gamma.clone() - one.clone()) / gamma.clone()
        + (d_t.clone() - two.clone()) / d_t * q.clone();
    let (p, used_fallback) = if d >= 3 && p_formula > two {
        (p_formula, false)
    } else {
        ((two.clone() + q.clone()) / two.clone(), true)
    };

    let beta_bound = gamma.clone() * (p.clone() - two.clone()) / two.clone();
    let holder_bound = (q.clone() - p.clone()) / (p.clone() * q.clone());
    let delta_max = min(one.clone(), min(beta_bound, holder_bound));

    let delta = match delta {
        Some(delta) => {
            if !(delta > T::zero() && delta < delta_max) {
                return Err(BernsteinError::Domain(format!(
                    "δ = {} must lie in (0, {})",
                    delta.approx(),
                    delta_max.approx()
                )));
            }
            delta
        }
        None => min(delta_max.clone() / two.clone(), T::from_ratio(1, 10)),
    };

    let beta = (gamma.clone() * (p.clone() - two.clone()) + one.clone() - delta.clone())
        / (one.clone() + delta.clone());
    let eta = (two * gamma.clone() + delta.clone() - one.clone()) / (one + delta.clone());
    Ok(ExponentsOf {
        gamma,
        q,
        d,
        delta,
        delta_max,
        p,
        beta,
        eta,
        used_fallback,
    })
}

pub fn derive_exponents(
    gamma: f64,
    q: f64,
    d: u32,
    delta: Option<f64>,
) -> Result<Exponents, BernsteinError> {
    if !gamma.is_finite() || !q.is_finite() || delta.is_some_and(|x| !x.is_finite()) {
        return Err(BernsteinError::Domain("exponent inputs must be finite".into()));
    }
    derive_exponents_in(gamma, q, d, delta)
}

impl<T: ExponentField> ExponentsOf<T> {
    fn one() -> T {
        T::one()
    }

    /// Both sides of `(2γ+δ−1)/(1+δ) = ((δ−1)/(1+δ))·p/(p−2) + β·2/(p−2)`.
    pub fn eta_split(&self) -> (T, T) {
        let one = Self::one();
        let two = T::from_ratio(2, 1);
        let opd = one.clone() + self.delta.clone();
        let lhs = self.eta.clone();
        let pm2 = self.p.clone() - two.clone();
        let rhs = (self.delta.clone() - one) / opd * self.p.clone() / pm2.clone()
            + self.beta.clone() * two / pm2;
        (lhs, rhs)
    }

    /// Both sides of `β + η = pγ/(1+δ)`.
    pub fn beta_eta_sum(&self) -> (T, T) {
        let opd = Self::one() + self.delta.clone();
        (
            self.beta.clone() + self.eta.clone(),
            self.p.clone() * self.gamma.clone() / opd,
        )
    }

    /// `((β+1)·d/(d−2), γq/(1+δ))`: equal without fallback, left side strictly
    /// larger with it. `None` for `d ≤ 2`, where the Sobolev exponent is unbounded.
    pub fn sobolev_balance(&self) -> Option<(T, T)> {
        if self.d < 3 {
            return None;
        }
        let one = Self::one();
        let d = T::from_ratio(self.d as i64, 1);
        let two = T::from_ratio(2, 1);
        Some((
            (self.beta.clone() + one.clone()) * d.clone() / (d - two),
            self.gamma.clone() * self.q.clone() / (one + self.delta.clone()),
        ))
    }

    /// `δ·pq/(q−p)`, required below 1.
    pub fn holder_product(&self) -> T {
        self.delta.clone() * self.p.clone() * self.q.clone() / (self.q.clone() - self.p.clone())
    }
}

impl Exponents {
    /// Exponent `qγ/(1+δ)` applied to the truncated level function in `Y_k`.
    pub fn level_power(&self) -> f64 {
        self.q * self.gamma / (1.0 + self.delta)
    }

    /// Power `θ` in `Y^θ ≤ Y + ω`.
    ///
    /// `(d−2)/d` for `d ≥ 3`. For `d ≤ 2` the embedding of `W^{1,2}` reaches every
    /// `L^r`; `r` is matched to the fallback exponents, `θ = (β+1)(1+δ)/(γq)`.
    pub fn superlevel_power(&self) -> f64 {
        if self.d >= 3 {
            (self.d as f64 - 2.0) / self.d as f64
        } else {
            (self.beta + 1.0) * (1.0 + self.delta) / (self.gamma * self.q)
        }
    }
}
