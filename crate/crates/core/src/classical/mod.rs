//! Classical scale symmetry: exact Poisson brackets of monomials in
//! `(q, p, t)` and Hamiltonian flows for power-law potentials.

mod flow;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use flow::{dilatation, dilatation_drift, integrate_flow, DriftReport, FlowTrajectory};

/// Exponent key: `(q power, p power, t power)`. The `q` power is rational.
pub type Powers = (Rational64, i32, u32);

/// Finite sum of `c q^a p^b t^k` with exact rational coefficients, kept in
/// sorted order with duplicates merged and zeros pruned.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct MonomialObservable {
    terms: BTreeMap<Powers, Rational64>,
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl MonomialObservable {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: Rational64, q_pow: Rational64, p_pow: i32, t_pow: u32) -> Self {
        let mut m = Self::zero();
        m.push(coeff, (q_pow, p_pow, t_pow));
        m
    }

    /// Integer-coefficient shorthand for [`MonomialObservable::monomial`].
    pub fn term(coeff: i64, q_pow: i64, p_pow: i32, t_pow: u32) -> Self {
        Self::monomial(r(coeff), r(q_pow), p_pow, t_pow)
    }

    pub fn constant(c: Rational64) -> Self {
        Self::monomial(c, r(0), 0, 0)
    }

    pub fn q() -> Self {
        Self::term(1, 1, 0, 0)
    }

    pub fn p() -> Self {
        Self::term(1, 0, 1, 0)
    }

    pub fn t() -> Self {
        Self::term(1, 0, 0, 1)
    }

    /// Free Hamiltonian `p^2` (units with `2m = 1`).
    pub fn p_squared() -> Self {
        Self::term(1, 0, 2, 0)
    }

    fn push(&mut self, coeff: Rational64, key: Powers) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational64::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Powers, &Rational64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.push(*c, *k);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(r(-1)))
    }

    pub fn scale(&self, c: Rational64) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.push(*v * c, *k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((qa, pa, ta), ca) in &self.terms {
            for ((qb, pb, tb), cb) in &other.terms {
                out.push(*ca * *cb, (*qa + *qb, pa + pb, ta + tb));
            }
        }
        out
    }

    pub fn d_q(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b, k), c) in &self.terms {
            out.push(*c * *a, (*a - r(1), *b, *k));
        }
        out
    }

    pub fn d_p(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b, k), c) in &self.terms {
            out.push(*c * r(*b as i64), (*a, b - 1, *k));
        }
        out
    }

    pub fn d_t(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b, k), c) in &self.terms {
            if *k > 0 {
                out.push(*c * r(*k as i64), (*a, *b, k - 1));
            }
        }
        out
    }

    /// Numeric value at `(q, p, t)`.
    pub fn eval(&self, q: f64, p: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|((a, b, k), c)| {
                let qa = if a.is_integer() { q.powi(a.to_integer() as i32) } else { q.powf(rat_f64(*a)) };
                rat_f64(*c) * qa * p.powi(*b) * t.powi(*k as i32)
            })
            .sum()
    }
}

pub(crate) fn rat_f64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn fmt_rat(x: &Rational64) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for MonomialObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((a, b, k), c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            let mag = c.abs();
            if !mag.is_one() {
                factors.push(fmt_rat(&mag));
            }
            if *k == 1 {
                factors.push("t".to_string());
            } else if *k > 1 {
                factors.push(format!("t^{k}"));
            }
            if a.is_one() {
                factors.push("q".to_string());
            } else if !a.is_zero() {
                let e = fmt_rat(a);
                factors.push(if a.is_integer() && a.is_positive() { format!("q^{e}") } else { format!("q^({e})") });
            }
            if *b == 1 {
                factors.push("p".to_string());
            } else if *b != 0 {
                factors.push(if *b > 0 { format!("p^{b}") } else { format!("p^({b})") });
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => write!(f, "-{}", factors.join("*"))?,
                (0, _) => write!(f, "{}", factors.join("*"))?,
                _ => write!(f, " {sign} {}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

/// `{f, g} = f_q g_p - f_p g_q`
pub fn poisson_bracket(f: &MonomialObservable, g: &MonomialObservable) -> MonomialObservable {
    f.d_q().mul(&g.d_p()).sub(&f.d_p().mul(&g.d_q()))
}

/// `D = t H - q p / 2`
pub fn dilatation_observable(h: &MonomialObservable) -> MonomialObservable {
    MonomialObservable::t().mul(h).sub(&MonomialObservable::monomial(Rational64::new(1, 2), r(1), 1, 0))
}

/// `dF/dt = dF/dt|explicit + {F, H}`
pub fn total_time_derivative(f: &MonomialObservable, h: &MonomialObservable) -> MonomialObservable {
    f.d_t().add(&poisson_bracket(f, h))
}

/// `V = g q^s` with exact rational coupling and exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerLawPotential {
    pub g: Rational64,
    pub s: Rational64,
}

impl PowerLawPotential {
    pub fn new(g: Rational64, s: Rational64) -> Self {
        PowerLawPotential { g, s }
    }

    pub fn integer(g: i64, s: i64) -> Self {
        Self::new(r(g), r(s))
    }

    /// Nearest rationals to the given floats.
    pub fn from_f64(g: f64, s: f64) -> crate::error::Result<Self> {
        let conv = |x: f64, name: &str| {
            Rational64::approximate_float(x).ok_or_else(|| {
                crate::error::Error::InvalidParameter(format!("{name} = {x} has no rational approximation"))
            })
        };
        Ok(Self::new(conv(g, "g")?, conv(s, "s")?))
    }

    pub fn g_f64(&self) -> f64 {
        rat_f64(self.g)
    }

    pub fn s_f64(&self) -> f64 {
        rat_f64(self.s)
    }

    pub fn observable(&self) -> MonomialObservable {
        MonomialObservable::monomial(self.g, self.s, 0, 0)
    }

    /// `H = p^2 + V`
    pub fn hamiltonian(&self) -> MonomialObservable {
        MonomialObservable::p_squared().add(&self.observable())
    }

    pub fn value(&self, q: f64) -> f64 {
        self.observable().eval(q, 0.0, 0.0)
    }

    pub fn force(&self, q: f64) -> f64 {
        -self.observable().d_q().eval(q, 0.0, 0.0)
    }

    /// Trajectories must stay at `q > 0` when `q^s` is singular or not
    /// defined for negative `q`.
    pub fn needs_positive_q(&self) -> bool {
        self.s.is_negative() || !self.s.is_integer()
    }
}

/// `(q/2) V' + V = g (1 + s/2) q^s`; zero exactly when `s = -2`.
pub fn scale_condition_residual(v: &PowerLawPotential) -> MonomialObservable {
    let obs = v.observable();
    MonomialObservable::q().mul(&obs.d_q()).scale(Rational64::new(1, 2)).add(&obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        assert_eq!(poisson_bracket(&MonomialObservable::q(), &MonomialObservable::p()), MonomialObservable::term(1, 0, 0, 0));
        let h = MonomialObservable::p_squared();
        let d = dilatation_observable(&h);
        assert_eq!(poisson_bracket(&h, &d), h);
        let q2 = MonomialObservable::term(1, 2, 0, 0);
        assert_eq!(poisson_bracket(&q2, &h), MonomialObservable::term(4, 1, 1, 0));
    }

    #[test]
    fn conservation() {
        let h = MonomialObservable::p_squared();
        let d = dilatation_observable(&h);
        assert_eq!(d.d_t(), h);
        assert!(total_time_derivative(&d, &h).is_zero());
        let v = PowerLawPotential::integer(1, -2);
        let h = v.hamiltonian();
        assert!(total_time_derivative(&dilatation_observable(&h), &h).is_zero());
    }

    #[test]
    fn residual_examples() {
        assert!(scale_condition_residual(&PowerLawPotential::integer(1, -2)).is_zero());
        assert_eq!(scale_condition_residual(&PowerLawPotential::integer(5, 0)), MonomialObservable::term(5, 0, 0, 0));
        assert_eq!(scale_condition_residual(&PowerLawPotential::integer(2, 4)), MonomialObservable::term(6, 4, 0, 0));
    }

    #[test]
    fn display() {
        let d = dilatation_observable(&MonomialObservable::p_squared());
        assert_eq!(d.to_string(), "t*p^2 - 1/2*q*p");
        assert_eq!(MonomialObservable::zero().to_string(), "0");
        assert_eq!(MonomialObservable::term(3, -2, 0, 0).to_string(), "3*q^(-2)");
    }
}
