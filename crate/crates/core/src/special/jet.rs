//! Truncated univariate Taylor series ("jets").

use crate::error::{Error, Result};

/// Taylor coefficients `a_0..=a_K` of a function about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesJet {
    center: f64,
    coeffs: Vec<f64>,
}

impl SeriesJet {
    pub fn new(center: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::SeriesMismatch("a jet needs at least one coefficient".into()));
        }
        if !center.is_finite() {
            return Err(Error::Domain(format!("jet center {center} is not finite")));
        }
        Ok(SeriesJet { center, coeffs })
    }

    pub fn constant(value: f64, center: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        SeriesJet { center, coeffs }
    }

    /// Expansion of `t^power` about `center` (binomial theorem).
    pub fn monomial(power: u32, center: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        let p = power as usize;
        let mut binom = 1.0;
        for (i, c) in coeffs.iter_mut().enumerate().take(p.min(order) + 1) {
            *c = binom * center.powi((p - i) as i32);
            binom = binom * (p - i) as f64 / (i + 1) as f64;
        }
        SeriesJet { center, coeffs }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn check_compatible(&self, other: &SeriesJet) -> Result<()> {
        if self.center != other.center {
            return Err(Error::SeriesMismatch(format!("centers {} and {}", self.center, other.center)));
        }
        if self.order() != other.order() {
            return Err(Error::SeriesMismatch(format!("orders {} and {}", self.order(), other.order())));
        }
        Ok(())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &SeriesJet) -> Result<SeriesJet> {
        self.check_compatible(other)?;
        let coeffs =
            (0..=self.order()).map(|n| (0..=n).map(|j| self.coeffs[j] * other.coeffs[n - j]).sum()).collect();
        Ok(SeriesJet { center: self.center, coeffs })
    }

    pub fn reciprocal(&self) -> Result<SeriesJet> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(Error::ZeroConstantTerm);
        }
        let mut r = Vec::with_capacity(self.coeffs.len());
        r.push(1.0 / a0);
        for n in 1..self.coeffs.len() {
            let s: f64 = (1..=n).map(|j| self.coeffs[j] * r[n - j]).sum();
            r.push(-s / a0);
        }
        Ok(SeriesJet { center: self.center, coeffs: r })
    }

    pub fn scale(&self, k: f64) -> SeriesJet {
        SeriesJet { center: self.center, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn add_scalar(&self, k: f64) -> SeriesJet {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    /// Evaluates the truncated polynomial at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let h = t - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * h + c)
    }
}

/// `k`-th derivative at the expansion point: `k! · a_k`.
pub fn derivative_at(jet: &SeriesJet, k: usize) -> Result<f64> {
    if k > jet.order() {
        return Err(Error::OrderOutOfRange { k, order: jet.order() });
    }
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    Ok(factorial * jet.coeffs[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_square() {
        let a = SeriesJet::new(3.0, vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(a.mul(&a).unwrap().coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn reciprocal_of_constant() {
        let a = SeriesJet::new(1.0, vec![2.0, 0.0, 0.0]).unwrap();
        assert_eq!(a.reciprocal().unwrap().coeffs(), &[0.5, 0.0, 0.0]);
    }

    #[test]
    fn reciprocal_of_geometric() {
        // 1/(1 - h) = 1 + h + h² + ...
        let a = SeriesJet::new(0.5, vec![1.0, -1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(a.reciprocal().unwrap().coeffs(), &[1.0; 5]);
    }

    #[test]
    fn cube_about_two() {
        assert_eq!(SeriesJet::monomial(3, 2.0, 3).coeffs(), &[8.0, 12.0, 6.0, 1.0]);
        assert_eq!(SeriesJet::monomial(3, 2.0, 5).coeffs(), &[8.0, 12.0, 6.0, 1.0, 0.0, 0.0]);
        assert_eq!(SeriesJet::monomial(3, 2.0, 1).coeffs(), &[8.0, 12.0]);
    }

    #[test]
    fn derivatives() {
        let sq = SeriesJet::monomial(2, 0.0, 2);
        assert_eq!(derivative_at(&sq, 2).unwrap(), 2.0);
        let j = SeriesJet::new(1.5, vec![0.25, 7.0, 3.0]).unwrap();
        assert_eq!(derivative_at(&j, 0).unwrap(), 0.25);
        assert!(matches!(derivative_at(&j, 3), Err(Error::OrderOutOfRange { k: 3, order: 2 })));
    }

    #[test]
    fn mismatches_rejected() {
        let a = SeriesJet::constant(1.0, 1.0, 2);
        let b = SeriesJet::constant(1.0, 2.0, 2);
        let c = SeriesJet::constant(1.0, 1.0, 3);
        assert!(a.mul(&b).is_err());
        assert!(a.mul(&c).is_err());
        assert!(matches!(SeriesJet::constant(0.0, 1.0, 2).reciprocal(), Err(Error::ZeroConstantTerm)));
    }

    fn jet(order: usize) -> impl Strategy<Value = SeriesJet> {
        prop::collection::vec(-3.0f64..3.0, order + 1).prop_map(|c| SeriesJet::new(0.7, c).unwrap())
    }

    fn close(a: &SeriesJet, b: &SeriesJet) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())))
    }

    proptest! {
        #[test]
        fn mul_commutes(a in jet(6), b in jet(6)) {
            prop_assert!(close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        }

        #[test]
        fn mul_associates(a in jet(6), b in jet(6), c in jet(6)) {
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert!(close(&l, &r));
        }

        #[test]
        fn reciprocal_inverts(a in jet(6)) {
            prop_assume!(a.value().abs() > 0.5);
            let one = a.mul(&a.reciprocal().unwrap()).unwrap();
            prop_assert!((one.coeffs()[0] - 1.0).abs() < 1e-12);
            // Higher coefficients of a * (1/a) vanish up to rounding growth.
            prop_assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-7));
        }
    }
}
