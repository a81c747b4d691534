//! Dense univariate polynomials over the Gaussian rationals.
//!
//! Used for line restrictions (reducedness probes, degree probes on random
//! lines) and for evaluation-interpolation determinants of large matrices.

use crate::poly::{Degree, MultiPoly};
use crate::scalar::GaussianRational;

/// Coefficients in ascending order; no trailing zeros; empty means zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = UniPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<GaussianRational>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInfinity
        } else {
            Degree::Finite(self.coeffs.len() - 1)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        let zero = GaussianRational::zero();
        for k in 0..n {
            let a = self.coeffs.get(k).unwrap_or(&zero);
            let b = rhs.coeffs.get(k).unwrap_or(&zero);
            coeffs.push(a + b);
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn mul(&self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs =
            vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &GaussianRational) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean remainder; divisor must be nonzero.
    pub fn rem(&self, divisor: &UniPoly) -> UniPoly {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let dlead = divisor.coeffs.last().unwrap();
        let ddeg = divisor.coeffs.len() - 1;
        while !rem.is_zero() && rem.coeffs.len() - 1 >= ddeg {
            let shift = rem.coeffs.len() - 1 - ddeg;
            let factor = rem.coeffs.last().unwrap() / dlead;
            for k in 0..divisor.coeffs.len() {
                let delta = &divisor.coeffs[k] * &factor;
                rem.coeffs[k + shift] = &rem.coeffs[k + shift] - &delta;
            }
            rem.trim();
        }
        rem
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        if let Some(lead) = x.coeffs.last().cloned() {
            let inv = lead.inv().expect("leading coefficient nonzero");
            x = x.scale(&inv);
        }
        x
    }

    /// Lagrange interpolation through distinct sample points.
    pub fn interpolate(samples: &[(GaussianRational, GaussianRational)]) -> UniPoly {
        let mut acc = UniPoly::zero();
        for (j, (xj, yj)) in samples.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let mut basis = UniPoly::constant(GaussianRational::one());
            let mut denom = GaussianRational::one();
            for (k, (xk, _)) in samples.iter().enumerate() {
                if k == j {
                    continue;
                }
                // (x - xk)
                basis = basis.mul(&UniPoly::from_coeffs(vec![
                    -xk,
                    GaussianRational::one(),
                ]));
                denom = &denom * &(xj - xk);
            }
            let w = yj / &denom;
            acc = acc.add(&basis.scale(&w));
        }
        acc
    }
}

/// Restricts a multivariate polynomial to the parametric line
/// `x_i = base_i + t * dir_i`, returning a polynomial in `t`.
pub fn restrict_to_line(
    p: &MultiPoly,
    base: &[GaussianRational],
    dir: &[GaussianRational],
) -> UniPoly {
    assert_eq!(base.len(), p.registry().len());
    assert_eq!(dir.len(), p.registry().len());
    let mut acc = UniPoly::zero();
    for (mono, coeff) in p.terms() {
        let mut term = UniPoly::constant(coeff.clone());
        for (idx, &e) in mono.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let lin = UniPoly::from_coeffs(vec![base[idx].clone(), dir[idx].clone()]);
            for _ in 0..e {
                term = term.mul(&lin);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{VarRegistry, VarRole};
    use crate::scalar::ratio;

    fn c(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (t+1)(t+2) and (t+1)(t+3) share (t+1)
        let f1 = UniPoly::from_coeffs(vec![c(1), c(1)]);
        let f2 = UniPoly::from_coeffs(vec![c(2), c(1)]);
        let f3 = UniPoly::from_coeffs(vec![c(3), c(1)]);
        let g = UniPoly::gcd(&f1.mul(&f2), &f1.mul(&f3));
        assert_eq!(g, f1);

        let g = UniPoly::gcd(&f2, &f3);
        assert!(g.is_constant() && !g.is_zero());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = UniPoly::from_coeffs(vec![c(3), c(-2), c(0), c(5)]);
        let samples: Vec<_> = (0..4)
            .map(|k| {
                let x = GaussianRational::new(ratio(k, 1), ratio(k, 3));
                let y = p.eval(&x);
                (x, y)
            })
            .collect();
        assert_eq!(UniPoly::interpolate(&samples), p);
    }

    #[test]
    fn line_restriction_matches_evaluation() {
        let reg = VarRegistry::block(&[("z", VarRole::Z, 2)]);
        let z1 = MultiPoly::var(&reg, reg.var("z1").unwrap());
        let z2 = MultiPoly::var(&reg, reg.var("z2").unwrap());
        let p = &(&z1 * &z1) * &z2;
        let base = vec![c(1), c(-2)];
        let dir = vec![c(3), c(1)];
        let u = restrict_to_line(&p, &base, &dir);
        for t in [c(0), c(1), c(7)] {
            let pt: Vec<_> = base
                .iter()
                .zip(dir.iter())
                .map(|(b, d)| b + &(d * &t))
                .collect();
            assert_eq!(u.eval(&t), p.eval(&pt).unwrap());
        }
    }
}
