//! Deterministic random generation of scalars, polynomials, and matrices.
//!
//! Every suite in the crate draws from a caller-seeded RNG so that a run is
//! reproducible from its seed alone.

use std::sync::Arc;

use rand::Rng;

use crate::poly::{MultiPoly, Var, VarRegistry};
use crate::polymatrix::PolyMatrix;
use crate::scalar::{ratio, GaussianRational, Rational};

pub fn rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let r = rational(rng);
        if !num_traits::Zero::is_zero(&r) {
            return r;
        }
    }
}

pub fn positive_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

pub fn gaussian(rng: &mut impl Rng) -> GaussianRational {
    GaussianRational::new(rational(rng), rational(rng))
}

pub fn nonzero_gaussian(rng: &mut impl Rng) -> GaussianRational {
    loop {
        let g = gaussian(rng);
        if !g.is_zero() {
            return g;
        }
    }
}

pub fn real_gaussian(rng: &mut impl Rng) -> GaussianRational {
    GaussianRational::from_rational(rational(rng))
}

pub fn gaussian_point(rng: &mut impl Rng, n: usize) -> Vec<GaussianRational> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Random sparse polynomial with total degree at most `max_deg`.
pub fn poly(
    rng: &mut impl Rng,
    registry: &Arc<VarRegistry>,
    max_deg: u32,
    max_terms: usize,
) -> MultiPoly {
    let nterms = rng.gen_range(0..=max_terms);
    let mut acc = MultiPoly::zero(registry);
    for _ in 0..nterms {
        let mut powers = Vec::new();
        let mut budget = max_deg;
        for v in 0..registry.len() {
            if budget == 0 {
                break;
            }
            let e = rng.gen_range(0..=budget);
            if e > 0 {
                powers.push((Var(v), e));
                budget -= e;
            }
        }
        let term = MultiPoly::monomial(registry, &powers, gaussian(rng));
        acc = &acc + &term;
    }
    acc
}

/// Matrix of random polynomials.
pub fn poly_matrix(
    rng: &mut impl Rng,
    registry: &Arc<VarRegistry>,
    rows: usize,
    cols: usize,
    max_deg: u32,
    max_terms: usize,
) -> PolyMatrix {
    PolyMatrix::from_fn(registry, rows, cols, |_, _| {
        poly(rng, registry, max_deg, max_terms)
    })
}

/// Matrix of random Gaussian-rational constants.
pub fn scalar_matrix(
    rng: &mut impl Rng,
    registry: &Arc<VarRegistry>,
    rows: usize,
    cols: usize,
) -> PolyMatrix {
    PolyMatrix::from_fn(registry, rows, cols, |_, _| {
        MultiPoly::constant(registry, gaussian(rng))
    })
}

/// Matrix of random real rational constants.
pub fn rational_matrix(
    rng: &mut impl Rng,
    registry: &Arc<VarRegistry>,
    rows: usize,
    cols: usize,
) -> PolyMatrix {
    PolyMatrix::from_fn(registry, rows, cols, |_, _| {
        MultiPoly::constant(registry, real_gaussian(rng))
    })
}

/// Splits a column into `k` random parts summing to it exactly.
pub fn split_column(
    rng: &mut impl Rng,
    col: &[MultiPoly],
    k: usize,
) -> Vec<Vec<MultiPoly>> {
    assert!(k >= 1);
    let registry = col
        .first()
        .map(|p| Arc::clone(p.registry()))
        .expect("nonempty column");
    let mut parts: Vec<Vec<MultiPoly>> = Vec::with_capacity(k);
    for _ in 0..k - 1 {
        parts.push(
            col.iter()
                .map(|p| poly(rng, &registry, p.total_degree_all().finite().unwrap_or(1) as u32, 3))
                .collect(),
        );
    }
    // last part is the remainder so the sum is exact
    let mut last: Vec<MultiPoly> = col.to_vec();
    for part in &parts {
        for (acc, p) in last.iter_mut().zip(part) {
            *acc = &*acc - p;
        }
    }
    parts.push(last);
    parts
}
