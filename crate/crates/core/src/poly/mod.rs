//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! A [`MultiPoly`] stores nonzero coefficients keyed by exponent vectors in
//! graded-lexicographic order. Variables live in a shared [`VarRegistry`]
//! fixed at construction; exponent vectors index into it.

pub mod univariate;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::GaussianRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operands use different variable registries")]
    RegistryMismatch,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("pairing is not an involution on the registry")]
    InvalidPairing,
    #[error("evaluation point has {got} entries, registry has {want}")]
    EvalArity { want: usize, got: usize },
}

/// What a variable stands for; purely descriptive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarRole {
    Z,
    W,
    Zeta,
    Eta,
    Epsilon,
}

/// Index of a variable in its registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

/// Ordered list of named variables; the order fixes exponent-vector layout.
#[derive(Debug, PartialEq, Eq)]
pub struct VarRegistry {
    vars: Vec<(String, VarRole)>,
}

impl VarRegistry {
    /// Names must be unique.
    pub fn new(vars: Vec<(String, VarRole)>) -> Arc<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (name, _) in &vars {
            assert!(seen.insert(name.clone()), "duplicate variable {name:?}");
        }
        Arc::new(VarRegistry { vars })
    }

    /// `z1..z{n}` style block registry builder.
    pub fn block(blocks: &[(&str, VarRole, usize)]) -> Arc<Self> {
        let mut vars = Vec::new();
        for &(prefix, role, count) in blocks {
            if count == 1 && (role == VarRole::W || role == VarRole::Eta) {
                vars.push((prefix.to_string(), role));
            } else {
                for k in 1..=count {
                    vars.push((format!("{prefix}{k}"), role));
                }
            }
        }
        VarRegistry::new(vars)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.vars[v.0].0
    }

    pub fn role(&self, v: Var) -> VarRole {
        self.vars[v.0].1
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.vars.iter().position(|(n, _)| n == name).map(Var)
    }

    pub fn all_vars(&self) -> Vec<Var> {
        (0..self.len()).map(Var).collect()
    }

    pub fn vars_with_role(&self, role: VarRole) -> Vec<Var> {
        (0..self.len())
            .map(Var)
            .filter(|&v| self.role(v) == role)
            .collect()
    }
}

fn same_registry(a: &Arc<VarRegistry>, b: &Arc<VarRegistry>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector with graded-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    fn degree_in(&self, vars: &[Var]) -> usize {
        vars.iter().map(|v| self.0[v.0] as usize).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree with a distinguished value for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    pub fn is_zero_poly(self) -> bool {
        self == Degree::NegInfinity
    }

    /// `self <= Finite(bound)`; the zero polynomial satisfies every bound.
    pub fn at_most(self, bound: usize) -> bool {
        self <= Degree::Finite(bound)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Degree::NegInfinity => s.serialize_str("-inf"),
            Degree::Finite(d) => s.serialize_u64(*d as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Degree::Finite(n as usize)),
            Raw::Str(s) if s == "-inf" => Ok(Degree::NegInfinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad degree {s:?}"))),
        }
    }
}

/// One serialized term: exponent vector plus coefficient components.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub re: String,
    pub im: String,
}

/// Sparse multivariate polynomial; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    registry: Arc<VarRegistry>,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(registry: &Arc<VarRegistry>) -> Self {
        MultiPoly {
            registry: Arc::clone(registry),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(registry: &Arc<VarRegistry>, c: GaussianRational) -> Self {
        let mut p = Self::zero(registry);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(registry.len()), c);
        }
        p
    }

    pub fn one(registry: &Arc<VarRegistry>) -> Self {
        Self::constant(registry, GaussianRational::one())
    }

    pub fn var(registry: &Arc<VarRegistry>, v: Var) -> Self {
        Self::monomial(registry, &[(v, 1)], GaussianRational::one())
    }

    pub fn monomial(
        registry: &Arc<VarRegistry>,
        powers: &[(Var, u32)],
        coeff: GaussianRational,
    ) -> Self {
        let mut p = Self::zero(registry);
        if coeff.is_zero() {
            return p;
        }
        let mut exps = vec![0u32; registry.len()];
        for &(v, e) in powers {
            assert!(v.0 < registry.len(), "variable out of range");
            exps[v.0] += e;
        }
        p.terms.insert(Monomial(exps.into_boxed_slice()), coeff);
        p
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&Monomial::unit(self.registry.len()))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn coefficient(&self, exps: &[u32]) -> GaussianRational {
        self.terms
            .get(&Monomial(exps.to_vec().into_boxed_slice()))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    fn insert_term(&mut self, mono: Monomial, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn try_add(&self, rhs: &MultiPoly) -> Result<MultiPoly, PolyError> {
        if !same_registry(&self.registry, &rhs.registry) {
            return Err(PolyError::RegistryMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.try_add(&rhs.neg())
    }

    pub fn try_mul(&self, rhs: &MultiPoly) -> Result<MultiPoly, PolyError> {
        if !same_registry(&self.registry, &rhs.registry) {
            return Err(PolyError::RegistryMismatch);
        }
        let mut out = MultiPoly::zero(&self.registry);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            registry: Arc::clone(&self.registry),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.registry);
        }
        MultiPoly {
            registry: Arc::clone(&self.registry),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.registry);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same registry");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("same registry");
            }
        }
        acc
    }

    /// Formal partial derivative.
    pub fn partial(&self, v: Var) -> Result<MultiPoly, PolyError> {
        if v.0 >= self.registry.len() {
            return Err(PolyError::UnknownVariable(format!("#{}", v.0)));
        }
        let mut out = MultiPoly::zero(&self.registry);
        for (m, c) in &self.terms {
            let e = m.0[v.0];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[v.0] -= 1;
            let factor = GaussianRational::from_int(e as i64);
            out.insert_term(Monomial(exps), c * &factor);
        }
        Ok(out)
    }

    /// Simultaneous substitution within one registry; unbound variables stay.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Var, MultiPoly>,
    ) -> Result<MultiPoly, PolyError> {
        for target in bindings.values() {
            if !same_registry(&self.registry, &target.registry) {
                return Err(PolyError::RegistryMismatch);
            }
        }
        for v in bindings.keys() {
            if v.0 >= self.registry.len() {
                return Err(PolyError::UnknownVariable(format!("#{}", v.0)));
            }
        }
        let mut out = MultiPoly::zero(&self.registry);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(&self.registry, c.clone());
            let mut residue = vec![0u32; self.registry.len()];
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match bindings.get(&Var(idx)) {
                    Some(repl) => term = term.try_mul(&repl.pow(e)).expect("same registry"),
                    None => residue[idx] = e,
                }
            }
            let residue_mono = MultiPoly {
                registry: Arc::clone(&self.registry),
                terms: BTreeMap::from([(
                    Monomial(residue.into_boxed_slice()),
                    GaussianRational::one(),
                )]),
            };
            term = term.try_mul(&residue_mono).expect("same registry");
            out = out.try_add(&term).expect("same registry");
        }
        Ok(out)
    }

    /// Moves the polynomial into another registry, renaming variables.
    /// Every variable that actually occurs must be mapped.
    pub fn rename_into(
        &self,
        target: &Arc<VarRegistry>,
        map: &BTreeMap<Var, Var>,
    ) -> Result<MultiPoly, PolyError> {
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let tv = map.get(&Var(idx)).ok_or_else(|| {
                    PolyError::UnknownVariable(self.registry.name(Var(idx)).to_string())
                })?;
                if tv.0 >= target.len() {
                    return Err(PolyError::UnknownVariable(format!("#{}", tv.0)));
                }
                exps[tv.0] += e;
            }
            out.insert_term(Monomial(exps.into_boxed_slice()), c.clone());
        }
        Ok(out)
    }

    /// Sum of the terms of total degree exactly `d` in the selected variables.
    pub fn homogeneous_part(&self, d: usize, vars: &[Var]) -> MultiPoly {
        MultiPoly {
            registry: Arc::clone(&self.registry),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(vars) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Max total degree over the selected variables; zero polynomial reports
    /// [`Degree::NegInfinity`].
    pub fn total_degree(&self, vars: &[Var]) -> Degree {
        self.terms
            .keys()
            .map(|m| Degree::Finite(m.degree_in(vars)))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn total_degree_all(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| Degree::Finite(m.total_degree()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Conjugates every coefficient and swaps exponents along the pairing,
    /// which must be an involution (identity on unmentioned variables).
    pub fn formal_conjugate(
        &self,
        pairing: &BTreeMap<Var, Var>,
    ) -> Result<MultiPoly, PolyError> {
        let n = self.registry.len();
        let mut table: Vec<usize> = (0..n).collect();
        for (&a, &b) in pairing {
            if a.0 >= n || b.0 >= n {
                return Err(PolyError::UnknownVariable(format!("#{}", a.0.max(b.0))));
            }
            table[a.0] = b.0;
        }
        for (&a, &b) in pairing {
            if table[b.0] != a.0 {
                return Err(PolyError::InvalidPairing);
            }
        }
        let mut out = MultiPoly::zero(&self.registry);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; n];
            for (idx, &e) in m.0.iter().enumerate() {
                exps[table[idx]] += e;
            }
            out.insert_term(Monomial(exps.into_boxed_slice()), c.conj());
        }
        Ok(out)
    }

    /// Exact evaluation at a full assignment (one value per registry slot).
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational, PolyError> {
        if point.len() != self.registry.len() {
            return Err(PolyError::EvalArity {
                want: self.registry.len(),
                got: point.len(),
            });
        }
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (idx, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = &term * &point[idx];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                exps: m.0.to_vec(),
                re: {
                    let r = c.re();
                    if r.denom() == &num_bigint::BigInt::from(1) {
                        r.numer().to_string()
                    } else {
                        format!("{}/{}", r.numer(), r.denom())
                    }
                },
                im: {
                    let r = c.im();
                    if r.denom() == &num_bigint::BigInt::from(1) {
                        r.numer().to_string()
                    } else {
                        format!("{}/{}", r.numer(), r.denom())
                    }
                },
            })
            .collect()
    }

    pub fn from_json_terms(
        registry: &Arc<VarRegistry>,
        terms: &[TermJson],
    ) -> Result<MultiPoly, PolyError> {
        let mut out = MultiPoly::zero(registry);
        for t in terms {
            if t.exps.len() != registry.len() {
                return Err(PolyError::EvalArity {
                    want: registry.len(),
                    got: t.exps.len(),
                });
            }
            let re: crate::scalar::Rational = t
                .re
                .parse::<GaussianRational>()
                .map_err(|_| PolyError::UnknownVariable(t.re.clone()))?
                .re()
                .clone();
            let im: crate::scalar::Rational = t
                .im
                .parse::<GaussianRational>()
                .map_err(|_| PolyError::UnknownVariable(t.im.clone()))?
                .re()
                .clone();
            out.insert_term(
                Monomial(t.exps.clone().into_boxed_slice()),
                GaussianRational::new(re, im),
            );
        }
        Ok(out)
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$inner(rhs).expect("registry mismatch")
            }
        }
        impl std::ops::$trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$inner(&rhs).expect("registry mismatch")
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(idx, &e)| {
                    let name = self.registry.name(Var(idx));
                    if e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            let coeff = c.to_string();
            let coeff = if coeff.contains('+') || coeff.rfind('-').is_some_and(|p| p > 0) {
                format!("({coeff})")
            } else {
                coeff
            };
            let part = if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono.join("*")
            } else {
                format!("{coeff}*{}", mono.join("*"))
            };
            parts.push(part);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg_zw() -> Arc<VarRegistry> {
        VarRegistry::block(&[("z", VarRole::Z, 2), ("w", VarRole::W, 1)])
    }

    fn var(reg: &Arc<VarRegistry>, name: &str) -> Var {
        reg.var(name).unwrap()
    }

    #[test]
    fn product_of_conjugate_binomials() {
        let reg = reg_zw();
        let z1 = MultiPoly::var(&reg, var(&reg, "z1"));
        let w = MultiPoly::var(&reg, var(&reg, "w"));
        let prod = (&z1 + &w) * (&z1 - &w);
        let expected = &(&z1 * &z1) - &(&w * &w);
        assert_eq!(prod, expected);
        assert_eq!(prod.to_string(), "z1^2 + -1*w^2");
    }

    #[test]
    fn additive_identity() {
        let reg = reg_zw();
        let z1 = MultiPoly::var(&reg, var(&reg, "z1"));
        let p = &z1 * &z1;
        assert_eq!(p.try_add(&MultiPoly::zero(&reg)).unwrap(), p);
    }

    #[test]
    fn epsilon_square_via_zeta_binding() {
        // (2i*zb)^2 = -4 zb^2
        let reg = VarRegistry::block(&[("zeta", VarRole::Zeta, 1)]);
        let zb = MultiPoly::var(&reg, Var(0));
        let eps = zb.scale(&GaussianRational::two_i());
        let sq = &eps * &eps;
        let expected = (&zb * &zb).scale(&GaussianRational::from_int(-4));
        assert_eq!(sq, expected);
    }

    #[test]
    fn registry_mismatch_is_an_error() {
        let a = MultiPoly::one(&reg_zw());
        let b = MultiPoly::one(&VarRegistry::block(&[("z", VarRole::Z, 3)]));
        assert_eq!(a.try_add(&b), Err(PolyError::RegistryMismatch));
    }

    #[test]
    fn partial_derivatives() {
        let reg = reg_zw();
        let z1 = var(&reg, "z1");
        let z2 = var(&reg, "z2");
        let w = var(&reg, "w");
        let pz1 = MultiPoly::var(&reg, z1);
        let pz2 = MultiPoly::var(&reg, z2);
        let pw = MultiPoly::var(&reg, w);

        // d(z1*w)/dw = z1
        assert_eq!((&pz1 * &pw).partial(w).unwrap(), pz1);
        // d(z1^2)/dw = 0
        assert!((&pz1 * &pz1).partial(w).unwrap().is_zero());
        // d(mu*z1*z2)/dz1 = mu*z2
        let mu = GaussianRational::from_parts(2, 3, 0, 1);
        let p = (&pz1 * &pz2).scale(&mu);
        assert_eq!(p.partial(z1).unwrap(), pz2.scale(&mu));
    }

    #[test]
    fn substitute_segre_binding() {
        // p = w with w -> eta + 2i z . zeta (n = 2)
        let reg = VarRegistry::block(&[
            ("z", VarRole::Z, 1),
            ("w", VarRole::W, 1),
            ("zeta", VarRole::Zeta, 1),
            ("eta", VarRole::Eta, 1),
        ]);
        let z1 = MultiPoly::var(&reg, reg.var("z1").unwrap());
        let w = reg.var("w").unwrap();
        let zeta1 = MultiPoly::var(&reg, reg.var("zeta1").unwrap());
        let eta = MultiPoly::var(&reg, reg.var("eta").unwrap());
        let rhs = &eta + &(&z1 * &zeta1).scale(&GaussianRational::two_i());
        let bound = MultiPoly::var(&reg, w)
            .substitute(&BTreeMap::from([(w, rhs.clone())]))
            .unwrap();
        assert_eq!(bound, rhs);

        // identity substitution
        let p = &z1 + &eta;
        assert_eq!(p.substitute(&BTreeMap::new()).unwrap(), p);
    }

    #[test]
    fn homogeneous_parts_reassemble() {
        let reg = reg_zw();
        let z1 = MultiPoly::var(&reg, var(&reg, "z1"));
        let w = MultiPoly::var(&reg, var(&reg, "w"));
        let p = &(&(&z1 * &z1) + &(&z1 * &w).scale(&GaussianRational::from_int(3)))
            + &MultiPoly::constant(&reg, GaussianRational::from_int(7));
        let all = reg.all_vars();
        let mut sum = MultiPoly::zero(&reg);
        for d in 0..=3 {
            sum = &sum + &p.homogeneous_part(d, &all);
        }
        assert_eq!(sum, p);
        assert!(p.homogeneous_part(5, &all).is_zero());
    }

    #[test]
    fn homogeneous_part_in_subset() {
        // p = 2 + eps*phi + eps^2*psi restricted to {eps}: degree-1 part is eps*phi
        let reg = VarRegistry::block(&[("eps", VarRole::Epsilon, 1), ("z", VarRole::Z, 1)]);
        let eps = reg.var("eps1").unwrap();
        let z = reg.var("z1").unwrap();
        let e = MultiPoly::var(&reg, eps);
        let phi = MultiPoly::var(&reg, z);
        let p = &(&MultiPoly::constant(&reg, GaussianRational::from_int(2))
            + &(&e * &phi))
            + &(&e * &e);
        assert_eq!(p.homogeneous_part(1, &[eps]), &e * &phi);
    }

    #[test]
    fn degrees_and_zero_marker() {
        let reg = reg_zw();
        let z1 = MultiPoly::var(&reg, var(&reg, "z1"));
        let w = MultiPoly::var(&reg, var(&reg, "w"));
        let p = &(&z1 * &z1) * &w;
        assert_eq!(p.total_degree_all(), Degree::Finite(3));
        assert_eq!(
            MultiPoly::zero(&reg).total_degree_all(),
            Degree::NegInfinity
        );
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert!(Degree::NegInfinity.at_most(0));
    }

    #[test]
    fn formal_conjugate_moves_and_conjugates() {
        let reg = VarRegistry::block(&[("z", VarRole::Z, 1), ("zeta", VarRole::Zeta, 1)]);
        let z1 = reg.var("z1").unwrap();
        let zeta1 = reg.var("zeta1").unwrap();
        let pairing = BTreeMap::from([(z1, zeta1), (zeta1, z1)]);
        let p = MultiPoly::var(&reg, z1).scale(&GaussianRational::i());
        let q = p.formal_conjugate(&pairing).unwrap();
        assert_eq!(
            q,
            MultiPoly::var(&reg, zeta1).scale(&-GaussianRational::i())
        );
        assert_eq!(q.formal_conjugate(&pairing).unwrap(), p);

        let bad = BTreeMap::from([(z1, zeta1)]);
        assert_eq!(p.formal_conjugate(&bad), Err(PolyError::InvalidPairing));
    }

    #[test]
    fn json_term_round_trip() {
        let reg = reg_zw();
        let z1 = MultiPoly::var(&reg, var(&reg, "z1"));
        let w = MultiPoly::var(&reg, var(&reg, "w"));
        let p = &(&z1 * &w).scale(&GaussianRational::from_parts(3, 2, -1, 3)) + &z1;
        let terms = p.to_json_terms();
        let q = MultiPoly::from_json_terms(&reg, &terms).unwrap();
        assert_eq!(p, q);
    }

    // --- randomized ring properties ---

    fn arb_coeff() -> impl Strategy<Value = GaussianRational> {
        (-9i64..=9, 1i64..=4, -9i64..=9, 1i64..=4)
            .prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
    }

    fn arb_poly(reg: Arc<VarRegistry>) -> impl Strategy<Value = MultiPoly> {
        let nvars = reg.len();
        prop::collection::vec(
            (prop::collection::vec(0u32..=2, nvars), arb_coeff()),
            0..6,
        )
        .prop_map(move |terms| {
            let mut p = MultiPoly::zero(&reg);
            for (exps, c) in terms {
                p.insert_term(Monomial(exps.into_boxed_slice()), c);
            }
            p
        })
    }

    fn arb_point(nvars: usize) -> impl Strategy<Value = Vec<GaussianRational>> {
        prop::collection::vec(arb_coeff(), nvars)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn ring_axioms((p, q, r) in (arb_poly(reg_zw()), arb_poly(reg_zw()), arb_poly(reg_zw()))) {
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        }

        #[test]
        fn arithmetic_matches_evaluation(
            (p, q) in (arb_poly(reg_zw()), arb_poly(reg_zw())),
            pt in arb_point(3),
        ) {
            let sum = (&p + &q).eval(&pt).unwrap();
            prop_assert_eq!(sum, &p.eval(&pt).unwrap() + &q.eval(&pt).unwrap());
            let prod = (&p * &q).eval(&pt).unwrap();
            prop_assert_eq!(prod, &p.eval(&pt).unwrap() * &q.eval(&pt).unwrap());
        }

        #[test]
        fn substitution_is_a_ring_homomorphism(
            (p, q, s) in (arb_poly(reg_zw()), arb_poly(reg_zw()), arb_poly(reg_zw())),
        ) {
            let reg = reg_zw();
            let w = reg.var("w").unwrap();
            let bindings = BTreeMap::from([(w, s)]);
            let lhs = (&p * &q).substitute(&bindings).unwrap();
            let rhs = &p.substitute(&bindings).unwrap() * &q.substitute(&bindings).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs = (&p + &q).substitute(&bindings).unwrap();
            let rhs = &p.substitute(&bindings).unwrap() + &q.substitute(&bindings).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn leibniz_rule((p, q) in (arb_poly(reg_zw()), arb_poly(reg_zw()))) {
            let reg = reg_zw();
            let v = reg.var("z1").unwrap();
            let lhs = (&p * &q).partial(v).unwrap();
            let rhs = &(&p.partial(v).unwrap() * &q) + &(&p * &q.partial(v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn homogeneous_scaling(p in arb_poly(reg_zw()), c in arb_coeff()) {
            // p(c*x) = sum_d c^d * (degree-d part of p)(x)
            let reg = reg_zw();
            let all = reg.all_vars();
            let bindings: BTreeMap<Var, MultiPoly> = all
                .iter()
                .map(|&v| (v, MultiPoly::var(&reg, v).scale(&c)))
                .collect();
            let scaled = p.substitute(&bindings).unwrap();
            let mut sum = MultiPoly::zero(&reg);
            let mut c_pow = GaussianRational::one();
            for d in 0..=6 {
                sum = &sum + &p.homogeneous_part(d, &all).scale(&c_pow);
                c_pow = &c_pow * &c;
            }
            prop_assert_eq!(scaled, sum);
        }

        #[test]
        fn conjugation_is_an_involution(p in arb_poly(reg_zw())) {
            // pair z1 <-> z2, keep w fixed
            let reg = reg_zw();
            let z1 = reg.var("z1").unwrap();
            let z2 = reg.var("z2").unwrap();
            let pairing = BTreeMap::from([(z1, z2), (z2, z1)]);
            let twice = p
                .formal_conjugate(&pairing)
                .unwrap()
                .formal_conjugate(&pairing)
                .unwrap();
            prop_assert_eq!(twice, p);
        }
    }
}
