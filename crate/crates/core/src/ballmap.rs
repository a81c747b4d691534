//! Concrete rational maps between balls and Siegel upper half-spaces:
//! propriety certificates, degrees with a reducedness probe, Cayley
//! conjugation, boundary translations, Segre-variety restriction, and a
//! catalog of classical maps.
//!
//! Irrational coefficients of classical monomial maps (sqrt 2, sqrt 3) are
//! carried as squared scale factors on otherwise rational components; every
//! check here only ever consumes the squared magnitude.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::univariate::{restrict_to_line, UniPoly};
use crate::poly::{Degree, MultiPoly, PolyError, TermJson, Var, VarRegistry, VarRole};
use crate::sampling;
use crate::scalar::{ratio, GaussianRational, Rational};

#[derive(Debug, Error)]
pub enum MapError {
    #[error("operation requires a {want:?}-side map")]
    WrongSide { want: Side },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not proper: residual has {terms} terms of degree {degree}")]
    NotProper {
        terms: usize,
        degree: Degree,
        residual: Box<MultiPoly>,
    },
    #[error("coefficient mode not supported here: {0}")]
    UnsupportedCoeffMode(String),
    #[error("point is not on the boundary (Im w0 != |z0|^2)")]
    PointNotOnBoundary,
    #[error("denominator vanishes at the base point")]
    DenominatorVanishes,
    #[error("malformed map: {0}")]
    Malformed(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ball,
    Siegel,
}

/// One component `sqrt(scale2) * poly`; `scale2` is a positive rational and
/// equals 1 for plain rational components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapComponent {
    pub poly: MultiPoly,
    pub scale2: Rational,
}

impl MapComponent {
    pub fn plain(poly: MultiPoly) -> Self {
        MapComponent {
            poly,
            scale2: Rational::one(),
        }
    }

    pub fn scaled(poly: MultiPoly, scale2: Rational) -> Self {
        MapComponent { poly, scale2 }
    }

    pub fn is_plain(&self) -> bool {
        self.scale2.is_one()
    }
}

/// A rational map `(P_1, ..., P_N) / Q` between a ball or Siegel domain of
/// source dimension `n` and one of dimension `N`.
///
/// Ball-side maps use variables `z1..z{n}`; Siegel-side maps use
/// `z1..z{n-1}, w` and group their components as `(f: n-1, phi: N-n, g: 1)`.
#[derive(Debug, Clone)]
pub struct RationalMap {
    pub name: String,
    n: usize,
    big_n: usize,
    side: Side,
    components: Vec<MapComponent>,
    denominator: MultiPoly,
    registry: Arc<VarRegistry>,
}

pub fn ball_registry(n: usize) -> Arc<VarRegistry> {
    VarRegistry::block(&[("z", VarRole::Z, n)])
}

pub fn siegel_registry(n: usize) -> Arc<VarRegistry> {
    VarRegistry::block(&[("z", VarRole::Z, n - 1), ("w", VarRole::W, 1)])
}

impl RationalMap {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        big_n: usize,
        side: Side,
        components: Vec<MapComponent>,
        denominator: MultiPoly,
    ) -> Result<Self, MapError> {
        if side == Side::Siegel && n < 2 {
            return Err(MapError::Malformed("Siegel side needs n >= 2".into()));
        }
        let registry = match side {
            Side::Ball => ball_registry(n),
            Side::Siegel => siegel_registry(n),
        };
        if components.len() != big_n {
            return Err(MapError::DimensionMismatch(format!(
                "{} components for target dimension {big_n}",
                components.len()
            )));
        }
        if denominator.is_zero() {
            return Err(MapError::Malformed("denominator is identically 0".into()));
        }
        for c in &components {
            if !c.scale2.is_positive() {
                return Err(MapError::Malformed("scale2 must be positive".into()));
            }
            if c.poly.registry() != &registry {
                return Err(MapError::Malformed(
                    "component registry does not match the map side".into(),
                ));
            }
        }
        if denominator.registry() != &registry {
            return Err(MapError::Malformed(
                "denominator registry does not match the map side".into(),
            ));
        }
        if side == Side::Siegel && !components[big_n - 1].is_plain() {
            return Err(MapError::UnsupportedCoeffMode(
                "the w-slot component of a Siegel-side map must be plain rational".into(),
            ));
        }
        Ok(RationalMap {
            name: name.into(),
            n,
            big_n,
            side,
            components,
            denominator,
            registry,
        })
    }

    /// Polynomial ball map (denominator 1).
    pub fn polynomial_ball(
        name: impl Into<String>,
        n: usize,
        components: Vec<MapComponent>,
    ) -> Result<Self, MapError> {
        let registry = ball_registry(n);
        let big_n = components.len();
        let denominator = MultiPoly::one(&registry);
        RationalMap::new(name, n, big_n, Side::Ball, components, denominator)
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.big_n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn components(&self) -> &[MapComponent] {
        &self.components
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.denominator
    }

    pub fn is_squared_mode(&self) -> bool {
        self.components.iter().any(|c| !c.is_plain())
    }

    /// Max total degree over numerators and denominator.
    pub fn map_degree(&self) -> Degree {
        self.components
            .iter()
            .map(|c| c.poly.total_degree_all())
            .chain(std::iter::once(self.denominator.total_degree_all()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Degree plus a probabilistic reducedness report from random-line gcd
    /// probes.
    pub fn degree(&self, rng: &mut impl Rng) -> DegreeReport {
        let degree = self.map_degree();
        const LINES: usize = 20;
        let nvars = self.registry.len();
        let mut lines_with_common_factor = 0;
        for _ in 0..LINES {
            let base = sampling::gaussian_point(rng, nvars);
            let dir = sampling::gaussian_point(rng, nvars);
            let mut gcd = restrict_to_line(&self.denominator, &base, &dir);
            for c in &self.components {
                let restricted = restrict_to_line(&c.poly, &base, &dir);
                gcd = UniPoly::gcd(&gcd, &restricted);
                if gcd.is_constant() && !gcd.is_zero() {
                    break;
                }
            }
            if !gcd.is_constant() {
                lines_with_common_factor += 1;
            }
        }
        let reducedness = if lines_with_common_factor == 0 {
            Reducedness::ProbablyReduced
        } else {
            Reducedness::CommonFactorDetected {
                lines: lines_with_common_factor,
                out_of: LINES,
            }
        };
        DegreeReport {
            degree,
            reducedness,
        }
    }

    fn z_vars(&self) -> Vec<Var> {
        self.registry.vars_with_role(VarRole::Z)
    }

    fn w_var(&self) -> Option<Var> {
        self.registry.vars_with_role(VarRole::W).first().copied()
    }

    /// Exact propriety certificate for a ball-side map: the complexified
    /// square-norm identity `sum |P|^2 - |Q|^2` must vanish on the locus
    /// `z . conj(z) = 1`, checked by an exact divisibility residual.
    pub fn propriety_check_sphere(&self) -> Result<ProprietyCertificate, MapError> {
        if self.side != Side::Ball {
            return Err(MapError::WrongSide { want: Side::Ball });
        }
        let n = self.n;
        let doubled = VarRegistry::block(&[("z", VarRole::Z, n), ("zeta", VarRole::Zeta, n)]);
        let embed: BTreeMap<Var, Var> = (0..n).map(|i| (Var(i), Var(i))).collect();
        let pairing: BTreeMap<Var, Var> = (0..n)
            .flat_map(|i| [(Var(i), Var(n + i)), (Var(n + i), Var(i))])
            .collect();
        let mut h = MultiPoly::zero(&doubled);
        for c in &self.components {
            let p = c.poly.rename_into(&doubled, &embed)?;
            let p_conj = p.formal_conjugate(&pairing)?;
            let weight = GaussianRational::from_rational(c.scale2.clone());
            h = &h + &(&p * &p_conj).scale(&weight);
        }
        let q = self.denominator.rename_into(&doubled, &embed)?;
        let q_conj = q.formal_conjugate(&pairing)?;
        h = &h - &(&q * &q_conj);

        // divisibility by (z . zeta - 1), tested by substituting
        // zeta1 -> (1 - sum_{j>=2} z_j zeta_j) / z1 and clearing z1 powers
        let zeta1 = doubled.var("zeta1").expect("zeta1 exists");
        let z1 = doubled.var("z1").expect("z1 exists");
        let mut s = MultiPoly::one(&doubled);
        for j in 2..=n {
            let zj = doubled.var(&format!("z{j}")).expect("zj");
            let zetaj = doubled.var(&format!("zeta{j}")).expect("zetaj");
            s = &s
                - &MultiPoly::monomial(&doubled, &[(zj, 1), (zetaj, 1)], GaussianRational::one());
        }
        // split H by the zeta1 power
        let mut by_power: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (mono, coeff) in h.terms() {
            let e = mono.exps()[zeta1.0];
            let powers: Vec<(Var, u32)> = mono
                .exps()
                .iter()
                .enumerate()
                .filter(|&(i, &v)| v > 0 && i != zeta1.0)
                .map(|(i, &v)| (Var(i), v))
                .collect();
            let rest = MultiPoly::monomial(&doubled, &powers, coeff.clone());
            let slot = by_power
                .entry(e)
                .or_insert_with(|| MultiPoly::zero(&doubled));
            *slot = &*slot + &rest;
        }
        let k_max = by_power.keys().max().copied().unwrap_or(0);
        let mut residual = MultiPoly::zero(&doubled);
        for (e, coeff) in by_power {
            let term = &coeff.try_mul(&s.pow(e))?
                * &MultiPoly::monomial(&doubled, &[(z1, k_max - e)], GaussianRational::one());
            residual = &residual + &term;
        }
        certificate_from_residual(self, residual)
    }

    /// Exact propriety certificate for a Siegel-side map: the complexified
    /// boundary identity
    /// `g(z,w) - conj(g)(zeta,eta) = 2i f(z,w) . conj(f)(zeta,eta)`
    /// must hold identically along `w = eta + 2i z . zeta` (with `zeta, eta`
    /// standing for the conjugated parameters).
    pub fn propriety_check_siegel(&self) -> Result<ProprietyCertificate, MapError> {
        if self.side != Side::Siegel {
            return Err(MapError::WrongSide { want: Side::Siegel });
        }
        let np = self.n - 1;
        let doubled = VarRegistry::block(&[
            ("z", VarRole::Z, np),
            ("w", VarRole::W, 1),
            ("zeta", VarRole::Zeta, np),
            ("eta", VarRole::Eta, 1),
        ]);
        let embed: BTreeMap<Var, Var> = (0..=np).map(|i| (Var(i), Var(i))).collect();
        let mut pairing: BTreeMap<Var, Var> = BTreeMap::new();
        for i in 0..np {
            pairing.insert(Var(i), Var(np + 1 + i));
            pairing.insert(Var(np + 1 + i), Var(i));
        }
        let w = Var(np);
        let eta = Var(2 * np + 1);
        pairing.insert(w, eta);
        pairing.insert(eta, w);

        // w -> eta + 2i z . zeta
        let mut segre = MultiPoly::var(&doubled, eta);
        for i in 0..np {
            segre = &segre
                + &MultiPoly::monomial(
                    &doubled,
                    &[(Var(i), 1), (Var(np + 1 + i), 1)],
                    GaussianRational::two_i(),
                );
        }
        let bindings = BTreeMap::from([(w, segre)]);

        let q = self.denominator.rename_into(&doubled, &embed)?;
        let q_sub = q.substitute(&bindings)?;
        let q_conj = q.formal_conjugate(&pairing)?;

        let g = self.components[self.big_n - 1]
            .poly
            .rename_into(&doubled, &embed)?;
        let g_sub = g.substitute(&bindings)?;
        let g_conj = g.formal_conjugate(&pairing)?;

        // G(x) Q*(u) - G*(u) Q(x) - 2i sum_m s2_m F_m(x) F*_m(u), x on the
        // Segre slice
        let mut residual = &(&g_sub * &q_conj) - &(&g_conj * &q_sub);
        for c in &self.components[..self.big_n - 1] {
            let f = c.poly.rename_into(&doubled, &embed)?;
            let f_sub = f.substitute(&bindings)?;
            let f_conj = f.formal_conjugate(&pairing)?;
            let weight =
                &GaussianRational::two_i() * &GaussianRational::from_rational(c.scale2.clone());
            residual = &residual - &(&f_sub * &f_conj).scale(&weight);
        }
        certificate_from_residual(self, residual)
    }

    /// Propriety check for whichever side the map lives on.
    pub fn propriety_check(&self) -> Result<ProprietyCertificate, MapError> {
        match self.side {
            Side::Ball => self.propriety_check_sphere(),
            Side::Siegel => self.propriety_check_siegel(),
        }
    }

    /// Conjugates by the Cayley pair: ball-side maps become Siegel-side maps
    /// and vice versa. Degrees are preserved on reduced representatives.
    pub fn cayley_conjugate(&self) -> Result<RationalMap, MapError> {
        match self.side {
            Side::Ball => self.cayley_to_siegel(),
            Side::Siegel => self.cayley_to_ball(),
        }
    }

    fn cayley_to_siegel(&self) -> Result<RationalMap, MapError> {
        let n = self.n;
        if !self.components[self.big_n - 1].is_plain() {
            return Err(MapError::UnsupportedCoeffMode(
                "last component must be plain rational for Cayley conjugation".into(),
            ));
        }
        let target_reg = siegel_registry(n);
        let w = target_reg.var("w").expect("w");
        // source substitutions: z_j -> 2 z_j / (1 - i w) for j < n,
        //                       z_n -> (1 + i w) / (1 - i w)
        let i = GaussianRational::i();
        let one_minus_iw = &MultiPoly::one(&target_reg)
            - &MultiPoly::monomial(&target_reg, &[(w, 1)], i.clone());
        let one_plus_iw = &MultiPoly::one(&target_reg)
            + &MultiPoly::monomial(&target_reg, &[(w, 1)], i.clone());
        let mut nums = Vec::with_capacity(n);
        for j in 0..n - 1 {
            let zj = target_reg.var(&format!("z{}", j + 1)).expect("zj");
            nums.push(MultiPoly::monomial(
                &target_reg,
                &[(zj, 1)],
                GaussianRational::from_int(2),
            ));
        }
        nums.push(one_plus_iw);
        let d = self
            .map_degree()
            .finite()
            .ok_or_else(|| MapError::Malformed("zero map".into()))?;
        let hat = |p: &MultiPoly| compose_homogenized(p, &target_reg, &nums, &one_minus_iw, d);
        let q_hat = hat(&self.denominator)?;
        let comps_hat: Vec<MapComponent> = self
            .components
            .iter()
            .map(|c| Ok(MapComponent::scaled(hat(&c.poly)?, c.scale2.clone())))
            .collect::<Result<_, MapError>>()?;
        // target Cayley inverse: denominator Q^ + P^_N, w-slot i (Q^ - P^_N)
        let p_last = comps_hat[self.big_n - 1].poly.clone();
        let denominator = &q_hat + &p_last;
        let w_slot = (&q_hat - &p_last).scale(&i);
        let mut components: Vec<MapComponent> = comps_hat[..self.big_n - 1].to_vec();
        components.push(MapComponent::plain(w_slot));
        let map = RationalMap::new(
            self.name.clone(),
            n,
            self.big_n,
            Side::Siegel,
            components,
            denominator,
        )?;
        Ok(map.normalized())
    }

    fn cayley_to_ball(&self) -> Result<RationalMap, MapError> {
        let n = self.n;
        let target_reg = ball_registry(n);
        let zn = target_reg.var(&format!("z{n}")).expect("zn");
        let i = GaussianRational::i();
        // source substitutions: z_j -> z~_j / (1 + z~_n), w -> i(1 - z~_n)/(1 + z~_n)
        let one_plus_zn = &MultiPoly::one(&target_reg) + &MultiPoly::var(&target_reg, zn);
        let mut nums = Vec::with_capacity(n);
        for j in 0..n - 1 {
            let zj = target_reg.var(&format!("z{}", j + 1)).expect("zj");
            nums.push(MultiPoly::var(&target_reg, zj));
        }
        let i_one_minus_zn = &MultiPoly::constant(&target_reg, i.clone())
            - &MultiPoly::monomial(&target_reg, &[(zn, 1)], i.clone());
        nums.push(i_one_minus_zn);
        let d = self
            .map_degree()
            .finite()
            .ok_or_else(|| MapError::Malformed("zero map".into()))?;
        let hat = |p: &MultiPoly| compose_homogenized(p, &target_reg, &nums, &one_plus_zn, d);
        let q_hat = hat(&self.denominator)?;
        let comps_hat: Vec<MapComponent> = self
            .components
            .iter()
            .map(|c| Ok(MapComponent::scaled(hat(&c.poly)?, c.scale2.clone())))
            .collect::<Result<_, MapError>>()?;
        // target Cayley: (2 f', 1 + i g) / (1 - i g) over the common
        // denominator
        let g_hat = comps_hat[self.big_n - 1].poly.clone();
        let denominator = &q_hat - &g_hat.scale(&i);
        let last = &q_hat + &g_hat.scale(&i);
        let mut components: Vec<MapComponent> = comps_hat[..self.big_n - 1]
            .iter()
            .map(|c| {
                MapComponent::scaled(
                    c.poly.scale(&GaussianRational::from_int(2)),
                    c.scale2.clone(),
                )
            })
            .collect();
        components.push(MapComponent::plain(last));
        let map = RationalMap::new(
            self.name.clone(),
            n,
            self.big_n,
            Side::Ball,
            components,
            denominator,
        )?;
        Ok(map.normalized())
    }

    /// Divides numerators and denominator by the denominator's first nonzero
    /// coefficient, fixing a canonical scale.
    pub fn normalized(&self) -> RationalMap {
        let Some((_, lead)) = self.denominator.terms().next() else {
            return self.clone();
        };
        let inv = lead.inv().expect("nonzero leading coefficient");
        let mut out = self.clone();
        out.denominator = out.denominator.scale(&inv);
        for c in &mut out.components {
            c.poly = c.poly.scale(&inv);
        }
        out
    }

    /// `F_p = sigma_{F(p)}^{-1} o F o sigma_p` for a boundary point
    /// `p = (z0, w0)` with `Im w0 = |z0|^2`; the translated map fixes the
    /// origin and is proper whenever `F` is.
    ///
    /// Works in squared-coefficient mode too: every cross term in the
    /// inverse translation pairs a component with its own conjugate value,
    /// so scale factors only ever appear squared.
    pub fn translate_to_point(
        &self,
        z0: &[GaussianRational],
        w0: &GaussianRational,
    ) -> Result<RationalMap, MapError> {
        if self.side != Side::Siegel {
            return Err(MapError::WrongSide { want: Side::Siegel });
        }
        if z0.len() != self.n - 1 {
            return Err(MapError::DimensionMismatch(format!(
                "z0 has {} entries for source dimension {}",
                z0.len(),
                self.n
            )));
        }
        let norm: Rational = z0.iter().map(|z| z.norm_sqr()).sum();
        if w0.im() != &norm {
            return Err(MapError::PointNotOnBoundary);
        }

        // sigma_p: z_j -> z_j + z0_j, w -> w + w0 + 2i z . conj(z0)
        let reg = &self.registry;
        let w = self.w_var().expect("Siegel registry has w");
        let zvars = self.z_vars();
        let mut bindings: BTreeMap<Var, MultiPoly> = BTreeMap::new();
        for (j, &zv) in zvars.iter().enumerate() {
            bindings.insert(
                zv,
                &MultiPoly::var(reg, zv) + &MultiPoly::constant(reg, z0[j].clone()),
            );
        }
        let mut w_image = &MultiPoly::var(reg, w) + &MultiPoly::constant(reg, w0.clone());
        for (j, &zv) in zvars.iter().enumerate() {
            let coeff = &GaussianRational::two_i() * &z0[j].conj();
            w_image = &w_image + &MultiPoly::monomial(reg, &[(zv, 1)], coeff);
        }
        bindings.insert(w, w_image);

        let moved: Vec<MultiPoly> = self
            .components
            .iter()
            .map(|c| c.poly.substitute(&bindings))
            .collect::<Result<_, _>>()?;
        let q_moved = self.denominator.substitute(&bindings)?;

        // rational parts of the component values at p (the full value of
        // component m is sqrt(scale2_m) times this)
        let q_at_p = q_moved.constant_term();
        if q_at_p.is_zero() {
            return Err(MapError::DenominatorVanishes);
        }
        let values: Vec<GaussianRational> = moved
            .iter()
            .map(|p| &p.constant_term() / &q_at_p)
            .collect();

        // inverse Heisenberg translation by F(p) = (a, b):
        // z*_m - a_m on the f/phi slots, w* - conj(b) - 2i z* . conj(a);
        // each product z*_m conj(a_m) carries scale2_m, keeping it rational
        let mut components = Vec::with_capacity(self.big_n);
        for m in 0..self.big_n - 1 {
            let shifted = &moved[m] - &q_moved.scale(&values[m]);
            components.push(MapComponent::scaled(
                shifted,
                self.components[m].scale2.clone(),
            ));
        }
        let b = &values[self.big_n - 1];
        let mut w_slot = &moved[self.big_n - 1] - &q_moved.scale(&b.conj());
        for m in 0..self.big_n - 1 {
            let scale = GaussianRational::from_rational(self.components[m].scale2.clone());
            let coeff = &(&GaussianRational::two_i() * &values[m].conj()) * &scale;
            w_slot = &w_slot - &moved[m].scale(&coeff);
        }
        components.push(MapComponent::plain(w_slot));

        RationalMap::new(
            format!("{}@p", self.name),
            self.n,
            self.big_n,
            Side::Siegel,
            components,
            q_moved,
        )
    }

    /// Composes with the inverse Heisenberg translation by `F(0)`, producing
    /// an origin-preserving representative (0 lies on the boundary, so
    /// `F(0)` does too).
    pub fn recentered_at_origin(&self) -> Result<RationalMap, MapError> {
        let z0 = vec![GaussianRational::zero(); self.n - 1];
        self.translate_to_point(&z0, &GaussianRational::zero())
    }

    /// Restricts a Siegel-side map to the Segre variety of the given
    /// parameters by eliminating `w`, returning polynomials in `z` alone.
    pub fn segre_restrict(&self, params: &SegreParams) -> Result<RestrictedMap, MapError> {
        if self.side != Side::Siegel {
            return Err(MapError::WrongSide { want: Side::Siegel });
        }
        if params.zeta.len() != self.n - 1 {
            return Err(MapError::DimensionMismatch(format!(
                "Segre parameter has {} entries for source dimension {}",
                params.zeta.len(),
                self.n
            )));
        }
        let reg = &self.registry;
        let w = self.w_var().expect("Siegel registry has w");
        let zvars = self.z_vars();
        // w -> conj(eta) + 2i sum z_j conj(zeta_j)
        let mut image = MultiPoly::constant(reg, params.eta.conj());
        for (j, &zv) in zvars.iter().enumerate() {
            let coeff = &GaussianRational::two_i() * &params.zeta[j].conj();
            image = &image + &MultiPoly::monomial(reg, &[(zv, 1)], coeff);
        }
        let bindings = BTreeMap::from([(w, image)]);
        let numerators: Vec<MapComponent> = self
            .components
            .iter()
            .map(|c| {
                Ok(MapComponent::scaled(
                    c.poly.substitute(&bindings)?,
                    c.scale2.clone(),
                ))
            })
            .collect::<Result<_, MapError>>()?;
        let denominator = self.denominator.substitute(&bindings)?;
        let degree = numerators
            .iter()
            .map(|c| c.poly.total_degree(&zvars))
            .chain(std::iter::once(denominator.total_degree(&zvars)))
            .max()
            .unwrap_or(Degree::NegInfinity);
        Ok(RestrictedMap {
            numerators,
            denominator,
            degree,
        })
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            name: Some(self.name.clone()),
            n: self.n,
            big_n: self.big_n,
            side: self.side,
            coeff_mode: if self.is_squared_mode() {
                CoeffMode::Squared
            } else {
                CoeffMode::Exact
            },
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    poly: c.poly.to_json_terms(),
                    scale2: fmt_rational(&c.scale2),
                })
                .collect(),
            denominator: self.denominator.to_json_terms(),
        }
    }

    pub fn from_json(json: &MapJson) -> Result<Self, MapError> {
        let registry = match json.side {
            Side::Ball => ball_registry(json.n),
            Side::Siegel => siegel_registry(json.n),
        };
        let mut components = Vec::with_capacity(json.components.len());
        for c in &json.components {
            let poly = MultiPoly::from_json_terms(&registry, &c.poly)?;
            let scale2 = parse_rational(&c.scale2)
                .ok_or_else(|| MapError::Malformed(format!("bad scale2 {:?}", c.scale2)))?;
            components.push(MapComponent::scaled(poly, scale2));
        }
        if json.coeff_mode == CoeffMode::Exact && components.iter().any(|c| !c.is_plain()) {
            return Err(MapError::Malformed(
                "coeff_mode is exact but a component has scale2 != 1".into(),
            ));
        }
        let denominator = MultiPoly::from_json_terms(&registry, &json.denominator)?;
        RationalMap::new(
            json.name.clone().unwrap_or_else(|| "map".into()),
            json.n,
            json.big_n,
            json.side,
            components,
            denominator,
        )
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let g: GaussianRational = s.parse().ok()?;
    if !g.is_real() {
        return None;
    }
    Some(g.re().clone())
}

fn certificate_from_residual(
    map: &RationalMap,
    residual: MultiPoly,
) -> Result<ProprietyCertificate, MapError> {
    if residual.is_zero() {
        Ok(ProprietyCertificate {
            map_name: map.name.clone(),
            side: map.side,
            residual_terms: 0,
        })
    } else {
        Err(MapError::NotProper {
            terms: residual.num_terms(),
            degree: residual.total_degree_all(),
            residual: Box::new(residual),
        })
    }
}

/// Witness that the propriety identity closed exactly (zero residual).
#[derive(Debug, Clone, Serialize)]
pub struct ProprietyCertificate {
    pub map_name: String,
    pub side: Side,
    pub residual_terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reducedness {
    ProbablyReduced,
    CommonFactorDetected { lines: usize, out_of: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeReport {
    pub degree: Degree,
    pub reducedness: Reducedness,
}

/// Parameters `(zeta, eta)` of a Segre variety; the defining equation uses
/// their conjugates, which the restriction takes internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegreParams {
    pub zeta: Vec<GaussianRational>,
    pub eta: GaussianRational,
}

impl SegreParams {
    pub fn origin(n: usize) -> Self {
        SegreParams {
            zeta: vec![GaussianRational::zero(); n - 1],
            eta: GaussianRational::zero(),
        }
    }

    /// Random boundary point: `Im eta = |zeta|^2` exactly.
    pub fn random_boundary(rng: &mut impl Rng, n: usize) -> Self {
        let zeta: Vec<GaussianRational> =
            (0..n - 1).map(|_| sampling::gaussian(rng)).collect();
        let norm: Rational = zeta.iter().map(|z| z.norm_sqr()).sum();
        let eta = GaussianRational::new(sampling::rational(rng), norm);
        SegreParams { zeta, eta }
    }
}

/// A Siegel-side map restricted to one Segre variety: polynomials in `z`.
#[derive(Debug, Clone)]
pub struct RestrictedMap {
    pub numerators: Vec<MapComponent>,
    pub denominator: MultiPoly,
    pub degree: Degree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffMode {
    Exact,
    Squared,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentJson {
    pub poly: Vec<TermJson>,
    #[serde(default = "default_scale2")]
    pub scale2: String,
}

fn default_scale2() -> String {
    "1".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub name: Option<String>,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub side: Side,
    pub coeff_mode: CoeffMode,
    pub components: Vec<ComponentJson>,
    pub denominator: Vec<TermJson>,
}

/// `denom^total_deg * p(nums / denom)`: substitutes each source variable by
/// `nums[i] / denom` and clears denominators at homogenization degree
/// `total_deg >= deg p`.
fn compose_homogenized(
    p: &MultiPoly,
    target_reg: &Arc<VarRegistry>,
    nums: &[MultiPoly],
    denom: &MultiPoly,
    total_deg: usize,
) -> Result<MultiPoly, MapError> {
    let mut acc = MultiPoly::zero(target_reg);
    for (mono, coeff) in p.terms() {
        let mut term = MultiPoly::constant(target_reg, coeff.clone());
        let mut used = 0u32;
        for (idx, &e) in mono.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            term = term.try_mul(&nums[idx].pow(e))?;
            used += e;
        }
        let pad = total_deg as u32 - used;
        term = term.try_mul(&denom.pow(pad))?;
        acc = &acc + &term;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

/// A catalog entry: the map, its registered degree, and the propriety
/// certificate computed when the catalog is built.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub map: RationalMap,
    pub expected_degree: usize,
    pub certificate: ProprietyCertificate,
}

/// Natural embedding `B_n -> B_N` placing the last source coordinate in the
/// last target slot (the slot the Cayley pair sends to the `w`-axis).
pub fn linear_embedding(n: usize, big_n: usize) -> Result<RationalMap, MapError> {
    if big_n < n {
        return Err(MapError::DimensionMismatch(format!(
            "target dimension {big_n} below source {n}"
        )));
    }
    let reg = ball_registry(n);
    let mut comps = Vec::with_capacity(big_n);
    for j in 1..n {
        let v = reg.var(&format!("z{j}")).expect("zj");
        comps.push(MapComponent::plain(MultiPoly::var(&reg, v)));
    }
    for _ in n..big_n {
        comps.push(MapComponent::plain(MultiPoly::zero(&reg)));
    }
    let zn = reg.var(&format!("z{n}")).expect("zn");
    comps.push(MapComponent::plain(MultiPoly::var(&reg, zn)));
    RationalMap::polynomial_ball("linear-embedding", n, comps)
}

fn mono2(reg: &Arc<VarRegistry>, e1: u32, e2: u32) -> MultiPoly {
    let z1 = reg.var("z1").expect("z1");
    let z2 = reg.var("z2").expect("z2");
    MultiPoly::monomial(reg, &[(z1, e1), (z2, e2)], GaussianRational::one())
}

/// The classical proper monomial maps from the 2-ball to the 3-ball plus the
/// natural embedding; every entry ships with an exact propriety certificate.
///
/// The four equivalence classes for source dimension 2 and target dimension
/// 3 appear under the `faran-` names with degrees `{1, 2, 2, 3}`.
pub fn catalog() -> Vec<CatalogEntry> {
    let reg = ball_registry(2);
    let builders: Vec<(RationalMap, usize)> = vec![
        (linear_embedding(2, 3).expect("valid embedding"), 1),
        (
            RationalMap::polynomial_ball(
                "whitney",
                2,
                vec![
                    MapComponent::plain(mono2(&reg, 1, 0)),
                    MapComponent::plain(mono2(&reg, 1, 1)),
                    MapComponent::plain(mono2(&reg, 0, 2)),
                ],
            )
            .expect("valid map"),
            2,
        ),
        (
            RationalMap::polynomial_ball(
                "faran-linear",
                2,
                vec![
                    MapComponent::plain(mono2(&reg, 1, 0)),
                    MapComponent::plain(mono2(&reg, 0, 1)),
                    MapComponent::plain(MultiPoly::zero(&reg)),
                ],
            )
            .expect("valid map"),
            1,
        ),
        (
            RationalMap::polynomial_ball(
                "faran-whitney",
                2,
                vec![
                    MapComponent::plain(mono2(&reg, 1, 0)),
                    MapComponent::plain(mono2(&reg, 1, 1)),
                    MapComponent::plain(mono2(&reg, 0, 2)),
                ],
            )
            .expect("valid map"),
            2,
        ),
        (
            RationalMap::polynomial_ball(
                "faran-homogeneous",
                2,
                vec![
                    MapComponent::plain(mono2(&reg, 2, 0)),
                    MapComponent::scaled(mono2(&reg, 1, 1), ratio(2, 1)),
                    MapComponent::plain(mono2(&reg, 0, 2)),
                ],
            )
            .expect("valid map"),
            2,
        ),
        (
            RationalMap::polynomial_ball(
                "faran-cubic",
                2,
                vec![
                    MapComponent::plain(mono2(&reg, 3, 0)),
                    MapComponent::scaled(mono2(&reg, 1, 1), ratio(3, 1)),
                    MapComponent::plain(mono2(&reg, 0, 3)),
                ],
            )
            .expect("valid map"),
            3,
        ),
        (
            RationalMap::polynomial_ball(
                "homogeneous-quadratic",
                2,
                vec![
                    MapComponent::plain(mono2(&reg, 2, 0)),
                    MapComponent::scaled(mono2(&reg, 1, 1), ratio(2, 1)),
                    MapComponent::plain(mono2(&reg, 0, 2)),
                ],
            )
            .expect("valid map"),
            2,
        ),
    ];
    builders
        .into_iter()
        .map(|(map, expected_degree)| {
            let certificate = map
                .propriety_check_sphere()
                .expect("catalog maps are proper by construction");
            CatalogEntry {
                map,
                expected_degree,
                certificate,
            }
        })
        .collect()
}

/// Names of the four-class degree family for source dimension 2, target 3.
pub fn degree_family_names() -> [&'static str; 4] {
    [
        "faran-linear",
        "faran-whitney",
        "faran-homogeneous",
        "faran-cubic",
    ]
}

/// The identity map on the Siegel domain of dimension `n`.
pub fn siegel_identity(n: usize) -> RationalMap {
    let reg = siegel_registry(n);
    let mut comps = Vec::with_capacity(n);
    for j in 1..n {
        let v = reg.var(&format!("z{j}")).expect("zj");
        comps.push(MapComponent::plain(MultiPoly::var(&reg, v)));
    }
    let w = reg.var("w").expect("w");
    comps.push(MapComponent::plain(MultiPoly::var(&reg, w)));
    RationalMap::new(
        "siegel-identity",
        n,
        n,
        Side::Siegel,
        comps,
        MultiPoly::one(&reg),
    )
    .expect("valid identity")
}

/// The identity map on the ball of dimension `n`.
pub fn ball_identity(n: usize) -> RationalMap {
    let reg = ball_registry(n);
    let comps = (1..=n)
        .map(|j| {
            let v = reg.var(&format!("z{j}")).expect("zj");
            MapComponent::plain(MultiPoly::var(&reg, v))
        })
        .collect();
    RationalMap::polynomial_ball("ball-identity", n, comps).expect("valid identity")
}

/// Siegel-side linear embedding `(z, 0, w)`.
pub fn siegel_linear_embedding(n: usize, big_n: usize) -> Result<RationalMap, MapError> {
    if big_n < n {
        return Err(MapError::DimensionMismatch(format!(
            "target dimension {big_n} below source {n}"
        )));
    }
    let reg = siegel_registry(n);
    let mut comps = Vec::with_capacity(big_n);
    for j in 1..n {
        let v = reg.var(&format!("z{j}")).expect("zj");
        comps.push(MapComponent::plain(MultiPoly::var(&reg, v)));
    }
    for _ in n..big_n {
        comps.push(MapComponent::plain(MultiPoly::zero(&reg)));
    }
    let w = reg.var("w").expect("w");
    comps.push(MapComponent::plain(MultiPoly::var(&reg, w)));
    RationalMap::new(
        "siegel-linear-embedding",
        n,
        big_n,
        Side::Siegel,
        comps,
        MultiPoly::one(&reg),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_maps_are_proper() {
        ball_identity(2).propriety_check_sphere().unwrap();
        ball_identity(3).propriety_check_sphere().unwrap();
        siegel_identity(2).propriety_check_siegel().unwrap();
        siegel_identity(4).propriety_check_siegel().unwrap();
    }

    #[test]
    fn siegel_embedding_is_proper() {
        siegel_linear_embedding(2, 4)
            .unwrap()
            .propriety_check_siegel()
            .unwrap();
        siegel_linear_embedding(3, 6)
            .unwrap()
            .propriety_check_siegel()
            .unwrap();
    }

    #[test]
    fn doubled_component_is_not_proper() {
        let reg = ball_registry(2);
        let z1 = MultiPoly::var(&reg, reg.var("z1").unwrap());
        let bad = RationalMap::polynomial_ball(
            "broken",
            2,
            vec![MapComponent::plain(z1.clone()), MapComponent::plain(z1)],
        )
        .unwrap();
        match bad.propriety_check_sphere() {
            Err(MapError::NotProper { residual, .. }) => assert!(!residual.is_zero()),
            other => panic!("expected NotProper, got {other:?}"),
        }
    }

    #[test]
    fn catalog_certificates_and_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let entries = catalog();
        assert_eq!(entries.len(), 7);
        for entry in &entries {
            let report = entry.map.degree(&mut rng);
            assert_eq!(
                report.degree,
                Degree::Finite(entry.expected_degree),
                "{}",
                entry.map.name
            );
            assert_eq!(report.reducedness, Reducedness::ProbablyReduced);
        }
        // the four-class family has degrees {1, 2, 2, 3}
        let mut family: Vec<usize> = degree_family_names()
            .iter()
            .map(|name| {
                entries
                    .iter()
                    .find(|e| e.map.name == *name)
                    .expect("family entry present")
                    .expected_degree
            })
            .collect();
        family.sort_unstable();
        assert_eq!(family, vec![1, 2, 2, 3]);
        assert_eq!(*family.iter().max().unwrap(), 3); // kappa0 + 2 with kappa0 = 1
    }

    #[test]
    fn common_factor_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reg = ball_registry(2);
        let z1 = MultiPoly::var(&reg, reg.var("z1").unwrap());
        let z2 = MultiPoly::var(&reg, reg.var("z2").unwrap());
        let map = RationalMap::new(
            "unreduced",
            2,
            2,
            Side::Ball,
            vec![
                MapComponent::plain(&z1 * &z2),
                MapComponent::plain(&z2 * &z2),
            ],
            &z2 * &(&z1 + &z2),
        )
        .unwrap();
        let report = map.degree(&mut rng);
        assert!(matches!(
            report.reducedness,
            Reducedness::CommonFactorDetected { .. }
        ));
    }

    #[test]
    fn cayley_identity_is_identity() {
        for n in [2usize, 3] {
            let conj = ball_identity(n).cayley_conjugate().unwrap();
            let expected = siegel_identity(n);
            assert_eq!(conj.denominator(), expected.denominator());
            for (a, b) in conj.components().iter().zip(expected.components()) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn cayley_embedding_is_siegel_embedding() {
        let conj = linear_embedding(2, 4).unwrap().cayley_conjugate().unwrap();
        let expected = siegel_linear_embedding(2, 4).unwrap();
        assert_eq!(conj.denominator(), expected.denominator());
        for (a, b) in conj.components().iter().zip(expected.components()) {
            assert_eq!(a, b);
        }
        // and back
        let back = conj.cayley_conjugate().unwrap();
        let original = linear_embedding(2, 4).unwrap();
        assert_eq!(back.denominator(), original.denominator());
        for (a, b) in back.components().iter().zip(original.components()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cayley_conjugates_stay_proper_and_keep_degree() {
        for entry in catalog() {
            let conj = entry.map.cayley_conjugate().unwrap();
            conj.propriety_check_siegel().unwrap_or_else(|e| {
                panic!("{} not proper on the Siegel side: {e}", entry.map.name)
            });
            assert_eq!(
                conj.map_degree(),
                Degree::Finite(entry.expected_degree),
                "{}",
                entry.map.name
            );
        }
    }

    #[test]
    fn cayley_preserves_the_defining_inequality_symbolically() {
        // |1 - i w|^2 - |1 + i w|^2 - 4 |z|^2 = 4 (Im w - |z|^2), written with
        // independent conjugate variables
        let reg = VarRegistry::block(&[
            ("z", VarRole::Z, 2),
            ("zeta", VarRole::Zeta, 2),
            ("w", VarRole::W, 1),
            ("eta", VarRole::Eta, 1),
        ]);
        let w = MultiPoly::var(&reg, reg.var("w").unwrap());
        let wb = MultiPoly::var(&reg, reg.var("eta").unwrap());
        let i = GaussianRational::i();
        let one = MultiPoly::one(&reg);
        let lhs_a = &(&one - &w.scale(&i)) * &(&one + &wb.scale(&i));
        let lhs_b = &(&one + &w.scale(&i)) * &(&one - &wb.scale(&i));
        let mut norm = MultiPoly::zero(&reg);
        for j in 1..=2 {
            let zj = MultiPoly::var(&reg, reg.var(&format!("z{j}")).unwrap());
            let zbj = MultiPoly::var(&reg, reg.var(&format!("zeta{j}")).unwrap());
            norm = &norm + &(&zj * &zbj);
        }
        let lhs = &(&lhs_a - &lhs_b) - &norm.scale(&GaussianRational::from_int(4));
        // 4 Im w = -2i (w - conj w)
        let rhs = &(&w - &wb).scale(&-GaussianRational::two_i())
            - &norm.scale(&GaussianRational::from_int(4));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn translate_at_origin_is_identity() {
        let map = siegel_identity(3);
        let moved = map
            .translate_to_point(
                &[GaussianRational::zero(), GaussianRational::zero()],
                &GaussianRational::zero(),
            )
            .unwrap();
        for (a, b) in moved.components().iter().zip(map.components()) {
            assert_eq!(a.poly, b.poly);
        }
    }

    #[test]
    fn translate_fixes_origin_and_propriety() {
        // p = (1, i): Im(i) = 1 = |1|^2
        let map = siegel_identity(2);
        let moved = map
            .translate_to_point(&[GaussianRational::one()], &GaussianRational::i())
            .unwrap();
        for c in moved.components() {
            assert!(c.poly.constant_term().is_zero(), "F_p(0) must vanish");
        }
        moved.propriety_check_siegel().unwrap();

        // Whitney on the Siegel side, translated to a random boundary point
        let whitney = catalog()
            .into_iter()
            .find(|e| e.map.name == "whitney")
            .unwrap()
            .map
            .cayley_conjugate()
            .unwrap();
        let z0 = [GaussianRational::from_parts(1, 2, 1, 3)];
        let norm = z0[0].norm_sqr();
        let w0 = GaussianRational::new(ratio(2, 5), norm);
        let moved = whitney.translate_to_point(&z0, &w0).unwrap();
        for c in moved.components() {
            assert!(c.poly.constant_term().is_zero());
        }
        moved.propriety_check_siegel().unwrap();

        // squared-coefficient map translated off the origin stays exact
        let cubic = catalog()
            .into_iter()
            .find(|e| e.map.name == "faran-cubic")
            .unwrap()
            .map
            .cayley_conjugate()
            .unwrap();
        let moved = cubic.translate_to_point(&z0, &w0).unwrap();
        for c in moved.components() {
            assert!(c.poly.constant_term().is_zero());
        }
        moved.propriety_check_siegel().unwrap();
    }

    #[test]
    fn translate_rejects_interior_points() {
        let map = siegel_identity(2);
        let err =
            map.translate_to_point(&[GaussianRational::one()], &GaussianRational::two_i());
        assert!(matches!(err, Err(MapError::PointNotOnBoundary)));
    }

    #[test]
    fn heisenberg_translation_maps_origin_segre_correctly() {
        // sigma_p sends {w = 0} into the Segre variety of p: with
        // sigma_p(z, 0) = (z + z0, w0 + 2i z . conj z0), the defining
        // equation (w' - conj w0) = 2i (z' . conj z0) holds identically in z
        let reg = siegel_registry(3);
        let z0 = [
            GaussianRational::from_parts(1, 2, 0, 1),
            GaussianRational::from_parts(0, 1, 1, 3),
        ];
        let w0 = GaussianRational::new(
            ratio(-1, 4),
            z0.iter().map(|z| z.norm_sqr()).sum::<Rational>(),
        );
        let zvars: Vec<Var> = reg.vars_with_role(VarRole::Z);
        let mut w_image = MultiPoly::constant(&reg, w0.clone());
        for (j, &zv) in zvars.iter().enumerate() {
            w_image = &w_image
                + &MultiPoly::monomial(
                    &reg,
                    &[(zv, 1)],
                    &GaussianRational::two_i() * &z0[j].conj(),
                );
        }
        let mut rhs = MultiPoly::zero(&reg);
        for (j, &zv) in zvars.iter().enumerate() {
            let z_comp =
                &MultiPoly::var(&reg, zv) + &MultiPoly::constant(&reg, z0[j].clone());
            rhs = &rhs + &z_comp.scale(&(&GaussianRational::two_i() * &z0[j].conj()));
        }
        let lhs = &w_image - &MultiPoly::constant(&reg, w0.conj());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn segre_restriction_of_identity_through_origin() {
        let map = siegel_identity(3);
        let restricted = map.segre_restrict(&SegreParams::origin(3)).unwrap();
        assert_eq!(restricted.degree, Degree::Finite(1));
        // w-component restricts to 0
        assert!(restricted.numerators.last().unwrap().poly.is_zero());
    }

    #[test]
    fn segre_sweep_never_exceeds_map_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for entry in catalog() {
            let siegel = entry.map.cayley_conjugate().unwrap();
            let deg = siegel.map_degree();
            let mut attained = false;
            for _ in 0..10 {
                let params = SegreParams::random_boundary(&mut rng, siegel.source_dim());
                let restricted = siegel.segre_restrict(&params).unwrap();
                assert!(
                    restricted.degree <= deg,
                    "{}: {} > {deg}",
                    entry.map.name,
                    restricted.degree
                );
                if restricted.degree == deg {
                    attained = true;
                }
            }
            assert!(
                attained,
                "{}: degree never attained on sample",
                entry.map.name
            );
        }
    }

    #[test]
    fn g_slot_vanishes_along_origin_segre() {
        // an origin-preserving proper Siegel map has its w-slot numerator
        // vanishing identically along {w = 0}; recenter conjugates that do
        // not already fix the origin
        for entry in catalog() {
            let siegel = entry.map.cayley_conjugate().unwrap();
            let centered = siegel.recentered_at_origin().unwrap();
            for c in centered.components() {
                assert!(c.poly.constant_term().is_zero());
            }
            centered.propriety_check_siegel().unwrap_or_else(|e| {
                panic!("{} recentered is not proper: {e}", entry.map.name)
            });
            let restricted = centered
                .segre_restrict(&SegreParams::origin(centered.source_dim()))
                .unwrap();
            let g = &restricted.numerators.last().unwrap().poly;
            assert!(
                g.is_zero(),
                "{}: w-slot does not vanish along the origin Segre variety",
                entry.map.name
            );
        }
    }

    #[test]
    fn map_json_round_trip() {
        for entry in catalog() {
            let json = entry.map.to_json();
            let text = serde_json::to_string(&json).unwrap();
            let parsed: MapJson = serde_json::from_str(&text).unwrap();
            let back = RationalMap::from_json(&parsed).unwrap();
            assert_eq!(back.components(), entry.map.components());
            assert_eq!(back.denominator(), entry.map.denominator());
        }
    }
}
