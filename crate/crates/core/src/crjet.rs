//! Jet-level pipeline for maximal-geometric-rank map germs.
//!
//! From the order-2 Taylor data of a normalized map germ this module builds
//! the matrices that describe the map along the Segre variety through the
//! origin, certifies the structural identities of their homogeneous parts,
//! computes the exact degrees of `det B`, `(adj B) A`, and the restricted
//! numerator, and classifies every homogeneous column choice into the case
//! split that forces those degrees.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;


use crate::poly::{Degree, MultiPoly, PolyError, Var, VarRegistry, VarRole};
use crate::polymatrix::{
    scalar_rank, ColumnDecomposition, MatrixError, PolyMatrix,
};
use crate::sampling;
use crate::scalar::{ratio, GaussianRational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("geometric rank {kappa0} is outside [0, {max}]")]
    InvalidRank { kappa0: usize, max: usize },
    #[error("jet invariant violated: {0}")]
    JetInvariantViolated(String),
    #[error("operation requires maximal geometric rank (kappa0 = n-1), got {0}")]
    UnsupportedRank(usize),
    #[error("unsupported sampling mode: {0}")]
    UnsupportedMode(String),
    #[error("matrix B is singular")]
    SingularB,
    #[error("multi-index has {got} entries, expected {want}")]
    IndexLengthMismatch { want: usize, got: usize },
    #[error("malformed jet data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `P(n, kappa0) = kappa0 (2n - kappa0 - 1) / 2`, the number of index pairs.
pub fn pair_count(n: usize, kappa0: usize) -> usize {
    kappa0 * (2 * n - kappa0 - 1) / 2
}

/// Bookkeeping between double indices `(j,k)` and flat component indices.
///
/// Pairs are `(j,k)` with `1 <= j <= kappa0`, `j <= k <= n-1`, in row-major
/// order by default. Built for the minimal target dimension
/// `N = n + P(n, kappa0)`, where the secondary pair set is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    n: usize,
    kappa0: usize,
    pairs: Vec<(usize, usize)>,
}

impl IndexMap {
    pub fn build(n: usize, kappa0: usize) -> Result<Self, JetError> {
        if n < 2 {
            return Err(JetError::Malformed(format!("need n >= 2, got {n}")));
        }
        if kappa0 > n - 1 {
            return Err(JetError::InvalidRank {
                kappa0,
                max: n - 1,
            });
        }
        let mut pairs = Vec::new();
        for j in 1..=kappa0 {
            for k in j..=n - 1 {
                pairs.push((j, k));
            }
        }
        debug_assert_eq!(pairs.len(), pair_count(n, kappa0));
        Ok(IndexMap { n, kappa0, pairs })
    }

    /// Same pair set in a caller-chosen order; every pipeline invariant is
    /// independent of the order.
    pub fn build_permuted(
        n: usize,
        kappa0: usize,
        perm: &[usize],
    ) -> Result<Self, JetError> {
        let base = Self::build(n, kappa0)?;
        if perm.len() != base.pairs.len() {
            return Err(JetError::Malformed("permutation length mismatch".into()));
        }
        let mut seen = vec![false; perm.len()];
        let mut pairs = Vec::with_capacity(perm.len());
        for &p in perm {
            if p >= base.pairs.len() || seen[p] {
                return Err(JetError::Malformed("not a permutation".into()));
            }
            seen[p] = true;
            pairs.push(base.pairs[p]);
        }
        Ok(IndexMap {
            n,
            kappa0,
            pairs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa0(&self) -> usize {
        self.kappa0
    }

    /// `n' = n - 1`.
    pub fn n_prime(&self) -> usize {
        self.n - 1
    }

    /// `N' = N - n`, the number of pairs.
    pub fn big_n_prime(&self) -> usize {
        self.pairs.len()
    }

    /// Minimal target dimension `N = n + P(n, kappa0)`.
    pub fn target_dim(&self) -> usize {
        self.n + self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Flat index (1-based) of the pair `(j,k)`.
    pub fn iota(&self, j: usize, k: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (j, k)).map(|i| i + 1)
    }

    /// Pair for the flat index `l` (1-based).
    pub fn iota_inv(&self, l: usize) -> Option<(usize, usize)> {
        self.pairs.get(l.checked_sub(1)?).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JetMode {
    /// Coefficients drawn freely; only the nonvanishing constraints hold.
    Free,
    /// Real positive `mu` data with the square-sum compatibility relations
    /// and `lambda_j = i mu_j / 2`.
    Huang,
}

impl fmt::Display for JetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetMode::Free => write!(f, "free"),
            JetMode::Huang => write!(f, "huang"),
        }
    }
}

/// Order-2 Taylor data of a normalized map germ.
///
/// `lambda[j-1]` is the `z_j w` coefficient of the `f_j` component;
/// `mu[(j,k)]` the `z_j z_k` coefficient of the pair component;
/// `phi_lin[(j,k)][l-1]` its `z_l w` coefficient; `phi_w2[(j,k)]` its `w^2`
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedJet {
    n: usize,
    kappa0: usize,
    lambda: Vec<GaussianRational>,
    mu: BTreeMap<(usize, usize), GaussianRational>,
    phi_lin: BTreeMap<(usize, usize), Vec<GaussianRational>>,
    phi_w2: BTreeMap<(usize, usize), GaussianRational>,
    mode: JetMode,
}

impl NormalizedJet {
    pub fn new(
        n: usize,
        kappa0: usize,
        lambda: Vec<GaussianRational>,
        mu: BTreeMap<(usize, usize), GaussianRational>,
        phi_lin: BTreeMap<(usize, usize), Vec<GaussianRational>>,
        phi_w2: BTreeMap<(usize, usize), GaussianRational>,
        mode: JetMode,
    ) -> Result<Self, JetError> {
        let im = IndexMap::build(n, kappa0)?;
        if lambda.len() != n - 1 {
            return Err(JetError::JetInvariantViolated(format!(
                "lambda must have {} entries, got {}",
                n - 1,
                lambda.len()
            )));
        }
        for (j, l) in lambda.iter().enumerate() {
            let j = j + 1;
            if j <= kappa0 && l.is_zero() {
                return Err(JetError::JetInvariantViolated(format!(
                    "lambda_{j} must be nonzero for j <= kappa0"
                )));
            }
            if j > kappa0 && !l.is_zero() {
                return Err(JetError::JetInvariantViolated(format!(
                    "lambda_{j} must vanish for j > kappa0"
                )));
            }
        }
        for &(j, k) in im.pairs() {
            let Some(m) = mu.get(&(j, k)) else {
                return Err(JetError::JetInvariantViolated(format!(
                    "missing mu_({j},{k})"
                )));
            };
            if m.is_zero() {
                return Err(JetError::JetInvariantViolated(format!(
                    "mu_({j},{k}) must be nonzero"
                )));
            }
        }
        for key in mu.keys() {
            if im.iota(key.0, key.1).is_none() {
                return Err(JetError::JetInvariantViolated(format!(
                    "mu key {key:?} is not an index pair"
                )));
            }
        }
        for (key, v) in &phi_lin {
            if im.iota(key.0, key.1).is_none() {
                return Err(JetError::JetInvariantViolated(format!(
                    "phi_lin key {key:?} is not an index pair"
                )));
            }
            if v.len() != n - 1 {
                return Err(JetError::JetInvariantViolated(format!(
                    "phi_lin[{key:?}] must have {} entries",
                    n - 1
                )));
            }
        }
        for key in phi_w2.keys() {
            if im.iota(key.0, key.1).is_none() {
                return Err(JetError::JetInvariantViolated(format!(
                    "phi_w2 key {key:?} is not an index pair"
                )));
            }
        }
        let jet = NormalizedJet {
            n,
            kappa0,
            lambda,
            mu,
            phi_lin,
            phi_w2,
            mode,
        };
        if mode == JetMode::Huang {
            jet.check_huang_consistency()?;
        }
        Ok(jet)
    }

    /// `mu_jj` real positive, `mu_jk^2 = mu_jj^2 + mu_kk^2` for `j < k`, and
    /// `lambda_j = i mu_jj^2 / 2`.
    fn check_huang_consistency(&self) -> Result<(), JetError> {
        for (&(j, k), v) in &self.mu {
            if !v.is_positive_real() {
                return Err(JetError::JetInvariantViolated(format!(
                    "huang mode needs mu_({j},{k}) real positive"
                )));
            }
        }
        let half_i = GaussianRational::new(Rational::new(0.into(), 1.into()), ratio(1, 2));
        for j in 1..=self.kappa0 {
            let mu_jj = self.mu.get(&(j, j)).expect("validated").re().clone();
            let expect =
                &GaussianRational::from_rational(&mu_jj * &mu_jj) * &half_i;
            if self.lambda[j - 1] != expect {
                return Err(JetError::JetInvariantViolated(format!(
                    "huang mode needs lambda_{j} = i mu_{j}{j}^2 / 2"
                )));
            }
        }
        for (&(j, k), v) in &self.mu {
            if j == k {
                continue;
            }
            let a = self.mu.get(&(j, j)).expect("validated").re().clone();
            let b = self.mu.get(&(k, k)).expect("validated").re().clone();
            let lhs = v.re() * v.re();
            if lhs != &a * &a + &b * &b {
                return Err(JetError::JetInvariantViolated(format!(
                    "huang mode needs mu_({j},{k})^2 = mu_({j},{j})^2 + mu_({k},{k})^2"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa0(&self) -> usize {
        self.kappa0
    }

    pub fn mode(&self) -> JetMode {
        self.mode
    }

    pub fn lambda(&self, j: usize) -> &GaussianRational {
        &self.lambda[j - 1]
    }

    pub fn index_map(&self) -> Result<IndexMap, JetError> {
        IndexMap::build(self.n, self.kappa0)
    }

    fn phi_lin_coeff(&self, pair: (usize, usize), l: usize) -> GaussianRational {
        self.phi_lin
            .get(&pair)
            .map(|v| v[l - 1].clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    fn phi_w2_coeff(&self, pair: (usize, usize)) -> GaussianRational {
        self.phi_w2
            .get(&pair)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn to_json(&self) -> JetJson {
        let key = |&(j, k): &(usize, usize)| format!("{j},{k}");
        JetJson {
            n: self.n,
            kappa0: self.kappa0,
            lambda: self.lambda.iter().map(|l| l.to_string()).collect(),
            mu: self
                .mu
                .iter()
                .map(|(k, v)| (key(k), v.to_string()))
                .collect(),
            phi_lin: self
                .phi_lin
                .iter()
                .map(|(k, v)| (key(k), v.iter().map(|c| c.to_string()).collect()))
                .collect(),
            phi_w2: self
                .phi_w2
                .iter()
                .map(|(k, v)| (key(k), v.to_string()))
                .collect(),
            mode: self.mode,
        }
    }

    pub fn from_json(json: &JetJson) -> Result<Self, JetError> {
        fn parse_pair(s: &str) -> Result<(usize, usize), JetError> {
            let (a, b) = s
                .split_once(',')
                .ok_or_else(|| JetError::Malformed(format!("bad pair key {s:?}")))?;
            Ok((
                a.trim()
                    .parse()
                    .map_err(|_| JetError::Malformed(format!("bad pair key {s:?}")))?,
                b.trim()
                    .parse()
                    .map_err(|_| JetError::Malformed(format!("bad pair key {s:?}")))?,
            ))
        }
        fn parse_scalar(s: &str) -> Result<GaussianRational, JetError> {
            s.parse()
                .map_err(|_| JetError::Malformed(format!("bad scalar {s:?}")))
        }
        let lambda: Result<Vec<_>, _> =
            json.lambda.iter().map(|s| parse_scalar(s)).collect();
        let mut mu = BTreeMap::new();
        for (k, v) in &json.mu {
            mu.insert(parse_pair(k)?, parse_scalar(v)?);
        }
        let mut phi_lin = BTreeMap::new();
        for (k, v) in &json.phi_lin {
            let coeffs: Result<Vec<_>, _> = v.iter().map(|s| parse_scalar(s)).collect();
            phi_lin.insert(parse_pair(k)?, coeffs?);
        }
        let mut phi_w2 = BTreeMap::new();
        for (k, v) in &json.phi_w2 {
            phi_w2.insert(parse_pair(k)?, parse_scalar(v)?);
        }
        NormalizedJet::new(
            json.n,
            json.kappa0,
            lambda?,
            mu,
            phi_lin,
            phi_w2,
            json.mode,
        )
    }
}

/// Serialized jet: scalars in the textual `a/b+c/d*i` form, pair keys as
/// `"j,k"` strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JetJson {
    pub n: usize,
    pub kappa0: usize,
    pub lambda: Vec<String>,
    pub mu: BTreeMap<String, String>,
    #[serde(default)]
    pub phi_lin: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub phi_w2: BTreeMap<String, String>,
    pub mode: JetMode,
}

/// Variable registry with `eps1..eps{n'}`.
pub fn eps_registry(n_prime: usize) -> Arc<VarRegistry> {
    VarRegistry::block(&[("eps", VarRole::Epsilon, n_prime)])
}

fn eps_var(reg: &Arc<VarRegistry>, k: usize) -> Var {
    reg.var(&format!("eps{k}")).expect("eps variable")
}

/// The structural matrix `E` and column `e`: row `l` with pair `(p,q)` has
/// `E[l][k] = [q=k] eps_p + [p=k] eps_q` and `e[l] = 2 eps_p eps_q`.
/// They satisfy `sum_k eps_k E_k = e` exactly.
pub fn build_e_pair(im: &IndexMap) -> Result<(PolyMatrix, PolyMatrix), JetError> {
    if im.kappa0() != im.n() - 1 {
        return Err(JetError::UnsupportedRank(im.kappa0()));
    }
    let np = im.n_prime();
    let reg = eps_registry(np);
    let e_mat = PolyMatrix::from_fn(&reg, im.big_n_prime(), np, |row, col| {
        let (p, q) = im.iota_inv(row + 1).expect("row in range");
        let k = col + 1;
        let mut entry = MultiPoly::zero(&reg);
        if q == k {
            entry = &entry + &MultiPoly::var(&reg, eps_var(&reg, p));
        }
        if p == k {
            entry = &entry + &MultiPoly::var(&reg, eps_var(&reg, q));
        }
        entry
    });
    let e_vec = PolyMatrix::from_fn(&reg, im.big_n_prime(), 1, |row, _| {
        let (p, q) = im.iota_inv(row + 1).expect("row in range");
        MultiPoly::monomial(
            &reg,
            &[(eps_var(&reg, p), 1), (eps_var(&reg, q), 1)],
            GaussianRational::from_int(2),
        )
    });
    Ok((e_mat, e_vec))
}

/// All matrices describing the jet along the Segre variety through 0.
#[derive(Debug, Clone)]
pub struct JetMatrices {
    index_map: IndexMap,
    registry: Arc<VarRegistry>,
    e_mat: PolyMatrix,
    e_vec: PolyMatrix,
    a: PolyMatrix,
    b: PolyMatrix,
    c: PolyMatrix,
    d: PolyMatrix,
    lambda: Vec<GaussianRational>,
    phi_lin: Vec<Vec<GaussianRational>>,
    phi_w2: Vec<GaussianRational>,
}

impl JetMatrices {
    pub fn index_map(&self) -> &IndexMap {
        &self.index_map
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn e_mat(&self) -> &PolyMatrix {
        &self.e_mat
    }

    pub fn e_vec(&self) -> &PolyMatrix {
        &self.e_vec
    }

    pub fn a(&self) -> &PolyMatrix {
        &self.a
    }

    pub fn b(&self) -> &PolyMatrix {
        &self.b
    }

    pub fn c(&self) -> &PolyMatrix {
        &self.c
    }

    pub fn d(&self) -> &PolyMatrix {
        &self.d
    }

    /// `phi^(k)` as a column vector (entries indexed by pair).
    pub fn phi_col(&self, k: usize) -> Vec<GaussianRational> {
        self.phi_lin.iter().map(|row| row[k - 1].clone()).collect()
    }

    pub fn phi_w2_col(&self) -> &[GaussianRational] {
        &self.phi_w2
    }

    pub fn lambda(&self, j: usize) -> &GaussianRational {
        &self.lambda[j - 1]
    }

    /// Entrywise homogeneous part of `B` of the given degree in eps.
    pub fn b_homogeneous(&self, d: usize) -> PolyMatrix {
        let vars = self.registry.all_vars();
        PolyMatrix::from_fn(
            &self.registry,
            self.b.rows(),
            self.b.cols(),
            |r, c| self.b.entry(r, c).homogeneous_part(d, &vars),
        )
    }

    /// Per-column homogeneous decomposition of `B` into the degree 0, 1, 2
    /// parts (possibly zero).
    pub fn b_homogeneous_decompositions(&self) -> Vec<ColumnDecomposition> {
        let vars = self.registry.all_vars();
        (0..self.b.cols())
            .map(|c| {
                let col = self.b.column(c).expect("column in range");
                let parts: Vec<Vec<MultiPoly>> = (0..=2)
                    .map(|d| {
                        col.iter()
                            .map(|p| p.homogeneous_part(d, &vars))
                            .collect()
                    })
                    .collect();
                ColumnDecomposition { col: c, parts }
            })
            .collect()
    }

    /// Column `k` of `B_I` for one homogeneous choice (None = zero column).
    fn b_column_part(&self, k: usize, choice: ColumnChoice) -> Vec<MultiPoly> {
        let vars = self.registry.all_vars();
        let col = self.b.column(k).expect("column in range");
        match choice {
            ColumnChoice::ZeroColumn => {
                vec![MultiPoly::zero(&self.registry); self.b.rows()]
            }
            ColumnChoice::Homogeneous(d) => col
                .iter()
                .map(|p| p.homogeneous_part(d as usize, &vars))
                .collect(),
        }
    }

    /// Builds `B_I` from one homogeneous choice per column.
    pub fn b_for_multi_index(&self, idx: &MultiIndex) -> Result<PolyMatrix, JetError> {
        if idx.0.len() != self.b.cols() {
            return Err(JetError::IndexLengthMismatch {
                want: self.b.cols(),
                got: idx.0.len(),
            });
        }
        let mut m = self.b.clone();
        for (k, &choice) in idx.0.iter().enumerate() {
            m = m.with_column(k, &self.b_column_part(k, choice))?;
        }
        Ok(m)
    }
}

/// Builds the Segre-side matrices of a maximal-rank jet:
/// `A` and `B` collect the second-order coefficients, `C = [[I,0],[A,B]]`,
/// and `D = (1/2i) [eps; 0]`.
pub fn build_matrices(jet: &NormalizedJet) -> Result<JetMatrices, JetError> {
    build_matrices_with_index_map(jet, &jet.index_map()?)
}

/// Same as [`build_matrices`] with a caller-supplied pair ordering.
pub fn build_matrices_with_index_map(
    jet: &NormalizedJet,
    im: &IndexMap,
) -> Result<JetMatrices, JetError> {
    if jet.kappa0 != jet.n - 1 {
        return Err(JetError::UnsupportedRank(jet.kappa0));
    }
    if im.n() != jet.n || im.kappa0() != jet.kappa0 {
        return Err(JetError::Malformed("index map does not match jet".into()));
    }
    let np = im.n_prime();
    let nn = im.big_n_prime();
    let (e_mat, e_vec) = {
        // rebuild E/e in the supplied ordering
        let reg = eps_registry(np);
        let e_mat = PolyMatrix::from_fn(&reg, nn, np, |row, col| {
            let (p, q) = im.iota_inv(row + 1).expect("row in range");
            let k = col + 1;
            let mut entry = MultiPoly::zero(&reg);
            if q == k {
                entry = &entry + &MultiPoly::var(&reg, eps_var(&reg, p));
            }
            if p == k {
                entry = &entry + &MultiPoly::var(&reg, eps_var(&reg, q));
            }
            entry
        });
        let e_vec = PolyMatrix::from_fn(&reg, nn, 1, |row, _| {
            let (p, q) = im.iota_inv(row + 1).expect("row in range");
            MultiPoly::monomial(
                &reg,
                &[(eps_var(&reg, p), 1), (eps_var(&reg, q), 1)],
                GaussianRational::from_int(2),
            )
        });
        (e_mat, e_vec)
    };
    let reg = Arc::clone(e_mat.registry());

    // lambda_{jk}: 2 mu_jj on the diagonal pairs, mu_jk otherwise
    let lambda_pair = |j: usize, k: usize| -> GaussianRational {
        let m = jet.mu.get(&(j, k)).expect("validated").clone();
        if j == k {
            &m * &GaussianRational::from_int(2)
        } else {
            m
        }
    };

    let phi_lin: Vec<Vec<GaussianRational>> = im
        .pairs()
        .iter()
        .map(|&pair| {
            (1..=np)
                .map(|l| jet.phi_lin_coeff(pair, l))
                .collect()
        })
        .collect();
    let phi_w2: Vec<GaussianRational> =
        im.pairs().iter().map(|&pair| jet.phi_w2_coeff(pair)).collect();

    // B[row=(j,k)][col=l] = lambda_jk [row=l]
    //   + eps_j phi^(k)_l + eps_k phi^(j)_l + 2 eps_j eps_k phi^(0)_l
    let b = PolyMatrix::from_fn(&reg, nn, nn, |row, col| {
        let (j, k) = im.iota_inv(row + 1).expect("row in range");
        let mut entry = MultiPoly::zero(&reg);
        if row == col {
            entry = &entry + &MultiPoly::constant(&reg, lambda_pair(j, k));
        }
        let phi_k_l = phi_lin[col][k - 1].clone();
        let phi_j_l = phi_lin[col][j - 1].clone();
        entry = &entry
            + &MultiPoly::monomial(&reg, &[(eps_var(&reg, j), 1)], phi_k_l);
        entry = &entry
            + &MultiPoly::monomial(&reg, &[(eps_var(&reg, k), 1)], phi_j_l);
        let quad = &phi_w2[col] * &GaussianRational::from_int(2);
        entry = &entry
            + &MultiPoly::monomial(
                &reg,
                &[(eps_var(&reg, j), 1), (eps_var(&reg, k), 1)],
                quad,
            );
        entry
    });

    // A[row=(j,k)][col=m] = lambda_j eps_k [m=j] + lambda_k eps_j [m=k]
    let a = PolyMatrix::from_fn(&reg, nn, np, |row, col| {
        let (j, k) = im.iota_inv(row + 1).expect("row in range");
        let m = col + 1;
        let mut entry = MultiPoly::zero(&reg);
        if m == j {
            entry = &entry
                + &MultiPoly::monomial(
                    &reg,
                    &[(eps_var(&reg, k), 1)],
                    jet.lambda(j).clone(),
                );
        }
        if m == k {
            entry = &entry
                + &MultiPoly::monomial(
                    &reg,
                    &[(eps_var(&reg, j), 1)],
                    jet.lambda(k).clone(),
                );
        }
        entry
    });

    let c = PolyMatrix::from_fn(&reg, np + nn, np + nn, |r, col| {
        if r < np {
            if r == col {
                MultiPoly::one(&reg)
            } else {
                MultiPoly::zero(&reg)
            }
        } else if col < np {
            a.entry(r - np, col).clone()
        } else {
            b.entry(r - np, col - np).clone()
        }
    });

    let d = PolyMatrix::from_fn(&reg, np + nn, 1, |r, _| {
        if r < np {
            MultiPoly::monomial(
                &reg,
                &[(eps_var(&reg, r + 1), 1)],
                GaussianRational::inv_two_i(),
            )
        } else {
            MultiPoly::zero(&reg)
        }
    });

    Ok(JetMatrices {
        index_map: im.clone(),
        registry: reg,
        e_mat,
        e_vec,
        a,
        b,
        c,
        d,
        lambda: jet.lambda.clone(),
        phi_lin,
        phi_w2,
    })
}

/// The rank matrix of the second-order jet data: the diagonal matrix of
/// `mu_j = -2i lambda_j`, whose rank is the geometric rank of the germ.
pub fn geometric_rank_matrix(jet: &NormalizedJet) -> Result<(PolyMatrix, usize), JetError> {
    let np = jet.n - 1;
    let reg = eps_registry(np);
    let minus_two_i = -GaussianRational::two_i();
    let diag: Vec<GaussianRational> = jet
        .lambda
        .iter()
        .map(|l| l * &minus_two_i)
        .collect();
    let m = PolyMatrix::from_fn(&reg, np, np, |r, c| {
        if r == c {
            MultiPoly::constant(&reg, diag[r].clone())
        } else {
            MultiPoly::zero(&reg)
        }
    });
    let point = vec![GaussianRational::zero(); reg.len()];
    let evaluated = m.eval_at(&point)?;
    let (rank, _, _) = scalar_rank(&evaluated);
    Ok((m, rank))
}

/// The map along the Segre variety through the origin, with denominators
/// cleared: components are `prefactor * numerator[i] / denominator`.
#[derive(Debug, Clone)]
pub struct SegreRestriction {
    /// `[det B * eps; -(adj B) A eps]`, length `n' + N'`.
    pub numerator: Vec<MultiPoly>,
    /// `det B`.
    pub denominator: MultiPoly,
    /// `1/(2i)`.
    pub prefactor: GaussianRational,
    /// The final (w-slot) component of the restricted map is identically 0.
    pub g_component_is_zero: bool,
    /// `C * numerator = 2i det B * D` verified exactly.
    pub cross_check_holds: bool,
}

pub fn segre_restriction(jm: &JetMatrices) -> Result<SegreRestriction, JetError> {
    let det_b = jm.b.det()?;
    if det_b.is_zero() {
        return Err(JetError::SingularB);
    }
    let np = jm.index_map.n_prime();
    let reg = &jm.registry;
    let eps_col = PolyMatrix::from_fn(reg, np, 1, |r, _| {
        MultiPoly::var(reg, eps_var(reg, r + 1))
    });
    let adj_b = jm.b.adjugate()?;
    let adj_b_a_eps = adj_b.mul(&jm.a)?.mul(&eps_col)?;
    let mut numerator = Vec::with_capacity(np + jm.index_map.big_n_prime());
    for r in 0..np {
        numerator.push(eps_col.entry(r, 0) * &det_b);
    }
    for r in 0..jm.index_map.big_n_prime() {
        numerator.push(adj_b_a_eps.entry(r, 0).neg());
    }
    // C * numerator should equal (2i det B) * D
    let num_col = PolyMatrix::new(
        reg,
        numerator.len(),
        1,
        numerator.clone(),
    )?;
    let lhs = jm.c.mul(&num_col)?;
    let scale = det_b.scale(&GaussianRational::two_i());
    let rhs = jm.d.scale_poly(&scale);
    let cross_check_holds = lhs == rhs;
    Ok(SegreRestriction {
        numerator,
        denominator: det_b,
        prefactor: GaussianRational::inv_two_i(),
        g_component_is_zero: true,
        cross_check_holds,
    })
}

/// How the degrees in a verdict were computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    /// Full symbolic determinants and adjugates.
    Exact,
    /// Degrees read off a random-line restriction (used for large `N'`);
    /// correct with overwhelming probability, never an overestimate.
    LineProbe,
}

/// Exact degrees of the Segre-side data and the bound checks.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeVerdict {
    pub n: usize,
    pub n_prime: usize,
    pub big_n_prime: usize,
    pub method: VerdictMethod,
    pub deg_det_b: Degree,
    pub deg_adj_b_a: Degree,
    pub deg_segre_numerator: Degree,
    /// `deg det B <= n`.
    pub det_b_bound_holds: bool,
    /// `deg (adj B) A <= n`.
    pub adj_b_a_bound_holds: bool,
    /// numerator degree `<= n + 1`.
    pub segre_bound_holds: bool,
    /// `2^{N'}` and `2^{N'-1} + 1`, the coarse counting bounds.
    pub weak_det_bound: u64,
    pub weak_adj_a_bound: u64,
    pub weak_bounds_hold: bool,
    #[serde(serialize_with = "serialize_scalar")]
    pub det_b_constant_term: GaussianRational,
    pub det_b_constant_nonzero: bool,
    /// Product of all `N'` diagonal pair coefficients; the constant term of
    /// `det B` equals it.
    #[serde(serialize_with = "serialize_scalar")]
    pub diagonal_product: GaussianRational,
    pub constant_term_matches_product: bool,
    /// Degrees are unchanged by the linear substitution eps -> 2i zeta.
    pub zeta_degrees_match: bool,
}

fn serialize_scalar<S: serde::Serializer>(
    v: &GaussianRational,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Max total degree over a matrix product `(adj B) A`.
fn matrix_degree(m: &PolyMatrix) -> Degree {
    m.max_entry_degree()
}

pub fn degree_verdict(jet: &NormalizedJet) -> Result<DegreeVerdict, JetError> {
    let jm = build_matrices(jet)?;
    degree_verdict_from_matrices(&jm)
}

pub fn degree_verdict_from_matrices(jm: &JetMatrices) -> Result<DegreeVerdict, JetError> {
    let im = &jm.index_map;
    let nn = im.big_n_prime();
    if nn > 6 {
        return line_probe_verdict(jm);
    }
    let restriction = segre_restriction(jm)?;
    if !restriction.cross_check_holds {
        return Err(JetError::Malformed(
            "Segre restriction failed its cross-check".into(),
        ));
    }
    let det_b = &restriction.denominator;
    let adj_b_a = jm.b.adjugate()?.mul(&jm.a)?;
    let deg_det_b = det_b.total_degree_all();
    let deg_adj_b_a = matrix_degree(&adj_b_a);
    let deg_segre_numerator = restriction
        .numerator
        .iter()
        .map(|p| p.total_degree_all())
        .max()
        .unwrap_or(Degree::NegInfinity);

    // degrees are invariant under the linear substitution eps_k -> 2i eps_k
    // (the change of variable back to the conjugated target coordinates)
    let reg = &jm.registry;
    let two_i = GaussianRational::two_i();
    let bindings: BTreeMap<Var, MultiPoly> = reg
        .all_vars()
        .into_iter()
        .map(|v| (v, MultiPoly::var(reg, v).scale(&two_i)))
        .collect();
    let zeta_degrees_match = det_b.substitute(&bindings)?.total_degree_all()
        == deg_det_b
        && restriction
            .numerator
            .iter()
            .map(|p| {
                p.substitute(&bindings)
                    .map(|q| q.total_degree_all())
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .unwrap_or(Degree::NegInfinity)
            == deg_segre_numerator;

    finish_verdict(
        jm,
        VerdictMethod::Exact,
        deg_det_b,
        deg_adj_b_a,
        deg_segre_numerator,
        det_b.constant_term(),
        zeta_degrees_match,
    )
}

/// Degree probe on a random line through the origin, for matrices too large
/// to expand symbolically. Homogeneous parts map to distinct powers of the
/// line parameter, so degrees restrict faithfully for generic directions.
fn line_probe_verdict(jm: &JetMatrices) -> Result<DegreeVerdict, JetError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_11ee);
    let reg = &jm.registry;
    let nvars = reg.len();
    let base = vec![GaussianRational::zero(); nvars];
    let dir: Vec<GaussianRational> = (0..nvars)
        .map(|_| {
            GaussianRational::new(
                ratio(rng.gen_range(1..=40), 1),
                ratio(rng.gen_range(1..=40), 1),
            )
        })
        .collect();
    let det_line = jm.b.det_on_line(&base, &dir, &mut rng)?;
    if det_line.is_zero() {
        return Err(JetError::SingularB);
    }
    let deg_det_b = det_line.degree();

    // interpolate each entry of (adj B) A on the same line
    let nn = jm.index_map.big_n_prime();
    let np = jm.index_map.n_prime();
    let degree_budget = 2 * (nn - 1) + 1;
    let ts: Vec<GaussianRational> = (0..=degree_budget as i64)
        .map(GaussianRational::from_int)
        .collect();
    let mut samples: Vec<Vec<Vec<GaussianRational>>> = Vec::with_capacity(ts.len());
    for t in &ts {
        let point: Vec<GaussianRational> =
            dir.iter().map(|d| d * t).collect();
        let b_at = jm.b.eval_at(&point)?;
        let a_at = jm.a.eval_at(&point)?;
        let adj_at = scalar_adjugate(&b_at);
        // (adj B) A at the point
        let mut prod = vec![vec![GaussianRational::zero(); np]; nn];
        for (r, prod_row) in prod.iter_mut().enumerate() {
            for (c, cell) in prod_row.iter_mut().enumerate() {
                for k in 0..nn {
                    *cell = &*cell + &(&adj_at[r][k] * &a_at[k][c]);
                }
            }
        }
        samples.push(prod);
    }
    let mut deg_adj_b_a = Degree::NegInfinity;
    let mut adj_a_entries: Vec<Vec<crate::poly::univariate::UniPoly>> = Vec::new();
    for r in 0..nn {
        let mut row = Vec::new();
        for c in 0..np {
            let pts: Vec<(GaussianRational, GaussianRational)> = ts
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), samples[i][r][c].clone()))
                .collect();
            let entry = crate::poly::univariate::UniPoly::interpolate(&pts);
            deg_adj_b_a = deg_adj_b_a.max(entry.degree());
            row.push(entry);
        }
        adj_a_entries.push(row);
    }
    // numerator degree on the line: det B * eps has degree deg+1; the second
    // block is (adj B) A eps with eps restricted to t * dir
    let mut deg_segre_numerator = match deg_det_b {
        Degree::Finite(d) => Degree::Finite(d + 1),
        Degree::NegInfinity => Degree::NegInfinity,
    };
    for row in &adj_a_entries {
        let mut acc = crate::poly::univariate::UniPoly::zero();
        for (c, entry) in row.iter().enumerate() {
            let lin = crate::poly::univariate::UniPoly::from_coeffs(vec![
                GaussianRational::zero(),
                dir[c].clone(),
            ]);
            acc = acc.add(&entry.mul(&lin));
        }
        deg_segre_numerator = deg_segre_numerator.max(acc.degree());
    }

    let constant = det_line.coeffs().first().cloned().unwrap_or_else(GaussianRational::zero);
    finish_verdict(
        jm,
        VerdictMethod::LineProbe,
        deg_det_b,
        deg_adj_b_a,
        deg_segre_numerator,
        constant,
        true,
    )
}

fn finish_verdict(
    jm: &JetMatrices,
    method: VerdictMethod,
    deg_det_b: Degree,
    deg_adj_b_a: Degree,
    deg_segre_numerator: Degree,
    det_b_constant_term: GaussianRational,
    zeta_degrees_match: bool,
) -> Result<DegreeVerdict, JetError> {
    let im = &jm.index_map;
    let n = im.n();
    let nn = im.big_n_prime();
    // product of the diagonal entries of the constant part of B
    let mut diagonal_product = GaussianRational::one();
    for l in 1..=nn {
        let entry = jm.b.entry(l - 1, l - 1).constant_term();
        diagonal_product = &diagonal_product * &entry;
    }
    let weak_det_bound = 1u64 << nn.min(62);
    let weak_adj_a_bound = (1u64 << (nn - 1).min(62)) + 1;
    let weak_bounds_hold = deg_det_b.at_most(weak_det_bound as usize)
        && deg_adj_b_a.at_most(weak_adj_a_bound as usize);
    Ok(DegreeVerdict {
        n,
        n_prime: im.n_prime(),
        big_n_prime: nn,
        method,
        deg_det_b,
        deg_adj_b_a,
        deg_segre_numerator,
        det_b_bound_holds: deg_det_b.at_most(n),
        adj_b_a_bound_holds: deg_adj_b_a.at_most(n),
        segre_bound_holds: deg_segre_numerator.at_most(n + 1),
        weak_det_bound,
        weak_adj_a_bound,
        weak_bounds_hold,
        det_b_constant_nonzero: !det_b_constant_term.is_zero(),
        constant_term_matches_product: det_b_constant_term == diagonal_product,
        det_b_constant_term,
        diagonal_product,
        zeta_degrees_match,
    })
}

/// Exact adjugate of a scalar matrix via signed minors.
fn scalar_adjugate(m: &[Vec<GaussianRational>]) -> Vec<Vec<GaussianRational>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![GaussianRational::one()]];
    }
    let mut adj = vec![vec![GaussianRational::zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            let minor: Vec<Vec<GaussianRational>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != k)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let det = crate::polymatrix::scalar_det(minor);
            adj[k][j] = if (j + k) % 2 == 0 { det } else { -det };
        }
    }
    adj
}

// ---------------------------------------------------------------------------
// case analysis over homogeneous column choices
// ---------------------------------------------------------------------------

/// One column's contribution to a multi-index: a homogeneous degree or the
/// zero column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnChoice {
    ZeroColumn,
    Homogeneous(u8),
}

impl fmt::Display for ColumnChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnChoice::ZeroColumn => write!(f, "-inf"),
            ColumnChoice::Homogeneous(d) => write!(f, "{d}"),
        }
    }
}

/// A choice of homogeneous degree (or zero column) per column of `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(pub Vec<ColumnChoice>);

impl MultiIndex {
    pub fn from_degrees(degrees: &[u8]) -> Self {
        MultiIndex(
            degrees
                .iter()
                .map(|&d| ColumnChoice::Homogeneous(d))
                .collect(),
        )
    }

    /// Number of columns with degree at least 1.
    pub fn n_ge1(&self) -> usize {
        self.0
            .iter()
            .filter(|c| matches!(c, ColumnChoice::Homogeneous(d) if *d >= 1))
            .count()
    }

    /// Number of columns with degree exactly 2.
    pub fn n2(&self) -> usize {
        self.0
            .iter()
            .filter(|c| matches!(c, ColumnChoice::Homogeneous(2)))
            .count()
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, ColumnChoice::ZeroColumn))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Every multi-index over `{0,1,2}` (plus the zero column when requested).
pub fn enumerate_multi_indices(len: usize, include_zero_column: bool) -> Vec<MultiIndex> {
    let choices: Vec<ColumnChoice> = if include_zero_column {
        vec![
            ColumnChoice::Homogeneous(0),
            ColumnChoice::Homogeneous(1),
            ColumnChoice::Homogeneous(2),
            ColumnChoice::ZeroColumn,
        ]
    } else {
        vec![
            ColumnChoice::Homogeneous(0),
            ColumnChoice::Homogeneous(1),
            ColumnChoice::Homogeneous(2),
        ]
    };
    let mut out = Vec::new();
    let mut stack = vec![Vec::with_capacity(len)];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == len {
            out.push(MultiIndex(prefix));
            continue;
        }
        for &c in choices.iter().rev() {
            let mut next = prefix.clone();
            next.push(c);
            stack.push(next);
        }
    }
    out
}

pub fn random_multi_index(
    rng: &mut impl Rng,
    len: usize,
    include_zero_column: bool,
) -> MultiIndex {
    MultiIndex(
        (0..len)
            .map(|_| {
                let top = if include_zero_column { 4 } else { 3 };
                match rng.gen_range(0..top) {
                    0 => ColumnChoice::Homogeneous(0),
                    1 => ColumnChoice::Homogeneous(1),
                    2 => ColumnChoice::Homogeneous(2),
                    _ => ColumnChoice::ZeroColumn,
                }
            })
            .collect(),
    )
}

/// Determinant-side case split for one multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetCase {
    /// A column is the zero column, so the determinant vanishes.
    ZeroColumn,
    /// At least `n` nonconstant columns sit inside the `n-1`-dimensional
    /// column span of `E`: the determinant vanishes.
    Case1,
    /// At least two columns are multiples of `e`: the determinant vanishes.
    Case2,
    /// Few nonconstant columns: the degree is at most `n_ge1 + n2 <= n`.
    Case3 { degree_bound: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct DetCaseReport {
    pub index: String,
    pub n_ge1: usize,
    pub n2: usize,
    pub case: DetCase,
}

pub fn classify_det(im: &IndexMap, idx: &MultiIndex) -> Result<DetCaseReport, JetError> {
    if idx.0.len() != im.big_n_prime() {
        return Err(JetError::IndexLengthMismatch {
            want: im.big_n_prime(),
            got: idx.0.len(),
        });
    }
    let n = im.n();
    let n_ge1 = idx.n_ge1();
    let n2 = idx.n2();
    let case = if !idx.zero_columns().is_empty() {
        DetCase::ZeroColumn
    } else if n_ge1 >= n {
        DetCase::Case1
    } else if n2 >= 2 {
        DetCase::Case2
    } else {
        DetCase::Case3 {
            degree_bound: n_ge1 + n2,
        }
    };
    Ok(DetCaseReport {
        index: idx.label(),
        n_ge1,
        n2,
        case,
    })
}

/// Adjugate-side prediction for one row of `(adj B_I) A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjRowPrediction {
    /// Every minor `M[j,k]` retains a zero column or two multiples of `e`,
    /// so the whole adjugate row vanishes.
    RowOfAdjVanishes,
    /// The nonconstant columns fill the span of `E`, so the row of
    /// `(adj M) E` (hence of `(adj M) A`) vanishes.
    RowKillsSpan,
    /// Direct degree count bounds the row of `(adj M) A`.
    DegreeAtMost(usize),
}

/// Adjugate-side case split for one multi-index.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjCase {
    /// `n_ge1 >= n` forces rank `<= N'-1`; either the adjugate vanishes or
    /// its single rank-one factor kills the span of `E`. In both cases
    /// `(adj M) A = 0`.
    ProductVanishes,
    /// Per-row predictions.
    PerRow(Vec<AdjRowPrediction>),
}

#[derive(Debug, Clone, Serialize)]
pub struct AdjCaseReport {
    pub index: String,
    pub n_ge1: usize,
    pub n2: usize,
    pub case: AdjCase,
}

/// Case split for `(adj B_I) A`. The split refines the bare three-way split:
/// rows whose column is constant vanish only when the nonconstant columns
/// fill the span of `E` (`n_ge1 = n-1`) or two `e`-multiples survive
/// (`n2 >= 2`); otherwise the direct degree count already stays within `n`.
pub fn classify_adj(im: &IndexMap, idx: &MultiIndex) -> Result<AdjCaseReport, JetError> {
    if idx.0.len() != im.big_n_prime() {
        return Err(JetError::IndexLengthMismatch {
            want: im.big_n_prime(),
            got: idx.0.len(),
        });
    }
    let n = im.n();
    let nn = im.big_n_prime();
    let n_ge1 = idx.n_ge1();
    let n2 = idx.n2();
    let zero_cols = idx.zero_columns();

    if n_ge1 >= n {
        return Ok(AdjCaseReport {
            index: idx.label(),
            n_ge1,
            n2,
            case: AdjCase::ProductVanishes,
        });
    }

    let mut rows = Vec::with_capacity(nn);
    for k in 0..nn {
        let other_zero = zero_cols.iter().any(|&z| z != k);
        let pred = if other_zero {
            // some minor column is identically zero
            AdjRowPrediction::RowOfAdjVanishes
        } else {
            match idx.0[k] {
                ColumnChoice::ZeroColumn | ColumnChoice::Homogeneous(0) => {
                    if n2 >= 2 {
                        AdjRowPrediction::RowOfAdjVanishes
                    } else if n_ge1 == n - 1 {
                        AdjRowPrediction::RowKillsSpan
                    } else {
                        // n_ge1 <= n-2 and n2 <= 1
                        AdjRowPrediction::DegreeAtMost(n_ge1 + n2 + 1)
                    }
                }
                ColumnChoice::Homogeneous(ik) => {
                    let ik = ik as usize;
                    if n2 > ik {
                        // even after dropping column k, two e-multiples remain
                        AdjRowPrediction::RowOfAdjVanishes
                    } else {
                        AdjRowPrediction::DegreeAtMost(n_ge1 + n2 - ik + 1)
                    }
                }
            }
        };
        rows.push(pred);
    }
    Ok(AdjCaseReport {
        index: idx.label(),
        n_ge1,
        n2,
        case: AdjCase::PerRow(rows),
    })
}

/// Symbolic confirmation of one case prediction.
#[derive(Debug, Clone, Serialize)]
pub struct CaseVerification {
    pub index: String,
    pub confirmed: bool,
    pub detail: String,
}

/// Builds `B_I`, computes its determinant, and confirms the det-side
/// prediction (vanishing or degree bound).
pub fn verify_det_case(
    jm: &JetMatrices,
    idx: &MultiIndex,
) -> Result<CaseVerification, JetError> {
    let report = classify_det(&jm.index_map, idx)?;
    let b_i = jm.b_for_multi_index(idx)?;
    let det = b_i.det()?;
    let n = jm.index_map.n();
    let (confirmed, detail) = match report.case {
        DetCase::ZeroColumn | DetCase::Case1 | DetCase::Case2 => (
            det.is_zero(),
            format!("det B_I = 0 predicted, got degree {}", det.total_degree_all()),
        ),
        DetCase::Case3 { degree_bound } => {
            let deg = det.total_degree_all();
            (
                deg.at_most(degree_bound) && degree_bound <= n,
                format!("deg det B_I = {deg} <= {degree_bound} <= n"),
            )
        }
    };
    Ok(CaseVerification {
        index: idx.label(),
        confirmed,
        detail,
    })
}

/// Builds `B_I`, computes `(adj B_I) A`, and confirms the adjugate-side
/// prediction row by row.
pub fn verify_adj_case(
    jm: &JetMatrices,
    idx: &MultiIndex,
) -> Result<CaseVerification, JetError> {
    let report = classify_adj(&jm.index_map, idx)?;
    let b_i = jm.b_for_multi_index(idx)?;
    let adj = b_i.adjugate()?;
    let adj_a = adj.mul(&jm.a)?;
    let n = jm.index_map.n();
    match report.case {
        AdjCase::ProductVanishes => {
            let ok = adj_a.is_zero();
            Ok(CaseVerification {
                index: idx.label(),
                confirmed: ok,
                detail: if ok {
                    "(adj B_I) A = 0 as predicted".into()
                } else {
                    "(adj B_I) A != 0 against prediction".into()
                },
            })
        }
        AdjCase::PerRow(rows) => {
            let adj_e = adj.mul(&jm.e_mat)?;
            let mut confirmed = true;
            let mut detail = String::new();
            for (k, pred) in rows.iter().enumerate() {
                let row_zero_adj =
                    (0..adj.cols()).all(|c| adj.entry(k, c).is_zero());
                let row_zero_adj_e =
                    (0..adj_e.cols()).all(|c| adj_e.entry(k, c).is_zero());
                let row_deg = (0..adj_a.cols())
                    .map(|c| adj_a.entry(k, c).total_degree_all())
                    .max()
                    .unwrap_or(Degree::NegInfinity);
                let ok = match pred {
                    AdjRowPrediction::RowOfAdjVanishes => row_zero_adj,
                    AdjRowPrediction::RowKillsSpan => row_zero_adj_e,
                    AdjRowPrediction::DegreeAtMost(b) => {
                        row_deg.at_most(*b) && *b <= n
                    }
                };
                if !ok {
                    confirmed = false;
                    detail = format!(
                        "row {} failed {:?}: adj row zero = {row_zero_adj}, \
                         (adj)E row zero = {row_zero_adj_e}, row degree = {row_deg}",
                        k + 1,
                        pred
                    );
                    break;
                }
                // every prediction must also keep the overall bound
                if !row_deg.at_most(n) {
                    confirmed = false;
                    detail = format!("row {} exceeds degree {n}", k + 1);
                    break;
                }
            }
            if detail.is_empty() {
                detail = "all row predictions confirmed".into();
            }
            Ok(CaseVerification {
                index: idx.label(),
                confirmed,
                detail,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// structural identities
// ---------------------------------------------------------------------------

/// Exact checks of the homogeneous structure of `A` and `B`.
#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    /// `sum_k eps_k E_k = e`.
    pub eps_combination_is_e: bool,
    /// `B^{0}` is the diagonal of pair coefficients.
    pub b0_is_diagonal: bool,
    /// `B^{1} = sum_k E_k (phi^(k))^T`.
    pub b1_matches_structure: bool,
    /// `B^{2} = e (phi^(0))^T`.
    pub b2_matches_structure: bool,
    /// All 2x2 minors of `B^{2}` vanish (rank <= 1).
    pub b2_rank_at_most_one: bool,
    /// Every column of `B^{1}` and `B^{2}` lies in the column span of `E`,
    /// certified by vanishing `(n'+1)`-minors of `[E | column]`.
    pub b_columns_in_span_e: bool,
    /// `A_k = lambda_k E_k` for every `k`.
    pub a_columns_match: bool,
}

impl StructuralReport {
    pub fn all_hold(&self) -> bool {
        self.eps_combination_is_e
            && self.b0_is_diagonal
            && self.b1_matches_structure
            && self.b2_matches_structure
            && self.b2_rank_at_most_one
            && self.b_columns_in_span_e
            && self.a_columns_match
    }
}

pub fn structural_identities(jm: &JetMatrices) -> Result<StructuralReport, JetError> {
    let im = &jm.index_map;
    let reg = &jm.registry;
    let np = im.n_prime();
    let nn = im.big_n_prime();

    // sum_k eps_k E_k = e
    let mut combo = PolyMatrix::zero(reg, nn, 1);
    for k in 1..=np {
        let eps_k = MultiPoly::var(reg, eps_var(reg, k));
        let col = PolyMatrix::new(reg, nn, 1, jm.e_mat.column(k - 1)?)?;
        combo = combo.add(&col.scale_poly(&eps_k))?;
    }
    let eps_combination_is_e = combo == jm.e_vec;

    let b0 = jm.b_homogeneous(0);
    let mut b0_is_diagonal = true;
    for r in 0..nn {
        for c in 0..nn {
            let expected = if r == c {
                jm.b.entry(r, c).constant_term()
            } else {
                GaussianRational::zero()
            };
            if b0.entry(r, c) != &MultiPoly::constant(reg, expected) {
                b0_is_diagonal = false;
            }
        }
    }

    // B^{1} = sum_k E_k (phi^(k))^T
    let b1 = jm.b_homogeneous(1);
    let mut b1_expected = PolyMatrix::zero(reg, nn, nn);
    for k in 1..=np {
        let e_col = PolyMatrix::new(reg, nn, 1, jm.e_mat.column(k - 1)?)?;
        let phi_row = PolyMatrix::from_fn(reg, 1, nn, |_, c| {
            MultiPoly::constant(reg, jm.phi_col(k)[c].clone())
        });
        b1_expected = b1_expected.add(&e_col.mul(&phi_row)?)?;
    }
    let b1_matches_structure = b1 == b1_expected;

    // B^{2} = e (phi^(0))^T
    let b2 = jm.b_homogeneous(2);
    let phi0_row = PolyMatrix::from_fn(reg, 1, nn, |_, c| {
        MultiPoly::constant(reg, jm.phi_w2_col()[c].clone())
    });
    let b2_expected = jm.e_vec.mul(&phi0_row)?;
    let b2_matches_structure = b2 == b2_expected;

    // all 2x2 minors of B^{2} vanish
    let mut b2_rank_at_most_one = true;
    'outer: for r1 in 0..nn {
        for r2 in r1 + 1..nn {
            for c1 in 0..nn {
                for c2 in c1 + 1..nn {
                    let m = &(b2.entry(r1, c1) * b2.entry(r2, c2))
                        - &(b2.entry(r1, c2) * b2.entry(r2, c1));
                    if !m.is_zero() {
                        b2_rank_at_most_one = false;
                        break 'outer;
                    }
                }
            }
        }
    }

    // columns of B^{1} and B^{2} lie in the span of E's columns
    let mut b_columns_in_span_e = true;
    for part in [&b1, &b2] {
        for c in 0..nn {
            let col = part.column(c)?;
            if !column_in_span(&jm.e_mat, &col)? {
                b_columns_in_span_e = false;
            }
        }
    }

    // A_k = lambda_k E_k
    let mut a_columns_match = true;
    for k in 1..=np {
        let expected: Vec<MultiPoly> = jm
            .e_mat
            .column(k - 1)?
            .iter()
            .map(|p| p.scale(jm.lambda(k)))
            .collect();
        if jm.a.column(k - 1)? != expected {
            a_columns_match = false;
        }
    }

    Ok(StructuralReport {
        eps_combination_is_e,
        b0_is_diagonal,
        b1_matches_structure,
        b2_matches_structure,
        b2_rank_at_most_one,
        b_columns_in_span_e,
        a_columns_match,
    })
}

/// `col` lies in the column span of `m` over the rational function field,
/// certified by exact vanishing of all `(cols+1)`-minors of `[m | col]`.
fn column_in_span(m: &PolyMatrix, col: &[MultiPoly]) -> Result<bool, JetError> {
    let reg = m.registry();
    let rows = m.rows();
    let k = m.cols();
    if rows <= k {
        // no (k+1)-minors exist; the span condition is vacuous
        return Ok(true);
    }
    let augmented = PolyMatrix::from_fn(reg, rows, k + 1, |r, c| {
        if c < k {
            m.entry(r, c).clone()
        } else {
            col[r].clone()
        }
    });
    // all (k+1) x (k+1) minors must vanish
    let row_sets = row_combinations(rows, k + 1);
    for rs in row_sets {
        let minor = PolyMatrix::from_fn(reg, k + 1, k + 1, |r, c| {
            augmented.entry(rs[r], c).clone()
        });
        if !minor.det()?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn row_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// jet sampling
// ---------------------------------------------------------------------------

/// Integer edge triples whose pairwise square sums are perfect squares,
/// with the three cross diagonals; used for square-consistent sampling at
/// `n = 4`. Each row is `(a, b, c, d_ab, d_ac, d_bc)`.
const BRICKS: &[(i64, i64, i64, i64, i64, i64)] = &[
    (44, 117, 240, 125, 244, 267),
    (85, 132, 720, 157, 725, 732),
    (140, 480, 693, 500, 707, 843),
    (160, 231, 792, 281, 808, 825),
    (240, 252, 275, 348, 365, 373),
];

/// Samples a maximal-rank jet (`kappa0 = n-1`).
///
/// Free mode draws all coefficients at random (nonzero where the normal form
/// requires). Square-consistent mode additionally enforces the relations
/// `mu_jk = sqrt(mu_j + mu_k)`, `mu_jj = sqrt(mu_j)`, `lambda_j = i mu_j/2`
/// with everything rational; it is available for `n <= 4` (no integer
/// quadruple with all pairwise square sums square is known).
pub fn sample_jet(
    rng: &mut impl Rng,
    n: usize,
    mode: JetMode,
) -> Result<NormalizedJet, JetError> {
    if n < 2 {
        return Err(JetError::Malformed(format!("need n >= 2, got {n}")));
    }
    let kappa0 = n - 1;
    let im = IndexMap::build(n, kappa0)?;
    let mut phi_lin = BTreeMap::new();
    let mut phi_w2 = BTreeMap::new();
    for &pair in im.pairs() {
        let coeffs: Vec<GaussianRational> =
            (0..n - 1).map(|_| sampling::gaussian(rng)).collect();
        if coeffs.iter().any(|c| !c.is_zero()) {
            phi_lin.insert(pair, coeffs);
        }
        let w2 = sampling::gaussian(rng);
        if !w2.is_zero() {
            phi_w2.insert(pair, w2);
        }
    }
    match mode {
        JetMode::Free => {
            let lambda: Vec<GaussianRational> = (0..n - 1)
                .map(|_| sampling::nonzero_gaussian(rng))
                .collect();
            let mu: BTreeMap<(usize, usize), GaussianRational> = im
                .pairs()
                .iter()
                .map(|&p| (p, sampling::nonzero_gaussian(rng)))
                .collect();
            NormalizedJet::new(n, kappa0, lambda, mu, phi_lin, phi_w2, mode)
        }
        JetMode::Huang => {
            // diag entries a_j = mu_jj and cross entries c_jk = mu_jk with
            // c_jk^2 = a_j^2 + a_k^2, everything scaled by a random rational
            let (diag, cross): (Vec<Rational>, BTreeMap<(usize, usize), Rational>) =
                match n {
                    2 => {
                        let a = sampling::positive_rational(rng);
                        (vec![a], BTreeMap::new())
                    }
                    3 => {
                        let m = rng.gen_range(2i64..=6);
                        let k = rng.gen_range(1..m);
                        let mut legs = [m * m - k * k, 2 * m * k];
                        if rng.gen_bool(0.5) {
                            legs.swap(0, 1);
                        }
                        let hyp = m * m + k * k;
                        (
                            vec![ratio(legs[0], 1), ratio(legs[1], 1)],
                            BTreeMap::from([((1, 2), ratio(hyp, 1))]),
                        )
                    }
                    4 => {
                        let &(a, b, c, dab, dac, dbc) =
                            BRICKS.choose(rng).expect("non-empty table");
                        let mut order = [0usize, 1, 2];
                        order.shuffle(rng);
                        let edges = [a, b, c];
                        let diags = [[0, dab, dac], [dab, 0, dbc], [dac, dbc, 0]];
                        let diag: Vec<Rational> =
                            order.iter().map(|&i| ratio(edges[i], 1)).collect();
                        let mut cross = BTreeMap::new();
                        for j in 0..3 {
                            for k in j + 1..3 {
                                cross.insert(
                                    (j + 1, k + 1),
                                    ratio(diags[order[j]][order[k]], 1),
                                );
                            }
                        }
                        (diag, cross)
                    }
                    _ => {
                        return Err(JetError::UnsupportedMode(format!(
                            "square-consistent sampling needs n <= 4, got {n}"
                        )))
                    }
                };
            let scale = sampling::positive_rational(rng);
            let diag: Vec<Rational> = diag.into_iter().map(|a| &a * &scale).collect();
            let mut mu = BTreeMap::new();
            for (j, a) in diag.iter().enumerate() {
                mu.insert((j + 1, j + 1), GaussianRational::from_rational(a.clone()));
            }
            for ((j, k), c) in cross {
                mu.insert((j, k), GaussianRational::from_rational(&c * &scale));
            }
            let half_i = GaussianRational::new(ratio(0, 1), ratio(1, 2));
            let lambda: Vec<GaussianRational> = diag
                .iter()
                .map(|a| &GaussianRational::from_rational(a * a) * &half_i)
                .collect();
            NormalizedJet::new(n, kappa0, lambda, mu, phi_lin, phi_w2, mode)
        }
    }
}

/// A jet with the given real `mu` diagonal (entries may be zero beyond the
/// rank), in the convention `lambda_j = i mu_j / 2`. Pair data is filled
/// with square-consistent values where required.
pub fn jet_from_mu_profile(
    n: usize,
    mu_profile: &[Rational],
) -> Result<NormalizedJet, JetError> {
    if mu_profile.len() != n - 1 {
        return Err(JetError::Malformed(format!(
            "mu profile needs {} entries",
            n - 1
        )));
    }
    let kappa0 = mu_profile
        .iter()
        .take_while(|m| !num_traits::Zero::is_zero(*m))
        .count();
    if mu_profile[kappa0..]
        .iter()
        .any(|m| !num_traits::Zero::is_zero(m))
    {
        return Err(JetError::Malformed(
            "mu profile must be nonzero then zero".into(),
        ));
    }
    let im = IndexMap::build(n, kappa0)?;
    let half_i = GaussianRational::new(ratio(0, 1), ratio(1, 2));
    let lambda: Vec<GaussianRational> = mu_profile
        .iter()
        .map(|m| &GaussianRational::from_rational(m.clone()) * &half_i)
        .collect();
    // any nonzero pair data satisfies the normal form; use 1
    let mu: BTreeMap<(usize, usize), GaussianRational> = im
        .pairs()
        .iter()
        .map(|&p| (p, GaussianRational::one()))
        .collect();
    NormalizedJet::new(
        n,
        kappa0,
        lambda,
        mu,
        BTreeMap::new(),
        BTreeMap::new(),
        JetMode::Free,
    )
}

/// The worked 1x1 example: `lambda_1 = i`, `mu_11 = 1`, both linear and
/// quadratic pair coefficients equal to 1.
pub fn worked_example_jet() -> NormalizedJet {
    NormalizedJet::new(
        2,
        1,
        vec![GaussianRational::i()],
        BTreeMap::from([((1, 1), GaussianRational::one())]),
        BTreeMap::from([((1, 1), vec![GaussianRational::one()])]),
        BTreeMap::from([((1, 1), GaussianRational::one())]),
        JetMode::Free,
    )
    .expect("valid worked example")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatrix::det_multilinear_expansion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_map_small_cases() {
        let im = IndexMap::build(2, 1).unwrap();
        assert_eq!(im.pairs(), &[(1, 1)]);
        assert_eq!(im.big_n_prime(), 1);
        assert_eq!(pair_count(2, 1), 1);

        let im = IndexMap::build(3, 2).unwrap();
        assert_eq!(im.pairs(), &[(1, 1), (1, 2), (2, 2)]);
        assert_eq!(im.big_n_prime(), 3);
        assert_eq!(im.target_dim(), 6);

        let im = IndexMap::build(4, 3).unwrap();
        assert_eq!(im.big_n_prime(), 6);

        assert!(matches!(
            IndexMap::build(3, 5),
            Err(JetError::InvalidRank { .. })
        ));
    }

    #[test]
    fn index_map_bijection_round_trips() {
        for n in 2..=5 {
            for kappa0 in 0..n {
                let im = IndexMap::build(n, kappa0).unwrap();
                for l in 1..=im.big_n_prime() {
                    let (j, k) = im.iota_inv(l).unwrap();
                    assert_eq!(im.iota(j, k), Some(l));
                }
                assert_eq!(im.big_n_prime(), pair_count(n, kappa0));
                assert!(im.target_dim() >= n + pair_count(n, kappa0));
            }
        }
    }

    #[test]
    fn e_pair_small_cases() {
        let im = IndexMap::build(2, 1).unwrap();
        let (e_mat, e_vec) = build_e_pair(&im).unwrap();
        let reg = Arc::clone(e_mat.registry());
        let eps1 = MultiPoly::var(&reg, reg.var("eps1").unwrap());
        assert_eq!(
            e_mat.entry(0, 0),
            &eps1.scale(&GaussianRational::from_int(2))
        );
        assert_eq!(
            e_vec.entry(0, 0),
            &(&eps1 * &eps1).scale(&GaussianRational::from_int(2))
        );

        let im = IndexMap::build(3, 2).unwrap();
        let (e_mat, e_vec) = build_e_pair(&im).unwrap();
        let reg = Arc::clone(e_mat.registry());
        let eps1 = MultiPoly::var(&reg, reg.var("eps1").unwrap());
        let eps2 = MultiPoly::var(&reg, reg.var("eps2").unwrap());
        let row = im.iota(1, 2).unwrap() - 1;
        assert_eq!(e_mat.entry(row, 0), &eps2);
        assert_eq!(e_mat.entry(row, 1), &eps1);
        assert_eq!(
            e_vec.entry(row, 0),
            &(&eps1 * &eps2).scale(&GaussianRational::from_int(2))
        );
    }

    #[test]
    fn eps_combination_identity_all_n() {
        for n in 2..=5 {
            let im = IndexMap::build(n, n - 1).unwrap();
            let (e_mat, e_vec) = build_e_pair(&im).unwrap();
            let reg = Arc::clone(e_mat.registry());
            let mut combo = PolyMatrix::zero(&reg, im.big_n_prime(), 1);
            for k in 1..=im.n_prime() {
                let eps_k = MultiPoly::var(&reg, reg.var(&format!("eps{k}")).unwrap());
                let col =
                    PolyMatrix::new(&reg, im.big_n_prime(), 1, e_mat.column(k - 1).unwrap())
                        .unwrap();
                combo = combo.add(&col.scale_poly(&eps_k)).unwrap();
            }
            assert_eq!(combo, e_vec, "n = {n}");
        }
    }

    #[test]
    fn worked_example_matrices() {
        let jet = worked_example_jet();
        let jm = build_matrices(&jet).unwrap();
        let reg = Arc::clone(jm.registry());
        let eps1 = MultiPoly::var(&reg, reg.var("eps1").unwrap());
        // B = [2 + 2 eps + 2 eps^2]
        let two = GaussianRational::from_int(2);
        let expected_b = &(&MultiPoly::constant(&reg, two.clone())
            + &eps1.scale(&two))
            + &(&eps1 * &eps1).scale(&two);
        assert_eq!(jm.b().entry(0, 0), &expected_b);
        // A = [2i eps]
        assert_eq!(
            jm.a().entry(0, 0),
            &eps1.scale(&GaussianRational::two_i())
        );
    }

    #[test]
    fn phi_free_jet_has_diagonal_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            let mut jet = sample_jet(&mut rng, n, JetMode::Free).unwrap();
            jet.phi_lin.clear();
            jet.phi_w2.clear();
            let jm = build_matrices(&jet).unwrap();
            let det = jm.b().det().unwrap();
            assert_eq!(det.total_degree_all(), Degree::Finite(0));
            // constant = product of pair coefficients
            let mut expected = GaussianRational::one();
            for l in 1..=jm.index_map().big_n_prime() {
                expected = &expected * &jm.b().entry(l - 1, l - 1).constant_term();
            }
            assert_eq!(det.constant_term(), expected);
        }
    }

    #[test]
    fn constant_term_is_two_power_times_mu_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let jet = sample_jet(&mut rng, 3, JetMode::Huang).unwrap();
        let jm = build_matrices(&jet).unwrap();
        let det = jm.b().det().unwrap();
        let constant = det.constant_term();
        // 2^{n'} prod_{pairs} mu with n' = 2 diagonal pairs contributing 2s
        let mut expected = GaussianRational::from_int(4);
        for (_, v) in jet.mu.iter() {
            expected = &expected * v;
        }
        assert_eq!(constant, expected);
        let verdict = degree_verdict(&jet).unwrap();
        assert!(verdict.constant_term_matches_product);
        assert!(verdict.det_b_constant_nonzero);
    }

    #[test]
    fn geometric_rank_cases() {
        use crate::scalar::ratio;
        // all mu zero: zero matrix, rank 0
        let jet = jet_from_mu_profile(3, &[ratio(0, 1), ratio(0, 1)]).unwrap();
        let (m, rank) = geometric_rank_matrix(&jet).unwrap();
        assert!(m.is_zero());
        assert_eq!(rank, 0);

        // n=3, mu = (1, 2): diag(1, 2), rank 2
        let jet = jet_from_mu_profile(3, &[ratio(1, 1), ratio(2, 1)]).unwrap();
        let (m, rank) = geometric_rank_matrix(&jet).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(
            m.entry(0, 0),
            &MultiPoly::constant(m.registry(), GaussianRational::one())
        );
        assert_eq!(
            m.entry(1, 1),
            &MultiPoly::constant(m.registry(), GaussianRational::from_int(2))
        );

        // n=2, mu = 3/2
        let jet = jet_from_mu_profile(2, &[ratio(3, 2)]).unwrap();
        let (m, rank) = geometric_rank_matrix(&jet).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(
            m.entry(0, 0),
            &MultiPoly::constant(m.registry(), GaussianRational::from_parts(3, 2, 0, 1))
        );
    }

    #[test]
    fn worked_example_verdict() {
        let jet = worked_example_jet();
        let verdict = degree_verdict(&jet).unwrap();
        assert_eq!(verdict.deg_det_b, Degree::Finite(2));
        assert_eq!(verdict.deg_adj_b_a, Degree::Finite(1));
        assert_eq!(verdict.deg_segre_numerator, Degree::Finite(3));
        assert!(verdict.det_b_bound_holds);
        assert!(verdict.adj_b_a_bound_holds);
        assert!(verdict.segre_bound_holds);
        assert!(verdict.weak_bounds_hold);
        assert!(verdict.zeta_degrees_match);
    }

    #[test]
    fn worked_example_segre_restriction() {
        let jet = worked_example_jet();
        let jm = build_matrices(&jet).unwrap();
        let restriction = segre_restriction(&jm).unwrap();
        assert!(restriction.cross_check_holds);
        assert!(restriction.g_component_is_zero);
        let reg = Arc::clone(jm.registry());
        let eps1 = MultiPoly::var(&reg, reg.var("eps1").unwrap());
        let b_poly = jm.b().entry(0, 0).clone();
        assert_eq!(restriction.denominator, b_poly);
        assert_eq!(restriction.numerator[0], &b_poly * &eps1);
        // second block: -(adj B) A eps = -2i eps^2
        assert_eq!(
            restriction.numerator[1],
            (&eps1 * &eps1).scale(&-GaussianRational::two_i())
        );
    }

    #[test]
    fn phi_free_verdict_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=4 {
            let mut jet = sample_jet(&mut rng, n, JetMode::Free).unwrap();
            jet.phi_lin.clear();
            jet.phi_w2.clear();
            let verdict = degree_verdict(&jet).unwrap();
            assert_eq!(verdict.deg_det_b, Degree::Finite(0));
            assert_eq!(verdict.deg_adj_b_a, Degree::Finite(1));
            assert_eq!(verdict.deg_segre_numerator, Degree::Finite(2));
        }
    }

    #[test]
    fn structural_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for mode in [JetMode::Free, JetMode::Huang] {
                let jet = sample_jet(&mut rng, n, mode).unwrap();
                let jm = build_matrices(&jet).unwrap();
                let report = structural_identities(&jm).unwrap();
                assert!(report.all_hold(), "n = {n}, mode = {mode}: {report:?}");
            }
        }
    }

    #[test]
    fn verdict_invariant_under_index_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let jet = sample_jet(&mut rng, 3, JetMode::Free).unwrap();
        let base = degree_verdict(&jet).unwrap();
        let im = IndexMap::build_permuted(3, 2, &[2, 0, 1]).unwrap();
        let jm = build_matrices_with_index_map(&jet, &im).unwrap();
        let permuted = degree_verdict_from_matrices(&jm).unwrap();
        assert_eq!(base.deg_det_b, permuted.deg_det_b);
        assert_eq!(base.deg_adj_b_a, permuted.deg_adj_b_a);
        assert_eq!(base.deg_segre_numerator, permuted.deg_segre_numerator);
        assert_eq!(base.det_b_constant_term, permuted.det_b_constant_term);
    }

    #[test]
    fn multilinear_expansion_of_b_reassembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let jet = sample_jet(&mut rng, 3, JetMode::Free).unwrap();
        let jm = build_matrices(&jet).unwrap();
        let decomps = jm.b_homogeneous_decompositions();
        let terms = det_multilinear_expansion(jm.b(), &decomps).unwrap();
        assert_eq!(terms.len(), 27);
        let sum = terms
            .iter()
            .fold(MultiPoly::zero(jm.registry()), |acc, t| &acc + &t.det);
        assert_eq!(sum, jm.b().det().unwrap());
    }

    #[test]
    fn det_case_examples() {
        let im = IndexMap::build(3, 2).unwrap();
        // (1,1,1): three nonconstant columns in a 2-dim span
        let idx = MultiIndex::from_degrees(&[1, 1, 1]);
        let r = classify_det(&im, &idx).unwrap();
        assert_eq!(r.n_ge1, 3);
        assert_eq!(r.case, DetCase::Case1);

        // (2,2,0): two e-multiples
        let idx = MultiIndex::from_degrees(&[2, 2, 0]);
        let r = classify_det(&im, &idx).unwrap();
        assert_eq!(r.n2, 2);
        assert_eq!(r.case, DetCase::Case2);

        // (2,1,0): few nonconstant columns
        let idx = MultiIndex::from_degrees(&[2, 1, 0]);
        let r = classify_det(&im, &idx).unwrap();
        assert_eq!((r.n_ge1, r.n2), (2, 1));
        assert_eq!(r.case, DetCase::Case3 { degree_bound: 3 });

        // wrong length
        assert!(matches!(
            classify_det(&im, &MultiIndex::from_degrees(&[1, 1])),
            Err(JetError::IndexLengthMismatch { .. })
        ));
    }

    #[test]
    fn det_cases_verified_exhaustively_n3() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let jet = sample_jet(&mut rng, 3, JetMode::Free).unwrap();
        let jm = build_matrices(&jet).unwrap();
        for idx in enumerate_multi_indices(3, false) {
            let v = verify_det_case(&jm, &idx).unwrap();
            assert!(v.confirmed, "{}: {}", v.index, v.detail);
        }
    }

    #[test]
    fn adj_cases_verified_exhaustively_n2_n3() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [2usize, 3] {
            let jet = sample_jet(&mut rng, n, JetMode::Free).unwrap();
            let jm = build_matrices(&jet).unwrap();
            let len = jm.index_map().big_n_prime();
            for idx in enumerate_multi_indices(len, true) {
                let v = verify_adj_case(&jm, &idx).unwrap();
                assert!(v.confirmed, "n={n} {}: {}", v.index, v.detail);
            }
        }
    }

    #[test]
    fn sampled_jets_satisfy_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 2..=3 {
            for mode in [JetMode::Free, JetMode::Huang] {
                for _ in 0..5 {
                    let jet = sample_jet(&mut rng, n, mode).unwrap();
                    let v = degree_verdict(&jet).unwrap();
                    assert!(v.det_b_bound_holds, "n={n} {mode}");
                    assert!(v.adj_b_a_bound_holds, "n={n} {mode}");
                    assert!(v.segre_bound_holds, "n={n} {mode}");
                    assert!(v.det_b_constant_nonzero);
                }
            }
        }
    }

    #[test]
    fn invalid_jets_are_rejected() {
        // lambda_2 = 0 with kappa0 = 2
        let bad = NormalizedJet::new(
            3,
            2,
            vec![GaussianRational::i(), GaussianRational::zero()],
            BTreeMap::from([
                ((1, 1), GaussianRational::one()),
                ((1, 2), GaussianRational::one()),
                ((2, 2), GaussianRational::one()),
            ]),
            BTreeMap::new(),
            BTreeMap::new(),
            JetMode::Free,
        );
        assert!(matches!(bad, Err(JetError::JetInvariantViolated(_))));

        // huang mode with inconsistent mu
        let bad = NormalizedJet::new(
            2,
            1,
            vec![GaussianRational::i()],
            BTreeMap::from([((1, 1), GaussianRational::from_int(3))]),
            BTreeMap::new(),
            BTreeMap::new(),
            JetMode::Huang,
        );
        assert!(matches!(bad, Err(JetError::JetInvariantViolated(_))));
    }

    #[test]
    fn jet_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=4 {
            for mode in [JetMode::Free, JetMode::Huang] {
                let jet = sample_jet(&mut rng, n, mode).unwrap();
                let json = jet.to_json();
                let text = serde_json::to_string(&json).unwrap();
                let parsed: JetJson = serde_json::from_str(&text).unwrap();
                let back = NormalizedJet::from_json(&parsed).unwrap();
                assert_eq!(jet, back);
            }
        }
    }

    #[test]
    fn huang_mode_unsupported_above_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        assert!(matches!(
            sample_jet(&mut rng, 5, JetMode::Huang),
            Err(JetError::UnsupportedMode(_))
        ));
        // free mode still works at n = 5
        let jet = sample_jet(&mut rng, 5, JetMode::Free).unwrap();
        assert_eq!(jet.n(), 5);
    }
}
