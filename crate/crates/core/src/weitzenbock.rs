//! Exact-rational check of the constant-curvature tensor identities: the
//! Riemann tensor `R_ijkl = K (g_il g_jk − g_ik g_jl)`, its Ricci contractions,
//! the two Weitzenböck curvature sums on antisymmetric k-tensors, and the sign
//! of `⋆⋆` on k-forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 6;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn show(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A covariant tensor of rank `rank` on an `dim`-dimensional space, stored
/// with the first index varying slowest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    dim: usize,
    rank: usize,
    data: Vec<Rational>,
}

impl Tensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self { dim, rank, data: vec![Rational::zero(); dim.pow(rank as u32)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Rational) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// All index tuples in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (dim, rank) = (self.dim, self.rank);
        (0..self.data.len()).map(move |mut o| {
            let mut idx = vec![0; rank];
            for slot in idx.iter_mut().rev() {
                *slot = o % dim;
                o /= dim;
            }
            idx
        })
    }

    pub fn scaled(&self, s: &Rational) -> Tensor {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Whether every transposition of two slots flips the sign.
    pub fn is_antisymmetric(&self) -> bool {
        self.antisymmetry_violation().is_none()
    }

    fn antisymmetry_violation(&self) -> Option<(Vec<usize>, usize, usize)> {
        for idx in self.indices() {
            for a in 0..self.rank {
                for b in a + 1..self.rank {
                    let mut swapped = idx.clone();
                    swapped.swap(a, b);
                    if *self.get(&swapped) != -self.get(&idx) {
                        return Some((idx, a, b));
                    }
                }
            }
        }
        None
    }

    /// A fully antisymmetric tensor with the given components on strictly
    /// increasing index tuples (in lexicographic order).
    pub fn antisymmetric_from(dim: usize, rank: usize, components: &[Rational]) -> Result<Self> {
        let tuples = increasing_tuples(dim, rank);
        if tuples.len() != components.len() {
            return Err(Error::Invalid(format!(
                "an antisymmetric {rank}-tensor in dimension {dim} has {} components, got {}",
                tuples.len(),
                components.len()
            )));
        }
        let mut t = Tensor::zeros(dim, rank);
        for (tuple, value) in tuples.iter().zip(components) {
            for (perm, sign) in permutations_with_sign(rank) {
                let idx: Vec<usize> = perm.iter().map(|&p| tuple[p]).collect();
                t.set(&idx, if sign > 0 { value.clone() } else { -value.clone() });
            }
        }
        Ok(t)
    }
}

/// Strictly increasing `rank`-tuples from `0..dim`, lexicographically.
pub fn increasing_tuples(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            go(i + 1, dim, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, dim, rank, &mut Vec::new(), &mut out);
    out
}

/// Sign of the permutation taking `0..n` to `perm`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inversions = 0;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter().map(|p| {
        let s = permutation_sign(&p);
        (p, s)
    }).collect()
}

type Matrix = Vec<Vec<Rational>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Gauss–Jordan inverse, or `None` when singular.
fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let (x, y) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(inv)
}

fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &a[r][col] / &p;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let x = &a[col][j] * &f;
                a[r][j] -= x;
            }
        }
    }
    det
}

/// Metric, inverse metric, curvature constant and an antisymmetric tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalTensorContext {
    g: Matrix,
    g_inv: Matrix,
    curvature: Rational,
    alpha: Tensor,
}

impl RationalTensorContext {
    /// Validates `g` (symmetric, every leading principal minor positive),
    /// `K ≤ 0`, and the antisymmetry of `alpha`.
    pub fn new(g: Matrix, curvature: Rational, alpha: Tensor) -> Result<Self> {
        let n = g.len();
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::Configuration(format!("dimension {n} outside {MIN_DIM}..={MAX_DIM}")));
        }
        if g.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("metric is not square".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if g[i][j] != g[j][i] {
                    return Err(Error::Invalid(format!("metric is not symmetric at ({i}, {j})")));
                }
            }
        }
        for m in 1..=n {
            let minor: Matrix = g[..m].iter().map(|row| row[..m].to_vec()).collect();
            let det = determinant(&minor);
            if !det.is_positive() {
                return Err(Error::Invalid(format!(
                    "metric is not positive definite: leading minor {m} is {}",
                    show(&det)
                )));
            }
        }
        if curvature.is_positive() {
            return Err(Error::Domain(format!("curvature constant must be −a² ≤ 0, got {}", show(&curvature))));
        }
        if alpha.dim() != n || alpha.rank() > n {
            return Err(Error::Degree(format!(
                "a {}-tensor in dimension {} does not fit a dimension-{n} metric",
                alpha.rank(),
                alpha.dim()
            )));
        }
        if let Some((idx, a, b)) = alpha.antisymmetry_violation() {
            return Err(Error::Precondition(format!("alpha is not antisymmetric in slots {a}, {b} at {idx:?}")));
        }
        let g_inv = invert(&g).expect("positive definite metric is invertible");
        Ok(Self { g, g_inv, curvature, alpha })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn degree(&self) -> usize {
        self.alpha.rank()
    }

    pub fn metric(&self) -> &Matrix {
        &self.g
    }

    pub fn inverse_metric(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn curvature(&self) -> &Rational {
        &self.curvature
    }

    pub fn alpha(&self) -> &Tensor {
        &self.alpha
    }

    /// The same tensor data with `g ↦ t² g` and `K ↦ K'`.
    pub fn rescaled(&self, t: &Rational, curvature: Rational) -> Result<Self> {
        let t2 = t * t;
        let g = self.g.iter().map(|row| row.iter().map(|x| x * &t2).collect()).collect();
        Self::new(g, curvature, self.alpha.clone())
    }

    pub fn dump(&self) -> ContextDump {
        ContextDump {
            dim: self.dim(),
            degree: self.degree(),
            metric: self.g.iter().map(|row| row.iter().map(show).collect()).collect(),
            curvature: show(&self.curvature),
            alpha: self.alpha.data.iter().map(show).collect(),
        }
    }
}

/// A context written out with every rational as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextDump {
    pub dim: usize,
    pub degree: usize,
    pub metric: Vec<Vec<String>>,
    pub curvature: String,
    pub alpha: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiemannTensor(pub Tensor);

impl RiemannTensor {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Rational {
        self.0.get(&[i, j, k, l])
    }

    /// `R_ijkl = −R_jikl = −R_ijlk = R_klij` for every index choice.
    pub fn has_curvature_symmetries(&self) -> bool {
        let n = self.0.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        if *r != -self.get(j, i, k, l) || *r != -self.get(i, j, l, k) || r != self.get(k, l, i, j) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

pub fn riemann_constant_curvature(ctx: &RationalTensorContext) -> RiemannTensor {
    let n = ctx.dim();
    let g = &ctx.g;
    let mut r = Tensor::zeros(n, 4);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = &ctx.curvature * (&g[i][l] * &g[j][k] - &g[i][k] * &g[j][l]);
                    r.set(&[i, j, k, l], v);
                }
            }
        }
    }
    RiemannTensor(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ricci {
    /// `R_ij = g^km R_kijm`.
    pub lower: Matrix,
    /// `R^i_j = g^ih R_hj`.
    pub mixed: Matrix,
}

pub fn ricci_contract(r: &RiemannTensor, ctx: &RationalTensorContext) -> Ricci {
    let n = ctx.dim();
    let gi = &ctx.g_inv;
    let mut lower = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Rational::zero();
            for k in 0..n {
                for m in 0..n {
                    if !gi[k][m].is_zero() {
                        s += &gi[k][m] * r.get(k, i, j, m);
                    }
                }
            }
            lower[i][j] = s;
        }
    }
    let mut mixed = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            mixed[i][j] = (0..n).fold(Rational::zero(), |acc, h| acc + &gi[i][h] * &lower[h][j]);
        }
    }
    Ricci { lower, mixed }
}

/// `Σ_ν (−1)^ν R^h_{i_ν} α_{h i₁…î_ν…i_k} − 2 Σ_{μ<ν} (−1)^{μ+ν} R^h_{i_ν i_μ}^i α_{i h i₁…î_μ…î_ν…i_k}`
/// with `ν, μ` counted from 1, evaluated by direct summation over every index.
/// On a space of constant curvature `K` this equals `−K k (N − k) α`.
pub fn weitzenbock_sums(ctx: &RationalTensorContext, r: &RiemannTensor) -> Result<Tensor> {
    let alpha = &ctx.alpha;
    if let Some((idx, a, b)) = alpha.antisymmetry_violation() {
        return Err(Error::Precondition(format!("alpha is not antisymmetric in slots {a}, {b} at {idx:?}")));
    }
    let n = ctx.dim();
    let k = alpha.rank();
    let gi = &ctx.g_inv;

    let ricci = ricci_contract(r, ctx);
    // R^h_{jk}^i = g^{ha} g^{ib} R_{ajkb}, one index at a time
    let mut half = Tensor::zeros(n, 4);
    for h in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for b in 0..n {
                    let mut s = Rational::zero();
                    for a in 0..n {
                        let rv = r.get(a, j, kk, b);
                        if !gi[h][a].is_zero() && !rv.is_zero() {
                            s += &gi[h][a] * rv;
                        }
                    }
                    half.set(&[h, j, kk, b], s);
                }
            }
        }
    }
    let mut mixed = Tensor::zeros(n, 4);
    for h in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for i in 0..n {
                    let mut s = Rational::zero();
                    for b in 0..n {
                        let hv = half.get(&[h, j, kk, b]);
                        if !gi[i][b].is_zero() && !hv.is_zero() {
                            s += &gi[i][b] * hv;
                        }
                    }
                    mixed.set(&[h, j, kk, i], s);
                }
            }
        }
    }

    let mut out = Tensor::zeros(n, k);
    let all: Vec<Vec<usize>> = out.indices().collect();
    let mut slot = vec![0usize; k];
    for idx in all {
        let mut total = Rational::zero();
        for nu in 0..k {
            // α_{h i₁…î_ν…i_k}
            let rest: Vec<usize> = idx.iter().enumerate().filter(|&(p, _)| p != nu).map(|(_, &v)| v).collect();
            let sign = if (nu + 1) % 2 == 0 { q(1) } else { q(-1) };
            for h in 0..n {
                slot[0] = h;
                slot[1..].copy_from_slice(&rest);
                let a = alpha.get(&slot);
                let c = &ricci.mixed[h][idx[nu]];
                if !a.is_zero() && !c.is_zero() {
                    total += &sign * c * a;
                }
            }
        }
        for mu in 0..k {
            for nu in mu + 1..k {
                let rest: Vec<usize> =
                    idx.iter().enumerate().filter(|&(p, _)| p != mu && p != nu).map(|(_, &v)| v).collect();
                let sign = if (mu + nu + 2) % 2 == 0 { q(-2) } else { q(2) };
                for h in 0..n {
                    for i in 0..n {
                        slot[0] = i;
                        slot[1] = h;
                        slot[2..].copy_from_slice(&rest);
                        let a = alpha.get(&slot);
                        if a.is_zero() {
                            continue;
                        }
                        let c = mixed.get(&[h, idx[nu], idx[mu], i]);
                        if !c.is_zero() {
                            total += &sign * c * a;
                        }
                    }
                }
            }
        }
        out.set(&idx, total);
    }
    Ok(out)
}

/// Applies `⋆` twice on the orthonormal basis of k-forms in dimension `dim`
/// and returns the common sign, after checking it against `(−1)^{Nk+k}`.
pub fn star_involution_sign(dim: usize, k: usize) -> Result<i32> {
    if k > dim {
        return Err(Error::Degree(format!("no {k}-forms in dimension {dim}")));
    }
    // ⋆ e_I = sign(I, Iᶜ) e_{Iᶜ}
    let complement = |set: &[usize]| -> Vec<usize> { (0..dim).filter(|i| !set.contains(i)).collect() };
    let star = |set: &[usize]| -> (Vec<usize>, i32) {
        let c = complement(set);
        let perm: Vec<usize> = set.iter().chain(c.iter()).copied().collect();
        (c, permutation_sign(&perm))
    };
    let mut seen = None;
    for basis in increasing_tuples(dim, k) {
        let (once, s1) = star(&basis);
        let (twice, s2) = star(&once);
        if twice != basis {
            return Err(Error::Consistency(format!("⋆⋆ moved e_{basis:?} to e_{twice:?}")));
        }
        let s = s1 * s2;
        match seen {
            None => seen = Some(s),
            Some(prev) if prev != s => {
                return Err(Error::Consistency(format!("⋆⋆ has sign {prev} and {s} on different {k}-forms")));
            }
            _ => {}
        }
    }
    let sign = seen.expect("at least one basis form");
    let expected = if (dim * k + k) % 2 == 0 { 1 } else { -1 };
    if sign != expected {
        return Err(Error::Consistency(format!("⋆⋆ = {sign} on {k}-forms in dimension {dim}, expected {expected}")));
    }
    Ok(sign)
}

/// `g = LᵀL + I` with small integer `L`, `K = −a²` with small rational `a`,
/// and an antisymmetric `α` with small rational components.
pub fn random_context(dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<RationalTensorContext> {
    let l: Vec<Vec<i64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let g: Matrix = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let s: i64 = (0..dim).map(|m| l[m][i] * l[m][j]).sum();
                    q(s + i64::from(i == j))
                })
                .collect()
        })
        .collect();
    let a = Rational::new(BigInt::from(rng.gen_range(0..=4)), BigInt::from(rng.gen_range(1..=3)));
    let curvature = -(&a * &a);
    let count = increasing_tuples(dim, k).len();
    let comps: Vec<Rational> = (0..count)
        .map(|_| Rational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=4))))
        .collect();
    let alpha = Tensor::antisymmetric_from(dim, k, &comps)?;
    RationalTensorContext::new(g, curvature, alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub dim: usize,
    pub degree: usize,
    pub trials: usize,
    pub passed: usize,
    /// Trials where the sums also equal the alternative value `+K k (N − k) α`;
    /// only trivially true cases (`K = 0`, `k(N − k) = 0` or `α = 0`) can land here.
    pub positive_sign_matches: usize,
    pub star_sign: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub dim: usize,
    pub degree: usize,
    pub trial: usize,
    pub check: String,
    pub context: ContextDump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: Vec<CaseReport>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.cases.iter().all(|c| c.passed == c.trials)
    }
}

/// Every check on one context. Returns the Weitzenböck sums, or the name of
/// the first failing check.
pub fn check_context(ctx: &RationalTensorContext) -> std::result::Result<Tensor, String> {
    let n = ctx.dim();
    let k = ctx.degree();
    for i in 0..n {
        for j in 0..n {
            let p = (0..n).fold(Rational::zero(), |acc, m| acc + &ctx.g[i][m] * &ctx.g_inv[m][j]);
            if p != if i == j { Rational::one() } else { Rational::zero() } {
                return Err("g·g⁻¹ = I".into());
            }
        }
    }
    let r = riemann_constant_curvature(ctx);
    if !r.has_curvature_symmetries() {
        return Err("Riemann symmetries".into());
    }
    let ricci = ricci_contract(&r, ctx);
    let kn1 = ctx.curvature() * q(n as i64 - 1);
    for i in 0..n {
        for j in 0..n {
            if ricci.lower[i][j] != &kn1 * &ctx.g[i][j] {
                return Err("R_ij = K(N−1)g_ij".into());
            }
            let delta = if i == j { kn1.clone() } else { Rational::zero() };
            if ricci.mixed[i][j] != delta {
                return Err("R^i_j = K(N−1)δ^i_j".into());
            }
        }
    }
    let sums = weitzenbock_sums(ctx, &r).map_err(|e| e.to_string())?;
    let coefficient = -ctx.curvature() * q((k * (n - k)) as i64);
    if sums != ctx.alpha.scaled(&coefficient) {
        return Err("Weitzenböck sums = −K k(N−k) α".into());
    }
    if !sums.is_antisymmetric() {
        return Err("antisymmetry of the Weitzenböck sums".into());
    }
    Ok(sums)
}

/// Runs `trials` seeded random contexts for every `2 ≤ N ≤ max_dim`, `0 ≤ k ≤ N`.
pub fn verify_suite(max_dim: usize, trials: usize, seed: u64) -> Result<SuiteReport> {
    if !(MIN_DIM..=MAX_DIM).contains(&max_dim) {
        return Err(Error::Configuration(format!("max dimension {max_dim} outside {MIN_DIM}..={MAX_DIM}")));
    }
    let mut cases = Vec::new();
    let mut failures = Vec::new();
    for dim in MIN_DIM..=max_dim {
        for k in 0..=dim {
            let star_sign = star_involution_sign(dim, k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((dim as u64) << 32 | k as u64));
            let mut passed = 0;
            let mut positive_sign_matches = 0;
            for trial in 0..trials {
                let ctx = random_context(dim, k, &mut rng)?;
                match check_context(&ctx) {
                    Ok(sums) => {
                        passed += 1;
                        let alternative = ctx.curvature() * q((k * (dim - k)) as i64);
                        if sums == ctx.alpha.scaled(&alternative) {
                            positive_sign_matches += 1;
                        }
                    }
                    Err(check) => failures.push(Failure { dim, degree: k, trial, check, context: ctx.dump() }),
                }
            }
            cases.push(CaseReport { dim, degree: k, trials, passed, positive_sign_matches, star_sign });
        }
    }
    Ok(SuiteReport { seed, cases, failures })
}
