//! Endomorphisms of the split torus `𝔾_m^n`: fixed points, invariant
//! monomials, invariant subtori and restriction to them.
//!
//! Coefficients are handled through their logarithms over a coprime base of
//! the integers that occur in numerators and denominators, with the sign kept
//! as a bit. Multiplicative equations over ℚ* then become linear systems over
//! ℤ plus one system over GF(2).

pub mod padic;

pub use padic::{is_prime, padic_attraction_probe, PAdicInt, PadicError, Valuation};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::dynmaps::{rat_pow, AffinePoint, MapError, MonomialMap};
use crate::linalg::coprime::{base_for, rat_from_log, rat_log, LogVec};
use crate::linalg::roots::split_integer_roots;
use crate::linalg::snf::is_saturated;
use crate::linalg::{hermite_rows, integer_kernel, smith, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("invariant subtori are only enumerated for n <= 3, got n = {0}")]
    DimensionUnsupported(usize),
    #[error("invalid sublattice: {0}")]
    InvalidSublattice(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sublattice is not invariant: M·{basis_vector:?} leaves it")]
    NotInvariant { basis_vector: Vec<i64> },
    #[error("the translate through the given point is not invariant")]
    CosetNotInvariant,
    #[error("coset point is not on the torus")]
    CosetNotOnTorus,
    #[error("map has a zero coefficient")]
    ZeroCoefficient,
    #[error(transparent)]
    Map(#[from] MapError),
}

fn ser_big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

fn ser_big_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_i64() {
            Some(i) => seq.serialize_element(&i)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

/// Saturated sublattice of ℤ^n given by basis rows. A basis vector `b`
/// stands for the one-parameter subgroup `t ↦ t^b`, so the subtorus is the
/// image of `t ↦ t^B` with the basis vectors as columns of `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sublattice {
    ambient: usize,
    basis: Vec<Vec<i64>>,
}

impl Sublattice {
    pub fn new(ambient: usize, basis: Vec<Vec<i64>>) -> Result<Self, TorusError> {
        if let Some(b) = basis.iter().find(|b| b.len() != ambient) {
            return Err(TorusError::DimensionMismatch {
                expected: ambient,
                got: b.len(),
            });
        }
        let rows: Vec<Vec<BigInt>> = basis.iter().map(|b| big_vec(b)).collect();
        if !rows.is_empty() && IntMatrix::from_rows(&rows).rank() != rows.len() {
            return Err(TorusError::InvalidSublattice(
                "basis is linearly dependent".into(),
            ));
        }
        if !is_saturated(&rows) {
            return Err(TorusError::InvalidSublattice("not saturated".into()));
        }
        Ok(Sublattice { ambient, basis })
    }

    fn from_big(ambient: usize, rows: &[Vec<BigInt>]) -> Option<Self> {
        let basis = rows
            .iter()
            .map(|r| small_vec(r))
            .collect::<Option<Vec<_>>>()?;
        Some(Sublattice { ambient, basis })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// `n × r` matrix with the basis vectors as columns.
    pub fn basis_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = self.basis.iter().map(|b| big_vec(b)).collect();
        IntMatrix::from_rows(&rows).transpose()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let mut rows: Vec<Vec<BigInt>> = self.basis.iter().map(|b| big_vec(b)).collect();
        rows.push(v.to_vec());
        // saturated, so rational membership is integral membership
        IntMatrix::from_rows(&rows).rank() == self.rank()
    }

    /// `M·L ⊆ L`.
    pub fn is_invariant(&self, m: &IntMatrix) -> bool {
        self.basis
            .iter()
            .all(|b| self.contains(&m.mul_vec(&big_vec(b))))
    }
}

/// Returns the homomorphism part and the translation of `x ↦ c·x^M`.
pub fn translation_normalize(f: &MonomialMap) -> (IntMatrix, Vec<BigRational>) {
    (f.matrix().clone(), f.coeff().to_vec())
}

/// Integer solutions of `a·y = b` (one column): a particular solution and a
/// kernel basis, or `None` if unsolvable over ℤ.
fn solve_int(a: &IntMatrix, b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let r = s.rank();
    let mut z = vec![BigInt::zero(); a.ncols()];
    for (i, x) in ub.iter().enumerate() {
        if i < r {
            let d = &s.d[(i, i)];
            if !x.is_multiple_of(d) {
                return None;
            }
            z[i] = x / d;
        } else if !x.is_zero() {
            return None;
        }
    }
    Some((s.v.mul_vec(&z), integer_kernel(a)))
}

/// All `σ ∈ GF(2)^n` with `a·σ = b`; `a` is reduced mod 2.
fn solve_gf2(a: &IntMatrix, b: &[bool]) -> Vec<Vec<bool>> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut rows: Vec<(Vec<bool>, bool)> = (0..m)
        .map(|i| ((0..n).map(|j| a[(i, j)].is_odd()).collect(), b[i]))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| rows[i].0[c]) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..m {
            if i != r && rows[i].0[c] {
                let (pr, pb) = rows[r].clone();
                for (x, y) in rows[i].0.iter_mut().zip(&pr) {
                    *x ^= *y;
                }
                rows[i].1 ^= pb;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| *rhs) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::with_capacity(1 << free.len());
    for mask in 0u64..(1u64 << free.len()) {
        let mut s = vec![false; n];
        for (k, &c) in free.iter().enumerate() {
            s[c] = mask >> k & 1 == 1;
        }
        for (i, &pc) in pivots.iter().enumerate() {
            let mut v = rows[i].1;
            for &c in &free {
                v ^= rows[i].0[c] && s[c];
            }
            s[pc] = v;
        }
        out.push(s);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixCount {
    Finite(BigInt),
    Infinite,
}

impl Serialize for FixCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FixCount::Finite(n) => ser_big(n, s),
            FixCount::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixReport {
    pub count: FixCount,
    /// Invariant factors of `M − I`.
    #[serde(serialize_with = "ser_big_vec")]
    pub structure: Vec<BigInt>,
    /// The rational fixed points, listed when the count is finite.
    pub sample_points: Vec<AffinePoint>,
}

/// Above this dimension rational fixed points are not enumerated.
const MAX_SIGN_ENUM: usize = 16;

/// Fixed points of `x ↦ c·x^M` on the torus: solutions of `x^{M−I} = c⁻¹`.
pub fn fixed_point_count(f: &MonomialMap) -> FixReport {
    let n = f.dim();
    let a = f.matrix().sub(&IntMatrix::identity(n));
    let s = smith(&a);
    let structure = s.invariant_factors();
    if f.coeff().iter().any(Zero::is_zero) {
        return FixReport {
            count: FixCount::Finite(BigInt::zero()),
            structure,
            sample_points: vec![],
        };
    }
    let base = base_for(f.coeff());
    let logs: Vec<LogVec> = f.coeff().iter().map(|c| rat_log(c, &base)).collect();
    let det = a.det();
    if det.is_zero() {
        // solvable iff c^v = 1 for every character v with vᵀ(M − I) = 0
        let solvable = integer_kernel(&a.transpose())
            .iter()
            .all(|v| twist_trivial(v, &logs));
        let count = if solvable {
            FixCount::Infinite
        } else {
            FixCount::Finite(BigInt::zero())
        };
        return FixReport {
            count,
            structure,
            sample_points: vec![],
        };
    }
    let mut sample_points = Vec::new();
    if n <= MAX_SIGN_ENUM {
        // x = σ·base^Y with (M − I)Y = −log c and (M − I)σ = sign(c) over GF(2)
        let mut ycols = Vec::with_capacity(base.len());
        let mut ok = true;
        for k in 0..base.len() {
            let rhs: Vec<BigInt> = logs.iter().map(|l| -&l.exps[k]).collect();
            match solve_int(&a, &rhs) {
                Some((y, _)) => ycols.push(y),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let signs: Vec<bool> = logs.iter().map(|l| l.neg).collect();
            for sigma in solve_gf2(&a, &signs) {
                let coords = (0..n)
                    .map(|i| {
                        let l = LogVec {
                            neg: sigma[i],
                            exps: ycols.iter().map(|y| y[i].clone()).collect(),
                        };
                        rat_from_log(&l, &base)
                    })
                    .collect();
                sample_points.push(AffinePoint::new(coords));
            }
        }
    }
    FixReport {
        count: FixCount::Finite(det.abs()),
        structure,
        sample_points,
    }
}

/// `∏ c_i^{v_i} = 1`.
fn twist_trivial(v: &[BigInt], logs: &[LogVec]) -> bool {
    let k = logs.first().map_or(0, |l| l.exps.len());
    let parity = v
        .iter()
        .zip(logs)
        .filter(|(x, l)| l.neg && x.is_odd())
        .count()
        % 2
        == 0;
    parity
        && (0..k).all(|j| {
            v.iter()
                .zip(logs)
                .map(|(x, l)| x * &l.exps[j])
                .sum::<BigInt>()
                .is_zero()
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantWitness {
    pub l: u64,
    pub v: Vec<i64>,
    /// The twist of `x^v` under `f^l` is trivial.
    pub coefficient_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantFunctionReport {
    pub found: bool,
    pub witnesses: Vec<InvariantWitness>,
    pub l_max: u64,
}

fn totient(mut d: u64) -> u64 {
    let mut out = d;
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            while d.is_multiple_of(p) {
                d /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if d > 1 {
        out -= out / d;
    }
    out
}

/// lcm of all `d` with `φ(d) ≤ n`: every root of unity of degree at most `n`
/// has order dividing it.
pub fn default_l_max(n: usize) -> u64 {
    let n = n.max(1) as u64;
    // φ(d) ≥ √(d/2), so d ≤ 2n² covers everything
    (1..=2 * n * n + 2)
        .filter(|&d| totient(d) <= n)
        .fold(1, |l, d| l.lcm(&d))
}

/// Monomials `x^v` fixed by some iterate `f^l`, `l ≤ l_max`.
///
/// For each `l` with a nonzero kernel of `(Mᵀ)^l − I`, the witnesses are a
/// Hermite basis of the vectors whose twist is trivial, or the plain kernel
/// basis flagged `coefficient_condition = false` when that lattice is zero.
pub fn invariant_monomials(f: &MonomialMap, l_max: Option<u64>) -> InvariantFunctionReport {
    let n = f.dim();
    let l_max = l_max.unwrap_or_else(|| default_l_max(n));
    let mt = f.matrix().transpose();
    let has_zero = f.coeff().iter().any(Zero::is_zero);
    let base = if has_zero {
        vec![]
    } else {
        base_for(f.coeff())
    };
    let logs: Vec<LogVec> = if has_zero {
        vec![]
    } else {
        f.coeff().iter().map(|c| rat_log(c, &base)).collect()
    };
    let c1 = LogMatrix::from_logs(&logs);
    let mut cl = c1.clone();
    let mut mt_pow = mt.clone();
    let mut witnesses = Vec::new();
    for l in 1..=l_max {
        if l > 1 {
            mt_pow = mt_pow.mul(&mt);
            cl = c1.add(&cl.left_mul(f.matrix()));
        }
        let k = integer_kernel(&mt_pow.sub(&IntMatrix::identity(n)));
        if k.is_empty() {
            continue;
        }
        let good = if has_zero {
            vec![]
        } else {
            twisted_sublattice(&k, &cl)
        };
        let (rows, cond) = if good.is_empty() {
            (k, false)
        } else {
            (good, true)
        };
        for r in rows {
            if let Some(v) = small_vec(&r) {
                witnesses.push(InvariantWitness {
                    l,
                    v,
                    coefficient_condition: cond,
                });
            }
        }
    }
    let found = witnesses.iter().any(|w| w.coefficient_condition);
    InvariantFunctionReport {
        found,
        witnesses,
        l_max,
    }
}

/// Logs of the coefficient vector of an iterate: row `i` is component `i`.
#[derive(Debug, Clone)]
struct LogMatrix {
    exps: Vec<Vec<BigInt>>,
    signs: Vec<bool>,
}

impl LogMatrix {
    fn from_logs(logs: &[LogVec]) -> Self {
        LogMatrix {
            exps: logs.iter().map(|l| l.exps.clone()).collect(),
            signs: logs.iter().map(|l| l.neg).collect(),
        }
    }

    fn add(&self, o: &LogMatrix) -> LogMatrix {
        LogMatrix {
            exps: self
                .exps
                .iter()
                .zip(&o.exps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
            signs: self
                .signs
                .iter()
                .zip(&o.signs)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Logs of `(∏_j c_j^{M_ij})_i`.
    fn left_mul(&self, m: &IntMatrix) -> LogMatrix {
        let n = m.nrows();
        let k = self.exps.first().map_or(0, Vec::len);
        let mut exps = vec![vec![BigInt::zero(); k]; n];
        let mut signs = vec![false; n];
        for i in 0..n {
            for j in 0..m.ncols() {
                let e = &m[(i, j)];
                for t in 0..k {
                    exps[i][t] += e * &self.exps[j][t];
                }
                signs[i] ^= self.signs[j] && e.is_odd();
            }
        }
        LogMatrix { exps, signs }
    }
}

/// Vectors `v` in the row lattice of `k` with `∏ c_i^{v_i} = 1`.
fn twisted_sublattice(k: &[Vec<BigInt>], c: &LogMatrix) -> Vec<Vec<BigInt>> {
    let kdim = k.len();
    let n = k[0].len();
    let nb = c.exps.first().map_or(0, Vec::len);
    // coefficients u with (u·K)·logs = 0
    let u_basis: Vec<Vec<BigInt>> = if nb == 0 {
        (0..kdim)
            .map(|i| (0..kdim).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    } else {
        let a: Vec<Vec<BigInt>> = (0..nb)
            .map(|t| {
                (0..kdim)
                    .map(|r| (0..n).map(|i| &k[r][i] * &c.exps[i][t]).sum())
                    .collect()
            })
            .collect();
        integer_kernel(&IntMatrix::from_rows(&a))
    };
    let vs: Vec<Vec<BigInt>> = u_basis
        .iter()
        .map(|u| {
            (0..n)
                .map(|i| (0..kdim).map(|r| &u[r] * &k[r][i]).sum())
                .collect()
        })
        .collect();
    let parity: Vec<bool> = vs
        .iter()
        .map(|v| {
            v.iter()
                .zip(&c.signs)
                .filter(|(x, s)| **s && x.is_odd())
                .count()
                % 2
                == 1
        })
        .collect();
    let out: Vec<Vec<BigInt>> = match parity.iter().position(|&p| p) {
        None => vs,
        Some(j0) => {
            let mut out = vec![vs[j0].iter().map(|x| x * 2).collect::<Vec<BigInt>>()];
            for (j, v) in vs.iter().enumerate() {
                if j == j0 {
                    continue;
                }
                if parity[j] {
                    out.push(v.iter().zip(&vs[j0]).map(|(a, b)| a + b).collect());
                } else {
                    out.push(v.clone());
                }
            }
            out
        }
    };
    hermite_rows(&out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubtoriReport {
    pub sublattices: Vec<Sublattice>,
    pub infinitely_many: bool,
    pub note: Option<String>,
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_at_matrix(p: &[BigInt], m: &IntMatrix) -> IntMatrix {
    let n = m.nrows();
    let mut acc = IntMatrix::zeros(n, n);
    for c in p.iter().rev() {
        acc = acc.mul(m);
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    acc
}

/// Proper nonzero saturated sublattices `L` with `M·L ⊆ L`, for `n ≤ 3`.
///
/// When `M` is cyclic these are the kernels of `D(M)` for the proper monic
/// divisors `D` of the characteristic polynomial. Otherwise some eigenspace
/// has dimension at least 2, every line in it is invariant, and only the flag
/// is set.
pub fn invariant_subtori(f: &MonomialMap) -> Result<SubtoriReport, TorusError> {
    let n = f.dim();
    if n > 3 {
        return Err(TorusError::DimensionUnsupported(n));
    }
    let m = f.matrix();
    if m.is_scalar() {
        return Ok(SubtoriReport {
            sublattices: vec![],
            infinitely_many: n > 1,
            note: (n > 1).then(|| "scalar matrix: every sublattice is invariant".to_string()),
        });
    }
    let (roots, cofactor) = split_integer_roots(&m.charpoly());
    let mut distinct: Vec<(BigInt, usize)> = Vec::new();
    for r in roots {
        match distinct.last_mut() {
            Some((x, k)) if *x == r => *k += 1,
            _ => distinct.push((r, 1)),
        }
    }
    for (r, k) in &distinct {
        if *k >= 2 {
            let shifted = m.sub(&scalar_big(n, r));
            if n - shifted.rank() >= 2 {
                return Ok(SubtoriReport {
                    sublattices: vec![],
                    infinitely_many: true,
                    note: Some(format!(
                        "eigenvalue {r} has an eigenspace of dimension >= 2"
                    )),
                });
            }
        }
    }
    // monic divisors: (x − r)^e for each root, times the cofactor or not
    let mut divisors: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for (r, k) in &distinct {
        let lin = vec![-r.clone(), BigInt::one()];
        let mut next = Vec::new();
        for d in &divisors {
            let mut p = d.clone();
            next.push(p.clone());
            for _ in 0..*k {
                p = poly_mul(&p, &lin);
                next.push(p.clone());
            }
        }
        divisors = next;
    }
    if cofactor.len() > 1 {
        let with: Vec<Vec<BigInt>> = divisors.iter().map(|d| poly_mul(d, &cofactor)).collect();
        divisors.extend(with);
    }
    let mut sublattices = Vec::new();
    for d in divisors {
        let deg = d.len() - 1;
        if deg == 0 || deg == n {
            continue;
        }
        let ker = integer_kernel(&poly_at_matrix(&d, m));
        if let Some(s) = Sublattice::from_big(n, &ker) {
            if !sublattices.contains(&s) {
                sublattices.push(s);
            }
        }
    }
    sublattices.sort_by(|a, b| a.rank().cmp(&b.rank()).then_with(|| b.basis.cmp(&a.basis)));
    Ok(SubtoriReport {
        sublattices,
        infinitely_many: false,
        note: None,
    })
}

fn scalar_big(n: usize, r: &BigInt) -> IntMatrix {
    let mut s = IntMatrix::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = r.clone();
    }
    s
}

/// The map induced on the translate `a·T_L`, in the coordinates
/// `t ↦ a·t^B`: `t ↦ u·t^A` with `M·B = B·A` and `u^B = f(a)/a`.
pub fn restrict_to_subtorus(
    f: &MonomialMap,
    l: &Sublattice,
    coset: &AffinePoint,
) -> Result<MonomialMap, TorusError> {
    let n = f.dim();
    if l.ambient() != n {
        return Err(TorusError::DimensionMismatch {
            expected: n,
            got: l.ambient(),
        });
    }
    if coset.dim() != n {
        return Err(TorusError::DimensionMismatch {
            expected: n,
            got: coset.dim(),
        });
    }
    if !coset.on_torus() {
        return Err(TorusError::CosetNotOnTorus);
    }
    let r = l.rank();
    if r == 0 {
        return Err(TorusError::InvalidSublattice("rank 0".into()));
    }
    let m = f.matrix();
    if let Some(b) = l
        .basis()
        .iter()
        .find(|b| !l.contains(&m.mul_vec(&big_vec(b))))
    {
        return Err(TorusError::NotInvariant {
            basis_vector: b.clone(),
        });
    }
    let bm = l.basis_matrix();
    // left inverse P·B = I from the Smith form of the saturated B
    let s = smith(&bm);
    let mut p = IntMatrix::zeros(r, n);
    for i in 0..r {
        for j in 0..n {
            p[(i, j)] = (0..r).map(|k| &s.v[(i, k)] * &s.u[(k, j)]).sum();
        }
    }
    let a = p.mul(m).mul(&bm);
    debug_assert!(bm.mul(&a) == m.mul(&bm));
    let fa = f.eval(coset).map_err(|_| TorusError::ZeroCoefficient)?;
    if !fa.on_torus() {
        return Err(TorusError::ZeroCoefficient);
    }
    let w: Vec<BigRational> = fa
        .coords()
        .iter()
        .zip(coset.coords())
        .map(|(x, y)| x / y)
        .collect();
    let u: Vec<BigRational> = (0..r).map(|i| monomial_value(&w, &p, i)).collect();
    let back: Vec<BigRational> = (0..n).map(|j| monomial_value(&u, &bm, j)).collect();
    if back != w {
        return Err(TorusError::CosetNotInvariant);
    }
    Ok(MonomialMap::new(a, u)?)
}

/// `∏_j x_j^{e[(row, j)]}`.
fn monomial_value(x: &[BigRational], e: &IntMatrix, row: usize) -> BigRational {
    x.iter()
        .enumerate()
        .fold(BigRational::one(), |acc, (j, xj)| {
            acc * rat_pow(xj, e[(row, j)].to_i64().expect("exponent fits i64"))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mm(rows: &[[i64; 2]]) -> MonomialMap {
        MonomialMap::from_ints(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn count(f: &MonomialMap) -> FixCount {
        fixed_point_count(f).count
    }

    fn fin(n: i64) -> FixCount {
        FixCount::Finite(BigInt::from(n))
    }

    #[test]
    fn normalize_reads_off_parts() {
        let f = MonomialMap::with_coeff(&[vec![2, 0], vec![0, 3]], &[2, 3]);
        let (m, c) = translation_normalize(&f);
        assert_eq!(m, IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(
            c,
            vec![
                BigRational::from_integer(2.into()),
                BigRational::from_integer(3.into())
            ]
        );
        let f = MonomialMap::with_coeff(&[vec![1, 1], vec![0, 1]], &[5, 1]);
        assert_eq!(
            translation_normalize(&f).1[0],
            BigRational::from_integer(5.into())
        );
    }

    #[test]
    fn fixed_point_examples() {
        let r = fixed_point_count(&mm(&[[2, 0], [0, 2]]));
        assert_eq!(r.count, fin(1));
        assert_eq!(r.sample_points, vec![AffinePoint::from_ints(&[1, 1])]);
        let r = fixed_point_count(&mm(&[[3, 0], [0, 3]]));
        assert_eq!(r.count, fin(4));
        assert_eq!(r.structure, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(r.sample_points.len(), 4);
        for p in &r.sample_points {
            assert_eq!(&mm(&[[3, 0], [0, 3]]).eval(p).unwrap(), p);
        }
        assert_eq!(count(&mm(&[[2, 1], [1, 1]])), fin(1));
    }

    #[test]
    fn twisted_fixed_points() {
        // x ↦ 4x^3: x^2 = 1/4, so x = ±1/2
        let f = MonomialMap::with_coeff(&[vec![3]], &[4]);
        let r = fixed_point_count(&f);
        assert_eq!(r.count, fin(2));
        assert_eq!(r.sample_points.len(), 2);
        for p in &r.sample_points {
            assert_eq!(&f.eval(p).unwrap(), p);
        }
        // x ↦ 2x^3: x^2 = 1/2 has no rational root
        let r = fixed_point_count(&MonomialMap::with_coeff(&[vec![3]], &[2]));
        assert_eq!(r.count, fin(2));
        assert!(r.sample_points.is_empty());
    }

    #[test]
    fn degenerate_fixed_points() {
        assert_eq!(count(&MonomialMap::identity(2)), FixCount::Infinite);
        assert_eq!(
            count(&MonomialMap::with_coeff(&[vec![1, 0], vec![0, 1]], &[2, 1])),
            fin(0)
        );
        // (5xy, y): fixed iff 5y = 1
        assert_eq!(
            count(&MonomialMap::with_coeff(&[vec![1, 1], vec![0, 1]], &[5, 1])),
            FixCount::Infinite
        );
        // (xy, 5y): y = 5y impossible
        assert_eq!(
            count(&MonomialMap::with_coeff(&[vec![1, 1], vec![0, 1]], &[1, 5])),
            fin(0)
        );
        assert_eq!(
            count(&MonomialMap::with_coeff(
                &[vec![1, 0], vec![0, 1]],
                &[-1, 1]
            )),
            fin(0)
        );
    }

    #[test]
    fn l_max_defaults() {
        assert_eq!(default_l_max(1), 2);
        assert_eq!(default_l_max(2), 12);
        assert_eq!(default_l_max(3), 12);
        assert_eq!(default_l_max(4), 120);
    }

    #[test]
    fn invariant_monomial_examples() {
        let r = invariant_monomials(&mm(&[[1, 1], [0, 1]]), None);
        assert!(r.found);
        assert_eq!(r.l_max, 12);
        assert_eq!(
            r.witnesses[0],
            InvariantWitness {
                l: 1,
                v: vec![0, 1],
                coefficient_condition: true
            }
        );
        let r = invariant_monomials(&mm(&[[0, 1], [1, 0]]), None);
        assert_eq!(
            r.witnesses[0],
            InvariantWitness {
                l: 1,
                v: vec![1, 1],
                coefficient_condition: true
            }
        );
        let r = invariant_monomials(&mm(&[[2, 0], [0, 2]]), Some(12));
        assert!(!r.found && r.witnesses.is_empty());
    }

    #[test]
    fn twisted_invariants() {
        // (2xy, y): y is invariant, x is not
        let f = MonomialMap::with_coeff(&[vec![1, 1], vec![0, 1]], &[2, 1]);
        let r = invariant_monomials(&f, Some(2));
        assert!(r.found);
        assert!(r.witnesses.iter().all(|w| w.v == vec![0, 1]));
        // (−x, y) with M = I: x^2 and y
        let f = MonomialMap::with_coeff(&[vec![1, 0], vec![0, 1]], &[-1, 1]);
        let r = invariant_monomials(&f, Some(1));
        let vs: Vec<Vec<i64>> = r.witnesses.iter().map(|w| w.v.clone()).collect();
        assert_eq!(vs, vec![vec![2, 0], vec![0, 1]]);
        // (3y, x/3)·swap: x·y ↦ x·y
        let f = MonomialMap::new(
            IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]),
            vec![
                BigRational::from_integer(3.into()),
                BigRational::new(1.into(), 3.into()),
            ],
        )
        .unwrap();
        assert!(invariant_monomials(&f, Some(1)).found);
        // (2y, x): x·y ↦ 2xy, but the second iterate is (2x, 2y) and fixes x/y
        let f = MonomialMap::with_coeff(&[vec![0, 1], vec![1, 0]], &[2, 1]);
        let r = invariant_monomials(&f, Some(2));
        assert!(r.found);
        assert_eq!(
            r.witnesses[0],
            InvariantWitness {
                l: 1,
                v: vec![1, 1],
                coefficient_condition: false
            }
        );
        assert_eq!(
            r.witnesses[1],
            InvariantWitness {
                l: 2,
                v: vec![1, -1],
                coefficient_condition: true
            }
        );
    }

    #[test]
    fn subtori_examples() {
        let r = invariant_subtori(&mm(&[[2, 0], [0, 2]])).unwrap();
        assert!(r.infinitely_many);
        let r = invariant_subtori(&mm(&[[2, 1], [1, 1]])).unwrap();
        assert!(!r.infinitely_many && r.sublattices.is_empty());
        let r = invariant_subtori(&mm(&[[2, 0], [0, 3]])).unwrap();
        let b: Vec<_> = r.sublattices.iter().map(|s| s.basis().to_vec()).collect();
        assert_eq!(b, vec![vec![vec![1, 0]], vec![vec![0, 1]]]);
        let r = invariant_subtori(&mm(&[[1, 1], [0, 1]])).unwrap();
        assert_eq!(
            r.sublattices,
            vec![Sublattice::new(2, vec![vec![1, 0]]).unwrap()]
        );
        let f = MonomialMap::identity(4);
        assert_eq!(
            invariant_subtori(&f),
            Err(TorusError::DimensionUnsupported(4))
        );
    }

    #[test]
    fn subtori_in_dimension_three() {
        // x-axis eigenvalue 2 plus the golden block
        let f = MonomialMap::from_ints(&[vec![2, 0, 0], vec![0, 2, 1], vec![0, 1, 1]]);
        let r = invariant_subtori(&f).unwrap();
        assert_eq!(r.sublattices.len(), 2);
        for s in &r.sublattices {
            assert!(s.is_invariant(f.matrix()));
        }
        let f = MonomialMap::from_ints(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        assert!(invariant_subtori(&f).unwrap().infinitely_many);
    }

    #[test]
    fn restriction_examples() {
        let sq = mm(&[[2, 0], [0, 2]]);
        let one = AffinePoint::from_ints(&[1, 1]);
        for basis in [vec![1, -1], vec![3, -2]] {
            let l = Sublattice::new(2, vec![basis]).unwrap();
            let g = restrict_to_subtorus(&sq, &l, &one).unwrap();
            assert_eq!(g, MonomialMap::from_ints(&[vec![2]]));
        }
        let f = mm(&[[2, 0], [0, 3]]);
        let l = Sublattice::new(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(
            restrict_to_subtorus(&f, &l, &one).unwrap(),
            MonomialMap::from_ints(&[vec![3]])
        );
        let l = Sublattice::new(2, vec![vec![1, 1]]).unwrap();
        assert_eq!(
            restrict_to_subtorus(&f, &l, &one),
            Err(TorusError::NotInvariant {
                basis_vector: vec![1, 1]
            })
        );
    }

    #[test]
    fn restriction_on_translates() {
        // (4/x, y^2) preserves the line x = 2
        let f = MonomialMap::with_coeff(&[vec![-1, 0], vec![0, 2]], &[4, 1]);
        let l = Sublattice::new(2, vec![vec![0, 1]]).unwrap();
        let g = restrict_to_subtorus(&f, &l, &AffinePoint::from_ints(&[2, 1])).unwrap();
        assert_eq!(g, MonomialMap::from_ints(&[vec![2]]));
        assert_eq!(
            restrict_to_subtorus(&f, &l, &AffinePoint::from_ints(&[3, 1])),
            Err(TorusError::CosetNotInvariant)
        );
        // (3x, 3y) on the translate (t, 5t)
        let f = MonomialMap::with_coeff(&[vec![1, 0], vec![0, 1]], &[3, 3]);
        let l = Sublattice::new(2, vec![vec![1, 1]]).unwrap();
        let g = restrict_to_subtorus(&f, &l, &AffinePoint::from_ints(&[1, 5])).unwrap();
        assert_eq!(g, MonomialMap::with_coeff(&[vec![1]], &[3]));
    }

    #[test]
    fn sublattice_checks() {
        assert!(Sublattice::new(2, vec![vec![2, 0]]).is_err());
        assert!(Sublattice::new(2, vec![vec![1, 0], vec![2, 0]]).is_err());
        assert!(Sublattice::new(2, vec![vec![1, 0, 0]]).is_err());
        let s: Sublattice = serde_json::from_str(r#"{"ambient":2,"basis":[[3,-2]]}"#).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"ambient":2,"basis":[[3,-2]]}"#
        );
    }

    #[test]
    fn reports_serialize() {
        let r = fixed_point_count(&mm(&[[3, 0], [0, 3]]));
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["count"], 4);
        assert_eq!(js["structure"], serde_json::json!([2, 2]));
        let r = invariant_monomials(&mm(&[[0, 1], [1, 0]]), Some(1));
        let js = serde_json::to_string(&r).unwrap();
        assert_eq!(
            js,
            r#"{"found":true,"witnesses":[{"l":1,"v":[1,1],"coefficient_condition":true}],"l_max":1}"#
        );
        assert_eq!(
            serde_json::to_value(FixCount::Infinite).unwrap(),
            "infinite"
        );
    }
}
