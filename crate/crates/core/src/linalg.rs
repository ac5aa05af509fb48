//! Dense complex linear algebra on Kronecker-ordered tensor spaces.
//!
//! A space built from `k` legs of dimension `n` is indexed with the first
//! leg as the most significant digit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Condition-number ceiling above which an inverse is reported as singular.
const SINGULAR_COND: f64 = 1e13;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

/// Matrix unit `e_ij` in dimension `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn diag(entries: &[C64]) -> CMat {
    let n = entries.len();
    let mut m = zeros(n);
    for (i, v) in entries.iter().enumerate() {
        m[(i, i)] = *v;
    }
    m
}

pub fn from_rows(rows: &[Vec<C64>]) -> Result<CMat> {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    if rows.iter().any(|row| row.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(r, cols, |i, j| rows[i][j]))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn pow_usize(n: usize, k: usize) -> usize {
    n.checked_pow(k as u32).expect("tensor dimension overflow")
}

/// Digits of `idx` in base `n` with `k` places, most significant first.
pub fn digits(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

pub fn from_digits(ds: &[usize], n: usize) -> usize {
    ds.iter().fold(0, |acc, d| acc * n + d)
}

/// Flip operator on `C^n (x) C^n`.
pub fn permutation_operator(n: usize) -> CMat {
    let mut p = zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            p[(j * n + i, i * n + j)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Reorders tensor legs: leg `k` of the result is leg `perm[k]` of `m`.
pub fn permute_legs(m: &CMat, n: usize, perm: &[usize]) -> CMat {
    let k = perm.len();
    let d = pow_usize(n, k);
    let map: Vec<usize> = (0..d)
        .map(|new| {
            let nd = digits(new, n, k);
            let mut od = vec![0; k];
            for (pos, &src) in perm.iter().enumerate() {
                od[src] = nd[pos];
            }
            from_digits(&od, n)
        })
        .collect();
    CMat::from_fn(d, d, |r, c| m[(map[r], map[c])])
}

/// Index layout of a subset of legs inside a larger tensor space.
#[derive(Debug, Clone)]
pub struct LegLayout {
    n: usize,
    total: usize,
    dl: usize,
    dr: usize,
    identity: bool,
    /// `index[rho * dl + a]`: ambient index with rest digits `rho`, local digits `a`.
    index: Vec<usize>,
}

impl LegLayout {
    pub fn new(n: usize, positions: &[usize], total: usize) -> Self {
        let k = positions.len();
        let identity = k == total && positions.iter().enumerate().all(|(i, &p)| i == p);
        let rest: Vec<usize> = (0..total).filter(|p| !positions.contains(p)).collect();
        let dl = pow_usize(n, k);
        let dr = pow_usize(n, rest.len());
        let mut index = vec![0usize; dl * dr];
        let mut ds = vec![0usize; total];
        for rho in 0..dr {
            for (p, v) in rest.iter().zip(digits(rho, n, rest.len())) {
                ds[*p] = v;
            }
            for a in 0..dl {
                for (p, v) in positions.iter().zip(digits(a, n, k)) {
                    ds[*p] = v;
                }
                index[rho * dl + a] = from_digits(&ds, n);
            }
        }
        Self {
            n,
            total,
            dl,
            dr,
            identity,
            index,
        }
    }

    pub fn expand(&self, local: &CMat) -> CMat {
        if self.identity {
            return local.clone();
        }
        let (dl, d) = (self.dl, pow_usize(self.n, self.total));
        let mut out = CMat::zeros(d, d);
        for rho in 0..self.dr {
            let row = &self.index[rho * dl..(rho + 1) * dl];
            for a in 0..dl {
                for b in 0..dl {
                    let v = local[(a, b)];
                    if v != C64::new(0.0, 0.0) {
                        out[(row[a], row[b])] = v;
                    }
                }
            }
        }
        out
    }

    /// `acc * expand(local)` without forming the expanded matrix.
    pub fn mul_right(&self, acc: &CMat, local: &CMat) -> CMat {
        if self.identity {
            return acc * local;
        }
        let dl = self.dl;
        let nr = acc.nrows();
        let src = acc.as_slice();
        let mut out = CMat::zeros(nr, acc.ncols());
        let dst = out.as_mut_slice();
        let zero = C64::new(0.0, 0.0);
        for rho in 0..self.dr {
            let cols = &self.index[rho * dl..(rho + 1) * dl];
            for (b, &cb) in cols.iter().enumerate() {
                let target = &mut dst[cb * nr..(cb + 1) * nr];
                for (a, &ca) in cols.iter().enumerate() {
                    let v = local[(a, b)];
                    if v == zero {
                        continue;
                    }
                    let col = &src[ca * nr..(ca + 1) * nr];
                    for (t, x) in target.iter_mut().zip(col) {
                        *t += v * x;
                    }
                }
            }
        }
        out
    }
}

/// Places `local` (acting on legs at `positions` of a `total`-leg space,
/// in the given order) into the full space, identity elsewhere.
pub fn expand(local: &CMat, n: usize, positions: &[usize], total: usize) -> CMat {
    LegLayout::new(n, positions, total).expand(local)
}

/// Partial trace over the leg at position 0 of a `total`-leg space.
pub fn partial_trace_first(m: &CMat, n: usize, total: usize) -> CMat {
    let d = pow_usize(n, total - 1);
    let mut out = CMat::zeros(d, d);
    for i in 0..n {
        out += m.view((i * d, i * d), (d, d));
    }
    out
}

/// Diagonal block `<i| m |i>` on the first leg.
pub fn first_leg_block(m: &CMat, n: usize, total: usize, i: usize) -> CMat {
    let d = pow_usize(n, total - 1);
    m.view((i * d, i * d), (d, d)).into_owned()
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "inverse of a non-square matrix".into(),
        ));
    }
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU factorization has a zero pivot".into()))?;
    let cond = m.norm() * inv.norm();
    if !cond.is_finite() || cond > SINGULAR_COND {
        return Err(Error::Singular(format!("condition estimate {cond:.3e}")));
    }
    Ok(inv)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Relative residual `||l - r||_F / max(||l||_F, ||r||_F, 1)`.
pub fn rel_residual(l: &CMat, r: &CMat) -> f64 {
    if l.shape() != r.shape() {
        return f64::INFINITY;
    }
    let diff = (l - r).norm();
    let scale = l.norm().max(r.norm()).max(1.0);
    let v = diff / scale;
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Integer power, negative exponents through the inverse.
pub fn int_power(m: &CMat, p: i64) -> Result<CMat> {
    let base = if p < 0 { inverse(m)? } else { m.clone() };
    let mut e = p.unsigned_abs();
    let mut acc = eye(m.nrows());
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(acc)
}

/// Eigen-decomposition `m = V diag(w) V^-1` of a diagonalizable matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
    pub inv_vectors: CMat,
}

impl Eigen {
    pub fn new(m: &CMat) -> Result<Self> {
        let d = m.nrows();
        if !m.is_square() {
            return Err(Error::DimensionMismatch(
                "eigen-decomposition of a non-square matrix".into(),
            ));
        }
        let scale = m.norm().max(1.0);
        let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
            .ok_or_else(|| Error::NotDiagonalizable("Schur iteration did not converge".into()))?;
        let tri = schur.unpack().1;
        let raw: Vec<C64> = (0..d).map(|i| tri[(i, i)]).collect();

        // Cluster numerically equal eigenvalues.
        let tol = 1e-9 * scale;
        let mut clusters: Vec<(C64, usize)> = Vec::new();
        for w in raw {
            match clusters.iter_mut().find(|(c0, _)| (*c0 - w).norm() < tol) {
                Some(entry) => entry.1 += 1,
                None => clusters.push((w, 1)),
            }
        }

        let mut values = Vec::with_capacity(d);
        let mut cols: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(d);
        for (w, mult) in clusters {
            let shifted = m - eye(d) * w;
            let svd = shifted.svd(false, true);
            let v_t = svd
                .v_t
                .ok_or_else(|| Error::NotDiagonalizable("SVD failed".into()))?;
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
            for &idx in order.iter().take(mult) {
                if svd.singular_values[idx] > 1e-7 * scale {
                    return Err(Error::NotDiagonalizable(format!(
                        "eigenvalue {w} has a deficient eigenspace"
                    )));
                }
                cols.push(v_t.row(idx).adjoint());
                values.push(w);
            }
        }
        let vectors = CMat::from_columns(&cols);
        let inv_vectors = inverse(&vectors)
            .map_err(|_| Error::NotDiagonalizable("eigenvector matrix is singular".into()))?;
        Ok(Self {
            values,
            vectors,
            inv_vectors,
        })
    }

    /// Principal-branch complex power.
    pub fn power(&self, p: C64) -> Result<CMat> {
        let mut ws = Vec::with_capacity(self.values.len());
        for &w in &self.values {
            let on_cut = w.norm() == 0.0 || (w.im.abs() <= 1e-14 * w.norm() && w.re < 0.0);
            if on_cut {
                return Err(Error::BranchCut(format!("eigenvalue {w}")));
            }
            ws.push((p * w.ln()).exp());
        }
        Ok(&self.vectors * diag(&ws) * &self.inv_vectors)
    }
}

/// Returns the exponent as an integer if it is one exactly.
pub fn as_integer(p: C64) -> Option<i64> {
    if p.im == 0.0 && p.re.fract() == 0.0 && p.re.abs() < 1e15 {
        Some(p.re as i64)
    } else {
        None
    }
}

/// `m^p` on the principal branch; integer exponents avoid the logarithm.
pub fn complex_power(m: &CMat, p: C64) -> Result<CMat> {
    match as_integer(p) {
        Some(k) => int_power(m, k),
        None => Eigen::new(m)?.power(p),
    }
}
