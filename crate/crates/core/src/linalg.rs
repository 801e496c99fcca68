//! Dense complex linear algebra: LU with partial pivoting, determinants,
//! eigenvalues (Hessenberg reduction + shifted QR) and the matrix
//! exponential (scaling and squaring with a Padé approximant).

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative pivot threshold that defines a singular matrix.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

/// Square complex matrix in row-major layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, data)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.dim,
                self.dim
            )));
        }
        Ok((0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// LU factorization `P·M = L·U` with partial pivoting.
///
/// The factorization always runs to completion; a pivot below
/// `PIVOT_THRESHOLD · max|M|` marks the matrix singular and is recorded.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: Option<(usize, f64)>,
}

pub fn lu_factor(m: &CMatrix) -> LuFactorization {
    let n = m.dim();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let threshold = PIVOT_THRESHOLD * m.max_abs();
    let mut singular = None;

    for k in 0..n {
        let (piv, piv_abs) = (k..n)
            .map(|r| (r, lu[(r, k)].norm()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if piv != k {
            for c in 0..n {
                lu.data.swap(k * n + c, piv * n + c);
            }
            perm.swap(k, piv);
            swaps += 1;
        }
        if piv_abs <= threshold {
            if singular.is_none() {
                singular = Some((k, piv_abs));
            }
            if piv_abs == 0.0 {
                continue;
            }
        }
        let pivot = lu[(k, k)];
        for r in k + 1..n {
            let f = lu[(r, k)] / pivot;
            lu[(r, k)] = f;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for c in k + 1..n {
                let u = lu[(k, c)];
                lu[(r, c)] -= f * u;
            }
        }
    }
    LuFactorization {
        lu,
        perm,
        swaps,
        singular,
    }
}

impl LuFactorization {
    pub fn is_singular(&self) -> bool {
        self.singular.is_some()
    }

    /// Step and magnitude of the first sub-threshold pivot.
    pub fn singular_pivot(&self) -> Option<(usize, f64)> {
        self.singular
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.dim();
        let prod: C64 = (0..n).map(|k| self.lu[(k, k)]).product();
        if self.swaps % 2 == 1 {
            -prod
        } else {
            prod
        }
    }

    fn check(&self) -> Result<()> {
        match self.singular {
            Some((step, pivot)) => Err(Error::SingularMatrix { step, pivot }),
            None => Ok(()),
        }
    }

    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        self.check()?;
        let n = self.lu.dim();
        if rhs.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "right-hand side of length {} for dimension {n}",
                rhs.len()
            )));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for r in 0..n {
            let s: C64 = (0..r).map(|c| self.lu[(r, c)] * x[c]).sum();
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let s: C64 = (r + 1..n).map(|c| self.lu[(r, c)] * x[c]).sum();
            x[r] = (x[r] - s) / self.lu[(r, r)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.check()?;
        let n = self.lu.dim();
        let mut inv = CMatrix::zeros(n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            e[c] = C64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for (r, v) in col.into_iter().enumerate() {
                inv[(r, c)] = v;
            }
        }
        Ok(inv)
    }
}

pub fn solve(m: &CMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    lu_factor(m).solve(rhs)
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    lu_factor(m).inverse()
}

pub fn det(m: &CMatrix) -> C64 {
    lu_factor(m).det()
}

/// Canonical eigenvalue order: real part, then imaginary part.
pub fn canonical_cmp(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Largest matrix dimension accepted by [`eigvals`].
pub const MAX_EIG_DIM: usize = 4096;

/// All eigenvalues with algebraic multiplicity, sorted canonically.
pub fn eigvals(m: &CMatrix) -> Result<Vec<C64>> {
    if m.dim() > MAX_EIG_DIM {
        return Err(Error::SizeGuard(format!(
            "eigenvalues requested for dimension {} > {MAX_EIG_DIM}",
            m.dim()
        )));
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let mut eig = hessenberg_qr(&mut h)?;
    eig.sort_by(canonical_cmp);
    Ok(eig)
}

/// In-place reduction to upper Hessenberg form by Householder similarities.
fn hessenberg(a: &mut CMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let zero = C64::new(0.0, 0.0);
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|r| a[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase·‖x‖·e1, H = I − 2 v v^H / (v^H v)
        let mut v: Vec<C64> = (k + 1..n).map(|r| a[(r, k)]).collect();
        v[0] += phase * norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // left: A ← H A on rows k+1..n
        for c in k..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * a[(k + 1 + t, c)])
                .sum();
            let s = s * beta;
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, c)] -= vt * s;
            }
        }
        // right: A ← A H on columns k+1..n
        for r in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| a[(r, k + 1 + t)] * vt)
                .sum();
            let s = s * beta;
            for (t, vt) in v.iter().enumerate() {
                a[(r, k + 1 + t)] -= s * vt.conj();
            }
        }
        for r in k + 2..n {
            a[(r, k)] = zero;
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix; returns the eigenvalues.
fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<C64>> {
    let n = h.dim();
    let eps = f64::EPSILON;
    let max_total = 100 * n.max(10);
    let scale = h.max_abs();
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;

    loop {
        if hi == 0 {
            eig.push(h[(0, 0)]);
            break;
        }
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence { iterations: total });
        }

        let shift = if iter % 11 == 10 {
            // exceptional shift breaks stagnation cycles
            let sub = h[(hi, hi - 1)].norm()
                + if hi >= lo + 2 {
                    h[(hi - 1, hi - 2)].norm()
                } else {
                    0.0
                };
            h[(hi, hi)] + C64::new(0.75 * sub, -0.4375 * sub)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (a / r, b / r)
            };
            rotations.push((c, s));
            for col in k..=hi {
                let x = h[(k, col)];
                let y = h[(k + 1, col)];
                h[(k, col)] = c.conj() * x + s.conj() * y;
                h[(k + 1, col)] = -s * x + c * y;
            }
        }
        for (off, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + off;
            for row in lo..=(k + 2).min(hi) {
                let x = h[(row, k)];
                let y = h[(row, k + 1)];
                h[(row, k)] = x * c + y * s;
                h[(row, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

const PADE_THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
        ],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        13 => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("unsupported Padé order"),
    }
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant
/// of order 3, 5, 7, 9 or 13.
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    let n = m.dim();
    let norm = m.norm1();
    if !norm.is_finite() {
        return Err(Error::ExpmOverflow { norm });
    }
    let (order, scaling) = match PADE_THETA.iter().find(|(_, theta)| norm <= *theta) {
        Some(&(order, _)) => (order, 0u32),
        None => {
            let theta13 = PADE_THETA[4].1;
            let s = (norm / theta13).log2().ceil().max(0.0);
            if s > 1000.0 {
                return Err(Error::ExpmOverflow { norm });
            }
            (13, s as u32)
        }
    };
    let a = m.scale(C64::new(0.5f64.powi(scaling as i32), 0.0));
    let b = pade_coefficients(order);
    let ident = CMatrix::identity(n);
    let c = |x: f64| C64::new(x, 0.0);

    let a2 = a.matmul(&a)?;
    let (u, v) = if order < 13 {
        // powers A^0, A^2, ..., A^(order-1)
        let mut even = vec![ident.clone(), a2.clone()];
        while even.len() * 2 <= order {
            let next = even.last().unwrap().matmul(&a2)?;
            even.push(next);
        }
        let mut u_inner = CMatrix::zeros(n);
        let mut v = CMatrix::zeros(n);
        for (k, pk) in even.iter().enumerate() {
            if 2 * k < order {
                u_inner = u_inner.add(&pk.scale(c(b[2 * k + 1])))?;
            }
            v = v.add(&pk.scale(c(b[2 * k])))?;
        }
        (a.matmul(&u_inner)?, v)
    } else {
        let a4 = a2.matmul(&a2)?;
        let a6 = a4.matmul(&a2)?;
        let lin = |x: &[(f64, &CMatrix)]| -> Result<CMatrix> {
            let mut acc = CMatrix::zeros(n);
            for (w, mat) in x {
                acc = acc.add(&mat.scale(c(*w)))?;
            }
            Ok(acc)
        };
        let u_hi = lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)])?;
        let u_lo = lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)])?;
        let u = a.matmul(&a6.matmul(&u_hi)?.add(&u_lo)?)?;
        let v_hi = lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)])?;
        let v_lo = lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)])?;
        let v = a6.matmul(&v_hi)?.add(&v_lo)?;
        (u, v)
    };

    let denom = lu_factor(&v.sub(&u)?);
    let numer = v.add(&u)?;
    let mut r = CMatrix::zeros(n);
    for col in 0..n {
        let rhs: Vec<C64> = (0..n).map(|row| numer[(row, col)]).collect();
        let x = denom
            .solve(&rhs)
            .map_err(|_| Error::ExpmOverflow { norm })?;
        for (row, val) in x.into_iter().enumerate() {
            r[(row, col)] = val;
        }
    }
    for _ in 0..scaling {
        r = r.matmul(&r)?;
    }
    if r.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::ExpmOverflow { norm });
    }
    Ok(r)
}
