//! Bipartite and multipartite structure: Kronecker products, partial
//! trace/transpose, realignment, swap operators, symmetric projectors and
//! isometries, and the vec/mat isomorphism.

use num_complex::Complex64;

use crate::densemat::ComplexMatrix;
use crate::error::{Error, Result};

type C = Complex64;

/// A square operator on `C^m (x) C^n` tagged with its factor dimensions.
#[derive(Clone, Debug)]
pub struct BipartiteOperator {
    pub mat: ComplexMatrix,
    pub dims: (usize, usize),
}

impl BipartiteOperator {
    pub fn new(mat: ComplexMatrix, m: usize, n: usize) -> Result<Self> {
        if mat.rows() != m * n || mat.cols() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator does not match factor dims ({m}, {n})",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(BipartiteOperator { mat, dims: (m, n) })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }
}

/// Factor dimensions of a multipartite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiDims(pub Vec<usize>);

impl MultiDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("factor dims must be >= 1".into()));
        }
        Ok(MultiDims(dims))
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Partial trace over subsystem `which` (1 or 2).
pub fn partial_trace(x: &BipartiteOperator, which: u8) -> Result<ComplexMatrix> {
    let (m, n) = x.dims;
    match which {
        1 => {
            let mut out = ComplexMatrix::zeros(n, n);
            for k in 0..n {
                for l in 0..n {
                    let mut acc = C::new(0.0, 0.0);
                    for i in 0..m {
                        acc += x.mat[(i * n + k, i * n + l)];
                    }
                    out[(k, l)] = acc;
                }
            }
            Ok(out)
        }
        2 => {
            let mut out = ComplexMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    let mut acc = C::new(0.0, 0.0);
                    for k in 0..n {
                        acc += x.mat[(i * n + k, j * n + k)];
                    }
                    out[(i, j)] = acc;
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParameter("which must be 1 or 2".into())),
    }
}

/// Partial transpose on subsystem `which`. The crate default convention is
/// `which = 2` (the map `rho^Gamma`); the gate-fidelity code requests the
/// first factor explicitly.
pub fn partial_transpose(x: &BipartiteOperator, which: u8) -> Result<BipartiteOperator> {
    let (m, n) = x.dims;
    let mat = match which {
        1 => ComplexMatrix::from_fn(m * n, m * n, |r, c| {
            let (i, k) = (r / n, r % n);
            let (j, l) = (c / n, c % n);
            x.mat[(j * n + k, i * n + l)]
        }),
        2 => ComplexMatrix::from_fn(m * n, m * n, |r, c| {
            let (i, k) = (r / n, r % n);
            let (j, l) = (c / n, c % n);
            x.mat[(i * n + l, j * n + k)]
        }),
        _ => return Err(Error::InvalidParameter("which must be 1 or 2".into())),
    };
    BipartiteOperator::new(mat, m, n)
}

/// Partial transpose on an arbitrary subset of factors of a multipartite
/// operator. `transposed[f]` selects factor `f`.
pub fn partial_transpose_multi(
    x: &ComplexMatrix,
    dims: &MultiDims,
    transposed: &[bool],
) -> Result<ComplexMatrix> {
    let total = dims.total();
    if x.rows() != total || x.cols() != total || transposed.len() != dims.len() {
        return Err(Error::DimensionMismatch(
            "partial_transpose_multi shape".into(),
        ));
    }
    let p = dims.len();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut ridx = vec![0usize; p];
    let mut cidx = vec![0usize; p];
    for r in 0..total {
        unflatten(r, &dims.0, &mut ridx);
        for c in 0..total {
            unflatten(c, &dims.0, &mut cidx);
            let mut sr = 0usize;
            let mut sc = 0usize;
            for f in 0..p {
                let (a, b) = if transposed[f] {
                    (cidx[f], ridx[f])
                } else {
                    (ridx[f], cidx[f])
                };
                sr = sr * dims.0[f] + a;
                sc = sc * dims.0[f] + b;
            }
            out[(r, c)] = x[(sr, sc)];
        }
    }
    Ok(out)
}

fn unflatten(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for f in (0..dims.len()).rev() {
        out[f] = idx % dims[f];
        idx /= dims[f];
    }
}

/// Realignment map: the linear extension of
/// `|i><j| (x) |k><l|  ->  |i><k| (x) |j><l|`, returned as an (m^2) x (n^2)
/// matrix with row index (i, j) and column index (k, l).
pub fn realign(x: &BipartiteOperator) -> ComplexMatrix {
    let (m, n) = x.dims;
    ComplexMatrix::from_fn(m * m, n * n, |r, c| {
        let (i, j) = (r / m, r % m);
        let (k, l) = (c / n, c % n);
        x.mat[(i * n + k, j * n + l)]
    })
}

/// Swap operator `S |ij> = |ji>` on `C^n (x) C^n`.
pub fn swap_operator(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            s[(j * n + i, i * n + j)] = C::new(1.0, 0.0);
        }
    }
    s
}

/// Swap between factors of possibly different dimension:
/// maps `e_i (x) e_j in C^m (x) C^n` to `e_j (x) e_i in C^n (x) C^m`.
pub fn swap_rect(m: usize, n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            s[(j * m + i, i * n + j)] = C::new(1.0, 0.0);
        }
    }
    s
}

/// Permutation operator on a multipartite space: factor `f` is moved to
/// position `sigma[f]`, so that `swap_perm(sigma . tau) =
/// swap_perm(sigma) . swap_perm(tau)`.
pub fn swap_perm(dims: &MultiDims, sigma: &[usize]) -> Result<ComplexMatrix> {
    let p = dims.len();
    if sigma.len() != p {
        return Err(Error::InvalidParameter("permutation length".into()));
    }
    let mut seen = vec![false; p];
    for &s in sigma {
        if s >= p || seen[s] {
            return Err(Error::InvalidParameter("invalid permutation".into()));
        }
        seen[s] = true;
    }
    for f in 0..p {
        if dims.0[f] != dims.0[sigma[f]] {
            return Err(Error::InvalidParameter(
                "permutation mixes unequal factor dims".into(),
            ));
        }
    }
    let total = dims.total();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut idx = vec![0usize; p];
    let mut dest = vec![0usize; p];
    for c in 0..total {
        unflatten(c, &dims.0, &mut idx);
        for f in 0..p {
            dest[sigma[f]] = idx[f];
        }
        let mut r = 0usize;
        for f in 0..p {
            r = r * dims.0[f] + dest[f];
        }
        out[(r, c)] = C::new(1.0, 0.0);
    }
    Ok(out)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for f in 0..p {
        let mut next = Vec::new();
        for perm in &out {
            for pos in 0..=perm.len() {
                let mut q = perm.clone();
                q.insert(pos, f);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Projector onto the symmetric subspace of `(C^n)^(x p)`:
/// `P_S = (1/p!) sum_sigma S_sigma`.
pub fn sym_projector(n: usize, p: usize) -> Result<ComplexMatrix> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be >= 1".into()));
    }
    let total = n.checked_pow(p as u32).filter(|&t| t <= 1 << 14);
    let total = total.ok_or_else(|| Error::SizeGuard(format!("n^p = {n}^{p} too large")))?;
    let dims = MultiDims(vec![n; p]);
    let mut acc = ComplexMatrix::zeros(total, total);
    let perms = permutations(p);
    let count = perms.len() as f64;
    for sigma in perms {
        acc = acc.add(&swap_perm(&dims, &sigma)?);
    }
    Ok(acc.scale_re(1.0 / count))
}

/// Occupation vectors of `s` particles in `n` levels, lexicographic.
pub fn occupations(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, s: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            let mut full = prefix.clone();
            full.push(s);
            out.push(full);
            return;
        }
        for first in (0..=s).rev() {
            prefix.push(first);
            go(n - 1, s - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, s, &mut Vec::new(), &mut out);
    // Lexicographic order on occupation vectors, descending first coordinate
    // gives the standard |s,0,..>, |s-1,1,..>, ... ordering; sort ascending
    // lexicographically for determinism instead.
    out.sort();
    out
}

/// Isometry from the occupation-number basis of the symmetric subspace of
/// `(C^n)^(x s)` into the full space: an `n^s x C(n+s-1, s)` matrix `V` with
/// `V^dag V = I` and `V V^dag = P_S`. Basis vectors are normalized by
/// `sqrt(s!/prod k_i!)` and ordered lexicographically by occupation vector.
pub fn sym_isometry(n: usize, s: usize) -> Result<ComplexMatrix> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    let total = n.checked_pow(s as u32).filter(|&t| t <= 1 << 14);
    let total = total.ok_or_else(|| Error::SizeGuard(format!("n^s = {n}^{s} too large")))?;
    let occs = occupations(n, s);
    let d = occs.len();
    debug_assert_eq!(d, binomial(n + s - 1, s));
    let col_of: std::collections::HashMap<Vec<usize>, usize> = occs
        .iter()
        .cloned()
        .enumerate()
        .map(|(c, o)| (o, c))
        .collect();
    let norms: Vec<f64> = occs
        .iter()
        .map(|o| {
            let arrangements = factorial(s) / o.iter().map(|&k| factorial(k)).product::<f64>();
            arrangements.sqrt()
        })
        .collect();
    let mut v = ComplexMatrix::zeros(total, d);
    let mut idx = vec![0usize; s];
    for r in 0..total {
        unflatten(r, &vec![n; s], &mut idx);
        let mut occ = vec![0usize; n];
        for &level in &idx {
            occ[level] += 1;
        }
        let c = col_of[&occ];
        v[(r, c)] = C::new(1.0 / norms[c], 0.0);
    }
    Ok(v)
}

/// Column-stacking vectorization: `vec(A)[i*n + j] = A[j, i]` for
/// `A` an `n x m` matrix, giving a vector in `C^m (x) C^n`.
pub fn vec_of(a: &ComplexMatrix) -> Vec<C> {
    let (n, m) = (a.rows(), a.cols());
    let mut out = Vec::with_capacity(n * m);
    for i in 0..m {
        for j in 0..n {
            out.push(a[(j, i)]);
        }
    }
    out
}

/// Matricization: the inverse of [`vec_of`], sending `v in C^m (x) C^n` to the
/// `n x m` matrix whose i-th column holds entries `i*n .. (i+1)*n` of `v`.
pub fn mat_of(v: &[C], m: usize, n: usize) -> Result<ComplexMatrix> {
    if v.len() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} != {m}*{n}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, m, |j, i| v[i * n + j]))
}

/// The maximally entangled state `(1/sqrt(n)) sum_i |ii>` in `C^n (x) C^n`.
pub fn max_entangled(n: usize) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); n * n];
    let a = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        v[i * n + i] = C::new(a, 0.0);
    }
    v
}

/// Rank-one projector |v><v| as a matrix.
pub fn projector(v: &[C]) -> ComplexMatrix {
    let n = v.len();
    ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize_vec(v: &mut [C]) {
    let n = vec_norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}
