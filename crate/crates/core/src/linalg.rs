//! Sparse symmetric linear algebra for the FEM pencils: CSR storage,
//! reverse Cuthill-McKee ordering, banded Cholesky, and a shifted subspace
//! iteration for the smallest eigenvalues of (A, M) with M positive
//! definite.
//!
//! The eigensolver contract is residual-based: every returned pair (λ, v)
//! satisfies ‖A·v − λ·M·v‖₂ ≤ tol·‖M·v‖₂. Small problems are reduced
//! densely through the M-Cholesky factor; larger ones run block subspace
//! iteration on (A + σM)⁻¹·M, which converges to the smallest eigenvalues
//! as long as A + σM is positive definite. All randomness is seeded, so
//! results are bit-reproducible.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const DENSE_CUTOFF: usize = 140;
const MAX_SUBSPACE_ITER: usize = 400;

/// Symmetric sparse matrix in CSR form, storing the full pattern (both
/// halves) so matrix-vector products are single-pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    pub n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Build from (row, col, value) triplets, accumulating duplicates.
    /// Triplets describe the full matrix; symmetry is the caller's job.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> SparseSym {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_unstable_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut rows = Vec::with_capacity(triplets.len());
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        let mut last = None;
        for &t in &order {
            let (i, j, v) = triplets[t];
            assert!(i < n && j < n, "triplet ({i},{j}) out of range for n={n}");
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(i);
                col_idx.push(j);
                vals.push(v);
                last = Some((i, j));
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym { n, row_ptr, col_idx, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.vals[lo..hi])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[i] = acc;
        }
    }

    /// xᵀ·A·y.
    pub fn quad(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut row = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                row += v * y[*c];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// Sum of every stored entry.
    pub fn entry_sum(&self) -> f64 {
        self.vals.iter().sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                d[(i, *c)] += v;
            }
        }
        d
    }

    /// Largest |A − Aᵀ| entry, for symmetry checks.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let vt = self.get(*c, i);
                worst = worst.max((v - vt).abs());
            }
        }
        worst
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Σ cᵢ·Aᵢ over matrices with the same size (patterns may differ).
    pub fn combine(parts: &[(f64, &SparseSym)]) -> SparseSym {
        assert!(!parts.is_empty());
        let n = parts[0].1.n;
        let mut triplets = Vec::new();
        for (c, m) in parts {
            assert_eq!(m.n, n);
            for i in 0..n {
                let (cols, vals) = m.row(i);
                for (j, v) in cols.iter().zip(vals) {
                    triplets.push((i, *j, c * v));
                }
            }
        }
        SparseSym::from_triplets(n, &triplets)
    }

    /// A[p,p] for a permutation given as perm[new] = old.
    pub fn permute(&self, perm: &[usize]) -> SparseSym {
        assert_eq!(perm.len(), self.n);
        let mut inv = vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (j, v) in cols.iter().zip(vals) {
                triplets.push((inv[i], inv[*j], *v));
            }
        }
        SparseSym::from_triplets(self.n, &triplets)
    }

    /// Keep only rows/columns listed in `keep` (sorted), renumbering.
    pub fn restrict(&self, keep: &[usize]) -> SparseSym {
        let mut newid = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            newid[old] = new;
        }
        let mut triplets = Vec::new();
        for &i in keep {
            let (cols, vals) = self.row(i);
            for (j, v) in cols.iter().zip(vals) {
                if newid[*j] != usize::MAX {
                    triplets.push((newid[i], newid[*j], *v));
                }
            }
        }
        SparseSym::from_triplets(keep.len(), &triplets)
    }

    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            let (cols, _) = self.row(i);
            for &j in cols {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }
}

/// Reverse Cuthill-McKee ordering of the matrix graph; returns perm with
/// perm[new] = old. Handles disconnected graphs by reseeding at the
/// minimum-degree unvisited node.
pub fn rcm_order(a: &SparseSym) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();

    while order.len() < n {
        // seed: pseudo-peripheral node found by repeated BFS from the
        // minimum-degree unvisited node
        let mut seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .unwrap();
        for _ in 0..2 {
            if let Some(far) = bfs_farthest(a, seed, &visited) {
                seed = far;
            }
        }
        visited[seed] = true;
        queue.push_back(seed);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> =
                a.row(u).0.iter().copied().filter(|&v| v != u && !visited[v]).collect();
            nbrs.sort_unstable_by_key(|&v| degree[v]);
            for v in nbrs {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order.reverse();
    order
}

fn bfs_farthest(a: &SparseSym, start: usize, visited_mask: &[bool]) -> Option<usize> {
    let n = a.n;
    let mut dist = vec![usize::MAX; n];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    let mut far = start;
    while let Some(u) = queue.pop_front() {
        for &v in a.row(u).0 {
            if v != u && !visited_mask[v] && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                if dist[v] > dist[far] {
                    far = v;
                }
                queue.push_back(v);
            }
        }
    }
    if far == start {
        None
    } else {
        Some(far)
    }
}

/// Banded Cholesky factor L (A = L·Lᵀ) of a matrix with half-bandwidth bw:
/// row i stores columns [i−bw, i] contiguously.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// row-major, (bw+1) entries per row; entry (i, j) at data[i*(bw+1) + j−i+bw]
    data: Vec<f64>,
}

impl BandedCholesky {
    /// Factor a symmetric positive-definite matrix. Returns None on a
    /// non-positive pivot (matrix not PD as given).
    pub fn factor(a: &SparseSym) -> Option<BandedCholesky> {
        let n = a.n;
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut band = vec![0.0f64; n * w];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (j, v) in cols.iter().zip(vals) {
                if *j <= i {
                    band[i * w + (j + bw - i)] = *v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = band[i * w + (j + bw - i)];
                let kmin = lo.max(j.saturating_sub(bw));
                for k in kmin..j {
                    sum -= band[i * w + (k + bw - i)] * band[j * w + (k + bw - j)];
                }
                if j < i {
                    band[i * w + (j + bw - i)] = sum / band[j * w + bw];
                } else {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return None;
                    }
                    band[i * w + bw] = sum.sqrt();
                }
            }
        }
        Some(BandedCholesky { n, bw, data: band })
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut x = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut sum = x[i];
            for k in lo..i {
                sum -= self.data[i * w + (k + bw - i)] * x[k];
            }
            x[i] = sum / self.data[i * w + bw];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut sum = x[i];
            for k in (i + 1)..=hi {
                sum -= self.data[k * w + (i + bw - k)] * x[k];
            }
            x[i] = sum / self.data[i * w + bw];
        }
        x
    }
}

/// Result of a generalized symmetric eigensolve.
#[derive(Debug, Clone)]
pub struct EigResult {
    /// Ascending (signed) eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors matching `values`, M-normalized.
    pub vectors: Vec<Vec<f64>>,
    /// ‖A·v − λ·M·v‖₂ / ‖M·v‖₂ per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// k smallest eigenpairs of A·v = λ·M·v with M positive definite.
///
/// `shift` must make A + shift·M positive definite (any value works for the
/// dense path taken at small n). `warm`, when given, seeds the iteration
/// subspace, which speeds up parameter sweeps on a fixed mesh.
pub fn smallest_eigs(
    a: &SparseSym,
    m: &SparseSym,
    k: usize,
    tol: f64,
    shift: f64,
    warm: Option<&[Vec<f64>]>,
) -> Result<EigResult> {
    let n = a.n;
    assert_eq!(m.n, n);
    if k == 0 || k >= n {
        return Err(Error::InvalidDomain(format!(
            "eigenvalue count k={k} must satisfy 1 <= k < n={n}"
        )));
    }
    if n <= DENSE_CUTOFF {
        return dense_smallest(a, m, k, tol);
    }
    subspace_smallest(a, m, k, tol, shift, warm)
}

fn dense_smallest(a: &SparseSym, m: &SparseSym, k: usize, tol: f64) -> Result<EigResult> {
    let ad = a.to_dense();
    let md = m.to_dense();
    let chol = nalgebra::Cholesky::new(md.clone())
        .ok_or_else(|| Error::NoConvergence("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // S = L⁻¹ A L⁻ᵀ, computed by two triangular solves
    let t = l
        .solve_lower_triangular(&ad)
        .ok_or_else(|| Error::NoConvergence("singular mass Cholesky factor".into()))?;
    let s = l
        .solve_lower_triangular(&t.transpose())
        .ok_or_else(|| Error::NoConvergence("singular mass Cholesky factor".into()))?;
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let lt = l.transpose();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &i in idx.iter().take(k) {
        let z = eig.eigenvectors.column(i).into_owned();
        let v = lt
            .solve_upper_triangular(&z)
            .ok_or_else(|| Error::NoConvergence("singular mass Cholesky factor".into()))?;
        let lam = eig.eigenvalues[i];
        let (res, vn) = residual_pair(a, m, v.as_slice(), lam);
        if res > tol.max(1e-13) * vn {
            return Err(Error::NoConvergence(format!(
                "dense eigensolve residual {res:e} exceeds tol {tol:e} at eigenvalue {lam}"
            )));
        }
        values.push(lam);
        residuals.push(res / vn);
        vectors.push(v.as_slice().to_vec());
    }
    Ok(EigResult { values, vectors, residuals, iterations: 1 })
}

/// (‖A·v − λ·M·v‖₂, ‖M·v‖₂).
fn residual_pair(a: &SparseSym, m: &SparseSym, v: &[f64], lam: f64) -> (f64, f64) {
    let n = v.len();
    let mut av = vec![0.0; n];
    let mut mv = vec![0.0; n];
    a.matvec(v, &mut av);
    m.matvec(v, &mut mv);
    let mut r2 = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let r = av[i] - lam * mv[i];
        r2 += r * r;
        m2 += mv[i] * mv[i];
    }
    (r2.sqrt(), m2.sqrt().max(1e-300))
}

fn subspace_smallest(
    a: &SparseSym,
    m: &SparseSym,
    k: usize,
    tol: f64,
    shift: f64,
    warm: Option<&[Vec<f64>]>,
) -> Result<EigResult> {
    let n = a.n;
    let q = (2 * k + 2).max(k + 6).min(n - 1);

    // everything happens in RCM order to keep the Cholesky band thin
    let a_shift = SparseSym::combine(&[(1.0, a), (shift, m)]);
    let perm = rcm_order(&a_shift);
    let ap = a.permute(&perm);
    let mp = m.permute(&perm);
    let asp = a_shift.permute(&perm);
    let chol = BandedCholesky::factor(&asp).ok_or_else(|| {
        Error::NoConvergence(format!(
            "Cholesky factorization of A + {shift}·M failed; shift not large enough"
        ))
    })?;
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x0D15_EA5E);
    let mut x = DMatrix::<f64>::zeros(n, q);
    for j in 0..q {
        match warm.and_then(|w| w.get(j)) {
            Some(col) if col.len() == n => {
                for i in 0..n {
                    x[(inv[i], j)] = col[i];
                }
            }
            _ => {
                for i in 0..n {
                    x[(i, j)] = rng.random_range(-1.0f64..1.0);
                }
            }
        }
    }

    let mut y = DMatrix::<f64>::zeros(n, q);
    let mut my = DMatrix::<f64>::zeros(n, q);
    let mut ay = DMatrix::<f64>::zeros(n, q);
    let mut buf = vec![0.0f64; n];
    let mut out = vec![0.0f64; n];

    for iter in 1..=MAX_SUBSPACE_ITER {
        // Y = (A + σM)⁻¹ M X
        for j in 0..q {
            for i in 0..n {
                buf[i] = x[(i, j)];
            }
            mp.matvec(&buf, &mut out);
            let sol = chol.solve(&out);
            for i in 0..n {
                y[(i, j)] = sol[i];
            }
        }
        // M-orthonormalize Y (modified Gram-Schmidt, two passes)
        for j in 0..q {
            for _pass in 0..2 {
                for i in 0..j {
                    let mut c = 0.0;
                    for r in 0..n {
                        c += my[(r, i)] * y[(r, j)];
                    }
                    for r in 0..n {
                        let d = c * y[(r, i)];
                        y[(r, j)] -= d;
                    }
                }
            }
            for r in 0..n {
                buf[r] = y[(r, j)];
            }
            mp.matvec(&buf, &mut out);
            let mut norm2 = 0.0;
            for r in 0..n {
                norm2 += buf[r] * out[r];
            }
            if !(norm2 > 1e-280) {
                // degenerate column: reseed randomly and renormalize
                for r in 0..n {
                    y[(r, j)] = rng.random_range(-1.0f64..1.0);
                    buf[r] = y[(r, j)];
                }
                mp.matvec(&buf, &mut out);
                norm2 = 0.0;
                for r in 0..n {
                    norm2 += buf[r] * out[r];
                }
            }
            let inv_norm = 1.0 / norm2.sqrt();
            for r in 0..n {
                y[(r, j)] *= inv_norm;
                my[(r, j)] = out[r] * inv_norm;
            }
        }
        // Rayleigh-Ritz with the original (unshifted) A
        for j in 0..q {
            for i in 0..n {
                buf[i] = y[(i, j)];
            }
            ap.matvec(&buf, &mut out);
            for i in 0..n {
                ay[(i, j)] = out[i];
            }
        }
        let mut h = DMatrix::<f64>::zeros(q, q);
        for i in 0..q {
            for j in i..q {
                let mut acc = 0.0;
                for r in 0..n {
                    acc += y[(r, i)] * ay[(r, j)];
                }
                h[(i, j)] = acc;
                h[(j, i)] = acc;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..q).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

        // rotate the basis: X = Y·C (ordered ascending)
        for (newj, &oldj) in idx.iter().enumerate() {
            for r in 0..n {
                let mut acc = 0.0;
                for c in 0..q {
                    acc += y[(r, c)] * eig.eigenvectors[(c, oldj)];
                }
                x[(r, newj)] = acc;
            }
        }

        // convergence: residuals of the first k Ritz pairs, using the
        // cached A·Y and M·Y through the same rotation
        let mut worst = 0.0f64;
        let mut residuals = Vec::with_capacity(k);
        for (newj, &oldj) in idx.iter().enumerate().take(k) {
            let lam = eig.eigenvalues[oldj];
            let mut r2 = 0.0;
            let mut m2 = 0.0;
            for r in 0..n {
                let mut ar = 0.0;
                let mut mr = 0.0;
                for c in 0..q {
                    let w = eig.eigenvectors[(c, oldj)];
                    ar += ay[(r, c)] * w;
                    mr += my[(r, c)] * w;
                }
                let res = ar - lam * mr;
                r2 += res * res;
                m2 += mr * mr;
            }
            let ratio = r2.sqrt() / m2.sqrt().max(1e-300);
            residuals.push(ratio);
            worst = worst.max(ratio / tol.max(1e-15));
            let _ = newj;
        }
        if worst <= 1.0 {
            let mut values = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            for (newj, &oldj) in idx.iter().enumerate().take(k) {
                values.push(eig.eigenvalues[oldj]);
                // permute back to original node order
                let mut v = vec![0.0f64; n];
                for old in 0..n {
                    v[old] = x[(inv[old], newj)];
                }
                vectors.push(v);
            }
            return Ok(EigResult { values, vectors, residuals, iterations: iter });
        }
    }
    Err(Error::NoConvergence(format!(
        "subspace iteration did not reach tol={tol:e} within {MAX_SUBSPACE_ITER} iterations \
         (n={n}, k={k}, shift={shift})"
    )))
}

/// Largest eigenvalue of B·v = θ·M·v (both symmetric, M positive definite,
/// B positive semidefinite), by power iteration on M⁻¹B.
pub fn pencil_max_eig(b: &SparseSym, m: &SparseSym) -> Result<f64> {
    let n = b.n;
    assert_eq!(m.n, n);
    let perm = rcm_order(m);
    let bp = b.permute(&perm);
    let mp = m.permute(&perm);
    let chol = BandedCholesky::factor(&mp)
        .ok_or_else(|| Error::NoConvergence("mass matrix is not positive definite".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0A7);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0f64..1.0)).collect();
    let mut bx = vec![0.0; n];
    let mut theta_prev = 0.0f64;
    for it in 0..300 {
        bp.matvec(&x, &mut bx);
        let num = x.iter().zip(&bx).map(|(a, b)| a * b).sum::<f64>();
        let den = mp.quad(&x, &x);
        let theta = num / den.max(1e-300);
        if it > 3 && (theta - theta_prev).abs() <= 1e-8 * theta.abs().max(1e-12) {
            return Ok(theta.max(0.0));
        }
        theta_prev = theta;
        let y = chol.solve(&bx);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-280 {
            // B x landed in the kernel; restart from a fresh vector
            for v in &mut x {
                *v = rng.random_range(-1.0f64..1.0);
            }
            continue;
        }
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    Ok(theta_prev.max(0.0))
}
