//! Dense complex matrix helpers and the Hermitian eigensolver front end.

use std::cmp::Ordering;

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{abs2, cr, Real, C};

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<C<T>>;
/// Dense complex column vector.
pub type CVector<T> = DVector<C<T>>;

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// `max |m - m†|`.
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> Result<T> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::NotSquare(r, c));
    }
    let mut worst = T::zero();
    for i in 0..r {
        for j in i..r {
            let d = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(d.modulus());
        }
    }
    Ok(worst)
}

/// `(m + m†) / 2`.
pub fn symmetrize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    (m + m.adjoint()).map(|z| z * half)
}

/// Diagonal matrix with real entries.
pub fn real_diagonal<T: Real>(entries: &[T]) -> CMatrix<T> {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { cr(entries[i]) } else { C::new(T::zero(), T::zero()) })
}

/// Real trace of a Hermitian product `Tr(a b)`.
pub fn trace_product_re<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..n {
            let p = a[(i, k)] * b[(k, i)];
            acc += p.re;
        }
    }
    acc
}

/// Kronecker product.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// `‖[a, b]‖_max`.
pub fn commutator_norm<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    max_abs(&(a * b - b * a))
}

/// Outer product `|v⟩⟨v|`.
pub fn projector<T: Real>(v: &CVector<T>) -> CMatrix<T> {
    v * v.adjoint()
}

/// Multiplies the vector by a phase so its first non-negligible entry is real
/// and positive.
pub fn fix_phase<T: Real>(v: &mut CVector<T>) {
    let cutoff = T::tol(1e-12);
    if let Some(z) = v.iter().copied().find(|z| z.modulus() > cutoff) {
        let phase = z.conj().unscale(z.modulus());
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn lexicographic<T: Real>(a: &CVector<T>, b: &CVector<T>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x
            .re
            .partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn all_finite<T: Real>(values: &[T], vectors: &CMatrix<T>) -> bool {
    values.iter().all(|v| v.is_finite()) && vectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Index sets of the connected blocks of `h`: `i` and `j` share a block when
/// a chain of non-zero entries links them.
fn blocks<T: Real>(h: &CMatrix<T>) -> Vec<Vec<usize>> {
    let n = h.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if h[(i, j)] != C::new(T::zero(), T::zero()) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(i);
    }
    out
}

/// Eigenpairs in solver order. Block-diagonal inputs (after a permutation)
/// are split first: nalgebra's solvers can return NaN on large, mostly zero
/// matrices such as a 2×2 block embedded in a qubit register.
fn eigen_unordered<T: Real>(h: &CMatrix<T>) -> Result<(Vec<T>, Vec<CVector<T>>)> {
    let parts = blocks(h);
    if parts.len() == 1 {
        return eigen_dense(h);
    }
    let n = h.nrows();
    let (mut values, mut vectors) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for idx in parts {
        let sub = CMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
        let (vals, vecs) = eigen_dense(&sub)?;
        values.extend(vals);
        for v in vecs {
            let mut full = CVector::zeros(n);
            for (k, &i) in idx.iter().enumerate() {
                full[i] = v[k];
            }
            vectors.push(full);
        }
    }
    Ok((values, vectors))
}

/// Dense path: the complex Hermitian solver, with the real symmetric
/// embedding as a fallback when it returns non-finite values.
fn eigen_dense<T: Real>(h: &CMatrix<T>) -> Result<(Vec<T>, Vec<CVector<T>>)> {
    if h.nrows() == 1 {
        return Ok((vec![h[(0, 0)].re], vec![CVector::from_element(1, C::new(T::one(), T::zero()))]));
    }
    let eig = SymmetricEigen::new(h.clone());
    let values: Vec<T> = eig.eigenvalues.iter().copied().collect();
    if all_finite(&values, &eig.eigenvectors) {
        let vectors = (0..h.nrows()).map(|i| eig.eigenvectors.column(i).into_owned()).collect();
        return Ok((values, vectors));
    }
    real_embedding_eigen(h)
}

/// Diagonalises `[[X, −Y], [Y, X]]` for `H = X + iY`. Every eigenvalue of
/// `H` appears twice, and each real eigenvector `(u, v)` maps to a complex
/// eigenvector `u + iv`. Within each cluster of doubled eigenvalues, half as
/// many complex vectors are kept by pivoted Gram–Schmidt.
fn real_embedding_eigen<T: Real>(h: &CMatrix<T>) -> Result<(Vec<T>, Vec<CVector<T>>)> {
    let n = h.nrows();
    let big = DMatrix::<T>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = SymmetricEigen::new(big);
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::InternalMismatch { what: "eigensolver returned non-finite values", difference: f64::NAN });
    }
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(Ordering::Equal));
    let candidates: Vec<CVector<T>> = order
        .iter()
        .map(|&k| CVector::from_fn(n, |i, _| C::new(eig.eigenvectors[(i, k)], eig.eigenvectors[(i + n, k)])))
        .collect();
    let scale = T::one().max(max_abs(h));
    let tie = T::tol(1e-10) * scale;
    let mut kept: Vec<CVector<T>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 1;
        while end < 2 * n && (eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]]).abs() <= tie {
            end += 1;
        }
        let mut pool: Vec<CVector<T>> = candidates[start..end].to_vec();
        for _ in 0..(end - start).div_ceil(2) {
            for v in pool.iter_mut() {
                for k in &kept {
                    let c = k.dotc(v);
                    v.axpy(-c, k, C::new(T::one(), T::zero()));
                }
            }
            let (best, norm) = pool
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if norm <= T::lit(1e-6) {
                break;
            }
            kept.push(pool[best].unscale(norm));
        }
        start = end;
    }
    if kept.len() != n {
        return Err(Error::InternalMismatch { what: "real embedding lost eigenvectors", difference: (n as f64) - kept.len() as f64 });
    }
    let values = kept.iter().map(|v| v.dotc(&(h * v)).re).collect();
    Ok((values, kept))
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order with the matching eigenvectors
/// as the columns of a unitary matrix. Every eigenvector is phase-fixed
/// (first non-negligible entry real positive). Within a group of degenerate
/// eigenvalues the vectors are ordered lexicographically by their entries so
/// that repeated calls produce identical output.
pub fn spectral_decompose<T: Real>(m: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let defect = hermiticity_defect(m)?;
    let scale = T::one().max(max_abs(m));
    if defect > T::tol(1e-10) * scale {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    let n = m.nrows();
    let (raw_values, raw_vectors) = eigen_unordered(&symmetrize(m))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[b].partial_cmp(&raw_values[a]).unwrap_or(Ordering::Equal));

    let mut vectors: Vec<CVector<T>> = order
        .iter()
        .map(|&i| {
            let mut v = raw_vectors[i].clone();
            fix_phase(&mut v);
            v
        })
        .collect();
    let values: Vec<T> = order.iter().map(|&i| raw_values[i]).collect();

    // Reorder within runs of (numerically) equal eigenvalues.
    let tie = T::tol(1e-12) * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            vectors[start..end].sort_by(lexicographic);
        }
        start = end;
    }

    let v = CMatrix::from_columns(&vectors);
    Ok((values, v))
}

/// `V diag(λ) V†`.
pub fn reconstruct<T: Real>(values: &[T], vectors: &CMatrix<T>) -> CMatrix<T> {
    let mut scaled = vectors.clone();
    for (j, &l) in values.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z = z.scale(l));
    }
    scaled * vectors.adjoint()
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let h = symmetrize(m);
    let mut values = match eigen_unordered(&h) {
        Ok((v, _)) => v,
        Err(_) => h.symmetric_eigenvalues().iter().copied().collect(),
    };
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    values
}

/// Applies a real function to the spectrum: `V f(Λ) V†`.
pub fn hermitian_function<T: Real>(m: &CMatrix<T>, f: impl Fn(T) -> T) -> Result<CMatrix<T>> {
    let (values, vectors) = spectral_decompose(m)?;
    let mapped: Vec<T> = values.into_iter().map(f).collect();
    Ok(reconstruct(&mapped, &vectors))
}

/// Squared Frobenius-type sum `Σ |m_ij|²`.
pub fn frobenius2<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &z| acc + abs2(z))
}

/// Converts a real-valued `f64` row-major table into a complex matrix.
pub fn from_pairs<T: Real>(dim: usize, pairs: &[(f64, f64)]) -> Result<CMatrix<T>> {
    if pairs.len() != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, got: pairs.len() });
    }
    Ok(CMatrix::from_row_iterator(dim, dim, pairs.iter().map(|&(re, im)| Complex::new(T::lit(re), T::lit(im)))))
}
