//! Eigen-decompositions of Hermitian and unitary matrices.
//!
//! The Hermitian solver reduces to a real symmetric tridiagonal matrix with
//! complex Householder reflections, rescales the off-diagonal phases away and
//! finishes with implicit QL iterations. A cyclic complex Jacobi solver is
//! kept alongside it as an independent reference.
//!
//! Unitary matrices are diagonalized through the commuting Hermitian pair
//! `C = (U + U^dag)/2`, `D = (U - U^dag)/(2i)`: `C` is diagonalized first and
//! `D` is then diagonalized inside every cluster of numerically equal
//! eigenvalues of `C`.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues of `C` closer than this are treated as one cluster.
pub const UNITARY_CLUSTER_GAP: f64 = 1e-8;
/// Jacobi convergence: off-diagonal Frobenius mass relative to `||A||_F`.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITER: usize = 60;

/// Eigenvalues with orthonormal eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V diag(values) V^dag`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|z| z)
    }

    /// `V diag(f(values)) V^dag`.
    pub fn reconstruct_with(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let k = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &mu) in self.values.iter().enumerate() {
            let fz = f(mu);
            for i in 0..n {
                scaled[(i, j)] *= fz;
            }
        }
        debug_assert_eq!(k, self.vectors.cols());
        scaled.matmul(&self.vectors.adjoint())
    }

    /// Largest `||A v_k - mu_k v_k||_2` over all pairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        let av = a.matmul(&self.vectors);
        let n = av.rows();
        (0..self.values.len())
            .map(|k| {
                (0..n)
                    .map(|i| (av[(i, k)] - self.values[k] * self.vectors[(i, k)]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Diagonalizes a Hermitian matrix. Eigenvalues ascend; eigenvectors are
/// orthonormal with their largest component made real and positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    a.check_hermitian()?;
    let (values, vectors) = tridiagonal_ql(&a.hermitian_part(), true)?;
    let vectors = vectors.expect("vectors requested");
    Ok(finish_hermitian(values, vectors))
}

/// Eigenvalues only, ascending. Skips the Hermitian check; callers pass
/// matrices that are Hermitian by construction.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.ensure_square()?;
    let (mut values, _) = tridiagonal_ql(&a.hermitian_part(), false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Cyclic complex Jacobi rotations. Slower than [`hermitian_eig`], used as an
/// independent check on it.
pub fn jacobi_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    a.check_hermitian()?;
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let total = m.frobenius_norm();
    let off_mass = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off_mass(&m) > JACOBI_TOL * total {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                residual: off_mass(&m),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let u = apq / b;
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s conj(u), c conj(u)]] acting on columns p, q.
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -u.conj() * s;
                let jqq = u.conj() * c;
                for i in 0..n {
                    let (xp, xq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = xp * jpp + xq * jqp;
                    m[(i, q)] = xp * jpq + xq * jqq;
                }
                for j in 0..n {
                    let (xp, xq) = (m[(p, j)], m[(q, j)]);
                    m[(p, j)] = jpp.conj() * xp + jqp.conj() * xq;
                    m[(q, j)] = jpq.conj() * xp + jqq.conj() * xq;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let (xp, xq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = xp * jpp + xq * jqp;
                    v[(i, q)] = xp * jpq + xq * jqq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m[(i, i)].re).collect();
    Ok(finish_hermitian(values, v))
}

fn finish_hermitian(values: Vec<f64>, mut vectors: ComplexMatrix) -> EigenDecomposition {
    normalize_phases(&mut vectors);
    let keys: Vec<f64> = values.clone();
    let scale = values.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let order = ordering(&keys, &vectors, 1e-12 * scale);
    let values = order.iter().map(|&k| Complex64::new(values[k], 0.0)).collect();
    EigenDecomposition {
        values,
        vectors: permute_columns(&vectors, &order),
    }
}

/// Diagonalizes a unitary matrix. Eigenvalues lie on the unit circle and are
/// ordered by principal argument in `[0, 2pi)`.
pub fn unitary_eig(u: &ComplexMatrix) -> Result<EigenDecomposition> {
    u.check_unitary()?;
    let n = u.rows();
    let ud = u.adjoint();
    let c = (u + &ud).scale_real(0.5).hermitian_part();
    let d = (u - &ud).scale(Complex64::new(0.0, -0.5)).hermitian_part();

    let (cvals, cvecs) = tridiagonal_ql(&c, true)?;
    let mut cvecs = cvecs.expect("vectors requested");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cvals[a].total_cmp(&cvals[b]));

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cvals[idx[end]] - cvals[idx[end - 1]] <= UNITARY_CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let cols: Vec<usize> = idx[start..end].to_vec();
            let w = cvecs.select(&(0..n).collect::<Vec<_>>(), &cols);
            let dw = w.adjoint_matmul(&d.matmul(&w)).hermitian_part();
            let (_, z) = tridiagonal_ql(&dw, true)?;
            let rotated = w.matmul(&z.expect("vectors requested"));
            for (k, &col) in cols.iter().enumerate() {
                cvecs.set_column(col, &rotated.column(k));
            }
        }
        start = end;
    }

    normalize_phases(&mut cvecs);
    let uv = u.matmul(&cvecs);
    let values: Vec<Complex64> = (0..n)
        .map(|k| {
            let rq: Complex64 = (0..n).map(|i| cvecs[(i, k)].conj() * uv[(i, k)]).sum();
            if rq.norm() > 0.0 {
                rq / rq.norm()
            } else {
                ONE
            }
        })
        .collect();
    let keys: Vec<f64> = values.iter().map(|&z| principal_arg(z)).collect();
    let order = ordering(&keys, &cvecs, 1e-12);
    Ok(EigenDecomposition {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: permute_columns(&cvecs, &order),
    })
}

/// Argument of `z` mapped to `[0, 2pi)`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re).rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// `exp(-i tau H)` for Hermitian `H`; `tau = 0` returns the identity exactly.
pub fn expm_hermitian(h: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    if tau == 0.0 {
        return Ok(ComplexMatrix::identity(h.rows()));
    }
    Ok(eig.reconstruct_with(|mu| Complex64::from_polar(1.0, -tau * mu.re)))
}

/// `f(H)` for Hermitian `H` and a real function `f` of its eigenvalues.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.reconstruct_with(|mu| Complex64::new(f(mu.re), 0.0)))
}

/// Sort key: `keys` ascending; runs of keys within `tol` of their neighbour
/// are ordered lexicographically by eigenvector entries.
fn ordering(keys: &[f64], vectors: &ComplexMatrix, tol: f64) -> Vec<usize> {
    let n = keys.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    let lex = |a: usize, b: usize| -> Ordering {
        for i in 0..vectors.rows() {
            let (x, y) = (vectors[(i, a)], vectors[(i, b)]);
            let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.cmp(&b)
    };
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && keys[order[end]] - keys[order[end - 1]] <= tol {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&a, &b| lex(a, b));
        }
        start = end;
    }
    order
}

fn permute_columns(m: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), order.len(), |i, j| m[(i, order[j])])
}

/// Rotates every column so that its first largest-modulus entry is real positive.
fn normalize_phases(v: &mut ComplexMatrix) {
    for j in 0..v.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..v.rows() {
            let a = v[(i, j)].norm();
            if a > best_abs * (1.0 + 1e-10) {
                best = i;
                best_abs = a;
            }
        }
        if best_abs <= 0.0 {
            continue;
        }
        let phase = v[(best, j)].conj() / best_abs;
        for i in 0..v.rows() {
            v[(i, j)] *= phase;
        }
        v[(best, j)] = Complex64::new(v[(best, j)].norm(), 0.0);
    }
}

/// Householder reduction to real tridiagonal form followed by implicit QL.
/// Returns unsorted eigenvalues and, optionally, the eigenvector matrix.
fn tridiagonal_ql(a: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.ensure_square()?;
    let mut m = a.clone();
    let mut q = if want_vectors {
        Some(ComplexMatrix::identity(n))
    } else {
        None
    };

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex64> = (0..len).map(|i| m[(k + 1 + i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // Trailing block update A <- H A H with H = I - beta v v^dag.
        let off = k + 1;
        let mut p = vec![ZERO; len];
        for i in 0..len {
            let row = &m.row(off + i)[off..];
            p[i] = row.iter().zip(&v).map(|(&a, &b)| a * b).sum::<Complex64>() * beta;
        }
        let kfac: Complex64 = v.iter().zip(&p).map(|(a, b)| a.conj() * b).sum::<Complex64>() * (beta * 0.5);
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kfac * vi).collect();
        for i in 0..len {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut m.row_mut(off + i)[off..];
            for j in 0..len {
                row[j] -= vi * w[j].conj() + wi * v[j].conj();
            }
        }
        m[(off, k)] = alpha;
        m[(k, off)] = alpha.conj();
        for i in 1..len {
            m[(off + i, k)] = ZERO;
            m[(k, off + i)] = ZERO;
        }

        if let Some(q) = q.as_mut() {
            // Q <- Q H on columns off..n.
            for r in 0..n {
                let row = &mut q.row_mut(r)[off..];
                let s: Complex64 = row.iter().zip(&v).map(|(&a, &b)| a * b).sum::<Complex64>() * beta;
                for j in 0..len {
                    row[j] -= s * v[j].conj();
                }
            }
        }
    }

    let mut d: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut phases = vec![ONE; n];
    for i in 0..n.saturating_sub(1) {
        let sub = m[(i + 1, i)];
        let mag = sub.norm();
        e[i] = mag;
        phases[i + 1] = if mag > 0.0 { phases[i] * (sub / mag) } else { phases[i] };
    }

    let mut z = if want_vectors {
        let mut zt = vec![0.0; n * n];
        for i in 0..n {
            zt[i * n + i] = 1.0;
        }
        Some(zt)
    } else {
        None
    };
    tql2(&mut d, &mut e, z.as_deref_mut(), n)?;

    let vectors = match (q, z) {
        (Some(q), Some(zt)) => {
            // Eigenvectors of the tridiagonal form are the rows of zt; undo the
            // phase scaling, then map back through the Householder product.
            let mut y = ComplexMatrix::zeros(n, n);
            for col in 0..n {
                for i in 0..n {
                    y[(i, col)] = phases[i] * zt[col * n + i];
                }
            }
            Some(q.matmul(&y))
        }
        _ => None,
    };
    Ok((d, vectors))
}

/// Implicit QL on a real symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[i]` coupling `i` and `i + 1`. Eigenvectors accumulate in
/// the rows of `zt` (row `k` is the `k`-th vector).
fn tql2(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>, n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::EigenNoConvergence {
                        sweeps: iter,
                        residual: e[l].abs(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(zt) = zt.as_deref_mut() {
                        let (lo, hi) = zt.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..(i + 1) * n];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let h = zi1[k];
                            zi1[k] = s * zi[k] + c * h;
                            zi[k] = c * zi[k] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&a + &a.adjoint()).scale_real(0.5)
    }

    fn orthonormality_defect(v: &ComplexMatrix) -> f64 {
        v.unitarity_defect()
    }

    #[test]
    fn diagonal_input() {
        let a = ComplexMatrix::from_real_diagonal(&[2.0, 1.0]);
        let eig = hermitian_eig(&a).unwrap();
        assert_eq!(eig.real_values(), vec![1.0, 2.0]);
        let expected = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(eig.vectors.max_abs_diff(&expected) < 1e-15);
        let eig = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0])).unwrap();
        assert!(eig.vectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn pauli_x() {
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        for eig in [hermitian_eig(&x).unwrap(), jacobi_eig(&x).unwrap()] {
            let vals = eig.real_values();
            assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            // Columns (1, -1)/sqrt2 and (1, 1)/sqrt2 up to the phase convention.
            let v0 = eig.vector(0);
            let v1 = eig.vector(1);
            assert!((v0[0].norm() - r).abs() < 1e-14 && (v0[0] + v0[1]).norm() < 1e-14);
            assert!((v1[0] - v1[1]).norm() < 1e-14 && (v1[0].norm() - r).abs() < 1e-14);
        }
    }

    #[test]
    fn random_reconstruction_50() {
        let a = random_hermitian(50, 7);
        let eig = hermitian_eig(&a).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&a) < 1e-9);
        assert!(orthonormality_defect(&eig.vectors) < 1e-10);
        assert!(eig.max_residual(&a) < 1e-9 * a.spectral_norm());
        let vals = eig.real_values();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jacobi_and_ql_agree() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (33, 4)] {
            let a = random_hermitian(n, seed);
            let ql = hermitian_eig(&a).unwrap();
            let jac = jacobi_eig(&a).unwrap();
            for (x, y) in ql.real_values().iter().zip(jac.real_values()) {
                assert!((x - y).abs() < 1e-11, "n={n}: {x} vs {y}");
            }
            assert!(jac.reconstruct().max_abs_diff(&a) < 1e-10);
            // Nondegenerate spectra: normalized eigenvectors coincide.
            assert!(ql.vectors.max_abs_diff(&jac.vectors) < 1e-8, "n={n}");
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // Free ring Laplacian: doubly degenerate plane-wave levels.
        let n = 12;
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            if (i + 1) % n == j || (j + 1) % n == i {
                Complex64::new(-1.0, 0.0)
            } else {
                ZERO
            }
        });
        let eig = hermitian_eig(&a).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&a) < 1e-12);
        assert!(orthonormality_defect(&eig.vectors) < 1e-12);
        let mut expected: Vec<f64> = (0..n).map(|k| -2.0 * (TAU * k as f64 / n as f64).cos()).collect();
        expected.sort_by(f64::total_cmp);
        for (x, y) in eig.real_values().iter().zip(&expected) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(expm_hermitian(&a, 1.0), Err(Error::NotHermitian { .. })));
        assert!(matches!(unitary_eig(&a.scale_real(2.0)), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn unitary_identity_and_diagonal() {
        let eig = unitary_eig(&ComplexMatrix::identity(4)).unwrap();
        assert!(eig.values.iter().all(|z| (z - ONE).norm() < 1e-15));
        let d = ComplexMatrix::from_diagonal(&[Complex64::from_polar(1.0, 1.7), Complex64::from_polar(1.0, 0.3)]);
        let eig = unitary_eig(&d).unwrap();
        assert!((principal_arg(eig.values[0]) - 0.3).abs() < 1e-14);
        assert!((principal_arg(eig.values[1]) - 1.7).abs() < 1e-14);
    }

    #[test]
    fn unitary_from_hermitian_spectral_mapping() {
        let h = random_hermitian(30, 11).scale_real(3.0);
        let u = expm_hermitian(&h, 1.0).unwrap();
        let ueig = unitary_eig(&u).unwrap();
        let heig = hermitian_eig(&h).unwrap();
        let mut expected: Vec<Complex64> = heig.values.iter().map(|m| Complex64::from_polar(1.0, -m.re)).collect();
        for got in &ueig.values {
            let (k, dist) = expected
                .iter()
                .enumerate()
                .map(|(k, z)| (k, (z - got).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < 1e-9);
            expected.remove(k);
        }
        assert!(ueig.max_residual(&u) < 1e-9);
        assert!(ueig.vectors.unitarity_defect() < 1e-10);
        assert!(ueig.reconstruct().max_abs_diff(&u) < 1e-9);
        let args: Vec<f64> = ueig.values.iter().map(|&z| principal_arg(z)).collect();
        assert!(args.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn unitary_with_conjugate_pairs() {
        // cos(theta) degenerate between theta and -theta; D separates them.
        let q = expm_hermitian(&random_hermitian(6, 9), 1.3).unwrap();
        let phases = [0.4, -0.4, 2.0, -2.0, 0.4, 3.0];
        let d = ComplexMatrix::from_diagonal(&phases.map(|p| Complex64::from_polar(1.0, p)));
        let u = q.matmul(&d).matmul(&q.adjoint());
        let eig = unitary_eig(&u).unwrap();
        assert!(eig.max_residual(&u) < 1e-9);
        assert!(eig.vectors.unitarity_defect() < 1e-10);
    }

    #[test]
    fn expm_scalar_phase_and_zero_time() {
        let h = ComplexMatrix::from_real_diagonal(&[std::f64::consts::PI]);
        let u = expm_hermitian(&h, 1.0).unwrap();
        assert!((u[(0, 0)] + ONE).norm() < 1e-12);
        let h = random_hermitian(5, 3);
        assert_eq!(expm_hermitian(&h, 0.0).unwrap(), ComplexMatrix::identity(5));
    }

    #[test]
    fn expm_matches_eigendecomposition() {
        let h = random_hermitian(20, 21);
        let u = expm_hermitian(&h, 0.7).unwrap();
        // Oracle through the Jacobi route.
        let eig = jacobi_eig(&h).unwrap();
        let oracle = eig.reconstruct_with(|m| Complex64::from_polar(1.0, -0.7 * m.re));
        assert!(u.max_abs_diff(&oracle) < 1e-10);
        assert!(u.unitarity_defect() < 1e-10);
    }
}
