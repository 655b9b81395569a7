use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{SparseMatrix, TripletBuffer};

fn check_grid(nx: usize, ny: usize) -> Result<()> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    Ok(())
}

/// Index of interior node `(i, j)` on an `nx`-wide grid.
#[inline]
pub fn grid_index(nx: usize, i: usize, j: usize) -> usize {
    i + nx * j
}

/// Five-point Laplacian on the `nx × ny` interior nodes of the unit square,
/// with coefficients `4` and `−1`, together with the boundary load for
/// `u = 1` on the south and west edges and `u = 0` on the north and east
/// edges.
///
/// Unknowns are ordered lexicographically, `p = i + nx·j` with `i` along x.
///
/// # Panics
///
/// If `nx < 2` or `ny < 2`.
pub fn laplace2d_dirichlet(nx: usize, ny: usize) -> (SparseMatrix<f64>, Vec<f64>) {
    check_grid(nx, ny).expect("laplace2d_dirichlet needs nx, ny >= 2");
    let n = nx * ny;
    let mut t = TripletBuffer::with_capacity(n, n, 5 * n);
    let mut b = vec![0.0; n];
    for j in 0..ny {
        for i in 0..nx {
            let p = grid_index(nx, i, j);
            t.push(p, p, 4.0);
            if i > 0 {
                t.push(p, p - 1, -1.0);
            } else {
                b[p] += 1.0;
            }
            if i + 1 < nx {
                t.push(p, p + 1, -1.0);
            }
            if j > 0 {
                t.push(p, p - nx, -1.0);
            } else {
                b[p] += 1.0;
            }
            if j + 1 < ny {
                t.push(p, p + nx, -1.0);
            }
        }
    }
    let k = SparseMatrix::from_triplets(&t).expect("stencil indices are in range");
    (k, b)
}

/// `K_i = K0 − s_i·I` with `s_i = i·delta_s` for `i = 1..=count`.
pub fn helmholtz_sequence(
    k0: &SparseMatrix<f64>,
    delta_s: f64,
    count: usize,
) -> Result<Vec<SparseMatrix<f64>>> {
    if !k0.is_square() {
        return Err(Error::dims(
            "helmholtz_sequence",
            "square",
            format!("{:?}", k0.shape()),
        ));
    }
    if !(delta_s > 0.0) {
        return Err(Error::InvalidArgument("delta_s must be positive".into()));
    }
    let eye = SparseMatrix::identity(k0.nrows());
    (1..=count)
        .map(|i| crate::sparse::shifted_combine(-(i as f64) * delta_s, &eye, k0))
        .collect()
}

/// Unit vector at the node nearest the centre of the grid.
pub fn point_source(nx: usize, ny: usize) -> Vec<f64> {
    let mut b = vec![0.0; nx * ny];
    b[grid_index(nx, nx / 2, ny / 2)] = 1.0;
    b
}

/// Coefficient fields for [`fem_pair_2d`].
#[derive(Debug, Clone, PartialEq)]
pub enum KappaField {
    Constant(f64),
    /// `log10 κ` is a sum of a few random plane waves, scaled so that `κ`
    /// stays within `[10^−contrast, 10^contrast]`.
    RandomLog {
        seed: u64,
        contrast: f64,
    },
}

impl Default for KappaField {
    fn default() -> Self {
        KappaField::Constant(1.0)
    }
}

impl KappaField {
    /// Materializes the field as a function of `(x, y)`.
    pub fn sampler(&self) -> Box<dyn Fn(f64, f64) -> f64 + Send + Sync> {
        match *self {
            KappaField::Constant(c) => Box::new(move |_, _| c),
            KappaField::RandomLog { seed, contrast } => {
                const MODES: usize = 6;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let waves: Vec<[f64; 4]> = (0..MODES)
                    .map(|_| {
                        [
                            rng.random_range(-3.0..3.0),
                            rng.random_range(-3.0..3.0),
                            rng.random_range(0.0..std::f64::consts::TAU),
                            rng.random_range(0.5..1.0),
                        ]
                    })
                    .collect();
                let total: f64 = waves.iter().map(|w| w[3]).sum();
                Box::new(move |x, y| {
                    let s: f64 = waves
                        .iter()
                        .map(|&[kx, ky, ph, amp]| {
                            amp * (std::f64::consts::PI * (kx * x + ky * y) + ph).sin()
                        })
                        .sum();
                    10f64.powf(contrast * s / total)
                })
            }
        }
    }
}

fn harmonic_mean(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Stiffness/mass pair on the `nx × ny` interior nodes of the unit square
/// with homogeneous Dirichlet boundary.
///
/// `K` is the variable-coefficient five-point operator whose edge
/// coefficients are harmonic means of `kappa` at the two end nodes (boundary
/// nodes included), scaled by `hy/hx` along x and `hx/hy` along y. For
/// `kappa ≡ 1` on a square grid this is exactly the Laplacian of
/// [`laplace2d_dirichlet`]. `M = hx·hy·I` is the lumped mass matrix.
pub fn fem_pair_2d(
    nx: usize,
    ny: usize,
    kappa: &dyn Fn(f64, f64) -> f64,
) -> Result<(SparseMatrix<f64>, SparseMatrix<f64>)> {
    check_grid(nx, ny)?;
    let hx = 1.0 / (nx + 1) as f64;
    let hy = 1.0 / (ny + 1) as f64;

    // κ on the full (nx+2) × (ny+2) node grid
    let w = nx + 2;
    let mut kv = vec![0.0; w * (ny + 2)];
    for jj in 0..ny + 2 {
        for ii in 0..w {
            let v = kappa(ii as f64 * hx, jj as f64 * hy);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "kappa must be positive and finite, got {v} at ({}, {})",
                    ii as f64 * hx,
                    jj as f64 * hy
                )));
            }
            kv[ii + w * jj] = v;
        }
    }
    let at = |ii: usize, jj: usize| kv[ii + w * jj];

    let n = nx * ny;
    let (cx, cy) = (hy / hx, hx / hy);
    let mut t = TripletBuffer::with_capacity(n, n, 5 * n);
    for j in 0..ny {
        for i in 0..nx {
            let p = grid_index(nx, i, j);
            // padded coordinates of this node
            let (ii, jj) = (i + 1, j + 1);
            let here = at(ii, jj);
            let west = cx * harmonic_mean(here, at(ii - 1, jj));
            let east = cx * harmonic_mean(here, at(ii + 1, jj));
            let south = cy * harmonic_mean(here, at(ii, jj - 1));
            let north = cy * harmonic_mean(here, at(ii, jj + 1));
            t.push(p, p, west + east + south + north);
            if i > 0 {
                t.push(p, p - 1, -west);
            }
            if i + 1 < nx {
                t.push(p, p + 1, -east);
            }
            if j > 0 {
                t.push(p, p - nx, -south);
            }
            if j + 1 < ny {
                t.push(p, p + nx, -north);
            }
        }
    }
    let k = SparseMatrix::from_triplets(&t)?;
    let m = SparseMatrix::from_diagonal(&vec![hx * hy; n]);
    Ok((k, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_rows_and_rhs() {
        let (k, b) = laplace2d_dirichlet(10, 10);
        assert_eq!(k.shape(), (100, 100));
        assert_eq!(k.nnz(), 5 * 100 - 4 * 10);
        // interior node (4, 5)
        let p = grid_index(10, 4, 5);
        assert_eq!(k.get(p, p), 4.0);
        for q in [p - 1, p + 1, p - 10, p + 10] {
            assert_eq!(k.get(p, q), -1.0);
        }
        assert_eq!(b[p], 0.0);
        assert_eq!(b[0], 2.0);
        assert_eq!(b[5], 1.0);
        assert_eq!(b[grid_index(10, 0, 7)], 1.0);
        assert_eq!(b[grid_index(10, 9, 9)], 0.0);
        assert_eq!(k.transpose(), k);
    }

    #[test]
    #[should_panic]
    fn laplace_rejects_tiny_grid() {
        laplace2d_dirichlet(1, 4);
    }

    #[test]
    fn helmholtz_shifts_diagonal() {
        let (k0, _) = laplace2d_dirichlet(4, 3);
        let seq = helmholtz_sequence(&k0, 0.01, 200).unwrap();
        assert_eq!(seq.len(), 200);
        assert!((seq[199].get(0, 0) - (4.0 - 2.0)).abs() < 1e-14);
        assert!((seq[0].get(5, 5) - 3.99).abs() < 1e-15);
        for m in &seq {
            assert_eq!(m.structure_diff(&k0), None);
        }
        assert!(helmholtz_sequence(&k0, 0.0, 3).is_err());
    }

    #[test]
    fn fem_pair_constant_kappa_is_laplacian() {
        let (k, m) = fem_pair_2d(6, 6, &|_, _| 1.0).unwrap();
        let (lap, _) = laplace2d_dirichlet(6, 6);
        assert_eq!(k.structure_diff(&lap), None);
        for (a, b) in k.values().iter().zip(lap.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        let h2 = 1.0 / 49.0;
        assert!(m.diagonal().iter().all(|&v| (v - h2).abs() < 1e-16));
        assert_eq!(m.nnz(), 36);
    }

    #[test]
    fn fem_pair_constant_vector_hits_boundary_only() {
        let (k, _) = fem_pair_2d(3, 3, &|_, _| 1.0).unwrap();
        let y = k.matvec(&[1.0; 9]).unwrap();
        assert_eq!(y[4], 0.0);
        assert_eq!(y[0], 2.0);
        assert_eq!(y[1], 1.0);
    }

    #[test]
    fn fem_pair_variable_kappa_is_symmetric() {
        let field = KappaField::RandomLog {
            seed: 7,
            contrast: 1.5,
        };
        let (k, _) = fem_pair_2d(8, 5, &*field.sampler()).unwrap();
        let kt = k.transpose();
        assert_eq!(k.structure_diff(&kt), None);
        for (a, b) in k.values().iter().zip(kt.values()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
        // weakly diagonally dominant, strictly on boundary rows
        for j in 0..k.ncols() {
            let off: f64 = k
                .col_iter(j)
                .filter(|&(i, _)| i != j)
                .map(|(_, v)| v.abs())
                .sum();
            assert!(k.get(j, j) >= off * (1.0 - 1e-14));
        }
    }

    #[test]
    fn fem_pair_rejects_nonpositive_kappa() {
        assert!(fem_pair_2d(4, 4, &|x, _| x - 0.5).is_err());
        assert!(fem_pair_2d(1, 4, &|_, _| 1.0).is_err());
    }

    #[test]
    fn random_field_is_bounded_and_seeded() {
        let f = KappaField::RandomLog {
            seed: 3,
            contrast: 2.0,
        }
        .sampler();
        let g = KappaField::RandomLog {
            seed: 3,
            contrast: 2.0,
        }
        .sampler();
        for k in 0..50 {
            let (x, y) = (k as f64 / 49.0, 1.0 - k as f64 / 70.0);
            let v = f(x, y);
            assert_eq!(v, g(x, y));
            assert!((1e-2..=1e2).contains(&v));
        }
    }

    #[test]
    fn point_source_is_unit() {
        let b = point_source(5, 4);
        assert_eq!(b.iter().sum::<f64>(), 1.0);
        assert_eq!(b[grid_index(5, 2, 2)], 1.0);
    }
}
