//! Blockwise eigendecomposition of Hermitian matrices.
//!
//! The operators built in this crate conserve phonon numbers or the JCM
//! excitation count, so their nonzero pattern splits into many small
//! connected components. Each component is diagonalized on its own; the
//! result is the exact spectral decomposition of the full matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::TILE;
use crate::C64;

#[derive(Clone, Debug)]
struct EigenBlock {
    indices: Vec<usize>,
    eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors in block coordinates.
    vectors: DMatrix<C64>,
}

impl EigenBlock {
    /// Coefficients `⟨v_k|ψ⟩` for every eigenvector of the block.
    fn coefficients(&self, psi: &DVector<C64>) -> DVector<C64> {
        let local =
            DVector::from_iterator(self.indices.len(), self.indices.iter().map(|&i| psi[i]));
        self.vectors.ad_mul(&local)
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    dim: usize,
    blocks: Vec<EigenBlock>,
}

impl SpectralDecomposition {
    /// Decomposes `matrix`, which must be Hermitian (only the lower triangle
    /// of each block is read by the eigensolver).
    pub fn of_hermitian(matrix: &DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.ncols(),
            });
        }
        let components = connected_components(matrix);
        let mut blocks = Vec::with_capacity(components.len());
        for indices in components {
            blocks.push(diagonalize_block(matrix, indices)?);
        }
        Ok(SpectralDecomposition { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.indices.len())
            .max()
            .unwrap_or(0)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.eigenvalues.iter().copied())
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `f(H)·ψ`.
    pub fn apply_fn(&self, psi: &DVector<C64>, f: impl Fn(f64) -> C64) -> DVector<C64> {
        assert_eq!(psi.len(), self.dim, "state dimension mismatch");
        let mut out = DVector::zeros(self.dim);
        for block in &self.blocks {
            let mut coeff = block.coefficients(psi);
            for (c, &lambda) in coeff.iter_mut().zip(&block.eigenvalues) {
                *c *= f(lambda);
            }
            let local = &block.vectors * coeff;
            for (k, &i) in block.indices.iter().enumerate() {
                out[i] = local[k];
            }
        }
        out
    }

    /// `exp(−iHt)·ψ`.
    pub fn propagate(&self, psi: &DVector<C64>, t: f64) -> DVector<C64> {
        self.apply_fn(psi, |lambda| C64::from_polar(1.0, -lambda * t))
    }

    /// `⟨ψ|f(H)|ψ⟩ = Σ_k f(λ_k)·|⟨v_k|ψ⟩|²` for real `f`.
    pub fn expectation_fn(&self, psi: &DVector<C64>, f: impl Fn(f64) -> f64) -> f64 {
        self.weights(psi)
            .into_iter()
            .map(|(lambda, w)| f(lambda) * w)
            .sum()
    }

    /// Pairs `(λ_k, |⟨v_k|ψ⟩|²)` over every eigenvector.
    pub fn weights(&self, psi: &DVector<C64>) -> Vec<(f64, f64)> {
        assert_eq!(psi.len(), self.dim, "state dimension mismatch");
        let mut out = Vec::with_capacity(self.dim);
        for block in &self.blocks {
            let coeff = block.coefficients(psi);
            out.extend(
                block
                    .eigenvalues
                    .iter()
                    .zip(coeff.iter())
                    .map(|(&l, c)| (l, c.norm_sqr())),
            );
        }
        out
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Groups indices linked by a nonzero off-diagonal entry. Components come
/// out ordered by their smallest index, members ascending.
fn connected_components(matrix: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = matrix.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    let zero = C64::new(0.0, 0.0);
    for jb in (0..n).step_by(TILE) {
        for ib in (jb..n).step_by(TILE) {
            for j in jb..(jb + TILE).min(n) {
                for i in ib.max(j + 1)..(ib + TILE).min(n) {
                    if matrix[(i, j)] != zero || matrix[(j, i)] != zero {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri.max(rj)] = ri.min(rj);
                        }
                    }
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = components.len();
            components.push(Vec::new());
        }
        components[slot[root]].push(i);
    }
    components
}

fn diagonalize_block(matrix: &DMatrix<C64>, indices: Vec<usize>) -> Result<EigenBlock> {
    let size = indices.len();
    if size == 1 {
        let i = indices[0];
        return Ok(EigenBlock {
            indices,
            eigenvalues: vec![matrix[(i, i)].re],
            vectors: DMatrix::identity(1, 1),
        });
    }
    let block = DMatrix::from_fn(size, size, |r, c| matrix[(indices[r], indices[c])]);
    let eig = SymmetricEigen::try_new(block, f64::EPSILON, 0).ok_or(Error::Eigensolver(size))?;
    Ok(EigenBlock {
        indices,
        eigenvalues: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    })
}
