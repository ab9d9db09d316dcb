//! Truncated two-mode Fock space tensored with a qubit, and the operators
//! acting on it.
//!
//! Basis states `|n_x, n_y, s⟩` are laid out as
//! `index = ((n_x·(n_max_y+1)) + n_y)·2 + s` with `s = 0` for the electronic
//! ground state `|−⟩` and `s = 1` for the excited state `|+⟩`. Every file
//! export uses this ordering.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;
use crate::{C64, HERMITIAN_TOL};

/// Electronic level of the two-level ion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qubit {
    /// `|−⟩`, basis offset 0.
    Ground,
    /// `|+⟩`, basis offset 1.
    Excited,
}

impl Qubit {
    pub fn bit(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }

    pub fn flip(self) -> Qubit {
        match self {
            Qubit::Ground => Qubit::Excited,
            Qubit::Excited => Qubit::Ground,
        }
    }

    fn from_bit(bit: usize) -> Qubit {
        if bit == 0 {
            Qubit::Ground
        } else {
            Qubit::Excited
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Lower,
    Raise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Shape of the truncated space: phonon cutoffs for the x and y modes.
/// The z mode is frozen in its ground state and not represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    n_max_x: usize,
    n_max_y: usize,
}

impl SpaceDescriptor {
    pub fn new(n_max_x: usize, n_max_y: usize) -> Self {
        SpaceDescriptor { n_max_x, n_max_y }
    }

    pub fn n_max_x(&self) -> usize {
        self.n_max_x
    }

    pub fn n_max_y(&self) -> usize {
        self.n_max_y
    }

    pub fn n_max(&self, mode: Mode) -> usize {
        match mode {
            Mode::X => self.n_max_x,
            Mode::Y => self.n_max_y,
        }
    }

    /// Number of phonon cells, `(n_max_x+1)·(n_max_y+1)`.
    pub fn mode_cells(&self) -> usize {
        (self.n_max_x + 1) * (self.n_max_y + 1)
    }

    pub fn dim(&self) -> usize {
        self.mode_cells() * 2
    }

    /// Largest total phonon number representable.
    pub fn max_sector(&self) -> usize {
        self.n_max_x + self.n_max_y
    }

    pub fn contains(&self, n_x: usize, n_y: usize) -> bool {
        n_x <= self.n_max_x && n_y <= self.n_max_y
    }

    pub fn index(&self, n_x: usize, n_y: usize, s: Qubit) -> Result<usize> {
        if !self.contains(n_x, n_y) {
            return Err(Error::OccupationOutOfRange {
                n_x,
                n_y,
                n_max_x: self.n_max_x,
                n_max_y: self.n_max_y,
            });
        }
        Ok(self.index_of(n_x, n_y, s))
    }

    #[inline]
    pub(crate) fn index_of(&self, n_x: usize, n_y: usize, s: Qubit) -> usize {
        (n_x * (self.n_max_y + 1) + n_y) * 2 + s.bit()
    }

    /// Inverse of [`SpaceDescriptor::index`].
    ///
    /// Panics if `index >= dim()`.
    pub fn decode(&self, index: usize) -> (usize, usize, Qubit) {
        assert!(index < self.dim(), "basis index {index} out of range");
        let s = Qubit::from_bit(index % 2);
        let cell = index / 2;
        (cell / (self.n_max_y + 1), cell % (self.n_max_y + 1), s)
    }

    /// All basis states in index order.
    pub fn basis(&self) -> impl Iterator<Item = (usize, usize, Qubit)> + '_ {
        (0..self.dim()).map(move |i| self.decode(i))
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})⊗F({})⊗C2", self.n_max_x, self.n_max_y)
    }
}

pub fn build_space(n_max_x: usize, n_max_y: usize) -> SpaceDescriptor {
    SpaceDescriptor::new(n_max_x, n_max_y)
}

pub(crate) const TILE: usize = 64;

/// Dense operator over a [`SpaceDescriptor`] with no structural promise.
/// Ladder operators live here; observables and Hamiltonians are
/// [`HermitianOperator`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: DMatrix<C64>,
    label: String,
}

impl Operator {
    pub fn from_matrix(
        space: SpaceDescriptor,
        matrix: DMatrix<C64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator {
            space,
            matrix,
            label: label.into(),
        })
    }

    pub(crate) fn zeros(space: SpaceDescriptor, label: impl Into<String>) -> Self {
        Operator {
            space,
            matrix: DMatrix::zeros(space.dim(), space.dim()),
            label: label.into(),
        }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            space: self.space,
            matrix: self.matrix.adjoint(),
            label: format!("{}†", self.label),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    /// Matrix product `self · rhs`. Zero entries of `rhs` are skipped, which
    /// keeps products of the (very sparse) ladder-built operators cheap on
    /// the larger truncations.
    pub fn compose(&self, rhs: &Operator) -> Operator {
        Operator {
            space: self.space,
            matrix: sparse_aware_product(&self.matrix, &rhs.matrix),
            label: format!("{}·{}", self.label, rhs.label),
        }
    }

    pub fn commutator(&self, rhs: &Operator) -> Operator {
        let ab = sparse_aware_product(&self.matrix, &rhs.matrix);
        let ba = sparse_aware_product(&rhs.matrix, &self.matrix);
        Operator {
            space: self.space,
            matrix: ab - ba,
            label: format!("[{}, {}]", self.label, rhs.label),
        }
    }

    pub fn plus(&self, rhs: &Operator) -> Operator {
        Operator {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
            label: format!("{} + {}", self.label, rhs.label),
        }
    }

    pub fn scaled(&self, factor: C64) -> Operator {
        Operator {
            space: self.space,
            matrix: &self.matrix * factor,
            label: self.label.clone(),
        }
    }

    /// Largest elementwise deviation `|M_ij − conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        // Square tiles keep both the column and the mirrored row in cache.
        for jb in (0..n).step_by(TILE) {
            for ib in (jb..n).step_by(TILE) {
                for j in jb..(jb + TILE).min(n) {
                    for i in ib.max(j)..(ib + TILE).min(n) {
                        let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
        worst
    }

    /// Max elementwise modulus, used for commutator and identity checks.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn into_hermitian(self) -> Result<HermitianOperator> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                label: self.label,
                deviation,
            });
        }
        Ok(HermitianOperator { inner: self })
    }
}

/// An [`Operator`] checked to satisfy `M = M†` within
/// [`HERMITIAN_TOL`](crate::HERMITIAN_TOL) elementwise.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    inner: Operator,
}

impl HermitianOperator {
    pub fn from_matrix(
        space: SpaceDescriptor,
        matrix: DMatrix<C64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Operator::from_matrix(space, matrix, label)?.into_hermitian()
    }

    /// For builders whose matrix is Hermitian by construction; skips the
    /// full elementwise check, which dominates on large truncations.
    pub(crate) fn trusted(
        space: SpaceDescriptor,
        matrix: DMatrix<C64>,
        label: impl Into<String>,
    ) -> Self {
        HermitianOperator {
            inner: Operator {
                space,
                matrix,
                label: label.into(),
            },
        }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.inner.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.inner.matrix
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.inner
    }

    pub fn into_operator(self) -> Operator {
        self.inner
    }

    pub fn with_label(self, label: impl Into<String>) -> Self {
        HermitianOperator {
            inner: self.inner.with_label(label),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        self.inner.apply(v)
    }

    /// Real multiple; stays Hermitian.
    pub fn scaled(&self, factor: f64) -> HermitianOperator {
        HermitianOperator {
            inner: self.inner.scaled(C64::new(factor, 0.0)),
        }
    }

    /// Eigendecomposition, block by block over the connected components of
    /// the nonzero pattern.
    pub fn decompose(&self) -> Result<SpectralDecomposition> {
        SpectralDecomposition::of_hermitian(self.matrix())
    }

    /// Whether the operator acts as the identity on the qubit factor,
    /// i.e. commutes with all three Pauli matrices.
    pub fn is_qubit_trivial(&self) -> bool {
        let space = self.space();
        let m = self.matrix();
        let cells = space.mode_cells();
        for b in 0..cells {
            for a in 0..cells {
                let gg = m[(2 * a, 2 * b)];
                let ee = m[(2 * a + 1, 2 * b + 1)];
                let ge = m[(2 * a, 2 * b + 1)];
                let eg = m[(2 * a + 1, 2 * b)];
                if (gg - ee).norm() > HERMITIAN_TOL
                    || ge.norm() > HERMITIAN_TOL
                    || eg.norm() > HERMITIAN_TOL
                {
                    return false;
                }
            }
        }
        true
    }
}

fn sparse_aware_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bkj = b[(k, j)];
            if bkj == C64::new(0.0, 0.0) {
                continue;
            }
            let mut col = out.column_mut(j);
            col.axpy(bkj, &a.column(k), C64::new(1.0, 0.0));
        }
    }
    out
}

pub fn identity(space: SpaceDescriptor) -> HermitianOperator {
    let dim = space.dim();
    HermitianOperator {
        inner: Operator {
            space,
            matrix: DMatrix::identity(dim, dim),
            label: "I".into(),
        },
    }
}

/// Annihilation or creation operator of one mode, identity on the other mode
/// and on the qubit. Truncated: `a†` maps the top Fock layer to zero.
pub fn ladder(space: SpaceDescriptor, mode: Mode, kind: LadderKind) -> Operator {
    let name = match mode {
        Mode::X => "a_x",
        Mode::Y => "a_y",
    };
    let mut lower = Operator::zeros(space, name);
    for (n_x, n_y, s) in space.basis() {
        let n = match mode {
            Mode::X => n_x,
            Mode::Y => n_y,
        };
        if n == 0 {
            continue;
        }
        let (tx, ty) = match mode {
            Mode::X => (n_x - 1, n_y),
            Mode::Y => (n_x, n_y - 1),
        };
        let from = space.index_of(n_x, n_y, s);
        let to = space.index_of(tx, ty, s);
        lower.matrix[(to, from)] = C64::new((n as f64).sqrt(), 0.0);
    }
    match kind {
        LadderKind::Lower => lower,
        LadderKind::Raise => lower.adjoint(),
    }
}

/// Pauli matrix on the qubit factor.
///
/// With `σ_+ = |+⟩⟨−|`: `σ_x = σ_+ + σ_−`, `σ_y = −i(σ_+ − σ_−)`,
/// `σ_z = |+⟩⟨+| − |−⟩⟨−|`, so that `σ_x σ_y = i σ_z`.
pub fn pauli(space: SpaceDescriptor, axis: Axis) -> HermitianOperator {
    let label = match axis {
        Axis::X => "σ_x",
        Axis::Y => "σ_y",
        Axis::Z => "σ_z",
    };
    let mut op = Operator::zeros(space, label);
    let i = C64::new(0.0, 1.0);
    for cell in 0..space.mode_cells() {
        let g = 2 * cell;
        let e = 2 * cell + 1;
        match axis {
            Axis::X => {
                op.matrix[(e, g)] = C64::new(1.0, 0.0);
                op.matrix[(g, e)] = C64::new(1.0, 0.0);
            }
            Axis::Y => {
                op.matrix[(e, g)] = -i;
                op.matrix[(g, e)] = i;
            }
            Axis::Z => {
                op.matrix[(e, e)] = C64::new(1.0, 0.0);
                op.matrix[(g, g)] = C64::new(-1.0, 0.0);
            }
        }
    }
    HermitianOperator { inner: op }
}

/// `C = a_x† a_y + a_x a_y†`.
pub fn correlation_operator(space: SpaceDescriptor) -> HermitianOperator {
    observable(space, ObservableKind::Correlation)
}

/// Vibrational observables that the probe protocol can read out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservableKind {
    TotalNumber,
    Number { mode: Mode },
    QuadraturePosition { mode: Mode },
    QuadratureMomentum { mode: Mode },
    AngularMomentumZ,
    Correlation,
    CorrelationSquared,
}

impl ObservableKind {
    pub fn label(&self) -> String {
        let m = |mode: &Mode| match mode {
            Mode::X => "x",
            Mode::Y => "y",
        };
        match self {
            ObservableKind::TotalNumber => "n_x+n_y".into(),
            ObservableKind::Number { mode } => format!("n_{}", m(mode)),
            ObservableKind::QuadraturePosition { mode } => format!("X_{}", m(mode)),
            ObservableKind::QuadratureMomentum { mode } => format!("P_{}", m(mode)),
            ObservableKind::AngularMomentumZ => "L_z".into(),
            ObservableKind::Correlation => "C_xy".into(),
            ObservableKind::CorrelationSquared => "C_xy^2".into(),
        }
    }
}

pub fn observable(space: SpaceDescriptor, kind: ObservableKind) -> HermitianOperator {
    let i = C64::new(0.0, 1.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sq = |n: usize| (n as f64).sqrt();

    let op = match kind {
        ObservableKind::TotalNumber => number_diagonal(space, |n_x, n_y| (n_x + n_y) as f64),
        ObservableKind::Number { mode: Mode::X } => number_diagonal(space, |n_x, _| n_x as f64),
        ObservableKind::Number { mode: Mode::Y } => number_diagonal(space, |_, n_y| n_y as f64),
        // (a + a†)/√2 and i(a† − a)/√2: one lowering step with its mirror.
        ObservableKind::QuadraturePosition { mode } => {
            single_mode_hopping(space, mode, |n| C64::new(r * sq(n), 0.0))
        }
        ObservableKind::QuadratureMomentum { mode } => {
            single_mode_hopping(space, mode, |n| -i * r * sq(n))
        }
        // a_x† a_y |n_x, n_y⟩ = √((n_x+1) n_y) |n_x+1, n_y−1⟩; L_z = i(a_x a_y† − a_x† a_y).
        ObservableKind::Correlation => {
            transfer(space, |n_x, n_y| C64::new(sq((n_x + 1) * n_y), 0.0))
        }
        ObservableKind::AngularMomentumZ => transfer(space, |n_x, n_y| -i * sq((n_x + 1) * n_y)),
        ObservableKind::CorrelationSquared => {
            let c = observable(space, ObservableKind::Correlation).into_operator();
            c.compose(&c)
        }
    };
    HermitianOperator::trusted(space, op.matrix, kind.label())
}

/// Fills `⟨n−1|·|n⟩ = amp(n)` in `mode` and its conjugate mirror. Lowering
/// past the top layer is dropped, as for the truncated ladder operators.
fn single_mode_hopping(space: SpaceDescriptor, mode: Mode, amp: impl Fn(usize) -> C64) -> Operator {
    let mut op = Operator::zeros(space, "q");
    for (n_x, n_y, s) in space.basis() {
        let (n, tx, ty) = match mode {
            Mode::X if n_x > 0 => (n_x, n_x - 1, n_y),
            Mode::Y if n_y > 0 => (n_y, n_x, n_y - 1),
            _ => continue,
        };
        let from = space.index_of(n_x, n_y, s);
        let to = space.index_of(tx, ty, s);
        let a = amp(n);
        op.matrix[(to, from)] = a;
        op.matrix[(from, to)] = a.conj();
    }
    op
}

/// Fills `⟨n_x+1, n_y−1|·|n_x, n_y⟩ = amp(n_x, n_y)` and its conjugate
/// mirror, skipping moves that leave the truncated space.
fn transfer(space: SpaceDescriptor, amp: impl Fn(usize, usize) -> C64) -> Operator {
    let mut op = Operator::zeros(space, "t");
    for (n_x, n_y, s) in space.basis() {
        if n_y == 0 || n_x == space.n_max_x {
            continue;
        }
        let from = space.index_of(n_x, n_y, s);
        let to = space.index_of(n_x + 1, n_y - 1, s);
        let a = amp(n_x, n_y);
        op.matrix[(to, from)] = a;
        op.matrix[(from, to)] = a.conj();
    }
    op
}

fn number_diagonal(space: SpaceDescriptor, f: impl Fn(usize, usize) -> f64) -> Operator {
    let mut op = Operator::zeros(space, "n");
    for (idx, (n_x, n_y, _)) in space.basis().enumerate() {
        op.matrix[(idx, idx)] = C64::new(f(n_x, n_y), 0.0);
    }
    op
}

/// Basis indices with `n_x + n_y = total` and qubit `s`, ascending in `n_x`.
pub fn sector_basis(space: SpaceDescriptor, total: usize, s: Qubit) -> Result<Vec<usize>> {
    if total > space.max_sector() {
        return Err(Error::SectorOutOfRange {
            n: total,
            max: space.max_sector(),
        });
    }
    let lo = total.saturating_sub(space.n_max_y);
    let hi = total.min(space.n_max_x);
    Ok((lo..=hi)
        .map(|n_x| space.index_of(n_x, total - n_x, s))
        .collect())
}

/// Principal submatrix of a Hermitian operator on a subset of basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedOperator {
    indices: Vec<usize>,
    matrix: DMatrix<C64>,
    label: String,
}

impl RestrictedOperator {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(SpectralDecomposition::of_hermitian(&self.matrix)?.eigenvalues())
    }
}

pub fn restrict(op: &HermitianOperator, indices: &[usize]) -> Result<RestrictedOperator> {
    let dim = op.dim();
    let mut seen = HashSet::with_capacity(indices.len());
    for &index in indices {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        if !seen.insert(index) {
            return Err(Error::DuplicateIndex(index));
        }
    }
    let m = op.matrix();
    let matrix = DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
        m[(indices[r], indices[c])]
    });
    Ok(RestrictedOperator {
        indices: indices.to_vec(),
        matrix,
        label: op.label().to_string(),
    })
}
