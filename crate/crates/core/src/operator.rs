//! Dense complex-matrix substrate.
//!
//! Every operator in the toolkit is a dense `dim x dim` complex matrix.
//! [`HermitianOperator`] carries the self-adjointness contract; spectral
//! decompositions group numerically degenerate eigenvalues into a single
//! projector so that downstream code never sees eigenvectors of a
//! degenerate cluster.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Largest entry magnitude.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    for ((row, col), z) in m.iter().enumerate().map(|(k, z)| ((k % m.nrows(), k / m.nrows()), z)) {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(m.nrows())
}

/// A self-adjoint operator. Storage is exactly Hermitian: the constructor
/// validates within tolerance and then symmetrizes.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = max_abs(&(&matrix - matrix.adjoint()));
        if deviation > tol.herm * max_abs(&matrix) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Takes the Hermitian part `(M + M^H)/2` without validation.
    pub fn symmetrized(matrix: ComplexMatrix) -> Self {
        let adj = matrix.adjoint();
        Self {
            matrix: (matrix + adj).scale(0.5),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]], tol: &Tolerances) -> Result<Self> {
        let n = rows.len();
        let m = ComplexMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| {
            c(rows[i][j], 0.0)
        });
        Self::new(m, tol)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0)));
        Self {
            matrix: ComplexMatrix::from_diagonal(&d),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    /// Rank-1 projector onto the span of `v`.
    pub fn projector_onto(v: &ComplexVector) -> Result<Self> {
        let norm2 = v.norm_squared();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidArgument("cannot project onto a zero vector".into()));
        }
        Ok(Self::symmetrized((v * v.adjoint()).unscale(norm2)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// `Tr[self · x]`.
    pub fn trace_with(&self, x: &ComplexMatrix) -> C64 {
        trace_product(&self.matrix, x)
    }

    /// Ascending eigenvalues with matching eigenvector columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let eig = SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 0)
            .ok_or(Error::EigenFailure)?;
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            eig.eigenvectors[(i, order[j])]
        });
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Max-entry distance to another operator.
    pub fn distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

pub fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Distinct eigenvalues (strictly increasing) with their orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<HermitianOperator>,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from parts, checking orthogonality and
    /// completeness of the projectors.
    pub fn from_parts(
        eigenvalues: Vec<f64>,
        projectors: Vec<HermitianOperator>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != projectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} eigenvalues for {} projectors",
                eigenvalues.len(),
                projectors.len()
            )));
        }
        if eigenvalues.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "eigenvalues must be strictly increasing".into(),
            ));
        }
        let dim = projectors[0].dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            same_dim(dim, p.dim())?;
            for (j, q) in projectors.iter().enumerate().skip(i) {
                let prod = p.matrix() * q.matrix();
                let target = if i == j { p.matrix().clone() } else { ComplexMatrix::zeros(dim, dim) };
                let deviation = max_abs(&(prod - target));
                if deviation > tol.num {
                    return Err(Error::InvalidArgument(format!(
                        "projectors {i} and {j} violate P_iP_j = delta_ij P_i by {deviation:e}"
                    )));
                }
            }
            sum += p.matrix();
        }
        let deviation = max_abs(&(sum - ComplexMatrix::identity(dim, dim)));
        if deviation > tol.num {
            return Err(Error::NotNormalized {
                what: "projector family".into(),
                deviation,
            });
        }
        Ok(Self {
            eigenvalues,
            projectors,
        })
    }

    /// For projector families that are complete and orthogonal by construction.
    pub(crate) fn from_parts_exact(eigenvalues: Vec<f64>, projectors: Vec<HermitianOperator>) -> Self {
        Self {
            eigenvalues,
            projectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Projector ranks, read off the traces.
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| p.trace().round() as usize).collect()
    }

    /// `sum_i alpha_i P_i`.
    pub fn reconstruct(&self) -> HermitianOperator {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (a, p) in self.eigenvalues.iter().zip(&self.projectors) {
            m += p.matrix().scale(*a);
        }
        HermitianOperator::symmetrized(m)
    }
}

/// Splits a Hermitian operator into distinct eigenvalues and projectors.
///
/// Sorted raw eigenvalues are clustered by single linkage: neighbours closer
/// than `degeneracy_gap` share a cluster, whose value is the cluster mean and
/// whose projector is the sum of the rank-1 eigenvector projectors.
pub fn spectral_decompose(
    a: &HermitianOperator,
    degeneracy_gap: f64,
    tol: &Tolerances,
) -> Result<SpectralDecomposition> {
    if !(degeneracy_gap > 0.0) {
        return Err(Error::OutOfRange(format!(
            "degeneracy gap must be positive, got {degeneracy_gap}"
        )));
    }
    let (values, vectors) = a.eigh()?;
    let dim = a.dim();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..dim {
        match clusters.last_mut() {
            Some(cl) if values[k] - values[*cl.last().unwrap()] < degeneracy_gap => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for cl in &clusters {
        eigenvalues.push(cl.iter().map(|&k| values[k]).sum::<f64>() / cl.len() as f64);
        let mut p = ComplexMatrix::zeros(dim, dim);
        for &k in cl {
            let v = vectors.column(k);
            p += v * v.adjoint();
        }
        projectors.push(HermitianOperator::symmetrized(p));
    }
    // Cluster means of well-separated clusters stay strictly increasing.
    SpectralDecomposition::from_parts(eigenvalues, projectors, tol)
}

pub fn is_psd(q: &HermitianOperator, tol: &Tolerances) -> Result<bool> {
    Ok(q.min_eigenvalue()? >= -tol.psd)
}

/// The unique positive semi-definite square root. Eigenvalues in
/// `[-tol.psd, 0)` are treated as zero, and so are positive ones below the
/// eigensolver's backward error `4 n eps max|lambda|`.
pub fn psd_sqrt(q: &HermitianOperator, tol: &Tolerances) -> Result<HermitianOperator> {
    let (values, vectors) = q.eigh()?;
    if values[0] < -tol.psd {
        return Err(Error::NotPsd {
            min_eigenvalue: values[0],
        });
    }
    let n = values.len();
    let scale = values[0].abs().max(values[n - 1].abs());
    let floor = 4.0 * n as f64 * f64::EPSILON * scale;
    let roots = DVector::from_iterator(n, values.iter().map(|&v| c(if v > floor { v.sqrt() } else { 0.0 }, 0.0)));
    let m = &vectors * ComplexMatrix::from_diagonal(&roots) * vectors.adjoint();
    Ok(HermitianOperator::symmetrized(m))
}

/// Max-entry magnitude of `AB - BA`.
pub fn commutator_norm(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(max_abs(&(ab - ba)))
}

/// Kronecker product of two Hermitian operators.
pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::symmetrized(a.matrix().kronecker(b.matrix()))
}

pub fn pauli_x() -> HermitianOperator {
    HermitianOperator::symmetrized(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    ))
}

pub fn pauli_y() -> HermitianOperator {
    HermitianOperator::symmetrized(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
    ))
}

pub fn pauli_z() -> HermitianOperator {
    HermitianOperator::diagonal(&[1.0, -1.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn real(n: usize, entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(n, n, &entries.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn decompose_degenerate_diagonal() {
        let a = HermitianOperator::diagonal(&[1.0, 1.0, 0.0]);
        let d = spectral_decompose(&a, 1e-8, &TOL).unwrap();
        assert_eq!(d.eigenvalues(), &[0.0, 1.0]);
        assert!(d.projectors()[0].distance(&HermitianOperator::diagonal(&[0.0, 0.0, 1.0])) < 1e-12);
        assert!(d.projectors()[1].distance(&HermitianOperator::diagonal(&[1.0, 1.0, 0.0])) < 1e-12);
        assert_eq!(d.ranks(), vec![1, 2]);
    }

    #[test]
    fn decompose_pauli_x() {
        let d = spectral_decompose(&pauli_x(), 1e-8, &TOL).unwrap();
        assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-12);
        let minus = HermitianOperator::new(real(2, &[0.5, -0.5, -0.5, 0.5]), &TOL).unwrap();
        let plus = HermitianOperator::new(real(2, &[0.5, 0.5, 0.5, 0.5]), &TOL).unwrap();
        assert!(d.projectors()[0].distance(&minus) < 1e-12);
        assert!(d.projectors()[1].distance(&plus) < 1e-12);
        assert!(d.reconstruct().distance(&pauli_x()) < 1e-12);
    }

    #[test]
    fn decompose_identity_is_one_cluster() {
        let d = spectral_decompose(&HermitianOperator::identity(4), 1e-8, &TOL).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!(d.projectors()[0].distance(&HermitianOperator::identity(4)) < 1e-12);
    }

    #[test]
    fn gap_merges_near_degenerate_values() {
        let a = HermitianOperator::diagonal(&[0.0, 1e-6, 2.0]);
        assert_eq!(spectral_decompose(&a, 1e-8, &TOL).unwrap().len(), 3);
        let merged = spectral_decompose(&a, 1e-3, &TOL).unwrap();
        assert_eq!(merged.ranks(), vec![2, 1]);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_gap() {
        let m = real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(HermitianOperator::new(m, &TOL), Err(Error::NotHermitian { .. })));
        assert!(spectral_decompose(&pauli_z(), 0.0, &TOL).is_err());
        let nan = real(2, &[f64::NAN, 0.0, 0.0, 0.0]);
        assert!(matches!(HermitianOperator::new(nan, &TOL), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let r = psd_sqrt(&HermitianOperator::diagonal(&[4.0, 9.0]), &TOL).unwrap();
        assert!(r.distance(&HermitianOperator::diagonal(&[2.0, 3.0])) < 1e-12);
        let p = HermitianOperator::new(real(2, &[0.5, 0.5, 0.5, 0.5]), &TOL).unwrap();
        let root = psd_sqrt(&p, &TOL).unwrap();
        assert!(root.distance(&p) < 1e-12);
        assert!(max_abs(&(root.matrix() * root.matrix() - p.matrix())) < 1e-12);
        assert!(matches!(
            psd_sqrt(&HermitianOperator::diagonal(&[-1.0, 1.0]), &TOL),
            Err(Error::NotPsd { .. })
        ));
        // tiny negative eigenvalues are clamped
        let r = psd_sqrt(&HermitianOperator::diagonal(&[-1e-12, 1.0]), &TOL).unwrap();
        assert!(r.distance(&HermitianOperator::diagonal(&[0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn psd_predicate() {
        assert!(is_psd(&HermitianOperator::diagonal(&[0.0, 1.0]), &TOL).unwrap());
        assert!(!is_psd(&HermitianOperator::diagonal(&[-1.0, 1.0]), &TOL).unwrap());
    }

    #[test]
    fn commutators() {
        let a = HermitianOperator::diagonal(&[1.0, 2.0]);
        let b = HermitianOperator::diagonal(&[3.0, 4.0]);
        assert_eq!(commutator_norm(&a, &b).unwrap(), 0.0);
        assert!((commutator_norm(&pauli_z(), &pauli_x()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(commutator_norm(&pauli_x(), &HermitianOperator::identity(2)).unwrap(), 0.0);
        assert!(matches!(
            commutator_norm(&a, &HermitianOperator::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
