//! Reference computations for the integration tests. Everything here works on
//! raw matrices built from a known eigenbasis, so no result depends on the
//! library's spectral decomposition or square roots.
#![allow(dead_code)]

use collapsekit::measurement::{AlgebraicState, Observable, VectorState};
use collapsekit::operator::HermitianOperator;
use collapsekit::Tolerances;
use nalgebra::{DMatrix, DVector};
use num::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C = Complex<f64>;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;

pub const TOL: Tolerances = Tolerances::DEFAULT;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-ish unitary from the QR factors of a Ginibre matrix.
pub fn unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    gaussian(dim, dim, rng).qr().q()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// An observable known by construction: sorted distinct values and the
/// projectors onto groups of columns of a unitary.
#[derive(Debug, Clone)]
pub struct Known {
    pub values: Vec<f64>,
    pub projectors: Vec<CMat>,
}

impl Known {
    pub fn matrix(&self) -> CMat {
        let dim = self.projectors[0].nrows();
        self.values
            .iter()
            .zip(&self.projectors)
            .fold(CMat::zeros(dim, dim), |acc, (v, p)| acc + p.scale(*v))
    }

    pub fn observable(&self, name: &str) -> Observable {
        let op = HermitianOperator::new(self.matrix(), &TOL).expect("hermitian");
        let obs = Observable::new(name, &op, 1e-6, &TOL).expect("decomposes");
        assert_eq!(obs.outcome_count(), self.values.len());
        obs
    }
}

/// `outcomes` distinct values spread over the columns of `basis`.
pub fn known_in_basis(basis: &CMat, outcomes: usize, rng: &mut ChaCha8Rng) -> Known {
    let dim = basis.nrows();
    assert!(outcomes >= 1 && outcomes <= dim);
    let mut groups: Vec<usize> = (0..dim).map(|k| if k < outcomes { k } else { rng.random_range(0..outcomes) }).collect();
    for k in (1..dim).rev() {
        groups.swap(k, rng.random_range(0..=k));
    }
    let mut values: Vec<f64> = Vec::new();
    let mut v = rng.random_range(-2.0..-1.0);
    for _ in 0..outcomes {
        values.push(v);
        v += rng.random_range(0.3..1.5);
    }
    let projectors = (0..outcomes)
        .map(|g| {
            let mut p = CMat::zeros(dim, dim);
            for (col, _) in groups.iter().enumerate().filter(|(_, &x)| x == g) {
                let u = basis.column(col);
                p += u * u.adjoint();
            }
            p
        })
        .collect();
    Known { values, projectors }
}

pub fn known(dim: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Known {
    let u = unitary(dim, rng);
    known_in_basis(&u, outcomes, rng)
}

/// `n·σ` for a unit vector; index 0 is the -1 outcome.
pub fn known_qubit(n: [f64; 3]) -> Known {
    let [x, y, z] = n;
    let half = |s: f64| {
        CMat::from_row_slice(
            2,
            2,
            &[
                C::new((1.0 + s * z) / 2.0, 0.0),
                C::new(s * x / 2.0, -s * y / 2.0),
                C::new(s * x / 2.0, s * y / 2.0),
                C::new((1.0 - s * z) / 2.0, 0.0),
            ],
        )
    };
    Known {
        values: vec![-1.0, 1.0],
        projectors: vec![half(-1.0), half(1.0)],
    }
}

pub fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

pub fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> CVec {
    let v = gaussian(dim, 1, rng).column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}

/// Mixed state `G G^H / Tr` with a Ginibre `G` of random rank.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let rank = rng.random_range(1..=dim);
    let g = gaussian(dim, rank, rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m.unscale(t)
}

pub fn state(density: &CMat) -> AlgebraicState {
    AlgebraicState::new(HermitianOperator::new(density.clone(), &TOL).unwrap(), &TOL).unwrap()
}

pub fn vector_state(v: &CVec) -> VectorState {
    VectorState::new(v.clone(), &TOL).unwrap()
}

pub fn expect(rho: &CMat, x: &CMat) -> f64 {
    (rho * x).trace().re
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Smallest eigenvalue through the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `h` doubled.
pub fn min_eigenvalue(h: &CMat) -> f64 {
    let n = h.nrows();
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let sym = (&real + real.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// Row-major tuples over the given axis sizes, last axis fastest.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..s).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Random probability vector with a few exact zeros.
pub fn random_distribution(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..len)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { -rng.random::<f64>().ln() })
        .collect();
    let s: f64 = raw.iter().sum();
    if s == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    raw.iter().map(|x| x / s).collect()
}
