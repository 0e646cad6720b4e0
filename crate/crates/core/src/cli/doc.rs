//! Input documents.
//!
//! JSON objects tagged by `kind`. Complex entries are `[re, im]` pairs (a bare
//! number is read as a real entry); matrices are lists of rows.
//!
//! ```json
//! {"kind": "observable", "name": "Z", "matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}
//! {"kind": "vector", "amplitudes": [[1, 0], [0, 0]]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Convention};
use crate::error::{Error, Result};
use crate::incompatibility::{Context, MarginalProblem};
use crate::measurement::{AlgebraicState, Observable, Povm, VectorState, DEFAULT_DEGENERACY_GAP};
use crate::operator::{ComplexMatrix, ComplexVector, HermitianOperator, C64};
use crate::table::{Axis, JointDistribution};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Complex([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }

    fn of(z: C64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

pub type MatrixDoc = Vec<Vec<Entry>>;

pub fn matrix_from_doc(rows: &MatrixDoc) -> Result<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::NotSquare { rows: 0, cols: 0 });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: bad.len(),
        });
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

pub fn matrix_to_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Entry::of(m[(i, j)])).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub matrix: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl ObservableDoc {
    pub fn build(&self, fallback_name: &str, gap: Option<f64>, tol: &Tolerances) -> Result<Observable> {
        let op = HermitianOperator::new(matrix_from_doc(&self.matrix)?, tol)?;
        let name = self.name.clone().unwrap_or_else(|| fallback_name.to_string());
        let gap = gap.or(self.gap).unwrap_or(DEFAULT_DEGENERACY_GAP);
        Observable::new(name, &op, gap, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub density: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorDoc {
    pub amplitudes: Vec<Entry>,
}

impl VectorDoc {
    pub fn build(&self, tol: &Tolerances) -> Result<VectorState> {
        let v = ComplexVector::from_iterator(self.amplitudes.len(), self.amplitudes.iter().map(|e| e.value()));
        VectorState::new(v, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmDoc {
    pub sample_points: Vec<String>,
    pub effects: Vec<MatrixDoc>,
}

/// An initial state given either as a density matrix or as a unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InlineState {
    Density(MatrixDoc),
    Amplitudes(Vec<Entry>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpecDoc {
    pub observables: Vec<ObservableDoc>,
    pub length: usize,
    #[serde(default = "default_convention")]
    pub convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<InlineState>,
}

fn default_convention() -> String {
    "left".into()
}

impl ChainSpecDoc {
    pub fn build(&self, seed: u64, tol: &Tolerances) -> Result<ChainSpec> {
        let observables = self
            .observables
            .iter()
            .enumerate()
            .map(|(k, o)| o.build(&format!("O{k}"), None, tol))
            .collect::<Result<Vec<_>>>()?;
        let convention: Convention = self.convention.parse()?;
        ChainSpec::new(observables, self.length, convention, seed)
    }

    /// The inline state, or the maximally mixed state of the right dimension.
    pub fn initial_state(&self, dim: usize, tol: &Tolerances) -> Result<AlgebraicState> {
        match &self.state {
            None => Ok(AlgebraicState::maximally_mixed(dim)),
            Some(InlineState::Density(m)) => state_from_matrix(m, tol),
            Some(InlineState::Amplitudes(a)) => Ok(VectorDoc { amplitudes: a.clone() }.build(tol)?.to_state()),
        }
    }
}

fn state_from_matrix(m: &MatrixDoc, tol: &Tolerances) -> Result<AlgebraicState> {
    AlgebraicState::new(HermitianOperator::new(matrix_from_doc(m)?, tol)?, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextDoc {
    /// Axis names, in the order of the probability table.
    pub axes: Vec<String>,
    /// Row-major, last axis fastest.
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalProblemDoc {
    pub axes: Vec<AxisDoc>,
    pub contexts: Vec<ContextDoc>,
}

impl MarginalProblemDoc {
    pub fn build(&self, tol: &Tolerances) -> Result<MarginalProblem> {
        let axes = self
            .axes
            .iter()
            .map(|a| match (&a.values, &a.labels) {
                (Some(v), None) => Ok(Axis::values(a.name.clone(), v.clone())),
                (None, Some(l)) => Ok(Axis::labels(a.name.clone(), l.clone())),
                _ => Err(Error::Parse(format!("axis {} needs exactly one of values, labels", a.name))),
            })
            .collect::<Result<Vec<_>>>()?;
        let contexts = self
            .contexts
            .iter()
            .map(|c| {
                let indices = c
                    .axes
                    .iter()
                    .map(|n| {
                        axes.iter()
                            .position(|a| &a.name == n)
                            .ok_or_else(|| Error::Parse(format!("context names unknown axis {n}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let local = indices.iter().map(|&k| axes[k].clone()).collect();
                Ok(Context {
                    axes: indices,
                    distribution: JointDistribution::new(local, c.probabilities.clone(), tol)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MarginalProblem::new(axes, contexts, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    Observable(ObservableDoc),
    State(StateDoc),
    Vector(VectorDoc),
    Povm(PovmDoc),
    ChainSpec(ChainSpecDoc),
    MarginalProblem(MarginalProblemDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Observable(_) => "observable",
            Document::State(_) => "state",
            Document::Vector(_) => "vector",
            Document::Povm(_) => "povm",
            Document::ChainSpec(_) => "chain-spec",
            Document::MarginalProblem(_) => "marginal-problem",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn observable(obs: &Observable) -> Self {
        Document::Observable(ObservableDoc {
            name: Some(obs.name().to_string()),
            matrix: matrix_to_doc(obs.operator().matrix()),
            gap: None,
        })
    }

    pub fn state(rho: &AlgebraicState) -> Self {
        Document::State(StateDoc {
            density: matrix_to_doc(rho.density().matrix()),
        })
    }

    pub fn expect_observable(&self, fallback_name: &str, gap: Option<f64>, tol: &Tolerances) -> Result<Observable> {
        match self {
            Document::Observable(o) => o.build(fallback_name, gap, tol),
            other => Err(wrong_kind("observable", other)),
        }
    }

    /// A `state` or `vector` document as a density operator.
    pub fn expect_state(&self, tol: &Tolerances) -> Result<AlgebraicState> {
        match self {
            Document::State(s) => state_from_matrix(&s.density, tol),
            Document::Vector(v) => Ok(v.build(tol)?.to_state()),
            other => Err(wrong_kind("state or vector", other)),
        }
    }

    pub fn expect_vector(&self, tol: &Tolerances) -> Result<VectorState> {
        match self {
            Document::Vector(v) => v.build(tol),
            other => Err(wrong_kind("vector", other)),
        }
    }

    pub fn expect_povm(&self, tol: &Tolerances) -> Result<Povm> {
        match self {
            Document::Povm(p) => {
                let effects = p
                    .effects
                    .iter()
                    .map(|m| HermitianOperator::new(matrix_from_doc(m)?, tol))
                    .collect::<Result<Vec<_>>>()?;
                Povm::new(p.sample_points.clone(), effects, tol)
            }
            other => Err(wrong_kind("povm", other)),
        }
    }
}

fn wrong_kind(expected: &str, found: &Document) -> Error {
    Error::Parse(format!("expected a {expected} document, found {}", found.kind()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{max_abs, pauli_y};

    const TOL: Tolerances = Tolerances::DEFAULT;

    #[test]
    fn observable_round_trip() {
        let y = Observable::new("Y", &pauli_y(), 1e-8, &TOL).unwrap();
        let doc = Document::observable(&y);
        let back = Document::parse(&doc.to_json()).unwrap();
        assert_eq!(doc, back);
        let y2 = back.expect_observable("?", None, &TOL).unwrap();
        assert_eq!(y2.name(), "Y");
        assert!(max_abs(&(y2.operator().matrix() - y.operator().matrix())) < 1e-15);
    }

    #[test]
    fn full_precision_survives() {
        let x = 0.1 + 0.2;
        let doc = Document::Vector(VectorDoc {
            amplitudes: vec![Entry::Complex([x, 1.0 / 3.0])],
        });
        assert_eq!(Document::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = Document::parse("{\"kind\": \"observable\",\n \"matrix\": [[1, 0], [0]]").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = Document::parse(r#"{"kind": "teapot"}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn kinds_are_checked() {
        let v = Document::parse(r#"{"kind": "vector", "amplitudes": [1, 0]}"#).unwrap();
        assert!(v.expect_observable("A", None, &TOL).is_err());
        assert_eq!(v.expect_state(&TOL).unwrap().dim(), 2);
        let bad = Document::parse(r#"{"kind": "observable", "matrix": [[0, 1], [0, 0]]}"#).unwrap();
        assert!(matches!(bad.expect_observable("A", None, &TOL), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn marginal_problem_document() {
        let text = r#"{
            "kind": "marginal-problem",
            "axes": [{"name": "X", "values": [0, 1]}, {"name": "A", "labels": ["a", "b"]}],
            "contexts": [{"axes": ["A", "X"], "probabilities": [0.1, 0.2, 0.3, 0.4]}]
        }"#;
        let Document::MarginalProblem(doc) = Document::parse(text).unwrap() else { panic!() };
        let p = doc.build(&TOL).unwrap();
        assert_eq!(p.contexts()[0].axes, vec![1, 0]);
    }
}
