//! The collapse product.
//!
//! For observables `A`, `B` with projectors `P_i`, `Q_j` the collapse product
//! assigns the joint effect `P_i ∘ Q_j = P_i Q_j P_i` to the outcome pair
//! `(alpha_i, beta_j)`, where `X ∘ Y = sqrt(X) Y sqrt(X)` is the sequential
//! product. The product is neither commutative nor associative, so an n-fold
//! product needs a bracketing, encoded by [`BracketTree`]. Every node is
//! evaluated as a sequential product of the effect tables of its children,
//! which keeps each intermediate effect positive semi-definite.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measurement::{Observable, PovmMixture};
use crate::operator::{psd_sqrt, same_dim, ComplexMatrix, HermitianOperator};
use crate::table::{Axis, JointEffectTable, Shape};
use crate::tolerance::Tolerances;

/// Largest `n` accepted by [`enumerate_bracketings`].
pub const MAX_ENUMERATED_OPERANDS: usize = 12;

/// Largest outcome-tuple count for which a dense effect table is built.
pub const MAX_TABLE_TUPLES: usize = 10_000_000;

/// Bracketing of an ordered measurement sequence.
///
/// Leaves carry measurement indices in left-to-right order. A `reverse` node
/// evaluates `L ∘◂ R := R ▸∘ L`: the right operand collapses the left one,
/// while tuple axes stay in sequence order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BracketTree {
    Leaf(usize),
    Node {
        left: Box<BracketTree>,
        right: Box<BracketTree>,
        reverse: bool,
    },
}

impl BracketTree {
    pub fn node(left: BracketTree, right: BracketTree) -> Self {
        BracketTree::Node {
            left: Box::new(left),
            right: Box::new(right),
            reverse: false,
        }
    }

    pub fn reverse_node(left: BracketTree, right: BracketTree) -> Self {
        BracketTree::Node {
            left: Box::new(left),
            right: Box::new(right),
            reverse: true,
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            BracketTree::Leaf(i) => out.push(*i),
            BracketTree::Node { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BracketTree::Leaf(_) => 1,
            BracketTree::Node { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Checks that the leaves are exactly `0..n` in order.
    pub fn validate(&self, n: usize) -> Result<()> {
        let leaves = self.leaves();
        if leaves.len() != n || leaves.iter().enumerate().any(|(k, &i)| k != i) {
            return Err(Error::MalformedTree(format!(
                "leaves {leaves:?} do not enumerate 0..{n} in order"
            )));
        }
        Ok(())
    }

    /// Same shape with every node flagged reverse (or forward).
    pub fn with_direction(&self, reverse: bool) -> Self {
        match self {
            BracketTree::Leaf(i) => BracketTree::Leaf(*i),
            BracketTree::Node { left, right, .. } => BracketTree::Node {
                left: Box::new(left.with_direction(reverse)),
                right: Box::new(right.with_direction(reverse)),
                reverse,
            },
        }
    }

    fn offset(&self, by: usize) -> Self {
        match self {
            BracketTree::Leaf(i) => BracketTree::Leaf(i + by),
            BracketTree::Node { left, right, reverse } => BracketTree::Node {
                left: Box::new(left.offset(by)),
                right: Box::new(right.offset(by)),
                reverse: *reverse,
            },
        }
    }
}

/// `(L,R)` for a forward node, `(L<R)` for a reverse node, leaves as indices.
impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTree::Leaf(i) => write!(f, "{i}"),
            BracketTree::Node { left, right, reverse } => {
                write!(f, "({left}{}{right})", if *reverse { '<' } else { ',' })
            }
        }
    }
}

impl FromStr for BracketTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let tree = parse_tree(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::MalformedTree(format!("trailing input at position {pos}")));
        }
        Ok(tree)
    }
}

fn parse_tree(chars: &[char], pos: &mut usize) -> Result<BracketTree> {
    match chars.get(*pos) {
        Some('(') => {
            *pos += 1;
            let left = parse_tree(chars, pos)?;
            let reverse = match chars.get(*pos) {
                Some(',') => false,
                Some('<') => true,
                other => {
                    return Err(Error::MalformedTree(format!(
                        "expected ',' or '<' at position {}, found {other:?}",
                        *pos
                    )))
                }
            };
            *pos += 1;
            let right = parse_tree(chars, pos)?;
            if chars.get(*pos) != Some(&')') {
                return Err(Error::MalformedTree(format!("expected ')' at position {}", *pos)));
            }
            *pos += 1;
            Ok(BracketTree::Node {
                left: Box::new(left),
                right: Box::new(right),
                reverse,
            })
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let digits: String = chars[start..*pos].iter().collect();
            digits
                .parse()
                .map(BracketTree::Leaf)
                .map_err(|e| Error::MalformedTree(format!("bad leaf index {digits}: {e}")))
        }
        other => Err(Error::MalformedTree(format!(
            "unexpected {other:?} at position {}",
            *pos
        ))),
    }
}

/// Catalan number `C_k = (2k)! / (k! (k+1)!)`.
pub fn catalan(k: usize) -> u64 {
    // C_{j+1} = C_j * 2(2j+1) / (j+2), exact in integers
    (0..k).fold(1u64, |acc, j| acc * 2 * (2 * j as u64 + 1) / (j as u64 + 2))
}

/// Every bracketing of `n` ordered operands (forward nodes), `C_{n-1}` of them.
pub fn enumerate_bracketings(n: usize) -> Result<Vec<BracketTree>> {
    if !(1..=MAX_ENUMERATED_OPERANDS).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "bracketings are enumerated for 1..={MAX_ENUMERATED_OPERANDS} operands, got {n}"
        )));
    }
    let mut memo: Vec<Vec<BracketTree>> = vec![Vec::new(); n + 1];
    memo[1] = vec![BracketTree::Leaf(0)];
    for len in 2..=n {
        let mut trees = Vec::new();
        for split in 1..len {
            for left in &memo[split] {
                for right in &memo[len - split] {
                    trees.push(BracketTree::node(left.clone(), right.offset(split)));
                }
            }
        }
        memo[len] = trees;
    }
    Ok(memo.swap_remove(n))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("a measurement sequence needs at least one operand".into()));
    }
    Ok(())
}

/// `((...((0,1),2)...),n-1)`: the state collapses after every measurement.
pub fn left_fold_tree(n: usize) -> Result<BracketTree> {
    check_n(n)?;
    Ok((1..n).fold(BracketTree::Leaf(0), |acc, k| BracketTree::node(acc, BracketTree::Leaf(k))))
}

/// `(0,(1,(...(n-2,n-1)...)))`: one combined collapse after the last-but-one.
pub fn right_fold_tree(n: usize) -> Result<BracketTree> {
    check_n(n)?;
    Ok((0..n - 1)
        .rev()
        .fold(BracketTree::Leaf(n - 1), |acc, k| BracketTree::node(BracketTree::Leaf(k), acc)))
}

/// Left fold of reverse products, `((...((0<1)<2)...)<n-1)`.
pub fn reverse_fold_tree(n: usize) -> Result<BracketTree> {
    Ok(left_fold_tree(n)?.with_direction(true))
}

/// `X ∘ Y = sqrt(X) Y sqrt(X)` for positive semi-definite `X`.
pub fn sequential_product(
    x: &HermitianOperator,
    y: &HermitianOperator,
    tol: &Tolerances,
) -> Result<HermitianOperator> {
    same_dim(x.dim(), y.dim())?;
    let root = psd_sqrt(x, tol)?;
    Ok(sandwich(&root, y))
}

fn sandwich(root: &HermitianOperator, y: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::symmetrized(root.matrix() * y.matrix() * root.matrix())
}

/// Axes and effects of a partial product; `projective` marks a bare PVM,
/// whose effects are their own square roots.
struct Partial {
    axes: Vec<Axis>,
    effects: Vec<HermitianOperator>,
    projective: bool,
}

fn pvm_table(observable: &Observable) -> Partial {
    Partial {
        axes: vec![Axis::of(observable)],
        effects: observable.projectors().to_vec(),
        projective: true,
    }
}

fn roots(p: &Partial, tol: &Tolerances) -> Result<Vec<HermitianOperator>> {
    if p.projective {
        return Ok(p.effects.clone());
    }
    p.effects.iter().map(|e| psd_sqrt(e, tol)).collect()
}

/// Sequential product of two effect tables: `E_L(s) ∘ E_R(t)` (or the reverse
/// `E_R(t) ∘ E_L(s)`) for every pair of sub-tuples, left axes first.
fn combine(left: Partial, right: Partial, reverse: bool, tol: &Tolerances) -> Result<Partial> {
    let count = left.effects.len() * right.effects.len();
    if count > MAX_TABLE_TUPLES {
        return Err(Error::TableTooLarge(count));
    }
    let mut effects = Vec::with_capacity(count);
    if reverse {
        let roots = roots(&right, tol)?;
        for l in &left.effects {
            for r in &roots {
                effects.push(sandwich(r, l));
            }
        }
    } else {
        for root in &roots(&left, tol)? {
            for r in &right.effects {
                effects.push(sandwich(root, r));
            }
        }
    }
    let mut axes = left.axes;
    axes.extend(right.axes);
    Ok(Partial {
        axes,
        effects,
        projective: false,
    })
}

/// Pairwise collapse product `P_i Q_j P_i` over `(alpha_i, beta_j)`.
pub fn collapse_effect_pair(a: &Observable, b: &Observable, tol: &Tolerances) -> Result<JointEffectTable> {
    same_dim(a.dim(), b.dim())?;
    let p = combine(pvm_table(a), pvm_table(b), false, tol)?;
    JointEffectTable::new(p.axes, p.effects)
}

/// Reverse pairwise product `Q_j P_i Q_j`, axes still ordered `(A, B)`.
pub fn reverse_collapse_pair(a: &Observable, b: &Observable, tol: &Tolerances) -> Result<JointEffectTable> {
    same_dim(a.dim(), b.dim())?;
    let p = combine(pvm_table(a), pvm_table(b), true, tol)?;
    JointEffectTable::new(p.axes, p.effects)
}

/// n-fold collapse product for the bracketing `tree`.
pub fn collapse_effect_tree(
    observables: &[Observable],
    tree: &BracketTree,
    tol: &Tolerances,
) -> Result<JointEffectTable> {
    tree.validate(observables.len())?;
    let dim = observables[0].dim();
    for o in observables {
        same_dim(dim, o.dim())?;
    }
    let count: usize = observables.iter().map(Observable::outcome_count).product();
    if count > MAX_TABLE_TUPLES {
        return Err(Error::TableTooLarge(count));
    }
    let p = evaluate(observables, tree, tol)?;
    JointEffectTable::new(p.axes, p.effects)
}

fn evaluate(
    observables: &[Observable],
    tree: &BracketTree,
    tol: &Tolerances,
) -> Result<Partial> {
    match tree {
        BracketTree::Leaf(i) => Ok(pvm_table(&observables[*i])),
        BracketTree::Node { left, right, reverse } => combine(
            evaluate(observables, left, tol)?,
            evaluate(observables, right, tol)?,
            *reverse,
            tol,
        ),
    }
}

/// Plain ordered products `P_i Q_j ...` (not Hermitian unless the observables
/// commute), row-major over the same tuples as a collapse table.
pub fn ordered_product_effects(observables: &[Observable]) -> Result<Vec<ComplexMatrix>> {
    let dim = observables
        .first()
        .ok_or_else(|| Error::InvalidArgument("no observables".into()))?
        .dim();
    let mut acc = vec![ComplexMatrix::identity(dim, dim)];
    for o in observables {
        same_dim(dim, o.dim())?;
        acc = acc
            .iter()
            .flat_map(|m| o.projectors().iter().map(move |p| m * p.matrix()))
            .collect();
    }
    Ok(acc)
}

/// Collapse product of two POVMs relative to a shared generating family:
/// `E(X x Y) = sum_{l,m} kappa^A_l(X) kappa^B_m(Y) sqrt(Q_l) Q_m sqrt(Q_l)`.
pub fn q_relative_collapse(a: &PovmMixture, b: &PovmMixture, tol: &Tolerances) -> Result<JointEffectTable> {
    if a.qs().len() != b.qs().len() {
        return Err(Error::InvalidArgument(format!(
            "generating families differ in size: {} vs {}",
            a.qs().len(),
            b.qs().len()
        )));
    }
    for (k, (qa, qb)) in a.qs().iter().zip(b.qs()).enumerate() {
        same_dim(qa.dim(), qb.dim())?;
        if qa.distance(qb) > tol.num {
            return Err(Error::InvalidArgument(format!("generating operator {k} differs between the POVMs")));
        }
    }
    let dim = a.povm().dim();
    let qs = a.qs();
    let roots = qs.iter().map(|q| psd_sqrt(q, tol)).collect::<Result<Vec<_>>>()?;
    // sqrt(Q_l) Q_m sqrt(Q_l) for every (l, m)
    let blocks: Vec<Vec<HermitianOperator>> = roots
        .iter()
        .map(|r| qs.iter().map(|q| sandwich(r, q)).collect())
        .collect();
    let axes = vec![
        Axis::labels("A", a.sample_points().to_vec()),
        Axis::labels("B", b.sample_points().to_vec()),
    ];
    let mut effects = Vec::with_capacity(Shape::of(&axes).count());
    for x in 0..a.sample_points().len() {
        for y in 0..b.sample_points().len() {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (l, row) in blocks.iter().enumerate() {
                let ka = a.kappas()[l][x];
                if ka == 0.0 {
                    continue;
                }
                for (mu, block) in row.iter().enumerate() {
                    let w = ka * b.kappas()[mu][y];
                    if w != 0.0 {
                        m += block.matrix().scale(w);
                    }
                }
            }
            effects.push(HermitianOperator::symmetrized(m));
        }
    }
    JointEffectTable::new(axes, effects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{povm_from_mixture, pvm_from_observable, AlgebraicState, VectorState};
    use crate::operator::{max_abs, pauli_x, pauli_z};
    use crate::table::joint_distribution;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn z() -> Observable {
        Observable::new("Z", &pauli_z(), 1e-8, &TOL).unwrap()
    }
    fn x() -> Observable {
        Observable::new("X", &pauli_x(), 1e-8, &TOL).unwrap()
    }

    #[test]
    fn catalan_closed_form() {
        // (2n-2)! / ((n-1)! n!) for n = 1..=7, computed with factorials
        let fact = |k: u64| (1..=k).product::<u64>().max(1);
        for n in 1..=7u64 {
            let closed = fact(2 * n - 2) / (fact(n - 1) * fact(n));
            assert_eq!(catalan(n as usize - 1), closed);
            assert_eq!(enumerate_bracketings(n as usize).unwrap().len() as u64, closed);
        }
        assert!(enumerate_bracketings(0).is_err());
        assert!(enumerate_bracketings(13).is_err());
    }

    #[test]
    fn bracketings_are_distinct_and_valid() {
        let trees = enumerate_bracketings(6).unwrap();
        let set: std::collections::HashSet<_> = trees.iter().collect();
        assert_eq!(set.len(), trees.len());
        for t in &trees {
            t.validate(6).unwrap();
        }
    }

    #[test]
    fn fold_shapes() {
        assert_eq!(left_fold_tree(3).unwrap().to_string(), "((0,1),2)");
        assert_eq!(right_fold_tree(3).unwrap().to_string(), "(0,(1,2))");
        assert_eq!(reverse_fold_tree(3).unwrap().to_string(), "((0<1)<2)");
        assert_eq!(left_fold_tree(1).unwrap(), BracketTree::Leaf(0));
        assert_eq!(left_fold_tree(2).unwrap(), right_fold_tree(2).unwrap());
        assert!(left_fold_tree(0).is_err());
    }

    #[test]
    fn tree_parsing() {
        for s in ["((0,1),2)", "(0<(1,2))", "3", "((0,1),(2,3))"] {
            assert_eq!(s.parse::<BracketTree>().unwrap().to_string(), s);
        }
        for bad in ["(0,1", "(0;1)", "0,1", "()"] {
            assert!(bad.parse::<BracketTree>().is_err(), "{bad}");
        }
        let t: BracketTree = "(1,0)".parse().unwrap();
        assert!(t.validate(2).is_err());
    }

    #[test]
    fn sequential_product_examples() {
        let p = z().projectors()[1].clone();
        assert!(sequential_product(&p, &p, &TOL).unwrap().distance(&p) < 1e-12);
        let y = x().operator();
        assert!(sequential_product(&HermitianOperator::identity(2), &y, &TOL).unwrap().distance(&y) < 1e-12);
        // P_+^Z P_+^X P_+^Z = |0><0| / 2
        let r = sequential_product(&z().projectors()[1], &x().projectors()[1], &TOL).unwrap();
        assert!(r.distance(&HermitianOperator::diagonal(&[0.5, 0.0])) < 1e-12);
        assert!(sequential_product(&HermitianOperator::diagonal(&[-1.0, 1.0]), &y, &TOL).is_err());
    }

    #[test]
    fn sequential_product_is_nonlinear_on_the_left() {
        let x1 = HermitianOperator::diagonal(&[1.0, 0.0]);
        let x2 = x().projectors()[1].clone();
        let y = HermitianOperator::diagonal(&[1.0, 0.0]);
        let lhs = sequential_product(&x1.add(&x2).unwrap(), &y, &TOL).unwrap();
        let rhs = sequential_product(&x1, &y, &TOL)
            .unwrap()
            .add(&sequential_product(&x2, &y, &TOL).unwrap())
            .unwrap();
        assert!(lhs.distance(&rhs) > 1e-3);
    }

    #[test]
    fn pair_tables() {
        let zz = collapse_effect_pair(&z(), &z(), &TOL).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { z().projectors()[i].clone() } else { HermitianOperator::zeros(2) };
                assert!(zz.get(&[i, j]).distance(&expected) < 1e-12);
            }
        }
        let zx = collapse_effect_pair(&z(), &x(), &TOL).unwrap();
        assert!(zx.normalization_error() < 1e-12);
        for e in zx.effects() {
            assert!((e.trace() - 0.5).abs() < 1e-12);
            assert!(e.min_eigenvalue().unwrap() > -1e-12);
            // half a rank-1 projector: E^2 = E/2
            assert!(max_abs(&(e.matrix() * e.matrix() - e.matrix().scale(0.5))) < 1e-12);
        }
        let a = Observable::diagonal("A", &[1.0, 2.0, 2.0]).unwrap();
        let b = Observable::diagonal("B", &[0.0, 0.0, 5.0]).unwrap();
        let t = collapse_effect_pair(&a, &b, &TOL).unwrap();
        let plain = ordered_product_effects(&[a.clone(), b.clone()]).unwrap();
        assert!(t.max_distance_to(&plain) < 1e-12);
        assert!(collapse_effect_pair(&a, &z(), &TOL).is_err());
    }

    #[test]
    fn reverse_pairs() {
        let zx = reverse_collapse_pair(&z(), &x(), &TOL).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let q = x().projectors()[j].matrix().clone();
                let expected = &q * z().projectors()[i].matrix() * &q;
                assert!(max_abs(&(zx.get(&[i, j]).matrix() - expected)) < 1e-12);
            }
        }
        assert_eq!(zx.axes()[0].name, "Z");
        let zz = reverse_collapse_pair(&z(), &z(), &TOL).unwrap();
        assert!(zz.max_distance(&collapse_effect_pair(&z(), &z(), &TOL).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn trees_of_small_size() {
        let single = collapse_effect_tree(&[z()], &BracketTree::Leaf(0), &TOL).unwrap();
        assert!(single.get(&[0]).distance(&z().projectors()[0]) < 1e-12);
        let pair = collapse_effect_tree(&[z(), x()], &left_fold_tree(2).unwrap(), &TOL).unwrap();
        assert!(pair.max_distance(&collapse_effect_pair(&z(), &x(), &TOL).unwrap()).unwrap() < 1e-12);
        assert!(collapse_effect_tree(&[z(), x()], &BracketTree::Leaf(0), &TOL).is_err());
    }

    #[test]
    fn zxz_is_not_associative() {
        let obs = [z(), x(), z()];
        let left = collapse_effect_tree(&obs, &left_fold_tree(3).unwrap(), &TOL).unwrap();
        let right = collapse_effect_tree(&obs, &right_fold_tree(3).unwrap(), &TOL).unwrap();
        assert!(left.normalization_error() < 1e-12 && right.normalization_error() < 1e-12);
        // left fold: sqrt(P Q P) = P / sqrt(2), so (P∘Q)∘P' = delta P / 2
        // right fold: P Q P' Q P = P / 4 for every triple with P = P'
        let p_plus = z().projectors()[1].clone();
        assert!(left.get(&[1, 1, 1]).distance(&p_plus.scale(0.5)) < 1e-12);
        assert!(left.get(&[1, 1, 0]).distance(&HermitianOperator::zeros(2)) < 1e-12);
        assert!(right.get(&[1, 1, 0]).distance(&p_plus.scale(0.25)) < 1e-12);
        assert!(left.max_distance(&right).unwrap() > 0.2);
    }

    #[test]
    fn right_fold_matches_repeated_luders_expression() {
        // P∘(Q∘R) = P Q R Q P
        let obs = [z(), x(), z()];
        let right = collapse_effect_tree(&obs, &right_fold_tree(3).unwrap(), &TOL).unwrap();
        for t in right.shape().tuples() {
            let (p, q, r) = (
                obs[0].projectors()[t[0]].matrix(),
                obs[1].projectors()[t[1]].matrix(),
                obs[2].projectors()[t[2]].matrix(),
            );
            let expected = p * q * r * q * p;
            assert!(max_abs(&(right.get(&t).matrix() - expected)) < 1e-12);
        }
    }

    #[test]
    fn first_marginal_reproduces_density() {
        let rho = VectorState::basis(2, 0).to_state();
        let d = joint_distribution(&collapse_effect_pair(&z(), &x(), &TOL).unwrap(), &rho, &TOL).unwrap();
        assert!((d.get(&[1, 1]) - 0.5).abs() < 1e-12);
        assert!((d.get(&[1, 0]) - 0.5).abs() < 1e-12);
        assert!(d.get(&[0, 0]).abs() < 1e-12 && d.get(&[0, 1]).abs() < 1e-12);
        let mixed = AlgebraicState::maximally_mixed(2);
        let t = collapse_effect_pair(&z(), &x(), &TOL).unwrap();
        let d = joint_distribution(&t, &mixed, &TOL).unwrap();
        for (tuple, p) in d.iter() {
            assert!((p - t.get(&tuple).trace() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn q_relative_reductions() {
        let z = z();
        let labels = vec!["-".to_string(), "+".to_string()];
        let ident = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let m = povm_from_mixture(labels.clone(), ident.clone(), z.projectors().to_vec(), &TOL).unwrap();
        let t = q_relative_collapse(&m, &m, &TOL).unwrap();
        let pair = collapse_effect_pair(&z, &z, &TOL).unwrap();
        for (a, b) in t.effects().iter().zip(pair.effects()) {
            assert!(a.distance(b) < 1e-12);
        }
        // coarse-grained second POVM built on the same family
        let coarse = povm_from_mixture(vec!["all".into()], vec![vec![1.0], vec![1.0]], z.projectors().to_vec(), &TOL)
            .unwrap();
        let t = q_relative_collapse(&m, &coarse, &TOL).unwrap();
        let pvm = pvm_from_observable(&z, &[vec![-1.0], vec![1.0]], &TOL).unwrap();
        for (e, p) in t.effects().iter().zip(pvm.projectors()) {
            assert!(e.distance(p) < 1e-12);
        }

        let one = vec![HermitianOperator::identity(2)];
        let a = povm_from_mixture(labels.clone(), vec![vec![0.25, 0.75]], one.clone(), &TOL).unwrap();
        let b = povm_from_mixture(vec!["u".into(), "v".into(), "w".into()], vec![vec![0.5, 0.3, 0.2]], one, &TOL).unwrap();
        let t = q_relative_collapse(&a, &b, &TOL).unwrap();
        assert!(t.get(&[1, 1]).distance(&HermitianOperator::identity(2).scale(0.75 * 0.3)) < 1e-12);
        assert!(q_relative_collapse(&m, &a, &TOL).is_err());
    }

    #[test]
    fn q_relative_trine_is_normalized() {
        let qs: Vec<HermitianOperator> = (0..3)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let v = crate::operator::ComplexVector::from_vec(vec![
                    crate::operator::c((theta / 2.0).cos(), 0.0),
                    crate::operator::c((theta / 2.0).sin(), 0.0),
                ]);
                HermitianOperator::projector_onto(&v).unwrap().scale(2.0 / 3.0)
            })
            .collect();
        let kappas = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let labels: Vec<String> = (0..3).map(|k| format!("t{k}")).collect();
        let trine = povm_from_mixture(labels, kappas, qs, &TOL).unwrap();
        let t = q_relative_collapse(&trine, &trine, &TOL).unwrap();
        assert!(t.normalization_error() < 1e-12);
        assert!(t.min_eigenvalue().unwrap() > -1e-12);
    }
}
