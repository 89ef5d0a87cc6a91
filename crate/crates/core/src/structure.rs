//! Network-level structural analysis: stoichiometric matrix, deficiency,
//! deficiency-zero diagnostics, consistency with certificates, conservativity,
//! and the complex-balance check for a given state.

use crate::exact::{
    positive_nullvector_or_certificate, rat_vec, RatMatrix, Rational, StiemkeResult,
};
use crate::graph::linkage_classes;
use crate::model::{MassActionSystem, ReactionNetwork};
use num_traits::Zero;
use thiserror::Error;

/// The counts entering the deficiency formula `delta = |V| - l - s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficiencyReport {
    pub num_vertices: usize,
    pub num_linkage_classes: usize,
    pub stoich_dim: usize,
    pub deficiency: usize,
}

/// Columns are reaction vectors in edge order (`n x |E|`).
pub fn stoichiometric_matrix(net: &ReactionNetwork) -> RatMatrix {
    let n = net.num_species();
    let mut m = RatMatrix::zeros(n, net.edges.len());
    for (e, rv) in net.reaction_vectors().iter().enumerate() {
        for (i, &v) in rv.iter().enumerate() {
            m[(i, e)] = crate::exact::rat_int(v);
        }
    }
    m
}

pub fn deficiency(net: &ReactionNetwork) -> DeficiencyReport {
    let num_vertices = net.vertices.len();
    let num_linkage_classes = linkage_classes(net).classes.len();
    let stoich_dim = stoichiometric_matrix(net).rank();
    let delta = num_vertices as i64 - num_linkage_classes as i64 - stoich_dim as i64;
    assert!(delta >= 0, "deficiency must be nonnegative");
    DeficiencyReport {
        num_vertices,
        num_linkage_classes,
        stoich_dim,
        deficiency: delta as usize,
    }
}

/// Per-class breakdown of the two conditions whose conjunction is
/// equivalent to deficiency zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficiencyZeroDiagnostics {
    /// Per linkage class: are the class vertices affinely independent?
    pub class_affinely_independent: Vec<bool>,
    /// Are the per-class stoichiometric subspaces linearly independent?
    pub class_subspaces_independent: bool,
}

impl DeficiencyZeroDiagnostics {
    pub fn satisfied(&self) -> bool {
        self.class_affinely_independent.iter().all(|&b| b) && self.class_subspaces_independent
    }
}

pub fn deficiency_zero_diagnostics(net: &ReactionNetwork) -> DeficiencyZeroDiagnostics {
    let linkage = linkage_classes(net);

    let class_affinely_independent = linkage
        .classes
        .iter()
        .map(|class| {
            let base = &net.vertices[class[0]];
            let diffs: Vec<Vec<Rational>> = class[1..]
                .iter()
                .map(|&v| {
                    let d: Vec<i64> = net.vertices[v]
                        .coeffs
                        .iter()
                        .zip(&base.coeffs)
                        .map(|(&a, &b)| a as i64 - b as i64)
                        .collect();
                    rat_vec(&d)
                })
                .collect();
            if diffs.is_empty() {
                true
            } else {
                RatMatrix::from_rows(&diffs).rank() == class.len() - 1
            }
        })
        .collect();

    // Independence of the class subspaces: per-class ranks must add up to
    // the rank of the full stoichiometric matrix.
    let full_rank = stoichiometric_matrix(net).rank();
    let mut rank_sum = 0;
    for class in &linkage.classes {
        let cols: Vec<Vec<i64>> = net
            .edges
            .iter()
            .enumerate()
            .filter(|(_, r)| class.contains(&r.source))
            .map(|(e, _)| net.reaction_vector(e).expect("edge in range"))
            .collect();
        if !cols.is_empty() {
            rank_sum += RatMatrix::from_int_columns(&cols).rank();
        }
    }

    DeficiencyZeroDiagnostics {
        class_affinely_independent,
        class_subspaces_independent: rank_sum == full_rank,
    }
}

/// Consistency verdict with its exact certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    /// A strictly positive per-edge combination of reaction vectors summing
    /// to zero (entries at least 1 after scaling).
    Consistent { lambda: Vec<Rational> },
    /// A vector with nonpositive product against every reaction vector,
    /// strictly negative for at least one edge.
    Inconsistent { separator: Vec<Rational> },
}

impl ConsistencyVerdict {
    /// Exact re-verification against the network's stoichiometric matrix.
    pub fn verify(&self, net: &ReactionNetwork) -> bool {
        let m = stoichiometric_matrix(net);
        match self {
            ConsistencyVerdict::Consistent { lambda } => StiemkeResult::PositiveDependence {
                lambda: lambda.clone(),
            }
            .verify(&m),
            ConsistencyVerdict::Inconsistent { separator } => {
                StiemkeResult::Separator {
                    w: separator.clone(),
                }
                .verify(&m)
            }
        }
    }
}

pub fn is_consistent(net: &ReactionNetwork) -> ConsistencyVerdict {
    if net.edges.is_empty() {
        return ConsistencyVerdict::Consistent { lambda: Vec::new() };
    }
    match positive_nullvector_or_certificate(&stoichiometric_matrix(net)) {
        StiemkeResult::PositiveDependence { lambda } => ConsistencyVerdict::Consistent { lambda },
        StiemkeResult::Separator { w } => ConsistencyVerdict::Inconsistent { separator: w },
    }
}

/// A strictly positive vector orthogonal to every reaction vector, if one
/// exists; its existence bounds every compatibility class.
pub fn is_conservative(net: &ReactionNetwork) -> Option<Vec<Rational>> {
    if net.species.is_empty() {
        return None;
    }
    // With no reactions every positive vector is conserved.
    let mt = stoichiometric_matrix(net).transpose();
    match positive_nullvector_or_certificate(&mt) {
        StiemkeResult::PositiveDependence { lambda } => Some(lambda),
        StiemkeResult::Separator { .. } => None,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("state must be strictly positive (component {component} is {value})")]
    NonpositiveState { component: usize, value: f64 },
}

/// Per-vertex net flux at a state: outflow minus inflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBalanceReport {
    pub balanced: bool,
    pub residuals: Vec<f64>,
}

/// Checks whether `x` is a complex-balanced state of the system: at every
/// vertex the mass-action outflow equals the inflow, with a relative
/// tolerance of 1e-12 (floored at 1e-14 absolute).
pub fn is_complex_balanced_state(
    sys: &MassActionSystem,
    x: &[f64],
) -> Result<ComplexBalanceReport, StructureError> {
    if let Some(i) = x.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(StructureError::NonpositiveState {
            component: i,
            value: x[i],
        });
    }
    assert_eq!(x.len(), sys.network.num_species());

    let net = &sys.network;
    let mut residuals = Vec::with_capacity(net.vertices.len());
    let mut balanced = true;
    for v in 0..net.vertices.len() {
        let mut outflow = 0.0;
        let mut inflow = 0.0;
        for (e, r) in net.edges.iter().enumerate() {
            if r.source == v {
                outflow += sys.rates.k[e] * monomial(x, &net.vertices[v].coeffs);
            }
            if r.target == v {
                inflow += sys.rates.k[e] * monomial(x, &net.vertices[r.source].coeffs);
            }
        }
        let residual = outflow - inflow;
        let scale = outflow.max(inflow);
        if residual.abs() > (1e-12 * scale).max(1e-14) {
            balanced = false;
        }
        residuals.push(residual);
    }
    Ok(ComplexBalanceReport {
        balanced,
        residuals,
    })
}

pub(crate) fn monomial(x: &[f64], exponents: &[u32]) -> f64 {
    x.iter()
        .zip(exponents)
        .map(|(&xi, &e)| xi.powi(e as i32))
        .product()
}

/// Basis of conservation vectors (the left nullspace of the stoichiometric
/// matrix), integer-scaled with content 1.
pub fn conservation_basis(net: &ReactionNetwork) -> Vec<Vec<Rational>> {
    stoichiometric_matrix(net).transpose().nullspace()
}

/// Exact check that `c` is orthogonal to every reaction vector.
pub fn is_conserved_vector(net: &ReactionNetwork, c: &[Rational]) -> bool {
    if c.len() != net.num_species() {
        return false;
    }
    net.reaction_vectors().iter().all(|rv| {
        rv.iter()
            .zip(c)
            .map(|(&ri, ci)| ci * Rational::from_integer(ri.into()))
            .fold(Rational::zero(), |a, b| a + b)
            .is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::model::RateAssignment;
    use crate::parse::parse_network;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().0
    }

    const FIGURE2: &str = "X1 + X2 -> 2 X1\nX2 + X3 -> X1 + X3\nX1 + X3 -> 2 X1\n";
    const IVANOVA: &str = "X + Y -> 2 Y\nY + Z -> 2 Z\nX + Z -> 2 X\n2 X + Y + Z -> 3 X + Y\n";

    #[test]
    fn stoichiometric_matrix_columns() {
        let m = stoichiometric_matrix(&net(FIGURE2));
        assert_eq!(m.column(0), rat_vec(&[1, -1, 0]));
        assert_eq!(m.column(1), rat_vec(&[1, -1, 0]));
        assert_eq!(m.column(2), rat_vec(&[1, 0, -1]));

        let ab = stoichiometric_matrix(&net("A -> B"));
        assert_eq!(ab.column(0), rat_vec(&[-1, 1]));

        let iv = stoichiometric_matrix(&net(IVANOVA));
        assert_eq!(iv.cols(), 4);
        assert_eq!(iv.column(3), rat_vec(&[1, 0, -1]));
    }

    #[test]
    fn deficiency_goldens() {
        let ab = deficiency(&net("A -> B"));
        assert_eq!((ab.num_vertices, ab.num_linkage_classes, ab.stoich_dim), (2, 1, 1));
        assert_eq!(ab.deficiency, 0);

        let fig2 = deficiency(&net(FIGURE2));
        assert_eq!(
            (fig2.num_vertices, fig2.num_linkage_classes, fig2.stoich_dim),
            (4, 1, 2)
        );
        assert_eq!(fig2.deficiency, 1);

        let iv = deficiency(&net(IVANOVA));
        assert_eq!(
            (iv.num_vertices, iv.num_linkage_classes, iv.stoich_dim),
            (8, 4, 2)
        );
        assert_eq!(iv.deficiency, 2);
    }

    #[test]
    fn deficiency_zero_diagnostics_examples() {
        let d = deficiency_zero_diagnostics(&net("A -> B"));
        assert!(d.satisfied());

        let d = deficiency_zero_diagnostics(&net(FIGURE2));
        assert_eq!(d.class_affinely_independent, vec![false]);
        assert!(!d.satisfied());

        let d = deficiency_zero_diagnostics(&net("X1 -> X2\nX3 -> X4\n"));
        assert_eq!(d.class_affinely_independent, vec![true, true]);
        assert!(d.class_subspaces_independent);
        assert!(d.satisfied());
        assert_eq!(deficiency(&net("X1 -> X2\nX3 -> X4\n")).deficiency, 0);
    }

    #[test]
    fn consistency_examples() {
        let v = is_consistent(&net("A -> B\nB -> C\nC -> A\n"));
        assert_eq!(
            v,
            ConsistencyVerdict::Consistent {
                lambda: rat_vec(&[1, 1, 1])
            }
        );

        let v = is_consistent(&net("A -> B"));
        match &v {
            ConsistencyVerdict::Inconsistent { separator } => {
                assert!(v.verify(&net("A -> B")));
                assert_eq!(separator.len(), 2);
            }
            other => panic!("expected inconsistent, got {other:?}"),
        }

        let fig2 = net(FIGURE2);
        let v = is_consistent(&fig2);
        assert!(matches!(v, ConsistencyVerdict::Inconsistent { .. }));
        assert!(v.verify(&fig2));
    }

    #[test]
    fn ivanova_is_consistent() {
        let iv = net(IVANOVA);
        let v = is_consistent(&iv);
        assert!(matches!(v, ConsistencyVerdict::Consistent { .. }));
        assert!(v.verify(&iv));
    }

    #[test]
    fn conservativity_examples() {
        assert_eq!(is_conservative(&net(FIGURE2)), Some(rat_vec(&[1, 1, 1])));
        assert_eq!(is_conservative(&net("X -> 0")), None);
        assert_eq!(is_conservative(&net(IVANOVA)), Some(rat_vec(&[1, 1, 1])));
    }

    #[test]
    fn complex_balance_examples() {
        let (n, _) = parse_network("A <-> B").unwrap();
        let sys = MassActionSystem::new(n, RateAssignment::uniform(2, 1.0)).unwrap();
        let rep = is_complex_balanced_state(&sys, &[1.0, 1.0]).unwrap();
        assert!(rep.balanced);
        assert_eq!(rep.residuals, vec![0.0, 0.0]);

        let (n, _) = parse_network("A -> B").unwrap();
        let sys = MassActionSystem::new(n, RateAssignment::uniform(1, 2.0)).unwrap();
        let rep = is_complex_balanced_state(&sys, &[0.5, 1.0]).unwrap();
        assert!(!rep.balanced);
        assert!(rep.residuals[0] > 0.0);

        let (n, _) = parse_network("A -> B\nB -> C\nC -> A\n").unwrap();
        let sys = MassActionSystem::new(n, RateAssignment::uniform(3, 1.0)).unwrap();
        let rep = is_complex_balanced_state(&sys, &[1.0, 1.0, 1.0]).unwrap();
        assert!(rep.balanced);
    }

    #[test]
    fn complex_balance_rejects_nonpositive_state() {
        let (n, _) = parse_network("A <-> B").unwrap();
        let sys = MassActionSystem::new(n, RateAssignment::uniform(2, 1.0)).unwrap();
        assert!(is_complex_balanced_state(&sys, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn conservation_basis_figure2() {
        let basis = conservation_basis(&net(FIGURE2));
        assert_eq!(basis, vec![rat_vec(&[1, 1, 1])]);
        assert!(is_conserved_vector(&net(FIGURE2), &basis[0]));
        assert!(!is_conserved_vector(&net(FIGURE2), &[rat_int(1), rat_int(0), rat_int(0)]));
    }

    #[test]
    fn edgeless_network_is_trivially_conservative() {
        let (n, _) = parse_network("species A B\n").unwrap();
        assert_eq!(n.edges.len(), 0);
        assert_eq!(is_conservative(&n), Some(rat_vec(&[1, 1])));
        assert_eq!(conservation_basis(&n).len(), 2);
        assert!(matches!(is_consistent(&n), ConsistencyVerdict::Consistent { .. }));
    }
}
