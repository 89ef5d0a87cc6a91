//! Linear Lyapunov functions: validation of a supplied separator, the
//! geometric construction for deficiency-zero non-weakly-reversible networks,
//! derivative evaluation along the mass-action field, and the classical
//! entropy-like function for complex-balanced equilibria.

use crate::exact::{
    dot, rat_vec, vector_in_span_orthogonal_to, RatMatrix, Rational, SpanError,
};
use crate::graph::{linkage_classes, strongly_connected_components, is_weakly_reversible};
use crate::model::{MassActionSystem, ReactionNetwork};
use crate::structure::{deficiency, monomial};
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Sign of `w · (target - source)` for one edge of a linear Lyapunov
/// function; positive signs are impossible by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSign {
    Negative,
    Zero,
}

/// A linear function `V(x) = w · x` that decreases along every positive
/// trajectory for every rate assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearLyapunov {
    pub w: Vec<Rational>,
    pub edge_signs: Vec<EdgeSign>,
}

impl LinearLyapunov {
    pub fn w_f64(&self) -> Vec<f64> {
        self.w
            .iter()
            .map(|r| r.to_f64().expect("rational fits in f64"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LyapunovError {
    /// `edge` is the offending edge for a positive product, or `None` when
    /// every product vanishes (no strict edge).
    #[error("vector is not a separator{}", match .edge {
        Some(e) => format!(": edge {e} has positive product"),
        None => ": every edge product vanishes".to_string(),
    })]
    NotASeparator { edge: Option<usize> },
    #[error("network is weakly reversible; no linear Lyapunov function exists")]
    NotApplicable,
    #[error("network has deficiency {deficiency}, not zero")]
    NotDeficiencyZero { deficiency: usize },
    #[error(transparent)]
    Span(#[from] SpanError),
}

/// Validates `w` against every reaction vector and records per-edge signs.
pub fn lyapunov_from_separator(
    net: &ReactionNetwork,
    w: &[Rational],
) -> Result<LinearLyapunov, LyapunovError> {
    let mut edge_signs = Vec::with_capacity(net.edges.len());
    let mut any_negative = false;
    for (e, rv) in net.reaction_vectors().iter().enumerate() {
        let d = dot(w, &rat_vec(rv));
        if d.is_positive() {
            return Err(LyapunovError::NotASeparator { edge: Some(e) });
        }
        if d.is_negative() {
            any_negative = true;
            edge_signs.push(EdgeSign::Negative);
        } else {
            edge_signs.push(EdgeSign::Zero);
        }
    }
    if !any_negative {
        // All products vanish: V is constant along the flow, not decreasing.
        return Err(LyapunovError::NotASeparator { edge: None });
    }
    Ok(LinearLyapunov {
        w: w.to_vec(),
        edge_signs,
    })
}

/// Record of the choices made by [`construct_w_deficiency_zero`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionTrace {
    /// Vertices of the chosen non-strongly-connected linkage class.
    pub linkage_class: Vec<usize>,
    /// Vertices of the chosen terminal strongly connected component.
    pub terminal_scc: Vec<usize>,
    /// Vertices of the chosen component of the class minus the terminal SCC.
    pub v1: Vec<usize>,
    /// All remaining vertices.
    pub v2: Vec<usize>,
    /// Edge index of the chosen crossing reaction (from `v1` into `v2`).
    pub crossing_edge: usize,
    pub dim_s_g: usize,
    pub dim_s_g1: usize,
    pub dim_s_g2: usize,
}

/// Builds a linear Lyapunov function for a deficiency-zero network that is
/// not weakly reversible by splitting off a terminal component and solving
/// for a vector of the stoichiometric subspace orthogonal to both sides.
///
/// The result satisfies `w · (target - source) = 0` for every edge inside
/// either part and a common strictly negative value on every crossing edge.
pub fn construct_w_deficiency_zero(
    net: &ReactionNetwork,
) -> Result<(LinearLyapunov, ConstructionTrace), LyapunovError> {
    if is_weakly_reversible(net) {
        return Err(LyapunovError::NotApplicable);
    }
    let report = deficiency(net);
    if report.deficiency != 0 {
        return Err(LyapunovError::NotDeficiencyZero {
            deficiency: report.deficiency,
        });
    }

    let linkage = linkage_classes(net);
    let scc = strongly_connected_components(net);

    // The non-strongly-connected linkage class with the smallest vertex.
    let l1 = linkage
        .classes
        .iter()
        .find(|class| {
            let first_scc = scc.partition.class_of[class[0]];
            class.iter().any(|&v| scc.partition.class_of[v] != first_scc)
        })
        .expect("a non-weakly-reversible network has a non-strongly-connected class");

    // Its terminal SCC with the smallest vertex.
    let sc1 = scc
        .partition
        .classes
        .iter()
        .enumerate()
        .find(|(id, class)| {
            scc.terminal[*id] && l1.contains(&class[0])
        })
        .map(|(_, class)| class.clone())
        .expect("every linkage class contains a terminal component");

    // Connected component of the class minus the terminal SCC, smallest
    // vertex first.
    let remainder: Vec<usize> = l1.iter().copied().filter(|v| !sc1.contains(v)).collect();
    let v1 = {
        let mut seen: Vec<usize> = vec![remainder[0]];
        let mut frontier = vec![remainder[0]];
        while let Some(v) = frontier.pop() {
            for r in &net.edges {
                for (a, b) in [(r.source, r.target), (r.target, r.source)] {
                    if a == v && remainder.contains(&b) && !seen.contains(&b) {
                        seen.push(b);
                        frontier.push(b);
                    }
                }
            }
        }
        seen.sort_unstable();
        seen
    };
    let v2: Vec<usize> = (0..net.vertices.len()).filter(|v| !v1.contains(v)).collect();

    let vectors = net.reaction_vectors();
    let all: Vec<Vec<Rational>> = vectors.iter().map(|rv| rat_vec(rv)).collect();
    let mut within = Vec::new();
    let mut within_g1 = Vec::new();
    let mut within_g2 = Vec::new();
    let mut crossing = Vec::new();
    for (e, r) in net.edges.iter().enumerate() {
        match (v1.contains(&r.source), v1.contains(&r.target)) {
            (true, true) => {
                within.push(all[e].clone());
                within_g1.push(all[e].clone());
            }
            (false, false) => {
                within.push(all[e].clone());
                within_g2.push(all[e].clone());
            }
            (true, false) => crossing.push(e),
            (false, true) => {
                unreachable!("terminality forbids edges into the split-off component")
            }
        }
    }
    let crossing_edge = crossing[0];

    let w = vector_in_span_orthogonal_to(&all, &within, &all[crossing_edge])?;

    // Exact sanity of the construction: within-part products vanish and
    // every crossing product equals the same negative value.
    let mut edge_signs = Vec::with_capacity(net.edges.len());
    let crossing_value = dot(&w, &all[crossing_edge]);
    assert!(crossing_value.is_negative());
    for (e, rv) in all.iter().enumerate() {
        let d = dot(&w, rv);
        if crossing.contains(&e) {
            assert_eq!(d, crossing_value, "crossing products must agree");
            edge_signs.push(EdgeSign::Negative);
        } else {
            assert!(d.is_zero(), "within-part product must vanish");
            edge_signs.push(EdgeSign::Zero);
        }
    }

    let dim_s_g = RatMatrix::from_columns(&all).rank();
    let rank_of = |vecs: &[Vec<Rational>]| {
        if vecs.is_empty() {
            0
        } else {
            RatMatrix::from_columns(vecs).rank()
        }
    };
    let dim_s_g1 = rank_of(&within_g1);
    let dim_s_g2 = rank_of(&within_g2);
    assert_eq!(dim_s_g, dim_s_g1 + dim_s_g2 + 1, "dimension split identity");

    let trace = ConstructionTrace {
        linkage_class: l1.clone(),
        terminal_scc: sc1,
        v1,
        v2,
        crossing_edge,
        dim_s_g,
        dim_s_g1,
        dim_s_g2,
    };
    Ok((LinearLyapunov { w, edge_signs }, trace))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("state must be strictly positive (component {component} is {value})")]
    NonpositiveState { component: usize, value: f64 },
    #[error("dimension mismatch")]
    DimensionMismatch,
}

/// Time derivative of `V(x) = w · x` along the mass-action field:
/// the sum over edges of `k x^source (w · (target - source))`.
pub fn vdot(sys: &MassActionSystem, w: &[f64], x: &[f64]) -> Result<f64, EvalError> {
    check_positive(x)?;
    let net = &sys.network;
    if w.len() != net.num_species() || x.len() != net.num_species() {
        return Err(EvalError::DimensionMismatch);
    }
    let mut total = 0.0;
    for (e, r) in net.edges.iter().enumerate() {
        let rv = net.reaction_vector(e).expect("edge in range");
        let wd: f64 = w.iter().zip(&rv).map(|(wi, &ri)| wi * ri as f64).sum();
        total += sys.rates.k[e] * monomial(x, &net.vertices[r.source].coeffs) * wd;
    }
    Ok(total)
}

/// The classical convex function `sum x_i ln x_i - x_i - x_i ln x*_i`
/// anchored at a positive reference state.
pub fn hj_value(x: &[f64], xstar: &[f64]) -> Result<f64, EvalError> {
    if x.len() != xstar.len() {
        return Err(EvalError::DimensionMismatch);
    }
    check_positive(x)?;
    check_positive(xstar)?;
    Ok(x.iter()
        .zip(xstar)
        .map(|(&xi, &si)| xi * xi.ln() - xi - xi * si.ln())
        .sum())
}

fn check_positive(x: &[f64]) -> Result<(), EvalError> {
    match x.iter().position(|&v| v.is_nan() || v <= 0.0) {
        Some(i) => Err(EvalError::NonpositiveState {
            component: i,
            value: x[i],
        }),
        None => Ok(()),
    }
}
