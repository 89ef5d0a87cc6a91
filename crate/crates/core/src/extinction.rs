//! Extinction classification: the structural strong-extinction set for
//! first-order networks, the separator-plus-conservation certificate for
//! guaranteed weak extinction, and empirical per-species trajectory reports.

use crate::dynamics::Trajectory;
use crate::exact::Rational;
use crate::graph::{is_weakly_reversible, strongly_connected_components};
use crate::model::ReactionNetwork;
use crate::structure::{deficiency, is_conservative, is_consistent, ConsistencyVerdict};
use thiserror::Error;

/// What the structural analysis can promise about weak extinction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtinctionGuarantee {
    /// For every rate assignment and positive initial condition, some
    /// species has liminf zero.
    WeakGuaranteed,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisFlags {
    pub deficiency: usize,
    pub deficiency_zero: bool,
    pub weakly_reversible: bool,
    pub conservative: bool,
}

/// Certificate backing a weak-extinction guarantee: a separating vector plus
/// a positive conservation vector (bounded classes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtinctionCertificate {
    pub kind: ExtinctionGuarantee,
    pub separator: Option<Vec<Rational>>,
    pub conservation: Option<Vec<Rational>>,
    pub flags: HypothesisFlags,
}

/// Weak extinction is guaranteed when the network is inconsistent (yielding
/// a linear function strictly decreasing on the positive orthant) and
/// conservative (bounding every compatibility class).
pub fn weak_extinction_certificate(net: &ReactionNetwork) -> ExtinctionCertificate {
    let def = deficiency(net);
    let wr = is_weakly_reversible(net);
    let conservation = is_conservative(net);
    let separator = match is_consistent(net) {
        ConsistencyVerdict::Inconsistent { separator } => Some(separator),
        ConsistencyVerdict::Consistent { .. } => None,
    };
    let kind = if separator.is_some() && conservation.is_some() {
        ExtinctionGuarantee::WeakGuaranteed
    } else {
        ExtinctionGuarantee::None
    };
    ExtinctionCertificate {
        kind,
        separator,
        conservation: conservation.clone(),
        flags: HypothesisFlags {
            deficiency: def.deficiency,
            deficiency_zero: def.deficiency == 0,
            weakly_reversible: wr,
            conservative: conservation.is_some(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtinctionError {
    #[error("vertex {vertex} violates the first-order shape (single-species source, empty or single-species target)")]
    NotFirstOrder { vertex: usize },
    #[error("network is weakly reversible; no species is structurally forced to zero")]
    NotApplicable,
}

/// Strong-extinction set of a first-order network, with the layer structure
/// used to prove it (layer 0 feeds the terminal components directly, each
/// later layer feeds the previous one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongExtinctionAnalysis {
    /// Species (ids) whose vertex lies outside every terminal component;
    /// each tends to zero for every rate assignment and positive start.
    pub extinct_species: Vec<usize>,
    /// Layers N1, N2, ... as species ids.
    pub layers: Vec<Vec<usize>>,
}

/// For networks whose sources are single species and whose targets are empty
/// or single species, returns every species outside the terminal strongly
/// connected components, layered by distance to the terminal set.
pub fn strong_extinction_species_linear(
    net: &ReactionNetwork,
) -> Result<StrongExtinctionAnalysis, ExtinctionError> {
    for r in &net.edges {
        if net.vertices[r.source].single_species().is_none() {
            return Err(ExtinctionError::NotFirstOrder { vertex: r.source });
        }
        let tgt = &net.vertices[r.target];
        if !tgt.is_zero() && tgt.single_species().is_none() {
            return Err(ExtinctionError::NotFirstOrder { vertex: r.target });
        }
    }
    if is_weakly_reversible(net) {
        return Err(ExtinctionError::NotApplicable);
    }

    let scc = strongly_connected_components(net);
    let in_terminal =
        |v: usize| -> bool { scc.terminal[scc.partition.class_of[v]] };

    // Non-terminal vertices, each a single species by the shape check.
    let mut unassigned: Vec<usize> = (0..net.vertices.len())
        .filter(|&v| !in_terminal(v))
        .collect();
    let mut extinct_species: Vec<usize> = unassigned
        .iter()
        .filter_map(|&v| net.vertices[v].single_species())
        .collect();
    extinct_species.sort_unstable();

    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut assigned: Vec<usize> = Vec::new(); // vertices in earlier layers
    while !unassigned.is_empty() {
        let next: Vec<usize> = unassigned
            .iter()
            .copied()
            .filter(|&v| {
                net.edges.iter().any(|r| {
                    r.source == v
                        && (in_terminal(r.target) || assigned.contains(&r.target))
                })
            })
            .collect();
        assert!(
            !next.is_empty(),
            "every non-terminal vertex reaches the terminal set"
        );
        let mut layer: Vec<usize> = next
            .iter()
            .filter_map(|&v| net.vertices[v].single_species())
            .collect();
        layer.sort_unstable();
        layers.push(layer);
        unassigned.retain(|v| !next.contains(v));
        assigned.extend(next);
    }

    Ok(StrongExtinctionAnalysis {
        extinct_species,
        layers,
    })
}

/// Min/max evidence for one species over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesFate {
    pub species: usize,
    pub running_min: f64,
    pub tail_min: f64,
    pub tail_max: f64,
    pub final_value: f64,
    pub weak_candidate: bool,
    pub strong_candidate: bool,
}

/// Numerical extinction evidence per species: a low running minimum marks a
/// weak candidate, a uniformly low tail marks a strong candidate. The tail
/// window is the last 20% of samples, widened to at least 50 samples.
pub fn trajectory_extinction_report(
    traj: &Trajectory,
    eps_weak: f64,
    eps_strong: f64,
) -> Vec<SpeciesFate> {
    assert!(!traj.states.is_empty(), "trajectory must be nonempty");
    assert!(
        0.0 < eps_strong && eps_strong <= eps_weak,
        "need 0 < eps_strong <= eps_weak"
    );
    let n = traj.states[0].len();
    let samples = traj.states.len();
    let tail_len = (samples / 5).max(50).min(samples);
    let tail_start = samples - tail_len;

    (0..n)
        .map(|i| {
            let series = traj.states.iter().map(|s| s[i]);
            let running_min = series.clone().fold(f64::INFINITY, f64::min);
            let tail = traj.states[tail_start..].iter().map(|s| s[i]);
            let tail_min = tail.clone().fold(f64::INFINITY, f64::min);
            let tail_max = tail.clone().fold(f64::NEG_INFINITY, f64::max);
            let final_value = *traj.states.last().unwrap().get(i).unwrap();
            SpeciesFate {
                species: i,
                running_min,
                tail_min,
                tail_max,
                final_value,
                weak_candidate: running_min < eps_weak,
                strong_candidate: tail_max < eps_strong,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegrateOptions};
    use crate::model::{MassActionSystem, RateAssignment};
    use crate::parse::parse_network;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().0
    }

    const FIGURE2: &str = "X1 + X2 -> 2 X1\nX2 + X3 -> X1 + X3\nX1 + X3 -> 2 X1\n";
    const IVANOVA: &str = "X + Y -> 2 Y\nY + Z -> 2 Z\nX + Z -> 2 X\n2 X + Y + Z -> 3 X + Y\n";

    #[test]
    fn strong_set_of_funnel_is_first_species() {
        let a = strong_extinction_species_linear(&net("X1 -> X2\nX2 <-> X3\n")).unwrap();
        assert_eq!(a.extinct_species, vec![0]);
        assert_eq!(a.layers, vec![vec![0]]);
    }

    #[test]
    fn strong_set_of_chain_with_layering() {
        let a = strong_extinction_species_linear(&net("A -> B\nB -> C\n")).unwrap();
        assert_eq!(a.extinct_species, vec![0, 1]);
        assert_eq!(a.layers, vec![vec![1], vec![0]]);
    }

    #[test]
    fn weakly_reversible_is_not_applicable() {
        assert_eq!(
            strong_extinction_species_linear(&net("A <-> B")),
            Err(ExtinctionError::NotApplicable)
        );
    }

    #[test]
    fn higher_order_source_is_rejected() {
        assert!(matches!(
            strong_extinction_species_linear(&net("2 A -> B\nB -> C\n")),
            Err(ExtinctionError::NotFirstOrder { .. })
        ));
        assert!(matches!(
            strong_extinction_species_linear(&net("A -> 2 B\nB -> C\n")),
            Err(ExtinctionError::NotFirstOrder { .. })
        ));
    }

    #[test]
    fn target_zero_complex_is_allowed() {
        let a = strong_extinction_species_linear(&net("A -> 0")).unwrap();
        assert_eq!(a.extinct_species, vec![0]);
    }

    #[test]
    fn layering_soundness() {
        let a = strong_extinction_species_linear(&net("A -> B\nB -> C\nD -> B\n")).unwrap();
        // Terminal component is {C}; B feeds it directly, A and D feed B.
        assert_eq!(a.layers, vec![vec![1], vec![0, 3]]);
        assert_eq!(a.extinct_species, vec![0, 1, 3]);
    }

    #[test]
    fn weak_certificate_examples() {
        let cert = weak_extinction_certificate(&net("X1 -> X2\nX2 <-> X3\n"));
        assert_eq!(cert.kind, ExtinctionGuarantee::WeakGuaranteed);
        assert!(cert.flags.deficiency_zero);
        assert!(!cert.flags.weakly_reversible);
        assert!(cert.separator.is_some());
        assert!(cert.conservation.is_some());

        // Positive deficiency but still inconsistent and conservative.
        let cert = weak_extinction_certificate(&net(FIGURE2));
        assert_eq!(cert.kind, ExtinctionGuarantee::WeakGuaranteed);
        assert_eq!(cert.flags.deficiency, 1);

        let cert = weak_extinction_certificate(&net("A -> B\nB -> C\nC -> A\n"));
        assert_eq!(cert.kind, ExtinctionGuarantee::None);
        assert!(cert.separator.is_none());
    }

    #[test]
    fn figure2_trajectory_flags_two_strong_candidates() {
        let s = MassActionSystem::new(net(FIGURE2), RateAssignment::uniform(3, 1.0)).unwrap();
        let traj = integrate(&s, &[0.4, 0.3, 0.3], &IntegrateOptions::new(200.0)).unwrap();
        let fates = trajectory_extinction_report(&traj, 1e-3, 1e-3);
        assert!(!fates[0].weak_candidate && !fates[0].strong_candidate);
        assert!(fates[1].strong_candidate);
        assert!(fates[2].strong_candidate);
    }

    #[test]
    fn ivanova_trajectory_all_weak_none_strong() {
        let s = MassActionSystem::new(net(IVANOVA), RateAssignment::uniform(4, 1.0)).unwrap();
        let traj = integrate(&s, &[0.4, 0.3, 0.3], &IntegrateOptions::new(2000.0)).unwrap();
        let fates = trajectory_extinction_report(&traj, 1e-2, 1e-4);
        for fate in &fates {
            assert!(fate.weak_candidate, "{fate:?}");
            assert!(!fate.strong_candidate, "{fate:?}");
            assert!(fate.tail_max > 0.3, "{fate:?}");
        }
    }

    #[test]
    fn constant_equilibrium_trajectory_has_no_flags() {
        let traj = Trajectory {
            times: (0..100).map(|i| i as f64).collect(),
            states: vec![vec![0.4, 0.3, 0.3]; 100],
            meta: crate::dynamics::StepStats {
                accepted: 0,
                rejected: 0,
                rtol: 1e-8,
                atol: 1e-12,
            },
        };
        let fates = trajectory_extinction_report(&traj, 1e-2, 1e-4);
        assert!(fates.iter().all(|f| !f.weak_candidate && !f.strong_candidate));
    }

    #[test]
    fn strong_candidate_implies_weak_candidate() {
        let s = MassActionSystem::new(net("A -> B\nB -> C\n"), RateAssignment::uniform(2, 1.0))
            .unwrap();
        let traj = integrate(&s, &[1.0, 0.5, 0.1], &IntegrateOptions::new(60.0)).unwrap();
        for eps in [(1e-2, 1e-4), (1e-3, 1e-3)] {
            let fates = trajectory_extinction_report(&traj, eps.0, eps.1);
            for f in fates {
                if f.strong_candidate {
                    assert!(f.weak_candidate);
                }
            }
        }
    }
}
