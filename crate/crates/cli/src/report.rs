//! Analysis report assembly: canonical JSON (fixed key order, exact integer
//! certificates as strings) and the human-readable rendering. Every
//! certificate is re-verified right before emission.

use crn_core::exact::Rational;
use crn_core::extinction::{
    strong_extinction_species_linear, weak_extinction_certificate, ExtinctionGuarantee,
};
use crn_core::graph::{linkage_classes, strongly_connected_components, is_weakly_reversible};
use crn_core::lyapunov::{construct_w_deficiency_zero, lyapunov_from_separator, EdgeSign};
use crn_core::model::ReactionNetwork;
use crn_core::structure::{deficiency, is_conservative, is_consistent, ConsistencyVerdict};
use num_traits::{One, Signed};
use serde::Serialize;

#[derive(Serialize)]
pub struct AnalysisReport {
    pub network: NetworkSection,
    pub graph: GraphSection,
    pub deficiency: DeficiencySection,
    pub consistency: ConsistencySection,
    pub conservative: ConservativeSection,
    pub lyapunov: LyapunovSection,
    pub extinction: ExtinctionSection,
}

#[derive(Serialize)]
pub struct NetworkSection {
    pub species: Vec<String>,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub vertices: Vec<Vec<u32>>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Serialize)]
pub struct GraphSection {
    pub linkage_classes: Vec<Vec<usize>>,
    pub sccs: Vec<Vec<usize>>,
    pub terminal_sccs: Vec<usize>,
    pub weakly_reversible: bool,
}

#[derive(Serialize)]
pub struct DeficiencySection {
    pub num_vertices: usize,
    pub num_linkage_classes: usize,
    pub stoich_dim: usize,
    pub deficiency: usize,
}

#[derive(Serialize)]
pub struct ConsistencySection {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separator: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct ConservativeSection {
    pub conservative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct LyapunovSection {
    /// "deficiency_zero_construction", "separator", or "none_consistent".
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_signs: Option<Vec<&'static str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSection>,
}

#[derive(Serialize)]
pub struct TraceSection {
    pub linkage_class: Vec<usize>,
    pub terminal_scc: Vec<usize>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub crossing_edge: usize,
    pub dim_s_g: usize,
    pub dim_s_g1: usize,
    pub dim_s_g2: usize,
}

#[derive(Serialize)]
pub struct ExtinctionSection {
    pub weak_guaranteed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separator: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation: Option<Vec<String>>,
    pub flags: FlagsSection,
    pub strong: StrongSection,
}

#[derive(Serialize)]
pub struct FlagsSection {
    pub deficiency: usize,
    pub deficiency_zero: bool,
    pub weakly_reversible: bool,
    pub conservative: bool,
}

#[derive(Serialize)]
pub struct StrongSection {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extinct_species: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Vec<String>>>,
}

/// Exact integer vector as decimal strings; panics if an entry is not an
/// integer (all emitted certificates are content-1 integer vectors).
fn int_strings(v: &[Rational]) -> Vec<String> {
    v.iter()
        .map(|r| {
            assert!(r.denom().is_one(), "certificate entry is not an integer");
            r.numer().to_string()
        })
        .collect()
}

fn sign_strs(signs: &[EdgeSign]) -> Vec<&'static str> {
    signs
        .iter()
        .map(|s| match s {
            EdgeSign::Negative => "-",
            EdgeSign::Zero => "0",
        })
        .collect()
}

/// Builds the full report, re-verifying every certificate before emission.
/// A verification failure is an internal error.
pub fn build_report(net: &ReactionNetwork) -> Result<AnalysisReport, String> {
    let linkage = linkage_classes(net);
    let scc = strongly_connected_components(net);
    let def = deficiency(net);

    let verdict = is_consistent(net);
    if !verdict.verify(net) {
        return Err("consistency certificate failed re-verification".into());
    }
    let consistency = match &verdict {
        ConsistencyVerdict::Consistent { lambda } => ConsistencySection {
            verdict: "consistent",
            lambda: Some(int_strings(lambda)),
            separator: None,
        },
        ConsistencyVerdict::Inconsistent { separator } => ConsistencySection {
            verdict: "inconsistent",
            lambda: None,
            separator: Some(int_strings(separator)),
        },
    };

    let cvec = is_conservative(net);
    if let Some(c) = &cvec {
        let positive = c.iter().all(|x| x.is_positive());
        if !positive || !crn_core::structure::is_conserved_vector(net, c) {
            return Err("conservation vector failed re-verification".into());
        }
    }

    let lyapunov = match construct_w_deficiency_zero(net) {
        Ok((lyap, trace)) => LyapunovSection {
            kind: "deficiency_zero_construction",
            w: Some(int_strings(&lyap.w)),
            edge_signs: Some(sign_strs(&lyap.edge_signs)),
            trace: Some(TraceSection {
                linkage_class: trace.linkage_class,
                terminal_scc: trace.terminal_scc,
                v1: trace.v1,
                v2: trace.v2,
                crossing_edge: trace.crossing_edge,
                dim_s_g: trace.dim_s_g,
                dim_s_g1: trace.dim_s_g1,
                dim_s_g2: trace.dim_s_g2,
            }),
        },
        Err(_) => match &verdict {
            ConsistencyVerdict::Inconsistent { separator } => {
                let lyap = lyapunov_from_separator(net, separator)
                    .map_err(|e| format!("separator failed re-verification: {e}"))?;
                LyapunovSection {
                    kind: "separator",
                    w: Some(int_strings(&lyap.w)),
                    edge_signs: Some(sign_strs(&lyap.edge_signs)),
                    trace: None,
                }
            }
            ConsistencyVerdict::Consistent { .. } => LyapunovSection {
                kind: "none_consistent",
                w: None,
                edge_signs: None,
                trace: None,
            },
        },
    };

    let cert = weak_extinction_certificate(net);
    if let Some(w) = &cert.separator {
        let check = ConsistencyVerdict::Inconsistent {
            separator: w.clone(),
        };
        if !check.verify(net) {
            return Err("extinction separator failed re-verification".into());
        }
    }
    let strong = match strong_extinction_species_linear(net) {
        Ok(analysis) => StrongSection {
            applicable: true,
            reason: None,
            extinct_species: Some(
                analysis
                    .extinct_species
                    .iter()
                    .map(|&s| net.species[s].name.clone())
                    .collect(),
            ),
            layers: Some(
                analysis
                    .layers
                    .iter()
                    .map(|layer| {
                        layer
                            .iter()
                            .map(|&s| net.species[s].name.clone())
                            .collect()
                    })
                    .collect(),
            ),
        },
        Err(e) => StrongSection {
            applicable: false,
            reason: Some(e.to_string()),
            extinct_species: None,
            layers: None,
        },
    };

    Ok(AnalysisReport {
        network: NetworkSection {
            species: net.species.iter().map(|s| s.name.clone()).collect(),
            num_vertices: net.vertices.len(),
            num_edges: net.edges.len(),
            vertices: net.vertices.iter().map(|c| c.coeffs.clone()).collect(),
            edges: net.edges.iter().map(|r| [r.source, r.target]).collect(),
        },
        graph: GraphSection {
            linkage_classes: linkage.classes,
            sccs: scc.partition.classes.clone(),
            terminal_sccs: scc
                .terminal
                .iter()
                .enumerate()
                .filter_map(|(i, &t)| t.then_some(i))
                .collect(),
            weakly_reversible: is_weakly_reversible(net),
        },
        deficiency: DeficiencySection {
            num_vertices: def.num_vertices,
            num_linkage_classes: def.num_linkage_classes,
            stoich_dim: def.stoich_dim,
            deficiency: def.deficiency,
        },
        consistency,
        conservative: ConservativeSection {
            conservative: cvec.is_some(),
            c: cvec.as_ref().map(|c| int_strings(c)),
        },
        lyapunov,
        extinction: ExtinctionSection {
            weak_guaranteed: cert.kind == ExtinctionGuarantee::WeakGuaranteed,
            separator: cert.separator.as_ref().map(|w| int_strings(w)),
            conservation: cert.conservation.as_ref().map(|c| int_strings(c)),
            flags: FlagsSection {
                deficiency: cert.flags.deficiency,
                deficiency_zero: cert.flags.deficiency_zero,
                weakly_reversible: cert.flags.weakly_reversible,
                conservative: cert.flags.conservative,
            },
            strong,
        },
    })
}

/// Human-readable rendering of the report.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "network: {} species, {} complexes, {} reactions\n",
        r.network.species.len(),
        r.network.num_vertices,
        r.network.num_edges
    ));
    out.push_str(&format!("species: {}\n", r.network.species.join(", ")));
    out.push_str(&format!(
        "linkage classes: {}   sccs: {}   terminal sccs: {:?}\n",
        r.graph.linkage_classes.len(),
        r.graph.sccs.len(),
        r.graph.terminal_sccs
    ));
    out.push_str(&format!(
        "weakly reversible: {}\n",
        r.graph.weakly_reversible
    ));
    out.push_str(&format!(
        "deficiency: |V| = {}, l = {}, s = {}, delta = {}\n",
        r.deficiency.num_vertices,
        r.deficiency.num_linkage_classes,
        r.deficiency.stoich_dim,
        r.deficiency.deficiency
    ));
    match r.consistency.verdict {
        "consistent" => out.push_str(&format!(
            "consistent: yes, lambda = {:?}\n",
            r.consistency.lambda.as_ref().unwrap()
        )),
        _ => out.push_str(&format!(
            "consistent: no, separator w = {:?}\n",
            r.consistency.separator.as_ref().unwrap()
        )),
    }
    match &r.conservative.c {
        Some(c) => out.push_str(&format!("conservative: yes, c = {c:?}\n")),
        None => out.push_str("conservative: no\n"),
    }
    match r.lyapunov.kind {
        "deficiency_zero_construction" => {
            let t = r.lyapunov.trace.as_ref().unwrap();
            out.push_str(&format!(
                "linear lyapunov (geometric construction): w = {:?}, edge signs {:?}\n",
                r.lyapunov.w.as_ref().unwrap(),
                r.lyapunov.edge_signs.as_ref().unwrap()
            ));
            out.push_str(&format!(
                "  split: terminal scc {:?}, v1 {:?}, crossing edge {}, dims {} = {} + {} + 1\n",
                t.terminal_scc, t.v1, t.crossing_edge, t.dim_s_g, t.dim_s_g1, t.dim_s_g2
            ));
        }
        "separator" => out.push_str(&format!(
            "linear lyapunov (from separator): w = {:?}, edge signs {:?}\n",
            r.lyapunov.w.as_ref().unwrap(),
            r.lyapunov.edge_signs.as_ref().unwrap()
        )),
        _ => out.push_str(
            "linear lyapunov: consistent network - no linear Lyapunov function exists for all rate constants\n",
        ),
    }
    out.push_str(&format!(
        "weak extinction guaranteed: {}\n",
        r.extinction.weak_guaranteed
    ));
    match (&r.extinction.strong.extinct_species, &r.extinction.strong.reason) {
        (Some(set), _) => {
            out.push_str(&format!(
                "strong extinction set (first-order): {:?}, layers {:?}\n",
                set,
                r.extinction.strong.layers.as_ref().unwrap()
            ));
        }
        (None, Some(reason)) => {
            out.push_str(&format!("strong extinction set: not applicable ({reason})\n"));
        }
        _ => {}
    }
    out
}
