//! Core data model: species, complexes, reactions, networks, and rate
//! assignments, together with the validity rules for a well-formed network.

use thiserror::Error;

/// A named species with a dense index into the owning network's species table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub id: usize,
    pub name: String,
}

/// A complex: nonnegative stoichiometric coefficients over the species table.
///
/// The all-zero vector is the empty complex, written `0` in the text format.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Complex {
    pub coeffs: Vec<u32>,
}

impl Complex {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Complex { coeffs }
    }

    /// The empty complex over `num_species` species.
    pub fn zero(num_species: usize) -> Self {
        Complex {
            coeffs: vec![0; num_species],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Total stoichiometric coefficient (the "size" of the complex).
    pub fn total(&self) -> u32 {
        self.coeffs.iter().sum()
    }

    /// Index of the single species if the complex is exactly one unit of one
    /// species, else `None`.
    pub fn single_species(&self) -> Option<usize> {
        let mut found = None;
        for (i, &c) in self.coeffs.iter().enumerate() {
            match (c, found) {
                (0, _) => {}
                (1, None) => found = Some(i),
                _ => return None,
            }
        }
        found
    }
}

/// A directed edge between two vertices (complex indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reaction {
    pub source: usize,
    pub target: usize,
}

/// A reaction network: directed graph on integer-point complexes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionNetwork {
    pub species: Vec<Species>,
    pub vertices: Vec<Complex>,
    pub edges: Vec<Reaction>,
}

/// One strictly positive rate constant per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RateAssignment {
    pub k: Vec<f64>,
}

impl RateAssignment {
    pub fn uniform(num_edges: usize, value: f64) -> Self {
        RateAssignment {
            k: vec![value; num_edges],
        }
    }
}

/// A network paired with rate constants; the generated dynamics are
/// mass-action.
#[derive(Debug, Clone, PartialEq)]
pub struct MassActionSystem {
    pub network: ReactionNetwork,
    pub rates: RateAssignment,
}

impl MassActionSystem {
    pub fn new(network: ReactionNetwork, rates: RateAssignment) -> Result<Self, ModelError> {
        if rates.k.len() != network.edges.len() {
            return Err(ModelError::RateLengthMismatch {
                edges: network.edges.len(),
                rates: rates.k.len(),
            });
        }
        if let Some(i) = rates.k.iter().position(|&k| k.is_nan() || k <= 0.0) {
            return Err(ModelError::NonpositiveRate { edge: i });
        }
        Ok(MassActionSystem { network, rates })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("edge index {edge} out of range (network has {num_edges} edges)")]
    EdgeOutOfRange { edge: usize, num_edges: usize },
    #[error("rate vector length {rates} does not match edge count {edges}")]
    RateLengthMismatch { edges: usize, rates: usize },
    #[error("rate constant at edge {edge} is not strictly positive")]
    NonpositiveRate { edge: usize },
}

/// A single violated network invariant, pointing at the offending item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { edge: usize },
    DuplicateEdge { edge: usize, earlier: usize },
    EdgeEndpointOutOfRange { edge: usize },
    IsolatedVertex { vertex: usize },
    DuplicateVertex { vertex: usize, earlier: usize },
    CoeffLengthMismatch { vertex: usize },
    DuplicateSpeciesName { species: usize },
    NonDenseSpeciesIds { species: usize },
}

/// Outcome of [`validate_network`]: empty iff the network is well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant and reports each violation as data.
pub fn validate_network(net: &ReactionNetwork) -> ValidationReport {
    let mut violations = Vec::new();
    let n = net.species.len();

    for (i, sp) in net.species.iter().enumerate() {
        if sp.id != i {
            violations.push(Violation::NonDenseSpeciesIds { species: i });
        }
        if net.species[..i].iter().any(|other| other.name == sp.name) {
            violations.push(Violation::DuplicateSpeciesName { species: i });
        }
    }

    for (v, cx) in net.vertices.iter().enumerate() {
        if cx.coeffs.len() != n {
            violations.push(Violation::CoeffLengthMismatch { vertex: v });
        }
        if let Some(earlier) = net.vertices[..v].iter().position(|other| other == cx) {
            violations.push(Violation::DuplicateVertex { vertex: v, earlier });
        }
    }

    let mut incident = vec![false; net.vertices.len()];
    for (e, r) in net.edges.iter().enumerate() {
        if r.source >= net.vertices.len() || r.target >= net.vertices.len() {
            violations.push(Violation::EdgeEndpointOutOfRange { edge: e });
            continue;
        }
        incident[r.source] = true;
        incident[r.target] = true;
        if r.source == r.target {
            violations.push(Violation::SelfLoop { edge: e });
        }
        if let Some(earlier) = net.edges[..e]
            .iter()
            .position(|other| other.source == r.source && other.target == r.target)
        {
            violations.push(Violation::DuplicateEdge { edge: e, earlier });
        }
    }

    for (v, &used) in incident.iter().enumerate() {
        if !used {
            violations.push(Violation::IsolatedVertex { vertex: v });
        }
    }

    ValidationReport { violations }
}

impl ReactionNetwork {
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Target coefficients minus source coefficients for one edge.
    pub fn reaction_vector(&self, edge: usize) -> Result<Vec<i64>, ModelError> {
        let r = self.edges.get(edge).ok_or(ModelError::EdgeOutOfRange {
            edge,
            num_edges: self.edges.len(),
        })?;
        let src = &self.vertices[r.source];
        let tgt = &self.vertices[r.target];
        Ok(src
            .coeffs
            .iter()
            .zip(&tgt.coeffs)
            .map(|(&s, &t)| t as i64 - s as i64)
            .collect())
    }

    /// Reaction vectors of all edges, in edge order.
    pub fn reaction_vectors(&self) -> Vec<Vec<i64>> {
        (0..self.edges.len())
            .map(|e| self.reaction_vector(e).expect("edge index in range"))
            .collect()
    }

    pub fn species_names(&self) -> Vec<&str> {
        self.species.iter().map(|s| s.name.as_str()).collect()
    }
}
