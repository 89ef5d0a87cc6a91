//! Linkage classes, strongly connected components, terminal components, and
//! weak reversibility.

use crate::model::ReactionNetwork;

/// A partition of the vertex set, classes numbered by smallest contained
/// vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    fn from_class_lists(mut classes: Vec<Vec<usize>>, num_vertices: usize) -> Self {
        for class in &mut classes {
            class.sort_unstable();
        }
        classes.sort_by_key(|c| c[0]);
        let mut class_of = vec![usize::MAX; num_vertices];
        for (id, class) in classes.iter().enumerate() {
            for &v in class {
                class_of[v] = id;
            }
        }
        Partition { class_of, classes }
    }
}

/// The SCC partition together with a terminal flag per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    pub partition: Partition,
    pub terminal: Vec<bool>,
}

/// Connected components of the underlying undirected graph.
pub fn linkage_classes(net: &ReactionNetwork) -> Partition {
    let n = net.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for r in &net.edges {
        adj[r.source].push(r.target);
        adj[r.target].push(r.source);
    }
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut class = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            class.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        classes.push(class);
    }
    Partition::from_class_lists(classes, n)
}

/// Tarjan SCCs with deterministic numbering by smallest contained vertex.
pub fn strongly_connected_components(net: &ReactionNetwork) -> SccDecomposition {
    let n = net.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for r in &net.edges {
        adj[r.source].push(r.target);
    }
    for out in &mut adj {
        out.sort_unstable();
    }

    let mut state = TarjanState {
        next_index: 0,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            strongconnect(v, &adj, &mut state);
        }
    }

    let partition = Partition::from_class_lists(state.comps, n);
    let mut terminal = vec![true; partition.classes.len()];
    for r in &net.edges {
        let cs = partition.class_of[r.source];
        if cs != partition.class_of[r.target] {
            terminal[cs] = false;
        }
    }
    SccDecomposition {
        partition,
        terminal,
    }
}

struct TarjanState {
    next_index: usize,
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], st: &mut TarjanState) {
    st.index[v] = Some(st.next_index);
    st.low[v] = st.next_index;
    st.next_index += 1;
    st.stack.push(v);
    st.on_stack[v] = true;

    for &w in &adj[v] {
        if st.index[w].is_none() {
            strongconnect(w, adj, st);
            st.low[v] = st.low[v].min(st.low[w]);
        } else if st.on_stack[w] {
            st.low[v] = st.low[v].min(st.index[w].unwrap());
        }
    }

    if st.low[v] == st.index[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = st.stack.pop().expect("tarjan stack underflow");
            st.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        st.comps.push(comp);
    }
}

/// Ids of SCCs with no outgoing edge. Every linkage class contains at least
/// one.
pub fn terminal_sccs(net: &ReactionNetwork) -> Vec<usize> {
    let scc = strongly_connected_components(net);
    scc.terminal
        .iter()
        .enumerate()
        .filter_map(|(id, &t)| t.then_some(id))
        .collect()
}

/// True iff every linkage class is a single strongly connected component.
pub fn is_weakly_reversible(net: &ReactionNetwork) -> bool {
    let linkage = linkage_classes(net);
    let scc = strongly_connected_components(net);
    scc.partition.classes.len() == linkage.classes.len()
}
