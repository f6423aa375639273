//! Exhaustive state-space machinery: capped breadth-first closure, strongly
//! connected components, and the dataflow passes the verdict operations are
//! built from.

use indexmap::IndexSet;
use smallvec::SmallVec;

use super::engine::CompiledNet;
use super::{CapKind, ExploreCaps};

pub(crate) struct DenseGraph {
    pub nodes: IndexSet<Box<[u64]>>,
    /// (reaction, destination) per node; only filled when edges are recorded.
    pub edges: Vec<SmallVec<[(u32, u32); 4]>>,
    /// (parent node, reaction) per node; the root points at itself.
    pub parents: Vec<(u32, u32)>,
    #[allow(dead_code)]
    pub depth: Vec<u32>,
    pub truncated: Option<CapKind>,
    pub frontier_peak: usize,
}

impl DenseGraph {
    pub fn state(&self, node: u32) -> &[u64] {
        self.nodes.get_index(node as usize).unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Reaction-labelled path from the root to `node`.
    pub fn path_to(&self, node: u32) -> Vec<(u32, u32)> {
        let mut rev = Vec::new();
        let mut cur = node;
        while self.parents[cur as usize].0 != cur {
            let (p, r) = self.parents[cur as usize];
            rev.push((r, cur));
            cur = p;
        }
        rev.reverse();
        rev
    }
}

pub(crate) struct BfsOutcome {
    pub graph: DenseGraph,
    /// First node satisfying the stop predicate, if any.
    pub hit: Option<u32>,
}

/// Breadth-first closure of `init` under the reaction relation, stopping
/// early when `stop` matches. Caps never cause silent wrong answers: any
/// pruning sets `truncated`.
pub(crate) fn bfs<F: Fn(&[u64]) -> bool>(
    net: &CompiledNet,
    init: Vec<u64>,
    caps: &ExploreCaps,
    record_edges: bool,
    stop: F,
) -> BfsOutcome {
    let mut nodes: IndexSet<Box<[u64]>> = IndexSet::new();
    let mut edges: Vec<SmallVec<[(u32, u32); 4]>> = Vec::new();
    let mut parents: Vec<(u32, u32)> = Vec::new();
    let mut depth: Vec<u32> = Vec::new();
    let mut truncated = None;
    let mut frontier_peak = 0usize;

    let push = |state: Box<[u64]>,
                    parent: (u32, u32),
                    d: u32,
                    nodes: &mut IndexSet<Box<[u64]>>,
                    edges: &mut Vec<SmallVec<[(u32, u32); 4]>>,
                    parents: &mut Vec<(u32, u32)>,
                    depth: &mut Vec<u32>| {
        let (idx, new) = nodes.insert_full(state);
        if new {
            if record_edges {
                edges.push(SmallVec::new());
            }
            parents.push(parent);
            depth.push(d);
        }
        (idx as u32, new)
    };

    let init_total: u64 = init.iter().sum();
    if init_total > caps.max_total_count {
        return BfsOutcome {
            graph: DenseGraph {
                nodes,
                edges,
                parents,
                depth,
                truncated: Some(CapKind::TotalCount),
                frontier_peak: 0,
            },
            hit: None,
        };
    }
    let (root, _) = push(
        init.into_boxed_slice(),
        (0, 0),
        0,
        &mut nodes,
        &mut edges,
        &mut parents,
        &mut depth,
    );
    if stop(nodes.get_index(root as usize).unwrap()) {
        return BfsOutcome {
            graph: DenseGraph {
                nodes,
                edges,
                parents,
                depth,
                truncated: None,
                frontier_peak: 1,
            },
            hit: Some(root),
        };
    }

    let mut head = 0usize;
    let mut scratch: Vec<u64> = Vec::new();
    'outer: while head < nodes.len() {
        frontier_peak = frontier_peak.max(nodes.len() - head);
        let node = head as u32;
        head += 1;
        let d = depth[node as usize];
        if d as usize >= caps.max_depth {
            // successors beyond the horizon are not explored
            let any_enabled = (0..net.reactions.len() as u32)
                .any(|r| net.applicable(r, nodes.get_index(node as usize).unwrap()));
            if any_enabled {
                truncated = Some(CapKind::Depth);
            }
            continue;
        }
        for r in 0..net.reactions.len() as u32 {
            {
                let state = nodes.get_index(node as usize).unwrap();
                if !net.applicable(r, state) {
                    continue;
                }
                scratch.clear();
                scratch.extend_from_slice(state);
            }
            net.apply(r, &mut scratch);
            let total: u64 = scratch.iter().sum();
            if total > caps.max_total_count {
                truncated = Some(CapKind::TotalCount);
                continue;
            }
            let exists = nodes.contains(scratch.as_slice());
            if !exists && nodes.len() >= caps.max_configs {
                truncated = Some(CapKind::Configs);
                break 'outer;
            }
            let (succ, new) = push(
                scratch.clone().into_boxed_slice(),
                (node, r),
                d + 1,
                &mut nodes,
                &mut edges,
                &mut parents,
                &mut depth,
            );
            if record_edges {
                edges[node as usize].push((r, succ));
            }
            if new && stop(nodes.get_index(succ as usize).unwrap()) {
                return BfsOutcome {
                    graph: DenseGraph {
                        nodes,
                        edges,
                        parents,
                        depth,
                        truncated,
                        frontier_peak,
                    },
                    hit: Some(succ),
                };
            }
        }
    }

    BfsOutcome {
        graph: DenseGraph {
            nodes,
            edges,
            parents,
            depth,
            truncated,
            frontier_peak,
        },
        hit: None,
    }
}

/// Iterative Tarjan SCC. Returns one component id per node; component ids
/// come out in reverse topological order (every edge leads to an equal or
/// smaller component id), which is exactly the order the dataflow passes
/// need.
pub(crate) fn tarjan(n: usize, edges: &[SmallVec<[(u32, u32); 4]>]) -> (Vec<u32>, usize) {
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut n_comps = 0usize;
    let mut next_index = 0u32;
    // call stack: (node, next edge offset)
    let mut calls: Vec<(u32, u32)> = Vec::new();

    for start in 0..n as u32 {
        if index[start as usize] != UNSET {
            continue;
        }
        calls.push((start, 0));
        while !calls.is_empty() {
            let (v, ei) = *calls.last().unwrap();
            if ei == 0 {
                index[v as usize] = next_index;
                low[v as usize] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v as usize] = true;
            }
            if (ei as usize) < edges[v as usize].len() {
                calls.last_mut().unwrap().1 += 1;
                let (_, w) = edges[v as usize][ei as usize];
                if index[w as usize] == UNSET {
                    calls.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
            } else {
                if low[v as usize] == index[v as usize] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp[w as usize] = n_comps as u32;
                        if w == v {
                            break;
                        }
                    }
                    n_comps += 1;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
            }
        }
    }
    (comp, n_comps)
}

/// Reachability summaries per component: extremes of the output count, the
/// minimum halt count, and whether any member carries halt.
pub(crate) struct CompSummary {
    pub ymin: Vec<u64>,
    pub ymax: Vec<u64>,
    pub hmin: Vec<u64>,
}

pub(crate) fn summarize(
    graph: &DenseGraph,
    comp: &[u32],
    n_comps: usize,
    output: usize,
    halt: Option<usize>,
) -> CompSummary {
    let mut ymin = vec![u64::MAX; n_comps];
    let mut ymax = vec![0u64; n_comps];
    let mut hmin = vec![u64::MAX; n_comps];
    // component ids are reverse-topological: process nodes in any order for
    // member values, then fold successor components in id order
    for node in 0..graph.len() as u32 {
        let c = comp[node as usize] as usize;
        let state = graph.state(node);
        let y = state[output];
        ymin[c] = ymin[c].min(y);
        ymax[c] = ymax[c].max(y);
        if let Some(h) = halt {
            hmin[c] = hmin[c].min(state[h]);
        }
    }
    // fold edges: every edge target has component id <= the source id, so a
    // pass over components in increasing id order sees successors final
    let mut by_comp: Vec<Vec<u32>> = vec![Vec::new(); n_comps];
    for node in 0..graph.len() as u32 {
        by_comp[comp[node as usize] as usize].push(node);
    }
    for c in 0..n_comps {
        for &node in &by_comp[c] {
            for &(_, w) in &graph.edges[node as usize] {
                let wc = comp[w as usize] as usize;
                debug_assert!(wc <= c);
                if wc == c {
                    continue;
                }
                ymin[c] = ymin[c].min(ymin[wc]);
                ymax[c] = ymax[c].max(ymax[wc]);
                hmin[c] = hmin[c].min(hmin[wc]);
            }
        }
    }
    CompSummary { ymin, ymax, hmin }
}
