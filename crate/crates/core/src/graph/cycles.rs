//! Short directed cycles in `Γ₊`.

use std::collections::VecDeque;

use super::UnidirectionalGraph;

/// Shortest directed `Γ₊` cycle through each edge, if its length is at most `max_len`.
pub fn short_cycle_classification(graph: &UnidirectionalGraph, max_len: usize) -> Vec<Option<usize>> {
    let nv = graph.vertex_count();
    graph
        .edges()
        .iter()
        .map(|e| {
            if e.tail == e.head {
                return (max_len >= 1).then_some(1);
            }
            // BFS from head back to tail.
            let mut dist = vec![usize::MAX; nv];
            let mut queue = VecDeque::from([e.head]);
            dist[e.head] = 0;
            while let Some(x) = queue.pop_front() {
                if x == e.tail {
                    let len = dist[x] + 1;
                    return (len <= max_len).then_some(len);
                }
                if dist[x] + 2 > max_len {
                    continue;
                }
                for &o in graph.outgoing(x) {
                    let y = graph.edges()[o].head;
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            None
        })
        .collect()
}

/// Edges not lying on any directed cycle of length `≤ max_len`.
pub fn generic_edges(graph: &UnidirectionalGraph, max_len: usize) -> Vec<usize> {
    short_cycle_classification(graph, max_len)
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.is_none().then_some(j))
        .collect()
}

/// Strong connectivity of a directed multigraph given as `(tail, head)` pairs.
pub fn is_strongly_connected(nv: usize, pairs: &[(usize, usize)]) -> bool {
    let reach = |forward: bool| {
        let mut adj = vec![Vec::new(); nv];
        for &(a, b) in pairs {
            if forward {
                adj[a].push(b);
            } else {
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    nv > 0 && reach(true) && reach(false)
}
