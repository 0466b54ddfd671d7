//! Maximum bipartite matching by layered augmenting paths (Hopcroft–Karp).

use std::collections::VecDeque;

const FREE: u32 = u32::MAX;

/// Bipartite graph in compressed-row form: neighbours of left vertex `i` are
/// `targets[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl BipartiteGraph {
    /// Builds the graph with an edge `(i, j)` wherever `edge(i, j)` holds.
    pub fn from_predicate(
        n_left: usize,
        n_right: usize,
        edge: impl Fn(usize, usize) -> bool,
    ) -> Self {
        assert!(n_right < FREE as usize, "right side too large");
        let mut offsets = Vec::with_capacity(n_left + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for i in 0..n_left {
            targets.extend((0..n_right).filter(|&j| edge(i, j)).map(|j| j as u32));
            offsets.push(targets.len());
        }
        Self {
            n_left,
            n_right,
            offsets,
            targets,
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    fn neighbours(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Returns, for each left vertex, its matched right vertex if any.
pub fn maximum_matching(g: &BipartiteGraph) -> Vec<Option<usize>> {
    let n = g.n_left;
    let mut match_left = vec![FREE; n];
    let mut match_right = vec![FREE; g.n_right];
    let mut layer = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    // per-vertex position in the neighbour list, for the iterative DFS
    let mut cursor = vec![0usize; n];
    let mut stack: Vec<usize> = Vec::new();

    loop {
        // BFS from free left vertices, layering by alternating path length.
        queue.clear();
        for i in 0..n {
            if match_left[i] == FREE {
                layer[i] = 0;
                queue.push_back(i);
            } else {
                layer[i] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in g.neighbours(i) {
                let mate = match_right[j as usize];
                if mate == FREE {
                    found = true;
                } else if layer[mate as usize] == u32::MAX {
                    layer[mate as usize] = layer[i] + 1;
                    queue.push_back(mate as usize);
                }
            }
        }
        if !found {
            break;
        }

        // DFS along the layering for a maximal set of disjoint shortest paths.
        cursor.copy_from_slice(&g.offsets[..n]);
        for root in 0..n {
            if match_left[root] != FREE {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&i) = stack.last() {
                let end = g.offsets[i + 1];
                let mut advanced = false;
                while cursor[i] < end {
                    let j = g.targets[cursor[i]] as usize;
                    let mate = match_right[j];
                    if mate == FREE {
                        // augment along the stack
                        let mut right = j as u32;
                        for &u in stack.iter().rev() {
                            let prev = match_left[u];
                            match_left[u] = right;
                            match_right[right as usize] = u as u32;
                            right = prev;
                        }
                        stack.clear();
                        advanced = true;
                        break;
                    }
                    if layer[mate as usize] == layer[i] + 1 {
                        stack.push(mate as usize);
                        advanced = true;
                        break;
                    }
                    cursor[i] += 1;
                }
                if stack.is_empty() {
                    break;
                }
                if !advanced {
                    // dead end: drop the vertex from this phase
                    layer[i] = u32::MAX;
                    stack.pop();
                    if let Some(&parent) = stack.last() {
                        cursor[parent] += 1;
                    }
                }
            }
        }
    }

    match_left
        .into_iter()
        .map(|m| (m != FREE).then_some(m as usize))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(m: &[Option<usize>]) -> usize {
        m.iter().flatten().count()
    }

    #[test]
    fn complete_graph_is_perfectly_matched() {
        let g = BipartiteGraph::from_predicate(5, 5, |_, _| true);
        assert_eq!(size(&maximum_matching(&g)), 5);
    }

    #[test]
    fn empty_graph() {
        let g = BipartiteGraph::from_predicate(4, 4, |_, _| false);
        assert_eq!(size(&maximum_matching(&g)), 0);
    }

    #[test]
    fn needs_augmentation_through_matched_vertex() {
        // 0-{0,1}, 1-{0}: greedy 0-0 must be rerouted
        let g = BipartiteGraph::from_predicate(2, 2, |i, j| i == 0 || j == 0);
        let m = maximum_matching(&g);
        assert_eq!(m, vec![Some(1), Some(0)]);
    }

    #[test]
    fn matching_is_valid() {
        let g = BipartiteGraph::from_predicate(30, 25, |i, j| (i * 7 + j * 3) % 5 == 0);
        let m = maximum_matching(&g);
        let mut used = [false; 25];
        for (i, j) in m.iter().enumerate() {
            if let Some(j) = *j {
                assert_eq!((i * 7 + j * 3) % 5, 0);
                assert!(!used[j]);
                used[j] = true;
            }
        }
    }
}
