//! Bounded breadth-first exploration of a reduction relation.
//!
//! States are compared with `Ord`, so callers pass canonical
//! representatives (α-canonical terms, ≡-canonical processes) and the
//! graph is automatically quotiented by those equivalences.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Maximum distance from the initial state at which states are expanded.
    pub max_depth: usize,
    pub max_states: usize,
}

impl Bounds {
    pub const fn new(max_depth: usize, max_states: usize) -> Self {
        Self { max_depth, max_states }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::new(64, 20_000)
    }
}

/// The explored fragment of a reduction graph.
#[derive(Clone, Debug)]
pub struct Graph<S> {
    pub states: Vec<S>,
    /// Successor indices; meaningful only where `expanded` holds.
    pub edges: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    pub expanded: Vec<bool>,
    /// Some reachable state was left unexplored.
    pub truncated: bool,
    index: BTreeMap<S, usize>,
}

pub fn explore<S, F>(init: S, bounds: Bounds, mut successors: F) -> Graph<S>
where
    S: Ord + Clone,
    F: FnMut(&S) -> Vec<S>,
{
    let mut g = Graph {
        states: vec![init.clone()],
        edges: vec![Vec::new()],
        depth: vec![0],
        expanded: vec![false],
        truncated: false,
        index: BTreeMap::from([(init, 0)]),
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let succ = successors(&g.states[i]);
        if g.depth[i] >= bounds.max_depth {
            // a frontier state only truncates the graph if it can move
            g.truncated |= !succ.is_empty();
            continue;
        }
        g.expanded[i] = true;
        let mut out = Vec::with_capacity(succ.len());
        let mut dropped = false;
        for s in succ {
            let j = match g.index.get(&s) {
                Some(&j) => j,
                None => {
                    if g.states.len() >= bounds.max_states {
                        g.truncated = true;
                        dropped = true;
                        continue;
                    }
                    let j = g.states.len();
                    g.index.insert(s.clone(), j);
                    g.states.push(s);
                    g.edges.push(Vec::new());
                    g.depth.push(g.depth[i] + 1);
                    g.expanded.push(false);
                    queue.push_back(j);
                    j
                }
            };
            if !out.contains(&j) {
                out.push(j);
            }
        }
        // a dropped successor means this state is only partly expanded
        g.expanded[i] = !dropped;
        g.edges[i] = out;
    }
    g
}

impl<S: Ord> Graph<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn find(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &S) -> bool {
        self.index.contains_key(s)
    }

    /// Fully expanded states without successors.
    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.expanded[i] && self.edges[i].is_empty())
    }

    /// Whether every reachable state was expanded.
    pub fn is_complete(&self) -> bool {
        !self.truncated
    }

    /// Whether the explored edges contain a cycle (self-loops included).
    pub fn has_cycle(&self) -> bool {
        self.topological_order().is_none()
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for es in &self.edges {
            for &j in es {
                indeg[j] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &self.edges[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Length of the longest path from the initial state, if acyclic.
    pub fn longest_path(&self) -> Option<usize> {
        let order = self.topological_order()?;
        let mut dist = vec![0usize; self.len()];
        for &i in &order {
            for &j in &self.edges[i] {
                dist[j] = dist[j].max(dist[i] + 1);
            }
        }
        // every state is reachable from 0, which is first in the order
        dist.into_iter().max()
    }

    /// States from which some state satisfying `target` is reachable.
    pub fn can_reach(&self, target: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.len();
        let mut rev = vec![Vec::new(); n];
        for (i, es) in self.edges.iter().enumerate() {
            for &j in es {
                rev[j].push(i);
            }
        }
        let mut ok = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| target(i)).collect();
        for &i in &queue {
            ok[i] = true;
        }
        while let Some(j) = queue.pop_front() {
            for &i in &rev[j] {
                if !ok[i] {
                    ok[i] = true;
                    queue.push_back(i);
                }
            }
        }
        ok
    }

    /// Indices on one shortest path from the initial state to `to`.
    pub fn path_to(&self, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.len()];
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if i == to {
                break;
            }
            for &j in &self.edges[i] {
                if seen.insert(j) {
                    parent[j] = i;
                    queue.push_back(j);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != 0 && parent[cur] != usize::MAX {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn countdown(n: &u32) -> Vec<u32> {
        if *n == 0 {
            vec![]
        } else {
            vec![n - 1, n / 2]
        }
    }

    #[test]
    fn finite_graph_is_complete_and_acyclic() {
        let g = explore(10u32, Bounds::new(100, 1000), countdown);
        assert!(g.is_complete());
        assert!(!g.has_cycle());
        assert_eq!(g.longest_path(), Some(10));
        assert_eq!(g.terminals().map(|i| g.states[i]).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn depth_bound_truncates() {
        let g = explore(10u32, Bounds::new(3, 1000), countdown);
        assert!(g.truncated);
        assert!(!g.contains(&0));
    }

    #[test]
    fn cycles_are_detected() {
        let g = explore(0u8, Bounds::new(10, 10), |n| vec![(n + 1) % 3]);
        assert!(g.is_complete());
        assert!(g.has_cycle());
        assert_eq!(g.longest_path(), None);
    }

    #[test]
    fn reachability_and_paths() {
        let g = explore(6u32, Bounds::new(100, 1000), countdown);
        let zero = g.find(&0).unwrap();
        assert!(g.can_reach(|i| i == zero).iter().all(|&b| b));
        let p = g.path_to(zero);
        assert_eq!(p.first(), Some(&0));
        assert_eq!(p.last(), Some(&zero));
    }
}
