use crate::scalar::Scalar;

/// Arc capacity. `Infinite` is only used for synthetic super links and is
/// replaced by a finite sentinel when a residual graph is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Capacity<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Capacity::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc<S> {
    pub src: usize,
    pub dst: usize,
    pub capacity: Capacity<S>,
    pub length_km: f64,
}

/// An undirected link stored as two directed arcs of equal capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub forward: usize,
    pub reverse: usize,
}

/// Directed capacity graph with an outgoing adjacency index.
///
/// Node ids are dense `0..node_count()`. Satellites take the low ids; any
/// synthetic nodes are appended with [`CapacityGraph::add_node`].
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityGraph<S> {
    node_count: usize,
    arcs: Vec<Arc<S>>,
    out: Vec<Vec<usize>>,
    links: Vec<Link>,
}

impl<S: Scalar> CapacityGraph<S> {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            arcs: Vec::new(),
            out: vec![Vec::new(); node_count],
            links: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn add_node(&mut self) -> usize {
        self.out.push(Vec::new());
        self.node_count += 1;
        self.node_count - 1
    }

    /// Adds a directed arc and returns its id.
    ///
    /// Panics if an endpoint is out of range or a finite capacity is negative.
    pub fn add_arc(
        &mut self,
        src: usize,
        dst: usize,
        capacity: Capacity<S>,
        length_km: f64,
    ) -> usize {
        assert!(
            src < self.node_count && dst < self.node_count,
            "arc endpoint out of range"
        );
        if let Capacity::Finite(c) = capacity {
            assert!(c >= S::zero(), "negative capacity");
        }
        let id = self.arcs.len();
        self.arcs.push(Arc {
            src,
            dst,
            capacity,
            length_km,
        });
        self.out[src].push(id);
        id
    }

    /// Adds an undirected link as a pair of directed arcs and returns the link id.
    pub fn add_link(&mut self, a: usize, b: usize, capacity: S, length_km: f64) -> usize {
        let forward = self.add_arc(a, b, Capacity::Finite(capacity), length_km);
        let reverse = self.add_arc(b, a, Capacity::Finite(capacity), length_km);
        self.links.push(Link {
            a,
            b,
            forward,
            reverse,
        });
        self.links.len() - 1
    }

    pub fn arcs(&self) -> &[Arc<S>] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &Arc<S> {
        &self.arcs[id]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn out_arcs(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    /// First arc `src -> dst`, if any.
    pub fn find_arc(&self, src: usize, dst: usize) -> Option<usize> {
        self.out
            .get(src)?
            .iter()
            .copied()
            .find(|&a| self.arcs[a].dst == dst)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.out[node].len()
    }

    /// Sum of all finite arc capacities.
    pub fn finite_capacity_sum(&self) -> S {
        self.arcs.iter().filter_map(|a| a.capacity.finite()).sum()
    }

    /// Network capacity as the sum over undirected links, each counted once.
    pub fn total_link_capacity(&self) -> S {
        self.links
            .iter()
            .filter_map(|l| self.arcs[l.forward].capacity.finite())
            .sum()
    }

    /// Copy of the graph keeping only the links for which `keep(link_id)` is
    /// true. Node ids are preserved; arc and link ids are renumbered. Arcs
    /// that are not part of a link are always kept.
    pub fn retain_links(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let mut in_link = vec![false; self.arcs.len()];
        for l in &self.links {
            in_link[l.forward] = true;
            in_link[l.reverse] = true;
        }
        let mut g = Self::new(self.node_count);
        for (id, l) in self.links.iter().enumerate() {
            if keep(id) {
                let fwd = &self.arcs[l.forward];
                let cap = fwd.capacity.finite().unwrap_or_else(S::zero);
                g.add_link(l.a, l.b, cap, fwd.length_km);
            }
        }
        for (id, a) in self.arcs.iter().enumerate() {
            if !in_link[id] {
                g.add_arc(a.src, a.dst, a.capacity, a.length_km);
            }
        }
        g
    }

    /// Breadth-first reachability from `start` over arcs of positive capacity.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                let open = match arc.capacity {
                    Capacity::Finite(c) => c.is_positive(),
                    Capacity::Infinite => true,
                };
                if open && !seen[arc.dst] {
                    seen[arc.dst] = true;
                    stack.push(arc.dst);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn links_are_arc_pairs() {
        let mut g = CapacityGraph::<f64>::new(3);
        let l = g.add_link(0, 1, 10.0, 5.0);
        let link = g.links()[l];
        assert_eq!(g.arc(link.forward).src, 0);
        assert_eq!(g.arc(link.reverse).src, 1);
        assert_eq!(g.arc(link.forward).capacity, g.arc(link.reverse).capacity);
        assert_eq!(g.total_link_capacity(), 10.0);
        assert_eq!(g.finite_capacity_sum(), 20.0);
    }

    #[test]
    fn retain_links_drops_both_directions() {
        let mut g = CapacityGraph::<f64>::new(3);
        g.add_link(0, 1, 10.0, 1.0);
        g.add_link(1, 2, 10.0, 1.0);
        g.add_arc(2, 0, Capacity::Infinite, 0.0);
        let h = g.retain_links(|id| id == 1);
        assert_eq!(h.links().len(), 1);
        assert!(h.find_arc(0, 1).is_none());
        assert!(h.find_arc(2, 1).is_some());
        assert!(h.find_arc(2, 0).is_some());
    }

    #[test]
    fn reachability_ignores_zero_arcs() {
        let mut g = CapacityGraph::<f64>::new(3);
        g.add_arc(0, 1, Capacity::Finite(0.0), 0.0);
        g.add_arc(0, 2, Capacity::Finite(1.0), 0.0);
        let r = g.reachable_from(0);
        assert_eq!(r, vec![true, false, true]);
    }
}
