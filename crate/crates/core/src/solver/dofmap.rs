use crate::error::Result;
use crate::mesh::Mesh;
use crate::wg_element::ElementDofLayout;

/// Where a local degree of freedom lands in a global system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Index among the free unknowns of the system.
    Free(usize),
    /// Index into the edge trace storage of a fixed (boundary) unknown.
    Fixed(usize),
}

/// Global numbering of weak Galerkin unknowns.
///
/// Edge traces are stored per edge as `[v_b (k) | v_n (k)]`. Traces on
/// boundary edges are prescribed, the rest are free. The full system numbers
/// all interior blocks first, element by element, followed by the free edge
/// blocks in edge order. The condensed system numbers the free edge blocks
/// only.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub layout: ElementDofLayout,
    pub n_triangles: usize,
    pub n_edges: usize,
    edge_rank: Vec<Option<usize>>,
    n_free_edges: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        let layout = ElementDofLayout::new(k)?;
        let mut n_free_edges = 0;
        let edge_rank = mesh
            .edges()
            .iter()
            .map(|e| {
                if e.is_boundary {
                    None
                } else {
                    n_free_edges += 1;
                    Some(n_free_edges - 1)
                }
            })
            .collect();
        Ok(Self {
            layout,
            n_triangles: mesh.num_triangles(),
            n_edges: mesh.num_edges(),
            edge_rank,
            n_free_edges,
        })
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn n_interior(&self) -> usize {
        self.n_triangles * self.layout.n_interior
    }

    pub fn n_edge_free(&self) -> usize {
        self.n_free_edges * self.layout.per_edge()
    }

    pub fn n_edge_fixed(&self) -> usize {
        (self.n_edges - self.n_free_edges) * self.layout.per_edge()
    }

    /// Unknowns of the full system.
    pub fn n_full(&self) -> usize {
        self.n_interior() + self.n_edge_free()
    }

    /// Unknowns of the condensed system.
    pub fn n_condensed(&self) -> usize {
        self.n_edge_free()
    }

    pub fn is_fixed_edge(&self, e: usize) -> bool {
        self.edge_rank[e].is_none()
    }

    /// Storage index of trace unknown `local` (in `0..2k`) of edge `e`.
    pub fn edge_storage(&self, e: usize, local: usize) -> usize {
        e * self.layout.per_edge() + local
    }

    fn edge_slot(&self, e: usize, local: usize, offset: usize) -> Slot {
        match self.edge_rank[e] {
            Some(r) => Slot::Free(offset + r * self.layout.per_edge() + local),
            None => Slot::Fixed(self.edge_storage(e, local)),
        }
    }

    /// Slots of all local unknowns of triangle `t` in the full system.
    pub fn full_slots(&self, mesh: &Mesh, t: usize) -> Vec<Slot> {
        let n0 = self.layout.n_interior;
        let mut slots: Vec<Slot> = (0..n0).map(|m| Slot::Free(t * n0 + m)).collect();
        for te in mesh.tri_edges(t) {
            for local in 0..self.layout.per_edge() {
                slots.push(self.edge_slot(te.edge, local, self.n_interior()));
            }
        }
        slots
    }

    /// Slots of the edge unknowns of triangle `t` in the condensed system.
    pub fn condensed_slots(&self, mesh: &Mesh, t: usize) -> Vec<Slot> {
        let mut slots = Vec::with_capacity(3 * self.layout.per_edge());
        for te in mesh.tri_edges(t) {
            for local in 0..self.layout.per_edge() {
                slots.push(self.edge_slot(te.edge, local, 0));
            }
        }
        slots
    }

    /// Condensed-system index of each edge storage slot, `None` if fixed.
    pub fn condensed_index(&self, e: usize, local: usize) -> Option<usize> {
        self.edge_rank[e].map(|r| r * self.layout.per_edge() + local)
    }
}
