//! Disjoint sets over a contiguous block of cell indices.
//!
//! The smaller index always becomes the root, so the final partition and
//! every root are independent of the order in which unions are applied.

#[derive(Debug, Clone)]
pub struct DisjointSets {
    base: u32,
    parent: Vec<u32>,
}

impl DisjointSets {
    /// Singletons for the global indices `base..base + len`.
    pub fn new(base: u32, len: usize) -> Self {
        DisjointSets {
            base,
            parent: (base..base + len as u32).collect(),
        }
    }

    /// Concatenates per-slab sets covering consecutive index ranges.
    pub fn concat(parts: Vec<DisjointSets>) -> Self {
        let base = parts.first().map_or(0, |p| p.base);
        let mut parent = Vec::with_capacity(parts.iter().map(|p| p.parent.len()).sum());
        for part in parts {
            debug_assert_eq!(part.base as usize, base as usize + parent.len());
            parent.extend(part.parent);
        }
        DisjointSets { base, parent }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn slot(&self, x: u32) -> usize {
        (x - self.base) as usize
    }

    /// Root of `x`, halving the path on the way.
    pub fn find(&mut self, mut x: u32) -> u32 {
        loop {
            let p = self.parent[self.slot(x)];
            if p == x {
                return x;
            }
            let gp = self.parent[self.slot(p)];
            let sx = self.slot(x);
            self.parent[sx] = gp;
            x = gp;
        }
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            let s = self.slot(hi);
            self.parent[s] = lo;
        }
    }
}
