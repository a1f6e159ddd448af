//! Canonical labeling of digraphs by individualization and refinement.
//!
//! The search tree individualizes vertices of the first smallest
//! non-singleton cell and refines after each step. The canonical leaf is
//! the one with the largest sequence of refinement traces, ties broken by
//! the lexicographically least relabeled matrix. Automorphisms are detected
//! when a leaf reproduces the first leaf; they prune sibling branches on
//! the first path and yield the group order as a product of orbit sizes.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::digraph::AdjacencyMatrix;
use crate::perm::Permutation;
use crate::refine::{Neighbours, Partition};

/// Relabeling-invariant representative of a digraph's isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `v` as 4 little-endian bytes, then the canonical matrix bit-packed
    /// row-major, most significant bit first.
    pub bytes: Vec<u8>,
    /// Maps each original vertex to its canonical label.
    pub labeling: Permutation,
    pub automorphism_group_order: BigUint,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        u32::from_le_bytes(self.bytes[..4].try_into().unwrap()) as usize
    }

    pub fn matrix(&self) -> AdjacencyMatrix {
        let v = self.order();
        let bits = &self.bytes[4..];
        let mut m = AdjacencyMatrix::zeros(v);
        for i in 0..v {
            for j in 0..v {
                let idx = i * v + j;
                if bits[idx / 8] >> (7 - idx % 8) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }
}

fn pack(a: &AdjacencyMatrix, lab: &[usize]) -> Vec<u8> {
    let v = a.order();
    let mut bytes = Vec::with_capacity(4 + (v * v).div_ceil(8));
    bytes.extend_from_slice(&(v as u32).to_le_bytes());
    let mut acc = 0u8;
    let mut filled = 0;
    for &x in lab {
        let row = a.row(x);
        for &y in lab {
            acc = acc << 1 | row[y];
            filled += 1;
            if filled == 8 {
                bytes.push(acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        bytes.push(acc << (8 - filled));
    }
    bytes
}

struct Leaf {
    traces: Vec<u64>,
    bytes: Vec<u8>,
    lab: Vec<usize>,
}

struct Search<'a> {
    a: &'a AdjacencyMatrix,
    g: Neighbours,
    first: Option<Leaf>,
    first_path: Vec<usize>,
    best: Option<Leaf>,
    /// automorphisms with the depth at which their leaf left the first path;
    /// each fixes the first path's vertices above that depth
    generators: Vec<(Permutation, usize)>,
}

enum Step {
    Continue,
    /// unwind to the first-path node at this depth
    Jump(usize),
}

fn orbit_roots(v: usize, gens: impl Iterator<Item = Permutation>) -> Vec<usize> {
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut parent: Vec<usize> = (0..v).collect();
    for g in gens {
        for x in 0..v {
            let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..v).map(|x| find(&mut parent, x)).collect()
}

impl Search<'_> {
    fn roots_at(&self, depth: usize) -> Vec<usize> {
        orbit_roots(
            self.a.order(),
            self.generators.iter().filter(|(_, d)| *d >= depth).map(|(g, _)| g.clone()),
        )
    }

    fn visit(&mut self, part: &Partition, path: &mut Vec<usize>, traces: &mut Vec<u64>, cmp_best: Ordering) -> Step {
        if part.is_discrete() {
            return self.leaf(part, path, traces, cmp_best);
        }
        let depth = path.len();
        let on_first_path = self.first.is_some() && path[..] == self.first_path[..depth.min(self.first_path.len())];
        let s = part.target_cell().expect("non-discrete partition has a target cell");
        let cell = part.cell(s).to_vec();
        let mut explored: Vec<usize> = Vec::new();
        for y in cell {
            if on_first_path && !explored.is_empty() {
                let roots = self.roots_at(depth);
                if explored.iter().any(|&e| roots[e] == roots[y]) {
                    continue;
                }
            }
            explored.push(y);
            let mut child = part.clone();
            let h = child.individualize(y, &self.g);
            traces.push(h);
            path.push(y);
            let may_equal_first = self
                .first
                .as_ref()
                .is_none_or(|f| f.traces.len() >= traces.len() && f.traces[..traces.len()] == traces[..]);
            let cmp = match (cmp_best, &self.best) {
                (Ordering::Equal, Some(best)) => match best.traces.get(depth) {
                    Some(&bh) => h.cmp(&bh),
                    None => Ordering::Greater,
                },
                (c, _) => c,
            };
            let step = if cmp == Ordering::Less && !may_equal_first {
                Step::Continue
            } else {
                self.visit(&child, path, traces, cmp)
            };
            path.pop();
            traces.pop();
            match step {
                Step::Jump(d) if d < depth => return Step::Jump(d),
                _ => {}
            }
        }
        Step::Continue
    }

    fn leaf(&mut self, part: &Partition, path: &[usize], traces: &[u64], cmp_best: Ordering) -> Step {
        let lab = part.lab().to_vec();
        let bytes = pack(self.a, &lab);
        let Some(first) = &self.first else {
            self.first_path = path.to_vec();
            self.first = Some(Leaf {
                traces: traces.to_vec(),
                bytes: bytes.clone(),
                lab: lab.clone(),
            });
            self.best = Some(Leaf {
                traces: traces.to_vec(),
                bytes,
                lab,
            });
            return Step::Continue;
        };
        if first.traces == traces && first.bytes == bytes {
            let mut images = vec![0; lab.len()];
            for (&x, &y) in first.lab.iter().zip(&lab) {
                images[x] = y;
            }
            let gamma = Permutation::from_images(images).expect("leaf labelings are bijections");
            let depth = path.iter().zip(&self.first_path).take_while(|(a, b)| a == b).count();
            self.generators.push((gamma, depth));
            return Step::Jump(depth);
        }
        let best = self.best.as_ref().expect("best is set with first");
        let better = match cmp_best {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match traces.len().cmp(&best.traces.len()) {
                Ordering::Equal => bytes < best.bytes,
                longer => longer == Ordering::Greater,
            },
        };
        if better {
            self.best = Some(Leaf {
                traces: traces.to_vec(),
                bytes,
                lab,
            });
        }
        Step::Continue
    }
}

/// Canonical form, canonical labeling and automorphism group order of `a`.
pub fn canonical_form(a: &AdjacencyMatrix) -> CanonicalForm {
    let v = a.order();
    let mut search = Search {
        a,
        g: Neighbours::of(a),
        first: None,
        first_path: Vec::new(),
        best: None,
        generators: Vec::new(),
    };
    let mut root = Partition::unit(v);
    let h = root.refine_all(&search.g);
    let mut traces = vec![h];
    let mut path = Vec::new();
    search.visit(&root, &mut path, &mut traces, Ordering::Equal);

    let mut order = BigUint::from(1u32);
    for (depth, &x) in search.first_path.iter().enumerate() {
        let roots = search.roots_at(depth);
        let size = roots.iter().filter(|&&r| r == roots[x]).count();
        order *= BigUint::from(size);
    }
    let best = search.best.expect("every search reaches a leaf");
    let mut images = vec![0; v];
    for (label, &x) in best.lab.iter().enumerate() {
        images[x] = label;
    }
    CanonicalForm {
        bytes: best.bytes,
        labeling: Permutation::from_images(images).expect("discrete partition"),
        automorphism_group_order: order,
    }
}

/// Isomorphism test via canonical bytes; different orders are never isomorphic.
pub fn are_isomorphic(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> bool {
    if a.order() != b.order() || a.arc_count() != b.arc_count() {
        return false;
    }
    canonical_form(a).bytes == canonical_form(b).bytes
}

pub fn automorphism_group_order(a: &AdjacencyMatrix) -> BigUint {
    canonical_form(a).automorphism_group_order
}
