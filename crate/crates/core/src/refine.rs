//! Ordered vertex partitions with equitable refinement for digraphs.
//!
//! Shared by the automorphism search and canonical labeling. A cell is
//! identified by its start position in `lab`; splitting keeps the start of
//! the first fragment, so identifiers stay valid while a cell shrinks.

use std::collections::VecDeque;

use crate::digraph::AdjacencyMatrix;

/// Out- and in-neighbour lists of a digraph.
#[derive(Debug, Clone)]
pub(crate) struct Neighbours {
    pub out: Vec<Vec<usize>>,
    pub inn: Vec<Vec<usize>>,
}

impl Neighbours {
    pub fn of(a: &AdjacencyMatrix) -> Self {
        let v = a.order();
        let mut out = vec![Vec::new(); v];
        let mut inn = vec![Vec::new(); v];
        for x in 0..v {
            for y in a.out_neighbours(x) {
                out[x].push(y);
                inn[y].push(x);
            }
        }
        Neighbours { out, inn }
    }
}

const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(FNV_PRIME)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Partition {
    lab: Vec<usize>,
    /// vertex -> start of its cell
    cell_of: Vec<usize>,
    /// start -> end (exclusive); meaningful at cell starts only
    cell_end: Vec<usize>,
    cells: usize,
}

impl Partition {
    pub fn unit(v: usize) -> Self {
        let mut cell_end = vec![0; v.max(1)];
        if v > 0 {
            cell_end[0] = v;
        }
        Partition {
            lab: (0..v).collect(),
            cell_of: vec![0; v],
            cell_end,
            cells: usize::from(v > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.lab.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    pub fn cell(&self, start: usize) -> &[usize] {
        &self.lab[start..self.cell_end[start]]
    }

    /// Vertices in partition order; a discrete partition read this way is a labeling.
    pub fn lab(&self) -> &[usize] {
        &self.lab
    }

    fn starts(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cells);
        let mut s = 0;
        while s < self.lab.len() {
            out.push(s);
            s = self.cell_end[s];
        }
        out
    }

    /// First cell of minimum size among the non-singleton cells.
    pub fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for s in self.starts() {
            let size = self.cell_end[s] - s;
            if size > 1 && best.is_none_or(|(_, b)| size < b) {
                best = Some((s, size));
            }
        }
        best.map(|(s, _)| s)
    }

    /// Refines from the unit partition with every cell as a splitter.
    pub fn refine_all(&mut self, g: &Neighbours) -> u64 {
        let starts = self.starts();
        self.refine(g, starts)
    }

    /// Splits `x` off the front of its cell and refines. Returns the trace hash.
    pub fn individualize(&mut self, x: usize, g: &Neighbours) -> u64 {
        let s = self.cell_of[x];
        let e = self.cell_end[s];
        debug_assert!(e - s > 1, "individualizing a singleton");
        let pos = self.lab[s..e].iter().position(|&y| y == x).unwrap() + s;
        self.lab.swap(s, pos);
        self.lab[s + 1..e].sort_unstable();
        self.cell_end[s] = s + 1;
        self.cell_end[s + 1] = e;
        for &y in &self.lab[s + 1..e] {
            self.cell_of[y] = s + 1;
        }
        self.cells += 1;
        let h = mix(mix(FNV_OFFSET, s as u64), (e - s) as u64);
        mix(h, self.refine(g, vec![s]))
    }

    /// Equitable refinement driven by a FIFO of splitter cells. Each vertex is
    /// keyed by (out-arcs into the splitter, in-arcs from the splitter); cells
    /// split into fragments by ascending key. The returned hash depends only
    /// on labeling-invariant data.
    fn refine(&mut self, g: &Neighbours, initial: Vec<usize>) -> u64 {
        let v = self.lab.len();
        let mut queued = vec![false; v.max(1)];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in initial {
            if !queued[s] {
                queued[s] = true;
                queue.push_back(s);
            }
        }
        let mut out_cnt = vec![0u32; v];
        let mut in_cnt = vec![0u32; v];
        let mut touched: Vec<usize> = Vec::new();
        let mut h = FNV_OFFSET;

        while let Some(w) = queue.pop_front() {
            queued[w] = false;
            if self.is_discrete() {
                break;
            }
            let splitter: Vec<usize> = self.cell(w).to_vec();
            touched.clear();
            for &y in &splitter {
                for &x in &g.inn[y] {
                    if out_cnt[x] == 0 && in_cnt[x] == 0 {
                        touched.push(x);
                    }
                    out_cnt[x] += 1;
                }
                for &x in &g.out[y] {
                    if out_cnt[x] == 0 && in_cnt[x] == 0 {
                        touched.push(x);
                    }
                    in_cnt[x] += 1;
                }
            }
            let mut cells_hit: Vec<usize> = touched.iter().map(|&x| self.cell_of[x]).collect();
            cells_hit.sort_unstable();
            cells_hit.dedup();
            h = mix(h, w as u64);
            for s in cells_hit {
                let e = self.cell_end[s];
                if e - s == 1 {
                    let x = self.lab[s];
                    h = mix(mix(h, out_cnt[x] as u64), in_cnt[x] as u64);
                    continue;
                }
                let cell = &mut self.lab[s..e];
                cell.sort_unstable_by_key(|&x| (out_cnt[x], in_cnt[x], x));
                let key = |x: usize| (out_cnt[x], in_cnt[x]);
                let mut frag_starts = vec![s];
                for i in s + 1..e {
                    if key(self.lab[i]) != key(self.lab[i - 1]) {
                        frag_starts.push(i);
                    }
                }
                h = mix(h, s as u64);
                for &fs in &frag_starts {
                    let x = self.lab[fs];
                    h = mix(mix(mix(h, out_cnt[x] as u64), in_cnt[x] as u64), fs as u64);
                }
                if frag_starts.len() == 1 {
                    continue;
                }
                let was_queued = queued[s];
                for (idx, &fs) in frag_starts.iter().enumerate() {
                    let fe = frag_starts.get(idx + 1).copied().unwrap_or(e);
                    self.cell_end[fs] = fe;
                    for i in fs..fe {
                        let x = self.lab[i];
                        self.cell_of[x] = fs;
                    }
                    if !(was_queued && idx == 0) && !queued[fs] {
                        queued[fs] = true;
                        queue.push_back(fs);
                    }
                }
                self.cells += frag_starts.len() - 1;
            }
            for &x in &touched {
                out_cnt[x] = 0;
                in_cnt[x] = 0;
            }
        }
        mix(h, self.cells as u64)
    }
}
