use crate::digraph::AdjacencyMatrix;
use crate::error::{DsrgError, Result};
use crate::perm::{is_prime, Permutation};
use crate::refine::{Neighbours, Partition};

/// True iff `A[g(x)][g(y)] = A[x][y]` for all `x, y`.
pub fn is_automorphism(a: &AdjacencyMatrix, g: &Permutation) -> Result<bool> {
    if a.order() != g.degree() {
        return Err(DsrgError::DimensionMismatch {
            expected: a.order(),
            found: g.degree(),
        });
    }
    Ok(preserves_arcs(a, g))
}

fn preserves_arcs(a: &AdjacencyMatrix, g: &Permutation) -> bool {
    let v = a.order();
    (0..v).all(|x| {
        let gx = g.apply(x);
        (0..v).all(|y| a.get(x, y) == a.get(gx, g.apply(y)))
    })
}

/// Every automorphism of `a`, sorted by image array.
///
/// Pairs a fixed individualization path on the domain side with every
/// compatible path on the image side; subtrees whose refinement traces
/// disagree are skipped, and leaves are checked against the arc set.
pub fn all_automorphisms(a: &AdjacencyMatrix) -> Vec<Permutation> {
    let g = Neighbours::of(a);
    let mut left = Partition::unit(a.order());
    left.refine_all(&g);
    let right = left.clone();
    let mut found = Vec::new();
    pair_search(a, &g, &left, &right, &mut found);
    found.sort();
    found
}

fn same_shape(p: &Partition, q: &Partition) -> bool {
    let mut s = 0;
    while s < p.len() {
        let (a, b) = (p.cell(s).len(), q.cell(s).len());
        if a != b {
            return false;
        }
        s += a;
    }
    true
}

fn pair_search(
    a: &AdjacencyMatrix,
    g: &Neighbours,
    left: &Partition,
    right: &Partition,
    found: &mut Vec<Permutation>,
) {
    if left.is_discrete() {
        let mut images = vec![0; a.order()];
        for (&x, &y) in left.lab().iter().zip(right.lab()) {
            images[x] = y;
        }
        let perm = Permutation::from_images(images).expect("discrete partitions give a bijection");
        if preserves_arcs(a, &perm) {
            found.push(perm);
        }
        return;
    }
    let s = left.target_cell().expect("non-discrete partition has a target cell");
    let x = left.cell(s)[0];
    let mut next_left = left.clone();
    let trace = next_left.individualize(x, g);
    for &y in right.cell(s) {
        let mut next_right = right.clone();
        if next_right.individualize(y, g) == trace && same_shape(&next_left, &next_right) {
            pair_search(a, g, &next_left, &next_right, found);
        }
    }
}

/// All automorphisms of `a` of order exactly `p`, sorted and deduplicated.
pub fn find_prime_order_automorphisms(a: &AdjacencyMatrix, p: usize) -> Result<Vec<Permutation>> {
    if !is_prime(p) {
        return Err(DsrgError::NotPrimeOrder(p));
    }
    if p > a.order() {
        return Ok(Vec::new());
    }
    Ok(all_automorphisms(a).into_iter().filter(|g| g.order() == p).collect())
}
