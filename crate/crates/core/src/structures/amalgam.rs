use super::structure::FiniteStructure;
use super::types::distinct_tuples;
use crate::error::{Error, Result};

/// Free amalgam of `b` and `c` over a common substructure.
///
/// `glue` pairs a vertex of `b` with a vertex of `c`; the glued pairs must
/// induce isomorphic substructures. The result has `b` on `0..|b|` followed
/// by the unglued vertices of `c` in ascending order, and contains exactly
/// the tuples of `b` and of `c`. The second component maps each vertex of
/// `c` to its image.
pub fn free_amalgam(
    b: &FiniteStructure,
    c: &FiniteStructure,
    glue: &[(usize, usize)],
) -> Result<(FiniteStructure, Vec<usize>)> {
    if b.signature() != c.signature() {
        return Err(Error::input("amalgamated structures must share a signature"));
    }
    let mut c_to_d = vec![usize::MAX; c.size()];
    let mut b_used = vec![false; b.size()];
    for &(bv, cv) in glue {
        if bv >= b.size() || cv >= c.size() {
            return Err(Error::input(format!("glue pair ({bv}, {cv}) out of range")));
        }
        if b_used[bv] || c_to_d[cv] != usize::MAX {
            return Err(Error::input("glue is not a bijection"));
        }
        b_used[bv] = true;
        c_to_d[cv] = bv;
    }
    // The glue must be an isomorphism between the induced pieces.
    for &(bv, cv) in glue {
        if b.unary_pattern(bv) != c.unary_pattern(cv) {
            return Err(Error::input(format!("glued vertices {bv} and {cv} differ in unary flags")));
        }
    }
    for (r, rel) in b.signature().relations().iter().enumerate() {
        for t in distinct_tuples(glue.len(), rel.arity) {
            let tb: Vec<usize> = t.iter().map(|&i| glue[i].0).collect();
            let tc: Vec<usize> = t.iter().map(|&i| glue[i].1).collect();
            if b.has_tuple(r, &tb) != c.has_tuple(r, &tc) {
                return Err(Error::input("glue is not an isomorphism of the shared part"));
            }
        }
    }

    let mut next = b.size();
    for slot in c_to_d.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let mut d = b.clone();
    d.grow(next - b.size());
    let image = c.map_vertices(&c_to_d, next);
    for r in 0..c.signature().relations().len() {
        for t in image.tuples(r) {
            d.insert(r, t.clone())?;
        }
    }
    for u in 0..c.signature().unaries().len() {
        for &v in image.unary_set(u) {
            d.set_unary(u, v, true)?;
        }
    }
    Ok((d, c_to_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::canon::isomorphic;

    #[test]
    fn two_edges_over_a_vertex_make_a_path() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        let (d, map) = free_amalgam(&k2, &k2, &[(1, 0)]).unwrap();
        assert_eq!(map, vec![1, 2]);
        assert_eq!(d, FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap());
    }

    #[test]
    fn empty_base_is_disjoint_union() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        let (d, _) = free_amalgam(&k2, &k2, &[]).unwrap();
        let two_k2 = FiniteStructure::graph(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(isomorphic(&d, &two_k2));
    }

    #[test]
    fn rejects_non_isomorphic_glue() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        let e2 = FiniteStructure::graph(2, &[]).unwrap();
        assert!(free_amalgam(&k2, &e2, &[(0, 0), (1, 1)]).is_err());
        assert!(free_amalgam(&k2, &k2, &[(0, 0), (0, 1)]).is_err());
        let arc = FiniteStructure::digraph(2, &[(0, 1)]).unwrap();
        // crossing the glue reverses the shared arc
        assert!(free_amalgam(&arc, &arc, &[(0, 0), (1, 1)]).is_ok());
        assert!(free_amalgam(&arc, &arc, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn restrictions_recover_the_factors() {
        let p3 = FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        let k3 = FiniteStructure::graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let (d, map) = free_amalgam(&p3, &k3, &[(0, 2), (1, 0)]).unwrap();
        assert_eq!(d.size(), 4);
        assert_eq!(d.induced(&[0, 1, 2]).unwrap().0, p3);
        let (back, _) = d.induced(&map).unwrap();
        assert!(isomorphic(&back, &k3));
        // vertex 2 of p3 and the fresh vertex share no tuple
        assert!(!d.adjacent(2, 3).unwrap());
    }
}
