use super::structure::FiniteStructure;

/// An induced embedding of `a` into `x`, as the image of each vertex of `a`.
pub fn find_embedding(a: &FiniteStructure, x: &FiniteStructure) -> Option<Vec<usize>> {
    let mut found = None;
    embeddings_with(a, x, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

pub fn embeds(a: &FiniteStructure, x: &FiniteStructure) -> bool {
    find_embedding(a, x).is_some()
}

/// All induced embeddings of `a` into `x`.
pub fn all_embeddings(a: &FiniteStructure, x: &FiniteStructure) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    embeddings_with(a, x, &mut |m| {
        out.push(m.to_vec());
        true
    });
    out
}

/// Automorphisms of `x`, each as a vertex permutation.
pub fn automorphisms(x: &FiniteStructure) -> Vec<Vec<usize>> {
    all_embeddings(x, x)
}

/// Backtracking search. `visit` returns whether to keep going.
fn embeddings_with(a: &FiniteStructure, x: &FiniteStructure, visit: &mut dyn FnMut(&[usize]) -> bool) {
    if a.signature() != x.signature() || a.size() > x.size() {
        return;
    }
    let mut used = vec![false; x.size()];
    let mut map = Vec::with_capacity(a.size());
    extend(a, x, &mut used, &mut map, visit);
}

fn consistent(a: &FiniteStructure, x: &FiniteStructure, map: &[usize], v: usize, image: usize) -> bool {
    if a.unary_pattern(v) != x.unary_pattern(image) {
        return false;
    }
    // Every tuple over mapped vertices containing v must agree in both
    // directions. Checking both sides over the same index tuples covers that.
    let k = map.len();
    let lookup = |i: usize| if i == v { image } else { map[i] };
    for (r, rel) in a.signature().relations().iter().enumerate() {
        let arity = rel.arity;
        let mut tuple = vec![0usize; arity];
        if !check_tuples(a, x, r, v, k, &mut tuple, 0, false, &lookup) {
            return false;
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn check_tuples(
    a: &FiniteStructure,
    x: &FiniteStructure,
    r: usize,
    v: usize,
    k: usize,
    tuple: &mut Vec<usize>,
    pos: usize,
    has_v: bool,
    lookup: &dyn Fn(usize) -> usize,
) -> bool {
    if pos == tuple.len() {
        if !has_v {
            return true;
        }
        let image: Vec<usize> = tuple.iter().map(|&i| lookup(i)).collect();
        return a.has_tuple(r, tuple) == x.has_tuple(r, &image);
    }
    for i in 0..=k {
        let i = if i == k { v } else { i };
        if tuple[..pos].contains(&i) {
            continue;
        }
        tuple[pos] = i;
        if !check_tuples(a, x, r, v, k, tuple, pos + 1, has_v || i == v, lookup) {
            return false;
        }
    }
    true
}

fn extend(
    a: &FiniteStructure,
    x: &FiniteStructure,
    used: &mut [bool],
    map: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let v = map.len();
    if v == a.size() {
        return visit(map);
    }
    for image in x.vertices() {
        if used[image] || !consistent(a, x, map, v, image) {
            continue;
        }
        used[image] = true;
        map.push(image);
        let go_on = extend(a, x, used, map, visit);
        map.pop();
        used[image] = false;
        if !go_on {
            return false;
        }
    }
    true
}
