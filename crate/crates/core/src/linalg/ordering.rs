//! Approximate minimum degree ordering on the quotient graph.
//!
//! Variables are eliminated in order of an upper bound on their external
//! degree. Eliminated pivots become elements; elements whose variable lists
//! fall inside the newest element are absorbed, and variables with identical
//! adjacency are merged into supervariables and eliminated together.

use std::collections::{BTreeMap, BTreeSet};

use super::CsrMatrix;

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Variable,
    Element,
    Absorbed,
    Merged,
}

/// Fill-reducing permutation of the symmetric pattern of `a`:
/// `perm[k]` is the original index eliminated at step `k`.
pub fn approximate_minimum_degree(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for &j in a.row(i).0 {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut elems: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut lvars: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut state = vec![State::Variable; n];
    let mut nv = vec![1usize; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut deg: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (deg[i], i)).collect();
    // w[e] = |L_e \ L_p| during a step, -1 when untouched
    let mut w: Vec<isize> = vec![-1; n];
    let mut mark = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut eliminated = 0usize;

    while let Some((_, p)) = queue.pop_first() {
        mark[p] = p;
        let mut lp = Vec::new();
        for e in std::mem::take(&mut elems[p]) {
            if state[e] != State::Element {
                continue;
            }
            for &i in &lvars[e] {
                if state[i] == State::Variable && mark[i] != p {
                    mark[i] = p;
                    lp.push(i);
                }
            }
            state[e] = State::Absorbed;
            lvars[e] = Vec::new();
        }
        for &i in &adj[p] {
            if state[i] == State::Variable && mark[i] != p {
                mark[i] = p;
                lp.push(i);
            }
        }
        adj[p] = Vec::new();
        state[p] = State::Element;
        eliminated += nv[p];
        order.extend(std::mem::take(&mut members[p]));

        for &i in &lp {
            queue.remove(&(deg[i], i));
            elems[i].retain(|&e| state[e] == State::Element);
            elems[i].push(p);
            adj[i].retain(|&j| state[j] == State::Variable && mark[j] != p);
        }
        let lp_weight: usize = lp.iter().map(|&i| nv[i]).sum();

        let mut touched = Vec::new();
        for &i in &lp {
            for &e in &elems[i] {
                if e == p {
                    continue;
                }
                if w[e] < 0 {
                    w[e] = lvars[e].iter().filter(|&&j| state[j] == State::Variable).map(|&j| nv[j]).sum::<usize>() as isize;
                    touched.push(e);
                }
                w[e] -= nv[i] as isize;
            }
        }
        for &i in &lp {
            let mut external = 0usize;
            for &e in &elems[i] {
                if e == p {
                    continue;
                }
                if w[e] == 0 {
                    state[e] = State::Absorbed;
                } else {
                    external += w[e] as usize;
                }
            }
            elems[i].retain(|&e| state[e] == State::Element);
            let a_weight: usize = adj[i].iter().map(|&j| nv[j]).sum();
            let others = lp_weight - nv[i];
            let bound = n - eliminated - nv[i];
            deg[i] = bound.min(deg[i] + others).min(a_weight + others + external);
        }
        for e in touched {
            w[e] = -1;
            if state[e] == State::Absorbed {
                lvars[e] = Vec::new();
            }
        }
        lvars[p] = lp.clone();

        // supervariable detection among the variables of the new element
        let mut groups: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
        for &i in &lp {
            adj[i].sort_unstable();
            elems[i].sort_unstable();
            let key = (adj[i].len() + elems[i].len(), adj[i].iter().sum::<usize>(), elems[i].iter().sum::<usize>());
            groups.entry(key).or_default().push(i);
        }
        for group in groups.values().filter(|g| g.len() > 1) {
            for a in 0..group.len() {
                let i = group[a];
                if state[i] != State::Variable {
                    continue;
                }
                for &j in &group[a + 1..] {
                    if state[j] == State::Variable && adj[j] == adj[i] && elems[j] == elems[i] {
                        nv[i] += nv[j];
                        deg[i] = deg[i].saturating_sub(nv[j]);
                        state[j] = State::Merged;
                        let moved = std::mem::take(&mut members[j]);
                        members[i].extend(moved);
                        adj[j] = Vec::new();
                        elems[j] = Vec::new();
                    }
                }
            }
        }
        for &i in &lp {
            if state[i] == State::Variable {
                queue.insert((deg[i], i));
            }
        }
    }
    order
}

/// Inverse of a permutation.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}
