//! Permutation equivalence of sign matrices and isomorphism of symmetric
//! matrices, both by backtracking with partition refinement.

use std::collections::HashMap;

use crate::linalg::{IntMatrix, SignMatrix};

/// Finds `π` with `b[π(i)][π(j)] = a[i][j]` for all `i, j`.
pub fn find_isomorphism(a: &IntMatrix, b: &IntMatrix) -> Option<Vec<usize>> {
    let n = a.order();
    if b.order() != n {
        return None;
    }
    let inv = |m: &IntMatrix, i: usize| {
        let mut r = m.row(i).to_vec();
        let d = r.remove(i);
        r.sort_unstable();
        (d, r)
    };
    let ia: Vec<_> = (0..n).map(|i| inv(a, i)).collect();
    let ib: Vec<_> = (0..n).map(|i| inv(b, i)).collect();
    let mut sa = ia.clone();
    let mut sb = ib.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    fn rec(
        a: &IntMatrix,
        b: &IntMatrix,
        ia: &[(i128, Vec<i128>)],
        ib: &[(i128, Vec<i128>)],
        i: usize,
        pi: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.order();
        if i == n {
            return true;
        }
        for t in 0..n {
            if used[t] || ia[i] != ib[t] {
                continue;
            }
            if (0..i).all(|j| a.get(i, j) == b.get(t, pi[j])) {
                used[t] = true;
                pi.push(t);
                if rec(a, b, ia, ib, i + 1, pi, used) {
                    return true;
                }
                pi.pop();
                used[t] = false;
            }
        }
        false
    }
    let mut pi = Vec::with_capacity(n);
    let mut used = vec![false; n];
    rec(a, b, &ia, &ib, 0, &mut pi, &mut used).then_some(pi)
}

/// Whether `b = P·a·Q` for permutation matrices `P`, `Q`.
pub fn permutation_equivalent(a: &SignMatrix, b: &SignMatrix) -> bool {
    let n = a.order();
    if b.order() != n {
        return false;
    }
    let row_sum = |m: &SignMatrix, i: usize| m.row(i).iter().map(|&v| v as i64).sum::<i64>();
    let mut ra: Vec<i64> = (0..n).map(|i| row_sum(a, i)).collect();
    let mut rb: Vec<i64> = (0..n).map(|i| row_sum(b, i)).collect();
    let (rsa, rsb) = (ra.clone(), rb.clone());
    ra.sort_unstable();
    rb.sort_unstable();
    if ra != rb {
        return false;
    }
    // Column labels refine as rows are matched; both sides must keep
    // identical label histograms.
    fn rec(
        a: &SignMatrix,
        b: &SignMatrix,
        rsa: &[i64],
        rsb: &[i64],
        i: usize,
        la: &[u32],
        lb: &[u32],
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.order();
        if i == n {
            return true;
        }
        for t in 0..n {
            if used[t] || rsa[i] != rsb[t] {
                continue;
            }
            let mut ids: HashMap<(u32, i8), u32> = HashMap::new();
            let mut na = vec![0u32; n];
            let mut nb = vec![0u32; n];
            for k in 0..n {
                let next = ids.len() as u32;
                na[k] = *ids.entry((la[k], a.get(i, k))).or_insert(next);
            }
            let mut ok = true;
            for k in 0..n {
                match ids.get(&(lb[k], b.get(t, k))) {
                    Some(&v) => nb[k] = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let mut ha = vec![0usize; ids.len()];
            let mut hb = vec![0usize; ids.len()];
            na.iter().for_each(|&v| ha[v as usize] += 1);
            nb.iter().for_each(|&v| hb[v as usize] += 1);
            if ha != hb {
                continue;
            }
            used[t] = true;
            if rec(a, b, rsa, rsb, i + 1, &na, &nb, used) {
                return true;
            }
            used[t] = false;
        }
        false
    }
    let zero = vec![0u32; n];
    rec(a, b, &rsa, &rsb, 0, &zero, &zero, &mut vec![false; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::construct_ehlich_block;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isomorphism_of_permuted_matrix() {
        let m = construct_ehlich_block(15, &[6, 3, 2, 2, 2]).unwrap().into_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut perm: Vec<usize> = (0..15).collect();
        perm.shuffle(&mut rng);
        let p = m.permute_symmetric(&perm);
        let pi = find_isomorphism(&m, &p).unwrap();
        for i in 0..15 {
            for j in 0..15 {
                assert_eq!(m.get(i, j), p.get(pi[i], pi[j]));
            }
        }
        let other = construct_ehlich_block(15, &[4, 4, 4, 3]).unwrap().into_matrix();
        assert!(find_isomorphism(&m, &other).is_none());
    }

    #[test]
    fn permuted_sign_matrices_are_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 9;
            let data: Vec<i8> = (0..n * n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
            let a = SignMatrix::new(n, data).unwrap();
            let mut rp: Vec<usize> = (0..n).collect();
            let mut cp: Vec<usize> = (0..n).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            let b = SignMatrix::new(n, (0..n * n).map(|e| a.get(rp[e / n], cp[e % n])).collect()).unwrap();
            assert!(permutation_equivalent(&a, &b));
            let mut c = b.clone();
            c.set(0, 0, -c.get(0, 0));
            assert!(!permutation_equivalent(&a, &c));
        }
    }
}
