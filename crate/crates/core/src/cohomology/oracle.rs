//! Independent component counts for `{p ∈ (C*)^m : ∏ p_i^{a_i} = 1}`.

/// Invariant factors `d_1 | d_2 | …` of an integer matrix (nonzero ones only).
pub fn smith_normal_form(a: &[Vec<i64>]) -> Vec<i64> {
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero pivot in the trailing block
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].abs());
            let Some((pi, pj)) = pivot else {
                return diag;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                for j in t..cols {
                    m[i][j] -= q * m[t][j];
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                for row in m.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        m[t][j] += m[i][j];
                    }
                }
                None => {
                    diag.push(p.abs());
                    break;
                }
            }
        }
    }
    diag
}

/// Components of the kernel of the character with exponent matrix `a` on
/// `(C*)^m`: the product of the invariant factors.
pub fn torus_kernel_components(a: &[Vec<i64>]) -> u64 {
    smith_normal_form(a).iter().map(|&d| d as u64).product()
}

pub fn lcm_upto(n: usize) -> u64 {
    (1..=n as u64).fold(1, |l, k| l / super::gcd(l as usize, k as usize) as u64 * k)
}

/// Connected components of `{p ∈ (μ_N)^m : ∏ p_i^{s_i} = 1}` with
/// `N = lcm(1..n)·n`, where two points are joined when they differ by an
/// integer kernel vector of sup-norm at most `n`.
pub fn brute_force_components(sizes: &[usize], n: usize) -> usize {
    let m = sizes.len();
    let big = (lcm_upto(n) * n as u64) as usize;
    let total = big.pow(m as u32);
    let s: Vec<i64> = sizes.iter().map(|&x| x as i64).collect();

    let mut moves: Vec<Vec<i64>> = Vec::new();
    let r = n as i64;
    let mut v = vec![-r; m];
    loop {
        if v.iter().any(|&x| x != 0) && v.iter().zip(&s).map(|(a, b)| a * b).sum::<i64>() == 0 {
            moves.push(v.clone());
        }
        let mut k = 0;
        while k < m && v[k] == r {
            v[k] = -r;
            k += 1;
        }
        if k == m {
            break;
        }
        v[k] += 1;
    }

    let decode = |mut idx: usize| {
        let mut e = vec![0i64; m];
        for x in e.iter_mut() {
            *x = (idx % big) as i64;
            idx /= big;
        }
        e
    };
    let encode = |e: &[i64]| e.iter().rev().fold(0usize, |acc, &x| acc * big + x as usize);
    let member = |e: &[i64]| e.iter().zip(&s).map(|(a, b)| a * b).sum::<i64>() % big as i64 == 0;

    let mut seen = vec![0u64; total.div_ceil(64)];
    let mark = |seen: &mut [u64], i: usize| {
        let fresh = seen[i / 64] & (1 << (i % 64)) == 0;
        seen[i / 64] |= 1 << (i % 64);
        fresh
    };
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..total {
        let e = decode(start);
        if !member(&e) || !mark(&mut seen, start) {
            continue;
        }
        components += 1;
        stack.push(start);
        while let Some(cur) = stack.pop() {
            let e = decode(cur);
            for mv in &moves {
                let f: Vec<i64> = e.iter().zip(mv).map(|(a, b)| (a + b).rem_euclid(big as i64)).collect();
                let idx = encode(&f);
                if mark(&mut seen, idx) {
                    stack.push(idx);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_small_cases() {
        assert_eq!(smith_normal_form(&[vec![1]]), vec![1]);
        assert_eq!(smith_normal_form(&[vec![2]]), vec![2]);
        assert_eq!(smith_normal_form(&[vec![4, 6]]), vec![2]);
        assert_eq!(
            smith_normal_form(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]),
            vec![2, 6, 12]
        );
        assert_eq!(smith_normal_form(&[vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(torus_kernel_components(&[vec![6, 4, 2]]), 2);
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(lcm_upto(4), 12);
        assert_eq!(brute_force_components(&[1], 1), 1);
        assert_eq!(brute_force_components(&[2], 2), 2);
        assert_eq!(brute_force_components(&[2, 1], 3), 1);
        assert_eq!(brute_force_components(&[4, 2], 6), 2);
    }
}
