//! Dense polynomials over F_p, coefficient lists with the constant term first.

pub(crate) fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub(crate) fn rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let deg_m = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|c| c % p).collect();
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        if lead != 0 {
            for (i, mi) in m.iter().enumerate() {
                let sub = (lead * mi) % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    trim(r)
}

/// True when the monic `m` of degree `n` has no monic factor of degree
/// `1..=n/2`. Exhaustive over candidate divisors.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let n = m.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for v in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut x = v;
            for _ in 0..d {
                f.push(x % p);
                x /= p;
            }
            f.push(1);
            if rem_monic(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            while v % d == 0 {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// Kernel of a square matrix over F_p (row-major `rows x cols`), returned as
/// basis vectors.
pub(crate) fn kernel_mod_p(mut mat: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| mat[i][c] != 0) else {
            continue;
        };
        mat.swap(r, pr);
        let inv = inv_mod(mat[r][c], p);
        for v in mat[r].iter_mut() {
            *v = (*v * inv) % p;
        }
        for i in 0..rows {
            if i != r && mat[i][c] != 0 {
                let f = mat[i][c];
                for j in 0..cols {
                    let sub = (f * mat[r][j]) % p;
                    mat[i][j] = (mat[i][j] + p - sub) % p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - mat[row][f] % p) % p;
            }
            v
        })
        .collect()
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}
