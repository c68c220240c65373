//! Dense linear algebra over a prime field `GF(p)`.

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64;
    let mut b = (base % p) as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p64;
        }
        b = b * b % p64;
        exp >>= 1;
    }
    acc as u32
}

/// Rank of a `rows × cols` row-major matrix over `GF(p)`. The matrix is
/// reduced in place.
pub(crate) fn rank_mod_p(m: &mut [u32], rows: usize, cols: usize, p: u32) -> usize {
    debug_assert_eq!(m.len(), rows * cols);
    let p64 = p as u64;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..cols {
                m.swap(pivot * cols + c, rank * cols + c);
            }
        }
        let inv = inv_mod(m[rank * cols + col], p) as u64;
        for c in col..cols {
            m[rank * cols + c] = (m[rank * cols + c] as u64 * inv % p64) as u32;
        }
        for r in rank + 1..rows {
            let factor = m[r * cols + col] as u64;
            if factor == 0 {
                continue;
            }
            for c in col..cols {
                let sub = factor * m[rank * cols + c] as u64 % p64;
                m[r * cols + c] = ((m[r * cols + c] as u64 + p64 - sub) % p64) as u32;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        let mut id = [1, 0, 0, 1];
        assert_eq!(rank_mod_p(&mut id, 2, 2, 3), 2);
        // rows (1,2) and (2,1) are dependent mod 3: 2*(1,2) = (2,4) = (2,1)
        let mut dep = [1, 2, 2, 1];
        assert_eq!(rank_mod_p(&mut dep, 2, 2, 3), 1);
        let mut zero = [0; 6];
        assert_eq!(rank_mod_p(&mut zero, 2, 3, 5), 0);
    }

    #[test]
    fn inverses_mod_p() {
        for p in [2u32, 3, 5, 7, 65521] {
            for a in 1..p.min(200) {
                assert_eq!(a as u64 * inv_mod(a, p) as u64 % p as u64, 1);
            }
        }
    }
}
