//! Arithmetic and elimination over prime fields `Z/pZ` with `p < 2^62`.

/// `2^61 - 1`.
pub const MERSENNE_61: u64 = 2_305_843_009_213_693_951;
/// Largest prime below `2^61 - 1`.
pub const PRIME_61B: u64 = 2_305_843_009_213_693_921;

pub const RANK_PRIMES: [u64; 2] = [MERSENNE_61, PRIME_61B];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 62) && is_prime(p), "{p} is not a usable prime");
        PrimeField { p }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn from_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    /// Rank of a dense row-major matrix by Gaussian elimination.
    pub fn rank(self, rows: &[Vec<u64>]) -> usize {
        let mut basis = RowBasis::new(self, rows.first().map_or(0, Vec::len));
        for r in rows {
            basis.insert(r.clone());
        }
        basis.rank()
    }
}

/// Incrementally maintained reduced row basis; `insert` reports whether a row was
/// independent of the rows inserted so far.
#[derive(Debug, Clone)]
pub struct RowBasis {
    field: PrimeField,
    width: usize,
    // (pivot column, normalized row with 1 at the pivot)
    rows: Vec<(usize, Vec<u64>)>,
}

impl RowBasis {
    pub fn new(field: PrimeField, width: usize) -> Self {
        RowBasis { field, width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, row: &mut [u64]) {
        let f = self.field;
        for (pivot, b) in &self.rows {
            let c = row[*pivot];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(b) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
    }

    pub fn is_independent(&self, row: &[u64]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().any(|&x| x != 0)
    }

    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        assert_eq!(row.len(), self.width);
        self.reduce(&mut row);
        let Some(pivot) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(row[pivot]);
        for x in row.iter_mut() {
            *x = f.mul(*x, inv);
        }
        // keep existing rows reduced at the new pivot
        for (_, b) in self.rows.iter_mut() {
            let c = b[pivot];
            if c != 0 {
                for (x, &y) in b.iter_mut().zip(&row) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, ascending with multiplicity.
pub fn factorize(mut c: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= c {
        while c % p == 0 {
            out.push(p);
            c /= p;
        }
        p += 1;
    }
    if c > 1 {
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_primes_are_prime_and_distinct() {
        assert!(is_prime(MERSENNE_61));
        assert!(is_prime(PRIME_61B));
        assert!((PRIME_61B + 1..MERSENNE_61).all(|x| !is_prime(x)));
        assert!(!is_prime(MERSENNE_61 - 2));
    }

    #[test]
    fn small_rank() {
        let f = PrimeField::new(101);
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(f.rank(&rows), 2);
        let f = PrimeField::new(MERSENNE_61);
        let neg = f.from_i64(-5);
        assert_eq!(f.add(neg, 5), 0);
        assert_eq!(f.mul(f.inv(7), 7), 1);
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(45), vec![3, 3, 5]);
        assert_eq!(factorize(32), vec![2; 5]);
        assert_eq!(factorize(1), Vec::<u64>::new());
        assert_eq!(factorize(97), vec![97]);
    }
}
