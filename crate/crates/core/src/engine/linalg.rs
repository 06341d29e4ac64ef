//! Small dense complex LU used in the tracking hot loop.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// In-place LU factorisation with partial pivoting of a row-major `m x m` matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    m: usize,
    a: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(m: usize) -> Self {
        Lu { m, a: vec![ZERO; m * m], perm: (0..m).collect() }
    }

    pub fn matrix_mut(&mut self) -> &mut [Complex64] {
        &mut self.a
    }

    /// Factors the matrix currently stored; returns false if a pivot vanishes.
    pub fn factor(&mut self) -> bool {
        let m = self.m;
        let a = &mut self.a;
        for (i, p) in self.perm.iter_mut().enumerate() {
            *p = i;
        }
        let scale = a.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max).sqrt();
        if !(scale > 0.0 && scale.is_finite()) {
            return false;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = a[col * m + col].norm_sqr();
            for r in col + 1..m {
                let v = a[r * m + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.sqrt() <= 1e-300_f64.max(scale * f64::EPSILON * 1e-4) {
                return false;
            }
            if piv != col {
                for c in 0..m {
                    a.swap(col * m + c, piv * m + c);
                }
                self.perm.swap(col, piv);
            }
            let inv = a[col * m + col].inv();
            for r in col + 1..m {
                let f = a[r * m + col] * inv;
                if f == ZERO {
                    continue;
                }
                a[r * m + col] = f;
                let (top, bottom) = a.split_at_mut(r * m);
                let pivot_row = &top[col * m + col + 1..col * m + m];
                let row = &mut bottom[col + 1..m];
                for (x, p) in row.iter_mut().zip(pivot_row) {
                    *x -= f * p;
                }
            }
        }
        true
    }

    /// Solves `A x = b` in place using the stored factors.
    pub fn solve(&self, b: &mut [Complex64], tmp: &mut [Complex64]) {
        let m = self.m;
        let a = &self.a;
        for i in 0..m {
            tmp[i] = b[self.perm[i]];
        }
        for i in 0..m {
            let (done, rest) = tmp.split_at_mut(i);
            let row = &a[i * m..i * m + i];
            rest[0] -= row.iter().zip(done.iter()).map(|(x, y)| x * y).sum::<Complex64>();
        }
        for i in (0..m).rev() {
            let (head, done) = tmp.split_at_mut(i + 1);
            let row = &a[i * m + i + 1..i * m + m];
            let s = head[i] - row.iter().zip(done[..m - i - 1].iter()).map(|(x, y)| x * y).sum::<Complex64>();
            head[i] = s / a[i * m + i];
        }
        b[..m].copy_from_slice(&tmp[..m]);
    }
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
