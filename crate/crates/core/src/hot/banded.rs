//! Symmetric positive definite pentadiagonal systems.

#[derive(Debug, Clone)]
pub(crate) struct Pentadiagonal {
    pub diag: Vec<f64>,
    /// `A[j][j + 1]`
    pub off1: Vec<f64>,
    /// `A[j][j + 2]`
    pub off2: Vec<f64>,
}

impl Pentadiagonal {
    pub(crate) fn zeros(n: usize) -> Self {
        Pentadiagonal {
            diag: vec![0.0; n],
            off1: vec![0.0; n.saturating_sub(1)],
            off2: vec![0.0; n.saturating_sub(2)],
        }
    }

    pub(crate) fn reset(&mut self) {
        self.diag.fill(0.0);
        self.off1.fill(0.0);
        self.off2.fill(0.0);
    }

    /// Adds `c · r rᵀ` where `r` is supported on `start..start + r.len()`.
    pub(crate) fn add_outer(&mut self, start: usize, r: &[f64], c: f64) {
        for (a, &ra) in r.iter().enumerate() {
            self.diag[start + a] += c * ra * ra;
            if a + 1 < r.len() {
                self.off1[start + a] += c * ra * r[a + 1];
            }
            if a + 2 < r.len() {
                self.off2[start + a] += c * ra * r[a + 2];
            }
        }
    }

    /// Solves `A x = b` by `L D Lᵀ`. Pivots that round to nonpositive values
    /// are lifted to a small multiple of the diagonal.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        let mut l2 = vec![0.0; n.saturating_sub(2)];
        for j in 0..n {
            let mut dj = self.diag[j];
            if j >= 1 {
                dj -= l1[j - 1] * l1[j - 1] * d[j - 1];
            }
            if j >= 2 {
                dj -= l2[j - 2] * l2[j - 2] * d[j - 2];
            }
            let floor = 1e-14 * self.diag[j].abs().max(f64::MIN_POSITIVE);
            d[j] = dj.max(floor);
            if j + 1 < n {
                let mut a = self.off1[j];
                if j >= 1 {
                    a -= l2[j - 1] * l1[j - 1] * d[j - 1];
                }
                l1[j] = a / d[j];
            }
            if j + 2 < n {
                l2[j] = self.off2[j] / d[j];
            }
        }
        let mut x = b.to_vec();
        for j in 0..n {
            if j >= 1 {
                x[j] -= l1[j - 1] * x[j - 1];
            }
            if j >= 2 {
                x[j] -= l2[j - 2] * x[j - 2];
            }
        }
        for j in 0..n {
            x[j] /= d[j];
        }
        for j in (0..n).rev() {
            if j + 1 < n {
                x[j] -= l1[j] * x[j + 1];
            }
            if j + 2 < n {
                x[j] -= l2[j] * x[j + 2];
            }
        }
        x
    }

    #[cfg(test)]
    fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut y = vec![0.0; n];
        for j in 0..n {
            y[j] += self.diag[j] * x[j];
            if j + 1 < n {
                y[j] += self.off1[j] * x[j + 1];
                y[j + 1] += self.off1[j] * x[j];
            }
            if j + 2 < n {
                y[j] += self.off2[j] * x[j + 2];
                y[j + 2] += self.off2[j] * x[j];
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 3, 10, 200] {
            let mut a = Pentadiagonal::zeros(n);
            for j in 0..n {
                a.diag[j] = 1e-3;
            }
            for _ in 0..3 * n {
                let len = rng.gen_range(1..=3.min(n));
                let start = rng.gen_range(0..=n - len);
                let r: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
                a.add_outer(start, &r, rng.gen_range(0.0..5.0));
            }
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = a.mul(&x);
            let got = a.solve(&b);
            let err = got.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(err < 1e-8, "n={n}: {err}");
        }
    }
}
