//! Minimal complex vector/matrix arithmetic for channel and beamforming math.
//!
//! The matrices involved are small and dense (receive elements x transmit
//! elements), so a flat row-major buffer beats pulling in a full linear
//! algebra stack.

use num_complex::Complex64;

/// Dense complex matrix, row-major, `rows` x `cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Rank-one update `self += g * a * b^H` with `a` of length `rows` and
    /// `b` of length `cols`.
    pub fn add_scaled_outer(&mut self, g: Complex64, a: &[Complex64], b: &[Complex64]) {
        assert_eq!(a.len(), self.rows, "left vector length must equal rows");
        assert_eq!(b.len(), self.cols, "right vector length must equal cols");
        for (r, &ar) in a.iter().enumerate() {
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            let s = g * ar;
            for (entry, &bc) in row.iter_mut().zip(b.iter()) {
                *entry += s * bc.conj();
            }
        }
    }

    /// Matrix-vector product `self * x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "vector length must equal cols");
        self.data
            .chunks_exact(self.cols)
            .map(|row| {
                let mut acc = Complex64::ZERO;
                for (&h, &xc) in row.iter().zip(x.iter()) {
                    acc += h * xc;
                }
                acc
            })
            .collect()
    }

    /// Conjugate-transpose-vector product `self^H * y`.
    pub fn mul_vec_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows, "vector length must equal rows");
        let mut x = vec![Complex64::ZERO; self.cols];
        for (row, &yr) in self.data.chunks_exact(self.cols).zip(y.iter()) {
            for (acc, &h) in x.iter_mut().zip(row.iter()) {
                *acc += h.conj() * yr;
            }
        }
        x
    }

    /// Bilinear form `u^H * self * v`.
    pub fn quadratic_form(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        assert_eq!(u.len(), self.rows, "left vector length must equal rows");
        let hv = self.mul_vec(v);
        inner(u, &hv)
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Hermitian inner product `a^H b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "inner product length mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| x.conj() * y)
        .sum()
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn outer_product_accumulation() {
        let mut m = CMat::zeros(2, 2);
        let a = [c(1.0, 0.0), c(0.0, 1.0)];
        let b = [c(1.0, 0.0), c(1.0, 0.0)];
        m.add_scaled_outer(c(2.0, 0.0), &a, &b);
        assert_eq!(m.get(0, 0), c(2.0, 0.0));
        assert_eq!(m.get(1, 0), c(0.0, 2.0));
        // b is conjugated on the right: entry (0,1) = 2 * a0 * conj(b1)
        assert_eq!(m.get(0, 1), c(2.0, 0.0));
    }

    #[test]
    fn quadratic_form_matches_manual_expansion() {
        let m = CMat::from_data(
            2,
            2,
            vec![c(1.0, 1.0), c(0.0, -2.0), c(3.0, 0.0), c(0.5, 0.5)],
        );
        let u = [c(0.6, 0.0), c(0.0, 0.8)];
        let v = [c(0.0, 1.0), c(1.0, 0.0)];
        let mut expect = Complex64::ZERO;
        for (r, ur) in u.iter().enumerate() {
            for (cc, vc) in v.iter().enumerate() {
                expect += ur.conj() * m.get(r, cc) * vc;
            }
        }
        let got = m.quadratic_form(&u, &v);
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn adjoint_product_consistent_with_inner() {
        let m = CMat::from_data(
            2,
            3,
            vec![
                c(1.0, 0.0),
                c(0.0, 1.0),
                c(2.0, -1.0),
                c(0.0, 0.0),
                c(1.0, 1.0),
                c(-1.0, 0.5),
            ],
        );
        let x = [c(0.3, 0.1), c(-0.2, 0.4), c(1.0, 0.0)];
        let y = [c(0.5, -0.5), c(0.25, 0.0)];
        // <y, Mx> == <M^H y, x>
        let lhs = inner(&y, &m.mul_vec(&x));
        let rhs = inner(&m.mul_vec_adjoint(&y), &x);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn frobenius_norm() {
        let m = CMat::from_data(1, 2, vec![c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((m.frobenius_norm_sq() - 25.0).abs() < 1e-15);
    }
}
