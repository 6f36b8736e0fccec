//! Compensated summation and exact-quadrant roots of unity.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of complex numbers, one accumulator per component.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// `Σ |z|` with compensated accumulation.
pub fn l1(values: &[Complex64]) -> f64 {
    sum(values.iter().map(|z| z.norm_sqr().sqrt()))
}

/// `Σ_i |a_i + c·b_i|` accumulated in four interleaved compensated lanes that
/// are merged in a fixed order, so the result does not depend on threading.
#[inline]
pub fn l1_axpy(a: &[Complex64], c: Complex64, b: &[Complex64]) -> f64 {
    let mut lanes = [CompensatedSum::new(); 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        for l in 0..4 {
            lanes[l].add((xa[l] + c * xb[l]).norm_sqr().sqrt());
        }
    }
    for (l, (x, y)) in ca.remainder().iter().zip(cb.remainder()).enumerate() {
        lanes[l].add((x + c * y).norm_sqr().sqrt());
    }
    let mut total = CompensatedSum::new();
    for lane in &lanes {
        total.add(lane.sum);
        total.add(lane.carry);
    }
    total.value()
}

/// `exp(2πi k / m)`, exact at quarter turns.
///
/// The angle is reduced to a quadrant with integer arithmetic first, so the
/// only transcendental evaluation is on `[0, π/2)`.
pub fn unit_root(k: u64, m: u64) -> Complex64 {
    debug_assert!(m > 0);
    let k = k % m;
    let quarter = 4 * k;
    let quadrant = quarter / m;
    let rem = quarter % m;
    let theta = FRAC_PI_2 * rem as f64 / m as f64;
    let (s, c) = theta.sin_cos();
    match quadrant {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// `z / |z|`, with the convention `sign(0) = 0`.
#[inline]
pub fn phase_of(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(vals), 2.0);
    }

    #[test]
    fn lane_sum_matches_plain_sum() {
        let a: Vec<Complex64> = (0..11).map(|i| Complex64::new(i as f64, -0.5)).collect();
        let b: Vec<Complex64> = (0..11).map(|i| Complex64::new(1.0, i as f64 * 0.25)).collect();
        let c = Complex64::new(0.3, -0.7);
        let want: f64 = a.iter().zip(&b).map(|(x, y)| (x + c * y).norm()).sum();
        assert!((l1_axpy(&a, c, &b) - want).abs() < 1e-12);
    }

    #[test]
    fn unit_roots_exact_on_axes() {
        assert_eq!(unit_root(0, 4), Complex64::new(1.0, 0.0));
        assert_eq!(unit_root(1, 4), Complex64::new(0.0, 1.0));
        assert_eq!(unit_root(2, 4), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_root(3, 4), Complex64::new(0.0, -1.0));
        assert_eq!(unit_root(32, 128), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn unit_roots_match_exp() {
        for m in 1..40u64 {
            for k in 0..2 * m {
                let want = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64);
                assert!((unit_root(k, m) - want).norm() < 1e-14, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(phase_of(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        assert!((phase_of(Complex64::new(3.0, 4.0)) - Complex64::new(0.6, 0.8)).norm() < 1e-15);
    }
}
