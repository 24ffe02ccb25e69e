//! Exact sign of a sum of `f64` terms, using non-overlapping partial sums
//! (Shewchuk's expansion arithmetic, the scheme behind Python's `math.fsum`).

use std::cmp::Ordering;

/// `a + b = s + err` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// `a * b = p + err` exactly (barring overflow/underflow).
#[inline]
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Running exact sum of finite `f64` values.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut kept = 0;
        for i in 0..self.partials.len() {
            let mut y = self.partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let (hi, lo) = two_sum(x, y);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        if x != 0.0 {
            self.partials.push(x);
        }
    }

    /// Sign of the exact sum. The partials are non-overlapping and increasing
    /// in magnitude, so the largest one decides.
    pub fn sign(&self) -> Ordering {
        match self.partials.last() {
            None => Ordering::Equal,
            Some(x) => x.partial_cmp(&0.0).expect("finite partials"),
        }
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn exact_sign(terms: impl IntoIterator<Item = f64>) -> Ordering {
    let mut s = ExactSum::new();
    s.extend(terms);
    s.sign()
}
