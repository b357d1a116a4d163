#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};

pub use ness_core::oracles::many_body::random_correlation;

pub type C = Complex<f64>;
pub type M = DMatrix<C>;

pub fn blocks(c: &M, n1: usize) -> (M, M) {
    let n = c.nrows();
    (
        c.view((0, 0), (n1, n1)).into_owned(),
        c.view((n1, n1), (n - n1, n - n1)).into_owned(),
    )
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
