//! Thin float helpers over `libm` so the crate builds without `std`.

pub(crate) use libm::{asin, exp, log, log10, sqrt};

pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// Integer power by repeated squaring.
pub(crate) fn powi(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

pub(crate) fn powf(base: f64, exp: f64) -> f64 {
    libm::pow(base, exp)
}

pub(crate) fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}
