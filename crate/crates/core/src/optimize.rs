//! Derivative-free minimization of unimodal functions on an interval.

/// Inverse golden ratio, `(√5 − 1)/2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `width`.
pub fn golden_section_minimize<F>(f: F, lo: f64, hi: f64, width: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > width && iterations < 10_000 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum { x, value, iterations }
}
