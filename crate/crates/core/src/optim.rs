//! Golden-section search for the maximum of a unimodal function.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximize `f` on `[lo, hi]`. Stops after `max_iter` interval reductions
/// or once the bracket is narrower than `tol`. The returned point is the
/// best interior probe; end points are never evaluated.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> GoldenResult {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while iterations < max_iter && (b - a) > tol {
        iterations += 1;
        // NaN compares false and moves the bracket towards c.
        if fc >= fd || fd.is_nan() {
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
    }
    if fc >= fd || fd.is_nan() {
        GoldenResult { x: c, value: fc, iterations }
    } else {
        GoldenResult { x: d, value: fd, iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex() {
        let r = golden_section_max(|x| -(x - 0.37).powi(2) + 2.0, -1.0, 1.0, 1e-12, 200);
        assert!((r.x - 0.37).abs() < 1e-6);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_goes_to_edge() {
        let r = golden_section_max(|x| x, 0.0, 1.0, 1e-10, 200);
        assert!(r.x > 1.0 - 1e-9);
    }

    #[test]
    fn iteration_cap() {
        let mut calls = 0;
        let r = golden_section_max(
            |x| {
                calls += 1;
                -x * x
            },
            -1.0,
            1.0,
            0.0,
            10,
        );
        assert_eq!(r.iterations, 10);
        assert_eq!(calls, 12);
    }
}
