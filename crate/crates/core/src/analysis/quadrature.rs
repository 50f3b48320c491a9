//! Adaptive Simpson quadrature.

pub(crate) struct Outcome {
    pub value: f64,
    /// Sum of the Richardson error estimates over accepted panels.
    pub error: f64,
    pub evaluations: usize,
    /// Whether any panel hit the depth limit before meeting its tolerance.
    pub exhausted: bool,
    pub finite: bool,
}

pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Outcome {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut out = Outcome {
        value: 0.0,
        error: 0.0,
        evaluations: 3,
        exhausted: false,
        finite: fa.is_finite() && fb.is_finite() && fm.is_finite(),
    };
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    out: &mut Outcome,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    out.evaluations += 2;
    if !(flm.is_finite() && frm.is_finite()) {
        out.finite = false;
        return;
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if libm::fabs(delta) <= 15.0 * tol || depth == 0 {
        if depth == 0 && libm::fabs(delta) > 15.0 * tol {
            out.exhausted = true;
        }
        out.value += left + right + delta / 15.0;
        out.error += libm::fabs(delta) / 15.0;
        return;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let o = adaptive_simpson(&|x: f64| libm::exp(-x), 0.0, 10.0, 1e-13, 40);
        assert!((o.value - (1.0 - libm::exp(-10.0))).abs() < 1e-11);
        assert!(!o.exhausted && o.finite);

        let o = adaptive_simpson(&|x: f64| libm::log(x), 1.0, 2.0, 1e-13, 40);
        assert!((o.value - (2.0 * libm::log(2.0) - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn flags_nonfinite() {
        let o = adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-10, 10);
        assert!(!o.finite);
    }
}
