//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrate y' = f(s, y) from `s0` through each target in `targets` (monotone,
/// in the direction of travel), returning the state at every target.
pub fn integrate<const N: usize, F>(f: F, s0: f64, y0: [f64; N], targets: &[f64], rtol: f64, h0: f64) -> Vec<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(targets.len());
    let mut s = s0;
    let mut y = y0;
    let mut h = h0.abs();
    let mut k1 = f(s, &y);
    for &target in targets {
        let dir = if target >= s { 1.0 } else { -1.0 };
        while (target - s) * dir > 0.0 {
            let step = h.min((target - s).abs()) * dir;
            let k2 = f(s + C2 * step, &axpy(&y, &[(A21, &k1)], step));
            let k3 = f(s + C3 * step, &axpy(&y, &[(A31, &k1), (A32, &k2)], step));
            let k4 = f(s + C4 * step, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step));
            let k5 = f(s + C5 * step, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step));
            let k6 = f(s + step, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], step));
            let yn = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], step);
            let k7 = f(s + step, &yn);
            let zero = [0.0; N];
            let errv = axpy(&zero, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)], step);
            let scale = rtol * norm(&y).max(norm(&yn)).max(1e-300);
            let e = norm(&errv) / scale;
            if e <= 1.0 {
                s += step;
                y = yn;
                k1 = k7;
            }
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h = step.abs() * fac;
        }
        out.push(y);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let w = 7.0f64;
        let ts = [1.0, 3.0, 10.0];
        let r = integrate(|_, y: &[f64; 2]| [y[1], -w * w * y[0]], 0.0, [1.0, 0.0], &ts, 1e-12, 0.01);
        for (t, y) in ts.iter().zip(&r) {
            assert!((y[0] - (w * t).cos()).abs() < 1e-9, "{t}: {}", y[0]);
        }
        // backward
        let r = integrate(|_, y: &[f64; 2]| [y[1], -w * w * y[0]], 1.0, [(w).cos(), -w * (w).sin()], &[0.0], 1e-12, 0.01);
        assert!((r[0][0] - 1.0).abs() < 1e-10);
    }
}
