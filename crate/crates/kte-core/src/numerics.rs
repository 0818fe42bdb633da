//! Small numerical kernels shared across the crate: golden-section search,
//! bisection, adaptive Simpson quadrature, monotone cubic Hermite
//! interpolation, and log-log lookup tables.

const INVPHI: f64 = 0.618_033_988_749_894_9;
const INVPHI2: f64 = 0.381_966_011_250_105_2;

/// Golden-section maximization of a unimodal function on `[a, b]`.
///
/// Returns the best `(x, f(x))` seen, including the endpoints, so a maximum
/// attained at the boundary of the bracket is still reported correctly.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a0: f64, b0: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (a0, b0);
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut h = b - a;
    if h <= tol {
        return best;
    }
    let mut c = a + INVPHI2 * h;
    let mut d = a + INVPHI * h;
    let mut fc = f(c);
    let mut fd = f(d);
    while h > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            h = b - a;
            c = a + INVPHI2 * h;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            h = b - a;
            d = a + INVPHI * h;
            fd = f(d);
        }
        let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Golden-section minimization on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_max(|t| -f(t), a, b, tol);
    (x, -neg)
}

/// Bisection for a root of `f` on `[lo, hi]`, assuming `f(lo)` and `f(hi)`
/// have opposite signs. Stops when the bracket shrinks below
/// `tol_x * (1 + |mid|)` or `|f(mid)| <= tol_f`.
pub fn bisect_root<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol_x: f64,
    tol_f: f64,
    max_iter: usize,
) -> f64 {
    let mut flo = f(lo);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol_f {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= tol_x * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Trapezoid rule over sampled values `y` at nodes `x` (same length).
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}

/// Monotone cubic Hermite interpolant (Fritsch-Carlson limited).
///
/// Constructed from strictly increasing abscissae, values, and nodal slopes.
/// The limiter only kicks in where the supplied slopes would break
/// monotonicity, so exact slopes of a monotone function pass through
/// untouched. Evaluation clamps to the endpoint values outside the range.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, mut m: Vec<f64>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len() && y.len() == m.len());
        for k in 0..x.len() - 1 {
            let d = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
            if d == 0.0 {
                m[k] = 0.0;
                m[k + 1] = 0.0;
                continue;
            }
            let alpha = m[k] / d;
            let beta = m[k + 1] / d;
            if alpha < 0.0 {
                m[k] = 0.0;
            }
            if beta < 0.0 {
                m[k + 1] = 0.0;
            }
            let s = alpha * alpha + beta * beta;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[k] = tau * alpha * d;
                m[k + 1] = tau * beta * d;
            }
        }
        Self { x, y, m }
    }

    /// Slopes estimated from the secants (the classical Fritsch-Carlson setup).
    pub fn from_values(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2);
        let mut m = vec![0.0; n];
        let d: Vec<f64> = (0..n - 1)
            .map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k]))
            .collect();
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for k in 1..n - 1 {
            m[k] = if d[k - 1] * d[k] <= 0.0 {
                0.0
            } else {
                0.5 * (d[k - 1] + d[k])
            };
        }
        Self::with_slopes(x, y, m)
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => k.min(self.x.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1]
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.m[0];
        }
        if t >= self.x[n - 1] {
            return self.m[n - 1];
        }
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let d00 = 6.0 * s * (s - 1.0) / h;
        let d10 = (1.0 - s) * (1.0 - 3.0 * s);
        let d01 = -d00;
        let d11 = s * (3.0 * s - 2.0);
        d00 * self.y[k] + d10 * self.m[k] + d01 * self.y[k + 1] + d11 * self.m[k + 1]
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }
}

/// Piecewise-linear interpolation in (ln x, ln y) for a positive increasing
/// function. Exact on piecewise power laws whose break points are table nodes;
/// extrapolates with the end-segment slopes outside the tabulated range.
#[derive(Debug, Clone)]
pub struct LogLogTable {
    ln_x: Vec<f64>,
    ln_y: Vec<f64>,
}

impl LogLogTable {
    pub fn new(xs: &[f64], ys: &[f64]) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len());
        let ln_x: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
        let ln_y: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
        debug_assert!(ln_x.windows(2).all(|w| w[1] > w[0]));
        Self { ln_x, ln_y }
    }

    fn interp(grid: &[f64], vals: &[f64], t: f64) -> f64 {
        let n = grid.len();
        let k = match grid.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => return vals[k],
            Err(0) => 0,
            Err(k) if k >= n => n - 2,
            Err(k) => k - 1,
        };
        let w = (t - grid[k]) / (grid[k + 1] - grid[k]);
        vals[k] + w * (vals[k + 1] - vals[k])
    }

    pub fn eval(&self, x: f64) -> f64 {
        Self::interp(&self.ln_x, &self.ln_y, x.ln()).exp()
    }

    /// Inverse lookup; requires the tabulated values to be strictly increasing.
    pub fn inverse(&self, y: f64) -> f64 {
        Self::interp(&self.ln_y, &self.ln_x, y.ln()).exp()
    }
}
