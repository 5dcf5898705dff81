const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`. Returns the best point
/// evaluated (endpoints included) and its value.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let f_hi = f(hi);
    if f_hi > best.1 {
        best = (hi, f_hi);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol && iterations < 200 {
        iterations += 1;
        if fc >= fd {
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
        for (x, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best
}

/// Maximum of `f` on `[0, hi]` when `f` is only piecewise unimodal, as on a
/// projected path.
///
/// Evaluates `f` at `hi, hi/2, hi/4, ...` down to `tol`, then runs
/// [`golden_section_max`] on the cell around the best sample. Returns the
/// best point seen, `0` included.
pub fn halving_scan_max(mut f: impl FnMut(f64) -> f64, hi: f64, tol: f64) -> (f64, f64) {
    let mut samples = vec![(0.0, f(0.0))];
    let mut a = hi;
    while a > tol && samples.len() < 2100 {
        samples.push((a, f(a)));
        a *= 0.5;
    }
    let (k, &best) = samples
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .expect("at least one sample");
    if k == 0 {
        return best;
    }
    // neighbours in alpha: the next sample is smaller, the previous larger
    let lo = samples.get(k + 1).map_or(0.0, |s| s.0);
    let up = if k == 1 { hi } else { samples[k - 1].0 };
    let refined = golden_section_max(&mut f, lo, up, tol);
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}
