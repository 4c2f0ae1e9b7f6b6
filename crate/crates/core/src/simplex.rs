//! Derivative-free Nelder–Mead minimization.

/// Stopping rules and initial simplex size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Converged once every vertex lies within this distance of the best one.
    pub tol: f64,
    pub max_iters: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 2000,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn along(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    base.iter()
        .zip(toward)
        .map(|(b, w)| b + t * (w - b))
        .collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Minimizes `f` starting from `x0`. NaN values are treated as `+inf`.
pub fn minimize<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diameter = pts[1..]
            .iter()
            .map(|p| distance(p, &pts[0]))
            .fold(0.0, f64::max);
        if diameter < opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = pts[n].clone();
        let reflected = along(&centroid, &worst, -REFLECT);
        let fr = eval(&reflected);

        if fr < vals[0] {
            let expanded = along(&centroid, &worst, -EXPAND);
            let fe = eval(&expanded);
            if fe < fr {
                pts[n] = expanded;
                vals[n] = fe;
            } else {
                pts[n] = reflected;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = reflected;
            vals[n] = fr;
            continue;
        }
        let (trial, ft) = if fr < vals[n] {
            let outside = along(&centroid, &reflected, CONTRACT);
            let fo = eval(&outside);
            (outside, if fo <= fr { fo } else { f64::INFINITY })
        } else {
            let inside = along(&centroid, &worst, CONTRACT);
            let fi = eval(&inside);
            (inside, if fi < vals[n] { fi } else { f64::INFINITY })
        };
        if ft.is_finite() {
            pts[n] = trial;
            vals[n] = ft;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            pts[i] = along(&best, &pts[i], SHRINK);
            vals[i] = eval(&pts[i]);
        }
    }
    SimplexResult {
        x: pts[0].clone(),
        value: vals[0],
        iterations,
        converged,
    }
}
