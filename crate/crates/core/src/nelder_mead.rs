//! Derivative-free simplex minimization (Nelder–Mead with dimension-adaptive
//! coefficients).

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop once every vertex is within this distance (max norm) of the best one.
    pub x_tol: f64,
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

fn initial_simplex(x0: &[f64]) -> Vec<Vec<f64>> {
    let mut sim = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] = if v[i] != 0.0 { v[i] * 1.05 } else { 0.00025 };
        sim.push(v);
    }
    sim
}

pub fn minimize(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let d = x0.len();
    let df = d as f64;
    let (alpha, beta, gamma, delta) = if d > 1 {
        (1.0, 1.0 + 2.0 / df, 0.75 - 1.0 / (2.0 * df), 1.0 - 1.0 / df)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let eval = |x: &[f64], n: &mut usize| {
        *n += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut evals = 0;
    let mut sim = initial_simplex(x0);
    let mut fs: Vec<f64> = sim.iter().map(|x| eval(x, &mut evals)).collect();
    loop {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        sim = order.iter().map(|&i| sim[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i]).collect();
        let spread = sim[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&sim[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= opts.x_tol || evals >= opts.max_evals {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| sim[..d].iter().map(|v| v[j]).sum::<f64>() / df).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|j| centroid[j] + t * (sim[d][j] - centroid[j])).collect() };
        let xr = along(-alpha);
        let fr = eval(&xr, &mut evals);
        if fr < fs[0] {
            let xe = along(-alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                sim[d] = xe;
                fs[d] = fe;
            } else {
                sim[d] = xr;
                fs[d] = fr;
            }
            continue;
        }
        if fr < fs[d - 1] {
            sim[d] = xr;
            fs[d] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < fs[d] {
            let xc = along(-alpha * gamma);
            let fc = eval(&xc, &mut evals);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(gamma);
            let fc = eval(&xc, &mut evals);
            let ok = fc < fs[d];
            (xc, fc, ok)
        };
        if accept {
            sim[d] = xc;
            fs[d] = fc;
            continue;
        }
        for i in 1..=d {
            let v: Vec<f64> = (0..d).map(|j| sim[0][j] + delta * (sim[i][j] - sim[0][j])).collect();
            fs[i] = eval(&v, &mut evals);
            sim[i] = v;
        }
    }
    NelderMeadResult { x: sim[0].clone(), value: fs[0], evals }
}

/// Repeated Nelder–Mead runs restarted from the incumbent until a run no longer improves it.
pub fn minimize_with_restarts(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions, max_rounds: usize) -> NelderMeadResult {
    let mut best = NelderMeadResult { x: x0.to_vec(), value: f(x0), evals: 1 };
    for _ in 0..max_rounds.max(1) {
        let r = minimize(f, &best.x, opts);
        let evals = best.evals + r.evals;
        let improved = r.value < best.value - 1e-12 * best.value.abs().max(1e-300);
        if r.value <= best.value {
            best = NelderMeadResult { x: r.x, value: r.value, evals };
        } else {
            best.evals = evals;
        }
        if !improved {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions { max_evals: 4000, x_tol: 1e-10 };
        let r = minimize_with_restarts(&f, &[-1.2, 1.0], &opts, 5);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x.iter().map(|v| (v * 3.0).sin().abs()).sum::<f64>();
        let x0 = [0.3, -0.7, 1.1];
        let opts = NelderMeadOptions { max_evals: 200, x_tol: 1e-9 };
        let r = minimize_with_restarts(&f, &x0, &opts, 3);
        assert!(r.value <= f(&x0));
    }
}
