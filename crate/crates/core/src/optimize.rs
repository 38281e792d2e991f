//! Derivative-free compass (pattern) search.

/// Step control for [`pattern_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternOptions {
    pub initial_step: f64,
    pub min_step: f64,
    /// Number of full coordinate sweeps.
    pub max_iterations: usize,
}

impl Default for PatternOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            min_step: 1e-6,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best value after each sweep; never increases.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// The step shrank below `min_step` within the sweep budget.
    pub converged: bool,
}

/// Minimizes `f` by probing `x ± step·e_k` for each coordinate and keeping
/// any strict improvement. A sweep with no improvement halves the step.
/// Non-finite values count as `+∞`.
pub fn pattern_search<F>(mut f: F, x0: Vec<f64>, opts: PatternOptions) -> PatternResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut x = x0;
    let mut best = eval(&x);
    let mut step = opts.initial_step;
    let mut history = Vec::new();
    if x.is_empty() {
        return PatternResult {
            x,
            value: best,
            history: vec![best],
            iterations: 0,
            converged: true,
        };
    }

    let mut iterations = 0;
    while iterations < opts.max_iterations && step >= opts.min_step {
        iterations += 1;
        let mut improved = false;
        for k in 0..x.len() {
            let orig = x[k];
            for delta in [step, -step] {
                x[k] = orig + delta;
                let v = eval(&x);
                if v < best {
                    best = v;
                    improved = true;
                    break;
                }
                x[k] = orig;
            }
        }
        if !improved {
            step *= 0.5;
        }
        history.push(best);
    }
    PatternResult {
        x,
        value: best,
        history,
        iterations,
        converged: step < opts.min_step,
    }
}
