//! Globally adaptive 21-point Gauss–Kronrod integration.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::QuadError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Evaluations made by one 21-point panel.
pub const PANEL_EVALUATIONS: usize = 21;

/// Outcome of a numerical integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error, always `>= 0`.
    pub error_estimate: f64,
    /// Integrand (kernel) evaluations consumed, including nested integrals.
    pub evaluations: usize,
    /// `error_estimate <= max(abs_tol, rel_tol·|value|)`.
    pub converged: bool,
    /// Estimate of `∫|f|`, used when composing nested error budgets.
    pub abs_integral: f64,
}

/// Requested accuracy of an integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: 0.0 }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Kernel-evaluation counter shared by nested integrals.
#[derive(Debug)]
pub struct EvalBudget {
    used: Cell<usize>,
    limit: usize,
}

impl EvalBudget {
    pub fn new(limit: usize) -> Self {
        EvalBudget {
            used: Cell::new(0),
            limit,
        }
    }

    pub fn used(&self) -> usize {
        self.used.get()
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    fn charge(&self, n: usize) -> bool {
        let next = self.used.get() + n;
        self.used.set(next);
        next <= self.limit
    }

    pub fn exhausted(&self) -> bool {
        self.used.get() > self.limit
    }
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by position for a deterministic order.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut res_abs = kronrod.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let lo = f(center - x);
        let hi = f(center + x);
        f1[j] = lo;
        f2[j] = hi;
        kronrod += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let scale = half.abs();
    let error = rescale_error((kronrod - gauss) * half, res_abs * scale, res_asc * scale);
    Panel {
        a,
        b,
        value: kronrod * half,
        error,
        abs: res_abs * scale,
    }
}

/// Integrates `f` over `[a, b]`, first splitting at any `breakpoints` that
/// fall strictly inside the interval.
///
/// Every integrand call is charged to `budget`; exceeding the budget aborts
/// with [`QuadError::BudgetExceeded`] carrying the best estimate so far.
/// Failing to meet the tolerance after panels can no longer be bisected
/// returns `Ok` with `converged == false`.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
    budget: &EvalBudget,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> f64,
{
    let start_used = budget.used();
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
            abs_integral: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Panel> = Vec::new();
    for w in cuts.windows(2) {
        if !budget.charge(PANEL_EVALUATIONS) {
            return Err(budget_error(&heap, &finished, budget));
        }
        heap.push(panel(&mut f, w[0], w[1]));
    }

    let (mut run_value, mut run_error, _) = totals(&heap, &finished);
    loop {
        if run_error <= tol.target(run_value) || heap.is_empty() {
            // Running sums drift; confirm with an ordered recount.
            let (value, error, _) = totals(&heap, &finished);
            run_value = value;
            run_error = error;
            if error <= tol.target(value) || heap.is_empty() {
                break;
            }
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 8.0 * f64::EPSILON * mid.abs()
        {
            finished.push(worst);
            continue;
        }
        if !budget.charge(2 * PANEL_EVALUATIONS) {
            heap.push(worst);
            return Err(budget_error(&heap, &finished, budget));
        }
        let left = panel(&mut f, worst.a, mid);
        let right = panel(&mut f, mid, worst.b);
        run_value += left.value + right.value - worst.value;
        run_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let (value, error, abs) = totals(&heap, &finished);
    Ok(QuadratureResult {
        value: sign * value,
        error_estimate: error,
        evaluations: budget.used() - start_used,
        converged: error <= tol.target(value),
        abs_integral: abs,
    })
}

fn totals(heap: &BinaryHeap<Panel>, finished: &[Panel]) -> (f64, f64, f64) {
    // Sum in interval order so the result does not depend on heap layout.
    let mut all: Vec<&Panel> = heap.iter().chain(finished.iter()).collect();
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    all.iter().fold((0.0, 0.0, 0.0), |(v, e, a), p| {
        (v + p.value, e + p.error, a + p.abs)
    })
}

fn budget_error(heap: &BinaryHeap<Panel>, finished: &[Panel], budget: &EvalBudget) -> QuadError {
    let (value, error, _) = totals(heap, finished);
    QuadError::BudgetExceeded {
        best: value,
        error,
        evaluations: budget.used(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let budget = EvalBudget::new(1000);
        let r = integrate(
            |x| x.powi(5) - 2.0 * x,
            0.0,
            2.0,
            &[],
            Tolerance::relative(1e-12),
            &budget,
        )
        .unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        assert!(r.converged);
        assert_eq!(r.evaluations, PANEL_EVALUATIONS);
    }

    #[test]
    fn boundary_layer_resolved() {
        let eps = 1e-4;
        let budget = EvalBudget::new(1_000_000);
        let r = integrate(
            |x| (-x / eps).exp() / eps,
            0.0,
            1.0,
            &[],
            Tolerance::relative(1e-12),
            &budget,
        )
        .unwrap();
        assert!(
            (r.value - (1.0 - (-1.0 / eps).exp())).abs() < 1e-11,
            "{r:?}"
        );
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let budget = EvalBudget::new(1000);
        let r = integrate(f64::cos, 1.0, 0.0, &[], Tolerance::relative(1e-12), &budget).unwrap();
        assert!((r.value + 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let budget = EvalBudget::new(100);
        let err = integrate(
            |x: f64| (x - 0.3).abs().sqrt().recip(),
            0.0,
            1.0,
            &[],
            Tolerance::relative(1e-14),
            &budget,
        )
        .unwrap_err();
        match err {
            QuadError::BudgetExceeded { evaluations, .. } => assert!(evaluations > 100),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn breakpoints_split_kinks() {
        let budget = EvalBudget::new(10_000);
        let r = integrate(
            |x: f64| (x - 0.3).abs(),
            0.0,
            1.0,
            &[0.3],
            Tolerance::relative(1e-13),
            &budget,
        )
        .unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-15);
        assert_eq!(r.evaluations, 2 * PANEL_EVALUATIONS);
    }
}
