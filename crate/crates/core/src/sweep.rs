//! Parameter sweeps over kappa and location of curve features.
//!
//! Features are found by a uniform scan followed by bracketed refinement:
//! bisection for roots, golden-section search for extrema. An extremum is
//! then polished by bisecting the sign of a five-point central-difference
//! slope, because near a quadratic peak function values stop discriminating
//! locations closer than about `sqrt(eps)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::smatrix::{build_sqrt_not, norm_diagnostics, unitarity_deviation, GateParameter, Lead};
use crate::transport::{
    gate_fidelity, is_input_side, output_probabilities, shot_noise_auto, shot_noise_cross,
};

/// Width below which brackets are considered converged.
pub const BRACKET_TOLERANCE: f64 = 1e-10;
/// Largest `|curve - target|` accepted for a root that touches without crossing.
pub const TANGENT_TOLERANCE: f64 = 1e-9;
pub const MIN_SCAN_POINTS: usize = 16;

pub const DEFAULT_RANGE: (f64, f64) = (-10.0, 10.0);
pub const DEFAULT_POINTS: usize = 2001;

/// A closed interval of kappa values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaRange {
    pub min: f64,
    pub max: f64,
}

impl KappaRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if min.is_finite() && max.is_finite() && min < max {
            Ok(KappaRange { min, max })
        } else {
            Err(Error::InvalidRange {
                min,
                max,
                points: 0,
            })
        }
    }

    /// Point `i` of a uniform `points`-point grid including both endpoints.
    pub fn grid_point(&self, i: usize, points: usize) -> f64 {
        if i + 1 == points {
            self.max
        } else {
            self.min + (self.max - self.min) * (i as f64 / (points - 1) as f64)
        }
    }

    pub fn grid(&self, points: usize) -> Vec<f64> {
        (0..points).map(|i| self.grid_point(i, points)).collect()
    }

    fn checked(&self, points: usize, minimum: usize) -> Result<()> {
        if points < minimum {
            Err(Error::InvalidRange {
                min: self.min,
                max: self.max,
                points,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for KappaRange {
    fn default() -> Self {
        KappaRange {
            min: DEFAULT_RANGE.0,
            max: DEFAULT_RANGE.1,
        }
    }
}

/// Every plotted quantity at one kappa, plus diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub kappa: f64,
    pub probabilities: [f64; 4],
    pub fidelity: f64,
    /// Auto noise in lead D, prefactor units.
    pub s_dd: f64,
    /// Cross noise between leads C and D, prefactor units.
    pub s_cd: f64,
    pub unitarity_dev: f64,
    pub norm_error: f64,
}

fn check_input(input: Lead) -> Result<()> {
    if is_input_side(input) {
        Ok(())
    } else {
        Err(Error::InvalidMeasurement(format!(
            "sweeps inject through an input-side lead (A or B), got {input}"
        )))
    }
}

/// Evaluates the gate at a single kappa with electrons injected through `input`.
pub fn evaluate(kappa: GateParameter, input: Lead) -> Result<SweepRecord> {
    check_input(input)?;
    let s = build_sqrt_not(kappa);
    Ok(SweepRecord {
        kappa: kappa.kappa(),
        probabilities: output_probabilities(&s, input),
        fidelity: gate_fidelity(&s, input),
        s_dd: shot_noise_auto(&s, Lead::D, input)?.value_prefactor_units,
        s_cd: shot_noise_cross(&s, Lead::C, Lead::D, input)?.value_prefactor_units,
        unitarity_dev: unitarity_deviation(&s),
        norm_error: norm_diagnostics(&s).max_error(),
    })
}

/// Evaluates every point of a uniform grid. Records are returned in ascending kappa.
pub fn sweep_kappa(range: KappaRange, points: usize, input: Lead) -> Result<Vec<SweepRecord>> {
    range.checked(points, 2)?;
    check_input(input)?;
    (0..points)
        .into_par_iter()
        .map(|i| evaluate(GateParameter::new(range.grid_point(i, points))?, input))
        .collect()
}

/// Scalar curves derived from the gate that features can be located on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curve {
    Probability(Lead),
    Fidelity,
    AutoNoise,
    CrossNoise,
    CrossNoiseMagnitude,
}

impl Curve {
    pub fn name(&self) -> String {
        match self {
            Curve::Probability(lead) => format!("P_{lead}"),
            Curve::Fidelity => "F".into(),
            Curve::AutoNoise => "S_DD".into(),
            Curve::CrossNoise => "S_CD".into(),
            Curve::CrossNoiseMagnitude => "|S_CD|".into(),
        }
    }

    pub fn of_record(&self, r: &SweepRecord) -> f64 {
        match self {
            Curve::Probability(lead) => r.probabilities[lead.index()],
            Curve::Fidelity => r.fidelity,
            Curve::AutoNoise => r.s_dd,
            Curve::CrossNoise => r.s_cd,
            Curve::CrossNoiseMagnitude => r.s_cd.abs(),
        }
    }

    /// The curve as a plain function of kappa for a fixed input lead.
    ///
    /// Panics if `input` is not on the input side or kappa is not finite.
    pub fn function(self, input: Lead) -> impl Fn(f64) -> f64 + Sync + Send + Copy {
        assert!(is_input_side(input), "input-side lead required, got {input}");
        move |kappa| {
            let s = build_sqrt_not(GateParameter::new(kappa).expect("finite kappa"));
            match self {
                Curve::Probability(lead) => s.get(lead, input).norm_sqr(),
                Curve::Fidelity => gate_fidelity(&s, input),
                Curve::AutoNoise => shot_noise_auto(&s, Lead::D, input)
                    .expect("D is never the input")
                    .value_prefactor_units,
                Curve::CrossNoise | Curve::CrossNoiseMagnitude => {
                    let v = shot_noise_cross(&s, Lead::C, Lead::D, input)
                        .expect("C, D are never the input")
                        .value_prefactor_units;
                    if self == Curve::CrossNoise {
                        v
                    } else {
                        v.abs()
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Maximum,
    Minimum,
    Root,
}

impl FeatureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::Maximum => "maximum",
            FeatureKind::Minimum => "minimum",
            FeatureKind::Root => "root",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremumReport {
    pub location: f64,
    pub value: f64,
    pub kind: FeatureKind,
    pub curve: String,
    pub bracket: (f64, f64),
}

fn bisect_sign<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut g_lo = g(lo);
    while hi - lo > BRACKET_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return (mid, mid);
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > BRACKET_TOLERANCE {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if !(lo < x1 && x1 <= x2 && x2 < hi) {
            break;
        }
    }
    (lo, hi)
}

const SLOPE_STEP: f64 = 1e-4;
const POLISH_WINDOW: f64 = 1e-6;

fn slope<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    let h = SLOPE_STEP;
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn refine_maximum<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, (f64, f64)) {
    let (g_lo, g_hi) = golden_section_max(f, lo, hi);
    let centre = 0.5 * (g_lo + g_hi);
    let w_lo = (centre - POLISH_WINDOW).max(lo);
    let w_hi = (centre + POLISH_WINDOW).min(hi);
    let (d_lo, d_hi) = (slope(f, w_lo), slope(f, w_hi));
    if d_lo > 0.0 && d_hi < 0.0 {
        let (b_lo, b_hi) = bisect_sign(|x| slope(f, x), w_lo, w_hi);
        (0.5 * (b_lo + b_hi), (b_lo, b_hi))
    } else {
        (centre, (g_lo, g_hi))
    }
}

/// Locates every `kappa` in the open range where `curve(kappa) = target`.
///
/// Sign changes of `curve - target` between scan points are bisected down to
/// [`BRACKET_TOLERANCE`]. Interior minima of `|curve - target|` that do not
/// straddle a sign change are accepted as tangent roots when their refined
/// residual is within [`TANGENT_TOLERANCE`].
pub fn find_roots<F>(
    name: &str,
    curve: F,
    target: f64,
    range: KappaRange,
    scan_points: usize,
) -> Result<Vec<ExtremumReport>>
where
    F: Fn(f64) -> f64 + Sync,
{
    range.checked(scan_points, MIN_SCAN_POINTS)?;
    let g = |x: f64| curve(x) - target;
    let xs = range.grid(scan_points);
    let gs: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect();
    let n = xs.len();

    let mut reports = Vec::new();
    let report = |location: f64, bracket: (f64, f64)| ExtremumReport {
        location,
        value: curve(location),
        kind: FeatureKind::Root,
        curve: name.to_string(),
        bracket,
    };

    let mut crossing = vec![false; n];
    for i in 0..n {
        if gs[i] == 0.0 {
            if i > 0 && i + 1 < n {
                reports.push(report(xs[i], (xs[i], xs[i])));
            }
            crossing[i] = true;
            continue;
        }
        if i + 1 < n && gs[i + 1] != 0.0 && (gs[i] > 0.0) != (gs[i + 1] > 0.0) {
            let (lo, hi) = bisect_sign(g, xs[i], xs[i + 1]);
            reports.push(report(0.5 * (lo + hi), (lo, hi)));
            crossing[i] = true;
            crossing[i + 1] = true;
        }
    }

    // Tangent fallback.
    for i in 1..n.saturating_sub(1) {
        if crossing[i - 1] || crossing[i] || crossing[i + 1] {
            continue;
        }
        let (a, b, c) = (gs[i - 1].abs(), gs[i].abs(), gs[i + 1].abs());
        if b < a && b <= c {
            let (lo, hi) = golden_section_max(|x| -g(x).abs(), xs[i - 1], xs[i + 1]);
            let x = 0.5 * (lo + hi);
            if g(x).abs() <= TANGENT_TOLERANCE {
                reports.push(report(x, (lo, hi)));
            }
        }
    }
    reports.sort_by(|a, b| a.location.total_cmp(&b.location));
    Ok(reports)
}

/// Locates interior local maxima and minima of `curve`.
///
/// A run of equal samples counts as one feature reported at its smallest
/// kappa. Features touching either end of the range are dropped.
pub fn find_extrema<F>(
    name: &str,
    curve: F,
    range: KappaRange,
    scan_points: usize,
) -> Result<Vec<ExtremumReport>>
where
    F: Fn(f64) -> f64 + Sync,
{
    range.checked(scan_points, MIN_SCAN_POINTS)?;
    let xs = range.grid(scan_points);
    let ys: Vec<f64> = xs.par_iter().map(|&x| curve(x)).collect();
    let n = xs.len();

    let mut reports = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && ys[end + 1] == ys[start] {
            end += 1;
        }
        if start > 0 && end + 1 < n {
            let (left, here, right) = (ys[start - 1], ys[start], ys[end + 1]);
            let kind = if here > left && here > right {
                Some(FeatureKind::Maximum)
            } else if here < left && here < right {
                Some(FeatureKind::Minimum)
            } else {
                None
            };
            if let Some(kind) = kind {
                let (lo, hi) = (xs[start - 1], xs[end + 1]);
                let (location, bracket) = if start != end {
                    (xs[start], (xs[start], xs[end]))
                } else {
                    match kind {
                        FeatureKind::Maximum => refine_maximum(&curve, lo, hi),
                        _ => refine_maximum(&|x| -curve(x), lo, hi),
                    }
                };
                reports.push(ExtremumReport {
                    location,
                    value: curve(location),
                    kind,
                    curve: name.to_string(),
                    bracket,
                });
            }
        }
        start = end + 1;
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn invalid_ranges() {
        assert!(KappaRange::new(0.0, 0.0).is_err());
        assert!(KappaRange::new(1.0, -1.0).is_err());
        assert!(KappaRange::new(f64::NAN, 1.0).is_err());
        let r = KappaRange::new(-1.0, 1.0).unwrap();
        assert!(sweep_kappa(r, 1, Lead::A).is_err());
        assert!(find_roots("x", |x| x, 0.0, r, 15).is_err());
        assert!(sweep_kappa(r, 10, Lead::C).is_err());
    }

    #[test]
    fn grid_is_inclusive_and_ascending() {
        let r = KappaRange::default();
        let g = r.grid(2001);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[1000], 0.0);
        assert_eq!(g[2000], 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn resonance_record() {
        let records = sweep_kappa(KappaRange::default(), DEFAULT_POINTS, Lead::A).unwrap();
        assert_eq!(records.len(), DEFAULT_POINTS);
        let r = records[1000];
        assert_eq!(r.kappa, 0.0);
        for (p, want) in r.probabilities.iter().zip([0.0, 0.0, 0.5, 0.5]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.fidelity, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.s_dd, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r.s_cd, 0.25, epsilon = 1e-12);
        assert!(records.iter().all(|r| r.norm_error < 1e-12));
    }

    #[test]
    fn sweep_is_deterministic() {
        let r = KappaRange::new(-3.0, 7.0).unwrap();
        let a = sweep_kappa(r, 777, Lead::B).unwrap();
        let serial: Vec<_> = r
            .grid(777)
            .into_iter()
            .map(|k| evaluate(GateParameter::new(k).unwrap(), Lead::B).unwrap())
            .collect();
        assert_eq!(a, serial);
    }

    #[test]
    fn curve_functions_match_records() {
        for k in [-4.0, -0.3, 0.0, 0.9, 6.0] {
            let r = evaluate(GateParameter::new(k).unwrap(), Lead::A).unwrap();
            for curve in [
                Curve::Probability(Lead::B),
                Curve::Fidelity,
                Curve::AutoNoise,
                Curve::CrossNoise,
                Curve::CrossNoiseMagnitude,
            ] {
                assert_eq!(curve.function(Lead::A)(k), curve.of_record(&r));
            }
        }
    }

    #[test]
    fn half_transmission_roots() {
        let pd = Curve::Probability(Lead::D).function(Lead::A);
        let roots = find_roots("P_D", pd, 0.5, KappaRange::default(), DEFAULT_POINTS).unwrap();
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert_abs_diff_eq!(roots[0].location, 0.0, epsilon = 1e-9);
        // 40-digit findroot reference.
        assert_abs_diff_eq!(roots[1].location, 1.626_612_894_114_507_6, epsilon = 1e-9);
        for r in &roots {
            assert!(r.bracket.1 - r.bracket.0 <= BRACKET_TOLERANCE);
            assert!(r.bracket.0 <= r.location && r.location <= r.bracket.1);
        }
        // crossing from above at the second root
        assert!(pd(roots[1].location - 1e-3) > 0.5 && pd(roots[1].location + 1e-3) < 0.5);
    }

    #[test]
    fn constant_curve_has_no_roots_or_extrema() {
        let r = KappaRange::default();
        assert!(find_roots("c", |_| 0.3, 0.5, r, 100).unwrap().is_empty());
        assert!(find_extrema("c", |_| 0.3, r, 100).unwrap().is_empty());
    }

    #[test]
    fn tangent_root_fallback() {
        let r = KappaRange::new(-1.0, 1.3).unwrap();
        let roots = find_roots("sq", |x: f64| (x - 0.25).powi(2), 0.0, r, 64).unwrap();
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(roots[0].location, 0.25, epsilon = 1e-4);
        assert!(roots[0].value <= TANGENT_TOLERANCE);
    }

    #[test]
    fn plateau_reports_smallest_kappa() {
        let r = KappaRange::new(0.0, 10.0).unwrap();
        let f = |x: f64| if (3.0..=5.0).contains(&x) { 1.0 } else { 0.0 };
        assert!(find_extrema("plateau", f, r, 11).is_err());
        let e = find_extrema("plateau", f, r, 101).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, FeatureKind::Maximum);
        assert_abs_diff_eq!(e[0].location, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn endpoint_extrema_excluded() {
        let r = KappaRange::new(0.0, 1.0).unwrap();
        assert!(find_extrema("lin", |x| x, r, 50).unwrap().is_empty());
    }

    #[test]
    fn auto_noise_maxima() {
        let f = Curve::AutoNoise.function(Lead::A);
        let e = find_extrema("S_DD", f, KappaRange::default(), DEFAULT_POINTS).unwrap();
        let maxima: Vec<_> = e.iter().filter(|r| r.kind == FeatureKind::Maximum).collect();
        assert_eq!(maxima.len(), 2, "{e:?}");
        for m in &maxima {
            assert_abs_diff_eq!(m.value, 0.25, epsilon = 1e-9);
            assert!(m.bracket.1 - m.bracket.0 <= BRACKET_TOLERANCE);
        }
        assert_abs_diff_eq!(maxima[0].location, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(maxima[1].location, 1.626_612_894_114_507_6, epsilon = 1e-8);
        // Minima sit at the extrema of P_D: its dip below 1/16 and its peak between the roots.
        let minima: Vec<_> = e.iter().filter(|r| r.kind == FeatureKind::Minimum).collect();
        assert_eq!(minima.len(), 2);
        assert_abs_diff_eq!(minima[0].location, -1.689_903_760_176_784_4, epsilon = 1e-8);
        assert_abs_diff_eq!(minima[1].location, 0.659_614_533_919_692_5, epsilon = 1e-8);
    }

    #[test]
    fn fidelity_and_cross_noise_peak_at_resonance() {
        let range = KappaRange::default();
        for curve in [Curve::Fidelity, Curve::CrossNoiseMagnitude] {
            let e = find_extrema(&curve.name(), curve.function(Lead::A), range, DEFAULT_POINTS).unwrap();
            assert_eq!(e.len(), 1, "{curve:?}: {e:?}");
            assert_eq!(e[0].kind, FeatureKind::Maximum);
            assert_abs_diff_eq!(e[0].location, 0.0, epsilon = 1e-9);
        }
    }
}
