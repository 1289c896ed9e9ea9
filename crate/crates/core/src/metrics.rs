//! Randomness test functions: Porter-Thomas statistics, Meyer-Wallach `Q`,
//! total variation, and exponential-decay summaries of trajectories.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::state::StateVector;
use crate::{Error, Result};

/// Histogram binning over `y = 2^n |ψ_i|²`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BinSpec {
    pub bins: usize,
    pub y_max: f64,
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec { bins: 100, y_max: 10.0 }
    }
}

impl BinSpec {
    pub fn width(&self) -> f64 {
        self.y_max / self.bins as f64
    }

    pub fn midpoint(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) * self.width()
    }

    /// Values at or past `y_max` land in the last bin.
    pub fn bin_of(&self, y: f64) -> usize {
        ((y / self.width()) as usize).min(self.bins - 1)
    }
}

#[derive(Clone, Debug)]
pub struct ComponentHistogram {
    pub spec: BinSpec,
    /// Fraction of samples per bin; sums to 1.
    pub masses: Vec<f64>,
    pub samples: usize,
}

impl ComponentHistogram {
    pub fn from_values(spec: BinSpec, values: impl IntoIterator<Item = f64>) -> Result<Self> {
        if spec.bins == 0 || !(spec.y_max > 0.0) {
            return Err(Error::invalid("histogram needs at least one bin and y_max > 0"));
        }
        let mut counts = vec![0u64; spec.bins];
        let mut samples = 0usize;
        for y in values {
            counts[spec.bin_of(y)] += 1;
            samples += 1;
        }
        if samples == 0 {
            return Err(Error::invalid("empty histogram"));
        }
        let masses = counts.iter().map(|&c| c as f64 / samples as f64).collect();
        Ok(ComponentHistogram { spec, masses, samples })
    }

    /// Pools `N |ψ_i|²` over every component of every state.
    pub fn from_states(spec: BinSpec, states: &[StateVector]) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::invalid("empty ensemble"));
        };
        let n = first.n();
        if let Some(s) = states.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: s.n() });
        }
        let scale = (1usize << n) as f64;
        Self::from_values(
            spec,
            states.iter().flat_map(|s| s.amplitudes().iter().map(move |a| scale * a.norm_sqr())),
        )
    }

    pub fn density(&self, bin: usize) -> f64 {
        self.masses[bin] / self.spec.width()
    }

    /// `sqrt(Σ (density - e^{-y_mid})² Δy)`.
    pub fn porter_thomas_distance(&self) -> f64 {
        let dy = self.spec.width();
        (0..self.spec.bins)
            .map(|b| (self.density(b) - (-self.spec.midpoint(b)).exp()).powi(2) * dy)
            .sum::<f64>()
            .sqrt()
    }
}

/// l₂ distance between the pooled component histogram and `e^{-y}`.
pub fn porter_thomas_distance(states: &[StateVector], spec: BinSpec) -> Result<f64> {
    Ok(ComponentHistogram::from_states(spec, states)?.porter_thomas_distance())
}

/// The same distance for `samples` draws from the exact exponential law: the
/// sampling-noise floor at that sample count.
pub fn exponential_control_distance<R: Rng + ?Sized>(samples: usize, spec: BinSpec, rng: &mut R) -> Result<f64> {
    let values: Vec<f64> = (0..samples).map(|_| Exp1.sample(rng)).collect();
    Ok(ComponentHistogram::from_values(spec, values)?.porter_thomas_distance())
}

/// The distance for `realizations` exact Haar states on `n` qubits. Besides
/// sampling noise this carries the finite-dimension deviation of the Haar
/// component law from `e^{-y}`, so it is the level PR ensembles settle at.
pub fn haar_control_distance<R: Rng + ?Sized>(n: usize, realizations: usize, spec: BinSpec, rng: &mut R) -> Result<f64> {
    let states: Vec<StateVector> = (0..realizations).map(|_| StateVector::haar_random(n, rng)).collect();
    porter_thomas_distance(&states, spec)
}

/// `Q = 1 - (1/n) Σ_i |r_i|²` with `r_i` the Bloch vector of qubit `i`.
pub fn meyer_wallach_q(psi: &StateVector) -> f64 {
    let n = psi.n();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .map(|q| psi.bloch_vector(q).iter().map(|c| c * c).sum::<f64>())
        .sum();
    (1.0 - total / n as f64).clamp(0.0, 1.0)
}

/// Mean of `Q` over Haar-random `n`-qubit states, `(2^n - 2)/(2^n + 1)`.
pub fn q_random_expectation(n: u32) -> f64 {
    let d = 2f64.powi(n as i32);
    (d - 2.0) / (d + 1.0)
}

/// Half the l₁ distance between two probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_probability(p)?;
    check_probability(q)?;
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), actual: q.len() });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// TV for vectors storing one representative value per class, each class
/// standing for `weights[k]` equal entries of the full vector.
pub fn tv_distance_weighted(p: &[f64], q: &[f64], weights: &[f64]) -> Result<f64> {
    if p.len() != q.len() || p.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), actual: q.len().min(weights.len()) });
    }
    let total = |v: &[f64]| v.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
    for v in [p, q] {
        let s = total(v);
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weighted mass {s} is not 1")));
        }
    }
    Ok(0.5 * p.iter().zip(q).zip(weights).map(|((a, b), w)| w * (a - b).abs()).sum::<f64>())
}

fn check_probability(p: &[f64]) -> Result<()> {
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("probability vector sums to {s}")));
    }
    Ok(())
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    /// `-d ln(value)/d step`.
    pub rate: f64,
    /// Fitted `ln(value)` at step 0.
    pub intercept: f64,
    /// RMS of the log-residuals.
    pub residual_rms: f64,
    /// `1 - R²` of the log-linear fit.
    pub unexplained_variance: f64,
    pub burn_in: f64,
    pub points: usize,
}

/// Least-squares line through `(step, ln value)` for steps `≥ burn_in`.
pub fn fit_exponential_decay(series: &[(f64, f64)], burn_in: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|&(x, _)| x >= burn_in).collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, have: pts.len() });
    }
    if let Some(&(step, value)) = pts.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(Error::NonPositive { step, value });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1.ln() - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("all fit points share one step"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1.ln() - intercept - slope * p.0).powi(2)).sum();
    Ok(DecayFit {
        rate: -slope,
        intercept,
        residual_rms: (sse / k).sqrt(),
        unexplained_variance: if syy > 0.0 { sse / syy } else { 0.0 },
        burn_in,
        points: pts.len(),
    })
}

/// One step of an ensemble-averaged trajectory.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub step: f64,
    pub mean: f64,
    pub se: f64,
}

/// Fits a Monte-Carlo trajectory between its plateau and its noise floor.
///
/// Points before `burn_in` are dropped; a plateau at the head of the rest
/// (see [`detect_cutoff`]) is skipped, and the fit stops before the first
/// later point for which `at_floor` holds.
pub fn fit_to_floor<F>(points: &[TrajectoryPoint], burn_in: f64, plateau_threshold: f64, at_floor: F) -> Result<DecayFit>
where
    F: Fn(&TrajectoryPoint) -> bool,
{
    let tail: Vec<&TrajectoryPoint> = points.iter().filter(|p| p.step >= burn_in).collect();
    let values: Vec<f64> = tail.iter().map(|p| p.mean).collect();
    let tau = detect_cutoff(&values, plateau_threshold).tau;
    let start = tail.get(tau).map_or(burn_in, |p| p.step);
    let series: Vec<(f64, f64)> = tail[tau.min(tail.len())..]
        .iter()
        .take_while(|p| !at_floor(p))
        .map(|p| (p.step, p.mean))
        .collect();
    fit_exponential_decay(&series, start)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffReport {
    /// Length of the initial plateau, in points.
    pub tau: usize,
    /// First value of the series.
    pub plateau_value: f64,
    /// Decay rate fitted after the plateau, if enough positive points remain.
    pub post_rate: Option<f64>,
    pub threshold: f64,
}

/// `τ` is the length of the initial run of points within `threshold` of the
/// first value, or 0 if that run is a single point.
pub fn detect_cutoff(series: &[f64], threshold: f64) -> CutoffReport {
    let first = series.first().copied().unwrap_or(f64::NAN);
    let run = series.iter().take_while(|v| (**v - first).abs() <= threshold).count();
    let tau = if run >= 2 { run } else { 0 };
    let tail: Vec<(f64, f64)> = series
        .iter()
        .enumerate()
        .skip(tau)
        .take_while(|(_, v)| **v > 0.0)
        .map(|(i, v)| (i as f64, *v))
        .collect();
    let post_rate = fit_exponential_decay(&tail, tau as f64).ok().map(|f| f.rate);
    CutoffReport {
        tau,
        plateau_value: first,
        post_rate,
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{sample_haar_su2, C64};
    use crate::rng::master_rng;
    use approx::assert_abs_diff_eq;

    fn ghz(n: usize) -> StateVector {
        let mut a = vec![C64::new(0.0, 0.0); 1 << n];
        a[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        a[(1 << n) - 1] = a[0];
        StateVector::from_amplitudes(a).unwrap()
    }

    #[test]
    fn q_examples() {
        assert_abs_diff_eq!(meyer_wallach_q(&StateVector::zero(4)), 0.0);
        for n in 2..6 {
            assert_abs_diff_eq!(meyer_wallach_q(&ghz(n)), 1.0, epsilon = 1e-12);
        }
        assert_eq!(q_random_expectation(1), 0.0);
        assert_eq!(q_random_expectation(2), 2.0 / 5.0);
        assert_eq!(q_random_expectation(6), 62.0 / 65.0);
    }

    #[test]
    fn q_is_local_unitary_invariant() {
        let mut rng = master_rng(11);
        let mut s = ghz(4);
        s.apply_gate(&sample_haar_su2(&mut rng), 0).unwrap();
        s.apply_cz(0, 1).unwrap();
        let q = meyer_wallach_q(&s);
        for q_idx in 0..4 {
            s.apply_gate(&sample_haar_su2(&mut rng), q_idx).unwrap();
        }
        assert_abs_diff_eq!(meyer_wallach_q(&s), q, epsilon = 1e-10);
    }

    #[test]
    fn basis_state_histogram() {
        // n = 6: 63 components at y = 0 and one at y = 64 (clamped)
        let h = ComponentHistogram::from_states(BinSpec::default(), &[StateVector::zero(6)]).unwrap();
        assert_abs_diff_eq!(h.masses[0], 63.0 / 64.0);
        assert_abs_diff_eq!(h.masses[99], 1.0 / 64.0);
        let dy = 0.1f64;
        let mut quad = 0.0;
        for b in 0..100 {
            let y = (b as f64 + 0.5) * dy;
            let dens = match b {
                0 => 63.0 / 64.0 / dy,
                99 => 1.0 / 64.0 / dy,
                _ => 0.0,
            };
            quad += (dens - (-y).exp()).powi(2) * dy;
        }
        assert_abs_diff_eq!(h.porter_thomas_distance(), quad.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn exponential_control_is_small() {
        let d = exponential_control_distance(1_000_000, BinSpec::default(), &mut master_rng(3)).unwrap();
        assert!(d <= 0.02, "{d}");
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
        assert!(tv_distance(&[0.4, 0.4], &[0.5, 0.5]).is_err());
        let w = [1.0, 2.0];
        assert_abs_diff_eq!(tv_distance_weighted(&[1.0, 0.0], &[0.0, 0.5], &w).unwrap(), 1.0);
    }

    #[test]
    fn exact_exponential_fit() {
        let s: Vec<(f64, f64)> = (0..20).map(|l| (l as f64, (-0.5 * l as f64).exp())).collect();
        let f = fit_exponential_decay(&s, 0.0).unwrap();
        assert_abs_diff_eq!(f.rate, 0.5, epsilon = 1e-9);
        assert!(f.unexplained_variance < 1e-12);
        let f = fit_exponential_decay(&s, 5.0).unwrap();
        assert_eq!(f.points, 15);
    }

    #[test]
    fn fit_rejects_floor_and_short_series() {
        let s = [(0.0, 1.0), (1.0, 0.5), (2.0, 0.0), (3.0, 0.1)];
        assert!(matches!(fit_exponential_decay(&s, 0.0), Err(Error::NonPositive { .. })));
        assert!(matches!(fit_exponential_decay(&s[..3], 0.0), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn cutoff_examples() {
        let exp: Vec<f64> = (0..10).map(|l| (-0.3 * l as f64).exp()).collect();
        assert_eq!(detect_cutoff(&exp, 1e-3).tau, 0);
        let mut plateau = vec![1.0, 1.0, 1.0];
        plateau.extend((1..10).map(|l| (-0.4 * l as f64).exp()));
        let r = detect_cutoff(&plateau, 1e-6);
        assert_eq!(r.tau, 3);
        assert_abs_diff_eq!(r.post_rate.unwrap(), 0.4, epsilon = 1e-9);
    }

    #[test]
    fn floor_truncated_fit() {
        let mut pts: Vec<TrajectoryPoint> = (0..12)
            .map(|l| TrajectoryPoint { step: l as f64, mean: (-0.7 * l as f64).exp(), se: 1e-4 })
            .collect();
        pts.extend((12..20).map(|l| TrajectoryPoint { step: l as f64, mean: 1e-5, se: 1e-4 }));
        let f = fit_to_floor(&pts, 0.0, 1e-9, |p| p.mean <= 3.0 * p.se).unwrap();
        assert_abs_diff_eq!(f.rate, 0.7, epsilon = 1e-9);
        // e^{-0.7 l} > 3e-4 up to l = 11
        assert_eq!(f.points, 12);
    }

    #[test]
    fn mean_se() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(m, 2.5);
        assert_abs_diff_eq!(se, (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-15);
    }
}
