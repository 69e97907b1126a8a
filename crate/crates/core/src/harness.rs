//! Ensembles of trajectories started from a ball of initial data, with the
//! cross-trajectory suprema used to observe absorbing balls, vanishing
//! high frequencies and asymptotic smoothing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{plateau_average, DiagnosticSet, DiagnosticsRecord};
use crate::error::{IntegrationError, SpectralError};
use crate::initial::{random_bumps, random_h1};
use crate::integrator::{run_sampled, Integrator};
use crate::operators::{ForcingTerm, Mode, ViscosityProfile};

/// Share of the horizon averaged for the long-run plateau.
pub const PLATEAU_FRACTION: f64 = 0.25;
/// Relative growth between neighbouring Besov blocks still read as flat.
pub const FLAT_TOLERANCE: f64 = 0.1;
/// Largest relative drift of the high-frequency witness between the last
/// two horizons for it to count as settled.
pub const STABILITY_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error("viscous ensembles need mean-zero forcing, got mean {mean:e}")]
    NonzeroMeanForcing { mean: f64 },
    #[error("viscous ensembles need mean-zero initial data; `{0:?}` is not")]
    NonzeroMeanData(BallRecipe),
    #[error("cannot merge reports from different setups: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// How initial data are drawn from the ball `I(u₀) = B²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallRecipe {
    RandomH1,
    RandomBumps,
}

impl BallRecipe {
    fn draw(
        self,
        n: usize,
        length: f64,
        radius: f64,
        seed: u64,
    ) -> Result<crate::SpectralField, SpectralError> {
        match self {
            BallRecipe::RandomH1 => random_h1(n, length, radius, seed),
            BallRecipe::RandomBumps => random_bumps(n, length, radius, seed),
        }
    }

    fn mean_zero(self) -> bool {
        matches!(self, BallRecipe::RandomH1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub radius: f64,
    pub count: usize,
    pub seeds: Vec<u64>,
    pub t_end: f64,
    pub sample_times: Vec<f64>,
    pub mode: Mode,
    pub recipe: BallRecipe,
}

impl EnsembleSpec {
    /// `count` consecutive seeds from `first_seed`, sampled at `samples`
    /// evenly spaced times including `0` and `t_end`.
    pub fn uniform(
        radius: f64,
        count: usize,
        first_seed: u64,
        t_end: f64,
        samples: usize,
        mode: Mode,
        recipe: BallRecipe,
    ) -> Self {
        let samples = samples.max(2);
        let sample_times = (0..samples)
            .map(|i| {
                if i + 1 == samples {
                    t_end
                } else {
                    t_end * i as f64 / (samples - 1) as f64
                }
            })
            .collect();
        Self {
            radius,
            count,
            seeds: (0..count as u64).map(|i| first_seed + i).collect(),
            t_end,
            sample_times,
            mode,
            recipe,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidSpec(m));
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return bad(format!("ball radius {} must be finite and nonnegative", self.radius));
        }
        if self.count != self.seeds.len() {
            return bad(format!("count {} but {} seeds", self.count, self.seeds.len()));
        }
        if self.count == 0 {
            return bad("empty ensemble".into());
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("horizon {} must be finite and nonnegative", self.t_end));
        }
        if self.sample_times.is_empty() {
            return bad("no sample times".into());
        }
        if self.sample_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sample times must be strictly increasing".into());
        }
        if self
            .sample_times
            .iter()
            .any(|&t| !(0.0..=self.t_end).contains(&t))
        {
            return bad(format!("sample times must lie in [0, {}]", self.t_end));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub diagnostics: DiagnosticSet,
    /// Worker threads; results are identical for any count.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub seed: u64,
    pub radius: f64,
    pub records: Vec<DiagnosticsRecord>,
    /// Mean of `I` over the last quarter of the horizon.
    pub plateau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub resolution: usize,
    pub length: f64,
    pub mode: Mode,
    pub epsilon: f64,
    pub forcing_l2: f64,
    pub per_trajectory: Vec<TrajectoryReport>,
    /// Sup of `I` over trajectories and sampled times.
    #[serde(rename = "sup_I")]
    pub sup_energy: f64,
    /// Sup of `I` over trajectories at the final time.
    #[serde(rename = "sup_I_final")]
    pub final_sup_energy: f64,
    /// Sup over trajectories of `I_{>k}` at the final time.
    pub highfreq_decay: BTreeMap<i32, f64>,
    /// Sup over trajectories and `k` of `2^{2k}‖P_{2^k}u(t_end)‖`.
    pub besov_sup: f64,
    pub besov_final: BTreeMap<i32, f64>,
    pub besov_initial: BTreeMap<i32, f64>,
    /// Largest over smallest plateau; absent when the smallest is zero.
    pub plateau_ratio: Option<f64>,
}

fn sup_maps<'a, K: Ord + Copy + 'a>(
    maps: impl Iterator<Item = &'a BTreeMap<K, f64>>,
) -> BTreeMap<K, f64> {
    let mut out = BTreeMap::new();
    for m in maps {
        for (&k, &v) in m {
            let e = out.entry(k).or_insert(v);
            *e = f64::max(*e, v);
        }
    }
    out
}

impl EnsembleReport {
    /// Aggregate trajectory reports. The order of `per_trajectory` does not
    /// matter: it is sorted by radius and seed first.
    pub fn summarize(
        resolution: usize,
        length: f64,
        mode: Mode,
        epsilon: f64,
        forcing_l2: f64,
        mut per_trajectory: Vec<TrajectoryReport>,
    ) -> Self {
        per_trajectory.sort_by(|a, b| a.radius.total_cmp(&b.radius).then(a.seed.cmp(&b.seed)));
        let finals = || per_trajectory.iter().filter_map(|t| t.records.last());
        let sup_energy = per_trajectory
            .iter()
            .flat_map(|t| t.records.iter().map(|r| r.energy))
            .fold(0.0, f64::max);
        let final_sup_energy = finals().map(|r| r.energy).fold(0.0, f64::max);
        let highfreq_decay = sup_maps(finals().map(|r| &r.highfreq));
        let besov_final = sup_maps(finals().map(|r| &r.besov_blocks));
        let besov_initial = sup_maps(
            per_trajectory
                .iter()
                .filter_map(|t| t.records.first())
                .map(|r| &r.besov_blocks),
        );
        let besov_sup = besov_final.values().copied().fold(0.0, f64::max);
        let lo = per_trajectory.iter().map(|t| t.plateau).fold(f64::INFINITY, f64::min);
        let hi = per_trajectory.iter().map(|t| t.plateau).fold(0.0, f64::max);
        let plateau_ratio = if per_trajectory.is_empty() {
            None
        } else if hi == 0.0 {
            Some(1.0)
        } else if lo > 0.0 {
            Some(hi / lo)
        } else {
            None
        };
        Self {
            resolution,
            length,
            mode,
            epsilon,
            forcing_l2,
            per_trajectory,
            sup_energy,
            final_sup_energy,
            highfreq_decay,
            besov_sup,
            besov_final,
            besov_initial,
            plateau_ratio,
        }
    }

    /// Pool two ensembles run on the same setup.
    pub fn merge(&self, other: &Self) -> Result<Self, HarnessError> {
        if self.resolution != other.resolution
            || self.length != other.length
            || self.mode != other.mode
            || self.epsilon != other.epsilon
            || self.forcing_l2 != other.forcing_l2
        {
            return Err(HarnessError::Incompatible(format!(
                "N={} L={} {:?} vs N={} L={} {:?}",
                self.resolution, self.length, self.mode, other.resolution, other.length, other.mode
            )));
        }
        let all = self
            .per_trajectory
            .iter()
            .chain(&other.per_trajectory)
            .cloned()
            .collect();
        Ok(Self::summarize(
            self.resolution,
            self.length,
            self.mode,
            self.epsilon,
            self.forcing_l2,
            all,
        ))
    }

    /// Sup over trajectories of `I_{>k}` at the sample nearest `horizon`.
    pub fn at_horizon(&self, horizon: f64) -> HorizonSnapshot {
        let nearest = self.per_trajectory.iter().filter_map(|t| {
            t.records
                .iter()
                .min_by(|a, b| (a.t - horizon).abs().total_cmp(&(b.t - horizon).abs()))
        });
        HorizonSnapshot {
            horizon,
            sup_highfreq: sup_maps(nearest.map(|r| &r.highfreq)),
        }
    }

    /// Sup over trajectories of `J_{>N}` at the final time.
    pub fn tail_final(&self) -> BTreeMap<u32, f64> {
        sup_maps(
            self.per_trajectory
                .iter()
                .filter_map(|t| t.records.last())
                .map(|r| &r.tail),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.per_trajectory
            .iter()
            .all(|t| t.plateau.is_finite() && t.records.iter().all(|r| r.is_finite()))
            && self.sup_energy.is_finite()
            && self.besov_sup.is_finite()
    }
}

/// Run every trajectory of `spec` on the grid of `p`.
pub fn run_ensemble(
    spec: &EnsembleSpec,
    settings: &RunSettings,
    p: &ViscosityProfile,
    f: &ForcingTerm,
) -> Result<EnsembleReport, HarnessError> {
    spec.validate()?;
    let a = p.coefficient();
    let (n, length) = (a.n(), a.length());
    settings.diagnostics.validate(n, length)?;
    if !(settings.dt.is_finite() && settings.dt > 0.0) {
        return Err(IntegrationError::InvalidTimeStep(settings.dt).into());
    }
    if spec.mode == Mode::Viscous {
        let mean = f.g().mean();
        if mean.abs() > 1e-14 * f.g().max_abs().max(1.0) {
            return Err(HarnessError::NonzeroMeanForcing { mean });
        }
        if !spec.recipe.mean_zero() {
            return Err(HarnessError::NonzeroMeanData(spec.recipe));
        }
    }
    let integrator = Integrator::new(p, f, spec.mode);
    let one = |&seed: &u64| -> Result<TrajectoryReport, HarnessError> {
        let u0 = spec.recipe.draw(n, length, spec.radius, seed)?;
        let traj = run_sampled(
            &integrator,
            &u0,
            &spec.sample_times,
            settings.dt,
            &settings.diagnostics,
        )
        .map_err(|e| IntegrationError::Trajectory {
            seed,
            source: Box::new(e),
        })?;
        let plateau = plateau_average(&traj.records, PLATEAU_FRACTION).unwrap_or(f64::NAN);
        Ok(TrajectoryReport {
            seed,
            radius: spec.radius,
            records: traj.records,
            plateau,
        })
    };
    let results = map_seeds(&spec.seeds, settings.workers, one)?;
    let per_trajectory = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(EnsembleReport::summarize(
        n,
        length,
        spec.mode,
        p.epsilon(),
        f.g().l2_norm(),
        per_trajectory,
    ))
}

#[cfg(feature = "parallel")]
fn map_seeds<T, F>(seeds: &[u64], workers: usize, f: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(&u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return Ok(seeds.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::InvalidSpec(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| seeds.par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_seeds<T, F>(seeds: &[u64], _workers: usize, f: F) -> Result<Vec<T>, HarnessError>
where
    F: Fn(&u64) -> T,
{
    Ok(seeds.iter().map(f).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    /// `besov_sup / ‖g‖`; absent when `g = 0`.
    pub ratio: Option<f64>,
    /// Zero forcing: every state decays to zero.
    pub trivial: bool,
    /// Dyadic blocks fully inside the dealiased range.
    pub resolved: (i32, i32),
    pub table: BTreeMap<i32, f64>,
    pub initial_table: BTreeMap<i32, f64>,
    /// Over the resolved range, no final block exceeds the largest block
    /// below it by more than `FLAT_TOLERANCE`.
    pub smoothing_observed: bool,
    /// Last over first resolved block at `t = 0`.
    pub initial_growth: Option<f64>,
    /// Same for the final blocks.
    pub final_growth: Option<f64>,
}

impl SmoothingReport {
    pub fn verdict(&self) -> String {
        match self.ratio {
            None => "trivial (zero forcing)".into(),
            Some(r) if self.smoothing_observed => format!("smoothing observed, sup/|g| = {r:.6e}"),
            Some(r) => format!("blocks grow with k, sup/|g| = {r:.6e}"),
        }
    }
}

/// Dyadic indices `k` with `2^{k+1} ≤ (N/3)/L`.
pub fn resolved_blocks(resolution: usize, length: f64) -> (i32, i32) {
    let k_min = (1.0 / length).log2().floor() as i32;
    let top = (resolution / 3) as f64 / length;
    let mut k_max = k_min;
    while 2f64.powi(k_max + 2) <= top {
        k_max += 1;
    }
    (k_min, k_max)
}

/// Every value is at most `1 + FLAT_TOLERANCE` times the running maximum
/// of the values before it.
pub fn non_growing(values: impl IntoIterator<Item = f64>) -> bool {
    let mut envelope: Option<f64> = None;
    for v in values {
        if let Some(m) = envelope {
            if v > (1.0 + FLAT_TOLERANCE) * m {
                return false;
            }
        }
        envelope = Some(envelope.map_or(v, |m| m.max(v)));
    }
    true
}

pub fn smoothing_report(report: &EnsembleReport) -> SmoothingReport {
    let resolved = resolved_blocks(report.resolution, report.length);
    let pick = |m: &BTreeMap<i32, f64>| -> BTreeMap<i32, f64> {
        m.range(resolved.0..=resolved.1).map(|(&k, &v)| (k, v)).collect()
    };
    let table = pick(&report.besov_final);
    let initial_table = pick(&report.besov_initial);
    let growth = |m: &BTreeMap<i32, f64>| {
        let first = *m.values().next()?;
        let last = *m.values().last()?;
        (first > 0.0).then(|| last / first)
    };
    let smoothing_observed = non_growing(table.values().copied());
    let trivial = report.forcing_l2 == 0.0;
    SmoothingReport {
        ratio: (!trivial).then(|| report.besov_sup / report.forcing_l2),
        trivial,
        resolved,
        initial_growth: growth(&initial_table),
        final_growth: growth(&table),
        table,
        initial_table,
        smoothing_observed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSnapshot {
    pub horizon: f64,
    pub sup_highfreq: BTreeMap<i32, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighFreqCurve {
    /// `max_n I_{>k}^{1/2}` at the latest horizon.
    pub witness: BTreeMap<i32, f64>,
    /// `witness(k+1)/witness(k)`, zero when both vanish.
    pub ratios: BTreeMap<i32, f64>,
    /// Relative change of the witness between the last two horizons.
    pub drift: BTreeMap<i32, f64>,
    pub mid_range: (i32, i32),
    pub ratio_bound: f64,
    pub decreasing: bool,
    pub geometric: bool,
    pub stable: bool,
}

/// Limsup witness for the high-frequency energy from snapshots at
/// increasing horizons. `geometric` checks the successive ratio over pairs
/// inside `mid_range`; `stable` compares the last two horizons there.
pub fn highfreq_vanishing_curve(
    snapshots: &[HorizonSnapshot],
    mid_range: (i32, i32),
    ratio_bound: f64,
) -> Result<HighFreqCurve, HarnessError> {
    if snapshots.len() < 2 {
        return Err(HarnessError::InvalidSpec(format!(
            "need at least two horizons, got {}",
            snapshots.len()
        )));
    }
    if snapshots.windows(2).any(|w| w[1].horizon <= w[0].horizon) {
        return Err(HarnessError::InvalidSpec("horizons must increase".into()));
    }
    let root = |s: &HorizonSnapshot| -> BTreeMap<i32, f64> {
        s.sup_highfreq.iter().map(|(&k, &v)| (k, v.max(0.0).sqrt())).collect()
    };
    let witness = root(&snapshots[snapshots.len() - 1]);
    let previous = root(&snapshots[snapshots.len() - 2]);
    let ratios: BTreeMap<i32, f64> = witness
        .iter()
        .filter_map(|(&k, &w)| {
            let next = *witness.get(&(k + 1))?;
            Some((k, if w == 0.0 { 0.0 } else { next / w }))
        })
        .collect();
    let drift: BTreeMap<i32, f64> = witness
        .iter()
        .map(|(&k, &w)| {
            let p = previous.get(&k).copied().unwrap_or(0.0);
            (k, if w == 0.0 && p == 0.0 { 0.0 } else { (w - p).abs() / w.max(p) })
        })
        .collect();
    let in_mid = |k: i32| mid_range.0 <= k && k <= mid_range.1;
    let decreasing = ratios.values().all(|&r| r <= 1.0);
    let geometric = ratios
        .iter()
        .filter(|(&k, _)| in_mid(k) && in_mid(k + 1))
        .all(|(_, &r)| r <= ratio_bound);
    let stable = drift
        .iter()
        .filter(|(&k, _)| in_mid(k))
        .all(|(_, &d)| d < STABILITY_TOLERANCE);
    Ok(HighFreqCurve {
        witness,
        ratios,
        drift,
        mid_range,
        ratio_bound,
        decreasing,
        geometric,
        stable,
    })
}

/// Pass/fail thresholds for an ensemble report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    pub plateau_bound: f64,
    pub ratio_bound: f64,
    pub highfreq_range: Option<(i32, i32)>,
    pub horizons: Vec<f64>,
    pub recipe: BallRecipe,
}

/// Verdicts on an ensemble report; `None` marks checks that do not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub plateau_ratio: Option<f64>,
    pub plateau_ok: Option<bool>,
    pub highfreq: Option<HighFreqCurve>,
    pub highfreq_ok: Option<bool>,
    pub smoothing: SmoothingReport,
    pub smoothing_ok: Option<bool>,
    /// Sup over trajectories of `J_{>N}` at the final time.
    pub tail: BTreeMap<u32, f64>,
    pub tail_ok: Option<bool>,
    pub passed: bool,
}

/// Plateau agreement applies to forced runs; high-frequency decay and
/// smoothing to viscous runs; tail decay to damped runs.
pub fn verdicts(
    report: &EnsembleReport,
    th: &VerdictThresholds,
) -> Result<Verdicts, HarnessError> {
    let forced = report.forcing_l2 > 0.0;
    let plateau_ok = forced.then(|| {
        report
            .plateau_ratio
            .is_some_and(|r| r <= th.plateau_bound)
    });
    let viscous = report.mode == Mode::Viscous;
    let highfreq = match th.highfreq_range {
        Some(range) if viscous => {
            let snaps: Vec<HorizonSnapshot> =
                th.horizons.iter().map(|&h| report.at_horizon(h)).collect();
            Some(highfreq_vanishing_curve(&snaps, range, th.ratio_bound)?)
        }
        _ => None,
    };
    let highfreq_ok = highfreq.as_ref().map(|c| c.decreasing && c.geometric && c.stable);
    let smoothing = smoothing_report(report);
    let smoothing_ok = (viscous && th.recipe == BallRecipe::RandomH1 && !smoothing.trivial)
        .then_some(smoothing.smoothing_observed);
    let tail = report.tail_final();
    let tail_ok = (report.mode == Mode::Damped && tail.len() >= 2).then(|| {
        let v: Vec<f64> = tail.values().copied().collect();
        v.windows(2).all(|w| w[1] < w[0])
    });
    let passed = [plateau_ok, highfreq_ok, smoothing_ok, tail_ok]
        .iter()
        .all(|v| v.unwrap_or(true));
    Ok(Verdicts {
        plateau_ratio: report.plateau_ratio,
        plateau_ok,
        highfreq,
        highfreq_ok,
        smoothing,
        smoothing_ok,
        tail,
        tail_ok,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SpectralField;

    fn setup(n: usize) -> (ViscosityProfile, ForcingTerm) {
        (
            ViscosityProfile::constant(n, 1.0, 1.0, 0.5).unwrap(),
            ForcingTerm::none(n, 1.0),
        )
    }

    #[test]
    fn spec_validation() {
        let mut s = EnsembleSpec::uniform(1.0, 2, 0, 1.0, 3, Mode::Viscous, BallRecipe::RandomH1);
        assert_eq!(s.sample_times, vec![0.0, 0.5, 1.0]);
        assert!(s.validate().is_ok());
        s.count = 3;
        assert!(s.validate().is_err());
        s.count = 2;
        s.sample_times = vec![0.0, 2.0];
        assert!(s.validate().is_err());
    }

    #[test]
    fn viscous_rejects_bumps_and_mean() {
        let (p, f) = setup(32);
        let settings = RunSettings {
            dt: 1e-3,
            diagnostics: DiagnosticSet::default(),
            workers: 1,
        };
        let s = EnsembleSpec::uniform(1.0, 1, 0, 0.1, 2, Mode::Viscous, BallRecipe::RandomBumps);
        assert!(matches!(
            run_ensemble(&s, &settings, &p, &f),
            Err(HarnessError::NonzeroMeanData(_))
        ));
        let g = SpectralField::constant(32, 1.0, 0.3).unwrap();
        let f = ForcingTerm::new(g, false, 0.0).unwrap();
        let s = EnsembleSpec::uniform(1.0, 1, 0, 0.1, 2, Mode::Viscous, BallRecipe::RandomH1);
        assert!(matches!(
            run_ensemble(&s, &settings, &p, &f),
            Err(HarnessError::NonzeroMeanForcing { .. })
        ));
    }

    #[test]
    fn merge_is_order_independent() {
        let (p, f) = setup(32);
        let settings = RunSettings {
            dt: 1e-3,
            diagnostics: DiagnosticSet::all_highfreq(32, 1.0),
            workers: 1,
        };
        let a = EnsembleSpec::uniform(1.0, 2, 0, 0.05, 3, Mode::Viscous, BallRecipe::RandomH1);
        let b = EnsembleSpec::uniform(2.0, 1, 9, 0.05, 3, Mode::Viscous, BallRecipe::RandomH1);
        let ra = run_ensemble(&a, &settings, &p, &f).unwrap();
        let rb = run_ensemble(&b, &settings, &p, &f).unwrap();
        assert_eq!(ra.merge(&rb).unwrap(), rb.merge(&ra).unwrap());
        assert!(ra.is_finite());
        let vals: Vec<f64> = ra.highfreq_decay.values().copied().collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_forcing_is_trivial() {
        let (p, f) = setup(32);
        let settings = RunSettings {
            dt: 1e-3,
            diagnostics: DiagnosticSet::default(),
            workers: 1,
        };
        let s = EnsembleSpec::uniform(1.0, 1, 0, 0.05, 2, Mode::Viscous, BallRecipe::RandomH1);
        let r = run_ensemble(&s, &settings, &p, &f).unwrap();
        let sm = smoothing_report(&r);
        assert!(sm.trivial);
        assert_eq!(sm.verdict(), "trivial (zero forcing)");
    }

    #[test]
    fn growth_envelope() {
        assert!(non_growing([0.4, 0.2, 0.26, 0.25, 0.1]));
        assert!(non_growing([1.0, 1.05, 1.1]));
        assert!(!non_growing([1.0, 2.0, 4.0]));
        assert!(!non_growing([0.4, 0.2, 0.45]));
        assert!(non_growing([]));
    }

    #[test]
    fn resolved_range() {
        assert_eq!(resolved_blocks(512, 1.0), (0, 6));
        assert_eq!(resolved_blocks(256, 1.0), (0, 5));
        assert_eq!(resolved_blocks(512, 32.0), (-5, 1));
    }

    #[test]
    fn curve_of_zero_ensemble() {
        let zero: BTreeMap<i32, f64> = (0..5).map(|k| (k, 0.0)).collect();
        let snaps = vec![
            HorizonSnapshot { horizon: 1.0, sup_highfreq: zero.clone() },
            HorizonSnapshot { horizon: 2.0, sup_highfreq: zero },
        ];
        let c = highfreq_vanishing_curve(&snaps, (1, 3), 0.75).unwrap();
        assert!(c.witness.values().all(|&w| w == 0.0));
        assert!(c.decreasing && c.geometric && c.stable);
        assert!(highfreq_vanishing_curve(&snaps[..1], (1, 3), 0.75).is_err());
    }

    #[test]
    fn curve_detects_slow_decay() {
        let m = |r: f64| -> BTreeMap<i32, f64> { (0..6).map(|k| (k, r.powi(2 * k))).collect() };
        let fast = vec![
            HorizonSnapshot { horizon: 1.0, sup_highfreq: m(0.5) },
            HorizonSnapshot { horizon: 2.0, sup_highfreq: m(0.5) },
        ];
        let c = highfreq_vanishing_curve(&fast, (1, 4), 0.75).unwrap();
        assert!(c.geometric && c.stable);
        assert!((c.ratios[&2] - 0.5).abs() < 1e-12);
        let slow = vec![
            HorizonSnapshot { horizon: 1.0, sup_highfreq: m(0.5) },
            HorizonSnapshot { horizon: 2.0, sup_highfreq: m(0.9) },
        ];
        let c = highfreq_vanishing_curve(&slow, (1, 4), 0.75).unwrap();
        assert!(!c.geometric && !c.stable);
    }
}
