//! Browser front end: one forced viscous trajectory on the unit interval,
//! advanced on demand, with its energy, Besov blocks and high-frequency
//! tail exposed as flat `f64` arrays for plotting.

use std::f64::consts::PI;

use chlab::diagnostics::{h1_energy, highfreq_energy};
use chlab::initial::random_h1;
use chlab::integrator::stability_budget;
use chlab::{ForcingTerm, Integrator, Mode, SpectralField, TrajectoryState, ViscosityProfile};
use wasm_bindgen::prelude::*;

const EPSILON: f64 = 0.5;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `g = A Σ_{k ≤ N/6} k⁻¹ cos(2πkx + 2π{kφ})`, scaled to `‖g‖_{L²} = amplitude`.
fn forcing_shape(n: usize, amplitude: f64) -> Result<ForcingTerm, String> {
    let modes = n / 6;
    let g = SpectralField::from_fn(n, 1.0, |x| {
        (1..=modes)
            .map(|k| {
                let k = k as f64;
                let phase = 2.0 * PI * (k * GOLDEN).fract();
                (2.0 * PI * k * x + phase).cos() / k
            })
            .sum()
    })
    .map_err(|e| e.to_string())?;
    let norm = g.l2_norm();
    let g = if norm > 0.0 { g.scale(amplitude / norm) } else { g };
    ForcingTerm::new(g, true, 0.0).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub struct Lab {
    profile: ViscosityProfile,
    forcing: ForcingTerm,
    state: TrajectoryState,
    history: Vec<f64>,
    initial_blocks: Vec<f64>,
    initial_energy: f64,
    dt: f64,
}

#[wasm_bindgen]
impl Lab {
    /// A rough random datum with `I(u₀) = radius²` under forcing of size
    /// `amplitude`, with `a ≡ 1` and `ε = 0.5`.
    #[wasm_bindgen(constructor)]
    pub fn new(resolution: usize, amplitude: f64, radius: f64, seed: u64) -> Result<Lab, String> {
        let profile =
            ViscosityProfile::constant(resolution, 1.0, 1.0, EPSILON).map_err(|e| e.to_string())?;
        let forcing = forcing_shape(resolution, amplitude)?;
        let u0 = random_h1(resolution, 1.0, radius, seed).map_err(|e| e.to_string())?;
        let initial_blocks = u0.besov_seminorm(2.0).blocks.iter().map(|b| b.1).collect();
        let initial_energy = h1_energy(&u0);
        let dt = stability_budget(&u0, &profile, Mode::Viscous).min(1e-3);
        let state = TrajectoryState::new(u0);
        Ok(Lab {
            profile,
            forcing,
            history: vec![0.0, initial_energy],
            initial_blocks,
            initial_energy,
            dt,
            state,
        })
    }

    /// Integrate for `duration` time units, recording `I` after each step.
    pub fn advance(&mut self, duration: f64) -> Result<(), String> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(format!("duration {duration} must be positive"));
        }
        let int = Integrator::new(&self.profile, &self.forcing, Mode::Viscous);
        let steps = (duration / self.dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        for _ in 0..steps {
            self.state = int.advance(&self.state, h).map_err(|e| e.to_string())?;
            self.history.push(self.state.t);
            self.history.push(h1_energy(&self.state.u));
        }
        Ok(())
    }

    /// Replace the forcing amplitude, keeping the current state.
    pub fn set_forcing(&mut self, amplitude: f64) -> Result<(), String> {
        self.forcing = forcing_shape(self.state.u.n(), amplitude)?;
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn energy(&self) -> f64 {
        h1_energy(&self.state.u)
    }

    pub fn epsilon(&self) -> f64 {
        EPSILON
    }

    /// `C‖g‖²/ε²` scale for the absorbing ball, with `C = 1`.
    pub fn ball_scale(&self) -> f64 {
        self.forcing.g().l2_norm().powi(2) / (EPSILON * EPSILON)
    }

    /// `I(0)e^{-εt/2}` at time `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.initial_energy * (-EPSILON * t / 2.0).exp()
    }

    /// Interleaved `(t, I)` pairs since the start.
    pub fn history(&self) -> Vec<f64> {
        self.history.clone()
    }

    /// First dyadic index of the block tables.
    pub fn first_block(&self) -> i32 {
        self.state.u.besov_seminorm(2.0).blocks[0].0
    }

    /// `2^{2k}‖P_{2^k}u₀‖` by block.
    pub fn blocks_initial(&self) -> Vec<f64> {
        self.initial_blocks.clone()
    }

    /// `2^{2k}‖P_{2^k}u(t)‖` by block.
    pub fn blocks_now(&self) -> Vec<f64> {
        self.state.u.besov_seminorm(2.0).blocks.iter().map(|b| b.1).collect()
    }

    /// `I_{>k}(t)^{1/2}` for `k = 0, 1, …` while `2^k < N/3`.
    pub fn highfreq(&self) -> Vec<f64> {
        let u = &self.state.u;
        (0..)
            .take_while(|&k| 2f64.powi(k) < (u.n() / 3) as f64)
            .map(|k| highfreq_energy(u, k).map_or(f64::NAN, f64::sqrt))
            .collect()
    }

    /// Grid values of `u(t)`.
    pub fn values(&self) -> Vec<f64> {
        self.state.u.values().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forcing_has_requested_size_and_zero_mean() {
        let f = forcing_shape(256, 7.0).unwrap();
        assert!((f.g().l2_norm() - 7.0).abs() < 1e-12);
        assert!(f.g().mean().abs() < 1e-15);
        assert_eq!(forcing_shape(64, 0.0).unwrap().g().max_abs(), 0.0);
    }

    #[test]
    fn lab_settles_and_smooths() {
        let mut lab = Lab::new(128, 10.0, 5.0, 1).unwrap();
        assert!((lab.energy() - 25.0).abs() < 1e-9);
        let rough = lab.blocks_initial();
        assert!(rough.last().unwrap() > &rough[1]);
        lab.advance(2.0).unwrap();
        assert!((lab.time() - 2.0).abs() < 1e-12);
        assert!(lab.energy() < 25.0);
        let h = lab.history();
        assert_eq!(h.len() % 2, 0);
        assert_eq!(h[h.len() - 2], lab.time());
        let now = lab.blocks_now();
        assert!(now.last().unwrap() < &now[1]);
        let tail = lab.highfreq();
        assert!(tail.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(lab.values().len(), 128);
    }

    #[test]
    fn bad_input_is_an_error() {
        let err = Lab::new(99, 1.0, 1.0, 0).err().unwrap();
        assert!(err.contains("even"), "{err}");
        let mut lab = Lab::new(64, 1.0, 1.0, 0).unwrap();
        assert!(lab.advance(-1.0).is_err());
        lab.set_forcing(0.0).unwrap();
        lab.advance(1.0).unwrap();
        assert!(lab.energy() <= lab.envelope(1.0));
    }
}
