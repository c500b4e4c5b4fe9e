//! Time-dependent drive parameters.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Converts an ordinary frequency in MHz to angular frequency in rad/μs.
pub fn angular(mhz: f64) -> f64 {
    2.0 * PI * mhz
}

/// Anything that provides `(Ω(t), δ(t))` over `[0, duration]`.
pub trait Drive: Sync {
    fn duration(&self) -> f64;

    /// Rabi frequency and detuning at `t`, rad/μs. Callers stay inside
    /// `[0, duration]`.
    fn at(&self, t: f64) -> (f64, f64);

    /// Largest rate the drive reaches, used for step-size checks.
    fn max_rate(&self) -> f64;
}

/// Three-region quasi-adiabatic sweep.
///
/// `[0, t_f/10]`: Ω ramps 0 → Ω₀ at δ = Δ_i. `[t_f/10, 9t_f/10]`: δ ramps
/// Δ_i → Δ_f at Ω = Ω₀. `[9t_f/10, t_f]`: Ω ramps back to 0 at δ = Δ_f.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSchedule {
    pub t_f: f64,
    pub delta_i: f64,
    pub delta_f: f64,
    pub omega_0: f64,
}

impl AnnealSchedule {
    pub fn new(t_f: f64, delta_i: f64, delta_f: f64, omega_0: f64) -> Result<Self> {
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(Error::Domain(format!("sweep time {t_f} must be positive")));
        }
        if !(delta_i < 0.0 && delta_f > 0.0) {
            return Err(Error::Domain(format!(
                "detuning must sweep from negative to positive (got {delta_i} -> {delta_f})"
            )));
        }
        if !(omega_0 >= 0.0 && omega_0.is_finite()) {
            return Err(Error::Domain(format!(
                "Rabi frequency {omega_0} must be >= 0"
            )));
        }
        Ok(AnnealSchedule {
            t_f,
            delta_i,
            delta_f,
            omega_0,
        })
    }

    /// Schedule from MHz values; `two_pi` selects the angular convention
    /// for the detunings (the Rabi frequency is always taken as 2π × MHz).
    pub fn from_mhz(
        t_f: f64,
        delta_i: f64,
        delta_f: f64,
        omega_0: f64,
        two_pi: bool,
    ) -> Result<Self> {
        let det = |x: f64| if two_pi { angular(x) } else { x };
        AnnealSchedule::new(t_f, det(delta_i), det(delta_f), angular(omega_0))
    }

    pub fn with_duration(&self, t_f: f64) -> Result<Self> {
        AnnealSchedule::new(t_f, self.delta_i, self.delta_f, self.omega_0)
    }

    /// Piecewise-linear `(Ω(t), δ(t))`; `t` outside `[0, t_f]` is a domain error.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.t_f).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.t_f)));
        }
        Ok(self.at(t))
    }
}

impl Drive for AnnealSchedule {
    fn duration(&self) -> f64 {
        self.t_f
    }

    fn at(&self, t: f64) -> (f64, f64) {
        let t1 = self.t_f / 10.0;
        let t2 = 0.9 * self.t_f;
        if t <= t1 {
            (self.omega_0 * t / t1, self.delta_i)
        } else if t < t2 {
            let frac = (t - t1) / (t2 - t1);
            (
                self.omega_0,
                self.delta_i + (self.delta_f - self.delta_i) * frac,
            )
        } else {
            (
                self.omega_0 * ((self.t_f - t) / (self.t_f - t2)).max(0.0),
                self.delta_f,
            )
        }
    }

    fn max_rate(&self) -> f64 {
        self.omega_0.max(self.delta_i.abs()).max(self.delta_f.abs())
    }
}

/// Constant Ω and δ for a fixed duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantDrive {
    pub duration: f64,
    pub omega: f64,
    pub delta: f64,
}

impl Drive for ConstantDrive {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn at(&self, _t: f64) -> (f64, f64) {
        (self.omega, self.delta)
    }

    fn max_rate(&self) -> f64 {
        self.omega.abs().max(self.delta.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c6_schedule() -> AnnealSchedule {
        AnnealSchedule::new(4.0, angular(-3.0), angular(3.0), angular(0.88)).unwrap()
    }

    #[test]
    fn endpoints_and_midpoint() {
        let s = c6_schedule();
        let (o, d) = s.eval(0.0).unwrap();
        assert_eq!(o, 0.0);
        assert!((d - angular(-3.0)).abs() < 1e-12);
        let (o, d) = s.eval(2.0).unwrap();
        assert!((o - angular(0.88)).abs() < 1e-12);
        assert!(d.abs() < 1e-12);
        let (o, d) = s.eval(4.0).unwrap();
        assert!(o.abs() < 1e-12);
        assert!((d - angular(3.0)).abs() < 1e-12);
    }

    #[test]
    fn region_boundaries_are_continuous() {
        let s = c6_schedule();
        for tb in [0.4, 3.6] {
            let (o1, d1) = s.eval(tb - 1e-12).unwrap();
            let (o2, d2) = s.eval(tb + 1e-12).unwrap();
            assert!((o1 - o2).abs() < 1e-9 && (d1 - d2).abs() < 1e-9);
        }
        let (o, d) = s.eval(0.4).unwrap();
        assert!((o - s.omega_0).abs() < 1e-12 && (d - s.delta_i).abs() < 1e-12);
        let (o, d) = s.eval(3.6).unwrap();
        assert!((o - s.omega_0).abs() < 1e-12 && (d - s.delta_f).abs() < 1e-12);
    }

    #[test]
    fn outside_range_is_domain_error() {
        let s = c6_schedule();
        assert!(matches!(s.eval(-0.1), Err(Error::Domain(_))));
        assert!(matches!(s.eval(4.01), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_schedules() {
        assert!(AnnealSchedule::new(0.0, -1.0, 1.0, 1.0).is_err());
        assert!(AnnealSchedule::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(AnnealSchedule::new(1.0, -1.0, -0.5, 1.0).is_err());
        assert!(AnnealSchedule::new(1.0, -1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn mhz_conventions() {
        let a = AnnealSchedule::from_mhz(4.0, -3.0, 3.0, 0.88, true).unwrap();
        assert!((a.delta_f - angular(3.0)).abs() < 1e-12);
        let b = AnnealSchedule::from_mhz(4.0, -3.0, 3.0, 0.88, false).unwrap();
        assert_eq!(b.delta_f, 3.0);
        assert_eq!(a.omega_0, b.omega_0);
    }
}
