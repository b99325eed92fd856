use serde::{Deserialize, Serialize};

/// Reference input `r(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSignal {
    Constant { value: f64 },
    /// `offset + amplitude·sin(frequency·t)`, frequency in rad/s.
    BiasedSine { offset: f64, amplitude: f64, frequency: f64 },
    /// `level` on `[0, duration]`, zero afterwards.
    Pulse { level: f64, duration: f64 },
    /// Sine whose instantaneous frequency moves linearly from `omega_start`
    /// to `omega_end` over `sweep_duration`, then holds.
    Chirp { offset: f64, amplitude: f64, omega_start: f64, omega_end: f64, sweep_duration: f64 },
}

impl ReferenceSignal {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ReferenceSignal::Constant { value } => value,
            ReferenceSignal::BiasedSine { offset, amplitude, frequency } => offset + amplitude * (frequency * t).sin(),
            ReferenceSignal::Pulse { level, duration } => {
                if t <= duration {
                    level
                } else {
                    0.0
                }
            }
            ReferenceSignal::Chirp { offset, amplitude, omega_start, omega_end, sweep_duration } => {
                let phase = if t <= sweep_duration {
                    omega_start * t + 0.5 * (omega_end - omega_start) * t * t / sweep_duration
                } else {
                    0.5 * (omega_start + omega_end) * sweep_duration + omega_end * (t - sweep_duration)
                };
                offset + amplitude * phase.sin()
            }
        }
    }

    /// `sup_t |r(t)|`.
    pub fn r_max(&self) -> f64 {
        match *self {
            ReferenceSignal::Constant { value } => value.abs(),
            ReferenceSignal::BiasedSine { offset, amplitude, .. } | ReferenceSignal::Chirp { offset, amplitude, .. } => {
                offset.abs() + amplitude.abs()
            }
            ReferenceSignal::Pulse { level, .. } => level.abs(),
        }
    }

    pub fn is_finite(&self) -> bool {
        let params: &[f64] = match self {
            ReferenceSignal::Constant { value } => &[*value],
            ReferenceSignal::BiasedSine { offset, amplitude, frequency } => &[*offset, *amplitude, *frequency],
            ReferenceSignal::Pulse { level, duration } => &[*level, *duration],
            ReferenceSignal::Chirp { offset, amplitude, omega_start, omega_end, sweep_duration } => {
                &[*offset, *amplitude, *omega_start, *omega_end, *sweep_duration]
            }
        };
        params.iter().all(|v| v.is_finite())
            && !matches!(self, ReferenceSignal::Chirp { sweep_duration, .. } if *sweep_duration <= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases() {
        assert_eq!(ReferenceSignal::Constant { value: 10.0 }.eval(3.0), 10.0);
        let pulse = ReferenceSignal::Pulse { level: 12.0, duration: 1.0 };
        assert_eq!(pulse.eval(1.5), 0.0);
        assert_eq!(pulse.eval(1.0), 12.0);
        let sine = ReferenceSignal::BiasedSine { offset: 0.3, amplitude: 1.85, frequency: 16.1 };
        assert_eq!(sine.eval(0.0), 0.3);
        assert!((sine.r_max() - 2.15).abs() < 1e-15);
    }

    #[test]
    fn chirp_phase_is_continuous() {
        let chirp =
            ReferenceSignal::Chirp { offset: 0.0, amplitude: 1.0, omega_start: 16.1, omega_end: 2.0, sweep_duration: 60.0 };
        let t = 60.0;
        let before = chirp.eval(t - 1e-9);
        let after = chirp.eval(t + 1e-9);
        assert!((before - after).abs() < 1e-7);
        // instantaneous frequency near the start is ω_start
        let h = 1e-6;
        let slope = (chirp.eval(h) - chirp.eval(0.0)) / h;
        assert!((slope - 16.1).abs() < 1e-3);
    }

    #[test]
    fn json_shape() {
        let s: ReferenceSignal = serde_json::from_str(r#"{"kind":"pulse","level":12,"duration":1}"#).unwrap();
        assert_eq!(s, ReferenceSignal::Pulse { level: 12.0, duration: 1.0 });
        assert!(serde_json::from_str::<ReferenceSignal>(r#"{"kind":"constant","value":1,"x":2}"#).is_err());
    }
}
