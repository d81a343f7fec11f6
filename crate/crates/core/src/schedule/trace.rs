use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a trace does past its last generated segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonBehavior {
    /// The final segment extends forever.
    #[default]
    HoldLast,
    /// The whole `[0, horizon)` pattern repeats.
    Cycle,
}

/// Piecewise-constant inverse speed of one shared resource. Segment `i`
/// covers `[breakpoints[i], breakpoints[i + 1])` (the last one ends at
/// `horizon`) and has inverse speed `multiplicities[i] * base_inverse_speed`:
/// a physical resource shared evenly by `k` jobs serves each at `1/k` speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedTrace {
    breakpoints: Vec<f64>,
    multiplicities: Vec<u64>,
    base_inverse_speed: f64,
    horizon: f64,
    behavior: HorizonBehavior,
}

impl SpeedTrace {
    pub fn new(
        breakpoints: Vec<f64>,
        multiplicities: Vec<u64>,
        base_inverse_speed: f64,
        horizon: f64,
        behavior: HorizonBehavior,
    ) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints[0] != 0.0 {
            return Err(Error::InvalidTrace("breakpoints must start at 0".into()));
        }
        if breakpoints.len() != multiplicities.len() {
            return Err(Error::InvalidTrace(format!(
                "{} breakpoints but {} multiplicities",
                breakpoints.len(),
                multiplicities.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidTrace(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidTrace("multiplicities must be positive".into()));
        }
        if !(base_inverse_speed > 0.0 && base_inverse_speed.is_finite()) {
            return Err(Error::InvalidTrace(format!(
                "base inverse speed {base_inverse_speed} must be positive and finite"
            )));
        }
        let last = *breakpoints.last().unwrap();
        if !(horizon > last) {
            return Err(Error::InvalidTrace(format!(
                "horizon {horizon} must exceed the last breakpoint {last}"
            )));
        }
        if behavior == HorizonBehavior::Cycle && !horizon.is_finite() {
            return Err(Error::InvalidTrace("a cycling trace needs a finite horizon".into()));
        }
        Ok(SpeedTrace {
            breakpoints,
            multiplicities,
            base_inverse_speed,
            horizon,
            behavior,
        })
    }

    /// A resource with no background load.
    pub fn constant(inverse_speed: f64) -> Result<Self> {
        SpeedTrace::new(
            vec![0.0],
            vec![1],
            inverse_speed,
            f64::INFINITY,
            HorizonBehavior::HoldLast,
        )
    }

    /// Unit-length segments `[k, k + 1)` for each multiplicity.
    pub fn unit_segments(
        multiplicities: Vec<u64>,
        base_inverse_speed: f64,
        behavior: HorizonBehavior,
    ) -> Result<Self> {
        let horizon = multiplicities.len() as f64;
        let breakpoints = (0..multiplicities.len()).map(|k| k as f64).collect();
        SpeedTrace::new(breakpoints, multiplicities, base_inverse_speed, horizon, behavior)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn base_inverse_speed(&self) -> f64 {
        self.base_inverse_speed
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn behavior(&self) -> HorizonBehavior {
        self.behavior
    }

    fn segment_inverse(&self, idx: usize) -> f64 {
        self.multiplicities[idx] as f64 * self.base_inverse_speed
    }

    fn cursor(&self, t: f64) -> Cursor {
        let (offset, local) = match self.behavior {
            HorizonBehavior::HoldLast => (0.0, t),
            HorizonBehavior::Cycle => {
                let mut k = (t / self.horizon).floor();
                let mut local = t - k * self.horizon;
                if local >= self.horizon {
                    k += 1.0;
                    local -= self.horizon;
                }
                if local < 0.0 {
                    k -= 1.0;
                    local += self.horizon;
                }
                (k * self.horizon, local)
            }
        };
        let idx = self
            .breakpoints
            .partition_point(|&b| b <= local)
            .saturating_sub(1);
        Cursor { offset, idx }
    }

    fn segment_end(&self, cur: &Cursor) -> f64 {
        match self.breakpoints.get(cur.idx + 1) {
            Some(&b) => cur.offset + b,
            None => match self.behavior {
                HorizonBehavior::HoldLast => f64::INFINITY,
                HorizonBehavior::Cycle => cur.offset + self.horizon,
            },
        }
    }

    fn step(&self, cur: &mut Cursor) {
        cur.idx += 1;
        if cur.idx == self.breakpoints.len() {
            cur.idx = 0;
            cur.offset += self.horizon;
        }
    }

    /// Work served per cycle (`∫ 1/inverse` over one period).
    fn cycle_capacity(&self) -> f64 {
        (0..self.breakpoints.len())
            .map(|i| {
                let end = self.breakpoints.get(i + 1).copied().unwrap_or(self.horizon);
                (end - self.breakpoints[i]) / self.segment_inverse(i)
            })
            .sum()
    }

    /// Inverse speed in effect at time `t >= 0`.
    pub fn inverse_speed_at(&self, t: f64) -> f64 {
        self.segment_inverse(self.cursor(t.max(0.0)).idx)
    }

    /// Work served over `[from, to]`, i.e. the integral of `1 / inverse_speed`.
    pub fn capacity(&self, from: f64, to: f64) -> f64 {
        if !(to > from) {
            return 0.0;
        }
        let mut cur = self.cursor(from);
        let mut t = from;
        let mut served = 0.0;
        if self.behavior == HorizonBehavior::Cycle && to - from > 2.0 * self.horizon {
            // walk to the next cycle boundary, then jump over whole cycles
            let boundary = cur.offset + self.horizon;
            served += self.walk_capacity(&mut cur, t, boundary);
            t = boundary;
            cur = Cursor {
                offset: boundary,
                idx: 0,
            };
            let cycles = ((to - t) / self.horizon).floor();
            served += cycles * self.cycle_capacity();
            t += cycles * self.horizon;
            cur.offset = t;
        }
        served + self.walk_capacity(&mut cur, t, to)
    }

    fn walk_capacity(&self, cur: &mut Cursor, mut t: f64, to: f64) -> f64 {
        let mut served = 0.0;
        while t < to {
            let end = self.segment_end(cur).min(to);
            if end > t {
                served += (end - t) / self.segment_inverse(cur.idx);
                t = end;
            }
            if t < to {
                self.step(cur);
            }
        }
        served
    }

    /// Earliest time at which `work` units have been served starting at
    /// `start`.
    pub fn advance(&self, start: f64, work: f64) -> f64 {
        if !(work > 0.0) {
            return start;
        }
        let mut cur = self.cursor(start);
        let mut t = start;
        let mut remaining = work;
        let per_cycle = match self.behavior {
            HorizonBehavior::Cycle => self.cycle_capacity(),
            HorizonBehavior::HoldLast => f64::INFINITY,
        };
        loop {
            if cur.idx == 0 && t == cur.offset && remaining > per_cycle {
                let cycles = (remaining / per_cycle).floor();
                remaining -= cycles * per_cycle;
                t += cycles * self.horizon;
                cur.offset = t;
                if remaining <= 0.0 {
                    return t;
                }
            }
            let inverse = self.segment_inverse(cur.idx);
            let end = self.segment_end(&cur);
            let finish = t + remaining * inverse;
            if finish <= end {
                return finish;
            }
            if end > t {
                remaining -= (end - t) / inverse;
                t = end;
            }
            self.step(&mut cur);
        }
    }

    /// Constant inverse speed that serves the same work over `[t_m, t_n]`:
    /// `(t_n - t_m) / ∫ 1/inverse(t) dt`, the time-weighted harmonic mean.
    pub fn equivalent_inverse_speed(&self, t_m: f64, t_n: f64) -> Result<f64> {
        if !(t_n > t_m) || t_m < 0.0 {
            return Err(Error::DegenerateInterval {
                start: t_m,
                end: t_n,
            });
        }
        Ok((t_n - t_m) / self.capacity(t_m, t_n))
    }

    /// Smallest and largest inverse speed in effect anywhere on `[from, to]`.
    pub fn inverse_speed_range(&self, from: f64, to: f64) -> (f64, f64) {
        let mut cur = self.cursor(from);
        let mut lo = self.segment_inverse(cur.idx);
        let mut hi = lo;
        let mut steps = 0;
        while self.segment_end(&cur) < to && steps <= self.breakpoints.len() {
            self.step(&mut cur);
            let v = self.segment_inverse(cur.idx);
            lo = lo.min(v);
            hi = hi.max(v);
            steps += 1;
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cursor {
    offset: f64,
    idx: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_step() -> SpeedTrace {
        // inverse speed 1 on [0,1), 3 on [1,3)
        SpeedTrace::new(vec![0.0, 1.0], vec![1, 3], 1.0, 3.0, HorizonBehavior::HoldLast).unwrap()
    }

    #[test]
    fn constant_trace_is_its_own_equivalent() {
        let t = SpeedTrace::constant(2.0).unwrap();
        assert_eq!(t.equivalent_inverse_speed(0.0, 4.0).unwrap(), 2.0);
    }

    #[test]
    fn two_segment_equivalent() {
        let got = two_step().equivalent_inverse_speed(0.0, 3.0).unwrap();
        assert!((got - 1.8).abs() < 1e-15, "{got}");
    }

    #[test]
    fn equivalent_matches_quadrature() {
        let tr = two_step();
        let (a, b) = (0.3, 2.7);
        let steps = 240_000;
        let h = (b - a) / steps as f64;
        let integral: f64 = (0..steps)
            .map(|k| h / tr.inverse_speed_at(a + (k as f64 + 0.5) * h))
            .sum();
        let quad = (b - a) / integral;
        assert!((tr.equivalent_inverse_speed(a, b).unwrap() - quad).abs() < 1e-6);
    }

    #[test]
    fn degenerate_interval_errors() {
        let err = two_step().equivalent_inverse_speed(2.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateInterval { .. }));
    }

    #[test]
    fn advance_crosses_segments() {
        // 1 on [0,2), 2 afterwards: 4 units from t=1 gain 1 by t=2, then 3 more at rate 1/2
        let tr =
            SpeedTrace::new(vec![0.0, 2.0], vec![1, 2], 1.0, 3.0, HorizonBehavior::HoldLast).unwrap();
        assert_eq!(tr.advance(1.0, 4.0), 8.0);
        assert_eq!(tr.capacity(1.0, 8.0), 4.0);
    }

    #[test]
    fn hold_last_and_cycle_past_horizon() {
        let hold = two_step();
        assert_eq!(hold.inverse_speed_at(100.0), 3.0);
        let cyc =
            SpeedTrace::new(vec![0.0, 1.0], vec![1, 3], 1.0, 3.0, HorizonBehavior::Cycle).unwrap();
        assert_eq!(cyc.inverse_speed_at(3.5), 1.0);
        assert_eq!(cyc.inverse_speed_at(4.5), 3.0);
        // one cycle serves 1 + 2/3
        let per = 1.0 + 2.0 / 3.0;
        assert!((cyc.capacity(0.0, 30.0) - 10.0 * per).abs() < 1e-12);
        let t = cyc.advance(0.0, 10.0 * per);
        assert!((t - 30.0).abs() < 1e-9, "{t}");
        assert!((cyc.capacity(0.25, 17.75) - cyc.walk_capacity(&mut cyc.cursor(0.25), 0.25, 17.75)).abs() < 1e-12);
    }

    #[test]
    fn rejects_malformed_traces() {
        assert!(SpeedTrace::new(vec![1.0], vec![1], 1.0, 2.0, HorizonBehavior::HoldLast).is_err());
        assert!(SpeedTrace::new(vec![0.0, 0.0], vec![1, 1], 1.0, 2.0, HorizonBehavior::HoldLast).is_err());
        assert!(SpeedTrace::new(vec![0.0], vec![0], 1.0, 2.0, HorizonBehavior::HoldLast).is_err());
        assert!(SpeedTrace::new(vec![0.0], vec![1], -1.0, 2.0, HorizonBehavior::HoldLast).is_err());
        assert!(SpeedTrace::new(vec![0.0], vec![1], 1.0, f64::INFINITY, HorizonBehavior::Cycle).is_err());
    }
}
