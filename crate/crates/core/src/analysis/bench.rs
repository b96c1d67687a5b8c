//! Worst-case delay, power and load-sweep benchmarks of adders.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use super::{area, pdp, trace_arrivals, trace_energy, Loads, TimingModel};
use crate::adders::{build_cpa, build_full_adder, cpa_port, AdderError, AdderPorts, AdderVariant, CpaConfig};
use crate::logic::{CarrySwing, Radix};
use crate::netlist::{NetId, Netlist, NetlistError};
use crate::solver::{step_vectors, stimulus_from_digits, StepTrace, Stimulus, TraceError};
use crate::Scalar;

/// Duration of one input vector when averaging power.
pub const POWER_STEP_S: f64 = 1e-9;
/// Loads of the standard sweep, in fF.
pub const SWEEP_LOADS_FF: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const CSV_HEADER: &str =
    "design,radix,digits,swing_v,vdd_v,cl_ff,d_in_cout_s,d_in_sum_s,d_cin_cout_s,d_cin_sum_s,power_w,pdp_j,area_nm";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{design}: no {path} transition observed")]
    NoPath { design: String, path: &'static str },
}

/// A benchmarked circuit: one cell (`digits == 1`) or a ripple-carry adder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    pub variant: AdderVariant,
    pub swing: CarrySwing,
    pub vdd: f64,
    pub digits: usize,
}

impl Design {
    pub fn cell(variant: AdderVariant, swing: CarrySwing, vdd: f64) -> Self {
        Self {
            variant,
            swing,
            vdd,
            digits: 1,
        }
    }

    pub fn cpa(config: &CpaConfig) -> Self {
        Self {
            variant: config.variant,
            swing: config.swing,
            vdd: config.vdd,
            digits: config.digits,
        }
    }

    pub fn radix(&self) -> Radix {
        self.variant.radix()
    }

    pub fn carry_volts(&self) -> f64 {
        self.swing.one_voltage(self.radix(), self.vdd)
    }

    /// Flattened netlist.
    pub fn build(&self) -> Result<Netlist, BenchError> {
        if self.digits == 1 {
            Ok(build_full_adder(self.variant, self.swing, self.vdd)?)
        } else {
            let config = CpaConfig::new(self.variant, self.digits)
                .with_swing(self.swing)
                .with_vdd(self.vdd);
            Ok(build_cpa(&config)?.flatten()?)
        }
    }

    /// The comparison set: binary at both supplies, ternary at both carry
    /// swings, and the two quaternary cells, each at its standard width.
    pub fn comparison() -> Vec<Design> {
        use AdderVariant::*;
        let cpa = |v: AdderVariant, swing, vdd| Design {
            variant: v,
            swing,
            vdd,
            digits: CpaConfig::standard_digits(v.radix()),
        };
        vec![
            cpa(Bfa1, CarrySwing::Full, 0.9),
            cpa(Bfa1, CarrySwing::Full, 0.45),
            cpa(Tfa2, CarrySwing::Reduced, 0.9),
            cpa(Tfa2, CarrySwing::Full, 0.9),
            cpa(Qfa1, CarrySwing::Reduced, 0.9),
            cpa(Qfa2, CarrySwing::Full, 0.9),
        ]
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.variant)?;
        if self.radix() == Radix::BINARY {
            write!(f, "@{}V", self.vdd)?;
        } else {
            write!(f, "-{}", self.swing)?;
        }
        if self.digits > 1 {
            write!(f, "x{}", self.digits)?;
        }
        Ok(())
    }
}

/// The four worst-case propagation delays, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Delays<T> {
    pub in_cout: T,
    pub in_sum: T,
    pub cin_cout: T,
    pub cin_sum: T,
}

impl<T: Scalar> Delays<T> {
    pub fn as_array(&self) -> [T; 4] {
        [self.in_cout, self.in_sum, self.cin_cout, self.cin_sum]
    }

    pub fn worst(&self) -> T {
        self.as_array().into_iter().fold(T::zero(), T::max)
    }
}

/// Column names of [`Delays::as_array`].
pub const DELAY_COLUMNS: [&str; 4] = ["in->cout", "in->sum", "cin->cout", "cin->sum"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport<T> {
    pub design: String,
    pub radix: u32,
    pub digits: usize,
    pub swing_v: T,
    pub vdd_v: T,
    pub cl_ff: T,
    pub delays: Delays<T>,
    pub power_w: T,
    /// Power times the worst of the four delays.
    pub pdp_j: T,
    pub area_nm: T,
}

impl<T: Scalar> BenchReport<T> {
    pub fn csv_row(&self) -> String {
        let e = |v: T| format!("{:.6e}", v.to_f64_lossy());
        let p = |v: T| format!("{}", v.to_f64_lossy());
        [
            self.design.clone(),
            self.radix.to_string(),
            self.digits.to_string(),
            p(self.swing_v),
            p(self.vdd_v),
            p(self.cl_ff),
            e(self.delays.in_cout),
            e(self.delays.in_sum),
            e(self.delays.cin_cout),
            e(self.delays.cin_sum),
            e(self.power_w),
            e(self.pdp_j),
            format!("{:.3}", self.area_nm.to_f64_lossy()),
        ]
        .join(",")
    }

    pub fn is_finite_positive(&self) -> bool {
        self.delays
            .as_array()
            .into_iter()
            .chain([self.power_w, self.pdp_j, self.area_nm])
            .all(|v| v.is_finite() && v > T::zero())
    }
}

pub fn to_csv<T: Scalar>(reports: &[BenchReport<T>]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mover {
    Operand,
    Carry,
}

/// A moving input, its `(a, b, cin)` digit-0 sequence and the upper-digit pattern.
type Job = (Mover, Vec<(u32, u32, u32)>, (u32, u32));

/// A design with its solved stimulus traces; timing and power at any load
/// reuse the same traces.
pub struct Bench {
    pub design: Design,
    pub netlist: Netlist,
    pub ports: AdderPorts,
    carries: Vec<NetId>,
    delay_traces: Vec<(Mover, StepTrace)>,
}

/// `0, 1, …, r-1, …, 1, 0`.
pub fn staircase(radix: Radix) -> Vec<u32> {
    let top = radix.max_digit();
    (0..=top).chain((0..top).rev()).collect()
}

impl Bench {
    pub fn new(design: Design) -> Result<Self, BenchError> {
        let netlist = design.build()?;
        let ports = AdderPorts::find(&netlist, design.digits)?;
        let carries = (1..design.digits)
            .map(|i| netlist.require(&cpa_port::c(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut bench = Self {
            design,
            netlist,
            ports,
            carries,
            delay_traces: Vec::new(),
        };
        bench.delay_traces = bench.enumerate_transitions(&Self::adjacent)?;
        Ok(bench)
    }

    fn adjacent(radix: Radix) -> Vec<Vec<u32>> {
        vec![staircase(radix)]
    }

    fn stimulus(&self, a0: u32, b0: u32, cin: u32, upper: (u32, u32)) -> Result<Stimulus, TraceError> {
        let mut digits = vec![(self.ports.a[0], a0), (self.ports.b[0], b0), (self.ports.cin, cin)];
        for i in 1..self.ports.digits() {
            digits.push((self.ports.a[i], upper.0));
            digits.push((self.ports.b[i], upper.1));
        }
        stimulus_from_digits(&self.netlist, digits).map_err(|source| TraceError { step: 0, source })
    }

    /// Every single-input sequence of digit 0 over every assignment of the
    /// other digit-0 inputs. Higher digits hold a propagate pattern
    /// (`A_i + B_i = r - 1`) so carries ripple through the whole chain.
    fn enumerate_transitions(
        &self,
        sequences: &dyn Fn(Radix) -> Vec<Vec<u32>>,
    ) -> Result<Vec<(Mover, StepTrace)>, BenchError> {
        let r = self.design.radix();
        let uppers: Vec<(u32, u32)> = if self.ports.digits() > 1 {
            r.digits().map(|j| (j, r.max_digit() - j)).collect()
        } else {
            vec![(0, 0)]
        };
        let mut jobs: Vec<Job> = Vec::new();
        for &upper in &uppers {
            for seq in sequences(r) {
                for other in r.digits() {
                    for cin in 0..2 {
                        jobs.push((Mover::Operand, seq.iter().map(|&a| (a, other, cin)).collect(), upper));
                        jobs.push((Mover::Operand, seq.iter().map(|&b| (other, b, cin)).collect(), upper));
                    }
                }
            }
            for a in r.digits() {
                for b in r.digits() {
                    jobs.push((Mover::Carry, [0, 1, 0].iter().map(|&c| (a, b, c)).collect(), upper));
                }
            }
        }
        jobs.into_par_iter()
            .map(|(mover, seq, upper)| {
                let vectors = seq
                    .iter()
                    .map(|&(a, b, c)| self.stimulus(a, b, c, upper))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((mover, step_vectors(&self.netlist, &vectors, POWER_STEP_S)?))
            })
            .collect()
    }

    /// `load_ff` on every sum digit and every carry leaving a stage.
    pub fn loads<T: Scalar>(&self, load_ff: T) -> Loads<T> {
        let nets = self
            .ports
            .sum
            .iter()
            .chain(&self.carries)
            .chain(std::iter::once(&self.ports.cout))
            .copied();
        Loads::on(nets, load_ff)
    }

    fn delays_over<T: Scalar>(
        &self,
        traces: &[(Mover, StepTrace)],
        model: &TimingModel<T>,
        load_ff: T,
    ) -> Result<Delays<T>, BenchError> {
        let loads = self.loads(load_ff);
        let per_trace: Vec<[Option<T>; 4]> = traces
            .par_iter()
            .map(|(mover, trace)| {
                let mut best = [None; 4];
                let (cout_slot, sum_slot) = match mover {
                    Mover::Operand => (0, 1),
                    Mover::Carry => (2, 3),
                };
                for arr in trace_arrivals(&self.netlist, model, &loads, trace) {
                    let mut bump = |slot: usize, t: Option<T>| {
                        if let Some(t) = t {
                            best[slot] = Some(best[slot].map_or(t, |b: T| b.max(t)));
                        }
                    };
                    bump(cout_slot, arr[self.ports.cout.index()]);
                    for s in &self.ports.sum {
                        bump(sum_slot, arr[s.index()]);
                    }
                }
                best
            })
            .collect();
        let mut worst = [None; 4];
        for row in per_trace {
            for (w, v) in worst.iter_mut().zip(row) {
                if let Some(v) = v {
                    *w = Some(w.map_or(v, |x: T| x.max(v)));
                }
            }
        }
        let get = |i: usize| {
            worst[i].ok_or_else(|| BenchError::NoPath {
                design: self.design.to_string(),
                path: DELAY_COLUMNS[i],
            })
        };
        Ok(Delays {
            in_cout: get(0)?,
            in_sum: get(1)?,
            cin_cout: get(2)?,
            cin_sum: get(3)?,
        })
    }

    /// Worst case over every adjacent-level single-input transition.
    pub fn worst_case_delays<T: Scalar>(&self, model: &TimingModel<T>, load_ff: T) -> Result<Delays<T>, BenchError> {
        self.delays_over(&self.delay_traces, model, load_ff)
    }

    /// Worst operand delays over jumps `x -> y -> x` between two given levels.
    pub fn jump_delays<T: Scalar>(
        &self,
        model: &TimingModel<T>,
        load_ff: T,
        x: u32,
        y: u32,
    ) -> Result<(T, T), BenchError> {
        let traces = self.enumerate_transitions(&|_| vec![vec![x, y, x]])?;
        let operand: Vec<(Mover, StepTrace)> = traces.into_iter().filter(|(m, _)| *m == Mover::Operand).collect();
        let loads = self.loads(load_ff);
        let mut worst = (T::zero(), T::zero());
        for (_, trace) in &operand {
            for arr in trace_arrivals(&self.netlist, model, &loads, trace) {
                if let Some(t) = arr[self.ports.cout.index()] {
                    worst.0 = worst.0.max(t);
                }
                for s in &self.ports.sum {
                    if let Some(t) = arr[s.index()] {
                        worst.1 = worst.1.max(t);
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Average power over the same transition set the delays are taken
    /// from, every vector lasting [`POWER_STEP_S`].
    pub fn power<T: Scalar>(&self, model: &TimingModel<T>, load_ff: T) -> T {
        let loads = self.loads(load_ff);
        let energy = self.delay_traces.iter().fold(T::zero(), |acc, (_, t)| {
            acc + trace_energy(&self.netlist, model, &loads, t)
        });
        let steps: usize = self.delay_traces.iter().map(|(_, t)| t.steps.len() - 1).sum();
        energy / (T::lit(POWER_STEP_S) * T::lit(steps as f64))
    }

    pub fn area<T: Scalar>(&self) -> T {
        area(&self.netlist)
    }

    pub fn report<T: Scalar>(&self, model: &TimingModel<T>, load_ff: T) -> Result<BenchReport<T>, BenchError> {
        let delays = self.worst_case_delays(model, load_ff)?;
        let power_w = self.power(model, load_ff);
        Ok(BenchReport {
            design: self.design.to_string(),
            radix: self.design.radix().get(),
            digits: self.design.digits,
            swing_v: T::lit(self.design.carry_volts()),
            vdd_v: T::lit(self.design.vdd),
            cl_ff: load_ff,
            delays,
            power_w,
            pdp_j: pdp(power_w, delays.worst()),
            area_nm: self.area(),
        })
    }
}

/// One-shot report of a design at one load.
pub fn bench<T: Scalar>(design: Design, model: &TimingModel<T>, load_ff: T) -> Result<BenchReport<T>, BenchError> {
    Bench::new(design)?.report(model, load_ff)
}

/// Least-squares line `y = slope·x + intercept` with its R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

pub fn linear_fit<T: Scalar>(xs: &[T], ys: &[T]) -> LinearFit<T> {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let n = T::lit(xs.len() as f64);
    let mean = |v: &[T]| v.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
        syy = syy + (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    // A flat response is fitted perfectly by a horizontal line.
    let r_squared = if syy > T::zero() {
        sxy * sxy / (sxx * syy)
    } else {
        T::one()
    };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep<T> {
    pub reports: Vec<BenchReport<T>>,
    /// One fit per delay column, in [`DELAY_COLUMNS`] order.
    pub fits: [LinearFit<T>; 4],
}

pub fn sweep_load<T: Scalar>(design: Design, model: &TimingModel<T>, loads_ff: &[T]) -> Result<Sweep<T>, BenchError> {
    let bench = Bench::new(design)?;
    let reports = loads_ff
        .par_iter()
        .map(|&cl| bench.report(model, cl))
        .collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<T> = reports.iter().map(|r| r.cl_ff).collect();
    let fits = std::array::from_fn(|i| {
        let ys: Vec<T> = reports.iter().map(|r| r.delays.as_array()[i]).collect();
        linear_fit(&xs, &ys)
    });
    Ok(Sweep { reports, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_line() {
        let xs = [0.0f64, 1.0, 2.0, 3.0];
        let ys = [1.0f64, 3.0, 5.0, 7.0];
        let f = linear_fit(&xs, &ys);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn staircase_shape() {
        assert_eq!(staircase(Radix::QUATERNARY), vec![0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(staircase(Radix::BINARY), vec![0, 1, 0]);
    }

    #[test]
    fn csv_header_and_row_widths_match() {
        let r = bench(
            Design::cell(AdderVariant::Bfa2, CarrySwing::Full, 0.9),
            &TimingModel::<f64>::default(),
            2.0,
        )
        .unwrap();
        assert!(r.is_finite_positive());
        let csv = to_csv(&[r]);
        let mut lines = csv.lines();
        let head = lines.next().unwrap();
        assert_eq!(head, CSV_HEADER);
        assert_eq!(lines.next().unwrap().split(',').count(), head.split(',').count());
    }

    #[test]
    fn design_labels() {
        assert_eq!(
            Design::cell(AdderVariant::Tfa2, CarrySwing::Reduced, 0.9).to_string(),
            "TFA2-reduced"
        );
        let d = Design::comparison()[1];
        assert_eq!(d.to_string(), "BFA1@0.45Vx6");
    }
}
