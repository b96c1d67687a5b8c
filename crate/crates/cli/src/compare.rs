//! CPA comparison: CSV rows, a markdown summary and plot data files.

use std::fmt::Write as _;

use mvl_core::analysis::{BenchReport, Design};
use mvl_core::logic::Radix;

pub struct Comparison {
    pub designs: Vec<Design>,
    pub reports: Vec<BenchReport<f64>>,
}

/// One pass/fail observation about the comparison.
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Comparison {
    fn by(&self, f: impl Fn(&Design) -> bool) -> Vec<&BenchReport<f64>> {
        self.designs
            .iter()
            .zip(&self.reports)
            .filter(|(d, _)| f(d))
            .map(|(_, r)| r)
            .collect()
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let binary = self.by(|d| d.radix() == Radix::BINARY && d.vdd == 0.9);
        let multi = self.by(|d| d.radix() != Radix::BINARY);
        if let Some(b) = binary.first() {
            let worst = multi.iter().map(|r| b.area_nm / r.area_nm).fold(0.0, f64::max);
            out.push(Check {
                name: "binary CPA area <= 0.65 x each multi-valued CPA".into(),
                passed: worst <= 0.65,
                detail: format!("largest ratio {worst:.3}"),
            });
        }
        if let Some(min) = self.reports.iter().min_by(|a, b| a.power_w.total_cmp(&b.power_w)) {
            let low = self.by(|d| d.radix() == Radix::BINARY && d.vdd < 0.9);
            out.push(Check {
                name: "lowest power is the 0.45 V binary CPA".into(),
                passed: low.iter().any(|r| r.design == min.design),
                detail: format!("minimum at {}", min.design),
            });
        }
        for radix in [Radix::TERNARY, Radix::QUATERNARY] {
            let full = self.by(|d| d.radix() == radix && d.carry_volts() >= d.vdd);
            let reduced = self.by(|d| d.radix() == radix && d.carry_volts() < d.vdd);
            if let (Some(f), Some(r)) = (full.first(), reduced.first()) {
                out.push(Check {
                    name: format!("radix {}: full-swing carry chain faster", radix.get()),
                    passed: f.delays.cin_cout < r.delays.cin_cout,
                    detail: format!(
                        "{:.1} ps vs {:.1} ps",
                        f.delays.cin_cout * 1e12,
                        r.delays.cin_cout * 1e12
                    ),
                });
            }
        }
        out
    }

    pub fn markdown(&self) -> String {
        let mut s = String::new();
        let cl = self.reports.first().map_or(0.0, |r| r.cl_ff);
        let _ = writeln!(s, "# CPA comparison at C_L = {cl} fF\n");
        let _ = writeln!(
            s,
            "Absolute delays and powers are calibrated-model values from a first-order RC surrogate, \
             not transistor-level measurements. Compare ratios and orderings only.\n"
        );
        let _ = writeln!(
            s,
            "| design | C0->Cout (ps) | C0->S (ps) | in->Cout (ps) | in->S (ps) | power (uW) | PDP (fJ) | area (nm) |"
        );
        let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|---:|---:|");
        for r in &self.reports {
            let d = &r.delays;
            let _ = writeln!(
                s,
                "| {} | {:.1} | {:.1} | {:.1} | {:.1} | {:.2} | {:.3} | {:.1} |",
                r.design,
                d.cin_cout * 1e12,
                d.cin_sum * 1e12,
                d.in_cout * 1e12,
                d.in_sum * 1e12,
                r.power_w * 1e6,
                r.pdp_j * 1e15,
                r.area_nm
            );
        }
        let _ = writeln!(s, "\n## Checks\n");
        for c in self.checks() {
            let mark = if c.passed { "pass" } else { "FAIL" };
            let _ = writeln!(s, "- [{mark}] {} ({})", c.name, c.detail);
        }
        s
    }

    /// `(file name, contents)` of whitespace-separated plot data, one per metric.
    pub fn plot_data(&self) -> Vec<(String, String)> {
        type Col = fn(&BenchReport<f64>) -> f64;
        let metrics: [(&str, &str, Col); 4] = [
            ("delay", "cin_cout_ps", |r| r.delays.cin_cout * 1e12),
            ("power", "power_uw", |r| r.power_w * 1e6),
            ("pdp", "pdp_fj", |r| r.pdp_j * 1e15),
            ("area", "area_nm", |r| r.area_nm),
        ];
        metrics
            .iter()
            .map(|(name, column, f)| {
                let mut s = format!("# index design {column}\n");
                for (i, r) in self.reports.iter().enumerate() {
                    let _ = writeln!(s, "{i} \"{}\" {:.6}", r.design, f(r));
                }
                (format!("{name}.dat"), s)
            })
            .collect()
    }
}
