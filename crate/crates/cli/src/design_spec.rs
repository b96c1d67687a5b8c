//! `variant[,swing=reduced|full][,vdd=0.9|0.45][,digits=N]`

use std::str::FromStr;

use mvl_core::adders::AdderVariant;
use mvl_core::analysis::Design;
use mvl_core::gates::VDD;
use mvl_core::logic::CarrySwing;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec(pub Design);

impl FromStr for DesignSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(',').map(str::trim);
        let variant: AdderVariant = parts
            .next()
            .filter(|v| !v.is_empty())
            .ok_or("empty design spec")?
            .parse()
            .map_err(|e: mvl_core::adders::AdderError| e.to_string())?;
        let mut design = Design::cell(variant, variant.default_swing(), VDD);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            match key {
                "swing" => {
                    design.swing = match value {
                        "reduced" => CarrySwing::Reduced,
                        "full" => CarrySwing::Full,
                        _ => return Err(format!("swing must be reduced or full, got `{value}`")),
                    }
                }
                "vdd" => {
                    design.vdd = value.parse().map_err(|_| format!("bad vdd `{value}`"))?;
                }
                "digits" => {
                    design.digits = value
                        .parse()
                        .ok()
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| format!("digits must be a positive integer, got `{value}`"))?;
                }
                _ => return Err(format!("unknown design option `{key}`")),
            }
        }
        variant.check(design.swing, design.vdd).map_err(|e| e.to_string())?;
        Ok(DesignSpec(design))
    }
}
