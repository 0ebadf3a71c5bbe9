//! Squeezing-parameter argument with an exact-pi grammar.
//!
//! "pi/2", "2pi/5", "-pi/3" and plain "pi" are stored as integer rationals of
//! pi so that mu = pi/n detection is exact; anything else is decimal radians.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuArg {
    PiRational { num: i64, den: i64 },
    Radians(f64),
}

impl MuArg {
    pub fn radians(&self) -> f64 {
        match self {
            MuArg::PiRational { num, den } => PI * *num as f64 / *den as f64,
            MuArg::Radians(r) => *r,
        }
    }

    /// Returns n when the value is exactly pi/n with integer n >= 1.
    pub fn exact_pi_over(&self) -> Option<u32> {
        match self {
            MuArg::PiRational { num: 1, den } if *den >= 1 => Some(*den as u32),
            _ => None,
        }
    }

    pub fn parse_cli(text: &str) -> Result<Self, String> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = s.to_ascii_lowercase();
        if let Some(pi_at) = lower.find("pi") {
            let (coef_text, rest) = lower.split_at(pi_at);
            let rest = &rest[2..];
            let num: i64 = match coef_text {
                "" | "+" => 1,
                "-" => -1,
                c => c
                    .parse()
                    .map_err(|_| format!("bad pi coefficient in '{text}'"))?,
            };
            let den: i64 = if rest.is_empty() {
                1
            } else if let Some(d) = rest.strip_prefix('/') {
                let den = d
                    .parse()
                    .map_err(|_| format!("bad pi denominator in '{text}'"))?;
                if den <= 0 {
                    return Err(format!("pi denominator must be positive in '{text}'"));
                }
                den
            } else {
                return Err(format!("cannot parse '{text}' as a multiple of pi"));
            };
            Ok(MuArg::PiRational { num, den })
        } else {
            lower
                .parse::<f64>()
                .map(MuArg::Radians)
                .map_err(|_| format!("cannot parse '{text}' as radians or a multiple of pi"))
        }
    }
}

/// Parses a spin projection given as "3/2", "-1/2", "+2" or "0" into twice
/// its value.
pub fn parse_two_m(text: &str) -> Result<i64, String> {
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        if den.trim() != "2" {
            return Err(format!("projection '{text}' must be an integer or a half"));
        }
        num.trim()
            .parse()
            .map_err(|_| format!("bad projection '{text}'"))
    } else {
        s.parse::<i64>()
            .map(|m| 2 * m)
            .map_err(|_| format!("bad projection '{text}'"))
    }
}
