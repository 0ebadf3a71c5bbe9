//! Husimi quasi-probability maps over the Bloch sphere.
//!
//! Q(theta, phi) is the squared overlap of the state with the coherent state
//! pointing along (theta, phi). Grids are max-normalized by default so the
//! peak reads 1; the (N+1)/(4 pi) quasi-probability scaling is available for
//! quantitative work. Rows are evaluated in parallel.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::echo::BipartiteState;
use crate::error::{Error, Result};
use crate::spin::{BlochDirection, CollectiveSpinState};

/// Normalization applied to a sampled grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QNormalization {
    /// Peak value scaled to 1 (default; matches colormap comparison).
    MaxOne,
    /// (N+1)/(4 pi) |<css|psi>|^2, the proper quasi-probability density.
    QuasiProbability,
}

/// Sampled Husimi distribution: theta uniform and inclusive over [0, pi],
/// phi uniform and half-open over [0, 2 pi).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HusimiGrid {
    theta_samples: Vec<f64>,
    phi_samples: Vec<f64>,
    /// Row-major n_theta x n_phi, all values >= 0.
    values: Vec<f64>,
}

impl HusimiGrid {
    pub fn theta_samples(&self) -> &[f64] {
        &self.theta_samples
    }

    pub fn phi_samples(&self) -> &[f64] {
        &self.phi_samples
    }

    pub fn n_theta(&self) -> usize {
        self.theta_samples.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi_samples.len()
    }

    pub fn value(&self, theta_index: usize, phi_index: usize) -> f64 {
        self.values[theta_index * self.phi_samples.len() + phi_index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the sampled theta closest to the equator.
    pub fn equator_row(&self) -> usize {
        (0..self.theta_samples.len())
            .min_by(|&a, &b| {
                (self.theta_samples[a] - PI / 2.0)
                    .abs()
                    .partial_cmp(&(self.theta_samples[b] - PI / 2.0).abs())
                    .unwrap()
            })
            .expect("grid has at least two rows")
    }

    /// CSV dump: header row of phi values, first column theta values, body Q
    /// to six significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "theta")?;
        for phi in &self.phi_samples {
            write!(out, ",{phi:.5e}")?;
        }
        writeln!(out)?;
        for (i, theta) in self.theta_samples.iter().enumerate() {
            write!(out, "{theta:.5e}")?;
            for j in 0..self.phi_samples.len() {
                write!(out, ",{:.5e}", self.value(i, j))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Samples Q for a single-group state.
pub fn husimi_grid(
    state: &CollectiveSpinState,
    n_theta: usize,
    n_phi: usize,
    normalization: QNormalization,
) -> Result<HusimiGrid> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::GridTooSmall { n_theta, n_phi });
    }
    if state.norm_sqr() == 0.0 {
        return Err(Error::ZeroNormState);
    }

    let theta_samples: Vec<f64> = (0..n_theta)
        .map(|i| PI * i as f64 / (n_theta - 1) as f64)
        .collect();
    let phi_samples: Vec<f64> = (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect();

    let values: Vec<f64> = theta_samples
        .par_iter()
        .flat_map_iter(|&theta| {
            let row = sample_row(state, theta, &phi_samples);
            row.into_iter()
        })
        .collect();

    let scale = match normalization {
        QNormalization::MaxOne => {
            let max = values.iter().copied().fold(0.0, f64::max);
            if max == 0.0 {
                1.0
            } else {
                1.0 / max
            }
        }
        QNormalization::QuasiProbability => (state.atom_count() as f64 + 1.0) / (4.0 * PI),
    };
    let values = values.into_iter().map(|v| v * scale).collect();

    Ok(HusimiGrid {
        theta_samples,
        phi_samples,
        values,
    })
}

/// Q of the renormalized conditional target state for one control row of a
/// bipartite state.
pub fn husimi_grid_conditional(
    state: &BipartiteState,
    control_row: usize,
    n_theta: usize,
    n_phi: usize,
    normalization: QNormalization,
) -> Result<HusimiGrid> {
    let (_, conditional) = state.conditional_target(control_row)?;
    let conditional = conditional.ok_or(Error::ZeroNormState)?;
    husimi_grid(&conditional, n_theta, n_phi, normalization)
}

/// |<css(theta, phi)|psi>|^2 along one theta row. The coherent-state overlap
/// is evaluated as sum_k b_k cos^k sin^(N-k) psi_k e^(-i phi (N-k)).
fn sample_row(state: &CollectiveSpinState, theta: f64, phi_samples: &[f64]) -> Vec<f64> {
    let n = state.atom_count();
    let cos_half = (theta / 2.0).cos();
    let sin_half = (theta / 2.0).sin();
    let weighted: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let envelope = crate::spin::binomial(n, k).sqrt()
                * cos_half.powi(k as i32)
                * pow_f64(sin_half, n - k);
            c * envelope
        })
        .collect();
    phi_samples
        .iter()
        .map(|&phi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in weighted.iter().enumerate() {
                let downs = (n - k) as f64;
                acc += w * Complex64::cis(-phi * downs);
            }
            acc.norm_sqr()
        })
        .collect()
}

fn pow_f64(base: f64, exp: usize) -> f64 {
    // keep 0^0 = 1 exact at the poles
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// 1/e^2 footprint of a coherent state: the overlap law cos^(2N)(gamma/2)
/// falls to e^-2 at gamma = 2 arccos(e^(-1/N)).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerimeterCircle {
    pub center: BlochDirection,
    pub angular_radius: f64,
}

pub fn css_perimeter(atom_count: usize, center: BlochDirection) -> PerimeterCircle {
    assert!(atom_count >= 1, "perimeter undefined for an empty group");
    let angular_radius = 2.0 * (-1.0 / atom_count as f64).exp().acos();
    PerimeterCircle {
        center,
        angular_radius,
    }
}

/// Cyclic strict local maxima of Q along the equator row, above a floor of
/// 1% of the global grid maximum; returns the phi values. The floor keeps
/// numerical ripple out of the count.
pub fn equatorial_maxima(grid: &HusimiGrid) -> Vec<f64> {
    let row = grid.equator_row();
    let n_phi = grid.n_phi();
    let floor = 0.01 * grid.max_value();
    let mut maxima = Vec::new();
    for j in 0..n_phi {
        let v = grid.value(row, j);
        let left = grid.value(row, (j + n_phi - 1) % n_phi);
        let right = grid.value(row, (j + 1) % n_phi);
        if v > left && v > right && v >= floor {
            maxima.push(grid.phi_samples()[j]);
        }
    }
    maxima
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{build_decomposition, css_components};
    use crate::echo::{apply_oats, SqueezingSpec};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn coherent_state_peaks_at_its_direction() {
        let dir = BlochDirection::new(1.0, 2.0).unwrap();
        let state = CollectiveSpinState::coherent(20, dir);
        let grid = husimi_grid(&state, 91, 180, QNormalization::MaxOne).unwrap();
        let mut best = (0, 0);
        let mut best_v = -1.0;
        for i in 0..grid.n_theta() {
            for j in 0..grid.n_phi() {
                if grid.value(i, j) > best_v {
                    best_v = grid.value(i, j);
                    best = (i, j);
                }
            }
        }
        assert!((best_v - 1.0).abs() < 1e-12);
        assert!((grid.theta_samples()[best.0] - dir.theta()).abs() < PI / 90.0);
        assert!((grid.phi_samples()[best.1] - dir.phi()).abs() < TAU / 180.0);

        // antipode is exponentially suppressed
        let anti_theta = PI - dir.theta();
        let anti_phi = (dir.phi() + PI).rem_euclid(TAU);
        let i = (anti_theta / PI * 90.0).round() as usize;
        let j = (anti_phi / TAU * 180.0).round() as usize % 180;
        assert!(grid.value(i, j) < 1e-10);
    }

    #[test]
    fn polar_cat_peaks_at_both_poles() {
        let state = CollectiveSpinState::polar_cat(14);
        let grid = husimi_grid(&state, 91, 120, QNormalization::MaxOne).unwrap();
        let top: f64 = (0..grid.n_phi()).map(|j| grid.value(0, j)).fold(0.0, f64::max);
        let bottom: f64 = (0..grid.n_phi())
            .map(|j| grid.value(grid.n_theta() - 1, j))
            .fold(0.0, f64::max);
        assert!((top - 1.0).abs() < 1e-12);
        assert!((bottom - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quasi_probability_scaling() {
        // for a CSS the quasi-probability peak is (N+1)/(4 pi)
        let n = 10;
        let dir = BlochDirection::new(0.0, 0.0).unwrap();
        let state = CollectiveSpinState::coherent(n, dir);
        let grid = husimi_grid(&state, 5, 4, QNormalization::QuasiProbability).unwrap();
        let expected = (n as f64 + 1.0) / (4.0 * PI);
        assert!((grid.value(0, 0) - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_state_is_rejected() {
        let zero =
            CollectiveSpinState::from_amplitudes_unnormalized(3, vec![Complex64::new(0.0, 0.0); 4])
                .unwrap();
        assert!(matches!(
            husimi_grid(&zero, 10, 10, QNormalization::MaxOne),
            Err(Error::ZeroNormState)
        ));
        assert!(matches!(
            husimi_grid(&CollectiveSpinState::all_up(2), 1, 10, QNormalization::MaxOne),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn perimeter_radius_solves_the_overlap_equation() {
        let circle = css_perimeter(40, BlochDirection::new(PI / 2.0, 0.0).unwrap());
        // bisection on cos^(2N)(g/2) = e^-2, independent of the arccos form
        let f = |g: f64| (g / 2.0).cos().powi(80) - (-2.0_f64).exp();
        let (mut lo, mut hi) = (0.0_f64, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((circle.angular_radius - lo).abs() < 1e-12);
        // large-N footprint shrinks like 1/sqrt(N): doubling N four-fold
        // halves the radius approximately
        let wide = css_perimeter(40, circle.center).angular_radius;
        let narrow = css_perimeter(160, circle.center).angular_radius;
        assert!((wide / narrow - 2.0).abs() < 0.02);
        // N = 1 endpoint is the widest circle
        let widest = css_perimeter(1, circle.center).angular_radius;
        assert!((widest - 2.0 * (-1.0_f64).exp().acos()).abs() < 1e-15);
        assert!(widest > wide);
    }

    #[test]
    fn equator_maxima_of_a_two_component_cat() {
        // (|+x> + |-x>)/sqrt(2): peaks at phi = 0 and pi
        let n = 20;
        let a = CollectiveSpinState::coherent(n, BlochDirection::new(PI / 2.0, 0.0).unwrap());
        let b = CollectiveSpinState::coherent(n, BlochDirection::new(PI / 2.0, PI).unwrap());
        let amplitudes = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x + y).scale(FRAC_1_SQRT_2))
            .collect();
        let cat = CollectiveSpinState::from_amplitudes(n, amplitudes).unwrap();
        let grid = husimi_grid(&cat, 181, 360, QNormalization::MaxOne).unwrap();
        let maxima = equatorial_maxima(&grid);
        assert_eq!(maxima.len(), 2);
        let step = TAU / 360.0;
        assert!(maxima[0].min((maxima[0] - TAU).abs()) <= step);
        assert!((maxima[1] - PI).abs() <= step);
    }

    #[test]
    fn squeezed_css_shows_three_components_for_order_three() {
        let n = 41;
        let source = BlochDirection::new(PI / 2.0, 0.0).unwrap();
        let squeezed = apply_oats(
            &CollectiveSpinState::coherent(n, source),
            &SqueezingSpec::squeeze(PI / 3.0),
        );
        let grid = husimi_grid(&squeezed, 181, 360, QNormalization::MaxOne).unwrap();
        let maxima = equatorial_maxima(&grid);
        assert_eq!(maxima.len(), 3);

        let d = build_decomposition(3, n);
        let comps = css_components(&squeezed, &d, source).unwrap();
        let step = TAU / 360.0;
        for peak in &maxima {
            let closest = comps
                .iter()
                .map(|c| {
                    let diff = (peak - c.direction.phi()).rem_euclid(TAU);
                    diff.min(TAU - diff)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(closest <= step, "peak {peak} off by {closest}");
        }
        // adjacent spacing approximately 2 pi / 3
        let mut sorted = maxima.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            assert!((w[1] - w[0] - TAU / 3.0).abs() <= 2.0 * step);
        }
    }

    #[test]
    fn maxima_count_matches_order_when_components_resolve() {
        // whenever adjacent components sit further apart than two 1/e^2
        // radii, the equator shows exactly n antinodes
        let source = BlochDirection::new(PI / 2.0, 0.0).unwrap();
        let mut asserted = 0;
        for n_atoms in [20usize, 31] {
            let radius = css_perimeter(n_atoms, source).angular_radius;
            for order in 2u32..=6 {
                let spacing = TAU / order as f64;
                if spacing <= 2.0 * radius {
                    continue; // merged footprints, no count claim
                }
                let squeezed = apply_oats(
                    &CollectiveSpinState::coherent(n_atoms, source),
                    &SqueezingSpec::squeeze(PI / order as f64),
                );
                let grid = husimi_grid(&squeezed, 91, 180, QNormalization::MaxOne).unwrap();
                let maxima = equatorial_maxima(&grid);
                assert_eq!(
                    maxima.len(),
                    order as usize,
                    "N {n_atoms}, order {order}: maxima at {maxima:?}"
                );
                asserted += 1;
            }
        }
        assert!(asserted >= 6, "sweep must exercise resolvable cases");
    }

    #[test]
    fn grid_csv_has_header_and_rows() {
        let state = CollectiveSpinState::all_up(2);
        let grid = husimi_grid(&state, 3, 4, QNormalization::MaxOne).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("theta,"));
        assert_eq!(lines[0].split(',').count(), 5);
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
