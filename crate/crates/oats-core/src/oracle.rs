//! Brute-force product-space simulator for small systems.
//!
//! States live in the full 2^(N'+N) space with one bit per atom (bit set =
//! up); the control group occupies the low bits. Squeezing acts as diagonal
//! phases on total bit sums and collective pulses as identical single-atom
//! rotations, so every step is simple enough to audit by eye. Projecting the
//! result onto the symmetric subspace of each group reproduces the Dicke
//! engine and measures any leakage out of the symmetric sector (which must
//! vanish: all operations commute with intra-group permutations).
//!
//! Single-threaded; capped at 14 atoms total.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::echo::BipartiteState;
use crate::error::{Error, Result};
use crate::protocols::{cat_fidelity_phase_max, OutcomeLabel};
use crate::spin::{binomial, Axis, CollectiveSpinState};

/// Hard cap keeping the oracle exhaustive and fast.
pub const ORACLE_ATOM_CAP: usize = 14;

/// Initial state of one atom group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupInit {
    AllUp,
    /// (|all up> + |all down>)/sqrt(2).
    PolarCat,
    Coherent { theta: f64, phi: f64 },
}

/// Full product-space state of the control and target groups.
#[derive(Debug, Clone)]
pub struct ProductState {
    control_count: usize,
    target_count: usize,
    amplitudes: Vec<Complex64>,
}

impl ProductState {
    pub fn new(
        control_count: usize,
        target_count: usize,
        control: GroupInit,
        target: GroupInit,
    ) -> Result<Self> {
        let total = control_count + target_count;
        if total > ORACLE_ATOM_CAP {
            return Err(Error::OracleSizeCap {
                total,
                cap: ORACLE_ATOM_CAP,
            });
        }
        let control_amps = group_amplitudes(control_count, control);
        let target_amps = group_amplitudes(target_count, target);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << total];
        for (index, amp) in amplitudes.iter_mut().enumerate() {
            let c_bits = index & ((1 << control_count) - 1);
            let t_bits = index >> control_count;
            *amp = control_amps[c_bits] * target_amps[t_bits];
        }
        Ok(Self {
            control_count,
            target_count,
            amplitudes,
        })
    }

    pub fn total_atoms(&self) -> usize {
        self.control_count + self.target_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    fn control_m(&self, index: usize) -> f64 {
        let ones = (index & ((1 << self.control_count) - 1)).count_ones() as f64;
        ones - self.control_count as f64 / 2.0
    }

    fn target_m(&self, index: usize) -> f64 {
        let ones = (index >> self.control_count).count_ones() as f64;
        ones - self.target_count as f64 / 2.0
    }

    /// exp(-i mu (S_z + S~_z)^2) as diagonal phases over total bit sums.
    pub fn apply_joint_oats(&mut self, mu: f64) {
        let half_total = self.total_atoms() as f64 / 2.0;
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            let total = index.count_ones() as f64 - half_total;
            *amp *= Complex64::cis(-mu * total * total);
        }
    }

    /// exp(+/- i mu S_z^2) on the target bits only; `mu` carries the sign.
    pub fn apply_target_oats(&mut self, mu: f64) {
        let control_count = self.control_count;
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            let ones = (index >> control_count).count_ones() as f64;
            let m = ones - self.target_count as f64 / 2.0;
            *amp *= Complex64::cis(-mu * m * m);
        }
    }

    /// Identical exp(-i angle s_axis) on every target atom.
    pub fn rotate_target(&mut self, axis: Axis, angle: f64) {
        for atom in self.control_count..self.total_atoms() {
            self.apply_single_atom(atom, &single_atom_rotation(axis, angle));
        }
    }

    /// Identical exp(-i angle s_axis) on every control atom.
    pub fn rotate_control(&mut self, axis: Axis, angle: f64) {
        for atom in 0..self.control_count {
            self.apply_single_atom(atom, &single_atom_rotation(axis, angle));
        }
    }

    /// exp(-i angle s_x) on the single control atom.
    pub fn control_x_pulse(&mut self, angle: f64) -> Result<()> {
        if self.control_count != 1 {
            return Err(Error::ControlCountNotOne {
                control_count: self.control_count,
            });
        }
        self.apply_single_atom(0, &single_atom_rotation(Axis::X, angle));
        Ok(())
    }

    /// u indexed [new][old] in the (down, up) basis.
    fn apply_single_atom(&mut self, atom: usize, u: &[[Complex64; 2]; 2]) {
        let mask = 1usize << atom;
        for index in 0..self.amplitudes.len() {
            if index & mask != 0 {
                continue;
            }
            let low = self.amplitudes[index];
            let high = self.amplitudes[index | mask];
            self.amplitudes[index] = u[0][0] * low + u[0][1] * high;
            self.amplitudes[index | mask] = u[1][0] * low + u[1][1] * high;
        }
    }

    /// Projects the single control atom; returns both outcome branches with
    /// the target kept in the product space.
    pub fn measure_control(&self) -> Result<Vec<(OutcomeLabel, f64, ProductState)>> {
        if self.control_count != 1 {
            return Err(Error::ControlCountNotOne {
                control_count: self.control_count,
            });
        }
        let mut branches = Vec::with_capacity(2);
        for (label, bit) in [(OutcomeLabel::Up, 1usize), (OutcomeLabel::Down, 0usize)] {
            let mut probability = 0.0;
            let mut target_amps = vec![Complex64::new(0.0, 0.0); 1 << self.target_count];
            for (t, slot) in target_amps.iter_mut().enumerate() {
                let amp = self.amplitudes[(t << 1) | bit];
                probability += amp.norm_sqr();
                *slot = amp;
            }
            if probability > 0.0 {
                let scale = probability.sqrt();
                for a in &mut target_amps {
                    *a /= scale;
                }
            }
            branches.push((
                label,
                probability,
                ProductState {
                    control_count: 0,
                    target_count: self.target_count,
                    amplitudes: target_amps,
                },
            ));
        }
        Ok(branches)
    }

    /// Projection onto the symmetric subspace of each group, plus the weight
    /// left outside it.
    pub fn project_symmetric(&self) -> (BipartiteState, f64) {
        let cd = self.control_count + 1;
        let td = self.target_count + 1;
        let mut sums = vec![Complex64::new(0.0, 0.0); cd * td];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            let kc = (index & ((1 << self.control_count) - 1)).count_ones() as usize;
            let kt = (index >> self.control_count).count_ones() as usize;
            sums[kc * td + kt] += amp;
        }
        let mut projected = vec![Complex64::new(0.0, 0.0); cd * td];
        let mut captured = 0.0;
        for kc in 0..cd {
            for kt in 0..td {
                let weight = binomial(self.control_count, kc) * binomial(self.target_count, kt);
                let coefficient = sums[kc * td + kt] / weight.sqrt();
                captured += coefficient.norm_sqr();
                projected[kc * td + kt] = coefficient;
            }
        }
        let leakage = self.norm_sqr() - captured;
        let state = BipartiteState::from_amplitudes(self.control_count, self.target_count, projected)
            .expect("projection dimensions match");
        (state, leakage)
    }

    /// Symmetric-subspace projection of a target-only state (after a control
    /// measurement).
    pub fn project_symmetric_target(&self) -> (CollectiveSpinState, f64) {
        assert_eq!(self.control_count, 0, "target-only projection");
        let (bipartite, leakage) = self.project_symmetric();
        let amplitudes = bipartite.amplitudes().to_vec();
        let state = CollectiveSpinState::from_amplitudes_unnormalized(self.target_count, amplitudes)
            .expect("dimension matches");
        (state, leakage)
    }

    pub fn expect_target_sz(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(index, a)| a.norm_sqr() * self.target_m(index))
            .sum()
    }

    pub fn expect_target_sz_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(index, a)| {
                let m = self.target_m(index);
                a.norm_sqr() * m * m
            })
            .sum()
    }

    pub fn expect_control_sz(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(index, a)| a.norm_sqr() * self.control_m(index))
            .sum()
    }
}

fn group_amplitudes(count: usize, init: GroupInit) -> Vec<Complex64> {
    let dim = 1usize << count;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    match init {
        GroupInit::AllUp => {
            amps[dim - 1] = Complex64::new(1.0, 0.0);
        }
        GroupInit::PolarCat => {
            let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[0] = w;
            amps[dim - 1] = w;
        }
        GroupInit::Coherent { theta, phi } => {
            let up = Complex64::new((theta / 2.0).cos(), 0.0);
            let down = Complex64::cis(phi) * (theta / 2.0).sin();
            for (bits, slot) in amps.iter_mut().enumerate() {
                let mut acc = Complex64::new(1.0, 0.0);
                for atom in 0..count {
                    acc *= if bits & (1 << atom) != 0 { up } else { down };
                }
                *slot = acc;
            }
        }
    }
    amps
}

fn single_atom_rotation(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((angle / 2.0).cos(), 0.0);
    let s = (angle / 2.0).sin();
    let minus_i_s = Complex64::new(0.0, -s);
    let zero = Complex64::new(0.0, 0.0);
    // (down, up) basis
    match axis {
        Axis::X => [[c, minus_i_s], [minus_i_s, c]],
        Axis::Y => [[c, Complex64::new(s, 0.0)], [Complex64::new(-s, 0.0), c]],
        Axis::Z => [
            [Complex64::cis(angle / 2.0), zero],
            [zero, Complex64::cis(-angle / 2.0)],
        ],
    }
}

/// Protocol replicated by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OracleProtocol {
    /// Control polar cat, target coherent on +x, joint squeeze then target
    /// unsqueeze.
    Echo,
    /// Full deterministic-cat sequence.
    EntangledCat,
    /// Full transfer sequence with both measurement branches (one control
    /// atom).
    TransferCat,
}

/// Measurement branch data from a transfer run.
#[derive(Debug, Clone)]
pub struct OracleBranch {
    pub label: OutcomeLabel,
    pub probability: f64,
    pub cat_fidelity: f64,
    pub target: CollectiveSpinState,
    pub target_leakage: f64,
}

/// Outcome of an oracle run: the symmetric-subspace projection with leakage,
/// plus simple observables of the pre-measurement state.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub projected: BipartiteState,
    pub leakage: f64,
    pub target_sz: f64,
    pub target_sz_sq: f64,
    pub control_sz: f64,
    pub branches: Vec<OracleBranch>,
}

/// Runs a protocol in the product space and projects the result.
pub fn oracle_run(
    protocol: OracleProtocol,
    target_count: usize,
    control_count: usize,
    mu: f64,
) -> Result<OracleRun> {
    let state = match protocol {
        OracleProtocol::Echo => {
            let mut s = ProductState::new(
                control_count,
                target_count,
                GroupInit::PolarCat,
                GroupInit::Coherent {
                    theta: std::f64::consts::FRAC_PI_2,
                    phi: 0.0,
                },
            )?;
            s.apply_joint_oats(mu);
            s.apply_target_oats(-mu);
            s
        }
        OracleProtocol::EntangledCat => {
            let mut s = ProductState::new(
                control_count,
                target_count,
                GroupInit::PolarCat,
                GroupInit::AllUp,
            )?;
            s.rotate_target(Axis::Y, std::f64::consts::FRAC_PI_2);
            s.apply_joint_oats(mu);
            s.apply_target_oats(-mu);
            s.rotate_target(Axis::X, std::f64::consts::FRAC_PI_2);
            s
        }
        OracleProtocol::TransferCat => {
            let mut s = ProductState::new(
                control_count,
                target_count,
                GroupInit::PolarCat,
                GroupInit::Coherent {
                    theta: std::f64::consts::FRAC_PI_2,
                    phi: 0.0,
                },
            )?;
            s.apply_joint_oats(mu);
            s.apply_target_oats(-mu);
            s.control_x_pulse(std::f64::consts::FRAC_PI_2)?;
            s
        }
    };

    let (projected, leakage) = state.project_symmetric();
    let mut run = OracleRun {
        projected,
        leakage,
        target_sz: state.expect_target_sz(),
        target_sz_sq: state.expect_target_sz_sq(),
        control_sz: state.expect_control_sz(),
        branches: Vec::new(),
    };

    if protocol == OracleProtocol::TransferCat {
        for (label, probability, mut branch) in state.measure_control()? {
            let correction = match label {
                OutcomeLabel::Up => std::f64::consts::FRAC_PI_2,
                OutcomeLabel::Down => -std::f64::consts::FRAC_PI_2,
            };
            branch.rotate_target(Axis::X, correction);
            let (target, target_leakage) = branch.project_symmetric_target();
            let cat_fidelity = cat_fidelity_phase_max(&target);
            run.branches.push(OracleBranch {
                label,
                probability,
                cat_fidelity,
                target,
                target_leakage,
            });
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::echo_protocol;
    use crate::protocols::transfer_cat;
    use crate::spin::BlochDirection;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn size_cap_is_enforced() {
        assert!(matches!(
            ProductState::new(3, 12, GroupInit::AllUp, GroupInit::AllUp),
            Err(Error::OracleSizeCap { .. })
        ));
    }

    #[test]
    fn zero_twist_leaves_the_product_state() {
        let mut s = ProductState::new(
            1,
            3,
            GroupInit::PolarCat,
            GroupInit::Coherent {
                theta: 1.0,
                phi: 0.4,
            },
        )
        .unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_joint_oats(0.0);
        s.apply_target_oats(0.0);
        assert!(max_dev(&before, s.amplitudes()) == 0.0);
    }

    #[test]
    fn echo_projection_matches_engine() {
        let (n, nc, mu) = (4usize, 1usize, FRAC_PI_2);
        let run = oracle_run(OracleProtocol::Echo, n, nc, mu).unwrap();
        assert!(run.leakage.abs() < 1e-12, "leakage {}", run.leakage);

        let control = CollectiveSpinState::polar_cat(nc);
        let target =
            CollectiveSpinState::coherent(n, BlochDirection::new(FRAC_PI_2, 0.0).unwrap());
        let engine = echo_protocol(&control, &target, mu);
        let dev = max_dev(run.projected.amplitudes(), engine.amplitudes());
        assert!(dev < 1e-10, "deviation {dev}");

        // observables agree too
        let mut engine_sz = 0.0;
        for row in 0..engine.control_dim() {
            for col in 0..engine.target_dim() {
                let m = (2 * col as i64 - n as i64) as f64 / 2.0;
                engine_sz += engine.amp(row, col).norm_sqr() * m;
            }
        }
        assert!((engine_sz - run.target_sz).abs() < 1e-10);
    }

    #[test]
    fn transfer_branches_match_engine() {
        let n = 3;
        let run = oracle_run(OracleProtocol::TransferCat, n, 1, FRAC_PI_2).unwrap();
        let engine = transfer_cat(n);
        for branch in &run.branches {
            assert!(branch.target_leakage.abs() < 1e-12);
            let engine_report = match branch.label {
                OutcomeLabel::Up => &engine.up,
                OutcomeLabel::Down => &engine.down,
            };
            let label = branch.label.as_str();
            assert!((branch.probability - engine_report.branch_weights[label]).abs() < 1e-10);
            assert!(
                (branch.cat_fidelity - engine_report.conditional_fidelities[label]).abs() < 1e-10
            );
        }
    }

    #[test]
    fn rotation_matches_collective_rotation() {
        // per-atom pulses reproduce the Dicke-space rotation of a CSS
        let mut s = ProductState::new(0, 5, GroupInit::AllUp, GroupInit::AllUp).unwrap();
        s.rotate_target(Axis::Y, 1.1);
        let (projected, leakage) = s.project_symmetric_target();
        assert!(leakage.abs() < 1e-12);
        let engine = crate::spin::rotate(
            &CollectiveSpinState::all_up(5),
            &crate::spin::RotationSpec::new(Axis::Y, 1.1),
        );
        let dev = max_dev(projected.amplitudes(), engine.amplitudes());
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn squeezed_state_stays_symmetric() {
        let mut s = ProductState::new(
            2,
            4,
            GroupInit::PolarCat,
            GroupInit::Coherent {
                theta: FRAC_PI_2,
                phi: 0.0,
            },
        )
        .unwrap();
        s.apply_joint_oats(PI / 3.0);
        let (_, leakage) = s.project_symmetric();
        assert!(leakage.abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_pipeline_stage_is_leakage_free() {
        // all operations commute with permutations within a group, so the
        // weight outside the symmetric sector must stay zero stage by stage
        let mut s = ProductState::new(1, 5, GroupInit::PolarCat, GroupInit::AllUp).unwrap();
        let check = |s: &ProductState, stage: &str| {
            let (_, leakage) = s.project_symmetric();
            assert!(leakage.abs() < 1e-12, "{stage}: leakage {leakage}");
        };
        check(&s, "initial");
        s.rotate_target(Axis::Y, FRAC_PI_2);
        check(&s, "target preparation");
        s.apply_joint_oats(FRAC_PI_2);
        check(&s, "joint squeeze");
        s.apply_target_oats(-FRAC_PI_2);
        check(&s, "target unsqueeze");
        s.control_x_pulse(FRAC_PI_2).unwrap();
        check(&s, "control pulse");
        s.rotate_target(Axis::X, FRAC_PI_2);
        check(&s, "final pulse");
    }
}
