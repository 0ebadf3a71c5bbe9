//! End-to-end cat-state procedures built on the echo.
//!
//! `entangled_cat` steers a large target group with a small control register:
//! with mu N' = pi/2 the run ends in an equal superposition of
//! |control up> (x) |all up> and |control down> (x) |all down>, for either
//! parity of the target atom number.
//!
//! `transfer_cat` moves the superposition of a single control atom onto the
//! target group: after the echo, a pi/2 pulse on the control alone, a
//! detection of the control, and one conditioned corrective pulse on the
//! target, both measurement outcomes leave the target in the polar cat state
//! disentangled from the control.
//!
//! Every pulse is exp(-i angle S_axis); a "-pi/2 pulse" is angle = -pi/2.
//! Reported "equal superposition" claims are scored on branch weights and
//! conditional directions; deterministic branch phases (which depend on the
//! atom number) are kept in the states but maximized over when a cat fidelity
//! is quoted.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::echo::{echo_protocol, BipartiteState};
use crate::error::{Error, Result};
use crate::spin::{inner, rotate, Axis, CollectiveSpinState, RotationSpec};

/// Measurement label for a single control atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeLabel {
    Up,
    Down,
}

impl OutcomeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeLabel::Up => "up",
            OutcomeLabel::Down => "down",
        }
    }
}

/// One branch of a projective control measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub label: OutcomeLabel,
    pub probability: f64,
    /// Renormalized target state; left as the raw (zero) row when the
    /// probability vanishes.
    pub post_state: CollectiveSpinState,
}

/// Final joint or single-group state carried by a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FinalState {
    Bipartite(BipartiteState),
    Collective(CollectiveSpinState),
}

/// Parity cross-check: the same protocol run at N and N+1 target atoms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParityCheck {
    pub atom_counts: [usize; 2],
    /// Outcome -> ideal-pole pairing observed at each atom count.
    pub pairings: [BTreeMap<String, String>; 2],
    pub pairing_identical: bool,
    pub max_fidelity_gap: f64,
}

/// Weights, fidelities and pairing produced by a protocol run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolReport {
    /// Control outcome -> probability.
    pub branch_weights: BTreeMap<String, f64>,
    /// Control outcome -> squared overlap of the conditional target with its
    /// ideal state.
    pub conditional_fidelities: BTreeMap<String, f64>,
    /// Control outcome -> "up"/"down" pole the conditional target matches.
    pub pairing: BTreeMap<String, String>,
    pub parity_checked: Option<ParityCheck>,
    pub final_state: FinalState,
}

impl ProtocolReport {
    /// Sum of reported branch probabilities (1 within 1e-10 by contract).
    pub fn total_weight(&self) -> f64 {
        self.branch_weights.values().sum()
    }
}

/// Renders 2m as a human-readable projection label ("+3/2", "-1", "0").
pub fn projection_label(two_m: i64) -> String {
    let sign = if two_m > 0 { "+" } else { "" };
    if two_m % 2 == 0 {
        format!("{sign}{}", two_m / 2)
    } else {
        format!("{sign}{two_m}/2")
    }
}

/// Squared overlap with the polar cat maximized over the relative phase of
/// the two poles: (|c_bottom| + |c_top|)^2 / 2.
pub fn cat_fidelity_phase_max(state: &CollectiveSpinState) -> f64 {
    let amplitudes = state.amplitudes();
    let bottom = amplitudes[0].norm();
    let top = amplitudes[amplitudes.len() - 1].norm();
    (bottom + top).powi(2) / 2.0
}

/// Applies exp(-i angle s_x) to the control factor; defined for a single
/// control atom only.
pub fn control_x_pulse(state: &BipartiteState, angle: f64) -> Result<BipartiteState> {
    if state.control_count() != 1 {
        return Err(Error::ControlCountNotOne {
            control_count: state.control_count(),
        });
    }
    let half = angle / 2.0;
    let cos = Complex64::new(half.cos(), 0.0);
    let minus_i_sin = Complex64::new(0.0, -half.sin());
    let td = state.target_dim();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * td];
    for col in 0..td {
        let down = state.amp(0, col);
        let up = state.amp(1, col);
        amplitudes[col] = cos * down + minus_i_sin * up;
        amplitudes[td + col] = minus_i_sin * down + cos * up;
    }
    BipartiteState::from_amplitudes(1, state.target_count(), amplitudes)
}

/// Projects a single control atom onto up/down; returns both branches with
/// Born probabilities and renormalized target states.
pub fn measure_control(state: &BipartiteState) -> Result<Vec<MeasurementOutcome>> {
    if state.control_count() != 1 {
        return Err(Error::ControlCountNotOne {
            control_count: state.control_count(),
        });
    }
    let mut outcomes = Vec::with_capacity(2);
    for (label, row) in [(OutcomeLabel::Up, 1usize), (OutcomeLabel::Down, 0usize)] {
        let (probability, conditional) = state.conditional_target(row)?;
        let post_state = match conditional {
            Some(s) => s,
            None => CollectiveSpinState::from_amplitudes_unnormalized(
                state.target_count(),
                vec![Complex64::new(0.0, 0.0); state.target_dim()],
            )?,
        };
        outcomes.push(MeasurementOutcome {
            label,
            probability,
            post_state,
        });
    }
    Ok(outcomes)
}

/// Deterministic entangled-cat run.
///
/// The control register starts in (|+N'/2> + |-N'/2>)/sqrt(2) (its
/// preparation is outside this crate), the target all up. Steps: pi/2 target
/// pulse around y, the two-step echo with `mu`, then a pi/2 target pulse
/// around x. For mu N' = pi/2 the +N'/2 outcome pairs with the all-up target
/// and -N'/2 with all-down, with weights 1/2 and unit fidelity, independent
/// of the target parity.
pub fn entangled_cat(target_count: usize, control_count: usize, mu: f64) -> ProtocolReport {
    assert!(target_count >= 1 && control_count >= 1);
    let control = CollectiveSpinState::polar_cat(control_count);
    let target = rotate(
        &CollectiveSpinState::all_up(target_count),
        &RotationSpec::new(Axis::Y, FRAC_PI_2),
    );
    let joint = echo_protocol(&control, &target, mu);
    let joint = joint.rotate_target(&RotationSpec::new(Axis::X, FRAC_PI_2));

    let top = CollectiveSpinState::all_up(target_count);
    let bottom = CollectiveSpinState::all_down(target_count);

    let mut branch_weights = BTreeMap::new();
    let mut conditional_fidelities = BTreeMap::new();
    let mut pairing = BTreeMap::new();
    for row in 0..joint.control_dim() {
        let (weight, conditional) = joint
            .conditional_target(row)
            .expect("row index in range");
        if weight < 1e-12 {
            continue;
        }
        let conditional = conditional.expect("weight above threshold");
        let label = projection_label(joint.control_two_m(row));
        let f_up = inner(&top, &conditional).expect("same size").norm_sqr();
        let f_down = inner(&bottom, &conditional).expect("same size").norm_sqr();
        let (pole, fidelity) = if f_up >= f_down {
            ("up", f_up)
        } else {
            ("down", f_down)
        };
        branch_weights.insert(label.clone(), weight);
        conditional_fidelities.insert(label.clone(), fidelity);
        pairing.insert(label, pole.to_string());
    }

    ProtocolReport {
        branch_weights,
        conditional_fidelities,
        pairing,
        parity_checked: None,
        final_state: FinalState::Bipartite(joint),
    }
}

/// Runs `entangled_cat` at N and N+1 target atoms and records whether the
/// pairing orientation and fidelities survive the parity flip.
pub fn entangled_cat_with_parity(
    target_count: usize,
    control_count: usize,
    mu: f64,
) -> ProtocolReport {
    let mut base = entangled_cat(target_count, control_count, mu);
    let partner = entangled_cat(target_count + 1, control_count, mu);
    let max_fidelity_gap = base
        .conditional_fidelities
        .iter()
        .filter_map(|(label, f)| {
            partner
                .conditional_fidelities
                .get(label)
                .map(|g| (f - g).abs())
        })
        .fold(0.0, f64::max);
    base.parity_checked = Some(ParityCheck {
        atom_counts: [target_count, target_count + 1],
        pairing_identical: base.pairing == partner.pairing,
        pairings: [base.pairing.clone(), partner.pairing],
        max_fidelity_gap,
    });
    base
}

/// Reports for the two measurement branches of the transfer protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferReports {
    pub up: ProtocolReport,
    pub down: ProtocolReport,
}

/// Measurement-conditioned transfer of a single-atom superposition onto the
/// target group.
///
/// Control (|up> + |down>)/sqrt(2), target on the +x equator point; echo at
/// mu = pi/2; pi/2 pulse around x on the control alone; control detection.
/// The conditional target is then an equal superposition of the two
/// equatorial coherent states on the +-y axis, so the corrective pulse that
/// carries them to the poles is a rotation around x: +pi/2 for the up
/// outcome, -pi/2 for down. Both branches end in the polar cat exactly.
pub fn transfer_cat(target_count: usize) -> TransferReports {
    assert!(target_count >= 1);
    let control = CollectiveSpinState::polar_cat(1);
    let target = CollectiveSpinState::coherent(
        target_count,
        crate::spin::BlochDirection::new(FRAC_PI_2, 0.0).expect("equator"),
    );
    let joint = echo_protocol(&control, &target, FRAC_PI_2);
    let joint = control_x_pulse(&joint, FRAC_PI_2).expect("single control atom");
    let outcomes = measure_control(&joint).expect("single control atom");

    let mut reports = Vec::with_capacity(2);
    for outcome in outcomes {
        let correction = match outcome.label {
            OutcomeLabel::Up => FRAC_PI_2,
            OutcomeLabel::Down => -FRAC_PI_2,
        };
        let final_target = rotate(&outcome.post_state, &RotationSpec::new(Axis::X, correction));
        let fidelity = cat_fidelity_phase_max(&final_target);
        let label = outcome.label.as_str().to_string();
        let mut branch_weights = BTreeMap::new();
        branch_weights.insert(label.clone(), outcome.probability);
        let mut conditional_fidelities = BTreeMap::new();
        conditional_fidelities.insert(label.clone(), fidelity);
        reports.push(ProtocolReport {
            branch_weights,
            conditional_fidelities,
            pairing: BTreeMap::new(),
            parity_checked: None,
            final_state: FinalState::Collective(final_target),
        });
    }
    let down = reports.pop().expect("two outcomes");
    let up = reports.pop().expect("two outcomes");
    TransferReports { up, down }
}
