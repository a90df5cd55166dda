// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Qubit-overhead comparison: for each target logical failure rate, the
//! smallest (3,4) hypergraph-product code whose scaling law meets the
//! target versus a surface-code baseline providing the same number of
//! logical qubits.
//!
//! The product code uses `qubits_per_logical * k` physical qubits (49k for
//! the (3,4) family: 25s² data + 24s² ancillas with k = s²). The baseline
//! uses one distance-d patch of 2d² physical qubits (data plus ancillas)
//! per logical qubit, with per-patch failure `a * (p / p_t)^((d + o) / 2)`
//! summed over k patches; the exponent offset `o` defaults to 0, which
//! reproduces the reference overhead figures for the default constants.

use super::HarnessError;
use crate::harness::fit::ScalingLaw;
use serde::{Deserialize, Serialize};

/// Inputs of the overhead comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadConfig {
    /// Failure scaling law of the product-code family.
    pub law: ScalingLaw,
    /// Per-patch prefactor of the surface-code failure model.
    pub surface_a: f64,
    /// Threshold rate of the surface-code failure model.
    pub surface_p_t: f64,
    /// Physical error rate both families operate at.
    pub p: f64,
    /// Target logical failure rates, one table row each.
    pub targets: Vec<f64>,
    /// Physical qubits per logical qubit of the product family.
    pub qubits_per_logical: u64,
    /// Offset `o` in the surface suppression exponent `(d + o) / 2`.
    pub surface_exponent_offset: f64,
}

impl Default for OverheadConfig {
    fn default() -> Self {
        OverheadConfig {
            law: ScalingLaw::default(),
            surface_a: 0.03,
            surface_p_t: 0.011,
            p: 1.0e-4,
            targets: vec![1.0e-9, 1.0e-12, 1.0e-15],
            qubits_per_logical: 49,
            surface_exponent_offset: 0.0,
        }
    }
}

/// One row of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub target: f64,
    /// Seed-graph scale of the smallest adequate product code.
    pub s: u64,
    /// Logical qubits provided by both columns: k = s².
    pub k: u64,
    pub hgp_qubits: u64,
    /// Smallest odd surface-code distance meeting the target.
    pub d: u64,
    pub surface_qubits: u64,
    /// surface_qubits / hgp_qubits.
    pub ratio: f64,
}

/// Caps on the minimality searches; hitting one means the target is
/// unreachable under the given constants.
const MAX_S: u64 = 100_000;
const MAX_D: u64 = 9_999;

fn surface_failure(oc: &OverheadConfig, k: u64, d: u64) -> f64 {
    let exponent = (d as f64 + oc.surface_exponent_offset) / 2.0;
    oc.surface_a * k as f64 * (oc.p / oc.surface_p_t).powf(exponent)
}

/// Builds the comparison table, one row per target.
pub fn overhead_table(oc: &OverheadConfig) -> Result<Vec<OverheadRow>, HarnessError> {
    if !(oc.surface_a > 0.0) {
        return Err(HarnessError::InvalidConfig(
            "surface prefactor must be positive".into(),
        ));
    }
    if !(oc.p > 0.0 && oc.p < oc.surface_p_t) {
        return Err(HarnessError::InvalidConfig(format!(
            "physical rate {} must sit inside (0, {}) for the surface model to suppress",
            oc.p, oc.surface_p_t
        )));
    }
    if !(oc.p < oc.law.p_t) {
        return Err(HarnessError::InvalidConfig(format!(
            "physical rate {} must sit below the product-family threshold {}",
            oc.p, oc.law.p_t
        )));
    }
    if oc.targets.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "at least one target rate is required".into(),
        ));
    }
    for &target in &oc.targets {
        if !(target > 0.0 && target < oc.law.c1) {
            return Err(HarnessError::InvalidConfig(format!(
                "target {target} must sit inside (0, c1 = {})",
                oc.law.c1
            )));
        }
    }

    let mut rows = Vec::with_capacity(oc.targets.len());
    for &target in &oc.targets {
        let s = (1..=MAX_S)
            .find(|&s| oc.law.failure_rate(oc.p, (s * s) as f64) <= target)
            .ok_or_else(|| {
                HarnessError::InvalidConfig(format!(
                    "no product code with s <= {MAX_S} reaches target {target}"
                ))
            })?;
        let k = s * s;
        let d = (3..=MAX_D)
            .step_by(2)
            .find(|&d| surface_failure(oc, k, d) <= target)
            .ok_or_else(|| {
                HarnessError::InvalidConfig(format!(
                    "no surface distance d <= {MAX_D} reaches target {target}"
                ))
            })?;
        let hgp_qubits = oc.qubits_per_logical * k;
        let surface_qubits = 2 * d * d * k;
        rows.push(OverheadRow {
            target,
            s,
            k,
            hgp_qubits,
            d,
            surface_qubits,
            ratio: surface_qubits as f64 / hgp_qubits as f64,
        });
    }
    Ok(rows)
}

/// Renders rows as a Markdown table; ratios shown to two decimals.
pub fn render_overhead_markdown(rows: &[OverheadRow]) -> String {
    let mut out = String::new();
    out.push_str("| target P_L | logical qubits k | HGP qubits (49k) | surface d | surface qubits (2d^2 k) | ratio |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    for r in rows {
        out.push_str(&format!(
            "| {:e} | {} | {} | {} | {} | {:.2} |\n",
            r.target, r.k, r.hgp_qubits, r.d, r.surface_qubits, r.ratio
        ));
    }
    out
}
