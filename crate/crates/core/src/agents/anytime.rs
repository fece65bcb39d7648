use rand::RngCore;
use serde::Serialize;

use super::rgl::{rgl_window, RglDiagnostics};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::trace::AgentTrace;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnytimeWindow {
    /// 1-based time index of the window's first step.
    pub start: u64,
    /// Steps actually played; below `horizon` only for the last window.
    pub len: u64,
    /// Nominal window length `T0 * 2^i`, used as the RGL horizon.
    pub horizon: u64,
    pub diagnostics: RglDiagnostics,
}

/// Boundaries `(start, len, horizon)` of the restart windows covering
/// `total_steps`: window `i` spans `T_{i+1} - T_i = T0 * 2^i` steps with
/// `T_i = T0 * 2^i`, the last one cut at `total_steps`.
pub fn anytime_windows(total_steps: u64, t0: u64) -> Result<Vec<(u64, u64, u64)>> {
    if t0 < 2 {
        return Err(Error::HorizonTooShort { got: t0, min: 2 });
    }
    let mut out = Vec::new();
    let mut start = 1u64;
    let mut nominal = t0;
    while start <= total_steps {
        let len = nominal.min(total_steps - start + 1);
        out.push((start, len, nominal));
        start += len;
        nominal = nominal.saturating_mul(2);
    }
    Ok(out)
}

/// RGL with a full restart on each geometric window. The trace has no single
/// committed set, so `committed` stays `None`.
pub fn rgl_anytime_run<E: Environment + ?Sized>(
    env: &E,
    total_steps: u64,
    t0: u64,
    noise: &mut dyn RngCore,
    coins: &mut dyn RngCore,
    seed: u64,
) -> Result<(AgentTrace, Vec<AnytimeWindow>)> {
    let mut trace = AgentTrace::new("RGL-anytime", seed, total_steps);
    let mut windows = Vec::new();
    for (start, len, horizon) in anytime_windows(total_steps, t0)? {
        let (part, diagnostics) = rgl_window(env, horizon, len, noise, coins, seed)?;
        for step in part.steps {
            trace.push(step.action, step.reward, step.phase);
        }
        windows.push(AnytimeWindow {
            start,
            len,
            horizon,
            diagnostics,
        });
    }
    Ok((trace, windows))
}
