//! Collapse operators from coherence times.

use crate::circuit::CoherenceTimes;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

const NS_PER_MS: f64 = 1e6;

/// Relaxation and pure-dephasing rates (1/ns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub relaxation: f64,
    pub dephasing: f64,
}

/// `1/T1` and `1/T_phi = 1/T2 - 1/(2 T1)`. `T1 = inf` is allowed.
pub fn rates(t: &CoherenceTimes) -> Result<Rates> {
    if !(t.t1_ms > 0.0) || !(t.t2_ms > 0.0) {
        return Err(Error::Physicality(format!(
            "T1 = {} ms and T2 = {} ms must be positive",
            t.t1_ms, t.t2_ms
        )));
    }
    if t.t2_ms > 2.0 * t.t1_ms {
        return Err(Error::Physicality(format!(
            "T2 = {} ms exceeds 2 T1 = {} ms",
            t.t2_ms,
            2.0 * t.t1_ms
        )));
    }
    let relaxation = 1.0 / (t.t1_ms * NS_PER_MS);
    let dephasing = (1.0 / (t.t2_ms * NS_PER_MS) - 0.5 * relaxation).max(0.0);
    Ok(Rates {
        relaxation,
        dephasing,
    })
}

/// `sqrt(1/T1) a` and `sqrt(2/T_phi) a_dag a`, skipping zero rates.
pub fn collapse_ops_from_t(t: &CoherenceTimes, lowering: &CMatrix) -> Result<Vec<CMatrix>> {
    let r = rates(t)?;
    let mut out = Vec::new();
    if r.relaxation > 0.0 {
        out.push(lowering * C64::new(r.relaxation.sqrt(), 0.0));
    }
    if r.dephasing > 0.0 {
        out.push(lowering.adjoint() * lowering * C64::new((2.0 * r.dephasing).sqrt(), 0.0));
    }
    Ok(out)
}
