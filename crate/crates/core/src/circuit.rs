//! Circuit description: mode parameters, capacitance network and couplings.
//!
//! All energies and frequencies are linear frequencies in GHz, coupling
//! strengths in MHz and capacitances in fF. External flux is stored as a
//! fraction of the flux quantum so that the JSON form round-trips exactly.

use nalgebra::{Matrix3, SymmetricEigen};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::TWO_PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxoniumParams {
    pub e_c: f64,
    pub e_j: f64,
    pub e_l: f64,
    /// Small-to-big junction ratio.
    pub beta: f64,
    /// External flux in units of the flux quantum, in `[0, 1)`.
    pub flux: f64,
    /// Recorded operating frequency (GHz), if the design specifies one.
    pub omega: Option<f64>,
}

impl FluxoniumParams {
    pub fn new(e_c: f64, e_j: f64, e_l: f64, beta: f64, phi_ext: f64) -> Result<Self> {
        let p = Self {
            e_c,
            e_j,
            e_l,
            beta,
            flux: phi_ext / TWO_PI,
            omega: None,
        };
        p.validate("fluxonium")?;
        Ok(p)
    }

    /// External flux phase `2*pi*Phi_ext/Phi_0` in radians.
    pub fn phi_ext(&self) -> f64 {
        TWO_PI * self.flux
    }

    /// Copy with a different external phase; wrapped into `[0, 2*pi)`.
    pub fn with_phi_ext(&self, phi_ext: f64) -> Self {
        Self {
            flux: (phi_ext / TWO_PI).rem_euclid(1.0),
            ..*self
        }
    }

    fn validate(&self, path: &str) -> Result<()> {
        for (name, v) in [("E_C", self.e_c), ("E_J", self.e_j), ("E_L", self.e_l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invariant(
                    format!("{path}.{name} > 0"),
                    format!("got {v}"),
                ));
            }
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invariant(
                format!("0 < {path}.beta < 1"),
                format!("got {}", self.beta),
            ));
        }
        if !(0.0..1.0).contains(&self.flux) {
            return Err(Error::invariant(
                format!("{path}.phi_ext in [0, 2pi)"),
                format!("got {} flux quanta", self.flux),
            ));
        }
        Ok(())
    }
}

/// Transmon-type mode; used for both the qubit transmon and the coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    pub e_c: f64,
    pub e_j: f64,
    /// Offset charge in Cooper pairs.
    pub n_g: f64,
    pub omega: Option<f64>,
}

impl TransmonParams {
    pub fn new(e_c: f64, e_j: f64, n_g: f64) -> Result<Self> {
        let p = Self {
            e_c,
            e_j,
            n_g,
            omega: None,
        };
        p.validate("transmon")?;
        Ok(p)
    }

    pub fn with_e_j(&self, e_j: f64) -> Self {
        Self { e_j, ..*self }
    }

    pub fn with_n_g(&self, n_g: f64) -> Self {
        Self { n_g, ..*self }
    }

    /// Plasma-frequency estimate `sqrt(8 E_C E_J) - E_C`.
    pub fn plasma_estimate(&self) -> f64 {
        (8.0 * self.e_c * self.e_j).sqrt() - self.e_c
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(self.e_c > 0.0 && self.e_c.is_finite()) {
            return Err(Error::invariant(
                format!("{path}.E_C > 0"),
                format!("got {}", self.e_c),
            ));
        }
        if !(self.e_c < self.e_j) {
            return Err(Error::invariant(
                format!("{path}: E_C<E_J violated"),
                format!("E_C = {}, E_J = {}", self.e_c, self.e_j),
            ));
        }
        if !self.n_g.is_finite() {
            return Err(Error::invariant(format!("{path}.n_g finite"), "got non-finite"));
        }
        Ok(())
    }
}

/// Self and mutual capacitances in fF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitanceNetwork {
    pub c_1: f64,
    pub c_2: f64,
    pub c_c: f64,
    pub c_1c: f64,
    pub c_2c: f64,
    pub c_12: f64,
}

impl CapacitanceNetwork {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("C_1", self.c_1), ("C_2", self.c_2), ("C_c", self.c_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invariant(
                    format!("capacitances.{name} > 0"),
                    format!("got {v}"),
                ));
            }
        }
        for (name, v) in [("C_1c", self.c_1c), ("C_2c", self.c_2c), ("C_12", self.c_12)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invariant(
                    format!("capacitances.{name} >= 0"),
                    format!("got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Node capacitance matrix in the order (fluxonium, coupler, transmon).
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.c_1 + self.c_1c + self.c_12,
            -self.c_1c,
            -self.c_12,
            -self.c_1c,
            self.c_c + self.c_1c + self.c_2c,
            -self.c_2c,
            -self.c_12,
            -self.c_2c,
            self.c_2 + self.c_2c + self.c_12,
        )
    }

    /// `C_1c C_2c / (C_12 C_c)`; infinite when `C_12 = 0`.
    pub fn eta(&self) -> f64 {
        self.c_1c * self.c_2c / (self.c_12 * self.c_c)
    }

    /// Leading-order inverse, with each `C_j` read as the loaded node
    /// capacitance (diagonal entry of [`Self::matrix`]).
    pub fn perturbative_inverse(&self) -> Matrix3<f64> {
        let m = self.matrix();
        let (s1, sc, s2) = (m[(0, 0)], m[(1, 1)], m[(2, 2)]);
        let x1c = self.c_1c / (s1 * sc);
        let x2c = self.c_2c / (s2 * sc);
        let x12 = (self.c_12 + self.c_1c * self.c_2c / sc) / (s1 * s2);
        Matrix3::new(1.0 / s1, x1c, x12, x1c, 1.0 / sc, x2c, x12, x2c, 1.0 / s2)
    }

    /// True when some coupling capacitance exceeds 10% of a self-capacitance
    /// it connects to.
    pub fn weak_coupling_violated(&self) -> bool {
        self.c_1c > 0.1 * self.c_1.min(self.c_c)
            || self.c_2c > 0.1 * self.c_2.min(self.c_c)
            || self.c_12 > 0.1 * self.c_1.min(self.c_2)
    }
}

/// Exact inverse of the node capacitance matrix (1/fF).
pub fn invert_capacitance_matrix(net: &CapacitanceNetwork) -> Result<Matrix3<f64>> {
    net.validate()?;
    let c = net.matrix();
    let eig = SymmetricEigen::new(c);
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::Conditioning { condition });
    }
    let inv = c.try_inverse().ok_or(Error::Conditioning { condition })?;
    // Symmetrize away rounding noise.
    Ok((inv + inv.transpose()) * 0.5)
}

/// Coupling strengths in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    pub g_1c: f64,
    pub g_2c: f64,
    pub g_12: f64,
}

impl CouplingSet {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            g_1c: self.g_1c * s,
            g_2c: self.g_2c * s,
            g_12: self.g_12 * s,
        }
    }
}

/// Capacitive coupling strengths for mode frequencies in GHz; result in MHz.
pub fn coupling_from_capacitances(
    net: &CapacitanceNetwork,
    omega_1: f64,
    omega_2: f64,
    omega_c: f64,
) -> Result<CouplingSet> {
    for (name, w) in [("omega_1", omega_1), ("omega_2", omega_2), ("omega_c", omega_c)] {
        if !(w > 0.0) {
            return Err(Error::invariant(format!("{name} > 0"), format!("got {w}")));
        }
    }
    net.validate()?;
    let g_1c = 0.5 * net.c_1c / (net.c_1 * net.c_c).sqrt() * (omega_1 * omega_c).sqrt();
    let g_2c = 0.5 * net.c_2c / (net.c_2 * net.c_c).sqrt() * (omega_2 * omega_c).sqrt();
    // (1 + eta) C_12 written without dividing by C_12.
    let direct = net.c_12 + net.c_1c * net.c_2c / net.c_c;
    let g_12 = 0.5 * direct / (net.c_1 * net.c_2).sqrt() * (omega_1 * omega_2).sqrt();
    Ok(CouplingSet {
        g_1c: 1e3 * g_1c,
        g_2c: 1e3 * g_2c,
        g_12: 1e3 * g_12,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSource {
    Direct(CouplingSet),
    Capacitances(CapacitanceNetwork),
}

/// Per-mode basis sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    /// Dressed levels kept per mode in the three-mode model.
    pub fluxonium: usize,
    pub transmon: usize,
    pub coupler: usize,
    /// Harmonic-oscillator basis size used to diagonalize the fluxonium.
    pub fluxonium_basis: usize,
    /// Charge cutoff `n_cut` for transmon-type modes (basis `2 n_cut + 1`).
    pub charge_cutoff: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            fluxonium: 6,
            transmon: 6,
            coupler: 6,
            fluxonium_basis: 40,
            charge_cutoff: 15,
        }
    }
}

impl Truncation {
    pub fn uniform(levels: usize) -> Self {
        Self {
            fluxonium: levels,
            transmon: levels,
            coupler: levels,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("fluxonium", self.fluxonium),
            ("transmon", self.transmon),
            ("coupler", self.coupler),
        ] {
            if v < 3 {
                return Err(Error::invariant(
                    format!("truncation.{name} >= 3"),
                    format!("got {v}"),
                ));
            }
        }
        if self.fluxonium < 2 || self.fluxonium_basis < self.fluxonium.max(10) {
            return Err(Error::invariant(
                "truncation.fluxonium_basis >= max(10, truncation.fluxonium)",
                format!("got {}", self.fluxonium_basis),
            ));
        }
        if self.charge_cutoff < 10 || 2 * self.charge_cutoff + 1 < self.transmon.max(self.coupler) {
            return Err(Error::invariant(
                "truncation.charge_cutoff >= 10",
                format!("got {}", self.charge_cutoff),
            ));
        }
        Ok(())
    }
}

/// Relaxation and dephasing times in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceTimes {
    pub t1_ms: f64,
    pub t2_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSpec {
    pub fluxonium: CoherenceTimes,
    pub transmon: CoherenceTimes,
}

impl Default for CoherenceSpec {
    /// Effective coherence times of the reference design.
    fn default() -> Self {
        Self {
            fluxonium: CoherenceTimes {
                t1_ms: 309.42,
                t2_ms: 56.7,
            },
            transmon: CoherenceTimes {
                t1_ms: 260.82,
                t2_ms: 506.99,
            },
        }
    }
}

/// Validated, immutable circuit description.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub fluxonium: FluxoniumParams,
    pub transmon: TransmonParams,
    pub coupler: TransmonParams,
    pub source: CouplingSource,
    /// Resolved coupling strengths (MHz).
    pub couplings: CouplingSet,
    pub truncation: Truncation,
    pub coherence: Option<CoherenceSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning(pub String);

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl CircuitSpec {
    pub fn new(
        fluxonium: FluxoniumParams,
        transmon: TransmonParams,
        coupler: TransmonParams,
        source: CouplingSource,
        truncation: Truncation,
    ) -> Result<Self> {
        fluxonium.validate("fluxonium")?;
        transmon.validate("transmon")?;
        coupler.validate("coupler")?;
        truncation.validate()?;
        let couplings = match source {
            CouplingSource::Direct(g) => {
                for (name, v) in [("g_1c", g.g_1c), ("g_2c", g.g_2c), ("g_12", g.g_12)] {
                    if !v.is_finite() {
                        return Err(Error::invariant(format!("couplings.{name} finite"), "non-finite"));
                    }
                }
                g
            }
            CouplingSource::Capacitances(net) => {
                let basis = truncation.fluxonium_basis;
                let cut = truncation.charge_cutoff;
                let w1 = fluxonium
                    .omega
                    .unwrap_or_else(|| crate::hamiltonian::fluxonium_frequency(&fluxonium, basis));
                let w2 = transmon
                    .omega
                    .unwrap_or_else(|| crate::hamiltonian::transmon_frequency(&transmon, cut));
                let wc = coupler
                    .omega
                    .unwrap_or_else(|| crate::hamiltonian::transmon_frequency(&coupler, cut));
                coupling_from_capacitances(&net, w1, w2, wc)?
            }
        };
        Ok(Self {
            fluxonium,
            transmon,
            coupler,
            source,
            couplings,
            truncation,
            coherence: None,
        })
    }

    /// Reference parameter set: fluxonium at zero flux, transmon at the
    /// charge sweet spot, couplings supplied directly.
    pub fn table1() -> Self {
        let mut fluxonium = FluxoniumParams::new(0.9, 4.5, 1.0, 0.1, 0.0).expect("valid");
        fluxonium.omega = Some(5.7);
        let mut transmon = TransmonParams::new(0.32, 16.0, 0.5).expect("valid");
        transmon.omega = Some(6.4);
        let coupler = TransmonParams::new(0.32, 12.8, 0.0).expect("valid");
        let g = CouplingSet {
            g_1c: 242.9,
            g_2c: 307.11,
            g_12: 34.7,
        };
        Self::new(
            fluxonium,
            transmon,
            coupler,
            CouplingSource::Direct(g),
            Truncation::default(),
        )
        .expect("reference parameters are valid")
    }

    pub fn with_couplings(&self, g: CouplingSet) -> Self {
        Self {
            source: CouplingSource::Direct(g),
            couplings: g,
            ..self.clone()
        }
    }

    pub fn with_truncation(&self, truncation: Truncation) -> Result<Self> {
        truncation.validate()?;
        Ok(Self {
            truncation,
            ..self.clone()
        })
    }

    pub fn with_coupler(&self, coupler: TransmonParams) -> Self {
        Self {
            coupler,
            ..self.clone()
        }
    }

    /// Bare fluxonium frequency: the recorded target, else the exact 0-1
    /// transition.
    pub fn omega_1(&self) -> f64 {
        self.fluxonium.omega.unwrap_or_else(|| {
            crate::hamiltonian::fluxonium_frequency(&self.fluxonium, self.truncation.fluxonium_basis)
        })
    }

    pub fn omega_2(&self) -> f64 {
        self.transmon.omega.unwrap_or_else(|| {
            crate::hamiltonian::transmon_frequency(&self.transmon, self.truncation.charge_cutoff)
        })
    }

    pub fn coherence_or_default(&self) -> CoherenceSpec {
        self.coherence.unwrap_or_default()
    }

    /// Non-fatal design-rule warnings.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        let g = self.couplings;
        if !(g.g_12 < g.g_1c && g.g_12 < g.g_2c) {
            out.push(Warning(format!(
                "direct coupling g_12 = {} MHz is not below both qubit-coupler couplings ({}, {})",
                g.g_12, g.g_1c, g.g_2c
            )));
        }
        if let CouplingSource::Capacitances(net) = self.source {
            if net.weak_coupling_violated() {
                out.push(Warning(
                    "coupling capacitances are not small against self-capacitances; perturbative formulas degrade"
                        .into(),
                ));
            }
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let mut root = Map::new();
        let mut fl = json!({
            "E_C": self.fluxonium.e_c,
            "E_J": self.fluxonium.e_j,
            "E_L": self.fluxonium.e_l,
            "beta": self.fluxonium.beta,
            "phi_ext": self.fluxonium.flux,
        });
        if let Some(w) = self.fluxonium.omega {
            fl["omega"] = json!(w);
        }
        root.insert("fluxonium".into(), fl);
        root.insert("transmon".into(), transmon_json(&self.transmon));
        root.insert("coupler".into(), transmon_json(&self.coupler));
        match self.source {
            CouplingSource::Direct(g) => {
                root.insert(
                    "couplings".into(),
                    json!({"g_1c": g.g_1c, "g_2c": g.g_2c, "g_12": g.g_12}),
                );
            }
            CouplingSource::Capacitances(c) => {
                root.insert(
                    "capacitances".into(),
                    json!({"C_1": c.c_1, "C_2": c.c_2, "C_c": c.c_c,
                           "C_1c": c.c_1c, "C_2c": c.c_2c, "C_12": c.c_12}),
                );
            }
        }
        let t = self.truncation;
        root.insert(
            "truncation".into(),
            json!({
                "fluxonium": t.fluxonium,
                "transmon": t.transmon,
                "coupler": t.coupler,
                "fluxonium_basis": t.fluxonium_basis,
                "charge_cutoff": t.charge_cutoff,
            }),
        );
        if let Some(c) = self.coherence {
            root.insert(
                "coherence".into(),
                json!({
                    "fluxonium": {"T1_ms": c.fluxonium.t1_ms, "T2_ms": c.fluxonium.t2_ms},
                    "transmon": {"T1_ms": c.transmon.t1_ms, "T2_ms": c.transmon.t2_ms},
                }),
            );
        }
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }
}

fn transmon_json(p: &TransmonParams) -> Value {
    let mut v = json!({"E_C": p.e_c, "E_J": p.e_j, "n_g": p.n_g});
    if let Some(w) = p.omega {
        v["omega"] = json!(w);
    }
    v
}

/// Path-tracking view of a JSON object used while parsing.
struct Section<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Section<'a> {
    fn root(v: &'a Value) -> Result<Self> {
        match v {
            Value::Object(map) => Ok(Self {
                path: String::new(),
                map,
            }),
            _ => Err(Error::config("$", "top level must be a JSON object")),
        }
    }

    fn field_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::config(self.field_path(k), "unknown field"));
            }
        }
        Ok(())
    }

    fn section(&self, key: &str) -> Result<Option<Section<'a>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Object(map)) => Ok(Some(Section {
                path: self.field_path(key),
                map,
            })),
            Some(_) => Err(Error::config(self.field_path(key), "expected an object")),
        }
    }

    fn required_section(&self, key: &str) -> Result<Section<'a>> {
        self.section(key)?
            .ok_or_else(|| Error::config(self.field_path(key), "missing required section"))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::config(self.field_path(key), "expected a number")),
        }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.opt_f64(key)?
            .ok_or_else(|| Error::config(self.field_path(key), "missing required field"))
    }

    fn opt_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| Error::config(self.field_path(key), "expected a non-negative integer")),
        }
    }
}

fn parse_transmon(s: &Section) -> Result<TransmonParams> {
    s.check_keys(&["E_C", "E_J", "n_g", "omega"])?;
    let p = TransmonParams {
        e_c: s.f64("E_C")?,
        e_j: s.f64("E_J")?,
        n_g: s.f64("n_g")?,
        omega: s.opt_f64("omega")?,
    };
    p.validate(&s.path)?;
    Ok(p)
}

fn parse_coherence(s: &Section) -> Result<CoherenceTimes> {
    s.check_keys(&["T1_ms", "T2_ms"])?;
    Ok(CoherenceTimes {
        t1_ms: s.f64("T1_ms")?,
        t2_ms: s.f64("T2_ms")?,
    })
}

/// Parses and validates a JSON circuit configuration.
pub fn parse_config(text: &str) -> Result<CircuitSpec> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::config("$", format!("malformed JSON: {e}")))?;
    let root = Section::root(&value)?;
    root.check_keys(&[
        "fluxonium",
        "transmon",
        "coupler",
        "couplings",
        "capacitances",
        "truncation",
        "coherence",
    ])?;

    let fs = root.required_section("fluxonium")?;
    fs.check_keys(&["E_C", "E_J", "E_L", "beta", "phi_ext", "omega"])?;
    let fluxonium = FluxoniumParams {
        e_c: fs.f64("E_C")?,
        e_j: fs.f64("E_J")?,
        e_l: fs.f64("E_L")?,
        beta: fs.f64("beta")?,
        flux: fs.f64("phi_ext")?,
        omega: fs.opt_f64("omega")?,
    };
    fluxonium.validate("fluxonium")?;

    let transmon = parse_transmon(&root.required_section("transmon")?)?;
    let coupler = parse_transmon(&root.required_section("coupler")?)?;

    let source = match (root.section("couplings")?, root.section("capacitances")?) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "couplings",
                "give either `couplings` or `capacitances`, not both",
            ))
        }
        (None, None) => {
            return Err(Error::config(
                "couplings",
                "missing required section (or `capacitances`)",
            ))
        }
        (Some(g), None) => {
            g.check_keys(&["g_1c", "g_2c", "g_12"])?;
            CouplingSource::Direct(CouplingSet {
                g_1c: g.f64("g_1c")?,
                g_2c: g.f64("g_2c")?,
                g_12: g.f64("g_12")?,
            })
        }
        (None, Some(c)) => {
            c.check_keys(&["C_1", "C_2", "C_c", "C_1c", "C_2c", "C_12"])?;
            let net = CapacitanceNetwork {
                c_1: c.f64("C_1")?,
                c_2: c.f64("C_2")?,
                c_c: c.f64("C_c")?,
                c_1c: c.f64("C_1c")?,
                c_2c: c.f64("C_2c")?,
                c_12: c.f64("C_12")?,
            };
            net.validate()?;
            CouplingSource::Capacitances(net)
        }
    };

    let mut truncation = Truncation::default();
    if let Some(t) = root.section("truncation")? {
        t.check_keys(&["fluxonium", "transmon", "coupler", "fluxonium_basis", "charge_cutoff"])?;
        if let Some(v) = t.opt_usize("fluxonium")? {
            truncation.fluxonium = v;
        }
        if let Some(v) = t.opt_usize("transmon")? {
            truncation.transmon = v;
        }
        if let Some(v) = t.opt_usize("coupler")? {
            truncation.coupler = v;
        }
        if let Some(v) = t.opt_usize("fluxonium_basis")? {
            truncation.fluxonium_basis = v;
        }
        if let Some(v) = t.opt_usize("charge_cutoff")? {
            truncation.charge_cutoff = v;
        }
    }

    let coherence = match root.section("coherence")? {
        None => None,
        Some(c) => {
            c.check_keys(&["fluxonium", "transmon"])?;
            Some(CoherenceSpec {
                fluxonium: parse_coherence(&c.required_section("fluxonium")?)?,
                transmon: parse_coherence(&c.required_section("transmon")?)?,
            })
        }
    };

    let mut spec = CircuitSpec::new(fluxonium, transmon, coupler, source, truncation)?;
    spec.coherence = coherence;
    Ok(spec)
}
