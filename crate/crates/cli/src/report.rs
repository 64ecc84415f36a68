//! Report envelope and its two serializations. JSON carries the whole
//! envelope with struct-ordered keys; CSV flattens the result rows into one
//! RFC 4180 table (header plus one row per entry), since the envelope
//! metadata is not tabular.

use serde::Serialize;

use crate::config::ConfigEcho;

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub timestamp: String,
    pub sections: Vec<Section>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub rows: RowSet,
}

/// One homogeneous batch of result rows. A report only ever mixes sections
/// of the same variant, which is what lets the CSV writer emit a single
/// header.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum RowSet {
    Levels(Vec<LevelRow>),
    Poles(Vec<PoleRow>),
    Amplitudes(Vec<AmplitudeRow>),
    Modes(Vec<ModeRow>),
    Variants(Vec<VariantLevelRow>),
    Eikonal(Vec<EikonalRow>),
    Orbit(Vec<OrbitRow>),
    Checks(Vec<CheckRow>),
}

#[derive(Debug, Serialize)]
pub struct LevelRow {
    pub c: f64,
    pub n: u32,
    pub energy: f64,
    pub energy_ev: f64,
}

#[derive(Debug, Serialize)]
pub struct PoleRow {
    pub n: u32,
    pub energy: f64,
    pub energy_ev: f64,
    pub analytic: f64,
    pub deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct AmplitudeRow {
    pub theta: f64,
    pub method: &'static str,
    pub value: f64,
    pub terms: usize,
    pub error_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct ModeRow {
    pub mode: u32,
    pub slice_factor: f64,
    pub decay_rate: f64,
    pub composed: f64,
}

#[derive(Debug, Serialize)]
pub struct VariantLevelRow {
    pub c: f64,
    pub measure_factor: bool,
    pub n: u32,
    pub extracted_energy: Option<f64>,
    pub extracted_energy_ev: Option<f64>,
    pub analytic_energy: f64,
    pub physical_energy: f64,
    pub deviation_percent: Option<f64>,
    pub excluded: bool,
}

#[derive(Debug, Serialize)]
pub struct EikonalRow {
    pub from: [f64; 3],
    pub to: [f64; 3],
    pub angle: f64,
    pub action: f64,
    pub geodesic_action: f64,
    pub deviation: f64,
    pub iterations: u64,
    pub gradient_norm: f64,
}

#[derive(Debug, Serialize)]
pub struct OrbitRow {
    pub angular_momentum: f64,
    pub eccentricity: f64,
    pub semi_major_axis: f64,
    pub period: f64,
    pub perihelion_radius: f64,
    pub energy_drift: f64,
    pub energy_oscillation: f64,
    pub hodograph_radius: f64,
    pub hodograph_radius_predicted: f64,
    pub hodograph_center_offset: f64,
    pub hodograph_center_predicted: f64,
    pub hodograph_residual: f64,
    pub phase_position_form: f64,
    pub phase_momentum_form: f64,
    pub phase_difference: f64,
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub check: &'static str,
    pub ok: bool,
    pub measured: f64,
    pub budget: f64,
    pub detail: String,
}

fn cell(v: f64) -> String {
    format!("{v}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl RowSet {
    pub fn header(&self) -> &'static [&'static str] {
        match self {
            RowSet::Levels(_) => &["c", "n", "energy", "energy_ev"],
            RowSet::Poles(_) => &["n", "energy", "energy_ev", "analytic", "deviation"],
            RowSet::Amplitudes(_) => &["theta", "method", "value", "terms", "error_bound"],
            RowSet::Modes(_) => &["mode", "slice_factor", "decay_rate", "composed"],
            RowSet::Variants(_) => &[
                "c",
                "measure_factor",
                "n",
                "extracted_energy",
                "extracted_energy_ev",
                "analytic_energy",
                "physical_energy",
                "deviation_percent",
                "excluded",
            ],
            RowSet::Eikonal(_) => &[
                "from_x",
                "from_y",
                "from_z",
                "to_x",
                "to_y",
                "to_z",
                "angle",
                "action",
                "geodesic_action",
                "deviation",
                "iterations",
                "gradient_norm",
            ],
            RowSet::Orbit(_) => &[
                "angular_momentum",
                "eccentricity",
                "semi_major_axis",
                "period",
                "perihelion_radius",
                "energy_drift",
                "energy_oscillation",
                "hodograph_radius",
                "hodograph_radius_predicted",
                "hodograph_center_offset",
                "hodograph_center_predicted",
                "hodograph_residual",
                "phase_position_form",
                "phase_momentum_form",
                "phase_difference",
            ],
            RowSet::Checks(_) => &["check", "ok", "measured", "budget", "detail"],
        }
    }

    pub fn records(&self) -> Vec<Vec<String>> {
        match self {
            RowSet::Levels(rows) => rows
                .iter()
                .map(|r| vec![cell(r.c), r.n.to_string(), cell(r.energy), cell(r.energy_ev)])
                .collect(),
            RowSet::Poles(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        cell(r.energy),
                        cell(r.energy_ev),
                        cell(r.analytic),
                        cell(r.deviation),
                    ]
                })
                .collect(),
            RowSet::Amplitudes(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        cell(r.theta),
                        r.method.to_string(),
                        cell(r.value),
                        r.terms.to_string(),
                        cell(r.error_bound),
                    ]
                })
                .collect(),
            RowSet::Modes(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.mode.to_string(),
                        cell(r.slice_factor),
                        cell(r.decay_rate),
                        cell(r.composed),
                    ]
                })
                .collect(),
            RowSet::Variants(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        cell(r.c),
                        r.measure_factor.to_string(),
                        r.n.to_string(),
                        opt_cell(r.extracted_energy),
                        opt_cell(r.extracted_energy_ev),
                        cell(r.analytic_energy),
                        cell(r.physical_energy),
                        opt_cell(r.deviation_percent),
                        r.excluded.to_string(),
                    ]
                })
                .collect(),
            RowSet::Eikonal(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        cell(r.from[0]),
                        cell(r.from[1]),
                        cell(r.from[2]),
                        cell(r.to[0]),
                        cell(r.to[1]),
                        cell(r.to[2]),
                        cell(r.angle),
                        cell(r.action),
                        cell(r.geodesic_action),
                        cell(r.deviation),
                        r.iterations.to_string(),
                        cell(r.gradient_norm),
                    ]
                })
                .collect(),
            RowSet::Orbit(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        cell(r.angular_momentum),
                        cell(r.eccentricity),
                        cell(r.semi_major_axis),
                        cell(r.period),
                        cell(r.perihelion_radius),
                        cell(r.energy_drift),
                        cell(r.energy_oscillation),
                        cell(r.hodograph_radius),
                        cell(r.hodograph_radius_predicted),
                        cell(r.hodograph_center_offset),
                        cell(r.hodograph_center_predicted),
                        cell(r.hodograph_residual),
                        cell(r.phase_position_form),
                        cell(r.phase_momentum_form),
                        cell(r.phase_difference),
                    ]
                })
                .collect(),
            RowSet::Checks(rows) => rows
                .iter()
                .map(|r| {
                    vec![
                        r.check.to_string(),
                        r.ok.to_string(),
                        cell(r.measured),
                        cell(r.budget),
                        r.detail.clone(),
                    ]
                })
                .collect(),
        }
    }
}

/// Serializes the envelope: JSON is the whole envelope, pretty-printed with
/// a trailing newline; CSV is the concatenated result rows under a single
/// header.
pub fn serialize_report(
    envelope: &ReportEnvelope,
    format: crate::config::Format,
) -> Result<Vec<u8>, String> {
    match format {
        crate::config::Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(envelope)
                .map_err(|e| format!("report serialization failed: {e}"))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        crate::config::Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            if let Some(first) = envelope.sections.first() {
                writer
                    .write_record(first.rows.header())
                    .map_err(|e| format!("csv header failed: {e}"))?;
                for section in &envelope.sections {
                    debug_assert_eq!(
                        section.rows.header(),
                        first.rows.header(),
                        "a report must not mix row kinds"
                    );
                    for record in section.rows.records() {
                        writer
                            .write_record(&record)
                            .map_err(|e| format!("csv row failed: {e}"))?;
                    }
                }
            }
            writer
                .into_inner()
                .map_err(|e| format!("csv buffer failed: {e}"))
        }
    }
}
