use serde::Serialize;

use crate::rational::Rational;

use super::experiment::{EvalReport, Format};

const DIGITS: usize = 12;

#[derive(Serialize)]
struct RationalOut {
    exact: String,
    decimal: String,
}

impl From<&Rational> for RationalOut {
    fn from(r: &Rational) -> Self {
        RationalOut {
            exact: r.to_string(),
            decimal: r.to_decimal(DIGITS),
        }
    }
}

#[derive(Serialize)]
struct ScenarioOut {
    m: usize,
    weight: u64,
    value: u64,
}

#[derive(Serialize)]
struct CountersOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder_len: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guesses_enumerated: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guesses_packed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dp_cells: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_solves: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fallbacks: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fill_violations: Option<u64>,
}

/// Field order here is the documented key order of the JSON report.
#[derive(Serialize)]
struct ReportOut {
    objective: String,
    solver: String,
    epsilon: String,
    processing_times: Vec<u64>,
    machine_weights: Vec<u64>,
    bags: Vec<Vec<usize>>,
    scenarios: Vec<ScenarioOut>,
    expected_value: RationalOut,
    oracle_value: Option<RationalOut>,
    ratio: Option<RationalOut>,
    counters: CountersOut,
}

fn to_out(report: &EvalReport) -> ReportOut {
    let c = &report.counters;
    ReportOut {
        objective: report.objective.to_string(),
        solver: report.solver.to_string(),
        epsilon: report.epsilon.to_string(),
        processing_times: report.instance.processing_times().to_vec(),
        machine_weights: report.instance.machine_weights().to_vec(),
        bags: report.bagging.bags().to_vec(),
        scenarios: report
            .scenario_values
            .iter()
            .map(|&(m, value)| ScenarioOut {
                m,
                weight: report.instance.weight(m),
                value,
            })
            .collect(),
        expected_value: (&report.expected_value).into(),
        oracle_value: report.oracle_value.as_ref().map(Into::into),
        ratio: report.ratio.as_ref().map(Into::into),
        counters: CountersOut {
            ladder_len: c.ladder_len,
            guesses_enumerated: c.guesses_enumerated,
            guesses_packed: c.guesses_packed,
            dp_cells: c.dp_cells,
            inner_solves: c.inner_solves,
            fallbacks: c.fallbacks,
            fill_violations: c.fill_violations,
        },
    }
}

/// Deterministic bytes for a report: no timings, fixed key and column order.
pub fn emit_report(report: &EvalReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&to_out(report)).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => emit_csv(report),
    }
}

/// One row per scenario, then a summary row.
fn emit_csv(report: &EvalReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |r: Option<&Rational>| match r {
        Some(r) => (r.to_string(), r.to_decimal(DIGITS)),
        None => (String::new(), String::new()),
    };
    w.write_record([
        "row", "m", "weight", "value", "expected_exact", "expected_decimal", "oracle_exact", "oracle_decimal",
        "ratio_exact", "ratio_decimal",
    ])
    .expect("in-memory write");
    for &(m, value) in &report.scenario_values {
        let (m, weight, value) = (m.to_string(), report.instance.weight(m).to_string(), value.to_string());
        w.write_record(["scenario", &m, &weight, &value, "", "", "", "", "", ""])
            .expect("in-memory write");
    }
    let (ev, evd) = opt(Some(&report.expected_value));
    let (ov, ovd) = opt(report.oracle_value.as_ref());
    let (rv, rvd) = opt(report.ratio.as_ref());
    w.write_record(["summary", "", "", "", &ev, &evd, &ov, &ovd, &rv, &rvd])
        .expect("in-memory write");
    w.into_inner().expect("in-memory flush")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{run_experiment, ExperimentConfig, InstanceSource};
    use crate::model::{Instance, Objective};
    use crate::rational::Epsilon;

    fn report() -> EvalReport {
        let inst = Instance::new(vec![3, 1], vec![1, 1]).unwrap();
        let mut c = ExperimentConfig::new(Objective::Makespan, Epsilon::new(4).unwrap(), InstanceSource::Inline(inst));
        c.with_oracle = true;
        run_experiment(&c).unwrap()
    }

    #[test]
    fn json_key_order_and_rendering() {
        let text = String::from_utf8(emit_report(&report(), Format::Json)).unwrap();
        let keys = [
            "\"objective\"", "\"solver\"", "\"epsilon\"", "\"processing_times\"", "\"machine_weights\"", "\"bags\"",
            "\"scenarios\"", "\"expected_value\"", "\"oracle_value\"", "\"ratio\"", "\"counters\"",
        ];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\"exact\": \"7/2\""));
        assert!(text.contains("\"decimal\": \"3.50000000000\""));
        assert_eq!(emit_report(&report(), Format::Json), emit_report(&report(), Format::Json));
    }

    #[test]
    fn csv_rows() {
        let text = String::from_utf8(emit_report(&report(), Format::Csv)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("scenario,1,1,4"));
        assert!(lines[3].starts_with("summary,,,,7/2,3.50000000000,7/2,3.50000000000,1/1,1.00000000000"));
    }
}
