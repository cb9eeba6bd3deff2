//! Witness reports for states described by a StateSpec.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bosent::witnesses::{
    classify, csi_ratio, integrated_g2m, number_squeezing_direct, per_sector_csi, qfi_many, spin_squeezing,
    SectorCsi, WitnessValues,
};
use bosent::{GeneratorSpec, TwoModeState, WitnessReport};
use serde::{Deserialize, Serialize};

use crate::statespec::{BuiltState, StateSpec};
use crate::CliError;

/// One `-w` selection.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessRequest {
    /// `csi:M`, the order-`2M` Cauchy-Schwarz ratio; `csi` means `csi:1`.
    Csi { m: usize },
    /// `qfi:x`, `qfi:y`, `qfi:z` or `qfi:NX,NY,NZ`.
    Qfi(GeneratorSpec),
    /// `xi`: spin squeezing.
    Xi,
    /// `eta`: number squeezing.
    Eta,
}

impl WitnessRequest {
    /// What `all` expands to.
    pub fn all() -> Vec<WitnessRequest> {
        vec![
            WitnessRequest::Csi { m: 1 },
            WitnessRequest::Qfi(GeneratorSpec::x()),
            WitnessRequest::Qfi(GeneratorSpec::y()),
            WitnessRequest::Qfi(GeneratorSpec::z()),
            WitnessRequest::Xi,
            WitnessRequest::Eta,
        ]
    }

    /// Parses a comma-free list entry; `all` yields several requests.
    pub fn parse_many(s: &str) -> Result<Vec<WitnessRequest>, String> {
        if s == "all" {
            Ok(Self::all())
        } else {
            s.parse().map(|r| vec![r])
        }
    }
}

impl FromStr for WitnessRequest {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(n, a)| (n, Some(a)));
        match (name, arg) {
            ("csi", None) => Ok(WitnessRequest::Csi { m: 1 }),
            ("csi", Some(m)) => match m.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(WitnessRequest::Csi { m }),
                _ => Err(format!("witness {s:?}: csi order M must be a positive integer")),
            },
            ("qfi", Some("x")) => Ok(WitnessRequest::Qfi(GeneratorSpec::x())),
            ("qfi", Some("y")) => Ok(WitnessRequest::Qfi(GeneratorSpec::y())),
            ("qfi", Some("z")) => Ok(WitnessRequest::Qfi(GeneratorSpec::z())),
            ("qfi", Some(v)) => {
                let parts: Vec<f64> = v
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("witness {s:?}: expected x, y, z or three comma-separated numbers"))?;
                let [x, y, z] = parts[..] else {
                    return Err(format!("witness {s:?}: a direction has three components"));
                };
                GeneratorSpec::new([x, y, z]).map(WitnessRequest::Qfi).map_err(|e| format!("witness {s:?}: {e}"))
            }
            ("xi", None) => Ok(WitnessRequest::Xi),
            ("eta", None) => Ok(WitnessRequest::Eta),
            _ => Err(format!("unknown witness {s:?}; expected csi[:M], qfi:x|y|z|NX,NY,NZ, xi, eta or all")),
        }
    }
}

impl fmt::Display for WitnessRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessRequest::Csi { m } => write!(f, "csi:{m}"),
            WitnessRequest::Qfi(g) => {
                let [x, y, z] = g.direction();
                write!(f, "qfi:{x},{y},{z}")
            }
            WitnessRequest::Xi => f.write_str("xi"),
            WitnessRequest::Eta => f.write_str("eta"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFailure {
    pub witness: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessOutput {
    pub state: StateSpec,
    pub report: WitnessReport,
    /// For number mixtures: `2m -> ` the ratio of each sector on its own.
    pub per_sector_csi: BTreeMap<usize, Vec<SectorCsi>>,
    /// Witnesses that could not be evaluated; the others are still reported.
    pub errors: Vec<WitnessFailure>,
}

impl WitnessOutput {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            3
        }
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        use crate::render::{opt, sig15};
        let r = &self.report;
        let flag = |b: bool| b.to_string();
        let mut rows = Vec::new();
        for (order, c) in &r.csi_by_order {
            rows.push(vec![
                "csi".into(),
                order.to_string(),
                sig15(*c),
                sig15(r.bounds.csi),
                flag(*c > r.bounds.csi + bosent::witnesses::VIOLATION_TOLERANCE),
                String::new(),
            ]);
        }
        for q in &r.qfi_by_generator {
            let [x, y, z] = q.direction.map(sig15);
            rows.push(vec![
                "qfi".into(),
                format!("{x} {y} {z}"),
                sig15(q.value),
                sig15(r.bounds.qfi),
                flag(q.value > r.bounds.qfi + bosent::witnesses::VIOLATION_TOLERANCE),
                String::new(),
            ]);
        }
        if let Some(x) = r.xi2 {
            rows.push(vec![
                "xi".into(),
                String::new(),
                sig15(x),
                sig15(r.bounds.xi2),
                flag(r.verdicts.entangled_by_spin_squeezing),
                String::new(),
            ]);
        }
        if r.eta2.is_some() {
            rows.push(vec!["eta".into(), String::new(), opt(r.eta2), String::new(), String::new(), String::new()]);
        }
        for e in &self.errors {
            rows.push(vec![e.witness.clone(), String::new(), String::new(), String::new(), String::new(), e.error.clone()]);
        }
        rows
    }
}

pub const CSV_HEADER: &str = "witness,parameter,value,bound,entangled,error";

/// Evaluates every request; failures are collected per witness.
pub fn run_witness(spec_source: &str, requests: &[WitnessRequest], n_max: usize) -> Result<WitnessOutput, CliError> {
    let spec = StateSpec::parse(spec_source)?;
    let state = spec.build(n_max)?;
    let requests = if requests.is_empty() { WitnessRequest::all() } else { requests.to_vec() };
    Ok(evaluate(spec, &state, &requests))
}

pub fn evaluate(spec: StateSpec, state: &BuiltState, requests: &[WitnessRequest]) -> WitnessOutput {
    let mut values = WitnessValues::default();
    let mut per_sector = BTreeMap::new();
    let mut errors = Vec::new();
    let mut fail = |r: &WitnessRequest, e: bosent::Error| {
        errors.push(WitnessFailure { witness: r.to_string(), error: e.to_string() });
    };

    let generators: Vec<GeneratorSpec> = requests
        .iter()
        .filter_map(|r| match r {
            WitnessRequest::Qfi(g) => Some(*g),
            _ => None,
        })
        .collect();
    let qfi_values = if generators.is_empty() { Ok(Vec::new()) } else { qfi_many(state, &generators) };

    for r in requests {
        match r {
            WitnessRequest::Csi { m } => {
                match integrated_g2m(state, *m).and_then(|c| csi_ratio(&c)) {
                    Ok(c) => {
                        values.csi_by_order.insert(2 * m, c);
                    }
                    Err(e) => fail(r, e),
                }
                if let Some(mix) = state.as_mixture() {
                    per_sector.insert(2 * m, per_sector_csi(mix, *m));
                }
            }
            WitnessRequest::Qfi(g) => match &qfi_values {
                Ok(v) => {
                    let i = generators.iter().position(|h| h == g).expect("collected above");
                    if !values.qfi.iter().any(|(h, _)| h == g) {
                        values.qfi.push((*g, v[i]));
                    }
                }
                Err(e) => fail(r, e.clone()),
            },
            WitnessRequest::Xi => match spin_squeezing(state) {
                Ok(x) => values.xi2 = Some(x),
                Err(e) => fail(r, e),
            },
            WitnessRequest::Eta => match number_squeezing_direct(state) {
                Ok(x) => values.eta2 = Some(x),
                Err(e) => fail(r, e),
            },
        }
    }
    let report = classify(&values, state.mean_number());
    WitnessOutput { state: spec, report, per_sector_csi: per_sector, errors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_parsing() {
        assert_eq!("csi".parse(), Ok(WitnessRequest::Csi { m: 1 }));
        assert_eq!("csi:3".parse(), Ok(WitnessRequest::Csi { m: 3 }));
        assert_eq!("qfi:y".parse(), Ok(WitnessRequest::Qfi(GeneratorSpec::y())));
        let WitnessRequest::Qfi(g) = "qfi:3,0,4".parse().unwrap() else { panic!() };
        assert!((g.direction()[0] - 0.6).abs() < 1e-15 && (g.direction()[2] - 0.8).abs() < 1e-15);
        assert_eq!(WitnessRequest::parse_many("all").unwrap().len(), 6);
        for bad in ["csi:0", "csi:x", "qfi", "qfi:1,2", "qfi:0,0,0", "zeta", "xi:2"] {
            assert!(bad.parse::<WitnessRequest>().is_err(), "{bad}");
        }
        assert_eq!(WitnessRequest::Csi { m: 2 }.to_string(), "csi:2");
    }

    #[test]
    fn twin_fock_report() {
        let requests = [WitnessRequest::Csi { m: 1 }, WitnessRequest::Qfi(GeneratorSpec::x())];
        let out = run_witness("kind = \"twin_fock\"\nn = 20\n", &requests, 256).unwrap();
        assert!((out.report.csi_by_order[&2] - 10.0 / 9.0).abs() < 1e-12);
        assert!((out.report.qfi_by_generator[0].value - 220.0).abs() < 1e-9);
        assert!(out.report.verdicts.entangled_by_csi && out.report.verdicts.entangled_by_qfi);
        assert_eq!(out.exit_code(), 0);

        let out = run_witness("kind = \"twin_fock\"\nn = 20\n", &[WitnessRequest::Xi], 256).unwrap();
        assert_eq!(out.exit_code(), 3);
        assert!(out.errors[0].error.contains("mean spin"), "{:?}", out.errors);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(run_witness("kind = 3", &[], 256), Err(CliError::Spec(_))));
        let mix = "kind = \"mixture\"\nn = 300\n[[components]]\nweight = 1\nkind = \"dicke\"\nk = 0\n";
        assert!(matches!(run_witness(mix, &[], 256), Err(CliError::Spec(_))));
    }
}
