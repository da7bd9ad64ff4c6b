use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

/// On-disk instance format; M is the length of `machine_weights`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    processing_times: Vec<u64>,
    machine_weights: Vec<u64>,
    /// Optional cross-check of the weight vector length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_machines: Option<usize>,
}

pub fn load_instance(bytes: &[u8]) -> Result<Instance> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::validation("instance", format!("not UTF-8: {e}")))?;
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::validation("instance", format!("malformed JSON: {e}")))?;
    if let Some(m) = file.max_machines {
        if m != file.machine_weights.len() {
            return Err(Error::validation(
                "machine_weights",
                format!("{} weights given for M={m}", file.machine_weights.len()),
            ));
        }
    }
    Instance::new(file.processing_times, file.machine_weights)
}

/// Compact JSON that [`load_instance`] reads back unchanged.
pub fn instance_to_json(instance: &Instance) -> String {
    let file = InstanceFile {
        processing_times: instance.processing_times().to_vec(),
        machine_weights: instance.machine_weights().to_vec(),
        max_machines: None,
    };
    serde_json::to_string(&file).expect("plain integers serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let inst = load_instance(br#"{"processing_times":[3,1],"machine_weights":[1,1]}"#).unwrap();
        assert_eq!(inst.processing_times(), &[3, 1]);
        assert_eq!(inst.max_machines(), 2);
        assert_eq!(load_instance(instance_to_json(&inst).as_bytes()).unwrap(), inst);
    }

    #[test]
    fn errors_name_the_field() {
        let field = |text: &str| match load_instance(text.as_bytes()) {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        };
        assert_eq!(field(r#"{"processing_times":[1],"machine_weights":[1],"max_machines":2}"#), "machine_weights");
        assert_eq!(field(r#"{"processing_times":[0],"machine_weights":[1]}"#), "processing_times");
        assert_eq!(field(r#"{"processing_times":[1]"#), "instance");
    }
}
