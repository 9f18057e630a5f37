//! Model file layout, all UTF-8 text:
//!
//! ```text
//! meshclass-model
//! format 1
//! fingerprint <configuration fingerprint>
//! <single-line JSON body>
//! ```
//!
//! Maps are ordered and floats are written in shortest round-trip form, so
//! equal models produce identical bytes on every platform.

use std::io::{BufRead, Write};

use super::{ModelError, TrainedModel};

pub const MAGIC: &str = "meshclass-model";
pub const FORMAT_VERSION: u32 = 1;

pub fn save_model(model: &TrainedModel, mut sink: impl Write) -> Result<(), ModelError> {
    writeln!(sink, "{MAGIC}")?;
    writeln!(sink, "format {FORMAT_VERSION}")?;
    writeln!(sink, "fingerprint {}", model.fingerprint)?;
    serde_json::to_writer(&mut sink, model).map_err(|e| ModelError::Malformed(e.to_string()))?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

fn header_line(source: &mut impl BufRead) -> Result<String, ModelError> {
    let mut line = String::new();
    if source.read_line(&mut line)? == 0 || !line.ends_with('\n') {
        return Err(ModelError::Truncated);
    }
    line.pop();
    Ok(line)
}

pub fn load_model(mut source: impl BufRead) -> Result<TrainedModel, ModelError> {
    let magic = header_line(&mut source)?;
    if magic != MAGIC {
        return Err(ModelError::Version(format!("expected header `{MAGIC}`, found `{}`", magic.escape_debug())));
    }
    let format = header_line(&mut source)?;
    let version = format.strip_prefix("format ").and_then(|v| v.parse::<u32>().ok());
    if version != Some(FORMAT_VERSION) {
        return Err(ModelError::Version(format!("expected `format {FORMAT_VERSION}`, found `{format}`")));
    }
    let fingerprint = header_line(&mut source)?;
    let fingerprint = fingerprint
        .strip_prefix("fingerprint ")
        .ok_or_else(|| ModelError::Malformed("missing fingerprint line".into()))?
        .to_string();
    let mut body = String::new();
    source.read_to_string(&mut body)?;
    let mut model: TrainedModel = serde_json::from_str(&body).map_err(|e| {
        if e.is_eof() {
            ModelError::Truncated
        } else {
            ModelError::Malformed(e.to_string())
        }
    })?;
    if model.fingerprint != fingerprint {
        return Err(ModelError::Malformed("header fingerprint differs from body".into()));
    }
    model.features.rebuild_index();
    Ok(model)
}
