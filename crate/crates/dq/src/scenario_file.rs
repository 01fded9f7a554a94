//! Scenario JSON-lines: one flattened envelope plus `payload` per line.

use std::io::{self, BufRead, Write};

use dq_core::ingest::ScenarioMessage;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn read_scenario(reader: impl BufRead) -> Result<Vec<ScenarioMessage>, ScenarioFileError> {
    let mut messages = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let message = serde_json::from_str(&line).map_err(|source| ScenarioFileError::Json {
            line: index + 1,
            source,
        })?;
        messages.push(message);
    }
    Ok(messages)
}

pub fn write_scenario(messages: &[ScenarioMessage], mut writer: impl Write) -> io::Result<()> {
    for message in messages {
        serde_json::to_writer(&mut writer, message)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
