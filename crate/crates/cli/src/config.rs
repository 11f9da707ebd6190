//! `--config` files of `key = value` lines, merged under the command-line flags.

use crate::error::CliError;
use clap::Command;
use std::ffi::OsString;
use std::path::Path;

/// Value of `--config` in raw arguments, if any.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn has_flag(args: &[OsString], long: &str) -> bool {
    let bare = format!("--{long}");
    let eq = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == bare || s.starts_with(&eq)
    })
}

/// Parses `key = value` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Appends config entries to `args` as flags of the selected subcommand, unless the flag is
/// already present. Keys that are not flags of that subcommand are rejected.
pub fn merge_config(cmd: &Command, mut args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(file) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&file))
        .map_err(|e| CliError::Io(format!("config file {}: {e}", file.to_string_lossy())))?;
    let entries = parse_config(&text)?;
    let sub = args
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a.to_string_lossy().as_ref()))
        .ok_or_else(|| CliError::Usage("a subcommand is required".into()))?;
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "config key `{key}` is not a flag of `{}`",
                    sub.get_name()
                ))
            })?;
        if key == "config" || has_flag(&args, &key) {
            continue;
        }
        if arg.get_action().takes_values() {
            args.push(format!("--{key}").into());
            args.push(value.into());
        } else {
            match value.as_str() {
                "true" => args.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config key `{key}`: `{other}` is not true or false"
                    )))
                }
            }
        }
    }
    Ok(args)
}
