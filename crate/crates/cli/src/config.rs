//! Flat `key = value` run configs.
//!
//! ```text
//! # comments start with '#'
//! command = ud-test
//! expr = x^(3/2)
//! N = 100000
//! domain = primes
//! lebesgue = true
//! ```
//!
//! Every key except `command` names a long flag. Values from the file come
//! before the command-line flags, so flags given on the command line win.
//! `key = true` becomes a bare switch and `key = false` is dropped.

use std::path::Path;

use crate::args::COMMANDS;
use crate::CliError;

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(CliError::Validation(format!("config line {}: bad key {k:?}", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Merge `--config FILE` (anywhere in `argv`) into a plain argument vector.
pub fn expand_argv(argv: &[String]) -> Result<Vec<String>, CliError> {
    let mut rest: Vec<String> = Vec::with_capacity(argv.len());
    let mut config_path = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::Validation("--config needs a path".into()))?;
            config_path = Some(p.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    let bin = argv.first().cloned().unwrap_or_else(|| "primeud".into());
    let Some(path) = config_path else {
        let mut out = vec![bin];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Validation(format!("cannot read config {path}: {e}")))?;
    let pairs = parse_config(&text)?;

    let cli_command = rest.iter().position(|a| COMMANDS.contains(&a.as_str()));
    let file_command = pairs.iter().find(|(k, _)| k == "command").map(|(_, v)| v.clone());
    let command = match (cli_command, &file_command) {
        (Some(i), _) => rest.remove(i),
        (None, Some(c)) => c.clone(),
        (None, None) => return Err(CliError::Validation("no command on the command line or in the config".into())),
    };

    let mut out = vec![bin, command];
    for (k, v) in pairs.into_iter().filter(|(k, _)| k != "command") {
        match v.as_str() {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => {
                out.push(format!("--{k}"));
                out.push(v);
            }
        }
    }
    out.extend(rest);
    Ok(out)
}
