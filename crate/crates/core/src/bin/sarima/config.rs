//! Flag defaults from a TOML file.
//!
//! Keys are long flag names (`train-end`, `test-len`, ...). Top-level keys
//! apply to whichever command accepts them; a `[search]`, `[fit]`, ...
//! table applies to that command only and its keys must exist. Values are
//! spliced into the argument list ahead of the user's own flags, so a flag
//! given on the command line overrides the file.

use std::ffi::OsString;
use std::path::Path;

use clap::ArgAction;

use sarima_core::{Error, Result};

/// Flags where setting one on the command line drops the file's other.
const EXCLUSIVE: &[&[&str]] = &[&["csv", "sgs"], &["forecast", "order"]];

pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn flag_tokens(arg: &clap::Arg, key: &str, value: &toml::Value) -> Result<Vec<String>> {
    let bad = |what: &str| Error::Config(format!("`{key}`: {what}"));
    match arg.get_action() {
        ArgAction::SetTrue => match value {
            toml::Value::Boolean(true) => Ok(vec![format!("--{key}")]),
            toml::Value::Boolean(false) => Ok(vec![]),
            _ => Err(bad("expected true or false")),
        },
        ArgAction::Count => match value {
            toml::Value::Integer(n) if *n >= 0 => Ok(vec![format!("--{key}"); *n as usize]),
            toml::Value::Boolean(b) => Ok(if *b { vec![format!("--{key}")] } else { vec![] }),
            _ => Err(bad("expected a count")),
        },
        _ => {
            let text = match value {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                toml::Value::Array(items) => items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => Ok(s.clone()),
                        toml::Value::Integer(i) => Ok(i.to_string()),
                        toml::Value::Float(f) => Ok(f.to_string()),
                        _ => Err(bad("arrays hold numbers or strings")),
                    })
                    .collect::<Result<Vec<_>>>()?
                    .join(","),
                toml::Value::Datetime(d) => d.to_string(),
                toml::Value::Table(_) => return Err(bad("unexpected table")),
            };
            Ok(vec![format!("--{key}={text}")])
        }
    }
}

/// Returns `argv` with the file's settings inserted after the subcommand.
pub fn merge(argv: Vec<OsString>, root: &clap::Command, path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("{}: {}", path.display(), e.message())))?;

    let Some((pos, sub)) = argv
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| root.find_subcommand(a.to_string_lossy().as_ref()).map(|s| (i, s)))
    else {
        return Ok(argv);
    };
    let name = sub.get_name().to_string();
    let user_flags: Vec<String> = argv[pos + 1..]
        .iter()
        .filter_map(|a| {
            let s = a.to_string_lossy();
            s.strip_prefix("--").map(|f| f.split('=').next().unwrap_or("").to_string())
        })
        .collect();
    let dropped = |key: &str| {
        EXCLUSIVE
            .iter()
            .filter(|group| group.contains(&key))
            .any(|group| group.iter().any(|other| *other != key && user_flags.iter().any(|u| u == other)))
    };
    let lookup = |key: &str| sub.get_arguments().find(|a| a.get_long() == Some(key)).cloned();

    let mut tokens = Vec::new();
    for (key, value) in &table {
        if key == "config" {
            return Err(Error::Config("`config` cannot be set from a config file".into()));
        }
        if let toml::Value::Table(section) = value {
            if root.find_subcommand(key).is_none() {
                return Err(Error::Config(format!("unknown command table `[{key}]`")));
            }
            if *key != name {
                continue;
            }
            for (k, v) in section {
                let arg = lookup(k).ok_or_else(|| Error::Config(format!("`{name}` has no flag `--{k}`")))?;
                if !dropped(k) {
                    tokens.extend(flag_tokens(&arg, k, v)?);
                }
            }
        } else if let Some(arg) = lookup(key) {
            if !dropped(key) {
                tokens.extend(flag_tokens(&arg, key, value)?);
            }
        } else if !root.get_subcommands().any(|s| s.get_arguments().any(|a| a.get_long() == Some(key))) {
            return Err(Error::Config(format!("unknown flag `{key}`")));
        }
    }
    let mut out = argv;
    out.splice(pos + 1..pos + 1, tokens.into_iter().map(OsString::from));
    Ok(out)
}
