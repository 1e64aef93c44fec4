//! Optional `key = value` file whose entries act as flags not given on the
//! command line.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Command};

pub fn read(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key = value", path.display(), n + 1);
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Appends `--key value` for each config entry that names a long flag of
/// the chosen command path and is not already on the command line.
pub fn merge(args: &[String], entries: &[(String, String)], root: &Command, path: &[String]) -> Result<Vec<String>> {
    let mut cmd = root;
    let mut known: Vec<&clap::Arg> = cmd.get_arguments().collect();
    for name in path {
        cmd = cmd.find_subcommand(name).expect("parsed subcommand exists");
        known.extend(cmd.get_arguments());
    }
    let mut out = args.to_vec();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let Some(arg) = known.iter().find(|a| a.get_long() == Some(key.as_str())) else {
            bail!("config key `{key}` is not a flag of this command");
        };
        let flag = format!("--{key}");
        if args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => {
                if value.parse::<bool>().with_context(|| format!("config key `{key}` needs true or false"))? {
                    out.push(flag);
                }
            }
            _ => {
                out.push(flag);
                out.push(value.clone());
            }
        }
    }
    Ok(out)
}
