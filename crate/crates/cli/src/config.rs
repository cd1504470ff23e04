//! `--config FILE`: a plain `key=value` file whose entries act as command
//! line flags. Flags given explicitly win over the file.

use std::ffi::OsString;

/// Parse `key=value` lines. Blank lines and `#` comments are ignored;
/// `key=true` means a bare switch.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() || k == "config" {
            return Err(format!("config line {}: bad key '{k}'", i + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn has_flag(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == long || s.starts_with(&format!("{long}="))
    })
}

/// Append config entries not already present on the command line.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let mut out = args.clone();
    for (k, v) in parse(&text)? {
        if has_flag(&args, &k) {
            continue;
        }
        if v == "true" {
            out.push(format!("--{k}").into());
        } else if v != "false" {
            out.push(format!("--{k}={v}").into());
        }
    }
    Ok(out)
}
