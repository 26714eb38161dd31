//! `key=value` experiment configs.
//!
//! A config names the subcommand with `command=...` and sets one long option
//! per line; `#` starts a comment. Boolean options take `true` or `false`.
//! The `config:` block of every text report is itself a valid config.

use std::collections::BTreeMap;
use std::fs;

use crate::args::Cli;

/// Parses config text into ordered `(key, value)` pairs.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((k.replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Turns config pairs into command-line arguments, subcommand first.
pub fn to_args(pairs: &[(String, String)]) -> Result<Vec<String>, String> {
    let command = pairs
        .iter()
        .find(|(k, _)| k == "command")
        .map(|(_, v)| v.clone())
        .ok_or("config has no command= line")?;
    let mut args = vec![command];
    for (k, v) in pairs.iter().filter(|(k, _)| k != "command") {
        match v.as_str() {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => {
                args.push(format!("--{k}"));
                args.push(v.clone());
            }
        }
    }
    Ok(args)
}

/// Replaces `--config PATH` with the invocation the file describes. Any other
/// arguments are kept after it and override the file.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::new();
    let mut path = None;
    let mut it = argv.into_iter();
    let bin = it.next().unwrap_or_else(|| "divring".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        let mut v = vec![bin];
        v.extend(rest);
        return Ok(v);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let file_args = to_args(&parse(&text)?)?;
    if let Some(first) = rest.first() {
        if !first.starts_with('-') {
            if *first != file_args[0] {
                return Err(format!("config runs {} but the command line names {first}", file_args[0]));
            }
            rest.remove(0);
        }
    }
    let mut v = vec![bin];
    v.extend(file_args);
    v.extend(rest);
    Ok(v)
}

/// The resolved configuration of a parsed invocation.
pub fn describe(cli: &Cli) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    map.insert("command".to_string(), cli.command.name().to_string());
    let format = serde_json::to_value(cli.format).expect("format serializes");
    map.insert("format".to_string(), format.as_str().unwrap_or_default().to_string());
    if let serde_json::Value::Object(params) = cli.command.parameters() {
        for (k, v) in params {
            let value = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            map.insert(k.replace('_', "-"), value);
        }
    }
    map
}

/// Renders a configuration as config-file text.
pub fn render(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[test]
    fn parses_and_expands() {
        let pairs = parse("# inversion\ncommand=invert\ngroup = c=-1\nx=1-t\ncheck_containment=true\nverify=false\n").unwrap();
        assert_eq!(pairs[1], ("group".to_string(), "c=-1".to_string()));
        let args = to_args(&pairs).unwrap();
        assert_eq!(args, ["invert", "--group", "c=-1", "--x", "1-t", "--check-containment"]);
        assert!(parse("novalue").is_err());
        assert!(to_args(&[("x".into(), "1".into())]).is_err());
    }

    #[test]
    fn described_config_round_trips() {
        let cli = Cli::try_parse_from(["divring", "invert", "--x", "1-t", "--a", "s", "--terms", "7"]).unwrap();
        let map = describe(&cli);
        assert_eq!(map["command"], "invert");
        assert_eq!(map["terms"], "7");
        assert_eq!(map["check-containment"], "false");
        let mut argv = vec!["divring".to_string()];
        argv.extend(to_args(&parse(&render(&map)).unwrap()).unwrap());
        let again = Cli::try_parse_from(argv).unwrap();
        assert_eq!(describe(&again), map);
    }
}
