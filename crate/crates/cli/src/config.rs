//! Turns `--config FILE` into ordinary command-line tokens.
//!
//! The file holds one JSON object. `"command"` names the subcommand and every
//! other key becomes a long flag, so `{"command": "f-surface", "t": "0:1:0.5"}`
//! reads as `f-surface --t 0:1:0.5`. Flags given on the real command line come
//! later and win.

use serde_json::Value;

fn flag_value(key: &str, v: &Value) -> Result<Option<String>, String> {
    Ok(match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(_) | Value::Null => None,
        Value::Array(items) => Some(
            items
                .iter()
                .map(|i| match i {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(format!("config key `{key}` may only list strings or numbers")),
                })
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
        ),
        Value::Object(_) => return Err(format!("config key `{key}` cannot be an object")),
    })
}

fn tokens(text: &str) -> Result<Vec<String>, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
    let Value::Object(map) = value else {
        return Err("config must be a JSON object".into());
    };
    let mut out = Vec::new();
    if let Some(cmd) = map.get("command") {
        let Value::String(cmd) = cmd else { return Err("config `command` must be a string".into()) };
        out.push(cmd.clone());
    }
    for (key, v) in &map {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match (v, flag_value(key, v)?) {
            (Value::Bool(true), _) => out.push(flag),
            (_, Some(s)) => {
                out.push(flag);
                out.push(s);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Splices the config tokens in after the program name.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    let prog = it.next().unwrap_or_else(|| "ctqc".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a file")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let mut out = vec![prog];
    if let Some(p) = path {
        let text = std::fs::read_to_string(&p).map_err(|e| format!("cannot read config {p}: {e}"))?;
        out.extend(tokens(&text)?);
    }
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn object_becomes_flags() {
        let t =
            tokens(r#"{"command": "f-surface", "t": "0:1:0.5", "r": [1, 2], "seed": 3, "selftest": false}"#).unwrap();
        assert_eq!(t, ["f-surface", "--r", "1,2", "--seed", "3", "--t", "0:1:0.5"]);
    }

    #[test]
    fn rejects_non_objects() {
        assert!(tokens("[1]").is_err());
        assert!(tokens(r#"{"t": {"a": 1}}"#).is_err());
    }
}
