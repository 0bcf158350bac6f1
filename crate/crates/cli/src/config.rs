//! `--config run.json`: a command and its flags stored as JSON.
//!
//! ```json
//! {"command": "matmodel one", "args": {"measure": "gauss:sigma=1", "rho": "exp", "N": 2, "a": [0.4, 0.1]}}
//! ```
//!
//! Arrays become comma-separated values, `true` adds a bare flag and `false`
//! omits it. The result is parsed exactly like the equivalent command line,
//! so unknown keys are rejected the same way.

use serde_json::Value;

/// Replaces `taukit --config FILE [--output PATH]` by the stored command line.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        return Ok(argv);
    };
    let path = argv.get(pos + 1).ok_or("--config needs a file")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let mut rest: Vec<String> = argv[1..pos].to_vec();
    rest.extend(argv[pos + 2..].iter().cloned());
    let mut out = vec![argv[0].clone()];
    out.extend(from_json(&text)?);
    out.extend(rest);
    Ok(out)
}

fn scalar(key: &str, v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(format!("config key {key:?}: expected a string or number")),
    }
}

pub fn from_json(text: &str) -> Result<Vec<String>, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("config: {e}"))?;
    let obj = v.as_object().ok_or("config must be a JSON object")?;
    if let Some(k) = obj.keys().find(|k| *k != "command" && *k != "args") {
        return Err(format!("unknown config key {k:?}"));
    }
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or("config needs a \"command\" string")?;
    let mut argv: Vec<String> = command.split_whitespace().map(String::from).collect();
    let Some(args) = obj.get("args") else {
        return Ok(argv);
    };
    let args = args.as_object().ok_or("config \"args\" must be an object")?;
    for (k, v) in args {
        let flag = format!("--{k}");
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) => {}
            Value::Array(xs) => {
                let parts = xs.iter().map(|x| scalar(k, x)).collect::<Result<Vec<_>, _>>()?;
                argv.push(flag);
                argv.push(parts.join(","));
            }
            other => {
                argv.push(flag);
                argv.push(scalar(k, other)?);
            }
        }
    }
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_command_line() {
        let argv = from_json(r#"{"command": "tau hypergeom", "args": {"rho": "exp", "N": 2, "a": [1, 0.5]}}"#).unwrap();
        assert_eq!(argv, ["tau", "hypergeom", "--rho", "exp", "--N", "2", "--a", "1,0.5"]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(from_json(r#"{"command": "verify", "extra": 1}"#).is_err());
        assert!(from_json(r#"{"args": {}}"#).is_err());
        assert!(from_json(r#"{"command": "verify", "args": {"x": {"y": 1}}}"#).is_err());
    }
}
