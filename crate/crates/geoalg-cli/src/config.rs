//! Optional `key = value` configuration file.

use std::collections::BTreeMap;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", no + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &str) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    parse(&text)
}

pub fn get_num<T: std::str::FromStr>(cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, String> {
    cfg.get(key)
        .map(|v| v.parse::<T>().map_err(|_| format!("config key {key}: cannot parse {v:?}")))
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = parse("# suites\nsuites = jacobi, braid\nn=4 # rank\n\n").unwrap();
        assert_eq!(c["suites"], "jacobi, braid");
        assert_eq!(get_num::<usize>(&c, "n").unwrap(), Some(4));
        assert!(parse("nonsense").is_err());
        assert!(get_num::<usize>(&parse("n = x").unwrap(), "n").is_err());
    }
}
