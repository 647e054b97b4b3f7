use std::fmt;
use std::path::Path;

/// A problem in a data file, tied to a 1-based line where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct DataError {
    pub path: String,
    pub line: Option<usize>,
    pub reason: String,
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.path, line, self.reason),
            None => write!(f, "{}: {}", self.path, self.reason),
        }
    }
}

/// Parses lifetimes: values separated by commas and/or whitespace, any number
/// per line; blank lines and lines starting with `#` are skipped.
pub fn parse_values(text: &str, path: &str) -> Result<Vec<f64>, DataError> {
    let err = |line: usize, reason: String| DataError {
        path: path.to_string(),
        line: Some(line),
        reason,
    };
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        for token in trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v: f64 = token
                .parse()
                .map_err(|_| err(line_no, format!("`{token}` is not a number")))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(err(line_no, format!("`{token}` is not a finite positive lifetime")));
            }
            values.push(v);
        }
    }
    if values.len() < 2 {
        return Err(DataError {
            path: path.to_string(),
            line: None,
            reason: format!("need at least 2 observations, found {}", values.len()),
        });
    }
    Ok(values)
}

pub fn read_values(path: &Path) -> Result<Vec<f64>, DataError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| DataError {
        path: shown.clone(),
        line: None,
        reason: e.to_string(),
    })?;
    parse_values(&text, &shown)
}
