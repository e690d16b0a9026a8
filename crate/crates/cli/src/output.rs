use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// CSV number: 17 significant digits, `inf`/`-inf`/`nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn csv_row(values: &[f64]) -> String {
    let mut line = values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// Write the whole document at once, to a file or standard output.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 3.926990816987241, -1.2e-300, 5e-324] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        assert_eq!(csv_row(&[1.0, -2.0]), "1.0000000000000000e0,-2.0000000000000000e0\n");
    }
}
