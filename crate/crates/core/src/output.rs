//! Byte-deterministic JSON, CSV and SVG writers.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::geometry::DeloneSet;

/// 17 significant digits in scientific notation; non-finite values become `null`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Pretty JSON with fixed float formatting and sorted object keys.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short numeric arrays stay on one line
            if items.len() <= 8 && items.iter().all(|i| i.is_number() || i.is_null()) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*key], indent + 1, out);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Sites as circles of radius `r_pack`, filled by `values` on a blue–red ramp.
pub fn lattice_svg(set: &DeloneSet, values: &[f64]) -> String {
    let (lo, hi) = match set.dim {
        1 => ([set.window.lo[0], -1.0], [set.window.hi[0], 1.0]),
        _ => ([set.window.lo[0], set.window.lo[1]], [set.window.hi[0], set.window.hi[1]]),
    };
    let pad = 2.0 * set.r_pack;
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let scale = 600.0 / w.max(h).max(1e-9);
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.1}" height="{:.1}">"#,
        w * scale,
        h * scale
    );
    for (i, p) in set.points.iter().enumerate() {
        let x = (p.0[0] - lo[0] + pad) * scale;
        let y = if set.dim == 1 { h * scale / 2.0 } else { (hi[1] - p.0[1] + pad) * scale };
        let v = values.get(i).copied().unwrap_or(0.0);
        let t = if vmax > vmin { (v - vmin) / (vmax - vmin) } else { 0.5 };
        let color = format!("rgb({},{},{})", (255.0 * t).round(), 64, (255.0 * (1.0 - t)).round());
        let _ = writeln!(out, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{color}"/>"#, set.r_pack * scale);
    }
    let _ = writeln!(
        out,
        r#"  <text x="4" y="14" font-size="12">{} sites, r = {:.3}</text>"#,
        set.len(),
        set.r_pack
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_fixed_width() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "null");
        let v = serde_json::json!({"b": 1, "a": [0.5, f64::NAN], "c": "x"});
        let s = to_json(&v).unwrap();
        assert_eq!(s, "{\n  \"a\": [5.0000000000000000e-1, null],\n  \"b\": 1,\n  \"c\": \"x\"\n}\n");
        assert_eq!(to_json(&v).unwrap(), s);
    }
}
