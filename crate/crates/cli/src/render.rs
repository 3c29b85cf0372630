//! Plain text rendering of output documents. Keys come out in sorted
//! order (serde_json maps are ordered), so the text form is as
//! deterministic as the JSON form.

use serde_json::Value;

pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    node(v, 0, &mut out);
    out
}

fn node(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (key, val) in m {
                entry(key, val, indent, out);
            }
        }
        other => {
            out.push_str(&" ".repeat(indent));
            out.push_str(&scalar(other));
            out.push('\n');
        }
    }
}

fn entry(key: &str, val: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match val {
        Value::Object(m) if !m.is_empty() => {
            out.push_str(&format!("{pad}{key}:\n"));
            node(val, indent + 2, out);
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for item in items {
                out.push_str(&format!("{pad}  -\n"));
                node(item, indent + 4, out);
            }
        }
        other => {
            out.push_str(&format!("{pad}{key}: {}\n", scalar(other)));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
