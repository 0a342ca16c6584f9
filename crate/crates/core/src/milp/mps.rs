//! Fixed-format MPS export.
//!
//! Rows are named `C0..`, columns `X0..` in declaration order, the objective
//! row is `OBJ`. Binaries are wrapped in `'MARKER' 'INTORG'/'INTEND'` and
//! additionally declared `BV` in the BOUNDS section, which keeps parsers with
//! either convention on the same model. An OBJSENSE section records the
//! optimization direction (several common readers default to minimize).

use super::model::{Direction, MilpModel, Sense, VarKind};

fn fmt_value(v: f64) -> String {
    // 12-char fixed-format value field; shortest representation that
    // round-trips to well below solver tolerances.
    let s = format!("{v:.10}");
    if s.len() <= 12 && s.parse::<f64>().map(|p| (p - v).abs()) == Ok(0.0) {
        return s;
    }
    format!("{v:.6e}")
}

/// Renders the model as fixed-format MPS text.
pub fn export_mps(model: &MilpModel, name: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("NAME          {name}\n"));
    let (_, direction) = model.objective();
    out.push_str("OBJSENSE\n");
    out.push_str(match direction {
        Direction::Maximize => "    MAX\n",
        Direction::Minimize => "    MIN\n",
    });

    out.push_str("ROWS\n");
    out.push_str(" N  OBJ\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        out.push_str(&format!(" {tag}  C{i}\n"));
    }

    // Column-major view: all entries of a column must be contiguous.
    let nvars = model.num_vars();
    let mut col_entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); nvars];
    let (obj_terms, _) = model.objective();
    for &(v, coef) in obj_terms {
        col_entries[v].push(("OBJ".to_string(), coef));
    }
    for (i, c) in model.constraints().iter().enumerate() {
        for &(v, coef) in &c.terms {
            col_entries[v].push((format!("C{i}"), coef));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_integer_block = false;
    let mut marker_count = 0usize;
    for (v, var) in model.variables().iter().enumerate() {
        let is_bin = var.is_binary();
        if is_bin && !in_integer_block {
            out.push_str(&format!(
                "    MARKER{marker_count:<22}'MARKER'                 'INTORG'\n"
            ));
            marker_count += 1;
            in_integer_block = true;
        } else if !is_bin && in_integer_block {
            out.push_str(&format!(
                "    MARKER{marker_count:<22}'MARKER'                 'INTEND'\n"
            ));
            marker_count += 1;
            in_integer_block = false;
        }
        let name = format!("X{v}");
        let entries = &col_entries[v];
        if entries.is_empty() {
            // Column must still exist; give it a zero objective entry.
            out.push_str(&format!("    {:<10}{:<10}{}\n", name, "OBJ", fmt_value(0.0)));
            continue;
        }
        for pair in entries.chunks(2) {
            let mut line = format!("    {name:<10}");
            for (row, coef) in pair {
                line.push_str(&format!("{:<10}{:<15}", row, fmt_value(*coef)));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
    if in_integer_block {
        out.push_str(&format!(
            "    MARKER{marker_count:<22}'MARKER'                 'INTEND'\n"
        ));
    }

    out.push_str("RHS\n");
    for (i, c) in model.constraints().iter().enumerate() {
        if c.rhs != 0.0 {
            out.push_str(&format!(
                "    {:<10}{:<10}{}\n",
                "RHS",
                format!("C{i}"),
                fmt_value(c.rhs)
            ));
        }
    }

    out.push_str("BOUNDS\n");
    for (v, var) in model.variables().iter().enumerate() {
        let name = format!("X{v}");
        match var.kind {
            VarKind::Binary => {
                out.push_str(&format!(" BV {:<10}{:<10}\n", "BND", name));
            }
            VarKind::Continuous { lower, upper } => {
                if lower == upper {
                    out.push_str(&format!(
                        " FX {:<10}{:<10}{}\n",
                        "BND",
                        name,
                        fmt_value(lower)
                    ));
                    continue;
                }
                match (lower.is_finite(), upper.is_finite()) {
                    (false, false) => {
                        out.push_str(&format!(" FR {:<10}{:<10}\n", "BND", name));
                    }
                    (true, false) => {
                        if lower != 0.0 {
                            out.push_str(&format!(
                                " LO {:<10}{:<10}{}\n",
                                "BND",
                                name,
                                fmt_value(lower)
                            ));
                        }
                    }
                    (false, true) => {
                        out.push_str(&format!(" MI {:<10}{:<10}\n", "BND", name));
                        out.push_str(&format!(
                            " UP {:<10}{:<10}{}\n",
                            "BND",
                            name,
                            fmt_value(upper)
                        ));
                    }
                    (true, true) => {
                        if lower != 0.0 {
                            out.push_str(&format!(
                                " LO {:<10}{:<10}{}\n",
                                "BND",
                                name,
                                fmt_value(lower)
                            ));
                        }
                        out.push_str(&format!(
                            " UP {:<10}{:<10}{}\n",
                            "BND",
                            name,
                            fmt_value(upper)
                        ));
                    }
                }
            }
        }
    }

    out.push_str("ENDATA\n");
    out
}
