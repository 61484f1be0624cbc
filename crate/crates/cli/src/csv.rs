//! Deterministic CSV assembly and rendering: a header row always, one
//! data row per grid point, every number printed with 17 significant
//! digits, `\n` line endings. Rendering the same table twice yields
//! byte-identical output.

use wigner_core::phasetime::SweepTable;

/// A rectangular table of prerendered cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Formats a number with 17 significant digits (one integer digit plus
/// sixteen fractional digits of scientific notation), enough to
/// round-trip any binary double exactly.
pub fn format_number(value: f64) -> String {
    format!("{value:.16e}")
}

/// Joins one or more sweep runs over the same grid into a single wide
/// table.
///
/// The first column holds the swept parameter under `parameter_label`;
/// each run contributes one column per observable token, suffixed with
/// the run's variant tag when there is one. An `error` column is
/// appended only if at least one row failed; its cells carry the
/// engine's error code, prefixed by the variant tag when several runs
/// are joined. Cells of failed observables stay empty.
pub fn assemble(
    parameter_label: &str,
    parameter_values: &[f64],
    observable_tokens: &[String],
    runs: &[(Option<String>, SweepTable)],
) -> CsvTable {
    let mut columns = vec![parameter_label.to_string()];
    for (suffix, _) in runs {
        for token in observable_tokens {
            columns.push(match suffix {
                Some(tag) => format!("{token}@{tag}"),
                None => token.clone(),
            });
        }
    }
    let has_errors = runs
        .iter()
        .any(|(_, table)| table.rows.iter().any(|row| row.error.is_some()));
    if has_errors {
        columns.push("error".to_string());
    }

    let rows = parameter_values
        .iter()
        .enumerate()
        .map(|(i, &parameter)| {
            let mut cells = vec![format_number(parameter)];
            for (_, table) in runs {
                for value in &table.rows[i].values {
                    cells.push(value.map(format_number).unwrap_or_default());
                }
            }
            if has_errors {
                let marks: Vec<String> = runs
                    .iter()
                    .filter_map(|(suffix, table)| {
                        table.rows[i].error.map(|code| match suffix {
                            Some(tag) => format!("{tag}:{code}"),
                            None => code.to_string(),
                        })
                    })
                    .collect();
                cells.push(marks.join(";"));
            }
            cells
        })
        .collect();

    CsvTable { columns, rows }
}
