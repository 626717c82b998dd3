//! CSV ingestion: rows are observations and columns are variables unless
//! the caller transposes.

use std::io::Read;

use factorboot::linalg::{prepare, DataMatrix};

use crate::error::{CliError, CliResult};

const MISSING: [&str; 5] = ["", "na", "nan", "null", "."];

fn parse_cell(s: &str, row: usize, col: usize) -> CliResult<Option<f64>> {
    let t = s.trim();
    if MISSING.contains(&t.to_ascii_lowercase().as_str()) {
        return Ok(None);
    }
    t.parse::<f64>()
        .map(Some)
        .map_err(|_| CliError::Input(format!("row {}, column {}: '{t}' is not a number", row + 1, col + 1)))
}

/// Parsed panel before cleaning: `cells[variable][time]`.
#[derive(Debug)]
pub struct RawPanel {
    pub cells: Vec<Vec<Option<f64>>>,
    pub header: Option<Vec<String>>,
}

impl RawPanel {
    pub fn missing(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_none()).count()
    }
}

pub fn read_panel<R: Read>(reader: R, transpose: bool) -> CliResult<RawPanel> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(false).from_reader(reader);
    let mut rows: Vec<Vec<String>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Input(format!("malformed CSV: {e}")))?;
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    // a first row with any non-numeric, non-missing cell is a header
    let header = match rows.first() {
        Some(first)
            if first.iter().any(|c| {
                let t = c.trim();
                !MISSING.contains(&t.to_ascii_lowercase().as_str()) && t.parse::<f64>().is_err()
            }) =>
        {
            Some(rows.remove(0))
        }
        _ => None,
    };
    if rows.is_empty() {
        return Err(CliError::Input("CSV has no data rows".into()));
    }
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, c)| parse_cell(c, i, j)).collect::<CliResult<Vec<_>>>())
        .collect::<CliResult<Vec<_>>>()?;
    let cells = if transpose {
        parsed
    } else {
        let cols = parsed[0].len();
        (0..cols).map(|j| parsed.iter().map(|r| r[j]).collect()).collect()
    };
    Ok(RawPanel { cells, header })
}

/// Cleans a raw panel into the p×n matrix used by the estimators.
pub fn to_matrix(raw: &RawPanel, standardize: bool, impute: bool) -> CliResult<DataMatrix> {
    let missing = raw.missing();
    if missing > 0 && !impute {
        return Err(CliError::Input(format!("{missing} missing cells; pass --impute to interpolate them")));
    }
    Ok(prepare(&raw.cells, standardize)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_detection_and_orientation() {
        let csv = "a,b,c\n1,2,3\n4,5,6\n";
        let p = read_panel(csv.as_bytes(), false).unwrap();
        assert_eq!(p.header.as_deref(), Some(&["a".to_string(), "b".into(), "c".into()][..]));
        assert_eq!(p.cells.len(), 3);
        assert_eq!(p.cells[1], vec![Some(2.0), Some(5.0)]);
        let t = read_panel("1,2,3\n4,5,6\n".as_bytes(), true).unwrap();
        assert!(t.header.is_none());
        assert_eq!(t.cells, vec![vec![Some(1.0), Some(2.0), Some(3.0)], vec![Some(4.0), Some(5.0), Some(6.0)]]);
    }

    #[test]
    fn missing_cells_need_impute() {
        let p = read_panel("1,2\n,5\n3,NA\n".as_bytes(), false).unwrap();
        assert_eq!(p.missing(), 2);
        assert!(matches!(to_matrix(&p, false, false), Err(CliError::Input(_))));
        let m = to_matrix(&p, false, true).unwrap();
        assert_eq!(m.values()[(0, 1)], 2.0);
    }

    #[test]
    fn garbage_and_ragged_rows_are_rejected() {
        assert!(read_panel("1,2\n3,x\n".as_bytes(), false).is_err());
        assert!(read_panel("1,2\n3\n".as_bytes(), false).is_err());
        assert!(read_panel("".as_bytes(), false).is_err());
    }
}
