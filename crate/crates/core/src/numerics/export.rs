use std::io::Write;

use num_complex::Complex64;

use crate::diffpoly::FieldId;

use super::error::NumericsError;
use super::grid::GridState;

/// One row per grid point: `x`, then real and imaginary parts of each field.
pub fn write_snapshot_csv<W: Write>(w: W, state: &GridState) -> Result<(), NumericsError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["x".to_string()];
    for f in FieldId::ALL {
        header.push(format!("{f}_re"));
        header.push(format!("{f}_im"));
    }
    out.write_record(&header)?;
    for (j, x) in state.grid.points().enumerate() {
        let mut row = vec![x.to_string()];
        for f in FieldId::ALL {
            let z = state.field(f)[j];
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `t, value_re, value_im`.
pub fn write_monitor_csv<W: Write>(w: W, series: &[(f64, Complex64)]) -> Result<(), NumericsError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "value_re", "value_im"])?;
    for (t, v) in series {
        out.write_record([t.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
