//! Result rows and the invariant-enforcing CSV writer.
//!
//! All numeric fields are written in scientific notation with 12 significant
//! digits and a '.' decimal separator, so identical runs produce
//! byte-identical files.

use crate::error::CmdError;
use capa_core::{
    rates_for_order, sum_rate_capacity, sum_rate_upper_bound, LinkBudget, SicOrder, TwoUserChannel,
};

/// Sum rates of the two orders (and the capacity) must agree this tightly.
const ROW_SUM_TOL: f64 = 1e-9;

/// Format with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// One sweep row: channel statistics plus both orders' rates, the sum-rate
/// capacity, and its decoupled upper bound.
#[derive(Debug, Clone, Copy)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub a1: f64,
    pub a2: f64,
    pub rho_u_abs: f64,
    pub r1_12: f64,
    pub r2_12: f64,
    pub r1_21: f64,
    pub r2_21: f64,
    pub c: f64,
    pub c_upper: f64,
}

impl ResultRow {
    /// Evaluate every rate quantity for one channel realization.
    pub fn evaluate(
        sweep_value: f64,
        lb1: &LinkBudget,
        lb2: &LinkBudget,
        ch: &TwoUserChannel,
    ) -> Self {
        let rp12 = rates_for_order(lb1, lb2, ch, SicOrder::User1First);
        let rp21 = rates_for_order(lb1, lb2, ch, SicOrder::User2First);
        ResultRow {
            sweep_value,
            a1: ch.a1(),
            a2: ch.a2(),
            rho_u_abs: ch.rho_u_abs(),
            r1_12: rp12.r1,
            r2_12: rp12.r2,
            r1_21: rp21.r1,
            r2_21: rp21.r2,
            c: sum_rate_capacity(lb1, lb2, ch),
            c_upper: sum_rate_upper_bound(lb1, lb2, ch),
        }
    }

    /// Row invariants: the capacity never exceeds its upper bound and both
    /// orders sum to the capacity.
    pub fn validate(&self) -> Result<(), CmdError> {
        if self.c > self.c_upper + 1e-12 {
            return Err(CmdError::Verification(format!(
                "row {}: C = {} exceeds its upper bound {}",
                self.sweep_value, self.c, self.c_upper
            )));
        }
        for (label, sum) in [("1->2", self.r1_12 + self.r2_12), ("2->1", self.r1_21 + self.r2_21)]
        {
            if (sum - self.c).abs() > ROW_SUM_TOL {
                return Err(CmdError::Verification(format!(
                    "row {}: order {label} sums to {sum}, capacity is {}",
                    self.sweep_value, self.c
                )));
            }
        }
        Ok(())
    }

    pub const COLUMNS: [&'static str; 9] = [
        "a1", "a2", "rho_u_abs", "R1_12", "R2_12", "R1_21", "R2_21", "C", "C_upper",
    ];

    /// The nine numeric fields after the sweep value, in column order.
    pub fn fields(&self) -> [f64; 9] {
        [
            self.a1, self.a2, self.rho_u_abs, self.r1_12, self.r2_12, self.r1_21, self.r2_21,
            self.c, self.c_upper,
        ]
    }
}

/// Serialize rows with a leading sweep-variable column; validates every row.
pub fn rows_to_csv(
    sweep_name: &str,
    rows: &[ResultRow],
    extra: Option<(&str, &[f64])>,
) -> Result<String, CmdError> {
    let mut out = String::new();
    out.push_str(sweep_name);
    for c in ResultRow::COLUMNS {
        out.push(',');
        out.push_str(c);
    }
    if let Some((name, values)) = extra {
        assert_eq!(values.len(), rows.len());
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        row.validate()?;
        out.push_str(&fmt_sig(row.sweep_value));
        for f in row.fields() {
            out.push(',');
            out.push_str(&fmt_sig(f));
        }
        if let Some((_, values)) = extra {
            out.push(',');
            out.push_str(&fmt_sig(values[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Serialize paired rows (reference and variant) sharing one sweep column.
pub fn paired_rows_to_csv(
    sweep_name: &str,
    rows: &[ResultRow],
    variant_prefix: &str,
    variant_rows: &[ResultRow],
) -> Result<String, CmdError> {
    assert_eq!(rows.len(), variant_rows.len());
    let mut out = String::new();
    out.push_str(sweep_name);
    for c in ResultRow::COLUMNS {
        out.push(',');
        out.push_str(c);
    }
    for c in ResultRow::COLUMNS {
        out.push(',');
        out.push_str(variant_prefix);
        out.push_str(c);
    }
    out.push('\n');
    for (row, vrow) in rows.iter().zip(variant_rows) {
        row.validate()?;
        vrow.validate()?;
        out.push_str(&fmt_sig(row.sweep_value));
        for f in row.fields() {
            out.push(',');
            out.push_str(&fmt_sig(f));
        }
        for f in vrow.fields() {
            out.push(',');
            out.push_str(&fmt_sig(f));
        }
        out.push('\n');
    }
    Ok(out)
}
