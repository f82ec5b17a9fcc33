//! Best-worse-channel relay selection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionResult {
    /// Index of the selected relay.
    pub index: usize,
    /// `min(g1, g2)` at the selected relay, i.e. the achieved max-min value.
    pub worst_gain: f64,
}

/// Pick the relay whose weaker link is strongest.
///
/// `gains` holds the estimated selection-time gains `(|h_hat_s,1i|^2,
/// |h_hat_s,2i|^2)` of every relay. Ties go to the lowest index.
pub fn best_worse_channel<I>(gains: I) -> Result<SelectionResult>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut best: Option<SelectionResult> = None;
    for (index, (g1, g2)) in gains.into_iter().enumerate() {
        if !(g1 >= 0.0 && g2 >= 0.0) {
            return Err(Error::domain("best_worse_channel", format!("relay {index} has invalid gains ({g1}, {g2})")));
        }
        let worst = g1.min(g2);
        match best {
            Some(b) if worst <= b.worst_gain => {}
            _ => best = Some(SelectionResult { index, worst_gain: worst }),
        }
    }
    best.ok_or_else(|| Error::domain("best_worse_channel", "empty relay list"))
}
