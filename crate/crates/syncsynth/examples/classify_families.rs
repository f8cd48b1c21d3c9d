//! Shift and shiftlag finiteness of the basic synchronization shapes.

use syncsynth::corpus;
use syncsynth::sync::{shift_finiteness, shiftlag_finiteness, ShiftlagVerdict};

fn main() -> syncsynth::Result<()> {
    for (shape, lang) in corpus::families() {
        let shift = if shift_finiteness(&lang).is_finite() { "finite" } else { "infinite" };
        let cert = shiftlag_finiteness(&lang, None)?;
        let shiftlag = match &cert.verdict {
            ShiftlagVerdict::Finite { m, nu } => format!("finite (m = {m}, nu = {nu})"),
            ShiftlagVerdict::Infinite { witness } => format!("infinite, pumps along {witness}"),
        };
        println!("{shape:<14} shift {shift:<9} shiftlag {shiftlag}");
    }
    Ok(())
}
