//! Bit messages over per-edge singleton circuits.
//!
//! A frame lasts four rounds. The endpoint holding the outward orientation
//! owns rounds 1 and 2, its neighbour rounds 3 and 4. Each owner encodes its
//! message in its two rounds: beep-beep is 1, silence-silence is 0 and
//! silence-beep is "no message".

use crate::engine::ProgramError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orient {
    Unoriented,
    /// This endpoint sends in frame rounds 1-2.
    Out,
    /// This endpoint sends in frame rounds 3-4.
    In,
}

pub const FRAME_ROUNDS: usize = 4;

pub fn encode(msg: Option<bool>) -> [bool; 2] {
    match msg {
        Some(true) => [true, true],
        Some(false) => [false, false],
        None => [false, true],
    }
}

pub fn decode(code: [bool; 2]) -> Result<Option<bool>, ProgramError> {
    match code {
        [true, true] => Ok(Some(true)),
        [false, false] => Ok(Some(false)),
        [false, true] => Ok(None),
        [true, false] => Err(ProgramError::Protocol(
            "beep followed by silence is not a codeword".into(),
        )),
    }
}

/// Whether the endpoint with orientation `o` sends in frame round `r` (0-based).
pub fn sends_in(o: Orient, r: usize) -> bool {
    match o {
        Orient::Out => r < 2,
        Orient::In => (2..4).contains(&r),
        Orient::Unoriented => false,
    }
}
