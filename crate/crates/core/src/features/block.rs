use std::ops::Range;

use crate::error::{Result, TadError};

/// Rectangular analysis blocks: `window_length` samples, advanced by `hop`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockParams {
    pub window_length: usize,
    pub hop: usize,
}

impl Default for BlockParams {
    /// 256-sample window, 16-sample hop (1 ms at 16 kHz).
    fn default() -> Self {
        BlockParams { window_length: 256, hop: 16 }
    }
}

impl BlockParams {
    pub fn new(window_length: usize, hop: usize) -> Result<Self> {
        let p = BlockParams { window_length, hop };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.window_length == 0 {
            return Err(TadError::invalid("window_length and hop must be positive"));
        }
        if self.hop > self.window_length {
            return Err(TadError::invalid("hop must not exceed window_length"));
        }
        Ok(())
    }

    /// floor((len - window) / hop) + 1, or 0 when the signal is shorter than one window.
    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.window_length {
            0
        } else {
            (len - self.window_length) / self.hop + 1
        }
    }

    pub fn range(&self, t: usize) -> Range<usize> {
        let start = t * self.hop;
        start..start + self.window_length
    }
}
