//! Bit-exact message payloads.
//!
//! The engine accounts bandwidth in bits, so payloads are packed explicitly:
//! algorithms write fixed-width unsigned fields and read them back in the
//! same order. A single payload is capped at 128 bits, far above any
//! `O(log n)` budget this crate configures.

pub const MAX_MESSAGE_BITS: u32 = 128;

/// One CONGEST message: an opaque bit string plus its length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Message {
    bits: u128,
    len: u16,
}

impl Message {
    pub fn bit_len(&self) -> u32 {
        self.len as u32
    }

    pub fn reader(&self) -> MessageReader {
        MessageReader { msg: *self, pos: 0 }
    }
}

/// Packs fixed-width unsigned fields, least significant bits first.
#[derive(Default)]
pub struct MessageWriter {
    bits: u128,
    len: u32,
}

impl MessageWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(mut self, value: u64, width: u32) -> Self {
        assert!(width <= 64, "field width above 64 bits");
        assert!(
            width == 64 || value < (1u64 << width),
            "value {value} does not fit in {width} bits"
        );
        assert!(
            self.len + width <= MAX_MESSAGE_BITS,
            "message payload above {MAX_MESSAGE_BITS} bits"
        );
        self.bits |= (value as u128) << self.len;
        self.len += width;
        self
    }

    pub fn finish(self) -> Message {
        Message {
            bits: self.bits,
            len: self.len as u16,
        }
    }
}

/// Reads back fields written by [`MessageWriter`], in order.
pub struct MessageReader {
    msg: Message,
    pos: u32,
}

impl MessageReader {
    pub fn take(&mut self, width: u32) -> u64 {
        debug_assert!(self.pos + width <= self.msg.len as u32, "read past payload");
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let value = ((self.msg.bits >> self.pos) as u64) & mask;
        self.pos += width;
        value
    }
}

/// Bits needed to encode a vertex id in `0..n`, at least 1.
pub fn id_width(n: usize) -> u32 {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).max(1).leading_zeros()).max(1)
}

/// Bits needed to encode any counter value in `0..=max_value`.
pub fn count_width(max_value: u64) -> u32 {
    (u64::BITS - max_value.max(1).leading_zeros()).max(1)
}
