/// Counts real scalar multiplications performed by a fast-apply call.
///
/// Only multiplications are counted; additions are free. This is the
/// convention used for the closed-form cost recursions that the fast
/// transforms are certified against.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    multiplications: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, mults: u64) {
        self.multiplications += mults;
    }

    pub fn reset(&mut self) {
        self.multiplications = 0;
    }

    pub fn multiplications(&self) -> u64 {
        self.multiplications
    }
}
