//! Small numeric helpers shared across modules.

/// Compensated (Kahan) summation.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = KahanAcc::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Running compensated accumulator for incremental prefix sums.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanAcc {
    sum: f64,
    carry: f64,
}

impl KahanAcc {
    pub fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// `ceil(x)`, snapping to the nearest integer when `x` sits within a relative
/// 1e-9 of it. Products like `0.1 * 10000` otherwise land a hair above the
/// integer they represent and would ceil one step too far.
pub(crate) fn ceil_snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}
