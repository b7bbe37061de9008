/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
