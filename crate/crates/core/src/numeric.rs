/// Neumaier-compensated running sum.
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

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `base^0, base^1, ..., base^max_exp` by repeated multiplication.
pub(crate) fn power_table(base: f64, max_exp: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(max_exp + 1);
    let mut p = 1.0;
    for _ in 0..=max_exp {
        table.push(p);
        p *= base;
    }
    table
}
