/// Population mean, variance, skewness and kurtosis. Skewness and
/// kurtosis are 0 when the standard deviation is below `1e-12`.
pub fn four_moments(values: impl IntoIterator<Item = f64> + Clone) -> [f64; 4] {
    let mut n = 0usize;
    let mut sum = 0.0;
    for v in values.clone() {
        n += 1;
        sum += v;
    }
    if n == 0 {
        return [0.0; 4];
    }
    let nf = n as f64;
    let mean = sum / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let sd = m2.sqrt();
    if sd < 1e-12 {
        [mean, m2, 0.0, 0.0]
    } else {
        [mean, m2, m3 / (sd * sd * sd), m4 / (m2 * m2)]
    }
}


/// Symmetric (edge-repeating) reflection of `i` into `0..n`.
pub fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    while i < 0 || i >= n {
        i = if i < 0 { -i - 1 } else { 2 * n - i - 1 };
    }
    i as usize
}
