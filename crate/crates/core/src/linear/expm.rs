/// Matrix exponential of a small dense real matrix by scaling and squaring
/// with a truncated Taylor series.
pub fn expm<const N: usize>(a: &[[f64; N]; N]) -> [[f64; N]; N] {
    let norm = (0..N).map(|j| (0..N).map(|i| a[i][j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0i32;
    if norm > 0.5 {
        s = (norm / 0.5).log2().ceil() as i32;
    }
    let scale = 2f64.powi(-s);
    let mut x = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            x[i][j] = a[i][j] * scale;
        }
    }
    let mut result = identity::<N>();
    let mut term = identity::<N>();
    for k in 1..=24 {
        term = matmul(&term, &x);
        let inv = 1.0 / k as f64;
        let mut small = true;
        for i in 0..N {
            for j in 0..N {
                term[i][j] *= inv;
                result[i][j] += term[i][j];
                if term[i][j].abs() > 1e-18 {
                    small = false;
                }
            }
        }
        if small {
            break;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

pub fn identity<const N: usize>() -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn matmul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut c = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn matvec<const N: usize>(a: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    let mut y = [0.0; N];
    for i in 0..N {
        y[i] = (0..N).map(|k| a[i][k] * x[k]).sum();
    }
    y
}

pub fn scale<const N: usize>(a: &[[f64; N]; N], s: f64) -> [[f64; N]; N] {
    let mut c = *a;
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    c
}

pub fn max_abs_diff<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> f64 {
    let mut m = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}
