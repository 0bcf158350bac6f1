//! Small dense determinants.
//!
//! Everything here works on `nalgebra::DMatrix<f64>` of modest size (the
//! charge `N` or a Jacobi-Trudi order). [`det`] is the production route;
//! [`det_leibniz`] is the permutation expansion kept as an oracle.

use nalgebra::DMatrix;
use serde::Serialize;

/// Conditions above this are flagged on every determinant output.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Determinant with its 1-norm condition estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetValue {
    pub value: f64,
    /// `‖A‖₁‖A⁻¹‖₁`; infinite for singular input.
    pub condition: f64,
}

impl DetValue {
    pub fn ill_conditioned(&self) -> bool {
        !(self.condition <= ILL_CONDITIONED)
    }

    pub fn scaled(self, c: f64) -> DetValue {
        DetValue {
            value: self.value * c,
            condition: self.condition,
        }
    }
}

struct Lu {
    lu: DMatrix<f64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

fn lu_decompose(a: &DMatrix<f64>) -> Lu {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant of a non-square matrix");
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..n {
        let (p, max) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if max == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            lu.swap_rows(p, k);
            perm.swap(p, k);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
    }
    Lu {
        lu,
        perm,
        sign,
        singular,
    }
}

impl Lu {
    fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.lu.nrows()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    fn inverse(&self) -> Option<DMatrix<f64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.nrows();
        let mut inv = DMatrix::zeros(n, n);
        for col in 0..n {
            let mut x: Vec<f64> = (0..n)
                .map(|i| if self.perm[i] == col { 1.0 } else { 0.0 })
                .collect();
            for i in 0..n {
                for j in 0..i {
                    x[i] -= self.lu[(i, j)] * x[j];
                }
            }
            for i in (0..n).rev() {
                for j in i + 1..n {
                    x[i] -= self.lu[(i, j)] * x[j];
                }
                x[i] /= self.lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Some(inv)
    }
}

fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Determinant by LU with partial pivoting, plus condition estimate.
pub fn det_with_condition(a: &DMatrix<f64>) -> DetValue {
    if a.nrows() == 0 {
        return DetValue {
            value: 1.0,
            condition: 1.0,
        };
    }
    let lu = lu_decompose(a);
    let value = lu.det();
    let condition = match lu.inverse() {
        Some(inv) if value != 0.0 => norm1(a) * norm1(&inv),
        _ => f64::INFINITY,
    };
    DetValue { value, condition }
}

/// Determinant by LU with partial pivoting. The empty matrix has determinant 1.
pub fn det(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    lu_decompose(a).det()
}

/// Determinant of a matrix given by an entry function.
pub fn det_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> f64 {
    det(&DMatrix::from_fn(n, n, f))
}

/// Permutation (Leibniz) expansion. Factorial cost; meant for `n ≤ 6` oracles.
pub fn det_leibniz(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    permute(&mut perm, 0, 1.0, a, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, sign: f64, a: &DMatrix<f64>, total: &mut f64) {
    let n = perm.len();
    if k == n {
        *total += sign * (0..n).map(|i| a[(i, perm[i])]).product::<f64>();
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, if i == k { sign } else { -sign }, a, total);
        perm.swap(k, i);
    }
}

/// All permutations of `0..n` with their signs, in a fixed order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(perm: &mut Vec<usize>, k: usize, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if k == perm.len() {
            out.push((perm.clone(), sign));
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            go(perm, k + 1, if i == k { sign } else { -sign }, out);
            perm.swap(k, i);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), 0, 1.0, &mut out);
    out
}

/// `Π_{k=1}^{n} k!`
pub fn superfactorial(n: usize) -> f64 {
    let mut acc = 1.0;
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
        acc *= fact;
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
