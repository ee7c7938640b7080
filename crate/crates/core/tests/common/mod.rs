#![allow(dead_code)]

use num_complex::Complex64;
use std::sync::OnceLock;

#[derive(Clone, Debug)]
pub struct RefRow {
    pub func: String,
    pub re: f64,
    pub im: f64,
    pub ref_re: f64,
    pub ref_im: f64,
}

impl RefRow {
    pub fn reference(&self) -> Complex64 {
        Complex64::new(self.ref_re, self.ref_im)
    }
}

pub fn reference_rows() -> &'static [RefRow] {
    static ROWS: OnceLock<Vec<RefRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        include_str!("../data/specfun_reference.csv")
            .lines()
            .skip(1)
            .map(|line| {
                let f: Vec<&str> = line.split(',').collect();
                let num = |i: usize| f[i].parse::<f64>().expect("number");
                RefRow {
                    func: f[0].to_string(),
                    re: num(1),
                    im: num(2),
                    ref_re: num(3),
                    ref_im: num(4),
                }
            })
            .collect()
    })
}
