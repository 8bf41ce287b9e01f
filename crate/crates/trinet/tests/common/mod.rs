//! Shared oracles for the integration and acceptance suites. Everything
//! here is written independently of the library's implementation paths.
#![allow(dead_code)]

pub mod gradcheck;
pub mod jacobi;

/// One pass/fail line per acceptance criterion.
pub fn report(name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}

/// Deterministic linear-congruential stream for test-instance generation,
/// independent of the library's generators.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
