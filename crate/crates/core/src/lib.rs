pub mod cnum;
pub mod exactpoly;
pub mod roots;
pub mod upoly;
pub mod words;
pub mod quatalg;
pub mod numeric;
pub mod wordpoly;
pub mod discreteness;
pub mod zeroset;

/// Cap the global rayon pool at `TRACEPOLY_THREADS` when set. Has no effect once the
/// pool is running.
pub fn configure_threads() {
    if let Some(n) = std::env::var("TRACEPOLY_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
