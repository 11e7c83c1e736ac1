pub mod cli;
pub mod conv;
pub mod dump;
pub mod elab;
pub mod env;
pub mod extract;
pub mod interp;
pub mod nbe;
pub mod pretty;
pub mod program;
pub mod surface;
pub mod syntax;
pub mod translate;
pub mod typeck;
pub mod value;

/// Runs `f` on a thread with a large stack. Checking and normalisation
/// recurse over terms, and numerals elaborate to deep terms.
pub fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(1 << 30)
            .spawn_scoped(s, f)
            .expect("spawn checker thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
