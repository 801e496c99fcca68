// Every example must keep running.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));

            #[test]
            fn runs() {
                run_example().expect(concat!($file, " should run"));
            }
        }
    };
}

example!(represent, "represent.rs");
example!(invert, "invert.rs");
example!(spectrum, "spectrum.rs");
example!(trace_det, "trace_det.rs");
example!(exponential, "exponential.rs");
example!(fredholm, "fredholm.rs");
example!(oracle, "oracle.rs");
example!(documents, "documents.rs");
