use std::env;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let config = cbindgen::Config::from_root_or_default(&crate_dir);
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/eomq.h"));
        }
        Err(e) => {
            // Header generation failing should not break `cargo build` for
            // consumers without cbindgen support; surface it as a warning.
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
}
