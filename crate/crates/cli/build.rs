fn main() {
    for (key, var) in [("REID_BUILD_TARGET", "TARGET"), ("REID_BUILD_PROFILE", "PROFILE")] {
        let value = std::env::var(var).unwrap_or_else(|_| "unknown".into());
        println!("cargo:rustc-env={key}={value}");
    }
}
