fn main() {
    let (code, doc) = hbspace::cli::run(std::env::args_os());
    println!("{}", serde_json::to_string_pretty(&doc).expect("JSON output"));
    std::process::exit(code);
}
