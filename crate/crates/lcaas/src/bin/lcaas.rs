#[tokio::main]
async fn main() {
    let code = lcaas::cli::run_from_args().await;
    std::process::exit(code as i32);
}
