use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match sodkit_cli::execute(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code == 0 => {
            print!("{}", f.message);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message.trim_end());
            ExitCode::from(f.code)
        }
    }
}
