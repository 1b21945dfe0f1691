use std::time::Instant;

use clap::Parser;

fn main() {
    let cli = muloc_cli::Cli::parse();
    let start = Instant::now();
    match muloc_cli::run(&cli) {
        Ok(report) => {
            let rendered = if cli.json_lines {
                report.render_json_lines()
            } else {
                report.render_human(start.elapsed())
            };
            print!("{rendered}");
            std::process::exit(report.exit_code());
        }
        Err(e) => {
            eprintln!("muloc: {e}");
            std::process::exit(2);
        }
    }
}
