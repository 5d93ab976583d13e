// SPDX-License-Identifier: MIT OR Apache-2.0

fn main() {
    std::process::exit(sara::cli::main_exit_code());
}
