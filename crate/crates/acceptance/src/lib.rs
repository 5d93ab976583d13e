// SPDX-License-Identifier: MIT OR Apache-2.0

//! Holds the `acceptance` test target only; run it with
//! `cargo test -p sara-acceptance`.
