#pragma once

namespace biaxframe {

/// Exit codes: 0 ok, 1 unexpected failure, 2 configuration, 3 divergence or
/// instability, 4 I/O or file format.
int run_cli(int argc, char** argv);

}  // namespace biaxframe
