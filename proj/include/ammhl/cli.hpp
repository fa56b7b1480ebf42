#pragma once

namespace ammhl {

// Subcommands: simulate, hedge-path, riccati, liquidity, sweep, decompose.
// Exit codes: 0 ok, 2 configuration / precondition / unsupported input,
// 3 numerical failure. Errors go to stderr as one JSON object per line.
int cli_main(int argc, char** argv);

}  // namespace ammhl
