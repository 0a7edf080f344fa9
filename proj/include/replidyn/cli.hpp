#pragma once

namespace replidyn {

// Command-line entry point (classify / simulate / portrait / basins /
// period). Returns 0 on success, 1 on input errors, 2 on numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace replidyn
