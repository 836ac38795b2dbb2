#pragma once

#include <iosfwd>
#include <string>

namespace rangeview {

/// Runs the command-line interface. Returns 0 on success, 1 on a usage
/// error and 2 when an input cannot be processed.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Fixed notation with `digits` significant digits, classic locale.
std::string format_fixed(double value, int digits = 6);

}  // namespace rangeview
