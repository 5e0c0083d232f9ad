#pragma once

// Command-line front end.  Subcommands: total-current, density-profile,
// detector-image, atom-laser, transition, validate.
//
// Exit codes: 0 success, 2 usage errors (unknown flags, malformed
// quantities, inconsistent grids), 1 numerical or I/O failures.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsrc::cli {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Dimension { Energy, Frequency, Length, Time, Force, Mass, Acceleration };

/// Parses "<number><unit>" (e.g. "100.5ueV", "2.5 kHz", "1mm") into SI.
/// Bare numbers and unknown units throw UsageError.
double parse_quantity(const std::string& text, Dimension dim);

/// Comma-separated list of quantities.
std::vector<double> parse_quantity_list(const std::string& text, Dimension dim);

/// Environment variable naming the directory for relative output paths.
inline constexpr const char* output_dir_env = "QSRC_OUTPUT_DIR";

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace qsrc::cli
