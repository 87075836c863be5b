#pragma once

// Command-line front end. Exit codes: 0 success or all checks passed,
// 1 verification failure, 2 operational error.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fuchs::cli {

/// Runs one command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Manifest document of one catalog entry, as written under catalog/manifests.
std::string manifest_text(std::string_view id);

/// "p/q" when v is within 1e-9 of a rational with denominator <= 1000,
/// otherwise the shortest decimal; complex values as "a+b*I".
std::string rational_text(double v);

}  // namespace fuchs::cli
