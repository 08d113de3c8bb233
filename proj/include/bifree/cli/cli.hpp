#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bifree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;

/// `args` excludes the program name. Results go to `out` (or --out), all
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelftestItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The golden examples, one item each.
std::vector<SelftestItem> run_selftest();

}  // namespace bifree::cli
