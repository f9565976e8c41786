#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace pgrid::tools {

inline constexpr const char* kToolVersion = "pgrid 0.1.0";

/// FNV-1a over the raw case-file bytes; stamped into every CSV so the
/// figure data stays traceable to its inputs.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

/// Metadata comment line: case hash, scale, sigma, tool version.
inline void write_csv_metadata(std::ostream& os, std::uint64_t case_hash, double scale,
                               const std::string& sigma_desc) {
    os << "# case=" << std::hex << case_hash << std::dec << " scale=" << format_double(scale)
       << " sigma=" << sigma_desc << " version=" << kToolVersion << "\n";
}

} // namespace pgrid::tools
