#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

namespace fracsep {

// shortest round-trip decimal for a double
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvMeta {
    std::string schema;
    std::string config_hash = "0";
    uint64_t seed = 0;
};

inline void write_meta_line(std::ostream& os, const CsvMeta& meta) {
    os << "# schema=" << meta.schema << " config=" << meta.config_hash << " seed=" << meta.seed << "\n";
}

}  // namespace fracsep
