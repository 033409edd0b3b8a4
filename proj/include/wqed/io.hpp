// io.hpp — CSV/JSON emission with full round-trip precision
//
// CSV uses '.' decimals, 17 significant digits, LF endings, and embeds the
// resolved configuration as '#' header comments so any file can be replayed
// bit-identically.

#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "wqed/errors.hpp"
#include "wqed/observables.hpp"
#include "wqed/version.hpp"

namespace wqed {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_sweep_csv(const SweepResult& result, std::ostream& os) {
    os << "# " << version_string << "\n";
    os << "# config: " << result.metadata.dump() << "\n";
    os << "n_sites,gamma_over_J,h_over_J,alpha,quantity,value,flags\n";
    for (const auto& r : result.records) {
        os << r.n_sites << ',' << format_double(r.gamma) << ',' << format_double(r.h)
           << ',' << r.alpha << ',' << r.quantity << ',' << format_double(r.value) << ','
           << r.flags << "\n";
    }
}

inline void write_sweep_json(const SweepResult& result, std::ostream& os) {
    nlohmann::json doc;
    doc["schema"] = "wqed-sweep/1";
    doc["version"] = version_string;
    doc["config"] = result.metadata;
    auto& records = doc["records"] = nlohmann::json::array();
    for (const auto& r : result.records) {
        records.push_back({{"n_sites", r.n_sites},
                           {"gamma_over_J", r.gamma},
                           {"h_over_J", r.h},
                           {"alpha", r.alpha},
                           {"quantity", r.quantity},
                           {"value", r.value},
                           {"flags", r.flags}});
    }
    os << doc.dump(2) << "\n";
}

inline void write_sweep_file(const SweepResult& result, const std::string& path,
                             const std::string& format) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open output file " + path);
    if (format == "csv")
        write_sweep_csv(result, os);
    else if (format == "json")
        write_sweep_json(result, os);
    else
        throw ConfigError("unknown output format " + format);
    if (!os) throw Error("failed writing " + path);
}

} // namespace wqed
