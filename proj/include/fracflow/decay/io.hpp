#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "fracflow/decay/experiments.hpp"
#include "fracflow/decay/norms.hpp"

namespace fracflow::decay {

// CSV with a fixed header; %.17g keeps doubles round-trippable.
inline std::string to_csv(const NormSeries& series) {
    series.validate();
    std::string out = "t,value,p,weak\n";
    char buf[96];
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", series.times[i],
                      series.values[i], series.p, series.weak ? 1 : 0);
        out += buf;
    }
    return out;
}

inline nlohmann::ordered_json to_json(const ExperimentReport& rep) {
    return nlohmann::ordered_json{{"schema_version", 1},
                                  {"id", rep.id},
                                  {"alpha", rep.params.alpha},
                                  {"beta", rep.params.beta},
                                  {"d", rep.params.d},
                                  {"predicted", rep.predicted},
                                  {"fitted", rep.fitted},
                                  {"tolerance", rep.tolerance},
                                  {"one_sided", rep.one_sided},
                                  {"pass", rep.pass},
                                  {"seed", rep.seed},
                                  {"notes", rep.notes}};
}

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

}  // namespace fracflow::decay
