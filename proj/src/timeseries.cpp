#include "dhnet/timeseries.hpp"

#include "dhnet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dhnet {

double StepSeries::sample(double t_s) const {
    if (time_s.empty()) return 0.0;
    if (t_s < time_s.front() || t_s > time_s.back()) return 0.0;
    auto it = std::upper_bound(time_s.begin(), time_s.end(), t_s);
    return value[static_cast<std::size_t>(it - time_s.begin()) - 1];
}

DemandSet load_demands(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> errors;
    if (!in) throw ValidationError("demands: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("demands: empty file " + path);
    // tolerate trailing CR from CRLF files
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time_s,consumer_id,q_w")
        throw ValidationError("demands: expected header `time_s,consumer_id,q_w`, got `" +
                              line + "`");

    DemandSet set;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string t_str, id, q_str;
        if (!std::getline(row, t_str, ',') || !std::getline(row, id, ',') ||
            !std::getline(row, q_str)) {
            errors.push_back("demands line " + std::to_string(line_no) + ": expected 3 fields");
            continue;
        }
        double t = 0.0, q = 0.0;
        try {
            t = std::stod(t_str);
            q = std::stod(q_str);
        } catch (const std::exception&) {
            errors.push_back("demands line " + std::to_string(line_no) + ": bad number");
            continue;
        }
        if (!std::isfinite(t) || !std::isfinite(q)) {
            errors.push_back("demands line " + std::to_string(line_no) + ": non-finite value");
            continue;
        }
        auto& s = set.series[id];
        if (!s.time_s.empty() && t <= s.time_s.back()) {
            errors.push_back("demands line " + std::to_string(line_no) + ": timestamps for `" +
                             id + "` must be strictly increasing");
            continue;
        }
        s.time_s.push_back(t);
        s.value.push_back(q);
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return set;
}

} // namespace dhnet
