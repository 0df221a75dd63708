#include "dhnet/trajectory.hpp"

#include "dhnet/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dhnet {

int Trajectory::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> Trajectory::column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) throw ValidationError("trajectory: unknown column `" + name + "`");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("trajectory: cannot write " + path);
    out << "time_s";
    for (const auto& c : traj.columns) out << ',' << c;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < traj.time_s.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", traj.time_s[i]);
        out << buf;
        for (double v : traj.rows[i]) {
            std::snprintf(buf, sizeof(buf), "%.10g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw ValidationError("trajectory: write failed for " + path);
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("trajectory: cannot open " + path);
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("trajectory: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::istringstream header(line);
        std::string cell;
        if (!std::getline(header, cell, ',') || cell != "time_s")
            throw ValidationError("trajectory: first column must be time_s in " + path);
        while (std::getline(header, cell, ',')) traj.columns.push_back(cell);
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        values.reserve(traj.columns.size());
        bool first = true;
        while (std::getline(row, cell, ',')) {
            double v = 0.0;
            try {
                v = std::stod(cell);
            } catch (const std::exception&) {
                throw ValidationError("trajectory line " + std::to_string(line_no) +
                                      ": bad number `" + cell + "`");
            }
            if (first) {
                traj.time_s.push_back(v);
                first = false;
            } else {
                values.push_back(v);
            }
        }
        if (values.size() != traj.columns.size())
            throw ValidationError("trajectory line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(traj.columns.size() + 1) +
                                  " fields");
        traj.rows.push_back(std::move(values));
    }
    return traj;
}

} // namespace dhnet
