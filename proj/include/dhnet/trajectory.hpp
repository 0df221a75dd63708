#pragma once

#include <string>
#include <vector>

namespace dhnet {

// Time-ordered simulation output. `columns` excludes the leading time_s
// column of the CSV form; every row carries one value per column.
struct Trajectory {
    std::vector<std::string> columns;
    std::vector<double> time_s;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const; // -1 if missing
    std::vector<double> column(const std::string& name) const;
};

void write_trajectory(const Trajectory& traj, const std::string& path);

// Reads a CSV written by write_trajectory (header `time_s,<columns...>`).
// Throws ValidationError on malformed input.
Trajectory read_trajectory(const std::string& path);

} // namespace dhnet
