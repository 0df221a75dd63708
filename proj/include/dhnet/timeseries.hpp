#pragma once

#include <map>
#include <string>
#include <vector>

namespace dhnet {

// Zero-order-hold time series: each sample holds from its timestamp until
// the next one. Before the first and after the last sample the value is 0.
struct StepSeries {
    std::vector<double> time_s;
    std::vector<double> value;

    double sample(double t_s) const;
};

// Consumer demand series keyed by consumer id. Values follow the external
// convention: positive means the network supplies heat to the building.
struct DemandSet {
    std::map<std::string, StepSeries> series;

    bool has(const std::string& consumer_id) const { return series.count(consumer_id) > 0; }
};

// Loads a demand CSV with header `time_s,consumer_id,q_w`. Timestamps must be
// strictly increasing per consumer. Throws ValidationError listing every
// problem found.
DemandSet load_demands(const std::string& path);

} // namespace dhnet
