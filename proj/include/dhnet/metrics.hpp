#pragma once

#include <span>

namespace dhnet {

// ASHRAE Guideline 14 calibration metrics. p is the number of adjusted model
// parameters subtracted from the sample count (0 by default, optionally 1).
// Both throw std::invalid_argument for mismatched/short series or a
// zero-mean measured series.

double nmbe_percent(std::span<const double> measured, std::span<const double> simulated,
                    int p = 0);

double cvrmse_percent(std::span<const double> measured, std::span<const double> simulated,
                      int p = 0);

struct MetricsReport {
    double nmbe_percent = 0.0;
    double cvrmse_percent = 0.0;
    std::size_t n = 0;
    bool validated = false;
};

// Inclusive ASHRAE limits: |NMBE| <= 10 %, CVRMSE <= 30 %.
bool metrics_verdict(double nmbe_pct, double cvrmse_pct);

MetricsReport evaluate_metrics(std::span<const double> measured,
                               std::span<const double> simulated, int p = 0);

} // namespace dhnet
