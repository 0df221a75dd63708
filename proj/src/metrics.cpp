#include "dhnet/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dhnet {

namespace {

double measured_mean(std::span<const double> measured, std::span<const double> simulated,
                     int p) {
    if (measured.size() != simulated.size())
        throw std::invalid_argument("metrics: series lengths differ");
    if (measured.size() < 2)
        throw std::invalid_argument("metrics: need at least 2 samples");
    if (p < 0 || static_cast<std::size_t>(p) >= measured.size())
        throw std::invalid_argument("metrics: invalid p");
    double sum = 0.0;
    for (double m : measured) sum += m;
    const double mean = sum / static_cast<double>(measured.size());
    if (mean == 0.0)
        throw std::invalid_argument("metrics: measured series has zero mean");
    return mean;
}

} // namespace

double nmbe_percent(std::span<const double> measured, std::span<const double> simulated,
                    int p) {
    const double mean = measured_mean(measured, simulated, p);
    double sum = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) sum += measured[i] - simulated[i];
    return 100.0 * sum / ((static_cast<double>(measured.size()) - p) * mean);
}

double cvrmse_percent(std::span<const double> measured, std::span<const double> simulated,
                      int p) {
    const double mean = measured_mean(measured, simulated, p);
    double sq = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double d = measured[i] - simulated[i];
        sq += d * d;
    }
    return 100.0 * std::sqrt(sq / (static_cast<double>(measured.size()) - p)) / mean;
}

bool metrics_verdict(double nmbe_pct, double cvrmse_pct) {
    return std::abs(nmbe_pct) <= 10.0 && cvrmse_pct <= 30.0;
}

MetricsReport evaluate_metrics(std::span<const double> measured,
                               std::span<const double> simulated, int p) {
    MetricsReport r;
    r.nmbe_percent = nmbe_percent(measured, simulated, p);
    r.cvrmse_percent = cvrmse_percent(measured, simulated, p);
    r.n = measured.size();
    r.validated = metrics_verdict(r.nmbe_percent, r.cvrmse_percent);
    return r;
}

} // namespace dhnet
