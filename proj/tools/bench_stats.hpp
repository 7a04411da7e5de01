#pragma once

#include <vector>

namespace serinv::tools {

struct MedianSummary {
    std::size_t samples = 0;
    double median = 0.0;
    double low = 0.0;   // order-statistic bounds of the median
    double high = 0.0;
    double coverage = 0.0;  // achieved confidence of [low, high]
};

// Median and a distribution-free confidence interval from binomial order
// statistics, targeting 95%. With fewer than 6 samples the interval is
// [min, max] and coverage stays below the target.
MedianSummary summarize(std::vector<double> values);

}  // namespace serinv::tools
