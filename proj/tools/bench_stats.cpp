#include "bench_stats.hpp"

#include <algorithm>
#include <cmath>

namespace serinv::tools {

namespace {

// P(B <= k) for B ~ Binomial(n, 1/2).
double binomial_half_cdf(std::size_t n, std::size_t k) {
    double term = std::pow(0.5, static_cast<double>(n));
    double sum = term;
    for (std::size_t i = 1; i <= k; ++i) {
        term *= static_cast<double>(n - i + 1) / static_cast<double>(i);
        sum += term;
    }
    return sum;
}

}  // namespace

MedianSummary summarize(std::vector<double> values) {
    MedianSummary s;
    s.samples = values.size();
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);

    // Widest-first search for the narrowest symmetric pair (x_(j), x_(n+1-j))
    // with coverage 1 - 2 P(B <= j - 1) >= 0.95.
    std::size_t j = 1;
    while (j + 1 <= (n + 1) / 2 && 1.0 - 2.0 * binomial_half_cdf(n, j) >= 0.95) {
        ++j;
    }
    s.low = values[j - 1];
    s.high = values[n - j];
    s.coverage = 1.0 - 2.0 * binomial_half_cdf(n, j - 1);
    return s;
}

}  // namespace serinv::tools
