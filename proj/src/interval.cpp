#include "symdyn/interval.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

namespace symdyn {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
    auto half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double max_of(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::fmax(m, x);
    return m;
}

// Relative error bound of pairwise_sum on N nonnegative terms, with slack.
double summation_slack(std::size_t n) {
    auto depth = static_cast<double>(std::bit_width(n) + 8);
    return depth * kUnit * 1.0001;
}

} // namespace

double LogSumExp::nearest(std::span<const double> exponents) {
    if (exponents.empty()) return -std::numeric_limits<double>::infinity();
    double m = max_of(exponents);
    if (!std::isfinite(m)) return m;
    std::vector<double> terms(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) terms[i] = std::exp(exponents[i] - m);
    return m + std::log(pairwise_sum(terms));
}

double LogSumExp::upper(std::span<const double> exponents) {
    if (exponents.empty()) return -std::numeric_limits<double>::infinity();
    double m = max_of(exponents);
    if (!std::isfinite(m)) return m;
    std::vector<double> terms(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        double d = exponents[i] - m;
        if (d != 0) d = round_up(d);
        terms[i] = d == 0 ? 1.0 : round_up(std::exp(d));
    }
    double s = pairwise_sum(terms);
    s = round_up(s * (1 + summation_slack(terms.size())));
    double l = round_up(round_up(std::log(s)));
    return round_up(m + l);
}

double LogSumExp::lower(std::span<const double> exponents) {
    if (exponents.empty()) return -std::numeric_limits<double>::infinity();
    double m = max_of(exponents);
    if (!std::isfinite(m)) return m;
    std::vector<double> terms(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        double d = exponents[i] - m;
        if (d != 0) d = round_down(d);
        terms[i] = d == 0 ? 1.0 : std::max(0.0, round_down(std::exp(d)));
    }
    double s = pairwise_sum(terms);
    s = round_down(s * (1 - summation_slack(terms.size())));
    double l = round_down(round_down(std::log(s)));
    return round_down(m + l);
}

} // namespace symdyn
