#include "fcritic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fcritic/error.hpp"

namespace fcritic {

double quantile_loss(double y, double y_hat, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("quantile_loss: q outside (0, 1)");
    const double under = std::max(y - y_hat, 0.0);
    const double over = std::max(y_hat - y, 0.0);
    return q * under + (1.0 - q) * over;
}

double crps(double y, const std::array<double, 9>& decile_values) {
    // A point mass gives exactly |y - y_hat|.
    long double sum = 0.0L;
    for (std::size_t i = 0; i < kCrpsLevels.size(); ++i) {
        const double q = kCrpsLevels[i];
        const double d = y - decile_values[i];
        sum += d >= 0.0 ? q * static_cast<long double>(d) : (1.0L - q) * static_cast<long double>(-d);
    }
    return static_cast<double>(2.0L * sum / static_cast<long double>(kCrpsLevels.size()));
}

double crps(double y, std::span<const QuantilePoint> predictions) {
    if (predictions.size() != kCrpsLevels.size())
        throw ParameterError("crps: expected exactly the nine levels 0.1..0.9");
    std::array<double, 9> values{};
    std::array<bool, 9> seen{};
    for (const auto& p : predictions) {
        const double slot = p.level * 10.0 - 1.0;
        const auto idx = static_cast<long>(std::lround(slot));
        if (idx < 0 || idx > 8 || std::abs(slot - static_cast<double>(idx)) > 1e-8 || seen[static_cast<std::size_t>(idx)])
            throw ParameterError("crps: unexpected or duplicate level " + std::to_string(p.level));
        seen[static_cast<std::size_t>(idx)] = true;
        values[static_cast<std::size_t>(idx)] = p.value;
    }
    return crps(y, values);
}

double scrps(std::span<const double> actuals, const QuantileForecast& forecast) {
    if (actuals.size() != forecast.horizon()) throw ParameterError("scrps: actuals length != horizon");
    std::array<const std::vector<double>*, 9> paths{};
    for (std::size_t i = 0; i < kCrpsLevels.size(); ++i) {
        paths[i] = forecast.find(kCrpsLevels[i]);
        if (paths[i] == nullptr)
            throw ParameterError("scrps: forecast lacks level " + std::to_string(kCrpsLevels[i]));
    }
    double total = 0.0;
    double scale = 0.0;
    for (std::size_t t = 0; t < actuals.size(); ++t) {
        std::array<double, 9> deciles{};
        for (std::size_t i = 0; i < 9; ++i) deciles[i] = (*paths[i])[t];
        total += crps(actuals[t], deciles);
        scale += std::abs(actuals[t]);
    }
    if (!(scale > 0.0)) throw UndefinedScaleError("scrps: sum of |actuals| is zero");
    return total / scale;
}

Confusion Confusion::from(std::span<const Label> labels, std::span<const Label> predictions) {
    if (labels.size() != predictions.size()) throw ParameterError("confusion: length mismatch");
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == predictions[i]) {
            ++c.classes[class_index(labels[i])].tp;
        } else {
            ++c.classes[class_index(predictions[i])].fp;
            ++c.classes[class_index(labels[i])].fn;
        }
    }
    return c;
}

std::size_t Confusion::total() const noexcept {
    std::size_t n = 0;
    for (const auto& k : classes) n += k.support();
    return n;
}

namespace {

double f1_of(const ClassCounts& k) {
    if (k.tp == 0) return (k.fp == 0 && k.fn == 0) ? 1.0 : 0.0;
    const double precision = static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp);
    const double recall = static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn);
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

ClassF1 f1_per_class(const Confusion& confusion) {
    return {f1_of(confusion[Label::Reasonable]), f1_of(confusion[Label::Unreasonable])};
}

double weighted_f1(const Confusion& confusion) {
    const std::size_t n = confusion.total();
    if (n == 0) throw ParameterError("weighted_f1: no cases");
    double sum = 0.0;
    for (const auto& k : confusion.classes)
        sum += static_cast<double>(k.support()) * f1_of(k);
    return sum / static_cast<double>(n);
}

double weighted_f1(std::span<const Label> labels, std::span<const Label> predictions) {
    if (labels.size() != predictions.size()) throw ParameterError("weighted_f1: length mismatch");
    if (labels.empty()) throw ParameterError("weighted_f1: no cases");
    return weighted_f1(Confusion::from(labels, predictions));
}

std::vector<double> midranks(std::span<const double> pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

RankTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ParameterError("mann_whitney_u: both samples need at least one value");
    for (double v : a)
        if (!std::isfinite(v)) throw ParameterError("mann_whitney_u: non-finite value");
    for (double v : b)
        if (!std::isfinite(v)) throw ParameterError("mann_whitney_u: non-finite value");

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;
    const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(a.size()), 0.0);

    RankTestResult r;
    r.n1 = a.size();
    r.n2 = b.size();
    r.u_stat = rank_sum_a - n1 * (n1 + 1.0) / 2.0;

    // Tie correction: sum over tie groups of (t^3 - t).
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mean_u = n1 * n2 / 2.0;
    const double var_u = n > 1.0 ? n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))) : 0.0;
    if (!(var_u > 0.0)) {
        r.p_value = 1.0;
        return r;
    }
    const double z = std::max(std::abs(r.u_stat - mean_u) - 0.5, 0.0) / std::sqrt(var_u);
    r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return r;
}

SummaryStats summary_stats(std::span<const double> values, StdFlavor flavor) {
    if (values.empty()) throw ParameterError("summary_stats: empty input");
    SummaryStats s;
    s.n = values.size();
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = s.n / 2;
    s.median = (s.n % 2 == 1) ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    const double dof = flavor == StdFlavor::Sample ? static_cast<double>(s.n) - 1.0 : static_cast<double>(s.n);
    s.std = dof > 0.0 ? std::sqrt(ss / dof) : 0.0;
    return s;
}

double pct_diff(double a, double b) {
    if (b == 0.0) throw UndefinedScaleError("pct_diff: reference value is zero");
    return 100.0 * (a - b) / b;
}

}  // namespace fcritic
