#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace coverlab {

inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kDpTol = 1e-9;

/// Deterministic random source. All sampling in the library goes through this
/// wrapper so seeded runs reproduce byte-identically across platforms
/// (mt19937_64 output is pinned by the standard; no distribution objects).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // index sampled from an (approximately normalized) weight vector
    int categorical(const std::vector<double>& probs) {
        double u = next_double();
        double acc = 0.0;
        int last_positive = -1;
        for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
            if (probs[i] > 0.0) last_positive = i;
            acc += probs[i];
            if (u < acc) return i;
        }
        if (last_positive < 0)
            throw std::runtime_error("categorical: all-zero weight vector");
        return last_positive;
    }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        return static_cast<int>(next_double() * n) % n;
    }

private:
    std::mt19937_64 gen_;
};

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::runtime_error("median of empty vector");
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::runtime_error("quantile of empty vector");
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

/// Least-squares slope of log(y) against log(x). Inputs must be positive.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::runtime_error("loglog_slope: need >= 2 matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0 || ys[i] <= 0.0)
            throw std::runtime_error("loglog_slope: nonpositive sample");
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Shortest decimal form that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double linf_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace coverlab
