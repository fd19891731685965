// numerics.hpp — shared numerical primitives: Gauss-Legendre rules,
// compensated summation, lq norms, and a reproducible RNG.
//
// All quadrature in this library is built from fixed-order Gauss-Legendre
// rules applied over explicit panels, so every integral is a finite sum
// evaluated in a fixed order; results are bit-reproducible across runs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace charext {

inline constexpr double kPi = 3.14159265358979323846;

// sin(u)/u with the removable singularity filled in by its Taylor series.
inline double sinc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

// lq norm for q in [1, inf]; pass std::numeric_limits<double>::infinity()
// (or any q > 1e12) for the max norm.
inline double lq_norm(std::span<const double> x, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
    if (std::isinf(q) || q > 1e12) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    if (q == 2.0) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    }
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), q);
    return std::pow(s, 1.0 / q);
}

inline double l2_norm(std::span<const double> x) { return lq_norm(x, 2.0); }

// Neumaier variant of Kahan summation. Addition order is up to the caller,
// which keeps reductions deterministic.
class NeumaierSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Gauss-Legendre rule on [-1,1]; nodes by Newton iteration on P_n.
// Orders used here are small (<= 64), where this converges in a few steps.
class GaussLegendre {
  public:
    explicit GaussLegendre(int order) : node_(order), weight_(order) {
        if (order < 1) throw std::invalid_argument("GaussLegendre: order >= 1 required");
        const int n = order;
        for (int k = 0; k < (n + 1) / 2; ++k) {
            double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // Legendre recurrence for P_n(x) and P'_n(x).
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            node_[k] = -x;
            node_[n - 1 - k] = x;
            weight_[k] = w;
            weight_[n - 1 - k] = w;
        }
    }

    int order() const { return static_cast<int>(node_.size()); }
    const std::vector<double>& nodes() const { return node_; }
    const std::vector<double>& weights() const { return weight_; }

    // Integral of f over [a,b] with this rule on a single panel.
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        NeumaierSum acc;
        for (std::size_t i = 0; i < node_.size(); ++i)
            acc.add(weight_[i] * f(mid + half * node_[i]));
        return half * acc.value();
    }

  private:
    std::vector<double> node_, weight_;
};

// Composite rule: [a,b] cut into `panels` equal panels, `rule` on each.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, const GaussLegendre& rule) {
    if (panels < 1) throw std::invalid_argument("integrate_panels: panels >= 1 required");
    const double w = (b - a) / panels;
    NeumaierSum acc;
    for (int p = 0; p < panels; ++p)
        acc.add(rule.integrate(f, a + p * w, a + (p + 1) * w));
    return acc.value();
}

// Panel count so that an integrand with total oscillation frequency `freq`
// sees at most ~one period per panel (a 16-point rule is then far beyond
// the accuracy floor of the truncation errors we care about).
inline int panels_for(double length, double freq) {
    const double period = 2.0 * kPi / std::max(freq, 1e-12);
    return std::max(1, static_cast<int>(std::ceil(length / period)));
}

// Deterministic uniform generator: mt19937_64 with the bit conversion
// pinned, so sequences do not depend on library distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0,1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t bits() { return eng_(); }
    // integer in [0, n)
    std::uint64_t index(std::uint64_t n) { return eng_() % n; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace charext
