// lattice.hpp — avoidance certificates for the determinacy test.
//
// A certificate is a shifted rectangular lattice a + tau Z^n with
//   tau_k * sigma <= 2 pi        (step condition)
//   (supp phi) cap (a + tau Z^n) = empty   (avoidance condition)
// Its existence makes the characteristic function of phi uniquely
// determined by its values outside the cube Q_sigma. verify_certificate
// checks both conditions by exhaustive enumeration of the lattice points
// near the support's bounding box; the margin is the smallest l-infinity
// distance from an enumerated lattice point to the closed support.
//
// For tent densities over lq balls of radius r the closed-form recipe
//   tau_k = 2 r n^{-1/q} + eps,   a_k = r n^{-1/q} (1 + eps)
// applies whenever r sigma < pi n^{1/q}; eps is taken at the midpoint of
// the feasible interval. The published offset can brush the ball when
// r n^{-1/q} >= 1, so ball_certificate falls back to the centered offset
// a = tau/2 (the same family with a different eps), which clears the ball
// for every admissible (q, r, n, sigma).

#pragma once

#include <optional>

#include "charext/density.hpp"

namespace charext {

struct Certificate {
    std::vector<double> a;
    std::vector<double> tau;
    double margin = 0.0;  // min l-inf distance from lattice to closed support
    double sigma = 0.0;
};

struct VerifyResult {
    bool valid = false;
    double margin = 0.0;  // +inf when no lattice point meets the box
    std::size_t latticePointsChecked = 0;
};

inline VerifyResult verify_certificate(const SupportSpec& support, double sigma,
                                       std::span<const double> a,
                                       std::span<const double> tau) {
    const int n = support.dim();
    if (!(sigma > 0.0)) throw std::invalid_argument("verify_certificate: sigma > 0 required");
    if (static_cast<int>(a.size()) != n || static_cast<int>(tau.size()) != n)
        throw std::invalid_argument("verify_certificate: dimension mismatch");
    if (!support.box_finite())
        throw std::invalid_argument("verify_certificate: compact support required");
    for (double t : tau)
        if (!(t > 0.0)) throw std::invalid_argument("verify_certificate: tau_k > 0 required");

    VerifyResult res;
    // Step condition; the boundary tau_k sigma = 2 pi is admissible.
    for (double t : tau)
        if (t * sigma > 2.0 * kPi * (1.0 + 1e-12)) return res;

    // Enumerate lattice points in the bounding box inflated by one step
    // per axis, so points just outside the support still contribute to
    // the margin.
    std::vector<long> mLo(n), mHi(n);
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) {
        mLo[k] = static_cast<long>(std::ceil((support.lo[k] - tau[k] - a[k]) / tau[k]));
        mHi[k] = static_cast<long>(std::floor((support.hi[k] + tau[k] - a[k]) / tau[k]));
        if (mHi[k] < mLo[k]) {
            res.valid = true;
            res.margin = std::numeric_limits<double>::infinity();
            return res;
        }
        total *= static_cast<std::size_t>(mHi[k] - mLo[k] + 1);
    }
    if (total > std::size_t{10'000'000})
        throw std::runtime_error("verify_certificate: lattice enumeration too large");

    double margin = std::numeric_limits<double>::infinity();
    std::vector<long> m(mLo);
    std::vector<double> pt(n);
    for (std::size_t it = 0; it < total; ++it) {
        for (int k = 0; k < n; ++k) pt[k] = a[k] + tau[k] * static_cast<double>(m[k]);
        margin = std::min(margin, support.distance_linf(pt));
        ++res.latticePointsChecked;
        if (margin == 0.0) break;
        for (int k = n - 1; k >= 0; --k) {
            if (++m[k] <= mHi[k]) break;
            m[k] = mLo[k];
        }
    }
    res.margin = margin;
    res.valid = margin > 0.0;
    return res;
}

inline std::optional<Certificate> ball_certificate(double q, double delta, int n, double sigma,
                                                   BallConvention conv = BallConvention::radius) {
    if (!(delta > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("ball_certificate: delta, sigma > 0 required");
    const DensitySpec ball = make_ball_bump(q, delta, n, conv);
    const double r = std::get<BallBump>(ball.family).radius;
    const double nInvQ = (std::isinf(q) || q > 1e12)
                             ? 1.0
                             : std::pow(static_cast<double>(n), -1.0 / q);
    // existence condition: r sigma < pi n^{1/q}
    if (!(r * sigma < kPi / nInvQ)) return std::nullopt;

    const double eps = 0.5 * (2.0 * kPi / sigma - 2.0 * r * nInvQ);  // midpoint slack
    const SupportSpec support = support_of(ball);
    Certificate cert;
    cert.sigma = sigma;
    cert.tau.assign(n, 2.0 * r * nInvQ + eps);
    cert.a.assign(n, r * nInvQ * (1.0 + eps));
    VerifyResult v = verify_certificate(support, sigma, cert.a, cert.tau);
    if (!v.valid || !(v.margin > 0.0)) {
        // centered offset; always clears the ball since tau/2 > r n^{-1/q}
        cert.a.assign(n, 0.5 * cert.tau[0]);
        v = verify_certificate(support, sigma, cert.a, cert.tau);
    }
    if (!v.valid) return std::nullopt;
    cert.margin = v.margin;
    return cert;
}

struct SearchSettings {
    int tauGridSteps = 16;
    int offsetGridSteps = 16;
};

// Grid search over tau in (0, 2 pi / sigma]^n and a in [0, tau)^n (offsets
// are periodic mod tau). Keeps the candidate maximizing the margin; ties
// go to the smaller max step. A miss is only "no certificate found" --
// it proves nothing about determinacy.
inline std::optional<Certificate> find_certificate(const SupportSpec& support, double sigma,
                                                   const SearchSettings& search = {}) {
    if (search.tauGridSteps < 1 || search.offsetGridSteps < 1)
        throw std::invalid_argument("find_certificate: degenerate search grid");
    if (!support.box_finite())
        throw std::invalid_argument("find_certificate: compact support required");
    const int n = support.dim();
    const double tauMax = 2.0 * kPi / sigma;

    std::optional<Certificate> best;
    std::vector<int> ti(n, 1), ai(n, 0);
    std::vector<double> tau(n), a(n);
    const std::size_t tauCombos = static_cast<std::size_t>(
        std::pow(static_cast<double>(search.tauGridSteps), n));
    const std::size_t offCombos = static_cast<std::size_t>(
        std::pow(static_cast<double>(search.offsetGridSteps), n));
    for (std::size_t tc = 0; tc < tauCombos; ++tc) {
        std::size_t rem = tc;
        for (int k = n - 1; k >= 0; --k) {
            ti[k] = static_cast<int>(rem % search.tauGridSteps) + 1;
            rem /= search.tauGridSteps;
        }
        for (int k = 0; k < n; ++k) tau[k] = tauMax * ti[k] / search.tauGridSteps;
        for (std::size_t oc = 0; oc < offCombos; ++oc) {
            std::size_t orem = oc;
            for (int k = n - 1; k >= 0; --k) {
                ai[k] = static_cast<int>(orem % search.offsetGridSteps);
                orem /= search.offsetGridSteps;
            }
            for (int k = 0; k < n; ++k) a[k] = tau[k] * ai[k] / search.offsetGridSteps;
            const VerifyResult v = verify_certificate(support, sigma, a, tau);
            if (!v.valid || !(v.margin > 0.0)) continue;
            double tauInf = 0.0;
            for (double t : tau) tauInf = std::max(tauInf, t);
            if (!best || v.margin > best->margin ||
                (v.margin == best->margin &&
                 tauInf < *std::max_element(best->tau.begin(), best->tau.end()))) {
                best = Certificate{a, tau, v.margin, sigma};
            }
        }
    }
    return best;
}

}  // namespace charext
