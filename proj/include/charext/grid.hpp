// grid.hpp — uniform tensor grids: the sampling carrier for densities,
// perturbations and their transforms, plus the CSV layout used by the CLI
// (n coordinate columns, one value column, row-major with the first axis
// slowest, 17 significant digits so doubles round-trip exactly).

#pragma once

#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "charext/numerics.hpp"

namespace charext {

struct Axis {
    double min = 0.0;
    double max = 0.0;
    int count = 0;  // number of samples, >= 2

    double spacing() const { return (max - min) / (count - 1); }
    double coord(int i) const {
        // endpoints exact; interior by affine interpolation
        if (i == 0) return min;
        if (i == count - 1) return max;
        return min + i * spacing();
    }
    void validate() const {
        if (count < 2) throw std::invalid_argument("Axis: count >= 2 required");
        if (!(max > min)) throw std::invalid_argument("Axis: max > min required");
        if (!std::isfinite(min) || !std::isfinite(max))
            throw std::invalid_argument("Axis: finite bounds required");
    }
    bool symmetric() const { return std::abs(min + max) <= 1e-9 * (max - min); }
};

template <class T>
struct GridFunction {
    std::vector<Axis> axes;
    std::vector<T> values;  // row-major, first axis slowest

    int dim() const { return static_cast<int>(axes.size()); }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.count);
        return n;
    }

    void validate() const {
        if (axes.empty()) throw std::invalid_argument("GridFunction: no axes");
        for (const auto& ax : axes) ax.validate();
        if (values.size() != size())
            throw std::invalid_argument("GridFunction: value tensor shape mismatch");
    }

    std::size_t flat_index(std::span<const int> idx) const {
        std::size_t f = 0;
        for (int k = 0; k < dim(); ++k) f = f * axes[k].count + idx[k];
        return f;
    }

    void unflatten(std::size_t flat, std::span<int> idx) const {
        for (int k = dim() - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(flat % axes[k].count);
            flat /= axes[k].count;
        }
    }

    void point(std::size_t flat, std::span<double> out) const {
        for (int k = dim() - 1; k >= 0; --k) {
            out[k] = axes[k].coord(static_cast<int>(flat % axes[k].count));
            flat /= axes[k].count;
        }
    }

    // trapezoid weight of sample i along one axis
    static double trapezoid_weight(const Axis& ax, int i) {
        const double h = ax.spacing();
        return (i == 0 || i == ax.count - 1) ? 0.5 * h : h;
    }

    double trapezoid_weight_flat(std::size_t flat) const {
        double w = 1.0;
        for (int k = dim() - 1; k >= 0; --k) {
            const int i = static_cast<int>(flat % axes[k].count);
            w *= trapezoid_weight(axes[k], i);
            flat /= axes[k].count;
        }
        return w;
    }
};

// Grid over [-radius, radius]^dim with samplesPerAxis intervals per axis
// (count = samplesPerAxis + 1, so 0 and both endpoints are samples).
template <class T>
GridFunction<T> make_symmetric_grid(int dim, double radius, int samplesPerAxis) {
    if (samplesPerAxis < 2) throw std::invalid_argument("samplesPerAxis >= 2 required");
    GridFunction<T> g;
    g.axes.assign(dim, Axis{-radius, radius, samplesPerAxis + 1});
    g.values.assign(g.size(), T{});
    return g;
}

// Multilinear interpolation; zero outside the grid's bounding box.
inline double interpolate(const GridFunction<double>& g, std::span<const double> x) {
    const int n = g.dim();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int k = 0; k < n; ++k) {
        const Axis& ax = g.axes[k];
        if (x[k] < ax.min || x[k] > ax.max) return 0.0;
        double u = (x[k] - ax.min) / ax.spacing();
        int i = static_cast<int>(std::floor(u));
        if (i >= ax.count - 1) i = ax.count - 2;
        base[k] = i;
        frac[k] = u - i;
    }
    double out = 0.0;
    const int corners = 1 << n;
    std::vector<int> idx(n);
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        for (int k = 0; k < n; ++k) {
            const bool hi = (c >> k) & 1;
            idx[k] = base[k] + (hi ? 1 : 0);
            w *= hi ? frac[k] : (1.0 - frac[k]);
        }
        out += w * g.values[g.flat_index(idx)];
    }
    return out;
}

namespace detail {

inline void format_double(std::string& out, double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

}  // namespace detail

// CSV: n coordinate columns then the value, one grid point per row,
// row-major in the declared axis order.
inline void write_csv(const GridFunction<double>& g, const std::string& path) {
    g.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    const int n = g.dim();
    std::string line;
    std::vector<double> pt(n);
    for (std::size_t f = 0; f < g.values.size(); ++f) {
        g.point(f, pt);
        line.clear();
        for (int k = 0; k < n; ++k) {
            detail::format_double(line, pt[k]);
            line.push_back(',');
        }
        detail::format_double(line, g.values[f]);
        line.push_back('\n');
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

inline GridFunction<double> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            double v = 0.0;
            auto res = std::from_chars(line.data() + pos, line.data() + comma, v);
            if (res.ec != std::errc{})
                throw std::runtime_error("read_csv: bad number in " + path);
            row.push_back(v);
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("read_csv: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("read_csv: empty file " + path);
    const int n = static_cast<int>(rows.front().size()) - 1;
    if (n < 1) throw std::runtime_error("read_csv: need coordinate columns in " + path);

    // Recover per-axis coordinates; the writer emits exact round-trip
    // doubles, so equality comparison of parsed values is safe.
    GridFunction<double> g;
    g.axes.resize(n);
    std::vector<std::vector<double>> uniq(n);
    for (int k = 0; k < n; ++k) {
        std::vector<double> vals;
        vals.reserve(rows.size());
        for (const auto& r : rows) vals.push_back(r[k]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        uniq[k] = std::move(vals);
        const auto& u = uniq[k];
        if (u.size() < 2) throw std::runtime_error("read_csv: degenerate axis in " + path);
        g.axes[k] = Axis{u.front(), u.back(), static_cast<int>(u.size())};
        const double h = g.axes[k].spacing();
        for (std::size_t i = 0; i < u.size(); ++i)
            if (std::abs(u[i] - (u.front() + static_cast<double>(i) * h)) > 1e-9 * std::abs(h))
                throw std::runtime_error("read_csv: non-uniform axis in " + path);
    }
    std::size_t expected = 1;
    for (int k = 0; k < n; ++k) expected *= uniq[k].size();
    if (expected != rows.size())
        throw std::runtime_error("read_csv: row count does not fill the grid in " + path);

    g.values.assign(expected, 0.0);
    std::vector<int> idx(n);
    for (const auto& r : rows) {
        for (int k = 0; k < n; ++k) {
            const auto& u = uniq[k];
            const auto it = std::lower_bound(u.begin(), u.end(), r[k]);
            idx[k] = static_cast<int>(it - u.begin());
        }
        g.values[g.flat_index(idx)] = r[n];
    }
    return g;
}

}  // namespace charext
