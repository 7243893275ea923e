// grid.hpp — labelled axes and dense N-d grids
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace exciton2des {

struct Axis {
    std::string name;
    std::string unit;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double front() const { return values.front(); }
    double back() const { return values.back(); }

    // Inclusive [lo, hi] with spacing step; the last point is kept only if it
    // lands on the grid within 1e-9 of a step.
    static Axis linspace(std::string name, std::string unit, double lo, double hi, double step) {
        if (!(step > 0.0) || hi < lo) throw std::invalid_argument("Axis: bad range for " + name);
        Axis a{std::move(name), std::move(unit), {}};
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        a.values.reserve(n);
        for (std::size_t i = 0; i < n; ++i) a.values.push_back(lo + static_cast<double>(i) * step);
        return a;
    }
    static Axis list(std::string name, std::string unit, std::vector<double> v) {
        return Axis{std::move(name), std::move(unit), std::move(v)};
    }

    bool strictly_increasing() const {
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1])) return false;
        return true;
    }
    bool operator==(const Axis&) const = default;
};

template <class T>
struct Grid {
    std::vector<Axis> axes;
    std::vector<T> data;

    Grid() = default;
    explicit Grid(std::vector<Axis> ax) : axes(std::move(ax)) { data.assign(count(), T{}); }

    std::size_t count() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }
    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> d;
        for (const auto& a : axes) d.push_back(a.size());
        return d;
    }
    std::size_t stride(std::size_t axis) const {
        std::size_t s = 1;
        for (std::size_t k = axis + 1; k < axes.size(); ++k) s *= axes[k].size();
        return s;
    }

    T& operator()(std::size_t i) { return data[i]; }
    T& operator()(std::size_t i, std::size_t j) { return data[i * axes[1].size() + j]; }
    T& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * axes[1].size() + j) * axes[2].size() + k];
    }
    const T& operator()(std::size_t i) const { return data[i]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * axes[1].size() + j]; }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * axes[1].size() + j) * axes[2].size() + k];
    }

    bool same_shape(const Grid& o) const { return axes == o.axes; }
};

}  // namespace exciton2des
