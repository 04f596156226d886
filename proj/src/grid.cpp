#include "sarlab/grid.hpp"

#include <cmath>
#include <string>

#include "sarlab/error.hpp"

namespace sarlab {

Eigen::VectorXd GridAxis::values() const {
    Eigen::VectorXd v(count);
    for (Index i = 0; i < count; ++i) v[i] = at(i);
    return v;
}

Index GridSpec::size() const {
    Index n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) n *= a.count;
    return n;
}

std::vector<Index> GridSpec::shape() const {
    std::vector<Index> s;
    s.reserve(axes.size());
    for (const auto& a : axes) s.push_back(a.count);
    return s;
}

const GridAxis& GridSpec::axis_for(int coordinate) const {
    if (!has_coord(coordinate)) throw ValidationError("grid has no axis for coordinate " + std::to_string(coordinate));
    return axes[static_cast<std::size_t>(dims() == 3 ? coordinate : coordinate - 1)];
}

Vec3 GridSpec::point(Index flat) const {
    Vec3 p(plane_x, 0.0, 0.0);
    for (Index a = dims() - 1; a >= 0; --a) {
        const auto& ax = axes[static_cast<std::size_t>(a)];
        p[coord(a)] = ax.at(flat % ax.count);
        flat /= ax.count;
    }
    return p;
}

Eigen::Matrix3Xd GridSpec::points() const {
    Eigen::Matrix3Xd pts(3, size());
    for (Index i = 0; i < pts.cols(); ++i) pts.col(i) = point(i);
    return pts;
}

void GridSpec::validate() const {
    if (dims() != 2 && dims() != 3) throw ValidationError("grid must have 2 or 3 axes", "grid.axes");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto& a = axes[i];
        const std::string field = "grid.axes[" + std::to_string(i) + "]";
        if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.max > a.min))
            throw ValidationError("axis requires finite max > min", field);
        if (a.count < 2) throw ValidationError("axis requires count >= 2", field + ".count");
    }
    if (!std::isfinite(plane_x)) throw ValidationError("plane_x must be finite", "grid.plane_x");
}

ComplexArray::ComplexArray(std::vector<Index> s) : shape(std::move(s)) {
    Index n = 1;
    for (Index e : shape) n *= e;
    data = Eigen::VectorXcd::Zero(n);
}

Index ComplexArray::stride(Index axis) const {
    Index s = 1;
    for (Index a = rank() - 1; a > axis; --a) s *= shape[static_cast<std::size_t>(a)];
    return s;
}

ImageVolume::ImageVolume(GridSpec g, std::string algo)
    : grid(std::move(g)), voxels(Eigen::VectorXcd::Zero(grid.size())), algorithm(std::move(algo)) {}

std::vector<Index> unravel(Index flat, const std::vector<Index>& shape) {
    std::vector<Index> idx(shape.size());
    for (std::size_t a = shape.size(); a-- > 0;) {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
    return idx;
}

Index ravel(const std::vector<Index>& idx, const std::vector<Index>& shape) {
    Index flat = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) flat = flat * shape[a] + idx[a];
    return flat;
}

}  // namespace sarlab
