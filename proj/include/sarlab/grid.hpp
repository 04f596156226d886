#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sarlab/types.hpp"

namespace sarlab {

/// Uniformly sampled coordinate axis, endpoints inclusive.
struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    Index count = 0;

    double spacing() const { return (max - min) / static_cast<double>(count - 1); }
    double at(Index i) const { return min + static_cast<double>(i) * spacing(); }
    double center() const { return 0.5 * (min + max); }
    Eigen::VectorXd values() const;
};

/// Voxel set of a reconstruction or label image.
///
/// A 3-D grid has axes (x, y, z). A 2-D grid lives in the y-z plane at
/// x = plane_x, matching the linear and circular scanning geometries.
struct GridSpec {
    std::vector<GridAxis> axes;
    double plane_x = 0.0;

    static GridSpec make3d(GridAxis x, GridAxis y, GridAxis z) { return {{x, y, z}, 0.0}; }
    static GridSpec make2d(GridAxis y, GridAxis z, double plane_x = 0.0) { return {{y, z}, plane_x}; }

    Index dims() const { return static_cast<Index>(axes.size()); }
    Index size() const;
    std::vector<Index> shape() const;
    /// Cartesian coordinate index (0=x, 1=y, 2=z) carried by grid axis `axis`.
    int coord(Index axis) const { return dims() == 3 ? static_cast<int>(axis) : static_cast<int>(axis) + 1; }
    const GridAxis& axis_for(int coordinate) const;
    bool has_coord(int coordinate) const { return dims() == 3 || coordinate != 0; }

    /// Position of the voxel with flat (C-order, last axis fastest) index.
    Vec3 point(Index flat) const;
    Eigen::Matrix3Xd points() const;

    void validate() const;
};

/// Dense complex N-d array in C order (last axis varies fastest).
struct ComplexArray {
    std::vector<Index> shape;
    Eigen::VectorXcd data;

    ComplexArray() = default;
    explicit ComplexArray(std::vector<Index> s);

    Index size() const { return data.size(); }
    Index rank() const { return static_cast<Index>(shape.size()); }
    Index stride(Index axis) const;
};

/// Complex image over a GridSpec.
struct ImageVolume {
    GridSpec grid;
    Eigen::VectorXcd voxels;  // C order over grid.shape()
    std::string algorithm;
    std::string config_hash;

    ImageVolume() = default;
    ImageVolume(GridSpec g, std::string algo = {});

    std::vector<Index> shape() const { return grid.shape(); }
    Eigen::ArrayXd magnitude() const { return voxels.cwiseAbs().array(); }
};

/// Spatial-spectral intermediate of a reconstruction.
struct KSpace {
    std::string stage;                     // e.g. "stage1_kspace"
    std::vector<std::string> axis_names;   // e.g. {"kx", "ky", "k"}
    std::vector<Eigen::VectorXd> axes;     // coordinates along each axis
    ComplexArray spectrum;
};

/// Row-major multi-index <-> flat index helpers.
std::vector<Index> unravel(Index flat, const std::vector<Index>& shape);
Index ravel(const std::vector<Index>& idx, const std::vector<Index>& shape);

/// Applies `fn(in_line, out_line)` to every 1-D line of `in` along `axis`,
/// producing an array whose extent along `axis` is `out_len`. `fn` is copied
/// per worker thread so it may own scratch state (FFT plans).
template <typename Fn>
ComplexArray map_axis(const ComplexArray& in, Index axis, Index out_len, Fn fn);

}  // namespace sarlab

#include "sarlab/detail/map_axis.ipp"
