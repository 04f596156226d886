#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sarlab/grid.hpp"

namespace sarlab::service {

enum class RenderMode { slice, mip };

/// 3-D images are reduced along `axis` (slice at `index`, or maximum
/// projection); 2-D images are drawn as they are. Rows follow the first
/// remaining grid axis, columns the second.
struct RenderOptions {
    RenderMode mode = RenderMode::mip;
    int axis = 2;
    Index index = -1;  // slice index, -1 for the middle
    double dynamic_range_db = 40.0;
};

/// Magnitude plane selected by `opt`, not normalised.
Eigen::MatrixXd render_plane(const ImageVolume& image, const RenderOptions& opt);

/// Jet colormap: t in [0, 1] maps dark blue -> blue -> cyan -> yellow -> red -> dark red.
std::array<std::uint8_t, 3> jet(double t);

/// 8-bit RGB PNG, rows top to bottom, `rgb` packed row-major.
std::vector<std::byte> encode_png(Index width, Index height, const std::vector<std::uint8_t>& rgb);

/// 20 log10(|v| / max|v|) clipped to [-dr, 0] and mapped through jet().
/// The reference max is taken over the whole image.
std::vector<std::byte> render_png(const ImageVolume& image, const RenderOptions& opt = {});

}  // namespace sarlab::service
