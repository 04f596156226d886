#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sarlab/types.hpp"

namespace sarlab {

enum class ApertureKind { linear, planar, circular, cylindrical, irregular };

std::string to_string(ApertureKind kind);
ApertureKind aperture_kind_from_string(const std::string& s);

/// Parameters that regenerate a uniform aperture exactly.
struct UniformMeta {
    double dx = 0.0;
    double dy = 0.0;
    double dtheta = 0.0;
    double R0 = 0.0;
    double Z0 = 0.0;
    Index nx = 1;
    Index ny = 1;
    Index ntheta = 1;
};

/// Ordered monostatic transceiver positions.
///
/// Axis conventions:
///   linear       (0, y_n, Z0), y centred on 0
///   planar       (x_i, y_j, Z0), element n = j*nx + i (y outer, x inner)
///   circular     (0, R0 cos(theta_n), R0 sin(theta_n)), the y-z plane
///   cylindrical  (R0 cos(theta_n), y_j, R0 sin(theta_n)), element n = theta_index*ny + j
class Aperture {
public:
    Aperture(ApertureKind kind, Eigen::Matrix3Xd positions, std::optional<UniformMeta> meta);

    ApertureKind kind() const { return kind_; }
    const Eigen::Matrix3Xd& positions() const { return positions_; }
    Index size() const { return positions_.cols(); }
    const std::optional<UniformMeta>& meta() const { return meta_; }
    /// Irregular apertures may repeat positions; flagged rather than rejected.
    bool has_duplicates() const { return has_duplicates_; }

    /// Unit boresight of element n, pointing towards `look_at` for irregular
    /// apertures, along +/-z for rectilinear ones, radially inwards for polar ones.
    Vec3 boresight(Index n, const Vec3& look_at) const;

private:
    ApertureKind kind_;
    Eigen::Matrix3Xd positions_;
    std::optional<UniformMeta> meta_;
    bool has_duplicates_ = false;
};

Aperture linear_aperture(Index ny, double dy, double z0);
Aperture planar_aperture(Index nx, Index ny, double dx, double dy, double z0);
Aperture circular_aperture(Index ntheta, double r0);
Aperture cylindrical_aperture(Index ntheta, Index ny, double dy, double r0);
Aperture irregular_aperture(const Eigen::Matrix3Xd& positions);

/// Rebuilds a uniform aperture from its kind and meta.
Aperture regenerate(ApertureKind kind, const UniformMeta& meta);

struct ApertureExtent {
    double dx = 0.0;  // span along x, m
    double dy = 0.0;  // span along y, m
};

ApertureExtent aperture_extent(const Aperture& a);

/// Returns a warning when element spacing exceeds lambda/4.
std::optional<std::string> spacing_warning(const Aperture& a, double lambda);

}  // namespace sarlab
