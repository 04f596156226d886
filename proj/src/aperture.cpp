#include "sarlab/aperture.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "sarlab/error.hpp"

namespace sarlab {

namespace {

double centred(Index i, Index n, double d) { return (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * d; }

double angle(Index i, Index n) { return kTwoPi * static_cast<double>(i) / static_cast<double>(n); }

void require_count(Index n, const char* field) {
    if (n < 1) throw ValidationError("count must be >= 1", field);
}

void require_positive(double v, const char* field) {
    if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("must be positive and finite", field);
}

}  // namespace

std::string to_string(ApertureKind kind) {
    switch (kind) {
        case ApertureKind::linear: return "linear";
        case ApertureKind::planar: return "planar";
        case ApertureKind::circular: return "circular";
        case ApertureKind::cylindrical: return "cylindrical";
        case ApertureKind::irregular: return "irregular";
    }
    return "unknown";
}

ApertureKind aperture_kind_from_string(const std::string& s) {
    for (auto k : {ApertureKind::linear, ApertureKind::planar, ApertureKind::circular, ApertureKind::cylindrical,
                   ApertureKind::irregular})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown aperture kind '" + s + "'", "aperture.kind");
}

Aperture::Aperture(ApertureKind kind, Eigen::Matrix3Xd positions, std::optional<UniformMeta> meta)
    : kind_(kind), positions_(std::move(positions)), meta_(meta) {
    if (positions_.cols() < 1) throw ValidationError("aperture needs at least one element", "aperture");
    if (!positions_.allFinite()) throw ValidationError("aperture positions must be finite", "aperture.positions");
    std::set<std::tuple<double, double, double>> seen;
    for (Index n = 0; n < positions_.cols(); ++n)
        if (!seen.emplace(positions_(0, n), positions_(1, n), positions_(2, n)).second) has_duplicates_ = true;
}

Vec3 Aperture::boresight(Index n, const Vec3& look_at) const {
    const Vec3 p = positions_.col(n);
    Vec3 b;
    switch (kind_) {
        case ApertureKind::linear:
        case ApertureKind::planar: b = Vec3(0.0, 0.0, look_at.z() >= p.z() ? 1.0 : -1.0); break;
        case ApertureKind::circular: b = Vec3(0.0, -p.y(), -p.z()); break;
        case ApertureKind::cylindrical: b = Vec3(-p.x(), 0.0, -p.z()); break;
        case ApertureKind::irregular: b = look_at - p; break;
    }
    const double norm = b.norm();
    return norm > 0.0 ? Vec3(b / norm) : Vec3(0.0, 0.0, 1.0);
}

Aperture linear_aperture(Index ny, double dy, double z0) {
    require_count(ny, "aperture.Ny");
    require_positive(dy, "aperture.dy");
    Eigen::Matrix3Xd pos(3, ny);
    for (Index j = 0; j < ny; ++j) pos.col(j) << 0.0, centred(j, ny, dy), z0;
    UniformMeta m;
    m.dy = dy;
    m.Z0 = z0;
    m.ny = ny;
    return Aperture(ApertureKind::linear, std::move(pos), m);
}

Aperture planar_aperture(Index nx, Index ny, double dx, double dy, double z0) {
    require_count(nx, "aperture.Nx");
    require_count(ny, "aperture.Ny");
    require_positive(dx, "aperture.dx");
    require_positive(dy, "aperture.dy");
    Eigen::Matrix3Xd pos(3, nx * ny);
    for (Index j = 0; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) pos.col(j * nx + i) << centred(i, nx, dx), centred(j, ny, dy), z0;
    UniformMeta m;
    m.dx = dx;
    m.dy = dy;
    m.Z0 = z0;
    m.nx = nx;
    m.ny = ny;
    return Aperture(ApertureKind::planar, std::move(pos), m);
}

Aperture circular_aperture(Index ntheta, double r0) {
    require_count(ntheta, "aperture.Ntheta");
    require_positive(r0, "aperture.R0");
    Eigen::Matrix3Xd pos(3, ntheta);
    for (Index t = 0; t < ntheta; ++t) {
        const double th = angle(t, ntheta);
        pos.col(t) << 0.0, r0 * std::cos(th), r0 * std::sin(th);
    }
    UniformMeta m;
    m.R0 = r0;
    m.dtheta = kTwoPi / static_cast<double>(ntheta);
    m.ntheta = ntheta;
    return Aperture(ApertureKind::circular, std::move(pos), m);
}

Aperture cylindrical_aperture(Index ntheta, Index ny, double dy, double r0) {
    require_count(ntheta, "aperture.Ntheta");
    require_count(ny, "aperture.Ny");
    require_positive(dy, "aperture.dy");
    require_positive(r0, "aperture.R0");
    Eigen::Matrix3Xd pos(3, ntheta * ny);
    for (Index t = 0; t < ntheta; ++t) {
        const double th = angle(t, ntheta);
        for (Index j = 0; j < ny; ++j) pos.col(t * ny + j) << r0 * std::cos(th), centred(j, ny, dy), r0 * std::sin(th);
    }
    UniformMeta m;
    m.R0 = r0;
    m.dy = dy;
    m.dtheta = kTwoPi / static_cast<double>(ntheta);
    m.ny = ny;
    m.ntheta = ntheta;
    return Aperture(ApertureKind::cylindrical, std::move(pos), m);
}

Aperture irregular_aperture(const Eigen::Matrix3Xd& positions) {
    return Aperture(ApertureKind::irregular, positions, std::nullopt);
}

Aperture regenerate(ApertureKind kind, const UniformMeta& m) {
    switch (kind) {
        case ApertureKind::linear: return linear_aperture(m.ny, m.dy, m.Z0);
        case ApertureKind::planar: return planar_aperture(m.nx, m.ny, m.dx, m.dy, m.Z0);
        case ApertureKind::circular: return circular_aperture(m.ntheta, m.R0);
        case ApertureKind::cylindrical: return cylindrical_aperture(m.ntheta, m.ny, m.dy, m.R0);
        case ApertureKind::irregular: break;
    }
    throw ValidationError("irregular apertures cannot be regenerated from meta", "aperture.kind");
}

ApertureExtent aperture_extent(const Aperture& a) {
    const auto& p = a.positions();
    return {p.row(0).maxCoeff() - p.row(0).minCoeff(), p.row(1).maxCoeff() - p.row(1).minCoeff()};
}

std::optional<std::string> spacing_warning(const Aperture& a, double lambda) {
    if (!a.meta()) return std::nullopt;
    const auto& m = *a.meta();
    const double limit = lambda / 4.0 * (1.0 + 1e-9);
    std::string msg;
    if (m.nx > 1 && m.dx > limit) msg += "dx exceeds lambda/4; ";
    if (m.ny > 1 && m.dy > limit) msg += "dy exceeds lambda/4; ";
    if (m.ntheta > 1 && m.R0 * m.dtheta > limit) msg += "arc spacing R0*dtheta exceeds lambda/4; ";
    if (msg.empty()) return std::nullopt;
    return msg;
}

}  // namespace sarlab
