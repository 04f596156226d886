#include "sarlab/analysis.hpp"

#include <cmath>

#include <json.hpp>

#include "sarlab/error.hpp"

namespace sarlab {

namespace {

void require_positive(double v, const char* field) {
    if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("must be positive and finite", field);
}

std::optional<double> cross_range(double lambda_c, double distance, double extent) {
    if (!(extent > 0.0)) return std::nullopt;
    return lambda_c * distance / (2.0 * extent);
}

}  // namespace

PlanarResolution planar_resolution(double lambda_c, double zref, double dx_extent, double dy_extent, double bandwidth) {
    require_positive(lambda_c, "lambdaC");
    require_positive(zref, "zref");
    require_positive(bandwidth, "B");
    if (dx_extent < 0.0 || dy_extent < 0.0) throw ValidationError("aperture extent must be >= 0", "Dx");
    return {cross_range(lambda_c, zref, dx_extent), cross_range(lambda_c, zref, dy_extent),
            kSpeedOfLight / (2.0 * bandwidth)};
}

CylindricalResolution cylindrical_resolution(double lambda_c, double r0, double dy_extent, double kmin, double kmax) {
    require_positive(lambda_c, "lambdaC");
    require_positive(r0, "R0");
    require_positive(kmin, "kmin");
    if (!(kmax > kmin)) throw ValidationError("kmax must exceed kmin", "kmax");
    if (dy_extent < 0.0) throw ValidationError("aperture extent must be >= 0", "Dy");
    return {cross_range(lambda_c, r0, dy_extent), 2.4 / (kmax + kmin)};
}

Index argmax_voxel(const ImageVolume& image) {
    if (image.voxels.size() == 0) throw ValidationError("image is empty", "image");
    Index best = 0;
    image.voxels.cwiseAbs2().maxCoeff(&best);
    return best;
}

std::vector<double> psf_widths(const ImageVolume& image, std::optional<Index> peak) {
    const Eigen::ArrayXd mag = image.magnitude();
    const Index p = peak.value_or(argmax_voxel(image));
    const double top = mag[p];
    if (!(top > 0.0)) throw ValidationError("image has no signal", "image");
    const double level = top / std::sqrt(2.0);
    const auto shape = image.shape();
    const auto idx = unravel(p, shape);

    std::vector<double> widths;
    for (Index a = 0; a < image.grid.dims(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const Index n = shape[ua];
        const Index i0 = idx[ua];
        if (i0 == 0 || i0 == n - 1) throw ValidationError("peak lies on the grid boundary", "image");
        auto at = [&](Index i) {
            auto j = idx;
            j[ua] = i;
            return mag[ravel(j, shape)];
        };
        // Fractional index where the profile first drops below `level` walking from the peak.
        auto crossing = [&](Index dir) {
            for (Index i = i0; i + dir >= 0 && i + dir < n; i += dir) {
                const double v0 = at(i);
                const double v1 = at(i + dir);
                if (v1 < level) return static_cast<double>(i) + static_cast<double>(dir) * (v0 - level) / (v0 - v1);
            }
            throw ValidationError("no half-power crossing inside the grid", "image");
        };
        const double left = crossing(-1);
        const double right = crossing(+1);
        widths.push_back((right - left) * image.grid.axes[ua].spacing());
    }
    return widths;
}

ImageComparison image_compare(const ImageVolume& a, const ImageVolume& b) {
    if (a.shape() != b.shape() || a.voxels.size() != b.voxels.size())
        throw ValidationError("images differ in shape", "image");
    Eigen::ArrayXd ma = a.magnitude();
    Eigen::ArrayXd mb = b.magnitude();
    const double pa = ma.maxCoeff();
    const double pb = mb.maxCoeff();
    if (!(pa > 0.0) || !(pb > 0.0)) throw ValidationError("NCC is undefined for an all-zero image", "image");
    ma /= pa;
    mb /= pb;
    const Eigen::ArrayXd da = ma - ma.mean();
    const Eigen::ArrayXd db = mb - mb.mean();
    const double denom = std::sqrt(da.square().sum() * db.square().sum());
    if (!(denom > 0.0)) throw ValidationError("NCC is undefined for a constant image", "image");

    ImageComparison r;
    r.ncc = (da * db).sum() / denom;
    r.rmse = std::sqrt((ma - mb).square().mean());
    const auto ia = unravel(argmax_voxel(a), a.shape());
    const auto ib = unravel(argmax_voxel(b), b.shape());
    for (std::size_t i = 0; i < ia.size(); ++i) r.peak_offset.push_back(ib[i] - ia[i]);
    return r;
}

std::string ResolutionReport::to_json() const {
    nlohmann::json j;
    j["predicted"] = predicted;
    j["measured"] = measured;
    j["config"] = config;
    return j.dump(2);
}

}  // namespace sarlab
