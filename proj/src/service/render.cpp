#include "sarlab/service/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <zlib.h>

#include "sarlab/error.hpp"

namespace sarlab::service {

namespace {

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::byte>((v >> s) & 0xff));
}

void chunk(std::vector<std::byte>& out, const char type[4], const std::vector<std::byte>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(type[i]));
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data() + start), static_cast<uInt>(out.size() - start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

Eigen::MatrixXd render_plane(const ImageVolume& image, const RenderOptions& opt) {
    const auto shape = image.shape();
    const Eigen::ArrayXd mag = image.magnitude();
    if (image.grid.dims() == 2)
        return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(mag.data(), shape[0],
                                                                                                      shape[1]);
    if (opt.axis < 0 || opt.axis > 2) throw ValidationError("must be 0, 1 or 2", "axis");
    const auto a = static_cast<std::size_t>(opt.axis);
    const std::size_t r = a == 0 ? 1 : 0;
    const std::size_t c = a == 2 ? 1 : 2;
    const Index n = shape[a];
    const Index index = opt.index < 0 ? n / 2 : opt.index;
    if (opt.mode == RenderMode::slice && index >= n)
        throw ValidationError("slice index " + std::to_string(index) + " out of range [0, " + std::to_string(n) + ")", "index");

    Eigen::MatrixXd plane = Eigen::MatrixXd::Zero(shape[r], shape[c]);
    std::vector<Index> idx(3);
    for (Index i = 0; i < shape[r]; ++i)
        for (Index j = 0; j < shape[c]; ++j) {
            idx[r] = i;
            idx[c] = j;
            if (opt.mode == RenderMode::slice) {
                idx[a] = index;
                plane(i, j) = mag[ravel(idx, shape)];
            } else {
                double m = 0.0;
                for (Index k = 0; k < n; ++k) {
                    idx[a] = k;
                    m = std::max(m, mag[ravel(idx, shape)]);
                }
                plane(i, j) = m;
            }
        }
    return plane;
}

std::array<std::uint8_t, 3> jet(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto channel = [t](double centre) {
        const double v = std::clamp(1.5 - std::abs(4.0 * t - centre), 0.0, 1.0);
        return static_cast<std::uint8_t>(std::lround(255.0 * v));
    };
    return {channel(3.0), channel(2.0), channel(1.0)};
}

std::vector<std::byte> encode_png(Index width, Index height, const std::vector<std::uint8_t>& rgb) {
    if (width < 1 || height < 1) throw ValidationError("image must be at least 1x1", "image");
    if (rgb.size() != static_cast<std::size_t>(3 * width * height)) throw ValidationError("pixel buffer size mismatch", "image");
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height * (3 * width + 1)));
    for (Index y = 0; y < height; ++y) {
        raw.push_back(0);
        const auto* row = rgb.data() + 3 * width * y;
        raw.insert(raw.end(), row, row + 3 * width);
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::byte> z(zlen);
    if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw std::runtime_error("zlib compression failed");
    z.resize(zlen);

    std::vector<std::byte> out;
    for (unsigned char b : {0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a}) out.push_back(static_cast<std::byte>(b));
    std::vector<std::byte> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    for (unsigned char b : {8, 2, 0, 0, 0}) ihdr.push_back(static_cast<std::byte>(b));  // 8-bit RGB
    chunk(out, "IHDR", ihdr);
    chunk(out, "IDAT", z);
    chunk(out, "IEND", {});
    return out;
}

std::vector<std::byte> render_png(const ImageVolume& image, const RenderOptions& opt) {
    if (!(opt.dynamic_range_db > 0.0) || !std::isfinite(opt.dynamic_range_db))
        throw ValidationError("must be positive", "dr");
    const Eigen::MatrixXd plane = render_plane(image, opt);
    const double top = image.voxels.size() ? image.magnitude().maxCoeff() : 0.0;
    const double dr = opt.dynamic_range_db;
    std::vector<std::uint8_t> rgb;
    rgb.reserve(static_cast<std::size_t>(3 * plane.size()));
    for (Index i = 0; i < plane.rows(); ++i)
        for (Index j = 0; j < plane.cols(); ++j) {
            double t = 0.0;
            if (top > 0.0 && plane(i, j) > 0.0) {
                const double db = std::clamp(20.0 * std::log10(plane(i, j) / top), -dr, 0.0);
                t = (db + dr) / dr;
            }
            const auto c = jet(t);
            rgb.insert(rgb.end(), c.begin(), c.end());
        }
    return encode_png(plane.cols(), plane.rows(), rgb);
}

}  // namespace sarlab::service
