#include "sarlab/reconstruction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "sarlab/analysis.hpp"
#include "sarlab/error.hpp"
#include "sarlab/fft.hpp"

namespace sarlab {

namespace {

constexpr Index kResync = 32;

double uniform_step(const Eigen::VectorXd& v, const char* what) {
    if (v.size() < 2) throw ValidationError(std::string(what) + " needs at least two samples", "freq");
    const double step = (v[v.size() - 1] - v[0]) / static_cast<double>(v.size() - 1);
    for (Index i = 1; i < v.size(); ++i)
        if (std::abs(v[i] - v[i - 1] - step) > 1e-9 * std::abs(step))
            throw ValidationError(std::string(what) + " must be uniformly sampled", "freq");
    return step;
}

Eigen::VectorXd integer_axis(Index n) {
    Eigen::VectorXd v(n);
    for (Index m = 0; m < n; ++m) v[m] = static_cast<double>(m - n / 2);
    return v;
}

Eigen::VectorXd centred_axis(Index n, double d) {
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * d;
    return v;
}

// Zero-padded spatial FFT over uniformly spaced positions origin + i*d, giving
// sum_i s_i exp(-j kx x_i) on ascending kx.
class SpatialFft {
public:
    SpatialFft(Index n, Index padded, double d, double origin) : n_(n), padded_(padded), phase_(padded) {
        const Eigen::VectorXd kx = shifted_wavenumbers(padded, d);
        for (Index m = 0; m < padded; ++m) phase_[m] = std::polar(1.0, -kx[m] * origin);
    }

    void operator()(const Eigen::VectorXcd& src, Eigen::VectorXcd& dst) {
        buf_.setZero(padded_);
        buf_.head(n_) = src;
        fft_.forward(buf_);
        fftshift(buf_);
        dst = buf_.cwiseProduct(phase_);
    }

private:
    Index n_;
    Index padded_;
    Eigen::VectorXcd phase_;
    Eigen::VectorXcd buf_;
    UnitaryFft fft_;
};

// Unitary FFT over a full period, ascending bins.
class PeriodicFft {
public:
    void operator()(const Eigen::VectorXcd& src, Eigen::VectorXcd& dst) {
        buf_ = src;
        fft_.forward(buf_);
        fftshift(buf_);
        dst = buf_;
    }

private:
    Eigen::VectorXcd buf_;
    UnitaryFft fft_;
};

// Ascending bins of length n, zero-extended to `padded` bins and inverted.
class PaddedIfft {
public:
    PaddedIfft(Index n, Index padded) : n_(n), padded_(padded) {}

    void operator()(const Eigen::VectorXcd& src, Eigen::VectorXcd& dst) {
        buf_.setZero(padded_);
        buf_.segment(padded_ / 2 - n_ / 2, n_) = src;
        ifftshift(buf_);
        fft_.inverse(buf_);
        dst = buf_;
    }

private:
    Index n_;
    Index padded_;
    Eigen::VectorXcd buf_;
    UnitaryFft fft_;
};

class GridInverse {
public:
    GridInverse(Index n_k, double k0, double dk, Index n_x, double x0, double dx) : t_(n_k, k0, dk, n_x, x0, dx) {}
    void operator()(const Eigen::VectorXcd& src, Eigen::VectorXcd& dst) { t_.apply(src, dst); }

private:
    GridInverseTransform t_;
};

ComplexArray grid_inverse(const ComplexArray& in, Index axis, const Eigen::VectorXd& k, const GridAxis& out) {
    const double dk = k.size() > 1 ? k[1] - k[0] : 1.0;
    return map_axis(in, axis, out.count, GridInverse(k.size(), k[0], dk, out.count, out.min, out.spacing()));
}

KSpace make_stage(std::string name, std::vector<std::string> names, std::vector<Eigen::VectorXd> axes,
                  const ComplexArray& data) {
    return {std::move(name), std::move(names), std::move(axes), data};
}

const UniformMeta& require_meta(const EchoData& echo, ApertureKind kind, const char* algo) {
    if (echo.aperture_kind != kind || !echo.aperture_meta)
        throw ValidationError(std::string(algo) + " needs a uniform " + to_string(kind) +
                                  " aperture; use bpa for other geometries",
                              "aperture.kind");
    return *echo.aperture_meta;
}

void require_grid_dims(const GridSpec& grid, Index dims, const char* algo) {
    grid.validate();
    if (grid.dims() != dims)
        throw ValidationError(std::string(algo) + " needs a " + std::to_string(dims) + "-D grid", "grid.axes");
}

double cubic_weight(double t, int tap) {
    // Catmull-Rom taps at offsets -1, 0, 1, 2.
    const double t2 = t * t;
    const double t3 = t2 * t;
    switch (tap) {
        case 0: return -0.5 * t3 + t2 - 0.5 * t;
        case 1: return 1.5 * t3 - 2.5 * t2 + 1.0;
        case 2: return -1.5 * t3 + 2.0 * t2 + 0.5 * t;
        default: return 0.5 * t3 - 0.5 * t2;
    }
}

// Stolt over every line of `in` (last axis k); `transverse` holds the
// wavenumber axis of each leading dimension.
ComplexArray stolt_lines(const ComplexArray& in, const std::vector<Eigen::VectorXd>& transverse, double k0, double dk,
                         const Eigen::VectorXd& kz, Interp interp, bool jacobian, Index& zeroed) {
    const Index nk = in.shape.back();
    const Index nkz = kz.size();
    std::vector<Index> lead(in.shape.begin(), in.shape.end() - 1);
    std::vector<Index> out_shape = lead;
    out_shape.push_back(nkz);
    ComplexArray out(out_shape);
    const Index lines = in.size() / nk;
    const double dkz = nkz > 1 ? kz[1] - kz[0] : 1.0;
    Index bad = 0;
#pragma omp parallel for schedule(static) reduction(+ : bad)
    for (Index l = 0; l < lines; ++l) {
        const auto idx = unravel(l, lead);
        double krho2 = 0.0;
        for (std::size_t a = 0; a < idx.size(); ++a) krho2 += transverse[a][idx[a]] * transverse[a][idx[a]];
        if (!stolt_line(in.data.segment(l * nk, nk), k0, dk, std::sqrt(krho2), kz[0], dkz, interp, jacobian,
                        out.data.segment(l * nkz, nkz)))
            ++bad;
    }
    zeroed = bad;
    return out;
}

double in_plane_radius(const GridAxis& a, const GridAxis& b) {
    double r = 0.0;
    for (double u : {a.min, a.max})
        for (double v : {b.min, b.max}) r = std::max(r, std::hypot(u, v));
    return r;
}

Reconstruction rma_rectilinear(const EchoData& echo, const GridSpec& grid, const RmaOptions& opt, bool planar) {
    const char* algo = planar ? "rma-planar" : "rma-linear";
    echo.validate();
    const auto& meta = require_meta(echo, planar ? ApertureKind::planar : ApertureKind::linear, algo);
    require_grid_dims(grid, planar ? 3 : 2, algo);
    if (opt.pad < 1) throw ValidationError("pad must be >= 1", "reconstruction.pad");

    struct SpatialAxis {
        Index n;
        double d;
    };
    std::vector<SpatialAxis> sp;
    if (planar) sp.push_back({meta.nx, meta.dx});
    sp.push_back({meta.ny, meta.dy});
    Index expected = 1;
    for (const auto& a : sp) expected *= a.n;
    if (expected != echo.elements()) throw ValidationError("echo rows do not match aperture meta", "aperture");

    const Index nf = echo.frequencies();
    const Eigen::VectorXd k = echo.freq.wavenumbers();
    const double dk = uniform_step(k, "frequency axis");

    std::vector<Index> shape;
    for (const auto& a : sp) shape.push_back(a.n);
    shape.push_back(nf);
    ComplexArray arr(shape);
    if (planar) {
        for (Index j = 0; j < meta.ny; ++j)
            for (Index i = 0; i < meta.nx; ++i)
                arr.data.segment((i * meta.ny + j) * nf, nf) = echo.samples.row(j * meta.nx + i).transpose();
    } else {
        for (Index j = 0; j < meta.ny; ++j) arr.data.segment(j * nf, nf) = echo.samples.row(j).transpose();
    }

    Reconstruction rec;
    std::vector<std::string> names = planar ? std::vector<std::string>{"x", "y", "k"} : std::vector<std::string>{"y", "k"};
    std::vector<Eigen::VectorXd> axes;
    for (const auto& a : sp) axes.push_back(centred_axis(a.n, a.d));
    axes.push_back(k);
    if (opt.keep_kspace) rec.stages.push_back(make_stage("stage0_signal", names, axes, arr));

    std::vector<Eigen::VectorXd> kaxes;
    for (std::size_t a = 0; a < sp.size(); ++a) {
        const Index padded = next_fast_len(opt.pad * sp[a].n);
        const double origin = -0.5 * static_cast<double>(sp[a].n - 1) * sp[a].d;
        arr = map_axis(arr, static_cast<Index>(a), padded, SpatialFft(sp[a].n, padded, sp[a].d, origin));
        kaxes.push_back(shifted_wavenumbers(padded, sp[a].d));
    }
    names = planar ? std::vector<std::string>{"kx", "ky", "k"} : std::vector<std::string>{"ky", "k"};
    axes = kaxes;
    axes.push_back(k);
    if (opt.keep_kspace) rec.stages.push_back(make_stage("stage1_kspace", names, axes, arr));

    // Reference the phase to the grid centre depth.
    const GridAxis& zax = grid.axes.back();
    const double offset = zax.center() - meta.Z0;
    if (offset == 0.0) throw ValidationError("grid centre lies in the aperture plane", "grid");
    const double side = offset > 0.0 ? 1.0 : -1.0;
    const double depth = std::abs(offset);
    std::vector<Index> lead(shape.size() - 1);
    for (std::size_t a = 0; a < lead.size(); ++a) lead[a] = kaxes[a].size();
    const Index lines = arr.size() / nf;
#pragma omp parallel for schedule(static)
    for (Index l = 0; l < lines; ++l) {
        const auto idx = unravel(l, lead);
        const double kx = planar ? kaxes[0][idx[0]] : 0.0;
        const double ky = kaxes.back()[idx.back()];
        for (Index i = 0; i < nf; ++i) {
            const auto kz = dispersion_kz(k[i], kx, ky);
            cd& v = arr.data[l * nf + i];
            v = kz ? v * std::polar(1.0, *kz * depth) : cd(0.0);
        }
    }
    if (opt.keep_kspace) rec.stages.push_back(make_stage("stage2_compensated", names, axes, arr));

    const Eigen::VectorXd kz = default_kz_axis(k);
    Index zeroed = 0;
    arr = stolt_lines(arr, kaxes, k[0], dk, kz, opt.interp, opt.jacobian, zeroed);
    names.back() = "kz";
    axes.back() = kz;
    if (opt.keep_kspace) rec.stages.push_back(make_stage("stage3_stolt", names, axes, arr));

    // Depth coordinate u = side * (z - z_c) carries the kz phase.
    const Index last = arr.rank() - 1;
    arr = map_axis(arr, last, zax.count,
                   GridInverse(kz.size(), kz[0], kz[1] - kz[0], zax.count, side * (zax.min - zax.center()),
                               side * zax.spacing()));
    for (Index a = last - 1; a >= 0; --a) arr = grid_inverse(arr, a, kaxes[static_cast<std::size_t>(a)], grid.axes[static_cast<std::size_t>(a)]);

    rec.image = ImageVolume(grid, algo);
    rec.image.voxels = std::move(arr.data);
    return rec;
}

Reconstruction rma_polar(const EchoData& echo, const GridSpec& grid, const RmaOptions& opt, bool cylindrical) {
    const char* algo = cylindrical ? "rma-cylindrical" : "rma-circular";
    echo.validate();
    const auto& meta = require_meta(echo, cylindrical ? ApertureKind::cylindrical : ApertureKind::circular, algo);
    require_grid_dims(grid, cylindrical ? 3 : 2, algo);
    if (opt.pad < 1) throw ValidationError("pad must be >= 1", "reconstruction.pad");
    const Index nt = meta.ntheta;
    const Index ny = cylindrical ? meta.ny : 1;
    if (nt * ny != echo.elements()) throw ValidationError("echo rows do not match aperture meta", "aperture");
    if (nt < 2) throw ValidationError("polar reconstruction needs at least two angles", "aperture.Ntheta");

    const Index nf = echo.frequencies();
    const Eigen::VectorXd k = echo.freq.wavenumbers();

    // Row order of the echo (theta outer, y inner) is already C order.
    ComplexArray arr(cylindrical ? std::vector<Index>{nt, ny, nf} : std::vector<Index>{nt, nf});
    for (Index n = 0; n < echo.elements(); ++n) arr.data.segment(n * nf, nf) = echo.samples.row(n).transpose();

    Reconstruction rec;
    Eigen::VectorXd theta(nt);
    for (Index t = 0; t < nt; ++t) theta[t] = kTwoPi * static_cast<double>(t) / static_cast<double>(nt);
    auto with_y = [&](std::string a, std::string b, std::string c) {
        return cylindrical ? std::vector<std::string>{a, b, c} : std::vector<std::string>{a, c};
    };
    if (opt.keep_kspace) {
        std::vector<Eigen::VectorXd> axes{theta};
        if (cylindrical) axes.push_back(centred_axis(ny, meta.dy));
        axes.push_back(k);
        rec.stages.push_back(make_stage("stage0_signal", with_y("theta", "y", "k"), axes, arr));
    }

    Eigen::VectorXd ky = Eigen::VectorXd::Zero(1);
    if (cylindrical) {
        const Index padded = next_fast_len(opt.pad * ny);
        arr = map_axis(arr, 1, padded, SpatialFft(ny, padded, meta.dy, -0.5 * static_cast<double>(ny - 1) * meta.dy));
        ky = shifted_wavenumbers(padded, meta.dy);
    }
    const Index nky = ky.size();
    arr = map_axis(arr, 0, nt, PeriodicFft());
    std::vector<Eigen::VectorXd> kaxes{integer_axis(nt)};
    if (cylindrical) kaxes.push_back(ky);
    kaxes.push_back(k);
    if (opt.keep_kspace) rec.stages.push_back(make_stage("stage1_kspace", with_y("ktheta", "ky", "k"), kaxes, arr));

    // Matched filter with the azimuth kernel.
    const Index pairs = nky * nf;
#pragma omp parallel for schedule(dynamic, 4)
    for (Index p = 0; p < pairs; ++p) {
        const Index iy = p / nf;
        const Index ik = p % nf;
        const Eigen::VectorXcd c = azimuth_series(ky[iy], k[ik], meta.R0, nt);
        for (Index t = 0; t < nt; ++t) arr.data[(t * nky + iy) * nf + ik] *= std::conj(c[t]);
    }
    if (opt.keep_kspace)
        rec.stages.push_back(make_stage("stage2_compensated", with_y("ktheta", "ky", "k"), kaxes, arr));

    if (opt.polar_oversample < 1)
        throw ValidationError("polar_oversample must be >= 1", "reconstruction.polar_oversample");
    const Index na = opt.pad * nt;
    arr = map_axis(arr, 0, na, PaddedIfft(nt, na));

    // Rectangular in-plane wavenumber grid.
    const GridAxis& g1 = grid.axes.front();
    const GridAxis& g2 = grid.axes.back();
    const double r_max = std::max(in_plane_radius(g1, g2), 1e-6);
    const double kmax = k.maxCoeff();
    const double dK = kPi / (static_cast<double>(opt.polar_oversample) * r_max);
    const auto half = static_cast<Index>(std::ceil(2.0 * kmax / dK));
    const Index nK = 2 * half + 1;
    Eigen::VectorXd K(nK);
    for (Index i = 0; i < nK; ++i) K[i] = static_cast<double>(i - half) * dK;

    ComplexArray stolt(cylindrical ? std::vector<Index>{nK, nky, nK} : std::vector<Index>{nK, nK});
#pragma omp parallel for schedule(dynamic, 1)
    for (Index iy = 0; iy < nky; ++iy) {
        std::vector<Index> valid;
        for (Index i = 0; i < nf; ++i)
            if (4.0 * k[i] * k[i] > ky[iy] * ky[iy]) valid.push_back(i);
        if (valid.size() < 2) continue;
        Eigen::MatrixXcd plane(na, static_cast<Index>(valid.size()));
        Eigen::VectorXd kr(static_cast<Index>(valid.size()));
        for (std::size_t v = 0; v < valid.size(); ++v) {
            const Index i = valid[v];
            kr[static_cast<Index>(v)] = std::sqrt(4.0 * k[i] * k[i] - ky[iy] * ky[iy]);
            for (Index q = 0; q < na; ++q) plane(q, static_cast<Index>(v)) = arr.data[(q * nky + iy) * nf + i];
        }
        const Eigen::MatrixXcd out = stolt_polar(plane, kr, K, K);
        for (Index i1 = 0; i1 < nK; ++i1)
            for (Index i2 = 0; i2 < nK; ++i2) stolt.data[(i1 * nky + iy) * nK + i2] = out(i1, i2);
    }
    arr = std::move(stolt);
    if (opt.keep_kspace) {
        std::vector<Eigen::VectorXd> axes{K};
        if (cylindrical) axes.push_back(ky);
        axes.push_back(K);
        rec.stages.push_back(make_stage("stage3_stolt", with_y("k1", "ky", "k2"), axes, arr));
    }

    arr = grid_inverse(arr, arr.rank() - 1, K, g2);
    if (cylindrical) arr = grid_inverse(arr, 1, ky, grid.axes[1]);
    arr = grid_inverse(arr, 0, K, g1);

    rec.image = ImageVolume(grid, algo);
    rec.image.voxels = std::move(arr.data);
    return rec;
}

}  // namespace

Interp interp_from_string(const std::string& s) {
    if (s == "linear") return Interp::linear;
    if (s == "cubic") return Interp::cubic;
    throw ValidationError("unknown interpolation '" + s + "'", "reconstruction.interp");
}

std::string to_string(Interp i) { return i == Interp::linear ? "linear" : "cubic"; }

ImageVolume bpa(const EchoData& echo, const GridSpec& grid, const ProgressFn& progress) {
    echo.validate();
    grid.validate();
    const Index n_el = echo.elements();
    const Index n_f = echo.frequencies();
    const Eigen::MatrixXcd st = echo.samples.transpose();  // one column per element
    const Eigen::VectorXd k2 = 2.0 * echo.freq.wavenumbers();
    bool uniform = true;
    const double dk2 = n_f > 1 ? (k2[n_f - 1] - k2[0]) / static_cast<double>(n_f - 1) : 0.0;
    for (Index i = 1; i < n_f; ++i)
        if (std::abs(k2[i] - k2[i - 1] - dk2) > 1e-9 * dk2) uniform = false;

    const Eigen::Matrix3Xd pts = grid.points();
    const auto& pos = echo.positions;
    ImageVolume img(grid, "bpa");
    const Index nv = pts.cols();
    std::atomic<Index> done{0};
    const Index report_every = std::max<Index>(1, nv / 100);

#pragma omp parallel for schedule(dynamic, 16)
    for (Index v = 0; v < nv; ++v) {
        const Vec3 p = pts.col(v);
        cd acc(0.0, 0.0);
        for (Index n = 0; n < n_el; ++n) {
            const double range = (p - pos.col(n)).norm();
            const cd* s = st.col(n).data();
            cd line(0.0, 0.0);
            if (uniform) {
                const cd step = std::polar(1.0, std::remainder(dk2 * range, kTwoPi));
                cd ph;
                for (Index i = 0; i < n_f; ++i) {
                    if (i % kResync == 0) ph = std::polar(1.0, std::remainder(k2[i] * range, kTwoPi));
                    line += s[i] * ph;
                    ph *= step;
                }
            } else {
                for (Index i = 0; i < n_f; ++i) line += s[i] * std::polar(1.0, std::remainder(k2[i] * range, kTwoPi));
            }
            acc += line;
        }
        img.voxels[v] = acc;
        const Index finished = ++done;
        if (progress && (finished % report_every == 0 || finished == nv))
            progress(static_cast<double>(finished) / static_cast<double>(nv));
    }
    return img;
}

std::optional<double> dispersion_kz(double k, double kx, double ky) {
    const double kz2 = 4.0 * k * k - kx * kx - ky * ky;
    if (kz2 < 0.0) return std::nullopt;
    return std::sqrt(kz2);
}

Eigen::VectorXd default_kz_axis(const Eigen::VectorXd& k) {
    if (k.size() < 2) throw ValidationError("need at least two wavenumbers", "freq");
    return Eigen::VectorXd::LinSpaced(k.size(), 2.0 * k.minCoeff(), 2.0 * k.maxCoeff());
}

bool stolt_line(const Eigen::Ref<const Eigen::VectorXcd>& in, double k0, double dk, double krho, double kz0,
                double dkz, Interp interp, bool jacobian, Eigen::Ref<Eigen::VectorXcd> out) {
    const Index nk = in.size();
    const double k_last = k0 + dk * static_cast<double>(nk - 1);
    // First propagating sample: 2k >= krho.
    const double first_k = std::max(k0, 0.5 * krho);
    const Index first = std::max<Index>(0, static_cast<Index>(std::ceil((first_k - k0) / dk - 1e-9)));
    if (nk - first < 2 || 0.5 * krho > k_last) {
        out.setZero();
        return false;
    }
    auto sample = [&](Index i) { return i < first || i >= nk ? cd(0.0) : in[i]; };
    const double lo = static_cast<double>(first);
    const double hi = static_cast<double>(nk - 1);
    for (Index j = 0; j < out.size(); ++j) {
        const double kz = kz0 + dkz * static_cast<double>(j);
        const double kk = 0.5 * std::sqrt(kz * kz + krho * krho);
        const double u = (kk - k0) / dk;
        if (kz <= 0.0 || u < lo - 1e-9 || u > hi + 1e-9) {
            out[j] = 0.0;
            continue;
        }
        const double uc = std::clamp(u, lo, hi);
        const Index i0 = std::min(static_cast<Index>(std::floor(uc)), nk - 2);
        const double t = uc - static_cast<double>(i0);
        cd v;
        if (interp == Interp::cubic && i0 - 1 >= first && i0 + 2 < nk) {
            v = 0.0;
            for (int tap = 0; tap < 4; ++tap) v += cubic_weight(t, tap) * sample(i0 - 1 + tap);
        } else {
            v = (1.0 - t) * sample(i0) + t * sample(i0 + 1);
        }
        if (jacobian) v *= kz / (2.0 * kk);
        out[j] = v;
    }
    return true;
}

KSpace stolt_rectilinear(const KSpace& spectrum, const Eigen::VectorXd& kz_axis, Interp interp, bool jacobian,
                         Index* zeroed_lines) {
    const auto& sh = spectrum.spectrum.shape;
    if (sh.empty() || spectrum.axes.size() != sh.size())
        throw ValidationError("spectrum axes do not match its shape", "kspace");
    for (std::size_t a = 0; a < sh.size(); ++a)
        if (spectrum.axes[a].size() != sh[a]) throw ValidationError("spectrum axes do not match its shape", "kspace");
    const Eigen::VectorXd& k = spectrum.axes.back();
    const double dk = uniform_step(k, "k axis");
    uniform_step(kz_axis, "kz axis");
    std::vector<Eigen::VectorXd> transverse(spectrum.axes.begin(), spectrum.axes.end() - 1);
    Index zeroed = 0;
    KSpace out;
    out.stage = "stage3_stolt";
    out.axis_names = spectrum.axis_names;
    if (!out.axis_names.empty()) out.axis_names.back() = "kz";
    out.axes = spectrum.axes;
    out.axes.back() = kz_axis;
    out.spectrum = stolt_lines(spectrum.spectrum, transverse, k[0], dk, kz_axis, interp, jacobian, zeroed);
    if (zeroed_lines) *zeroed_lines = zeroed;
    return out;
}

Reconstruction rma_planar(const EchoData& echo, const GridSpec& grid, const RmaOptions& options) {
    return rma_rectilinear(echo, grid, options, true);
}

Reconstruction rma_linear(const EchoData& echo, const GridSpec& grid, const RmaOptions& options) {
    return rma_rectilinear(echo, grid, options, false);
}

Eigen::VectorXcd azimuth_kernel(double ky, double k, double r0, Index ntheta) {
    if (ntheta < 2) throw ValidationError("Ntheta must be >= 2", "aperture.Ntheta");
    const double kr2 = 4.0 * k * k - ky * ky;
    if (kr2 < 0.0) return Eigen::VectorXcd::Zero(ntheta);
    const double a = std::sqrt(kr2) * r0;
    Eigen::VectorXcd g(ntheta);
    for (Index n = 0; n < ntheta; ++n) {
        const double theta = kTwoPi * static_cast<double>(n) / static_cast<double>(ntheta);
        g[n] = std::polar(1.0, -std::remainder(a * std::cos(theta), kTwoPi));
    }
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    Eigen::VectorXcd G(ntheta);
    fft.fwd(G, g);
    fftshift(G);
    return G;
}

Eigen::VectorXcd azimuth_series(double ky, double k, double r0, Index ntheta) {
    const double kr2 = 4.0 * k * k - ky * ky;
    const double a = kr2 > 0.0 ? std::sqrt(kr2) * r0 : 0.0;
    // J_m(a) is negligible for |m| > a + O(a^(1/3)); oversample past that.
    const auto need = static_cast<Index>(std::ceil(2.0 * a + 12.0 * std::cbrt(a) + 32.0)) + ntheta;
    const Index m = next_fast_len(std::max(need, ntheta));
    const Eigen::VectorXcd G = azimuth_kernel(ky, k, r0, m);
    return G.segment(m / 2 - ntheta / 2, ntheta) / static_cast<double>(m);
}

Eigen::MatrixXcd stolt_polar(const Eigen::MatrixXcd& p, const Eigen::VectorXd& kr, const Eigen::VectorXd& k1,
                             const Eigen::VectorXd& k2) {
    const Index na = p.rows();
    const Index nr = kr.size();
    if (nr < 2 || p.cols() != nr) throw ValidationError("polar Stolt needs >= 2 kr samples matching the data", "kspace");
    for (Index i = 1; i < nr; ++i)
        if (!(kr[i] > kr[i - 1])) throw ValidationError("kr samples must be strictly increasing", "kspace");
    if (!(kr[0] > 0.0)) throw ValidationError("kr samples must be positive", "kspace");
    if (na < 2) throw ValidationError("polar Stolt needs >= 2 alpha samples", "kspace");

    const double da = kTwoPi / static_cast<double>(na);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k1.size(), k2.size());
    for (Index i1 = 0; i1 < k1.size(); ++i1) {
        for (Index i2 = 0; i2 < k2.size(); ++i2) {
            const double r = std::hypot(k1[i1], k2[i2]);
            if (r < kr[0] || r > kr[nr - 1]) continue;
            double alpha = std::atan2(-k2[i2], -k1[i1]);
            if (alpha < 0.0) alpha += kTwoPi;
            const double qa = alpha / da;
            auto q0 = static_cast<Index>(std::floor(qa));
            const double ta = qa - static_cast<double>(q0);
            q0 %= na;
            const Index q1 = (q0 + 1) % na;
            const auto* it = std::upper_bound(kr.data(), kr.data() + nr, r);
            const Index i = std::clamp<Index>(static_cast<Index>(it - kr.data()) - 1, 0, nr - 2);
            const double tr = (r - kr[i]) / (kr[i + 1] - kr[i]);
            out(i1, i2) = (1 - ta) * (1 - tr) * p(q0, i) + ta * (1 - tr) * p(q1, i) + (1 - ta) * tr * p(q0, i + 1) +
                          ta * tr * p(q1, i + 1);
        }
    }
    return out;
}

Reconstruction rma_cylindrical(const EchoData& echo, const GridSpec& grid, const RmaOptions& options) {
    return rma_polar(echo, grid, options, true);
}

Reconstruction rma_circular(const EchoData& echo, const GridSpec& grid, const RmaOptions& options) {
    return rma_polar(echo, grid, options, false);
}

Reconstruction reconstruct(const std::string& algorithm, const EchoData& echo, const GridSpec& grid,
                           const RmaOptions& options, const ProgressFn& progress) {
    Reconstruction rec;
    if (algorithm == "bpa") rec.image = bpa(echo, grid, progress);
    else if (algorithm == "rma-planar") rec = rma_planar(echo, grid, options);
    else if (algorithm == "rma-linear") rec = rma_linear(echo, grid, options);
    else if (algorithm == "rma-cylindrical") rec = rma_cylindrical(echo, grid, options);
    else if (algorithm == "rma-circular") rec = rma_circular(echo, grid, options);
    else throw ValidationError("unknown algorithm '" + algorithm + "'", "algo");
    if (progress) progress(1.0);
    return rec;
}

std::string default_algorithm(ApertureKind kind) {
    switch (kind) {
        case ApertureKind::linear: return "rma-linear";
        case ApertureKind::planar: return "rma-planar";
        case ApertureKind::circular: return "rma-circular";
        case ApertureKind::cylindrical: return "rma-cylindrical";
        case ApertureKind::irregular: return "bpa";
    }
    return "bpa";
}

GridSpec default_grid(const EchoData& echo, const Eigen::AlignedBox3d& region, Index max_count) {
    echo.validate();
    if (region.isEmpty()) throw ValidationError("grid region is empty", "grid");
    const Eigen::VectorXd& f = echo.freq.values();
    const double bandwidth = f[f.size() - 1] - f[0];
    if (!(bandwidth > 0.0)) throw ValidationError("default grid needs a nonzero bandwidth", "waveform");
    const double lambda_c = kSpeedOfLight / (0.5 * (f[0] + f[f.size() - 1]));
    const auto ext = aperture_extent(echo.aperture());
    const Vec3 centre = region.center();

    Vec3 spacing = Vec3::Constant(kSpeedOfLight / (4.0 * bandwidth));
    const UniformMeta meta = echo.aperture_meta.value_or(UniformMeta{});
    switch (echo.aperture_kind) {
        case ApertureKind::linear:
        case ApertureKind::planar: {
            const double zref = std::max(std::abs(centre.z() - meta.Z0), lambda_c);
            const auto r = planar_resolution(lambda_c, zref, ext.dx, ext.dy, bandwidth);
            if (r.dx) spacing.x() = 0.5 * *r.dx;
            if (r.dy) spacing.y() = 0.5 * *r.dy;
            spacing.z() = 0.5 * r.dz;
            break;
        }
        case ApertureKind::circular:
        case ApertureKind::cylindrical: {
            const double kmin = wavenumber(f[0]);
            const double kmax = wavenumber(f[f.size() - 1]);
            const auto r = cylindrical_resolution(lambda_c, meta.R0, ext.dy, kmin, kmax);
            spacing = Vec3::Constant(0.5 * r.drho);
            if (echo.aperture_kind == ApertureKind::cylindrical && r.dy) spacing.y() = 0.5 * *r.dy;
            break;
        }
        case ApertureKind::irregular: break;
    }

    auto make_axis = [&](int c) {
        double lo = region.min()[c];
        double hi = region.max()[c];
        if (hi - lo < spacing[c]) {
            lo = 0.5 * (lo + hi) - spacing[c];
            hi = lo + 2.0 * spacing[c];
        }
        const auto count = std::clamp<Index>(static_cast<Index>(std::ceil((hi - lo) / spacing[c])) + 1, 2, max_count);
        return GridAxis{lo, hi, count};
    };
    const bool flat = echo.aperture_kind == ApertureKind::linear || echo.aperture_kind == ApertureKind::circular;
    if (flat) return GridSpec::make2d(make_axis(1), make_axis(2), centre.x());
    return GridSpec::make3d(make_axis(0), make_axis(1), make_axis(2));
}

}  // namespace sarlab
