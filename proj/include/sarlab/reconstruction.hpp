#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sarlab/forward_model.hpp"
#include "sarlab/grid.hpp"

namespace sarlab {

enum class Interp { linear, cubic };

Interp interp_from_string(const std::string& s);
std::string to_string(Interp i);

struct RmaOptions {
    Index pad = 2;                   // zero-padding factor of the spatial FFT axes
    Index polar_oversample = 4;      // density of the rectangular k-grid in the polar Stolt map
    Interp interp = Interp::linear;  // Stolt interpolation kernel
    bool keep_kspace = false;        // retain intermediate stages
    bool jacobian = true;            // dk/dkz weighting in the rectilinear Stolt map
};

/// Image plus the intermediate stages (filled only with keep_kspace):
/// stage0_signal, stage1_kspace, stage2_compensated, stage3_stolt.
struct Reconstruction {
    ImageVolume image;
    std::vector<KSpace> stages;
};

/// Backprojection over an arbitrary aperture:
/// sigma(t) = sum_n sum_k s(r_n, f_k) exp(+j 4 pi f_k / c |t - r_n|).
ImageVolume bpa(const EchoData& echo, const GridSpec& grid, const ProgressFn& progress = {});

/// kz = sqrt(4k^2 - kx^2 - ky^2), or nullopt in the evanescent region.
std::optional<double> dispersion_kz(double k, double kx, double ky);

/// Default uniform kz axis for a band: [2 k_min, 2 k_max] with one sample per frequency.
Eigen::VectorXd default_kz_axis(const Eigen::VectorXd& k);

/// Resamples one spectral line S(k), k = k0 + i*dk, at transverse wavenumber
/// krho onto kz = kz0 + j*dkz. Returns false (and zeros `out`) when fewer than
/// two propagating samples exist.
bool stolt_line(const Eigen::Ref<const Eigen::VectorXcd>& in, double k0, double dk, double krho, double kz0,
                double dkz, Interp interp, bool jacobian, Eigen::Ref<Eigen::VectorXcd> out);

/// Rectilinear Stolt map of a spectrum whose last axis is k and whose leading
/// axes are transverse wavenumbers. `zeroed_lines` receives the number of lines
/// with no propagating support.
KSpace stolt_rectilinear(const KSpace& spectrum, const Eigen::VectorXd& kz_axis, Interp interp = Interp::linear,
                         bool jacobian = true, Index* zeroed_lines = nullptr);

/// 3-D image from a planar aperture. Grid axes (x, y, z).
Reconstruction rma_planar(const EchoData& echo, const GridSpec& grid, const RmaOptions& options = {});
/// 2-D image in the y-z plane from a linear aperture.
Reconstruction rma_linear(const EchoData& echo, const GridSpec& grid, const RmaOptions& options = {});

/// DFT over theta_n = 2 pi n / N of exp(-j kr R0 cos theta_n), kr = sqrt(4k^2 - ky^2),
/// in ascending k_theta order (bin m - N/2). Zero when |ky| >= 2k.
Eigen::VectorXcd azimuth_kernel(double ky, double k, double r0, Index ntheta);

/// Fourier-series coefficients c_m of exp(-j kr R0 cos theta) for m = -N/2 .. N/2-1,
/// evaluated without aliasing by an oversampled azimuth_kernel.
Eigen::VectorXcd azimuth_series(double ky, double k, double r0, Index ntheta);

/// Polar-to-rectangular resampling of one ky plane. `p` holds P(alpha_q, kr_i)
/// on alpha_q = 2 pi q / rows and increasing kr; nodes (k1, k2) are read at
/// kr = |K|, alpha = atan2(-k2, -k1). Nodes outside [kr_front, kr_back] are 0.
Eigen::MatrixXcd stolt_polar(const Eigen::MatrixXcd& p, const Eigen::VectorXd& kr, const Eigen::VectorXd& k1,
                             const Eigen::VectorXd& k2);

/// 3-D image from a cylindrical aperture. Grid axes (x, y, z); the cylinder axis is y.
Reconstruction rma_cylindrical(const EchoData& echo, const GridSpec& grid, const RmaOptions& options = {});
/// 2-D image in the y-z plane from a circular aperture centred on the origin.
Reconstruction rma_circular(const EchoData& echo, const GridSpec& grid, const RmaOptions& options = {});

/// Algorithm names: bpa, rma-linear, rma-planar, rma-circular, rma-cylindrical.
Reconstruction reconstruct(const std::string& algorithm, const EchoData& echo, const GridSpec& grid,
                           const RmaOptions& options = {}, const ProgressFn& progress = {});

/// Algorithm matching an aperture kind (bpa for irregular apertures).
std::string default_algorithm(ApertureKind kind);

/// Grid covering `region` with spacing half the predicted resolution per axis.
/// 2-D for linear and circular apertures, 3-D otherwise; counts are capped at `max_count`.
GridSpec default_grid(const EchoData& echo, const Eigen::AlignedBox3d& region, Index max_count = 256);

}  // namespace sarlab
