#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "sarlab/aperture.hpp"
#include "sarlab/scene.hpp"
#include "sarlab/waveform.hpp"

namespace sarlab {

/// Raw echo s(r_n, f_k): one row per aperture element, one column per frequency.
struct EchoData {
    Eigen::MatrixXcd samples;
    FrequencyAxis freq;
    Eigen::Matrix3Xd positions;  // element positions, one column per row of `samples`
    ApertureKind aperture_kind = ApertureKind::irregular;
    std::optional<UniformMeta> aperture_meta;

    Index elements() const { return samples.rows(); }
    Index frequencies() const { return samples.cols(); }
    /// Aperture the echo was recorded on.
    Aperture aperture() const { return Aperture(aperture_kind, positions, aperture_meta); }
    /// Throws unless samples, positions and frequencies agree in size and are finite.
    void validate() const;
};

/// Antenna gain table on a regular (theta, phi) grid in the element frame.
/// theta is the angle off boresight, phi the azimuth around it.
class GainPattern {
public:
    GainPattern(Eigen::VectorXd theta, Eigen::VectorXd phi, Eigen::MatrixXd gain_linear);

    /// CSV with header `theta_rad,phi_rad,gain_db`, theta-major rows.
    static GainPattern from_csv(const std::string& text);
    static GainPattern load_csv(const std::string& path);

    const Eigen::VectorXd& theta() const { return theta_; }
    const Eigen::VectorXd& phi() const { return phi_; }
    const Eigen::MatrixXd& gain() const { return gain_; }

private:
    Eigen::VectorXd theta_;
    Eigen::VectorXd phi_;
    Eigen::MatrixXd gain_;  // [theta, phi]
};

struct GainSample {
    double gain = 0.0;
    bool covered = true;
};

/// Bilinear lookup at a (theta, phi) pair.
GainSample gain_lookup(const GainPattern& pattern, double theta, double phi);
/// Lookup for a unit direction expressed in an element frame whose boresight is +z.
GainSample gain_lookup(const GainPattern& pattern, const Vec3& direction);

/// Called with the fraction of completed elements; may run on worker threads.
using ProgressFn = std::function<void(double)>;

struct SimulateOptions {
    const GainPattern* gain = nullptr;
    ProgressFn progress;
};

inline constexpr double kMinStandoff = 1e-6;  // m

/// s(r_n, f) = sum_t g * sigma(t) / R^2 * exp(-j 4 pi f R / c), R = |t - r_n|.
EchoData simulate_echo(const Aperture& aperture, const Scene& scene, const FrequencyAxis& freq,
                       const SimulateOptions& options = {});

/// Adds circular complex Gaussian noise at the requested SNR (dB, mean power
/// ratio). An infinite SNR returns the echo unchanged.
EchoData add_noise(const EchoData& echo, double snr_db, std::uint64_t seed);

/// Mean |s|^2 over all samples.
double mean_power(const Eigen::MatrixXcd& samples);

}  // namespace sarlab
