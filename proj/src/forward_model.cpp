#include "sarlab/forward_model.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include "sarlab/error.hpp"
#include "sarlab/random.hpp"

namespace sarlab {

namespace {

bool is_uniform(const Eigen::VectorXd& f) {
    if (f.size() < 3) return true;
    const double step = (f[f.size() - 1] - f[0]) / static_cast<double>(f.size() - 1);
    for (Index i = 1; i < f.size(); ++i)
        if (std::abs(f[i] - f[i - 1] - step) > 1e-9 * std::abs(step)) return false;
    return true;
}

// Element frame with the boresight as third axis.
Eigen::Matrix3d element_frame(const Vec3& boresight) {
    const Vec3 helper = std::abs(boresight.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX();
    const Vec3 e1 = helper.cross(boresight).normalized();
    const Vec3 e2 = boresight.cross(e1);
    Eigen::Matrix3d m;
    m.row(0) = e1;
    m.row(1) = e2;
    m.row(2) = boresight;
    return m;
}

Index bracket(const Eigen::VectorXd& axis, double v) {
    const auto* begin = axis.data();
    const auto* it = std::upper_bound(begin, begin + axis.size(), v);
    return std::clamp<Index>(static_cast<Index>(it - begin) - 1, 0, axis.size() - 2);
}

constexpr Index kResync = 32;

}  // namespace

void EchoData::validate() const {
    if (samples.rows() < 1 || samples.cols() < 1) throw ValidationError("echo is empty", "echo");
    if (positions.cols() != samples.rows())
        throw ValidationError("echo has " + std::to_string(samples.rows()) + " rows but " +
                                  std::to_string(positions.cols()) + " element positions",
                              "echo");
    if (freq.size() != samples.cols())
        throw ValidationError("echo has " + std::to_string(samples.cols()) + " columns but " +
                                  std::to_string(freq.size()) + " frequencies",
                              "freq");
    if (!samples.allFinite()) throw ValidationError("echo contains non-finite samples", "echo");
}

GainPattern::GainPattern(Eigen::VectorXd theta, Eigen::VectorXd phi, Eigen::MatrixXd gain_linear)
    : theta_(std::move(theta)), phi_(std::move(phi)), gain_(std::move(gain_linear)) {
    if (theta_.size() < 2 || phi_.size() < 2) throw ValidationError("gain table needs >= 2 samples per angle", "gain");
    if (gain_.rows() != theta_.size() || gain_.cols() != phi_.size())
        throw ValidationError("gain table shape does not match its angle axes", "gain");
    for (const auto* axis : {&theta_, &phi_})
        for (Index i = 1; i < axis->size(); ++i)
            if (!((*axis)[i] > (*axis)[i - 1])) throw ValidationError("gain angles must be strictly increasing", "gain");
    if (!gain_.allFinite() || gain_.minCoeff() < 0.0) throw ValidationError("gain must be finite and >= 0", "gain");
}

GainPattern GainPattern::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty gain CSV", "gain.csv");
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line != "theta_rad,phi_rad,gain_db")
        throw ValidationError("gain CSV header must be 'theta_rad,phi_rad,gain_db'", "gain.csv");

    std::map<double, std::map<double, double>> table;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double t = 0, p = 0, db = 0;
        if (!(fields >> t >> p >> db) || !std::isfinite(t) || !std::isfinite(p) || !std::isfinite(db))
            throw ValidationError("malformed row " + std::to_string(row), "gain.csv");
        table[t][p] = std::pow(10.0, db / 10.0);
    }
    if (table.empty()) throw ValidationError("gain CSV has no rows", "gain.csv");

    const auto& first = table.begin()->second;
    Eigen::VectorXd theta(static_cast<Index>(table.size()));
    Eigen::VectorXd phi(static_cast<Index>(first.size()));
    Index j = 0;
    for (const auto& [p, g] : first) phi[j++] = p;
    Eigen::MatrixXd gain(theta.size(), phi.size());
    Index i = 0;
    for (const auto& [t, rowmap] : table) {
        theta[i] = t;
        if (static_cast<Index>(rowmap.size()) != phi.size())
            throw ValidationError("gain CSV is not a regular theta x phi grid", "gain.csv");
        j = 0;
        for (const auto& [p, g] : rowmap) {
            if (p != phi[j]) throw ValidationError("gain CSV is not a regular theta x phi grid", "gain.csv");
            gain(i, j++) = g;
        }
        ++i;
    }
    return GainPattern(std::move(theta), std::move(phi), std::move(gain));
}

GainPattern GainPattern::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gain pattern '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

GainSample gain_lookup(const GainPattern& pattern, double theta, double phi) {
    const auto& th = pattern.theta();
    const auto& ph = pattern.phi();
    if (phi < ph[0]) phi += kTwoPi;
    else if (phi > ph[ph.size() - 1]) phi -= kTwoPi;
    if (theta < th[0] || theta > th[th.size() - 1] || phi < ph[0] || phi > ph[ph.size() - 1]) return {0.0, false};
    const Index i = bracket(th, theta);
    const Index j = bracket(ph, phi);
    const double u = (theta - th[i]) / (th[i + 1] - th[i]);
    const double v = (phi - ph[j]) / (ph[j + 1] - ph[j]);
    const auto& g = pattern.gain();
    const double value = (1 - u) * (1 - v) * g(i, j) + u * (1 - v) * g(i + 1, j) + (1 - u) * v * g(i, j + 1) +
                         u * v * g(i + 1, j + 1);
    return {value, true};
}

GainSample gain_lookup(const GainPattern& pattern, const Vec3& direction) {
    const Vec3 d = direction.normalized();
    const double theta = std::acos(std::clamp(d.z(), -1.0, 1.0));
    const double phi = std::atan2(d.y(), d.x());
    return gain_lookup(pattern, theta, phi);
}

EchoData simulate_echo(const Aperture& aperture, const Scene& scene, const FrequencyAxis& freq,
                       const SimulateOptions& options) {
    if (scene.scatterers.empty()) throw ValidationError("scene is empty", "scene");
    if (freq.size() < 1) throw ValidationError("frequency axis is empty", "waveform");

    const Index n_el = aperture.size();
    const Index n_f = freq.size();
    const Index n_t = scene.size();
    const auto& pos = aperture.positions();

    Eigen::Matrix3Xd targets(3, n_t);
    Eigen::VectorXcd refl(n_t);
    for (Index t = 0; t < n_t; ++t) {
        targets.col(t) = scene.scatterers[static_cast<std::size_t>(t)].position;
        refl[t] = scene.scatterers[static_cast<std::size_t>(t)].reflectivity;
    }
    Vec3 centroid = targets.rowwise().mean();

    // Two-way wavenumbers 2k = 4 pi f / c.
    const Eigen::VectorXd k2 = 2.0 * freq.wavenumbers();
    const bool uniform = is_uniform(freq.values());
    const double dk2 = n_f > 1 ? (k2[n_f - 1] - k2[0]) / static_cast<double>(n_f - 1) : 0.0;

    EchoData echo;
    echo.samples.resize(n_el, n_f);
    echo.freq = freq;
    echo.positions = pos;
    echo.aperture_kind = aperture.kind();
    echo.aperture_meta = aperture.meta();

    std::atomic<Index> done{0};
    std::mutex error_mutex;
    std::string error_message;
    const Index report_every = std::max<Index>(1, n_el / 100);

#pragma omp parallel
    {
        Eigen::VectorXcd row(n_f);
#pragma omp for schedule(dynamic, 16)
        for (Index n = 0; n < n_el; ++n) {
            const Vec3 r = pos.col(n);
            Eigen::Matrix3d frame;
            if (options.gain) frame = element_frame(aperture.boresight(n, centroid));
            row.setZero();
            for (Index t = 0; t < n_t; ++t) {
                const Vec3 d = targets.col(t) - r;
                const double range = d.norm();
                if (!(range >= kMinStandoff)) {
                    std::lock_guard lock(error_mutex);
                    if (error_message.empty())
                        error_message = "scatterer " + std::to_string(t) + " is within 1e-6 m of element " +
                                        std::to_string(n);
                    continue;
                }
                double g = 1.0;
                if (options.gain) g = gain_lookup(*options.gain, Vec3(frame * d)).gain;
                if (g == 0.0) continue;
                const cd amp = refl[t] * (g / (range * range));
                if (uniform) {
                    const cd step = std::polar(1.0, -std::remainder(dk2 * range, kTwoPi));
                    cd ph;
                    for (Index k = 0; k < n_f; ++k) {
                        if (k % kResync == 0) ph = std::polar(1.0, -std::remainder(k2[k] * range, kTwoPi));
                        row[k] += amp * ph;
                        ph *= step;
                    }
                } else {
                    for (Index k = 0; k < n_f; ++k) row[k] += amp * std::polar(1.0, -std::remainder(k2[k] * range, kTwoPi));
                }
            }
            echo.samples.row(n) = row.transpose();
            const Index finished = ++done;
            if (options.progress && (finished % report_every == 0 || finished == n_el))
                options.progress(static_cast<double>(finished) / static_cast<double>(n_el));
        }
    }
    if (!error_message.empty()) throw ValidationError(error_message, "scene");
    return echo;
}

double mean_power(const Eigen::MatrixXcd& samples) {
    return samples.size() == 0 ? 0.0 : samples.squaredNorm() / static_cast<double>(samples.size());
}

EchoData add_noise(const EchoData& echo, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db)) throw ValidationError("snr_db must not be NaN", "noise.snr_db");
    if (!echo.samples.allFinite()) throw ValidationError("echo contains non-finite samples", "echo");
    if (snr_db == std::numeric_limits<double>::infinity()) return echo;
    if (snr_db == -std::numeric_limits<double>::infinity())
        throw ValidationError("snr_db = -inf would require infinite noise power", "noise.snr_db");
    const double signal = mean_power(echo.samples);
    if (!(signal > 0.0)) throw ValidationError("cannot set an SNR on a zero-energy echo", "noise.snr_db");

    const double sigma = std::sqrt(signal / std::pow(10.0, snr_db / 10.0) / 2.0);
    EchoData out = echo;
    Rng rng(seed);
    for (Index j = 0; j < out.samples.cols(); ++j)
        for (Index i = 0; i < out.samples.rows(); ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            out.samples(i, j) += cd(sigma * re, sigma * im);
        }
    return out;
}

}  // namespace sarlab
