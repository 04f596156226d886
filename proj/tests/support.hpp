#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>

#include "sarlab/forward_model.hpp"
#include "sarlab/grid.hpp"
#include "sarlab/random.hpp"

namespace testing {

using sarlab::cd;
using sarlab::Index;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("sarlab-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Scalar triple loop: s(n, k) = sum_t sigma_t / R^2 exp(-j 4 pi f_k R / c).
inline Eigen::MatrixXcd echo_oracle(const Eigen::Matrix3Xd& elements, const sarlab::Scene& scene,
                                    const Eigen::VectorXd& freq) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(elements.cols(), freq.size());
    for (Index n = 0; n < elements.cols(); ++n)
        for (Index k = 0; k < freq.size(); ++k) {
            cd acc = 0.0;
            for (const auto& t : scene.scatterers) {
                const double dx = t.position.x() - elements(0, n);
                const double dy = t.position.y() - elements(1, n);
                const double dz = t.position.z() - elements(2, n);
                const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                const double phase = -4.0 * M_PI * freq[k] * r / sarlab::kSpeedOfLight;
                acc += t.reflectivity / (r * r) * cd(std::cos(phase), std::sin(phase));
            }
            s(n, k) = acc;
        }
    return s;
}

/// Scalar double sum: sigma(p) = sum_n sum_k s(n, k) exp(+j 4 pi f_k |p - r_n| / c).
inline Eigen::VectorXcd bpa_oracle(const Eigen::MatrixXcd& s, const Eigen::Matrix3Xd& elements,
                                   const Eigen::VectorXd& freq, const Eigen::Matrix3Xd& voxels) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(voxels.cols());
    for (Index v = 0; v < voxels.cols(); ++v) {
        cd acc = 0.0;
        for (Index n = 0; n < elements.cols(); ++n) {
            const double r = (voxels.col(v) - elements.col(n)).norm();
            for (Index k = 0; k < freq.size(); ++k) {
                const double phase = 4.0 * M_PI * freq[k] * r / sarlab::kSpeedOfLight;
                acc += s(n, k) * cd(std::cos(phase), std::sin(phase));
            }
        }
        out[v] = acc;
    }
    return out;
}

template <typename A, typename B>
double relative_error(const A& got, const B& want) {
    return (got - want).norm() / want.norm();
}

inline sarlab::Scene random_points(std::uint64_t seed, int n, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
    sarlab::Rng rng(seed);
    std::vector<sarlab::Scatterer> s;
    for (int i = 0; i < n; ++i) {
        sarlab::Vec3 p;
        for (int a = 0; a < 3; ++a) p[a] = rng.uniform(lo[a], hi[a]);
        s.push_back({p, std::polar(rng.uniform(0.5, 1.0), rng.uniform(0.0, sarlab::kTwoPi))});
    }
    return sarlab::point_scene(std::move(s));
}

}  // namespace testing
