#pragma once

#include <unsupported/Eigen/FFT>

#include "sarlab/types.hpp"

namespace sarlab {

/// Smallest integer >= n whose only prime factors are 2, 3 and 5.
Index next_fast_len(Index n);

/// Wavenumbers of an n-point DFT with sample spacing d, in ascending
/// (fft-shifted) order: (m - n/2) * 2*pi / (n*d).
Eigen::VectorXd shifted_wavenumbers(Index n, double d);

/// Reorders a DFT output from natural bin order into ascending frequency order.
void fftshift(Eigen::Ref<Eigen::VectorXcd> v);
/// Inverse of fftshift.
void ifftshift(Eigen::Ref<Eigen::VectorXcd> v);

/// 1-D FFT with unitary scaling (1/sqrt(N) both directions). Not thread-safe;
/// keep one instance per thread.
class UnitaryFft {
public:
    UnitaryFft() { fft_.SetFlag(Eigen::FFT<double>::Unscaled); }

    void forward(Eigen::VectorXcd& data);
    void inverse(Eigen::VectorXcd& data);

private:
    Eigen::FFT<double> fft_;
    Eigen::VectorXcd scratch_;
};

/// Chirp-z (Bluestein) evaluation of y_p = sum_m x_m exp(j*theta*m*p) for
/// p = 0..n_out-1, with arbitrary real theta, in O((n_in + n_out) log) time.
class ChirpZ {
public:
    ChirpZ(Index n_in, Index n_out, double theta);

    Index input_size() const { return n_in_; }
    Index output_size() const { return n_out_; }

    void apply(const Eigen::Ref<const Eigen::VectorXcd>& in, Eigen::Ref<Eigen::VectorXcd> out);

private:
    Index n_in_;
    Index n_out_;
    Index len_;
    Eigen::VectorXcd pre_;         // w^{m^2/2}
    Eigen::VectorXcd post_;        // w^{p^2/2}
    Eigen::VectorXcd filter_hat_;  // FFT of w^{-l^2/2}
    Eigen::VectorXcd work_;
    Eigen::VectorXcd work_hat_;
    Eigen::FFT<double> fft_;
};

/// Evaluates sum_m A_m exp(j * k_m * x_p) for uniform k_m = k0 + m*dk and
/// uniform x_p = x0 + p*dx, scaled by 1/sqrt(M). This is the inverse spatial
/// Fourier transform sampled on an arbitrary output grid.
class GridInverseTransform {
public:
    GridInverseTransform(Index n_k, double k0, double dk, Index n_x, double x0, double dx);

    void apply(const Eigen::Ref<const Eigen::VectorXcd>& spectrum, Eigen::Ref<Eigen::VectorXcd> out);

private:
    ChirpZ czt_;
    Eigen::VectorXcd pre_;
    Eigen::VectorXcd post_;
    Eigen::VectorXcd buf_;
};

}  // namespace sarlab
