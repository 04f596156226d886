#include "sarlab/fft.hpp"

#include <cmath>

#include "sarlab/error.hpp"

namespace sarlab {

namespace {

// exp(j * phase) with the phase reduced in extended precision; chirp phases
// grow quadratically with the index.
cd unit_phasor(long double phase) {
    const long double reduced = std::fmod(phase, 2.0L * static_cast<long double>(kPi));
    return std::polar(1.0, static_cast<double>(reduced));
}

}  // namespace

Index next_fast_len(Index n) {
    if (n <= 1) return 1;
    for (Index m = n;; ++m) {
        Index r = m;
        for (Index p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

Eigen::VectorXd shifted_wavenumbers(Index n, double d) {
    Eigen::VectorXd k(n);
    const double dk = kTwoPi / (static_cast<double>(n) * d);
    for (Index m = 0; m < n; ++m) k[m] = static_cast<double>(m - n / 2) * dk;
    return k;
}

void fftshift(Eigen::Ref<Eigen::VectorXcd> v) {
    const Index n = v.size();
    const Index h = n - n / 2;  // bins [h, n) are the negative frequencies
    Eigen::VectorXcd tmp(n);
    tmp.head(n - h) = v.tail(n - h);
    tmp.tail(h) = v.head(h);
    v = tmp;
}

void ifftshift(Eigen::Ref<Eigen::VectorXcd> v) {
    const Index n = v.size();
    const Index h = n - n / 2;
    Eigen::VectorXcd tmp(n);
    tmp.head(h) = v.tail(h);
    tmp.tail(n - h) = v.head(n - h);
    v = tmp;
}

void UnitaryFft::forward(Eigen::VectorXcd& data) {
    scratch_.resize(data.size());
    fft_.fwd(scratch_, data);
    data = scratch_ / std::sqrt(static_cast<double>(data.size()));
}

void UnitaryFft::inverse(Eigen::VectorXcd& data) {
    scratch_.resize(data.size());
    fft_.inv(scratch_, data);
    data = scratch_ / std::sqrt(static_cast<double>(data.size()));
}

ChirpZ::ChirpZ(Index n_in, Index n_out, double theta)
    : n_in_(n_in), n_out_(n_out), len_(next_fast_len(n_in + n_out - 1)) {
    if (n_in < 1 || n_out < 1) throw ValidationError("chirp-z sizes must be positive");
    fft_.SetFlag(Eigen::FFT<double>::Unscaled);
    const long double half = 0.5L * static_cast<long double>(theta);
    auto chirp = [half](Index l) { return unit_phasor(half * static_cast<long double>(l) * static_cast<long double>(l)); };

    pre_.resize(n_in_);
    for (Index m = 0; m < n_in_; ++m) pre_[m] = chirp(m);
    post_.resize(n_out_);
    for (Index p = 0; p < n_out_; ++p) post_[p] = chirp(p);

    Eigen::VectorXcd filter = Eigen::VectorXcd::Zero(len_);
    for (Index l = 0; l < n_out_; ++l) filter[l] = std::conj(chirp(l));
    for (Index l = 1; l < n_in_; ++l) filter[len_ - l] = std::conj(chirp(l));
    filter_hat_.resize(len_);
    fft_.fwd(filter_hat_, filter);
    work_.resize(len_);
    work_hat_.resize(len_);
}

void ChirpZ::apply(const Eigen::Ref<const Eigen::VectorXcd>& in, Eigen::Ref<Eigen::VectorXcd> out) {
    work_.setZero();
    work_.head(n_in_) = in.cwiseProduct(pre_);
    fft_.fwd(work_hat_, work_);
    work_hat_.array() *= filter_hat_.array();
    fft_.inv(work_, work_hat_);
    out = work_.head(n_out_).cwiseProduct(post_) / static_cast<double>(len_);
}

GridInverseTransform::GridInverseTransform(Index n_k, double k0, double dk, Index n_x, double x0, double dx)
    : czt_(n_k, n_x, dk * dx), pre_(n_k), post_(n_x), buf_(n_x) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_k));
    for (Index m = 0; m < n_k; ++m) pre_[m] = std::polar(scale, dk * x0 * static_cast<double>(m));
    for (Index p = 0; p < n_x; ++p) post_[p] = std::polar(1.0, k0 * (x0 + dx * static_cast<double>(p)));
}

void GridInverseTransform::apply(const Eigen::Ref<const Eigen::VectorXcd>& spectrum, Eigen::Ref<Eigen::VectorXcd> out) {
    czt_.apply(spectrum.cwiseProduct(pre_), buf_);
    out = buf_.cwiseProduct(post_);
}

}  // namespace sarlab
