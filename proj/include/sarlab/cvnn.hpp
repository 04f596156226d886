#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "sarlab/error.hpp"

namespace sarlab::cvnn {

template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// z = z_R + j z_I stored as two real planes of equal shape.
template <typename Scalar>
struct ComplexTensor {
    Plane<Scalar> re;
    Plane<Scalar> im;

    Eigen::Index rows() const { return re.rows(); }
    Eigen::Index cols() const { return re.cols(); }

    void validate(const char* what = "tensor") const {
        if (re.rows() != im.rows() || re.cols() != im.cols())
            throw ValidationError("real and imaginary parts differ in shape", what);
        if (!re.allFinite() || !im.allFinite()) throw ValidationError("entries must be finite", what);
    }
};

/// Complex weights W = W_R + j W_I.
template <typename Scalar>
using ComplexKernel = ComplexTensor<Scalar>;

enum class ConvMode { valid, same };

struct ConvOptions {
    ConvMode mode = ConvMode::valid;
    bool correlate = false;  // cross-correlation (no kernel flip)
};

/// Counts real 2-D convolutions issued by the complex operators.
struct ConvProbe {
    std::atomic<long> real_convolutions{0};
};

/// Real 2-D convolution. `same` keeps the input size with zero padding,
/// centred like the full convolution cropped at offset (k-1)/2.
template <typename Scalar>
Plane<Scalar> conv2d(const Plane<Scalar>& w, const Plane<Scalar>& z, ConvOptions opt = {}, ConvProbe* probe = nullptr) {
    using Index = Eigen::Index;
    const Index kh = w.rows(), kw = w.cols();
    const Index h = z.rows(), wd = z.cols();
    if (kh < 1 || kw < 1) throw ValidationError("kernel is empty", "kernel");
    if (opt.mode == ConvMode::valid && (kh > h || kw > wd))
        throw ValidationError("kernel larger than input in valid mode", "kernel");
    if (probe) ++probe->real_convolutions;

    const Index oh = opt.mode == ConvMode::valid ? h - kh + 1 : h;
    const Index ow = opt.mode == ConvMode::valid ? wd - kw + 1 : wd;
    // Output (i, j) reads z(i + oy - a, j + ox - b) for kernel tap (a, b).
    const Index oy = opt.mode == ConvMode::valid ? kh - 1 : (kh - 1) / 2;
    const Index ox = opt.mode == ConvMode::valid ? kw - 1 : (kw - 1) / 2;
    Plane<Scalar> out = Plane<Scalar>::Zero(oh, ow);
#pragma omp parallel for schedule(static) if (oh * ow * kh * kw > 65536)
    for (Index i = 0; i < oh; ++i) {
        for (Index j = 0; j < ow; ++j) {
            Scalar acc(0);
            for (Index a = 0; a < kh; ++a) {
                const Index r = i + oy - a;
                if (r < 0 || r >= h) continue;
                for (Index b = 0; b < kw; ++b) {
                    const Index c = j + ox - b;
                    if (c < 0 || c >= wd) continue;
                    const Scalar wv = opt.correlate ? w(kh - 1 - a, kw - 1 - b) : w(a, b);
                    acc += wv * z(r, c);
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

/// (W_R * z_R - W_I * z_I) + j (W_R * z_I + W_I * z_R): four real convolutions.
template <typename Scalar>
ComplexTensor<Scalar> cconv2d_direct(const ComplexKernel<Scalar>& w, const ComplexTensor<Scalar>& z,
                                     ConvOptions opt = {}, ConvProbe* probe = nullptr) {
    w.validate("kernel");
    z.validate("input");
    ComplexTensor<Scalar> out;
    out.re = conv2d(w.re, z.re, opt, probe) - conv2d(w.im, z.im, opt, probe);
    out.im = conv2d(w.re, z.im, opt, probe) + conv2d(w.im, z.re, opt, probe);
    return out;
}

/// Gauss's trick: t1 = W_R * z_R, t2 = W_I * z_I, t3 = (W_R + W_I) * (z_R + z_I);
/// result (t1 - t2) + j (t3 - t1 - t2). Three real convolutions.
template <typename Scalar>
ComplexTensor<Scalar> cconv2d_gauss(const ComplexKernel<Scalar>& w, const ComplexTensor<Scalar>& z,
                                    ConvOptions opt = {}, ConvProbe* probe = nullptr) {
    w.validate("kernel");
    z.validate("input");
    const Plane<Scalar> t1 = conv2d(w.re, z.re, opt, probe);
    const Plane<Scalar> t2 = conv2d(w.im, z.im, opt, probe);
    const Plane<Scalar> t3 = conv2d(Plane<Scalar>(w.re + w.im), Plane<Scalar>(z.re + z.im), opt, probe);
    ComplexTensor<Scalar> out;
    out.re = t1 - t2;
    out.im = t3 - t1 - t2;
    return out;
}

enum class Activation { crelu, ctanh };

inline Activation activation_from_string(const std::string& s) {
    if (s == "crelu") return Activation::crelu;
    if (s == "ctanh") return Activation::ctanh;
    throw ValidationError("unknown activation '" + s + "'", "activation");
}

/// F(z) = G(z_R) + j G(z_I) with G = ReLU or tanh.
template <typename Scalar>
ComplexTensor<Scalar> split_activation(const ComplexTensor<Scalar>& z, Activation kind) {
    z.validate("input");
    ComplexTensor<Scalar> out;
    if (kind == Activation::crelu) {
        out.re = z.re.cwiseMax(Scalar(0));
        out.im = z.im.cwiseMax(Scalar(0));
    } else {
        out.re = z.re.array().tanh().matrix();
        out.im = z.im.array().tanh().matrix();
    }
    return out;
}

}  // namespace sarlab::cvnn
