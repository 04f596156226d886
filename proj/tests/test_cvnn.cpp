#include <doctest.h>

#include <complex>

#include "sarlab/cvnn.hpp"
#include "sarlab/random.hpp"

using namespace sarlab;
using namespace sarlab::cvnn;

namespace {

using T = ComplexTensor<double>;
using CMat = Eigen::MatrixXcd;

T random_tensor(Rng& rng, Index rows, Index cols) {
    T t;
    t.re.resize(rows, cols);
    t.im.resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            t.re(i, j) = rng.normal();
            t.im(i, j) = rng.normal();
        }
    return t;
}

CMat to_complex(const T& t) {
    CMat m(t.rows(), t.cols());
    for (Index i = 0; i < t.rows(); ++i)
        for (Index j = 0; j < t.cols(); ++j) m(i, j) = cd(t.re(i, j), t.im(i, j));
    return m;
}

// Scalar complex 2-D convolution; `same` crops the full result at (k-1)/2.
CMat brute_force(const CMat& w, const CMat& z, ConvMode mode) {
    const Index kh = w.rows(), kw = w.cols(), h = z.rows(), wd = z.cols();
    CMat full = CMat::Zero(h + kh - 1, wd + kw - 1);
    for (Index i = 0; i < h; ++i)
        for (Index j = 0; j < wd; ++j)
            for (Index a = 0; a < kh; ++a)
                for (Index b = 0; b < kw; ++b) full(i + a, j + b) += w(a, b) * z(i, j);
    if (mode == ConvMode::valid) return full.block(kh - 1, kw - 1, h - kh + 1, wd - kw + 1);
    return full.block((kh - 1) / 2, (kw - 1) / 2, h, wd);
}

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("unit kernel is the identity") {
    Rng rng(1);
    const T z = random_tensor(rng, 6, 5);
    T w;
    w.re = Plane<double>::Ones(1, 1);
    w.im = Plane<double>::Zero(1, 1);
    const T out = cconv2d_direct(w, z);
    CHECK(out.re == z.re);
    CHECK(out.im == z.im);
}

TEST_CASE("imaginary unit kernel rotates by 90 degrees") {
    Rng rng(2);
    const T z = random_tensor(rng, 4, 7);
    T w;
    w.re = Plane<double>::Zero(1, 1);
    w.im = Plane<double>::Ones(1, 1);
    for (auto conv : {cconv2d_direct<double>, cconv2d_gauss<double>}) {
        const T out = conv(w, z, {}, nullptr);
        CHECK(max_abs(to_complex(out) - cd(0.0, 1.0) * to_complex(z)) <= 1e-15);
    }
}

TEST_CASE("direct convolution matches the scalar loop") {
    Rng rng(3);
    const T w = random_tensor(rng, 3, 3);
    const T z = random_tensor(rng, 8, 8);
    for (auto mode : {ConvMode::valid, ConvMode::same}) {
        const CMat want = brute_force(to_complex(w), to_complex(z), mode);
        CHECK(max_abs(to_complex(cconv2d_direct(w, z, {mode})) - want) <= 1e-12);
    }
}

TEST_CASE("Gauss variant matches direct on random inputs") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const Index kh = 1 + static_cast<Index>(rng.below(5)), kw = 1 + static_cast<Index>(rng.below(5));
        const Index h = kh + static_cast<Index>(rng.below(10)), wd = kw + static_cast<Index>(rng.below(10));
        const T w = random_tensor(rng, kh, kw);
        const T z = random_tensor(rng, h, wd);
        const ConvMode mode = trial % 2 ? ConvMode::same : ConvMode::valid;
        const CMat d = to_complex(cconv2d_direct(w, z, {mode}));
        const CMat g = to_complex(cconv2d_gauss(w, z, {mode}));
        CHECK(max_abs(d - g) <= 1e-12 * std::max(1.0, max_abs(d)));
    }
}

TEST_CASE("real inputs give a real output") {
    Rng rng(5);
    T w = random_tensor(rng, 3, 3);
    T z = random_tensor(rng, 9, 9);
    w.im.setZero();
    z.im.setZero();
    CHECK(cconv2d_gauss(w, z).im.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("convolution call counts") {
    Rng rng(6);
    const T w = random_tensor(rng, 3, 3);
    const T z = random_tensor(rng, 8, 8);
    ConvProbe gauss, direct;
    cconv2d_gauss(w, z, {}, &gauss);
    cconv2d_direct(w, z, {}, &direct);
    CHECK(gauss.real_convolutions == 3);
    CHECK(direct.real_convolutions == 4);
}

TEST_CASE("kernel larger than input in valid mode") {
    Rng rng(7);
    const T w = random_tensor(rng, 5, 5);
    const T z = random_tensor(rng, 4, 8);
    CHECK_THROWS_AS(cconv2d_direct(w, z), ValidationError);
    CHECK_THROWS_AS(cconv2d_gauss(w, z), ValidationError);
    CHECK(cconv2d_gauss(w, z, {ConvMode::same}).re.rows() == 4);
}

TEST_CASE("mismatched planes are rejected") {
    T z;
    z.re = Plane<double>::Zero(3, 3);
    z.im = Plane<double>::Zero(3, 2);
    T w;
    w.re = w.im = Plane<double>::Ones(1, 1);
    CHECK_THROWS_AS(cconv2d_direct(w, z), ValidationError);
}

TEST_CASE("convolution is shift equivariant in the valid interior") {
    Rng rng(8);
    const T w = random_tensor(rng, 3, 3);
    const T z = random_tensor(rng, 12, 12);
    const Index a = 2, b = 1;
    T shifted;
    shifted.re = Plane<double>::Zero(12, 12);
    shifted.im = Plane<double>::Zero(12, 12);
    shifted.re.bottomRightCorner(12 - a, 12 - b) = z.re.topLeftCorner(12 - a, 12 - b);
    shifted.im.bottomRightCorner(12 - a, 12 - b) = z.im.topLeftCorner(12 - a, 12 - b);
    const CMat y = to_complex(cconv2d_gauss(w, z));
    const CMat ys = to_complex(cconv2d_gauss(w, shifted));
    CHECK(max_abs(ys.block(a, b, 10 - a, 10 - b) - y.block(0, 0, 10 - a, 10 - b)) <= 1e-12);
}

TEST_CASE("split activations") {
    T z;
    z.re.resize(1, 3);
    z.im.resize(1, 3);
    z.re << 1.0, -1.0, 0.0;
    z.im << 2.0, 2.0, 0.0;
    const T r = split_activation(z, Activation::crelu);
    CHECK(r.re(0, 0) == 1.0);
    CHECK(r.im(0, 0) == 2.0);
    CHECK(r.re(0, 1) == 0.0);
    CHECK(r.im(0, 1) == 2.0);

    const T t = split_activation(z, Activation::ctanh);
    CHECK(t.re(0, 2) == 0.0);
    CHECK(t.im(0, 2) == 0.0);
    T neg;
    neg.re = -z.re;
    neg.im = -z.im;
    const T tn = split_activation(neg, Activation::ctanh);
    CHECK((tn.re + t.re).cwiseAbs().maxCoeff() == 0.0);
    CHECK((tn.im + t.im).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.re(0, 0) == doctest::Approx(std::tanh(1.0)));

    CHECK(activation_from_string("crelu") == Activation::crelu);
    CHECK_THROWS_AS(activation_from_string("modrelu"), ValidationError);
}

TEST_CASE("single precision instantiation") {
    ComplexTensor<float> z;
    z.re = Plane<float>::Ones(4, 4);
    z.im = Plane<float>::Zero(4, 4);
    ComplexKernel<float> w;
    w.re = Plane<float>::Ones(2, 2);
    w.im = Plane<float>::Ones(2, 2);
    const auto out = cconv2d_gauss(w, z);
    CHECK(out.re(0, 0) == 4.0f);
    CHECK(out.im(0, 0) == 4.0f);
}
