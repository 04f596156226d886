#include <doctest.h>

#include <cmath>

#include "sarlab/fft.hpp"
#include "sarlab/grid.hpp"
#include "sarlab/random.hpp"

using namespace sarlab;

namespace {

Eigen::VectorXcd random_vector(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) v[i] = cd(rng.normal(), rng.normal());
    return v;
}

}  // namespace

TEST_CASE("next_fast_len") {
    CHECK(next_fast_len(1) == 1);
    CHECK(next_fast_len(7) == 8);
    CHECK(next_fast_len(97) == 100);
    CHECK(next_fast_len(128) == 128);
    CHECK(next_fast_len(257) == 270);
}

TEST_CASE("shifted wavenumbers") {
    const auto k = shifted_wavenumbers(4, 0.5);
    CHECK(k[0] == doctest::Approx(-2.0 * kPi));
    CHECK(k[1] == doctest::Approx(-kPi));
    CHECK(k[2] == 0.0);
    CHECK(k[3] == doctest::Approx(kPi));
}

TEST_CASE("fftshift roundtrip") {
    for (Index n : {5, 8}) {
        Eigen::VectorXcd v = random_vector(n, 1);
        Eigen::VectorXcd w = v;
        fftshift(w);
        CHECK(w[n / 2] == v[0]);
        ifftshift(w);
        CHECK(w == v);
    }
}

TEST_CASE("unitary FFT preserves energy and inverts") {
    for (Index n : {16, 45, 97}) {
        const Eigen::VectorXcd v = random_vector(n, static_cast<std::uint64_t>(n));
        Eigen::VectorXcd w = v;
        UnitaryFft fft;
        fft.forward(w);
        CHECK(w.squaredNorm() == doctest::Approx(v.squaredNorm()).epsilon(1e-12));
        fft.inverse(w);
        CHECK((w - v).norm() <= 1e-12 * v.norm());
    }
}

TEST_CASE("chirp-z matches the direct sum") {
    const Index n_in = 13, n_out = 21;
    const double theta = 0.37;
    const Eigen::VectorXcd x = random_vector(n_in, 5);
    ChirpZ czt(n_in, n_out, theta);
    Eigen::VectorXcd y(n_out);
    czt.apply(x, y);
    for (Index p = 0; p < n_out; ++p) {
        cd want = 0.0;
        for (Index m = 0; m < n_in; ++m) want += x[m] * std::polar(1.0, theta * static_cast<double>(m * p));
        CHECK(std::abs(y[p] - want) <= 1e-11 * x.norm());
    }
}

TEST_CASE("grid inverse transform matches the direct sum") {
    const Index nk = 24, nx = 17;
    const double k0 = -40.0, dk = 3.5, x0 = -0.2, dx = 0.025;
    const Eigen::VectorXcd a = random_vector(nk, 9);
    GridInverseTransform t(nk, k0, dk, nx, x0, dx);
    Eigen::VectorXcd out(nx);
    t.apply(a, out);
    for (Index p = 0; p < nx; ++p) {
        cd want = 0.0;
        for (Index m = 0; m < nk; ++m)
            want += a[m] * std::polar(1.0, (k0 + dk * static_cast<double>(m)) * (x0 + dx * static_cast<double>(p)));
        want /= std::sqrt(static_cast<double>(nk));
        CHECK(std::abs(out[p] - want) <= 1e-11 * a.norm());
    }
}

TEST_CASE("map_axis applies a functor along each axis") {
    ComplexArray a({2, 3, 4});
    for (Index i = 0; i < a.size(); ++i) a.data[i] = static_cast<double>(i);
    auto sum = [](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.resize(1);
        out[0] = in.sum();
    };
    const auto s1 = map_axis(a, 1, 1, sum);
    CHECK(s1.shape == std::vector<Index>{2, 1, 4});
    // (0 + 4 + 8) for the first line
    CHECK(s1.data[0] == cd(12.0));
    CHECK(s1.data[ravel({1, 0, 3}, s1.shape)] == cd(15.0 + 19.0 + 23.0));
}

TEST_CASE("ravel and unravel") {
    const std::vector<Index> shape{3, 4, 5};
    for (Index f = 0; f < 60; ++f) CHECK(ravel(unravel(f, shape), shape) == f);
    CHECK(unravel(23, shape) == std::vector<Index>{1, 0, 3});
}

TEST_CASE("grid points follow C order") {
    const auto g = GridSpec::make3d({0, 1, 2}, {0, 2, 3}, {0, 3, 4});
    CHECK(g.size() == 24);
    CHECK(g.point(1).isApprox(Vec3(0, 0, 1)));
    CHECK(g.point(4).isApprox(Vec3(0, 1, 0)));
    CHECK(g.point(12).isApprox(Vec3(1, 0, 0)));
    const auto g2 = GridSpec::make2d({-1, 1, 3}, {0, 1, 2}, 0.5);
    CHECK(g2.point(5).isApprox(Vec3(0.5, 1, 1)));
    CHECK_THROWS(GridSpec::make2d({0, 1, 0}, {0, 1, 2}).validate());
}
