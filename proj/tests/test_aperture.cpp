#include <doctest.h>

#include <cmath>

#include "sarlab/aperture.hpp"
#include "sarlab/error.hpp"

using namespace sarlab;

namespace {

const double kQuarterWave = kSpeedOfLight / 435e9 / 4.0;

}  // namespace

TEST_CASE("linear aperture extent at quarter wavelength") {
    CHECK(kQuarterWave * 1e3 == doctest::Approx(0.17230).epsilon(1e-4));
    const auto a = linear_aperture(128, kQuarterWave, 0.0);
    CHECK(a.size() == 128);
    const auto e = aperture_extent(a);
    CHECK(e.dy * 1e3 == doctest::Approx(21.88).epsilon(1e-3));
    CHECK(e.dx == 0.0);
    CHECK(a.positions().row(1).sum() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("linear aperture edge cases") {
    const auto one = linear_aperture(1, 1e-3, 0.2);
    REQUIRE(one.size() == 1);
    CHECK(one.positions().col(0).isApprox(Vec3(0.0, 0.0, 0.2)));
    CHECK(aperture_extent(one).dx == 0.0);
    CHECK(aperture_extent(one).dy == 0.0);
    CHECK_THROWS_AS(linear_aperture(0, 1e-3, 0.0), ValidationError);
    CHECK_THROWS_AS(linear_aperture(8, 0.0, 0.0), ValidationError);
}

TEST_CASE("planar 2x2 positions") {
    const double d = 2e-3;
    const auto a = planar_aperture(2, 2, d, d, 0.1);
    REQUIRE(a.size() == 4);
    // y outer, x inner
    CHECK(a.positions().col(0).isApprox(Vec3(-d / 2, -d / 2, 0.1)));
    CHECK(a.positions().col(1).isApprox(Vec3(d / 2, -d / 2, 0.1)));
    CHECK(a.positions().col(2).isApprox(Vec3(-d / 2, d / 2, 0.1)));
    CHECK(a.positions().col(3).isApprox(Vec3(d / 2, d / 2, 0.1)));
    CHECK_THROWS_AS(planar_aperture(0, 2, d, d, 0.0), ValidationError);
}

TEST_CASE("planar with one column matches the linear aperture") {
    const auto p = planar_aperture(1, 16, 1e-3, 5e-4, 0.0);
    const auto l = linear_aperture(16, 5e-4, 0.0);
    CHECK(p.positions() == l.positions());
}

TEST_CASE("planar extent") {
    const auto a = planar_aperture(256, 256, kQuarterWave, kQuarterWave, 0.0);
    const auto e = aperture_extent(a);
    CHECK(e.dx * 1e3 == doctest::Approx(43.94).epsilon(1e-3));
    CHECK(e.dy * 1e3 == doctest::Approx(43.94).epsilon(1e-3));
}

TEST_CASE("circular aperture") {
    const auto a = circular_aperture(4, 1.0);
    const Vec3 expected[] = {{0, 1, 0}, {0, 0, 1}, {0, -1, 0}, {0, 0, -1}};
    for (int i = 0; i < 4; ++i) CHECK((a.positions().col(i) - expected[i]).norm() < 1e-15);

    const auto big = circular_aperture(1024, 0.25);
    CHECK(big.meta()->dtheta == doctest::Approx(kTwoPi / 1024.0).epsilon(1e-15));
    for (Index n = 0; n < big.size(); ++n) CHECK(std::abs(big.positions().col(n).norm() - 0.25) < 1e-9);
    CHECK_THROWS_AS(circular_aperture(16, 0.0), ValidationError);
}

TEST_CASE("cylindrical aperture") {
    const auto a = cylindrical_aperture(1024, 128, kQuarterWave, 0.25);
    CHECK(a.size() == 131072);
    const auto col = cylindrical_aperture(1, 8, 1e-3, 0.3);
    for (Index n = 0; n < col.size(); ++n) {
        CHECK(col.positions()(0, n) == doctest::Approx(0.3));
        CHECK(col.positions()(2, n) == 0.0);
    }
    CHECK(col.positions().row(1) == linear_aperture(8, 1e-3, 0.0).positions().row(1));
    CHECK_THROWS_AS(cylindrical_aperture(8, 8, 1e-3, -1.0), ValidationError);
}

TEST_CASE("uniform apertures regenerate bit-identically") {
    const Aperture list[] = {linear_aperture(33, 1e-3, 0.05), planar_aperture(7, 5, 1e-3, 2e-3, 0.0),
                             circular_aperture(64, 0.2), cylindrical_aperture(16, 9, 1e-3, 0.1)};
    for (const auto& a : list) {
        const auto b = regenerate(a.kind(), *a.meta());
        CHECK(a.positions() == b.positions());
    }
}

TEST_CASE("irregular aperture") {
    Eigen::Matrix3Xd p(3, 3);
    p << 0.1, -0.2, 0.3, 0.0, 0.5, 0.25, 1.0, 2.0, 3.0;
    const auto a = irregular_aperture(p);
    CHECK(a.positions() == p);
    CHECK_FALSE(a.has_duplicates());
    CHECK_FALSE(a.meta().has_value());

    p.col(2) = p.col(0);
    CHECK(irregular_aperture(p).has_duplicates());

    CHECK_THROWS_AS(irregular_aperture(Eigen::Matrix3Xd(3, 0)), ValidationError);
    p(1, 1) = std::nan("");
    CHECK_THROWS_AS(irregular_aperture(p), ValidationError);
}

TEST_CASE("aperture kind names roundtrip") {
    for (auto k : {ApertureKind::linear, ApertureKind::planar, ApertureKind::circular, ApertureKind::cylindrical,
                   ApertureKind::irregular})
        CHECK(aperture_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(aperture_kind_from_string("spiral"), ValidationError);
}

TEST_CASE("spacing warning above a quarter wavelength") {
    const double lambda = kSpeedOfLight / 435e9;
    CHECK_FALSE(spacing_warning(linear_aperture(16, lambda / 4.0, 0.0), lambda).has_value());
    CHECK(spacing_warning(linear_aperture(16, lambda / 2.0, 0.0), lambda).has_value());
}

TEST_CASE("boresight directions") {
    const auto c = circular_aperture(4, 1.0);
    CHECK(c.boresight(0, Vec3::Zero()).isApprox(Vec3(0, -1, 0)));
    const auto l = linear_aperture(4, 1e-3, 0.0);
    CHECK(l.boresight(0, Vec3(0, 0, 0.5)).isApprox(Vec3(0, 0, 1)));
    CHECK(l.boresight(0, Vec3(0, 0, -0.5)).isApprox(Vec3(0, 0, -1)));
}
