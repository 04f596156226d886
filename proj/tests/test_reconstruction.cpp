#include <doctest.h>

#include <cmath>

#include "sarlab/analysis.hpp"
#include "sarlab/error.hpp"
#include "sarlab/reconstruction.hpp"
#include "support.hpp"

using namespace sarlab;

namespace {

const double kLambda = kSpeedOfLight / 435e9;

FrequencyAxis band(Index nf = 32) { return frequency_axis(430e9, 10e9, nf); }

Index nearest_voxel(const GridSpec& g, const Vec3& p) {
    std::vector<Index> idx;
    for (Index a = 0; a < g.dims(); ++a) {
        const auto& ax = g.axes[static_cast<std::size_t>(a)];
        idx.push_back(std::lround((p[g.coord(a)] - ax.min) / ax.spacing()));
    }
    return ravel(idx, g.shape());
}

Index max_offset(const GridSpec& g, Index a, Index b) {
    const auto ia = unravel(a, g.shape());
    const auto ib = unravel(b, g.shape());
    Index m = 0;
    for (std::size_t i = 0; i < ia.size(); ++i) m = std::max(m, std::abs(ia[i] - ib[i]));
    return m;
}

}  // namespace

TEST_CASE("backprojection matches the scalar double sum") {
    const auto ap = planar_aperture(2, 2, 3e-3, 2e-3, 0.0);
    const auto scene = testing::random_points(5, 3, Vec3(-0.01, -0.01, 0.08), Vec3(0.01, 0.01, 0.12));
    const auto echo = simulate_echo(ap, scene, band(4));
    const auto g = GridSpec::make3d({-0.01, 0.01, 3}, {-0.01, 0.01, 4}, {0.08, 0.12, 5});
    const auto img = bpa(echo, g);
    const auto want = testing::bpa_oracle(echo.samples, ap.positions(), echo.freq.values(), g.points());
    CHECK(testing::relative_error(img.voxels, want) <= 1e-12);
}

TEST_CASE("backprojection focuses a point on its nearest voxel") {
    const auto ap = linear_aperture(64, kLambda / 4, 0.0);
    const Vec3 t(0.0, 1.3e-3, 0.101);
    const auto echo = simulate_echo(ap, point_scene({{t, {1, 0}}}), band());
    const auto g = GridSpec::make2d({-0.01, 0.01, 41}, {0.09, 0.11, 21});
    CHECK(argmax_voxel(bpa(echo, g)) == nearest_voxel(g, t));
}

TEST_CASE("backprojection is linear") {
    const auto ap = linear_aperture(32, kLambda / 4, 0.0);
    const auto a = testing::random_points(1, 2, Vec3(0, -0.005, 0.09), Vec3(0, 0.005, 0.11));
    const auto b = testing::random_points(2, 2, Vec3(0, -0.005, 0.09), Vec3(0, 0.005, 0.11));
    const auto g = GridSpec::make2d({-0.01, 0.01, 21}, {0.08, 0.12, 11});
    const auto ea = simulate_echo(ap, a, band());
    const auto eb = simulate_echo(ap, b, band());
    EchoData sum = ea;
    sum.samples += eb.samples;
    const Eigen::VectorXcd want = bpa(ea, g).voxels + bpa(eb, g).voxels;
    CHECK(testing::relative_error(bpa(sum, g).voxels, want) <= 1e-12);
}

TEST_CASE("backprojection rejects an empty grid") {
    const auto echo = simulate_echo(linear_aperture(4, 1e-3, 0.0), point_scene({{Vec3(0, 0, 0.1), {1, 0}}}), band(4));
    CHECK_THROWS_AS(bpa(echo, GridSpec{}), ValidationError);
    CHECK_THROWS_AS(bpa(echo, GridSpec::make2d({0, 1, 0}, {0, 1, 3})), ValidationError);
}

TEST_CASE("dispersion relation") {
    CHECK(*dispersion_kz(100.0, 0.0, 0.0) == 200.0);
    CHECK(*dispersion_kz(5.0, 6.0, 8.0) == 0.0);
    CHECK_FALSE(dispersion_kz(5.0, 6.0, 8.1).has_value());
    CHECK(*dispersion_kz(5.0, 6.0, 0.0) == doctest::Approx(8.0));
}

TEST_CASE("default kz axis spans twice the band") {
    const Eigen::VectorXd k = band(16).wavenumbers();
    const auto kz = default_kz_axis(k);
    CHECK(kz.size() == 16);
    CHECK(kz[0] == doctest::Approx(2 * k[0]));
    CHECK(kz[15] == doctest::Approx(2 * k[15]));
}

TEST_CASE("Stolt line is exact for affine spectra at normal incidence") {
    const Index nk = 20;
    const double k0 = 9000.0, dk = 10.0;
    Eigen::VectorXcd s(nk);
    for (Index i = 0; i < nk; ++i) s[i] = cd(2.0, -1.0) + cd(0.5, 0.25) * (k0 + dk * static_cast<double>(i));
    const Index nkz = 33;
    const double kz0 = 2 * k0 - 30.0, dkz = 12.5;
    Eigen::VectorXcd out(nkz);
    for (Interp interp : {Interp::linear, Interp::cubic}) {
        REQUIRE(stolt_line(s, k0, dk, 0.0, kz0, dkz, interp, true, out));
        for (Index j = 0; j < nkz; ++j) {
            const double kz = kz0 + dkz * static_cast<double>(j);
            const double k = kz / 2.0;
            if (k < k0 || k > k0 + dk * (nk - 1)) {
                CHECK(out[j] == cd(0.0));
            } else {
                const cd want = cd(2.0, -1.0) + cd(0.5, 0.25) * k;
                CHECK(std::abs(out[j] - want) <= 1e-12 * std::abs(want));
            }
        }
    }
}

TEST_CASE("Stolt line matches direct evaluation of a point-target spectrum") {
    // S(k) = exp(j kz(k) z0); after the map S(kz) = exp(j kz z0) times the Jacobian.
    const Index nk = 256;
    const Eigen::VectorXd k = frequency_axis(430e9, 10e9, nk).wavenumbers();
    const double dk = k[1] - k[0];
    const double z0 = 0.01;
    for (double krho : {0.0, 4000.0, 12000.0}) {
        Eigen::VectorXcd s(nk);
        for (Index i = 0; i < nk; ++i) s[i] = std::polar(1.0, *dispersion_kz(k[i], krho, 0.0) * z0);
        const Index nkz = 300;
        const double kz_lo = *dispersion_kz(k[0], krho, 0.0);
        const double kz_hi = *dispersion_kz(k[nk - 1], krho, 0.0);
        const double dkz = (kz_hi - kz_lo) / static_cast<double>(nkz + 9);
        Eigen::VectorXcd out(nkz);
        REQUIRE(stolt_line(s, k[0], dk, krho, kz_lo + 5 * dkz, dkz, Interp::linear, true, out));
        double err = 0.0, ref = 0.0;
        for (Index j = 0; j < nkz; ++j) {
            const double kz = kz_lo + dkz * static_cast<double>(j + 5);
            const double kk = 0.5 * std::hypot(kz, krho);
            const cd want = std::polar(kz / (2.0 * kk), kz * z0);
            err += std::norm(out[j] - want);
            ref += std::norm(want);
        }
        CHECK(std::sqrt(err / ref) <= 1e-3);
    }
}

TEST_CASE("Stolt over a spectrum zeroes evanescent lines") {
    const Eigen::VectorXd k = band(8).wavenumbers();
    KSpace in;
    in.axis_names = {"ky", "k"};
    Eigen::VectorXd ky(3);
    ky << 0.0, k[3] * 2.0, 5.0 * k[7];
    in.axes = {ky, k};
    in.spectrum = ComplexArray({3, 8});
    in.spectrum.data.setOnes();
    Index zeroed = -1;
    const auto out = stolt_rectilinear(in, default_kz_axis(k), Interp::linear, false, &zeroed);
    CHECK(zeroed == 1);
    CHECK(out.axis_names.back() == "kz");
    CHECK(out.spectrum.data.segment(16, 8).norm() == 0.0);
    CHECK(out.spectrum.data.segment(0, 8).isApprox(Eigen::VectorXcd::Ones(8)));
    // kz samples outside the support of a line are empty
    CHECK(out.spectrum.data[8] == cd(0.0));
}

TEST_CASE("azimuth kernel equals the direct DFT") {
    const Index n = 64;
    const double k = wavenumber(435e9), ky = 3000.0, r0 = 0.01;
    const auto g = azimuth_kernel(ky, k, r0, n);
    const double a = std::sqrt(4 * k * k - ky * ky) * r0;
    for (Index i = 0; i < n; ++i) {
        const double m = static_cast<double>(i - n / 2);
        cd want = 0.0;
        for (Index t = 0; t < n; ++t) {
            const double th = kTwoPi * static_cast<double>(t) / static_cast<double>(n);
            want += std::exp(cd(0.0, -a * std::cos(th))) * std::exp(cd(0.0, -m * th));
        }
        CHECK(std::abs(g[i] - want) <= 1e-12 * static_cast<double>(n));
    }
}

TEST_CASE("azimuth kernel at the evanescent edge is a delta") {
    const Index n = 32;
    const double k = 100.0;
    const auto g = azimuth_kernel(2.0 * k, k, 0.3, n);
    CHECK(g[n / 2] == cd(static_cast<double>(n)));
    for (Index i = 0; i < n; ++i)
        if (i != n / 2) CHECK(std::abs(g[i]) <= 1e-12);
    CHECK(azimuth_kernel(2.5 * k, k, 0.3, n).norm() == 0.0);
}

TEST_CASE("azimuth kernel is even in k_theta") {
    const Index n = 48;
    const auto g = azimuth_kernel(1000.0, wavenumber(435e9), 0.05, n);
    for (Index i = 1; i < n; ++i) CHECK(std::abs(g[i] - g[n - i]) <= 1e-9 * g.norm());
}

TEST_CASE("azimuth series equals the Bessel expansion") {
    // exp(-j a cos t) = sum_m (-j)^m J_m(a) exp(j m t)
    const Index n = 256;
    const double k = wavenumber(435e9), ky = 5000.0, r0 = 0.004;
    const double a = std::sqrt(4 * k * k - ky * ky) * r0;
    REQUIRE(a > 60.0);
    const auto c = azimuth_series(ky, k, r0, n);
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
        const int m = static_cast<int>(i - n / 2);
        const double jm = std::cyl_bessel_j(static_cast<double>(std::abs(m)), a) * ((m < 0 && (m % 2)) ? -1.0 : 1.0);
        const cd want = std::pow(cd(0.0, -1.0), m) * jm;
        worst = std::max(worst, std::abs(c[i] - want));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("polar Stolt of a constant spectrum fills the annulus") {
    const Index na = 64;
    Eigen::VectorXd kr = Eigen::VectorXd::LinSpaced(5, 10.0, 20.0);
    const Eigen::MatrixXcd p = Eigen::MatrixXcd::Constant(na, 5, cd(2.0, 1.0));
    Eigen::VectorXd K = Eigen::VectorXd::LinSpaced(41, -25.0, 25.0);
    const auto out = stolt_polar(p, kr, K, K);
    for (Index i = 0; i < 41; ++i)
        for (Index j = 0; j < 41; ++j) {
            const double r = std::hypot(K[i], K[j]);
            if (r >= 10.0 && r <= 20.0) CHECK(std::abs(out(i, j) - cd(2.0, 1.0)) <= 1e-12);
            else CHECK(out(i, j) == cd(0.0));
        }
    CHECK(out(20, 20) == cd(0.0));
    CHECK_THROWS_AS(stolt_polar(p.leftCols(1), kr.head(1), K, K), ValidationError);
}

TEST_CASE("polar Stolt of a smooth field matches the closed form") {
    auto field = [](double k1, double k2) { return cd(std::cos(0.8 * k1) * std::exp(-0.1 * k2 * k2), std::sin(0.5 * k2)); };
    const Index na = 1024, nr = 200;
    const Eigen::VectorXd kr = Eigen::VectorXd::LinSpaced(nr, 1.0, 3.0);
    Eigen::MatrixXcd p(na, nr);
    for (Index q = 0; q < na; ++q) {
        const double alpha = kTwoPi * static_cast<double>(q) / static_cast<double>(na);
        for (Index i = 0; i < nr; ++i) p(q, i) = field(-kr[i] * std::cos(alpha), -kr[i] * std::sin(alpha));
    }
    const Eigen::VectorXd K = Eigen::VectorXd::LinSpaced(61, -3.0, 3.0);
    const auto out = stolt_polar(p, kr, K, K);
    double err = 0.0, ref = 0.0;
    Index inside = 0;
    for (Index i = 0; i < 61; ++i)
        for (Index j = 0; j < 61; ++j) {
            const double r = std::hypot(K[i], K[j]);
            if (r < 1.0 || r > 3.0) continue;
            ++inside;
            err += std::norm(out(i, j) - field(K[i], K[j]));
            ref += std::norm(field(K[i], K[j]));
        }
    REQUIRE(inside > 1000);
    CHECK(std::sqrt(err / inside) <= 1e-3);
}

TEST_CASE("planar RMA focuses a point") {
    const auto ap = planar_aperture(48, 48, kLambda / 4, kLambda / 4, 0.0);
    const Vec3 t(0.0, 0.0, 0.1);
    const auto echo = simulate_echo(ap, point_scene({{t, {1, 0}}}), band());
    const auto g = GridSpec::make3d({-0.008, 0.008, 17}, {-0.008, 0.008, 17}, {0.08, 0.12, 21});
    const auto rec = rma_planar(echo, g);
    CHECK(max_offset(g, argmax_voxel(rec.image), nearest_voxel(g, t)) <= 1);
    CHECK(rec.stages.empty());
}

TEST_CASE("planar RMA keeps its k-space stages on request") {
    const auto ap = planar_aperture(8, 6, kLambda / 4, kLambda / 4, 0.0);
    const auto echo = simulate_echo(ap, point_scene({{Vec3(0, 0, 0.1), {1, 0}}}), band(8));
    RmaOptions opt;
    opt.keep_kspace = true;
    const auto rec = rma_planar(echo, GridSpec::make3d({-0.01, 0.01, 5}, {-0.01, 0.01, 5}, {0.09, 0.11, 5}), opt);
    REQUIRE(rec.stages.size() == 4);
    CHECK(rec.stages[0].stage == "stage0_signal");
    CHECK(rec.stages[0].spectrum.shape == std::vector<Index>{8, 6, 8});
    CHECK(rec.stages[1].axis_names == std::vector<std::string>{"kx", "ky", "k"});
    CHECK(rec.stages[3].axis_names.back() == "kz");
    for (const auto& s : rec.stages)
        for (std::size_t a = 0; a < s.axes.size(); ++a) CHECK(s.axes[a].size() == s.spectrum.shape[a]);
}

TEST_CASE("zero echo gives a zero image") {
    auto check_zero = [](const Aperture& ap, const GridSpec& g, const char* algo) {
        auto echo = simulate_echo(ap, point_scene({{Vec3(0.001, 0.001, 0.1), {1, 0}}}), band(8));
        echo.samples.setZero();
        CHECK(reconstruct(algo, echo, g).image.voxels.norm() == 0.0);
    };
    check_zero(planar_aperture(8, 8, kLambda / 4, kLambda / 4, 0.0),
               GridSpec::make3d({-0.01, 0.01, 5}, {-0.01, 0.01, 5}, {0.09, 0.11, 5}), "rma-planar");
    check_zero(linear_aperture(8, kLambda / 4, 0.0), GridSpec::make2d({-0.01, 0.01, 5}, {0.09, 0.11, 5}), "rma-linear");
    check_zero(cylindrical_aperture(16, 4, kLambda / 4, 0.2),
               GridSpec::make3d({-0.01, 0.01, 5}, {-0.01, 0.01, 5}, {-0.01, 0.01, 5}), "rma-cylindrical");
    check_zero(circular_aperture(16, 0.2), GridSpec::make2d({-0.01, 0.01, 5}, {-0.01, 0.01, 5}), "rma-circular");
}

TEST_CASE("linear RMA focuses a broadside point on its voxel") {
    const auto ap = linear_aperture(128, kLambda / 4, 0.0);
    const Vec3 t(0.0, 0.0, 0.1);
    const auto echo = simulate_echo(ap, point_scene({{t, {1, 0}}}), band());
    const auto g = GridSpec::make2d({-0.01, 0.01, 41}, {0.08, 0.12, 41});
    CHECK(argmax_voxel(rma_linear(echo, g).image) == nearest_voxel(g, t));
}

TEST_CASE("linear RMA agrees with backprojection on random points") {
    const auto ap = linear_aperture(128, kLambda / 4, 0.0);
    const auto scene = testing::random_points(11, 5, Vec3(0, -0.008, 0.09), Vec3(0, 0.008, 0.11));
    const auto echo = simulate_echo(ap, scene, band());
    const auto g = GridSpec::make2d({-0.012, 0.012, 97}, {0.08, 0.12, 41});
    const auto c = image_compare(rma_linear(echo, g).image, bpa(echo, g));
    CHECK(c.ncc >= 0.90);
}

TEST_CASE("RMA is linear in the echo") {
    const auto ap = linear_aperture(64, kLambda / 4, 0.0);
    const auto g = GridSpec::make2d({-0.01, 0.01, 21}, {0.08, 0.12, 21});
    const auto ea = simulate_echo(ap, testing::random_points(3, 2, Vec3(0, -0.005, 0.09), Vec3(0, 0.005, 0.11)), band());
    const auto eb = simulate_echo(ap, testing::random_points(4, 2, Vec3(0, -0.005, 0.09), Vec3(0, 0.005, 0.11)), band());
    EchoData sum = ea;
    sum.samples += eb.samples;
    const Eigen::VectorXcd want = rma_linear(ea, g).image.voxels + rma_linear(eb, g).image.voxels;
    CHECK(testing::relative_error(rma_linear(sum, g).image.voxels, want) <= 1e-12);
}

TEST_CASE("circular RMA centres a point at the origin") {
    const auto ap = circular_aperture(256, 0.25);
    const auto echo = simulate_echo(ap, point_scene({{Vec3::Zero(), {1, 0}}}), band());
    const auto g = GridSpec::make2d({-0.004, 0.004, 41}, {-0.004, 0.004, 41});
    CHECK(argmax_voxel(rma_circular(echo, g).image) == nearest_voxel(g, Vec3::Zero()));
}

TEST_CASE("circular RMA agrees with backprojection") {
    const auto ap = circular_aperture(256, 0.25);
    const auto scene = testing::random_points(21, 3, Vec3(0, -0.003, -0.003), Vec3(0, 0.003, 0.003));
    const auto echo = simulate_echo(ap, scene, band());
    const auto g = GridSpec::make2d({-0.005, 0.005, 81}, {-0.005, 0.005, 81});
    CHECK(image_compare(rma_circular(echo, g).image, bpa(echo, g)).ncc >= 0.90);
}

TEST_CASE("rotating the scene by one step shifts the circular echo by one row") {
    const Index n = 64;
    const auto ap = circular_aperture(n, 0.25);
    const auto scene = testing::random_points(8, 3, Vec3(0, -0.01, -0.01), Vec3(0, 0.01, 0.01));
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(kTwoPi / static_cast<double>(n), Vec3::UnitX()).toRotationMatrix();
    std::vector<Scatterer> turned = scene.scatterers;
    for (auto& s : turned) s.position = rot * s.position;
    const auto a = simulate_echo(ap, scene, band(8));
    const auto b = simulate_echo(ap, point_scene(turned), band(8));
    for (Index t = 0; t < n; ++t)
        CHECK((b.samples.row((t + 1) % n) - a.samples.row(t)).norm() <= 1e-9 * a.samples.row(t).norm());
}

TEST_CASE("cylindrical RMA centres a point at the origin") {
    const auto ap = cylindrical_aperture(128, 32, kLambda / 4, 0.05);
    const auto echo = simulate_echo(ap, point_scene({{Vec3::Zero(), {1, 0}}}), band());
    const auto g = GridSpec::make3d({-0.002, 0.002, 21}, {-0.003, 0.003, 21}, {-0.002, 0.002, 21});
    const auto img = rma_cylindrical(echo, g).image;
    const auto peak = unravel(argmax_voxel(img), img.shape());
    CHECK(peak[0] == 10);
    CHECK(std::abs(peak[1] - 10) <= 1);
    CHECK(peak[2] == 10);
    const Eigen::VectorXd m = img.magnitude();
    for (Index j = 0; j < 10; ++j)
        CHECK(m[ravel({10, j, 10}, img.shape())] == doctest::Approx(m[ravel({10, 20 - j, 10}, img.shape())]).epsilon(1e-6));
}

TEST_CASE("RMA refuses nonuniform apertures") {
    Eigen::Matrix3Xd p(3, 4);
    p << 0, 0, 0, 0, -1e-3, 0, 1e-3, 3e-3, 0, 0, 0, 0;
    const auto echo = simulate_echo(irregular_aperture(p), point_scene({{Vec3(0, 0, 0.1), {1, 0}}}), band(4));
    try {
        rma_linear(echo, GridSpec::make2d({-0.01, 0.01, 5}, {0.09, 0.11, 5}));
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "aperture.kind");
        CHECK(std::string(e.what()).find("bpa") != std::string::npos);
    }
}

TEST_CASE("algorithm dispatch") {
    CHECK(default_algorithm(ApertureKind::planar) == "rma-planar");
    CHECK(default_algorithm(ApertureKind::irregular) == "bpa");
    const auto echo = simulate_echo(linear_aperture(8, kLambda / 4, 0.0), point_scene({{Vec3(0, 0, 0.1), {1, 0}}}), band(4));
    CHECK_THROWS_AS(reconstruct("fbp", echo, GridSpec::make2d({-0.01, 0.01, 5}, {0.09, 0.11, 5})), ValidationError);
    CHECK(interp_from_string("cubic") == Interp::cubic);
    CHECK_THROWS_AS(interp_from_string("sinc"), ValidationError);
}

TEST_CASE("default grid") {
    const auto lin = simulate_echo(linear_aperture(64, kLambda / 4, 0.0), point_scene({{Vec3(0, 0, 0.1), {1, 0}}}), band());
    const Box3 region(Vec3(0, -0.01, 0.09), Vec3(0, 0.01, 0.11));
    const auto g = default_grid(lin, region);
    CHECK(g.dims() == 2);
    CHECK(g.axes[0].min == doctest::Approx(-0.01));
    CHECK(g.axes[1].max == doctest::Approx(0.11));
    const auto capped = default_grid(lin, region, 8);
    CHECK(capped.axes[0].count <= 8);
}
