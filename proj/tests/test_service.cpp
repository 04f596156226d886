#include <doctest.h>

#include <chrono>
#include <cstring>
#include <thread>

#include "sarlab/engine.hpp"
#include "sarlab/error.hpp"
#include "sarlab/service/jobs.hpp"
#include "sarlab/service/presets.hpp"
#include "sarlab/service/render.hpp"
#include "sarlab/service/server.hpp"
#include "support.hpp"

#include <httplib.h>

using namespace sarlab;
using namespace sarlab::service;
using namespace std::chrono_literals;

namespace {

Json small_pipeline() {
    return parse_json(R"({
      "waveform": {"type": "fmcw", "f0": 430e9, "K": 2.5e14, "Tc": 40e-6, "Tr": 50e-6, "Nc": 64, "fS": 10e6, "Nf": 8},
      "aperture": {"kind": "linear", "ny": 32, "dy_lambda": 0.25, "Z0": 0.0},
      "scene": {"points": [{"xyz": [0.0, 0.0, 0.1]}]},
      "grid": {"y": {"min": -0.01, "max": 0.01, "count": 21}, "z": {"min": 0.09, "max": 0.11, "count": 11}},
      "algo": "rma-linear"
    })");
}

bool png_signature(const std::vector<std::byte>& png) {
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return png.size() > 8 && std::memcmp(png.data(), sig, 8) == 0;
}

}  // namespace

TEST_CASE("jet colormap end points") {
    const auto lo = jet(0.0);
    const auto hi = jet(1.0);
    CHECK(lo[0] == 0);
    CHECK(lo[1] == 0);
    CHECK(lo[2] > 100);
    CHECK(hi[0] > 100);
    CHECK(hi[1] == 0);
    CHECK(hi[2] == 0);
    CHECK(jet(-1.0) == lo);
    CHECK(jet(2.0) == hi);
}

TEST_CASE("render planes") {
    ImageVolume img(GridSpec::make3d({0, 1, 4}, {0, 1, 5}, {0, 1, 6}));
    img.voxels[ravel({1, 2, 3}, img.shape())] = cd(0.0, 2.0);
    RenderOptions mip;
    const auto p = render_plane(img, mip);
    CHECK(p.rows() == 4);
    CHECK(p.cols() == 5);
    CHECK(p(1, 2) == 2.0);
    CHECK(p.sum() == 2.0);

    RenderOptions slice{RenderMode::slice, 2, 2, 40.0};
    CHECK(render_plane(img, slice).sum() == 0.0);
    slice.index = 3;
    CHECK(render_plane(img, slice)(1, 2) == 2.0);
    slice.axis = 0;
    slice.index = 1;
    const auto px = render_plane(img, slice);
    CHECK(px.rows() == 5);
    CHECK(px.cols() == 6);
    CHECK(px(2, 3) == 2.0);

    slice.index = 9;
    try {
        render_plane(img, slice);
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "index");
    }
}

TEST_CASE("png output") {
    ImageVolume img(GridSpec::make2d({0, 1, 7}, {0, 1, 3}));
    const auto zero = render_png(img);
    CHECK(png_signature(zero));
    img.voxels[4] = 1.0;
    const auto a = render_png(img);
    const auto b = render_png(img);
    CHECK(a == b);
    CHECK(a != zero);
    CHECK_THROWS_AS(encode_png(2, 2, std::vector<std::uint8_t>(5)), ValidationError);
}

TEST_CASE("presets") {
    const Json p = presets();
    REQUIRE(p.is_array());
    CHECK(p.size() >= 5);
    for (const auto& e : p) CHECK_NOTHROW(parse_pipeline(e["config"]));
    CHECK_THROWS_AS(preset_config("fig9"), ValidationError);
}

TEST_CASE("job manager") {
    testing::TempDir dir("jobs");
    JobManager jobs(dir.path(), 2);
    const auto a = jobs.submit("pipeline", small_pipeline());
    const auto b = jobs.submit("pipeline", small_pipeline());
    CHECK(a != b);
    const auto ia = jobs.wait(a, 60s);
    const auto ib = jobs.wait(b, 60s);
    REQUIRE(ia);
    REQUIRE(ib);
    CHECK(ia->status == JobStatus::done);
    CHECK(ia->progress == 1.0);
    CHECK(ia->config_hash == ib->config_hash);
    const auto c = jobs.submit("pipeline", small_pipeline());
    const auto ic = jobs.wait(c, 60s);
    CHECK(ic->cached);
    CHECK(jobs.result_file(c) == jobs.result_file(a));

    CHECK_FALSE(jobs.status("nope"));
    CHECK_THROWS_AS(jobs.submit("train", small_pipeline()), ValidationError);
    Json bad = small_pipeline();
    bad["aperture"]["ny"] = -1;
    CHECK_THROWS_AS(jobs.submit("pipeline", bad), ValidationError);
}

TEST_CASE("service result matches the engine bit for bit") {
    testing::TempDir dir("bits");
    JobManager jobs(dir.path(), 1);
    const auto id = jobs.submit("pipeline", small_pipeline());
    REQUIRE(jobs.wait(id, 60s)->status == JobStatus::done);
    const auto file = sarb::read_file(*jobs.result_file(id));
    CHECK(file == sarb::encode(run_pipeline(small_pipeline()).arrays));
}

TEST_CASE("http routes") {
    testing::TempDir dir("http");
    ServerOptions opt;
    opt.data_dir = dir.path();
    JobManager jobs(dir.path(), 1);
    httplib::Server server;
    install_routes(server, jobs, opt);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    Json body = {{"type", "pipeline"}, {"config", small_pipeline()}};
    auto res = cli.Post("/api/v1/jobs", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 202);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
    const std::string id = parse_json(res->body)["id"];
    REQUIRE(jobs.wait(id, 60s));

    res = cli.Get("/api/v1/jobs/" + id);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(parse_json(res->body)["status"] == "done");

    res = cli.Get("/api/v1/jobs/" + id + "/result");
    REQUIRE(res);
    CHECK(res->status == 200);
    const std::vector<std::byte> bytes(reinterpret_cast<const std::byte*>(res->body.data()),
                                       reinterpret_cast<const std::byte*>(res->body.data() + res->body.size()));
    CHECK(bytes == sarb::read_file(*jobs.result_file(id)));

    res = cli.Get("/api/v1/jobs/" + id + "/image?mode=mip&dr=30");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");

    body["config"]["waveform"]["Nf"] = 0;
    res = cli.Post("/api/v1/jobs", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(parse_json(res->body)["field"] == "waveform.Nf");

    res = cli.Post("/api/v1/jobs", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = cli.Get("/api/v1/jobs/does-not-exist");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = cli.Get("/api/v1/metrics/resolution?B=4e9");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(parse_json(res->body)["predicted"]["dz"].get<double>() * 1e3 == doctest::Approx(37.474).epsilon(1e-4));
    res = cli.Get("/api/v1/metrics/resolution?B=-1");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(parse_json(res->body)["field"] == "B");

    res = cli.Get("/api/v1/presets");
    REQUIRE(res);
    CHECK(parse_json(res->body).size() >= 5);

    server.stop();
    th.join();
}
