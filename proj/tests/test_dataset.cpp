#include <doctest.h>

#include <fstream>

#include "sarlab/dataset.hpp"
#include "sarlab/digest.hpp"
#include "sarlab/engine.hpp"
#include "sarlab/error.hpp"
#include "support.hpp"

using namespace sarlab;

namespace {

Json tiny_spec(Index n_train, Index n_test) {
    Json j = parse_json(R"({
      "base_seed": 42, "shard_size": 4,
      "scene": {"points": [1, 3], "bounds": {"min": [0.0, -0.005, 0.095], "max": [0.0, 0.005, 0.105]}},
      "waveform": {"type": "fmcw", "f0": 430e9, "K": 2.5e14, "Tc": 40e-6, "Tr": 50e-6, "Nc": 64, "fS": 10e6, "Nf": 8},
      "aperture": {"kind": "linear", "ny": 32, "dy_lambda": 0.25, "Z0": 0.0},
      "grid": {"y": {"min": -0.008, "max": 0.008, "count": 16}, "z": {"min": 0.09, "max": 0.11, "count": 8}},
      "algo": "rma-linear"
    })");
    j["n_train"] = n_train;
    j["n_test"] = n_test;
    return j;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("spec parsing") {
    const auto spec = parse_dataset_spec(tiny_spec(8, 2));
    CHECK(spec.total() == 10);
    CHECK(spec.points_min == 1);
    CHECK(spec.points_max == 3);
    CHECK(spec.grid.dims() == 2);

    Json bad = tiny_spec(8, 2);
    bad["scene"]["points"] = Json::array({3, 1});
    CHECK_THROWS_AS(parse_dataset_spec(bad), ValidationError);
    CHECK(parse_dataset_spec(tiny_spec(0, 0)).total() == 0);
    bad = tiny_spec(-1, 2);
    CHECK_THROWS_AS(parse_dataset_spec(bad), ValidationError);
    bad = tiny_spec(8, 2);
    bad.erase("grid");
    CHECK_THROWS_AS(parse_dataset_spec(bad), ValidationError);
}

TEST_CASE("large splits shard per split") {
    Json j = tiny_spec(20000, 3000);
    j["shard_size"] = 1000;
    const auto spec = parse_dataset_spec(j);
    CHECK(spec.total() == 23000);
    CHECK(sample_location(spec, 0).relative_path.generic_string() == "train/shard_0000/sample_000000.sarb");
    CHECK(sample_location(spec, 19999).relative_path.generic_string() == "train/shard_0019/sample_019999.sarb");
    const auto t = sample_location(spec, 20000);
    CHECK(t.split == "test");
    CHECK(t.relative_path.generic_string() == "test/shard_0000/sample_020000.sarb");
    CHECK(sample_location(spec, 22999).relative_path.generic_string() == "test/shard_0002/sample_022999.sarb");
    CHECK_THROWS_AS(sample_location(spec, 23000), ValidationError);
}

TEST_CASE("sample arrays") {
    const auto spec = parse_dataset_spec(tiny_spec(8, 2));
    const auto arrays = generate_sample(spec, 3);
    const auto& lr = sarb::find(arrays, "lr_image");
    const auto& hr = sarb::find(arrays, "hr_label");
    CHECK(lr.shape == std::vector<std::int64_t>{16, 8});
    CHECK(hr.shape == lr.shape);
    const auto& scene = sarb::find(arrays, "scene");
    REQUIRE(scene.shape.size() == 2);
    CHECK(scene.shape[1] == 5);
    CHECK(scene.shape[0] >= 1);
    CHECK(scene.shape[0] <= 3);
    CHECK(grid_from_arrays(arrays).axes[1].count == 8);
    CHECK(hash_from_arrays(arrays).size() == 64);
    CHECK(sarb::encode(generate_sample(spec, 3)) == sarb::encode(arrays));
    CHECK(sarb::encode(generate_sample(spec, 4)) != sarb::encode(arrays));
}

TEST_CASE("generation is reproducible") {
    const auto spec = parse_dataset_spec(tiny_spec(8, 2));
    testing::TempDir a("ds_a"), b("ds_b");
    Index last = 0;
    const auto ma = generate_dataset(spec, a.path(), 1, [&](Index done, Index) { last = done; });
    const auto mb = generate_dataset(spec, b.path(), 3);
    CHECK(last == 10);
    REQUIRE(ma.samples.size() == 10);
    CHECK(ma.failed.empty());
    for (std::size_t i = 0; i < ma.samples.size(); ++i) {
        CHECK(ma.samples[i].digest == mb.samples[i].digest);
        CHECK(ma.samples[i].path == mb.samples[i].path);
        CHECK(sha256_hex(sarb::read_file(a.path() / ma.samples[i].path)) == ma.samples[i].digest);
    }
    CHECK(read_text(a.path() / "dataset.json") == read_text(b.path() / "dataset.json"));
    const Json manifest = parse_json(read_text(a.path() / "dataset.json"));
    CHECK(manifest["counts"]["train"] == 8);
    CHECK(manifest["counts"]["test"] == 2);
    CHECK(std::filesystem::exists(a.path() / "train/shard_0001/sample_000004.sarb"));
    CHECK(std::filesystem::exists(a.path() / "test/shard_0000/sample_000009.sarb"));
}

TEST_CASE("unwritable output directory") {
    testing::TempDir dir("ds_io");
    std::ofstream(dir.path() / "file") << "x";
    const auto spec = parse_dataset_spec(tiny_spec(2, 0));
    CHECK_THROWS_AS(generate_dataset(spec, dir.path() / "file" / "sub", 1), IoError);
}
