#include "sarlab/dataset.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sarlab/digest.hpp"
#include "sarlab/engine.hpp"
#include "sarlab/error.hpp"
#include "sarlab/random.hpp"

namespace sarlab {

namespace {

Index count_field(const Json& j, const char* key, Index fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() || j[key].get<Index>() < 0) throw ValidationError("must be an integer >= 0", key);
    return j[key].get<Index>();
}

Vec3 vec3(const Json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
        throw ValidationError("must be a list of 3 numbers", field);
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

MeshLibrary load_library(const DatasetSpec& spec) {
    MeshLibrary lib;
    lib.spacing = spec.mesh_spacing;
    for (const auto& m : spec.meshes) {
        TriangleMesh mesh = m.builtin == "knife" ? knife_mesh(m.length)
                                                 : import_stl_file((spec.base_dir / m.path).string(), m.units);
        lib.meshes.push_back(mesh.transformed(m.pose));
    }
    return lib;
}

std::vector<sarb::Array> make_sample(const DatasetSpec& spec, const MeshLibrary& lib, Index index) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(index);
    Rng count_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const Index n_points =
        spec.points_min + static_cast<Index>(count_rng.below(static_cast<std::uint64_t>(spec.points_max - spec.points_min + 1)));
    const Scene scene = random_scene(seed, n_points, spec.bounds, lib.meshes.empty() ? nullptr : &lib);

    const FrequencyAxis freq = frequency_axis(band_of(spec.waveform));
    const EchoData lr_echo = simulate_echo(build_aperture(spec.aperture), scene, freq);
    const std::string lr_algo = spec.algo.empty() ? default_algorithm(lr_echo.aperture_kind) : spec.algo;
    const ImageVolume lr = reconstruct(lr_algo, lr_echo, spec.grid, spec.rma).image;

    ImageVolume hr;
    if (spec.hr_mode == HrMode::label) {
        hr = rasterize_ground_truth(scene, spec.grid, spec.label_sigma_vox, RasterMode::lenient).image;
    } else {
        const Waveform& w = spec.hr_waveform ? *spec.hr_waveform : spec.waveform;
        const ApertureConfig& a = spec.hr_aperture ? *spec.hr_aperture : spec.aperture;
        const EchoData hr_echo = simulate_echo(build_aperture(a), scene, frequency_axis(band_of(w)));
        hr = reconstruct(default_algorithm(hr_echo.aperture_kind), hr_echo, spec.grid, spec.rma).image;
    }
    if (lr.shape() != hr.shape()) throw ValidationError("LR and HR images differ in shape", "grid");

    const auto dims = lr.shape();
    const std::vector<std::int64_t> shape(dims.begin(), dims.end());
    std::vector<sarb::Array> out;
    out.push_back({"lr_image", shape, std::vector<cd>(lr.voxels.data(), lr.voxels.data() + lr.voxels.size())});
    out.push_back({"hr_label", shape, std::vector<cd>(hr.voxels.data(), hr.voxels.data() + hr.voxels.size())});
    out.push_back(scene_array(scene));
    out.push_back(grid_array(spec.grid));
    out.push_back(hash_array(sha256_hex(config_hash(spec.source) + ":" + std::to_string(index))));
    return out;
}

void write_atomically(const std::filesystem::path& path, const std::vector<std::byte>& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    sarb::write_file(tmp, bytes);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

}  // namespace

DatasetSpec parse_dataset_spec(const Json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ValidationError("dataset spec must be an object", "spec");
    DatasetSpec s;
    s.source = j;
    s.base_dir = base_dir;
    if (j.contains("base_seed")) {
        if (!j["base_seed"].is_number_unsigned()) throw ValidationError("must be an integer >= 0", "base_seed");
        s.base_seed = j["base_seed"].get<std::uint64_t>();
    }
    s.n_train = count_field(j, "n_train", 0);
    s.n_test = count_field(j, "n_test", 0);
    s.shard_size = count_field(j, "shard_size", s.shard_size);
    if (s.shard_size < 1) throw ValidationError("must be >= 1", "shard_size");

    if (!j.contains("scene") || !j["scene"].is_object()) throw ValidationError("is required", "scene");
    const Json& sc = j["scene"];
    if (sc.contains("points")) {
        const Json& p = sc["points"];
        if (p.is_number_integer()) {
            s.points_min = s.points_max = p.get<Index>();
        } else if (p.is_array() && p.size() == 2 && p[0].is_number_integer() && p[1].is_number_integer()) {
            s.points_min = p[0].get<Index>();
            s.points_max = p[1].get<Index>();
        } else {
            throw ValidationError("must be an integer or [min, max]", "scene.points");
        }
        if (s.points_min < 0 || s.points_max < s.points_min) throw ValidationError("needs 0 <= min <= max", "scene.points");
    }
    if (!sc.contains("bounds") || !sc["bounds"].is_object()) throw ValidationError("is required", "scene.bounds");
    const Vec3 lo = vec3(sc["bounds"].value("min", Json()), "scene.bounds.min");
    const Vec3 hi = vec3(sc["bounds"].value("max", Json()), "scene.bounds.max");
    if ((hi.array() < lo.array()).any()) throw ValidationError("max must be >= min", "scene.bounds");
    s.bounds = Box3(lo, hi);
    if (sc.contains("meshes")) {
        Json wrapped = {{"meshes", sc["meshes"]}};
        for (auto& m : wrapped["meshes"])
            if (m.is_object() && !m.contains("spacing")) m["spacing"] = 1.0;
        s.meshes = parse_scene(wrapped, "scene").meshes;
    }
    if (sc.contains("mesh_spacing")) {
        if (!sc["mesh_spacing"].is_number() || !(sc["mesh_spacing"].get<double>() > 0.0))
            throw ValidationError("must be positive", "scene.mesh_spacing");
        s.mesh_spacing = sc["mesh_spacing"].get<double>();
    }
    if (s.points_max == 0 && s.meshes.empty()) throw ValidationError("scenes would be empty", "scene.points");

    if (!j.contains("waveform")) throw ValidationError("is required", "waveform");
    s.waveform = parse_waveform(j["waveform"]);
    if (!j.contains("aperture")) throw ValidationError("is required", "aperture");
    s.aperture = parse_aperture(j["aperture"], center_wavelength(s.waveform));
    if (!j.contains("grid")) throw ValidationError("is required", "grid");
    s.grid = parse_grid_spec(j["grid"]);
    s.grid.validate();
    if (j.contains("algo")) {
        if (!j["algo"].is_string()) throw ValidationError("must be a string", "algo");
        s.algo = j["algo"].get<std::string>();
    }
    if (j.contains("reconstruction")) s.rma = parse_rma(j["reconstruction"]);
    if (j.contains("label_sigma_vox")) {
        if (!j["label_sigma_vox"].is_number() || j["label_sigma_vox"].get<double>() < 0.0)
            throw ValidationError("must be >= 0", "label_sigma_vox");
        s.label_sigma_vox = j["label_sigma_vox"].get<double>();
    }
    if (j.contains("hr")) {
        const Json& hr = j["hr"];
        const std::string mode = hr.value("mode", "label");
        if (mode == "label") s.hr_mode = HrMode::label;
        else if (mode == "simulate") s.hr_mode = HrMode::simulate;
        else throw ValidationError("must be label or simulate", "hr.mode");
        if (hr.contains("waveform")) s.hr_waveform = parse_waveform(hr["waveform"], "hr.waveform");
        if (hr.contains("aperture"))
            s.hr_aperture = parse_aperture(hr["aperture"], center_wavelength(s.hr_waveform.value_or(s.waveform)), "hr.aperture");
    }
    return s;
}

SampleLocation sample_location(const DatasetSpec& spec, Index index) {
    if (index < 0 || index >= spec.total()) throw ValidationError("sample index out of range", "index");
    const bool train = index < spec.n_train;
    const Index local = train ? index : index - spec.n_train;
    char shard[32];
    char file[32];
    std::snprintf(shard, sizeof shard, "shard_%04lld", static_cast<long long>(local / spec.shard_size));
    std::snprintf(file, sizeof file, "sample_%06lld.sarb", static_cast<long long>(index));
    const std::string split = train ? "train" : "test";
    return {index, split, std::filesystem::path(split) / shard / file};
}

Json Manifest::to_json() const {
    Json samples_json = Json::array();
    for (const auto& s : samples)
        samples_json.push_back({{"index", s.index}, {"split", s.split}, {"path", s.path}, {"digest", s.digest}});
    Json errors_json = Json::array();
    for (std::size_t i = 0; i < failed.size(); ++i) errors_json.push_back({{"index", failed[i]}, {"message", errors[i]}});
    return {{"schema", 1},
            {"counts", {{"train", n_train}, {"test", n_test}}},
            {"base_seed", base_seed},
            {"spec_hash", spec_hash},
            {"samples", samples_json},
            {"failed", failed},
            {"errors", errors_json}};
}

std::vector<sarb::Array> generate_sample(const DatasetSpec& spec, Index index) {
    return make_sample(spec, load_library(spec), index);
}

Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir, unsigned workers,
                          const DatasetProgressFn& progress) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
    {
        const auto probe = out_dir / ".write_probe";
        std::ofstream p(probe);
        if (!p) throw IoError("'" + out_dir.string() + "' is not writable");
        p.close();
        std::filesystem::remove(probe, ec);
    }

    const MeshLibrary lib = load_library(spec);
    const Index total = spec.total();
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<Index>(workers, std::max<Index>(total, 1)));

    std::vector<std::optional<ManifestEntry>> entries(static_cast<std::size_t>(total));
    std::vector<std::string> errors(static_cast<std::size_t>(total));
    std::atomic<Index> next{0};
    std::atomic<Index> done{0};
    std::mutex progress_mutex;

    auto work = [&] {
#ifdef _OPENMP
        if (workers > 1) omp_set_num_threads(1);
#endif
        for (Index i = next++; i < total; i = next++) {
            const auto u = static_cast<std::size_t>(i);
            try {
                const SampleLocation loc = sample_location(spec, i);
                const auto bytes = sarb::encode(make_sample(spec, lib, i));
                const auto path = out_dir / loc.relative_path;
                std::filesystem::create_directories(path.parent_path());
                write_atomically(path, bytes);
                entries[u] = ManifestEntry{i, loc.split, loc.relative_path.generic_string(), sha256_hex(bytes)};
            } catch (const std::exception& e) {
                errors[u] = e.what();
            }
            const Index d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, total);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    Manifest m;
    m.n_train = spec.n_train;
    m.n_test = spec.n_test;
    m.base_seed = spec.base_seed;
    m.spec_hash = config_hash(spec.source);
    for (Index i = 0; i < total; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (entries[u]) {
            m.samples.push_back(*entries[u]);
        } else {
            m.failed.push_back(i);
            m.errors.push_back(errors[u]);
        }
    }
    std::string text = m.to_json().dump(2);
    text += '\n';
    write_atomically(out_dir / "dataset.json", {reinterpret_cast<const std::byte*>(text.data()),
                                                 reinterpret_cast<const std::byte*>(text.data() + text.size())});
    return m;
}

}  // namespace sarlab
