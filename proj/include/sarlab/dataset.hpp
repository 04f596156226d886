#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sarlab/config.hpp"
#include "sarlab/sarb.hpp"

namespace sarlab {

enum class HrMode { label, simulate };

/// LR/HR dataset description.
///
/// {
///   "base_seed": 7, "n_train": 80, "n_test": 20, "shard_size": 1000,
///   "scene": {"points": [1, 5], "bounds": {"min": [x, y, z], "max": [x, y, z]},
///             "meshes": [{"builtin": "knife", "length": 0.01}], "mesh_spacing": 5e-4},
///   "waveform": {...}, "aperture": {...}, "grid": {...}, "algo": "rma-linear",
///   "reconstruction": {...}, "label_sigma_vox": 1.0,
///   "hr": {"mode": "label"} | {"mode": "simulate", "waveform": {...}, "aperture": {...}}
/// }
struct DatasetSpec {
    std::uint64_t base_seed = 0;
    Index n_train = 0;
    Index n_test = 0;
    Index shard_size = 1000;
    Index points_min = 1;
    Index points_max = 1;
    Box3 bounds;
    std::vector<MeshConfig> meshes;
    double mesh_spacing = 1e-3;
    Waveform waveform;
    ApertureConfig aperture;
    GridSpec grid;
    std::string algo;
    RmaOptions rma;
    double label_sigma_vox = 1.0;
    HrMode hr_mode = HrMode::label;
    std::optional<Waveform> hr_waveform;
    std::optional<ApertureConfig> hr_aperture;
    std::filesystem::path base_dir;
    Json source;

    Index total() const { return n_train + n_test; }
};

DatasetSpec parse_dataset_spec(const Json& j, const std::filesystem::path& base_dir = {});

struct SampleLocation {
    Index index = 0;
    std::string split;  // "train" or "test"
    std::filesystem::path relative_path;
};

/// Where sample `index` lives: <split>/shard_NNNN/sample_NNNNNN.sarb, with
/// shards counted separately per split.
SampleLocation sample_location(const DatasetSpec& spec, Index index);

struct ManifestEntry {
    Index index = 0;
    std::string split;
    std::string path;
    std::string digest;  // sha256 of the sample file
};

struct Manifest {
    Index n_train = 0;
    Index n_test = 0;
    std::uint64_t base_seed = 0;
    std::string spec_hash;
    std::vector<ManifestEntry> samples;
    std::vector<Index> failed;
    std::vector<std::string> errors;  // one per failed index

    Json to_json() const;
};

/// Arrays of one sample: lr_image, hr_label, scene [N, 5], grid, config_hash.
std::vector<sarb::Array> generate_sample(const DatasetSpec& spec, Index index);

using DatasetProgressFn = std::function<void(Index done, Index total)>;

/// Generates every sample with `workers` threads (0: hardware concurrency)
/// and writes dataset.json once all workers have joined.
Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir, unsigned workers = 0,
                          const DatasetProgressFn& progress = {});

}  // namespace sarlab
