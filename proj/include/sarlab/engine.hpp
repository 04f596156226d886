#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sarlab/analysis.hpp"
#include "sarlab/config.hpp"
#include "sarlab/forward_model.hpp"
#include "sarlab/reconstruction.hpp"
#include "sarlab/sarb.hpp"

namespace sarlab {

Aperture build_aperture(const ApertureConfig& c);
Scene build_scene(const SceneConfig& c, const std::filesystem::path& base_dir = {});

/// Explicit grid from the config, otherwise default_grid over the scene bounds plus margin.
GridSpec resolve_grid(const GridConfig& c, const EchoData& echo, const Scene& scene);

/// Forward model with the optional gain pattern and noise of the config.
EchoData simulate(const PipelineConfig& c, const Scene& scene, const ProgressFn& progress = {});

/// SARB arrays of an echo: echo, freq, positions, aperture_kind, aperture_meta, config_hash.
std::vector<sarb::Array> echo_arrays(const EchoData& echo, const std::string& hash = {});
EchoData echo_from_arrays(const std::vector<sarb::Array>& arrays);

/// SARB arrays of an image: image, grid, grid_plane_x, config_hash and, when
/// present, every stage with its axes (`<stage>`, `<stage>.<axis name>`).
std::vector<sarb::Array> image_arrays(const Reconstruction& r, const std::string& hash = {});
ImageVolume image_from_arrays(const std::vector<sarb::Array>& arrays);
sarb::Array grid_array(const GridSpec& g);
GridSpec grid_from_arrays(const std::vector<sarb::Array>& arrays);

sarb::Array scene_array(const Scene& s, const std::string& name = "scene");
sarb::Array hash_array(const std::string& hex, const std::string& name = "config_hash");
std::string hash_from_arrays(const std::vector<sarb::Array>& arrays, const std::string& name = "config_hash");

/// Predicted and measured resolution of a point-target image.
ResolutionReport resolution_report(const PipelineConfig& c, const EchoData& echo, const Scene& scene,
                                   const ImageVolume& image);

enum class JobType { simulate, reconstruct, pipeline, dataset, psf };

std::string to_string(JobType t);
JobType job_type_from_string(const std::string& s);

/// Outcome of one engine run: arrays for the SARB result plus a JSON summary.
struct RunResult {
    std::vector<sarb::Array> arrays;
    Json summary;
};

/// simulate: {waveform, aperture, scene, noise?, gain?}
RunResult run_simulate(const Json& config, const std::filesystem::path& base_dir = {}, const ProgressFn& progress = {});
/// pipeline: simulate plus {grid?, algo?, reconstruction?}
RunResult run_pipeline(const Json& config, const std::filesystem::path& base_dir = {}, const ProgressFn& progress = {});
/// reconstruct an existing echo: {algo?, grid, reconstruction?}
RunResult run_reconstruct(const Json& config, const std::vector<sarb::Array>& echo,
                          const ProgressFn& progress = {});
/// pipeline plus a resolution report in `summary`.
RunResult run_psf(const Json& config, const std::filesystem::path& base_dir = {}, const ProgressFn& progress = {});

/// Hash identifying the result of a run of `type` on `config`.
std::string run_hash(JobType type, const Json& config);

}  // namespace sarlab
