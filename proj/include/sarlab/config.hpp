#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <json.hpp>

#include "sarlab/aperture.hpp"
#include "sarlab/grid.hpp"
#include "sarlab/reconstruction.hpp"
#include "sarlab/scene.hpp"
#include "sarlab/waveform.hpp"

namespace sarlab {

using Json = nlohmann::json;

/// Aperture block. Spacings may be given in metres (`dx`, `dy`) or as a
/// fraction of the centre wavelength (`dx_lambda`, `dy_lambda`).
struct ApertureConfig {
    ApertureKind kind = ApertureKind::linear;
    Index nx = 1;
    Index ny = 1;
    Index ntheta = 1;
    double dx = 0.0;
    double dy = 0.0;
    double R0 = 0.0;
    double Z0 = 0.0;
    Eigen::Matrix3Xd positions;  // irregular only
};

struct MeshConfig {
    std::string path;     // STL file, relative to the config directory
    std::string builtin;  // "knife"
    double length = 0.2;  // builtin size, m
    double spacing = 1e-3;
    StlUnits units = StlUnits::millimeters;
    Eigen::Affine3d pose = Eigen::Affine3d::Identity();
    cd reflectivity{1.0, 0.0};
    std::uint64_t seed = 0;
};

struct TextConfig {
    std::string text;
    double height = 0.0;
    double origin_y = 0.0;
    double origin_z = 0.0;
    double spacing = 1e-3;
    cd reflectivity{1.0, 0.0};
};

struct SceneConfig {
    std::vector<Scatterer> points;
    std::vector<MeshConfig> meshes;
    std::vector<TextConfig> text;
};

struct GridConfig {
    std::optional<GridSpec> explicit_grid;
    double margin = 5e-3;   // auto grid: padding around the scene bounds, m
    Index max_count = 128;  // auto grid: cap per axis
};

/// Everything a simulate / pipeline / psf run needs.
struct PipelineConfig {
    Waveform waveform;
    ApertureConfig aperture;
    SceneConfig scene;
    GridConfig grid;
    std::string algo;  // empty: default for the aperture kind
    RmaOptions rma;
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 0;
    std::string gain_csv;  // path, relative to the config directory
    std::filesystem::path base_dir;
    Json source;
};

/// Parses a JSON document; syntax errors carry the byte offset.
Json parse_json(const std::string& text);
Json load_json_file(const std::filesystem::path& path);

/// SHA-256 of the canonical (sorted-key, compact) serialisation.
std::string config_hash(const Json& config);

Waveform parse_waveform(const Json& j, const std::string& path = "waveform");
Json waveform_to_json(const Waveform& w);
ApertureConfig parse_aperture(const Json& j, double lambda_c, const std::string& path = "aperture");
SceneConfig parse_scene(const Json& j, const std::string& path = "scene");
GridSpec parse_grid_spec(const Json& j, const std::string& path = "grid");
GridConfig parse_grid(const Json& j, const std::string& path = "grid");
Json grid_to_json(const GridSpec& g);
RmaOptions parse_rma(const Json& j, const std::string& path = "reconstruction");

/// Validates and parses a full pipeline configuration. `require_scene` is
/// false for runs that only need the system description.
PipelineConfig parse_pipeline(const Json& j, const std::filesystem::path& base_dir = {}, bool require_scene = true);

/// Centre wavelength of a waveform's band.
double center_wavelength(const Waveform& w);

}  // namespace sarlab
