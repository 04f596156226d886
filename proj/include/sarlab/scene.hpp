#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "sarlab/grid.hpp"
#include "sarlab/types.hpp"

namespace sarlab {

struct Scatterer {
    Vec3 position = Vec3::Zero();  // m
    cd reflectivity{1.0, 0.0};
};

using Box3 = Eigen::AlignedBox3d;

/// Point-scatterer target scene. Bounds always enclose every scatterer.
struct Scene {
    std::vector<Scatterer> scatterers;
    Box3 bounds;

    Index size() const { return static_cast<Index>(scatterers.size()); }
};

/// Builds a scene with tight bounds (degenerate extents padded by 1 um).
Scene point_scene(std::vector<Scatterer> scatterers);
/// Union of two scenes.
Scene merge(const Scene& a, const Scene& b);

struct TriangleMesh {
    Eigen::Matrix3Xd vertices;   // m
    Eigen::Matrix3Xi triangles;  // vertex indices, one triangle per column

    Index triangle_count() const { return triangles.cols(); }
    double triangle_area(Index t) const;
    double area() const;
    Box3 bounds() const;
    TriangleMesh transformed(const Eigen::Affine3d& pose) const;
};

enum class StlUnits { millimeters, meters };

/// Parses binary or ASCII STL. Coordinates are scaled to meters according to
/// `units`; coincident vertices are merged and zero-area facets dropped.
TriangleMesh import_stl(std::span<const std::byte> bytes, StlUnits units = StlUnits::millimeters);
TriangleMesh import_stl_file(const std::string& path, StlUnits units = StlUnits::millimeters);

/// Surface sampling with areal density 1/spacing^2. Per-triangle counts use
/// error diffusion, so the total is within one point of area/spacing^2;
/// positions inside each triangle are uniform and depend only on `seed`.
Scene mesh_to_scatterers(const TriangleMesh& mesh, double spacing, cd reflectivity, std::uint64_t seed = 0);

/// Scatterers spaced along polylines (2-D shapes and text).
Scene polyline_scene(const std::vector<std::vector<Vec3>>& polylines, double spacing, cd reflectivity);

/// Stroke outlines of `text` (letters U, T, D, plus space) in the y-z plane at
/// x = 0, `height` tall, lower-left corner at (origin_y, origin_z). Text runs
/// along y; letter height runs along z.
std::vector<std::vector<Vec3>> text_polylines(const std::string& text, double height, double origin_y, double origin_z);

/// Procedural kitchen-knife mesh (blade + handle), length along y, ~`length` m long,
/// centred on the origin.
TriangleMesh knife_mesh(double length = 0.2);

enum class RasterMode { strict, lenient };

struct GroundTruth {
    ImageVolume image;
    Index clipped = 0;  // scatterers dropped in lenient mode
};

/// Adds |reflectivity| of every scatterer to the voxels of `grid` with
/// trilinear (bilinear for 2-D) weights. Points in 2-D grids are projected
/// onto the y-z plane. Returns the number of scatterers outside the grid.
Index splat_magnitudes(const Scene& scene, const GridSpec& grid, Eigen::Ref<Eigen::VectorXd> out,
                       RasterMode mode = RasterMode::strict);

/// Ground-truth label: splat, isotropic Gaussian blur (std in voxels), peak-normalised to 1.
GroundTruth rasterize_ground_truth(const Scene& scene, const GridSpec& grid, double sigma_vox = 1.0,
                                   RasterMode mode = RasterMode::strict);

struct MeshLibrary {
    std::vector<TriangleMesh> meshes;
    double spacing = 1e-3;  // surface sampling spacing, m
};

/// Random scene: `n_points` scatterers uniform in `bounds` with |reflectivity|
/// ~ U[0.5, 1] and phase ~ U[0, 2pi); when `library` is non-empty one mesh is
/// drawn and placed with a random rigid pose fully inside `bounds`. Degenerate
/// bound extents (2-D scenes) restrict rotation to that axis and flatten the mesh.
Scene random_scene(std::uint64_t seed, Index n_points, const Box3& bounds, const MeshLibrary* library = nullptr);

}  // namespace sarlab
