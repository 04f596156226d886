#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sarlab/grid.hpp"

namespace sarlab {

/// Rectilinear resolution limits, m. Cross-range entries are absent for a
/// zero aperture extent.
struct PlanarResolution {
    std::optional<double> dx;
    std::optional<double> dy;
    double dz = 0.0;
};

/// dx = lambda_c Zref / (2 Dx), dy = lambda_c Zref / (2 Dy), dz = c / (2 B).
PlanarResolution planar_resolution(double lambda_c, double zref, double dx_extent, double dy_extent, double bandwidth);

struct CylindricalResolution {
    std::optional<double> dy;
    double drho = 0.0;
};

/// dy = lambda_c R0 / (2 Dy), drho = 2.4 / (k_max + k_min).
CylindricalResolution cylindrical_resolution(double lambda_c, double r0, double dy_extent, double kmin, double kmax);

/// -3 dB (1/sqrt(2) magnitude) mainlobe width along every grid axis through
/// the peak, m. Crossings are linearly interpolated between samples.
std::vector<double> psf_widths(const ImageVolume& image, std::optional<Index> peak = std::nullopt);

/// Flat index of the largest-magnitude voxel.
Index argmax_voxel(const ImageVolume& image);

struct ImageComparison {
    double ncc = 0.0;   // Pearson correlation of the peak-normalised magnitudes
    double rmse = 0.0;  // RMS difference of the peak-normalised magnitudes
    std::vector<Index> peak_offset;  // argmax(b) - argmax(a) per axis, voxels
};

ImageComparison image_compare(const ImageVolume& a, const ImageVolume& b);

struct ResolutionReport {
    std::map<std::string, double> predicted;  // dx, dy, dz, drho (m)
    std::map<std::string, double> measured;
    std::map<std::string, double> config;     // lambdaC, Zref, Dx, Dy, B, R0, kmin, kmax

    std::string to_json() const;
};

}  // namespace sarlab
