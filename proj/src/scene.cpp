#include "sarlab/scene.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <tuple>

#include "sarlab/error.hpp"
#include "sarlab/random.hpp"

namespace sarlab {

static_assert(std::endian::native == std::endian::little, "STL and SARB readers assume a little-endian host");

namespace {

constexpr double kBoundsPad = 1e-6;

Box3 tight_bounds(const std::vector<Scatterer>& s) {
    Box3 b;
    for (const auto& p : s) b.extend(p.position);
    for (int a = 0; a < 3; ++a) {
        if (b.max()[a] - b.min()[a] <= 0.0) {
            b.min()[a] -= kBoundsPad;
            b.max()[a] += kBoundsPad;
        }
    }
    return b;
}

// --- STL -------------------------------------------------------------------

class MeshBuilder {
public:
    explicit MeshBuilder(double scale) : scale_(scale) {}

    void add_facet(const std::array<Vec3, 3>& v) {
        std::array<int, 3> idx{};
        for (int i = 0; i < 3; ++i) idx[static_cast<std::size_t>(i)] = vertex(v[static_cast<std::size_t>(i)] * scale_);
        if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) return;
        const Vec3 e1 = verts_[static_cast<std::size_t>(idx[1])] - verts_[static_cast<std::size_t>(idx[0])];
        const Vec3 e2 = verts_[static_cast<std::size_t>(idx[2])] - verts_[static_cast<std::size_t>(idx[0])];
        const double longest = std::max(e1.squaredNorm(), e2.squaredNorm());
        if (e1.cross(e2).norm() <= 1e-12 * longest) return;
        tris_.push_back(idx);
    }

    TriangleMesh finish() const {
        TriangleMesh m;
        // Drop vertices only referenced by discarded facets.
        std::vector<int> remap(verts_.size(), -1);
        std::vector<Vec3> used;
        for (const auto& t : tris_)
            for (int i : t)
                if (remap[static_cast<std::size_t>(i)] < 0) {
                    remap[static_cast<std::size_t>(i)] = static_cast<int>(used.size());
                    used.push_back(verts_[static_cast<std::size_t>(i)]);
                }
        m.vertices.resize(3, static_cast<Index>(used.size()));
        for (std::size_t i = 0; i < used.size(); ++i) m.vertices.col(static_cast<Index>(i)) = used[i];
        m.triangles.resize(3, static_cast<Index>(tris_.size()));
        for (std::size_t t = 0; t < tris_.size(); ++t)
            for (int i = 0; i < 3; ++i)
                m.triangles(i, static_cast<Index>(t)) = remap[static_cast<std::size_t>(tris_[t][static_cast<std::size_t>(i)])];
        return m;
    }

private:
    int vertex(const Vec3& p) {
        auto [it, inserted] = index_.try_emplace(std::make_tuple(p.x(), p.y(), p.z()), static_cast<int>(verts_.size()));
        if (inserted) verts_.push_back(p);
        return it->second;
    }

    double scale_;
    std::map<std::tuple<double, double, double>, int> index_;
    std::vector<Vec3> verts_;
    std::vector<std::array<int, 3>> tris_;
};

float read_f32(const std::byte* p) {
    float f;
    std::memcpy(&f, p, sizeof f);
    return f;
}

TriangleMesh parse_binary_stl(std::span<const std::byte> bytes, double scale) {
    if (bytes.size() < 84) throw ParseError("binary STL shorter than its 84-byte header", bytes.size());
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, sizeof count);
    const std::uint64_t need = 84 + 50ULL * count;
    if (bytes.size() < need)
        throw ParseError("binary STL declares " + std::to_string(count) + " facets but payload is truncated",
                         bytes.size());
    MeshBuilder builder(scale);
    for (std::uint32_t f = 0; f < count; ++f) {
        const std::byte* rec = bytes.data() + 84 + 50ULL * f;
        std::array<Vec3, 3> v;
        for (int i = 0; i < 3; ++i) {
            const std::byte* q = rec + 12 + 12 * i;
            v[static_cast<std::size_t>(i)] = Vec3(read_f32(q), read_f32(q + 4), read_f32(q + 8));
            if (!v[static_cast<std::size_t>(i)].allFinite())
                throw ParseError("non-finite vertex coordinate", static_cast<std::uint64_t>(q - bytes.data()));
        }
        builder.add_facet(v);
    }
    return builder.finish();
}

struct Token {
    std::string text;
    std::uint64_t offset;
};

std::vector<Token> tokenize(std::span<const std::byte> bytes) {
    std::vector<Token> out;
    std::size_t i = 0;
    const auto ch = [&](std::size_t k) { return static_cast<unsigned char>(bytes[k]); };
    while (i < bytes.size()) {
        while (i < bytes.size() && std::isspace(ch(i))) ++i;
        const std::size_t start = i;
        while (i < bytes.size() && !std::isspace(ch(i))) ++i;
        if (i > start) {
            std::string s(reinterpret_cast<const char*>(bytes.data() + start), i - start);
            out.push_back({std::move(s), start});
        }
    }
    return out;
}

TriangleMesh parse_ascii_stl(std::span<const std::byte> bytes, double scale) {
    const auto tokens = tokenize(bytes);
    std::size_t pos = 0;
    const auto fail = [&](const std::string& what) -> ParseError {
        const std::uint64_t off = pos < tokens.size() ? tokens[pos].offset : bytes.size();
        return ParseError("ASCII STL: " + what, off);
    };
    const auto expect = [&](const char* word) {
        if (pos >= tokens.size() || tokens[pos].text != word) throw fail(std::string("expected '") + word + "'");
        ++pos;
    };
    const auto number = [&]() {
        if (pos >= tokens.size()) throw fail("expected a number");
        try {
            std::size_t used = 0;
            const double v = std::stod(tokens[pos].text, &used);
            if (used != tokens[pos].text.size() || !std::isfinite(v)) throw fail("malformed number");
            ++pos;
            return v;
        } catch (const std::logic_error&) {
            throw fail("malformed number '" + tokens[pos].text + "'");
        }
    };

    expect("solid");
    // Optional solid name: everything up to the first "facet" or "endsolid".
    while (pos < tokens.size() && tokens[pos].text != "facet" && tokens[pos].text != "endsolid") ++pos;
    MeshBuilder builder(scale);
    while (pos < tokens.size() && tokens[pos].text == "facet") {
        ++pos;
        expect("normal");
        for (int i = 0; i < 3; ++i) number();
        expect("outer");
        expect("loop");
        std::array<Vec3, 3> v;
        for (auto& vert : v) {
            expect("vertex");
            const double x = number();
            const double y = number();
            const double z = number();
            vert = Vec3(x, y, z);
        }
        expect("endloop");
        expect("endfacet");
        builder.add_facet(v);
    }
    expect("endsolid");
    return builder.finish();
}

bool looks_ascii(std::span<const std::byte> bytes) {
    if (bytes.size() < 5 || std::memcmp(bytes.data(), "solid", 5) != 0) return false;
    if (bytes.size() >= 84) {
        std::uint32_t count = 0;
        std::memcpy(&count, bytes.data() + 80, sizeof count);
        if (84 + 50ULL * count == bytes.size()) return false;  // binary file whose header starts with "solid"
    }
    return true;
}

// --- Gaussian blur ------------------------------------------------------------

void blur_axis(Eigen::VectorXd& data, const std::vector<Index>& shape, Index axis, const Eigen::VectorXd& kernel) {
    const Index radius = (kernel.size() - 1) / 2;
    const Index len = shape[static_cast<std::size_t>(axis)];
    Index stride = 1;
    for (Index a = static_cast<Index>(shape.size()) - 1; a > axis; --a) stride *= shape[static_cast<std::size_t>(a)];
    const Index outer = data.size() / (len * stride);
    Eigen::VectorXd line(len);
    Eigen::VectorXd result(len);
    for (Index o = 0; o < outer; ++o) {
        for (Index s = 0; s < stride; ++s) {
            const Index base = o * len * stride + s;
            for (Index t = 0; t < len; ++t) line[t] = data[base + t * stride];
            for (Index t = 0; t < len; ++t) {
                double acc = 0.0;
                for (Index q = -radius; q <= radius; ++q) {
                    const Index src = t + q;
                    if (src >= 0 && src < len) acc += kernel[q + radius] * line[src];
                }
                result[t] = acc;
            }
            for (Index t = 0; t < len; ++t) data[base + t * stride] = result[t];
        }
    }
}

// --- mesh construction --------------------------------------------------------

// Prism from a convex polygon given in (x, y), extruded symmetrically along z.
void extrude_convex(const std::vector<Eigen::Vector2d>& poly, double half_thickness, std::vector<Vec3>& verts,
                    std::vector<std::array<int, 3>>& tris) {
    const int base = static_cast<int>(verts.size());
    const int n = static_cast<int>(poly.size());
    for (const auto& p : poly) verts.emplace_back(p.x(), p.y(), -half_thickness);
    for (const auto& p : poly) verts.emplace_back(p.x(), p.y(), half_thickness);
    for (int i = 1; i + 1 < n; ++i) {
        tris.push_back({base, base + i + 1, base + i});
        tris.push_back({base + n, base + n + i, base + n + i + 1});
    }
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        tris.push_back({base + i, base + j, base + n + j});
        tris.push_back({base + i, base + n + j, base + n + i});
    }
}

}  // namespace

Scene point_scene(std::vector<Scatterer> scatterers) {
    if (scatterers.empty()) throw ValidationError("scene needs at least one scatterer", "scene.points");
    for (const auto& s : scatterers) {
        if (!s.position.allFinite()) throw ValidationError("scatterer position must be finite", "scene.points");
        if (!std::isfinite(s.reflectivity.real()) || !std::isfinite(s.reflectivity.imag()))
            throw ValidationError("scatterer reflectivity must be finite", "scene.points");
    }
    Scene scene;
    scene.bounds = tight_bounds(scatterers);
    scene.scatterers = std::move(scatterers);
    return scene;
}

Scene merge(const Scene& a, const Scene& b) {
    std::vector<Scatterer> all = a.scatterers;
    all.insert(all.end(), b.scatterers.begin(), b.scatterers.end());
    return point_scene(std::move(all));
}

double TriangleMesh::triangle_area(Index t) const {
    const Vec3 a = vertices.col(triangles(0, t));
    const Vec3 b = vertices.col(triangles(1, t));
    const Vec3 c = vertices.col(triangles(2, t));
    return 0.5 * (b - a).cross(c - a).norm();
}

double TriangleMesh::area() const {
    double s = 0.0;
    for (Index t = 0; t < triangle_count(); ++t) s += triangle_area(t);
    return s;
}

Box3 TriangleMesh::bounds() const {
    Box3 b;
    for (Index i = 0; i < vertices.cols(); ++i) b.extend(Vec3(vertices.col(i)));
    return b;
}

TriangleMesh TriangleMesh::transformed(const Eigen::Affine3d& pose) const {
    TriangleMesh m = *this;
    m.vertices = pose * vertices;
    return m;
}

TriangleMesh import_stl(std::span<const std::byte> bytes, StlUnits units) {
    const double scale = units == StlUnits::millimeters ? 1e-3 : 1.0;
    TriangleMesh mesh = looks_ascii(bytes) ? parse_ascii_stl(bytes, scale) : parse_binary_stl(bytes, scale);
    return mesh;
}

TriangleMesh import_stl_file(const std::string& path, StlUnits units) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open STL file '" + path + "'");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return import_stl(std::as_bytes(std::span(raw)), units);
}

Scene mesh_to_scatterers(const TriangleMesh& mesh, double spacing, cd reflectivity, std::uint64_t seed) {
    if (!(std::isfinite(spacing) && spacing > 0.0)) throw ValidationError("spacing must be positive", "mesh.spacing");
    if (mesh.triangle_count() == 0) throw ValidationError("mesh has no triangles", "mesh");
    if (!(mesh.area() > 0.0)) throw ValidationError("mesh has zero surface area", "mesh");

    Rng rng(seed);
    const double density = 1.0 / (spacing * spacing);
    double carry = 0.0;
    std::vector<Scatterer> points;
    for (Index t = 0; t < mesh.triangle_count(); ++t) {
        carry += mesh.triangle_area(t) * density;
        const auto n = static_cast<Index>(std::floor(carry));
        carry -= static_cast<double>(n);
        const Vec3 a = mesh.vertices.col(mesh.triangles(0, t));
        const Vec3 b = mesh.vertices.col(mesh.triangles(1, t));
        const Vec3 c = mesh.vertices.col(mesh.triangles(2, t));
        for (Index i = 0; i < n; ++i) {
            const double r1 = std::sqrt(rng.uniform());
            const double r2 = rng.uniform();
            points.push_back({(1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c, reflectivity});
        }
    }
    if (points.empty()) throw ValidationError("spacing too coarse: mesh produced no scatterers", "mesh.spacing");
    return point_scene(std::move(points));
}

Scene polyline_scene(const std::vector<std::vector<Vec3>>& polylines, double spacing, cd reflectivity) {
    if (!(std::isfinite(spacing) && spacing > 0.0)) throw ValidationError("spacing must be positive", "shape.spacing");
    std::vector<Scatterer> points;
    for (const auto& line : polylines) {
        if (line.empty()) continue;
        points.push_back({line.front(), reflectivity});
        for (std::size_t i = 1; i < line.size(); ++i) {
            const Vec3 seg = line[i] - line[i - 1];
            const auto n = std::max<Index>(1, static_cast<Index>(std::ceil(seg.norm() / spacing)));
            for (Index s = 1; s <= n; ++s)
                points.push_back({line[i - 1] + seg * (static_cast<double>(s) / static_cast<double>(n)), reflectivity});
        }
    }
    return point_scene(std::move(points));
}

std::vector<std::vector<Vec3>> text_polylines(const std::string& text, double height, double origin_y,
                                              double origin_z) {
    const double w = 0.6 * height;
    const double advance = 0.8 * height;
    std::vector<std::vector<Vec3>> out;
    double cursor = origin_y;
    for (char ch : text) {
        // Glyph strokes in units of (width, height).
        std::vector<std::vector<std::array<double, 2>>> strokes;
        switch (std::toupper(static_cast<unsigned char>(ch))) {
            case 'U': strokes = {{{0, 1}, {0, 0.2}, {0.2, 0}, {0.8, 0}, {1, 0.2}, {1, 1}}}; break;
            case 'T': strokes = {{{0, 1}, {1, 1}}, {{0.5, 1}, {0.5, 0}}}; break;
            case 'D': strokes = {{{0, 0}, {0, 1}, {0.6, 1}, {1, 0.7}, {1, 0.3}, {0.6, 0}, {0, 0}}}; break;
            case ' ': break;
            default: throw ValidationError(std::string("unsupported glyph '") + ch + "'", "scene.text");
        }
        for (const auto& s : strokes) {
            std::vector<Vec3> line;
            for (const auto& p : s) line.emplace_back(0.0, cursor + p[0] * w, origin_z + p[1] * height);
            out.push_back(std::move(line));
        }
        cursor += advance;
    }
    return out;
}

TriangleMesh knife_mesh(double length) {
    const double L = length;
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
    // Profile in the x-y plane: handle below, blade above, tip at +y.
    extrude_convex({{-0.06 * L, -0.5 * L}, {0.06 * L, -0.5 * L}, {0.06 * L, -0.1 * L}, {-0.06 * L, -0.1 * L}},
                   0.0125 * L, verts, tris);
    extrude_convex({{-0.07 * L, -0.1 * L}, {0.05 * L, -0.1 * L}, {0.05 * L, 0.5 * L}, {-0.04 * L, 0.3 * L}},
                   0.002 * L, verts, tris);
    TriangleMesh m;
    m.vertices.resize(3, static_cast<Index>(verts.size()));
    for (std::size_t i = 0; i < verts.size(); ++i) m.vertices.col(static_cast<Index>(i)) = verts[i];
    m.triangles.resize(3, static_cast<Index>(tris.size()));
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int i = 0; i < 3; ++i) m.triangles(i, static_cast<Index>(t)) = tris[t][static_cast<std::size_t>(i)];
    const Vec3 centre = m.bounds().center();
    m.vertices.colwise() -= centre;
    return m;
}

Index splat_magnitudes(const Scene& scene, const GridSpec& grid, Eigen::Ref<Eigen::VectorXd> out, RasterMode mode) {
    grid.validate();
    const Index dims = grid.dims();
    const auto shape = grid.shape();
    Index clipped = 0;
    for (const auto& s : scene.scatterers) {
        std::array<Index, 3> lo{};
        std::array<double, 3> frac{};
        bool inside = true;
        for (Index a = 0; a < dims; ++a) {
            const auto& ax = grid.axes[static_cast<std::size_t>(a)];
            const double f = (s.position[grid.coord(a)] - ax.min) / ax.spacing();
            const double top = static_cast<double>(ax.count - 1);
            if (f < -1e-9 || f > top + 1e-9) {
                inside = false;
                break;
            }
            const double fc = std::clamp(f, 0.0, top);
            const Index i0 = std::min<Index>(static_cast<Index>(std::floor(fc)), ax.count - 2);
            lo[static_cast<std::size_t>(a)] = i0;
            frac[static_cast<std::size_t>(a)] = fc - static_cast<double>(i0);
        }
        if (!inside) {
            if (mode == RasterMode::strict)
                throw ValidationError("scatterer lies outside the ground-truth grid", "grid");
            ++clipped;
            continue;
        }
        const double mag = std::abs(s.reflectivity);
        for (Index corner = 0; corner < (Index{1} << dims); ++corner) {
            double w = mag;
            std::vector<Index> idx(static_cast<std::size_t>(dims));
            for (Index a = 0; a < dims; ++a) {
                const bool up = (corner >> a) & 1;
                const auto ua = static_cast<std::size_t>(a);
                idx[ua] = lo[ua] + (up ? 1 : 0);
                w *= up ? frac[ua] : 1.0 - frac[ua];
            }
            if (w != 0.0) out[ravel(idx, shape)] += w;
        }
    }
    return clipped;
}

GroundTruth rasterize_ground_truth(const Scene& scene, const GridSpec& grid, double sigma_vox, RasterMode mode) {
    if (!(std::isfinite(sigma_vox) && sigma_vox >= 0.0))
        throw ValidationError("sigma_vox must be >= 0", "label_sigma_vox");
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(grid.size());
    GroundTruth gt;
    gt.clipped = splat_magnitudes(scene, grid, mass, mode);
    if (sigma_vox > 0.0) {
        const auto radius = static_cast<Index>(std::ceil(4.0 * sigma_vox));
        Eigen::VectorXd kernel(2 * radius + 1);
        for (Index q = -radius; q <= radius; ++q)
            kernel[q + radius] = std::exp(-0.5 * static_cast<double>(q * q) / (sigma_vox * sigma_vox));
        kernel /= kernel.sum();
        const auto shape = grid.shape();
        for (Index a = 0; a < grid.dims(); ++a) blur_axis(mass, shape, a, kernel);
    }
    const double peak = mass.maxCoeff();
    if (peak > 0.0) mass /= peak;
    gt.image = ImageVolume(grid, "ground-truth");
    gt.image.voxels = mass.cast<cd>();
    return gt;
}

Scene random_scene(std::uint64_t seed, Index n_points, const Box3& bounds, const MeshLibrary* library) {
    if (n_points < 0) throw ValidationError("n_points must be >= 0", "scene.n_points");
    if (!bounds.min().allFinite() || !bounds.max().allFinite() || (bounds.max() - bounds.min()).minCoeff() < 0.0)
        throw ValidationError("bounds must be finite with min <= max", "scene.bounds");
    const bool use_mesh = library != nullptr && !library->meshes.empty();
    if (n_points == 0 && !use_mesh) throw ValidationError("random scene would be empty", "scene");

    Rng rng(seed);
    const Vec3 extent = bounds.max() - bounds.min();
    std::vector<Scatterer> points;
    points.reserve(static_cast<std::size_t>(n_points));
    for (Index i = 0; i < n_points; ++i) {
        Vec3 p;
        for (int a = 0; a < 3; ++a) p[a] = bounds.min()[a] + extent[a] * rng.uniform();
        const double mag = rng.uniform(0.5, 1.0);
        const double phase = rng.uniform(0.0, kTwoPi);
        points.push_back({p, std::polar(mag, phase)});
    }

    if (use_mesh) {
        const auto& mesh = library->meshes[static_cast<std::size_t>(rng.below(library->meshes.size()))];
        std::array<bool, 3> flat{};
        int n_flat = 0;
        for (int a = 0; a < 3; ++a) n_flat += (flat[static_cast<std::size_t>(a)] = extent[a] <= 0.0);

        Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
        if (n_flat == 0) {
            // Uniform random rotation (Shoemake).
            const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
            const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(kTwoPi * u3), std::sqrt(1 - u1) * std::sin(kTwoPi * u2),
                                       std::sqrt(1 - u1) * std::cos(kTwoPi * u2), std::sqrt(u1) * std::sin(kTwoPi * u3));
            rot = q.normalized().toRotationMatrix();
        } else if (n_flat == 1) {
            const int axis = flat[0] ? 0 : (flat[1] ? 1 : 2);
            rot = Eigen::AngleAxisd(rng.uniform(0.0, kTwoPi), Vec3::Unit(axis)).toRotationMatrix();
        }
        const double mag = rng.uniform(0.5, 1.0);
        const double phase = rng.uniform(0.0, kTwoPi);
        const std::uint64_t sample_seed = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);

        Eigen::Affine3d pose = Eigen::Affine3d::Identity();
        pose.linear() = rot;
        TriangleMesh posed = mesh.transformed(pose);
        const Box3 mb = posed.bounds();
        Vec3 shift;
        for (int a = 0; a < 3; ++a) {
            const double size = mb.max()[a] - mb.min()[a];
            if (flat[static_cast<std::size_t>(a)]) {
                shift[a] = 0.0;
                continue;
            }
            if (size > extent[a]) throw ValidationError("mesh does not fit inside the scene bounds", "scene.meshes");
            shift[a] = bounds.min()[a] - mb.min()[a] + (extent[a] - size) * rng.uniform();
        }
        Scene surf = mesh_to_scatterers(posed, library->spacing, std::polar(mag, phase), sample_seed);
        for (auto& s : surf.scatterers) {
            s.position += shift;
            for (int a = 0; a < 3; ++a)
                if (flat[static_cast<std::size_t>(a)]) s.position[a] = bounds.min()[a];
            points.push_back(s);
        }
    }
    return point_scene(std::move(points));
}

}  // namespace sarlab
