#include "sarlab/engine.hpp"

#include <cmath>

#include "sarlab/digest.hpp"
#include "sarlab/error.hpp"

namespace sarlab {

namespace {

sarb::Array f64_array(std::string name, std::vector<std::int64_t> shape, std::vector<double> v) {
    return {std::move(name), std::move(shape), std::move(v)};
}

ProgressFn scaled(const ProgressFn& p, double lo, double hi) {
    if (!p) return {};
    return [p, lo, hi](double f) { p(lo + (hi - lo) * f); };
}

std::vector<std::int64_t> to_shape(const std::vector<Index>& s) { return {s.begin(), s.end()}; }

Json summary_of(const Reconstruction& r, const std::string& algo, const std::string& hash) {
    return {{"algo", algo}, {"shape", r.image.shape()}, {"grid", grid_to_json(r.image.grid)}, {"config_hash", hash}};
}

struct PipelineRun {
    PipelineConfig config;
    Scene scene;
    EchoData echo;
    Reconstruction recon;
    std::string algo;
};

PipelineRun pipeline(const Json& config, const std::filesystem::path& base_dir, const ProgressFn& progress) {
    PipelineRun run{parse_pipeline(config, base_dir), {}, {}, {}, {}};
    run.scene = build_scene(run.config.scene, base_dir);
    run.echo = simulate(run.config, run.scene, scaled(progress, 0.0, 0.5));
    const GridSpec grid = resolve_grid(run.config.grid, run.echo, run.scene);
    run.algo = run.config.algo.empty() ? default_algorithm(run.echo.aperture_kind) : run.config.algo;
    run.recon = reconstruct(run.algo, run.echo, grid, run.config.rma, scaled(progress, 0.5, 1.0));
    return run;
}

}  // namespace

Aperture build_aperture(const ApertureConfig& c) {
    switch (c.kind) {
        case ApertureKind::linear: return linear_aperture(c.ny, c.dy, c.Z0);
        case ApertureKind::planar: return planar_aperture(c.nx, c.ny, c.dx, c.dy, c.Z0);
        case ApertureKind::circular: return circular_aperture(c.ntheta, c.R0);
        case ApertureKind::cylindrical: return cylindrical_aperture(c.ntheta, c.ny, c.dy, c.R0);
        case ApertureKind::irregular: return irregular_aperture(c.positions);
    }
    throw ValidationError("unknown aperture kind", "aperture.kind");
}

Scene build_scene(const SceneConfig& c, const std::filesystem::path& base_dir) {
    std::vector<Scatterer> all = c.points;
    auto append = [&](const Scene& s) { all.insert(all.end(), s.scatterers.begin(), s.scatterers.end()); };
    for (const auto& m : c.meshes) {
        TriangleMesh mesh = m.builtin == "knife" ? knife_mesh(m.length)
                                                 : import_stl_file((base_dir / m.path).string(), m.units);
        append(mesh_to_scatterers(mesh.transformed(m.pose), m.spacing, m.reflectivity, m.seed));
    }
    for (const auto& t : c.text)
        append(polyline_scene(text_polylines(t.text, t.height, t.origin_y, t.origin_z), t.spacing, t.reflectivity));
    return point_scene(std::move(all));
}

GridSpec resolve_grid(const GridConfig& c, const EchoData& echo, const Scene& scene) {
    if (c.explicit_grid) {
        c.explicit_grid->validate();
        return *c.explicit_grid;
    }
    Box3 region = scene.bounds;
    region.min().array() -= c.margin;
    region.max().array() += c.margin;
    return default_grid(echo, region, c.max_count);
}

EchoData simulate(const PipelineConfig& c, const Scene& scene, const ProgressFn& progress) {
    const Aperture aperture = build_aperture(c.aperture);
    const FrequencyAxis freq = frequency_axis(band_of(c.waveform));
    std::optional<GainPattern> gain;
    if (!c.gain_csv.empty()) gain = GainPattern::load_csv((c.base_dir / c.gain_csv).string());
    SimulateOptions opt;
    opt.gain = gain ? &*gain : nullptr;
    opt.progress = progress;
    EchoData echo = simulate_echo(aperture, scene, freq, opt);
    if (c.snr_db) echo = add_noise(echo, *c.snr_db, c.noise_seed);
    return echo;
}

sarb::Array hash_array(const std::string& hex, const std::string& name) {
    const auto w = digest_words(hex);
    return {name, {4}, std::vector<std::int64_t>(w.begin(), w.end())};
}

std::string hash_from_arrays(const std::vector<sarb::Array>& arrays, const std::string& name) {
    const auto* a = sarb::find_if(arrays, name);
    if (!a) return {};
    const auto& v = a->as<std::int64_t>();
    if (v.size() != 4) throw ValidationError("must hold 4 words", name);
    return digest_from_words({v[0], v[1], v[2], v[3]});
}

std::vector<sarb::Array> echo_arrays(const EchoData& echo, const std::string& hash) {
    echo.validate();
    const Index n = echo.elements();
    const Index nf = echo.frequencies();
    std::vector<sarb::Array> out;

    std::vector<cd> s(static_cast<std::size_t>(n * nf));
    Eigen::Map<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(s.data(), n, nf) = echo.samples;
    out.push_back({"echo", {n, nf}, std::move(s)});

    const auto& f = echo.freq.values();
    out.push_back(f64_array("freq", {nf}, {f.data(), f.data() + nf}));

    std::vector<double> p(static_cast<std::size_t>(3 * n));
    Eigen::Map<Eigen::Matrix3Xd>(p.data(), 3, n) = echo.positions;  // column-major 3xN == row-major Nx3
    out.push_back(f64_array("positions", {n, 3}, std::move(p)));

    out.push_back({"aperture_kind", {}, std::vector<std::int64_t>{static_cast<std::int64_t>(echo.aperture_kind)}});
    if (echo.aperture_meta) {
        const auto& m = *echo.aperture_meta;
        out.push_back(f64_array("aperture_meta", {8},
                                {m.dx, m.dy, m.dtheta, m.R0, m.Z0, static_cast<double>(m.nx), static_cast<double>(m.ny),
                                 static_cast<double>(m.ntheta)}));
    }
    if (!hash.empty()) out.push_back(hash_array(hash));
    return out;
}

EchoData echo_from_arrays(const std::vector<sarb::Array>& arrays) {
    const auto& e = sarb::find(arrays, "echo");
    const auto& f = sarb::find(arrays, "freq");
    const auto& p = sarb::find(arrays, "positions");
    if (e.dtype() != sarb::DType::c128 || e.shape.size() != 2) throw ValidationError("must be c128 [N_el, N_f]", "echo");
    if (f.dtype() != sarb::DType::f64 || f.shape.size() != 1) throw ValidationError("must be f64 [N_f]", "freq");
    if (p.dtype() != sarb::DType::f64 || p.shape.size() != 2 || p.shape[1] != 3)
        throw ValidationError("must be f64 [N_el, 3]", "positions");
    const Index n = e.shape[0];
    const Index nf = e.shape[1];

    EchoData echo;
    echo.samples = Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        e.as<cd>().data(), n, nf);
    echo.freq = FrequencyAxis(Eigen::Map<const Eigen::VectorXd>(f.as<double>().data(), f.shape[0]));
    echo.positions = Eigen::Map<const Eigen::Matrix3Xd>(p.as<double>().data(), 3, p.shape[0]);
    if (const auto* k = sarb::find_if(arrays, "aperture_kind")) {
        const auto v = k->as<std::int64_t>().at(0);
        if (v < 0 || v > static_cast<std::int64_t>(ApertureKind::irregular))
            throw ValidationError("unknown aperture kind", "aperture_kind");
        echo.aperture_kind = static_cast<ApertureKind>(v);
    }
    if (const auto* m = sarb::find_if(arrays, "aperture_meta")) {
        const auto& v = m->as<double>();
        if (v.size() != 8) throw ValidationError("must hold 8 values", "aperture_meta");
        echo.aperture_meta = UniformMeta{v[0], v[1], v[2], v[3], v[4], static_cast<Index>(v[5]),
                                         static_cast<Index>(v[6]), static_cast<Index>(v[7])};
    }
    echo.validate();
    return echo;
}

sarb::Array grid_array(const GridSpec& g) {
    std::vector<double> v;
    for (const auto& a : g.axes) v.insert(v.end(), {a.min, a.max, static_cast<double>(a.count)});
    return f64_array("grid", {g.dims(), 3}, std::move(v));
}

GridSpec grid_from_arrays(const std::vector<sarb::Array>& arrays) {
    const auto& a = sarb::find(arrays, "grid");
    if (a.dtype() != sarb::DType::f64 || a.shape.size() != 2 || a.shape[1] != 3 || (a.shape[0] != 2 && a.shape[0] != 3))
        throw ValidationError("must be f64 [2|3, 3]", "grid");
    const auto& v = a.as<double>();
    std::vector<GridAxis> axes;
    for (std::size_t i = 0; i < static_cast<std::size_t>(a.shape[0]); ++i)
        axes.push_back({v[3 * i], v[3 * i + 1], static_cast<Index>(v[3 * i + 2])});
    GridSpec g{axes, 0.0};
    if (const auto* px = sarb::find_if(arrays, "grid_plane_x")) g.plane_x = px->as<double>().at(0);
    g.validate();
    return g;
}

std::vector<sarb::Array> image_arrays(const Reconstruction& r, const std::string& hash) {
    std::vector<sarb::Array> out;
    const auto& img = r.image;
    out.push_back({"image", to_shape(img.shape()),
                   std::vector<cd>(img.voxels.data(), img.voxels.data() + img.voxels.size())});
    out.push_back(grid_array(img.grid));
    out.push_back(f64_array("grid_plane_x", {}, {img.grid.plane_x}));
    for (const auto& st : r.stages) {
        out.push_back({st.stage, to_shape(st.spectrum.shape),
                       std::vector<cd>(st.spectrum.data.data(), st.spectrum.data.data() + st.spectrum.size())});
        for (std::size_t a = 0; a < st.axes.size(); ++a) {
            const auto& ax = st.axes[a];
            out.push_back(f64_array(st.stage + "." + st.axis_names[a], {ax.size()}, {ax.data(), ax.data() + ax.size()}));
        }
    }
    if (!hash.empty()) out.push_back(hash_array(hash));
    return out;
}

ImageVolume image_from_arrays(const std::vector<sarb::Array>& arrays) {
    ImageVolume img(grid_from_arrays(arrays));
    const auto& a = sarb::find(arrays, "image");
    if (a.dtype() != sarb::DType::c128) throw ValidationError("must be c128", "image");
    if (to_shape(img.shape()) != a.shape) throw ValidationError("shape does not match the grid", "image");
    img.voxels = Eigen::Map<const Eigen::VectorXcd>(a.as<cd>().data(), static_cast<Index>(a.size()));
    img.config_hash = hash_from_arrays(arrays);
    return img;
}

sarb::Array scene_array(const Scene& s, const std::string& name) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(5 * s.size()));
    for (const auto& t : s.scatterers)
        v.insert(v.end(), {t.position.x(), t.position.y(), t.position.z(), t.reflectivity.real(), t.reflectivity.imag()});
    return f64_array(name, {s.size(), 5}, std::move(v));
}

ResolutionReport resolution_report(const PipelineConfig& c, const EchoData& echo, const Scene& scene,
                                   const ImageVolume& image) {
    ResolutionReport rep;
    const auto& f = echo.freq.values();
    const double bandwidth = f[f.size() - 1] - f[0];
    const double lambda_c = kSpeedOfLight / (0.5 * (f[0] + f[f.size() - 1]));
    const auto ext = aperture_extent(echo.aperture());
    const std::vector<double> w = psf_widths(image);
    Vec3 centroid = Vec3::Zero();
    for (const auto& t : scene.scatterers) centroid += t.position;
    centroid /= static_cast<double>(scene.size());

    rep.config["lambdaC"] = lambda_c;
    rep.config["B"] = bandwidth;
    rep.config["Dx"] = ext.dx;
    rep.config["Dy"] = ext.dy;
    for (Index a = 0; a < image.grid.dims(); ++a)
        rep.measured[std::string("d") + "xyz"[image.grid.coord(a)]] = w[static_cast<std::size_t>(a)];

    switch (c.aperture.kind) {
        case ApertureKind::linear:
        case ApertureKind::planar: {
            const double zref = std::abs(centroid.z() - c.aperture.Z0);
            rep.config["Zref"] = zref;
            const auto r = planar_resolution(lambda_c, zref, ext.dx, ext.dy, bandwidth);
            if (r.dx && image.grid.has_coord(0)) rep.predicted["dx"] = *r.dx;
            if (r.dy) rep.predicted["dy"] = *r.dy;
            rep.predicted["dz"] = r.dz;
            break;
        }
        case ApertureKind::circular:
        case ApertureKind::cylindrical: {
            const double kmin = wavenumber(f[0]);
            const double kmax = wavenumber(f[f.size() - 1]);
            rep.config["R0"] = c.aperture.R0;
            rep.config["kmin"] = kmin;
            rep.config["kmax"] = kmax;
            const auto r = cylindrical_resolution(lambda_c, c.aperture.R0, ext.dy, kmin, kmax);
            rep.predicted["drho"] = r.drho;
            if (c.aperture.kind == ApertureKind::cylindrical) {
                if (r.dy) rep.predicted["dy"] = *r.dy;
                rep.measured["drho"] = 0.5 * (rep.measured["dx"] + rep.measured["dz"]);
            } else {
                rep.measured["drho"] = 0.5 * (rep.measured["dy"] + rep.measured["dz"]);
            }
            break;
        }
        case ApertureKind::irregular: rep.predicted["dz"] = kSpeedOfLight / (2.0 * bandwidth); break;
    }
    return rep;
}

std::string to_string(JobType t) {
    switch (t) {
        case JobType::simulate: return "simulate";
        case JobType::reconstruct: return "reconstruct";
        case JobType::pipeline: return "pipeline";
        case JobType::dataset: return "dataset";
        case JobType::psf: return "psf";
    }
    return "?";
}

JobType job_type_from_string(const std::string& s) {
    if (s == "simulate") return JobType::simulate;
    if (s == "reconstruct") return JobType::reconstruct;
    if (s == "pipeline") return JobType::pipeline;
    if (s == "dataset") return JobType::dataset;
    if (s == "psf") return JobType::psf;
    throw ValidationError("must be one of simulate, reconstruct, pipeline, dataset, psf", "type");
}

std::string run_hash(JobType type, const Json& config) { return sha256_hex(to_string(type) + "\n" + config.dump()); }

RunResult run_simulate(const Json& config, const std::filesystem::path& base_dir, const ProgressFn& progress) {
    const PipelineConfig c = parse_pipeline(config, base_dir);
    const Scene scene = build_scene(c.scene, base_dir);
    const EchoData echo = simulate(c, scene, progress);
    const std::string hash = run_hash(JobType::simulate, config);
    RunResult out{echo_arrays(echo, hash), {}};
    out.arrays.push_back(scene_array(scene));
    out.summary = {{"elements", echo.elements()}, {"frequencies", echo.frequencies()}, {"scatterers", scene.size()},
                   {"config_hash", hash}};
    if (const auto w = spacing_warning(echo.aperture(), center_wavelength(c.waveform))) out.summary["warning"] = *w;
    if (progress) progress(1.0);
    return out;
}

RunResult run_pipeline(const Json& config, const std::filesystem::path& base_dir, const ProgressFn& progress) {
    const PipelineRun run = pipeline(config, base_dir, progress);
    const std::string hash = run_hash(JobType::pipeline, config);
    return {image_arrays(run.recon, hash), summary_of(run.recon, run.algo, hash)};
}

RunResult run_reconstruct(const Json& config, const std::vector<sarb::Array>& echo_in, const ProgressFn& progress) {
    if (!config.is_object()) throw ValidationError("must be an object", "config");
    const EchoData echo = echo_from_arrays(echo_in);
    if (!config.contains("grid")) throw ValidationError("is required", "grid");
    const GridSpec grid = parse_grid_spec(config["grid"], "grid");
    grid.validate();
    std::string algo = default_algorithm(echo.aperture_kind);
    if (config.contains("algo")) {
        if (!config["algo"].is_string()) throw ValidationError("must be a string", "algo");
        algo = config["algo"].get<std::string>();
    }
    const RmaOptions opt = config.contains("reconstruction") ? parse_rma(config["reconstruction"]) : RmaOptions{};
    Json keyed = config;
    keyed["echo_sha256"] = sha256_hex(sarb::encode(echo_in));
    const std::string hash = run_hash(JobType::reconstruct, keyed);
    Reconstruction r = reconstruct(algo, echo, grid, opt, progress);
    r.image.config_hash = hash;
    return {image_arrays(r, hash), summary_of(r, algo, hash)};
}

RunResult run_psf(const Json& config, const std::filesystem::path& base_dir, const ProgressFn& progress) {
    const PipelineRun run = pipeline(config, base_dir, progress);
    const std::string hash = run_hash(JobType::psf, config);
    const ResolutionReport rep = resolution_report(run.config, run.echo, run.scene, run.recon.image);
    RunResult out{image_arrays(run.recon, hash), Json::parse(rep.to_json())};
    std::vector<double> widths = psf_widths(run.recon.image);
    out.arrays.push_back(f64_array("psf_widths", {static_cast<std::int64_t>(widths.size())}, std::move(widths)));
    return out;
}

}  // namespace sarlab
