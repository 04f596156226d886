#include "sarlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sarlab/digest.hpp"
#include "sarlab/error.hpp"

namespace sarlab {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError("must be an object", path);
}

const Json& member(const Json& j, const char* key, const std::string& path) {
    require_object(j, path);
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError("is required", join(path, key));
    return *it;
}

double number(const Json& v, const std::string& field) {
    if (!v.is_number()) throw ValidationError("must be a number", field);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError("must be finite", field);
    return d;
}

Index integer(const Json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ValidationError("must be an integer", field);
    return v.get<Index>();
}

std::string string(const Json& v, const std::string& field) {
    if (!v.is_string()) throw ValidationError("must be a string", field);
    return v.get<std::string>();
}

double req_number(const Json& j, const char* key, const std::string& path) {
    return number(member(j, key, path), join(path, key));
}

Index req_integer(const Json& j, const char* key, const std::string& path) {
    return integer(member(j, key, path), join(path, key));
}

double opt_number(const Json& j, const char* key, const std::string& path, double fallback) {
    return j.contains(key) ? number(j[key], join(path, key)) : fallback;
}

Index opt_integer(const Json& j, const char* key, const std::string& path, Index fallback) {
    return j.contains(key) ? integer(j[key], join(path, key)) : fallback;
}

double positive(double v, const std::string& field) {
    if (!(v > 0.0)) throw ValidationError("must be positive", field);
    return v;
}

Index at_least(Index v, Index lo, const std::string& field) {
    if (v < lo) throw ValidationError("must be >= " + std::to_string(lo), field);
    return v;
}

Vec3 vec3(const Json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) throw ValidationError("must be a list of 3 numbers", field);
    return {number(v[0], field + "[0]"), number(v[1], field + "[1]"), number(v[2], field + "[2]")};
}

cd reflectivity(const Json& j, const std::string& path) {
    return {opt_number(j, "re", path, 1.0), opt_number(j, "im", path, 0.0)};
}

Eigen::Affine3d parse_pose(const Json& j, const std::string& path) {
    require_object(j, path);
    Eigen::Affine3d pose = Eigen::Affine3d::Identity();
    if (j.contains("translation")) pose.translate(vec3(j["translation"], join(path, "translation")));
    if (j.contains("rotation_deg")) {
        const Vec3 r = vec3(j["rotation_deg"], join(path, "rotation_deg")) * (kPi / 180.0);
        pose.rotate(Eigen::AngleAxisd(r.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(r.y(), Vec3::UnitY()) *
                    Eigen::AngleAxisd(r.x(), Vec3::UnitX()));
    }
    if (j.contains("scale")) pose.scale(positive(number(j["scale"], join(path, "scale")), join(path, "scale")));
    return pose;
}

GridAxis parse_axis(const Json& j, const std::string& path) {
    GridAxis a{req_number(j, "min", path), req_number(j, "max", path), req_integer(j, "count", path)};
    if (!(a.max > a.min)) throw ValidationError("max must exceed min", join(path, "max"));
    at_least(a.count, 2, join(path, "count"));
    return a;
}

Json axis_to_json(const GridAxis& a) { return {{"min", a.min}, {"max", a.max}, {"count", a.count}}; }

}  // namespace

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

std::string config_hash(const Json& config) { return sha256_hex(config.dump()); }

Waveform parse_waveform(const Json& j, const std::string& path) {
    const std::string type = string(member(j, "type", path), join(path, "type"));
    Waveform w;
    if (type == "fmcw") {
        FmcwParams p;
        p.start_frequency = req_number(j, "f0", path);
        p.ramp_slope = req_number(j, "K", path);
        p.chirp_duration = req_number(j, "Tc", path);
        p.repetition_interval = req_number(j, "Tr", path);
        p.chirp_count = req_integer(j, "Nc", path);
        p.sample_rate = req_number(j, "fS", path);
        p.frequency_samples = req_integer(j, "Nf", path);
        w = p;
    } else if (type == "pmcw") {
        PmcwParams p;
        p.carrier = req_number(j, "fc", path);
        p.bandwidth = req_number(j, "B", path);
        p.code_duration = req_number(j, "Td", path);
        p.code_count = req_integer(j, "Ncode", path);
        p.frequency_samples = req_integer(j, "Nf", path);
        w = p;
    } else if (type == "ofdm") {
        OfdmParams p;
        p.carrier = req_number(j, "fc", path);
        p.subcarrier_count = req_integer(j, "Nsc", path);
        p.subcarrier_spacing = req_number(j, "df", path);
        p.cyclic_prefix = req_number(j, "Tcp", path);
        p.symbol_count = req_integer(j, "Nsym", path);
        p.repetition_interval = req_number(j, "Tr", path);
        p.frequency_samples = req_integer(j, "Nf", path);
        w = p;
    } else {
        throw ValidationError("must be one of fmcw, pmcw, ofdm", join(path, "type"));
    }
    try {
        std::visit([](const auto& p) { validate(p); }, w);
    } catch (const ValidationError& e) {
        // re-root the field path under `path`
        const std::string leaf = e.field().substr(e.field().find('.') + 1);
        throw ValidationError(std::string(e.what()).substr(e.field().size() + 2), join(path, leaf));
    }
    return w;
}

Json waveform_to_json(const Waveform& w) {
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FmcwParams>)
                return {{"type", "fmcw"}, {"f0", p.start_frequency}, {"K", p.ramp_slope}, {"Tc", p.chirp_duration},
                        {"Tr", p.repetition_interval}, {"Nc", p.chirp_count}, {"fS", p.sample_rate},
                        {"Nf", p.frequency_samples}};
            else if constexpr (std::is_same_v<T, PmcwParams>)
                return {{"type", "pmcw"}, {"fc", p.carrier}, {"B", p.bandwidth}, {"Td", p.code_duration},
                        {"Ncode", p.code_count}, {"Nf", p.frequency_samples}};
            else
                return {{"type", "ofdm"}, {"fc", p.carrier}, {"Nsc", p.subcarrier_count}, {"df", p.subcarrier_spacing},
                        {"Tcp", p.cyclic_prefix}, {"Nsym", p.symbol_count}, {"Tr", p.repetition_interval},
                        {"Nf", p.frequency_samples}};
        },
        w);
}

double center_wavelength(const Waveform& w) { return kSpeedOfLight / band_of(w).center(); }

ApertureConfig parse_aperture(const Json& j, double lambda_c, const std::string& path) {
    ApertureConfig a;
    try {
        a.kind = aperture_kind_from_string(string(member(j, "kind", path), join(path, "kind")));
    } catch (const ValidationError& e) {
        if (e.field() == join(path, "kind")) throw;
        throw ValidationError("must be one of linear, planar, circular, cylindrical, irregular", join(path, "kind"));
    }
    auto spacing = [&](const char* key, const char* lambda_key) {
        if (j.contains(key)) return positive(number(j[key], join(path, key)), join(path, key));
        if (j.contains(lambda_key)) return positive(number(j[lambda_key], join(path, lambda_key)), join(path, lambda_key)) * lambda_c;
        throw ValidationError(std::string("is required (or ") + lambda_key + ")", join(path, key));
    };
    switch (a.kind) {
        case ApertureKind::linear:
            a.ny = at_least(req_integer(j, "ny", path), 1, join(path, "ny"));
            a.dy = spacing("dy", "dy_lambda");
            a.Z0 = opt_number(j, "Z0", path, 0.0);
            break;
        case ApertureKind::planar:
            a.nx = at_least(req_integer(j, "nx", path), 1, join(path, "nx"));
            a.ny = at_least(req_integer(j, "ny", path), 1, join(path, "ny"));
            a.dx = spacing("dx", "dx_lambda");
            a.dy = spacing("dy", "dy_lambda");
            a.Z0 = opt_number(j, "Z0", path, 0.0);
            break;
        case ApertureKind::circular:
            a.ntheta = at_least(req_integer(j, "ntheta", path), 1, join(path, "ntheta"));
            a.R0 = positive(req_number(j, "R0", path), join(path, "R0"));
            break;
        case ApertureKind::cylindrical:
            a.ntheta = at_least(req_integer(j, "ntheta", path), 1, join(path, "ntheta"));
            a.ny = at_least(req_integer(j, "ny", path), 1, join(path, "ny"));
            a.dy = spacing("dy", "dy_lambda");
            a.R0 = positive(req_number(j, "R0", path), join(path, "R0"));
            break;
        case ApertureKind::irregular: {
            const Json& p = member(j, "positions", path);
            const std::string field = join(path, "positions");
            if (!p.is_array() || p.empty()) throw ValidationError("must be a nonempty list of [x, y, z]", field);
            a.positions.resize(3, static_cast<Index>(p.size()));
            for (std::size_t i = 0; i < p.size(); ++i)
                a.positions.col(static_cast<Index>(i)) = vec3(p[i], field + "[" + std::to_string(i) + "]");
            break;
        }
    }
    return a;
}

SceneConfig parse_scene(const Json& j, const std::string& path) {
    require_object(j, path);
    SceneConfig s;
    if (j.contains("points")) {
        const Json& pts = j["points"];
        const std::string field = join(path, "points");
        if (!pts.is_array()) throw ValidationError("must be a list", field);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string p = field + "[" + std::to_string(i) + "]";
            s.points.push_back({vec3(member(pts[i], "xyz", p), join(p, "xyz")), reflectivity(pts[i], p)});
        }
    }
    if (j.contains("meshes")) {
        const Json& ms = j["meshes"];
        const std::string field = join(path, "meshes");
        if (!ms.is_array()) throw ValidationError("must be a list", field);
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const std::string p = field + "[" + std::to_string(i) + "]";
            const Json& m = ms[i];
            require_object(m, p);
            MeshConfig mc;
            if (m.contains("path")) mc.path = string(m["path"], join(p, "path"));
            if (m.contains("builtin")) {
                mc.builtin = string(m["builtin"], join(p, "builtin"));
                if (mc.builtin != "knife") throw ValidationError("unknown builtin mesh '" + mc.builtin + "'", join(p, "builtin"));
            }
            if (mc.path.empty() == mc.builtin.empty()) throw ValidationError("exactly one of path, builtin is required", p);
            mc.length = positive(opt_number(m, "length", p, mc.length), join(p, "length"));
            mc.spacing = positive(req_number(m, "spacing", p), join(p, "spacing"));
            if (m.contains("units")) {
                const std::string u = string(m["units"], join(p, "units"));
                if (u == "mm") mc.units = StlUnits::millimeters;
                else if (u == "m") mc.units = StlUnits::meters;
                else throw ValidationError("must be mm or m", join(p, "units"));
            }
            if (m.contains("pose")) mc.pose = parse_pose(m["pose"], join(p, "pose"));
            mc.reflectivity = reflectivity(m, p);
            mc.seed = static_cast<std::uint64_t>(at_least(opt_integer(m, "seed", p, 0), 0, join(p, "seed")));
            s.meshes.push_back(std::move(mc));
        }
    }
    if (j.contains("text")) {
        const Json& ts = j["text"];
        const std::string field = join(path, "text");
        if (!ts.is_array()) throw ValidationError("must be a list", field);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const std::string p = field + "[" + std::to_string(i) + "]";
            TextConfig t;
            t.text = string(member(ts[i], "string", p), join(p, "string"));
            t.height = positive(req_number(ts[i], "height", p), join(p, "height"));
            t.origin_y = opt_number(ts[i], "origin_y", p, 0.0);
            t.origin_z = opt_number(ts[i], "origin_z", p, 0.0);
            t.spacing = positive(req_number(ts[i], "spacing", p), join(p, "spacing"));
            t.reflectivity = reflectivity(ts[i], p);
            s.text.push_back(std::move(t));
        }
    }
    if (s.points.empty() && s.meshes.empty() && s.text.empty())
        throw ValidationError("needs at least one of points, meshes, text", path);
    return s;
}

GridSpec parse_grid_spec(const Json& j, const std::string& path) {
    require_object(j, path);
    GridSpec g;
    if (j.contains("x")) {
        g = GridSpec::make3d(parse_axis(j["x"], join(path, "x")), parse_axis(member(j, "y", path), join(path, "y")),
                             parse_axis(member(j, "z", path), join(path, "z")));
    } else {
        g = GridSpec::make2d(parse_axis(member(j, "y", path), join(path, "y")),
                             parse_axis(member(j, "z", path), join(path, "z")), opt_number(j, "plane_x", path, 0.0));
    }
    return g;
}

GridConfig parse_grid(const Json& j, const std::string& path) {
    require_object(j, path);
    GridConfig g;
    if (j.contains("y") || j.contains("x") || j.contains("z")) {
        g.explicit_grid = parse_grid_spec(j, path);
        return g;
    }
    g.margin = opt_number(j, "margin", path, g.margin);
    if (g.margin < 0.0) throw ValidationError("must be >= 0", join(path, "margin"));
    g.max_count = at_least(opt_integer(j, "max_count", path, g.max_count), 2, join(path, "max_count"));
    return g;
}

Json grid_to_json(const GridSpec& g) {
    Json j;
    if (g.dims() == 3) j["x"] = axis_to_json(g.axes[0]);
    else j["plane_x"] = g.plane_x;
    j["y"] = axis_to_json(g.axis_for(1));
    j["z"] = axis_to_json(g.axis_for(2));
    return j;
}

RmaOptions parse_rma(const Json& j, const std::string& path) {
    require_object(j, path);
    RmaOptions o;
    o.pad = at_least(opt_integer(j, "pad", path, o.pad), 1, join(path, "pad"));
    o.polar_oversample = at_least(opt_integer(j, "polar_oversample", path, o.polar_oversample), 1, join(path, "polar_oversample"));
    if (j.contains("interp")) {
        try {
            o.interp = interp_from_string(string(j["interp"], join(path, "interp")));
        } catch (const ValidationError&) {
            throw ValidationError("must be linear or cubic", join(path, "interp"));
        }
    }
    if (j.contains("jacobian")) {
        if (!j["jacobian"].is_boolean()) throw ValidationError("must be a boolean", join(path, "jacobian"));
        o.jacobian = j["jacobian"].get<bool>();
    }
    if (j.contains("keep_kspace")) {
        if (!j["keep_kspace"].is_boolean()) throw ValidationError("must be a boolean", join(path, "keep_kspace"));
        o.keep_kspace = j["keep_kspace"].get<bool>();
    }
    return o;
}

PipelineConfig parse_pipeline(const Json& j, const std::filesystem::path& base_dir, bool require_scene) {
    require_object(j, "");
    PipelineConfig c;
    c.source = j;
    c.base_dir = base_dir;
    c.waveform = parse_waveform(member(j, "waveform", ""), "waveform");
    c.aperture = parse_aperture(member(j, "aperture", ""), center_wavelength(c.waveform), "aperture");
    if (require_scene || j.contains("scene")) c.scene = parse_scene(member(j, "scene", ""), "scene");
    if (j.contains("grid")) c.grid = parse_grid(j["grid"], "grid");
    if (j.contains("algo")) {
        c.algo = string(j["algo"], "algo");
        static const char* known[] = {"bpa", "rma-linear", "rma-planar", "rma-circular", "rma-cylindrical"};
        if (std::find(std::begin(known), std::end(known), c.algo) == std::end(known))
            throw ValidationError("must be one of bpa, rma-linear, rma-planar, rma-circular, rma-cylindrical", "algo");
    }
    if (j.contains("reconstruction")) c.rma = parse_rma(j["reconstruction"], "reconstruction");
    if (j.contains("noise")) {
        const Json& n = j["noise"];
        c.snr_db = number(member(n, "snr_db", "noise"), "noise.snr_db");
        c.noise_seed = static_cast<std::uint64_t>(at_least(opt_integer(n, "seed", "noise", 0), 0, "noise.seed"));
    }
    if (j.contains("gain")) c.gain_csv = string(member(j["gain"], "csv", "gain"), "gain.csv");
    return c;
}

}  // namespace sarlab
