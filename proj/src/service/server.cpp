#include "sarlab/service/server.hpp"

#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "sarlab/analysis.hpp"
#include "sarlab/error.hpp"
#include "sarlab/service/presets.hpp"
#include "sarlab/service/render.hpp"

namespace sarlab::service {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& field = {}) {
    Json body = {{"error", message}};
    if (!field.empty()) body["field"] = field;
    send_json(res, status, body);
}

double query_number(const std::map<std::string, std::string>& q, const std::string& key) {
    const auto it = q.find(key);
    if (it == q.end()) throw ValidationError("is required", key);
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0' || !std::isfinite(v)) throw ValidationError("must be a number", key);
    if (!(v > 0.0)) throw ValidationError("must be positive", key);
    return v;
}

std::optional<double> query_optional(const std::map<std::string, std::string>& q, const std::string& key) {
    if (!q.count(key)) return std::nullopt;
    return query_number(q, key);
}

double query_extent(const std::map<std::string, std::string>& q, const std::string& key) {
    const auto it = q.find(key);
    if (it == q.end()) return 0.0;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0' || !std::isfinite(v) || v < 0.0)
        throw ValidationError("must be a number >= 0", key);
    return v;
}

std::map<std::string, std::string> params_of(const httplib::Request& req) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : req.params) out[k] = v;
    return out;
}

}  // namespace

ServerOptions options_from_env(ServerOptions base) {
    if (const char* d = std::getenv("SARLAB_DATA_DIR"); d && *d) base.data_dir = d;
    if (const char* w = std::getenv("SARLAB_WORKERS"); w && *w) {
        const long n = std::strtol(w, nullptr, 10);
        if (n > 0) base.workers = static_cast<unsigned>(n);
    }
    return base;
}

Json resolution_query(const std::map<std::string, std::string>& q) {
    const std::string kind = q.count("kind") ? q.at("kind") : "planar";
    ResolutionReport rep;
    if (kind == "planar" || kind == "linear") {
        const double b = query_number(q, "B");
        const double fc = query_optional(q, "fc").value_or(0.0);
        const double lambda = q.count("lambdaC") ? query_number(q, "lambdaC") : (fc > 0.0 ? kSpeedOfLight / fc : 0.0);
        rep.config["B"] = b;
        rep.predicted["dz"] = kSpeedOfLight / (2.0 * b);
        if (lambda > 0.0) {
            rep.config["lambdaC"] = lambda;
            if (const auto zref = query_optional(q, "Zref")) {
                const double dx = query_extent(q, "Dx");
                const double dy = query_extent(q, "Dy");
                const auto r = planar_resolution(lambda, *zref, dx, dy, b);
                rep.config["Zref"] = *zref;
                rep.config["Dx"] = dx;
                rep.config["Dy"] = dy;
                if (r.dx) rep.predicted["dx"] = *r.dx;
                if (r.dy) rep.predicted["dy"] = *r.dy;
            }
        }
    } else if (kind == "cylindrical" || kind == "circular") {
        const double fmin = query_number(q, "fmin");
        const double fmax = query_number(q, "fmax");
        if (!(fmax > fmin)) throw ValidationError("must exceed fmin", "fmax");
        const double kmin = wavenumber(fmin);
        const double kmax = wavenumber(fmax);
        const double lambda = kSpeedOfLight / (0.5 * (fmin + fmax));
        const double r0 = query_optional(q, "R0").value_or(1.0);
        const double dy = query_extent(q, "Dy");
        const auto r = cylindrical_resolution(lambda, r0, dy, kmin, kmax);
        rep.config["lambdaC"] = lambda;
        rep.config["kmin"] = kmin;
        rep.config["kmax"] = kmax;
        rep.config["B"] = fmax - fmin;
        rep.predicted["drho"] = r.drho;
        if (q.count("R0")) rep.config["R0"] = r0;
        if (q.count("R0") && r.dy) {
            rep.config["Dy"] = dy;
            rep.predicted["dy"] = *r.dy;
        }
    } else {
        throw ValidationError("must be planar, linear, cylindrical or circular", "kind");
    }
    return Json::parse(rep.to_json());
}

void install_routes(httplib::Server& server, JobManager& jobs, const ServerOptions& opt) {
    const std::string origin = opt.cors_origin;
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what(), e.field());
        } catch (const ParseError& e) {
            send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        } catch (...) {
            send_error(res, 500, "unknown error");
        }
    });

    server.Post("/api/v1/jobs", [&jobs](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_json(req.body);
        if (!body.is_object()) throw ValidationError("request body must be an object", "body");
        std::string type = "pipeline";
        if (body.contains("type")) {
            if (!body["type"].is_string()) throw ValidationError("must be a string", "type");
            type = body["type"].get<std::string>();
        }
        Json config;
        if (body.contains("config")) config = body["config"];
        else if (body.contains("preset")) config = preset_config(body["preset"].get<std::string>());
        else throw ValidationError("is required", "config");
        const std::string id = jobs.submit(type, config);
        res.set_header("Location", "/api/v1/jobs/" + id);
        send_json(res, 202, {{"id", id}, {"status", "queued"}});
    });

    server.Get(R"(/api/v1/jobs/([^/]+))", [&jobs](const httplib::Request& req, httplib::Response& res) {
        const auto info = jobs.status(req.matches[1]);
        if (!info) return send_error(res, 404, "unknown job id");
        send_json(res, 200, info->to_json());
    });

    server.Get(R"(/api/v1/jobs/([^/]+)/result)", [&jobs](const httplib::Request& req, httplib::Response& res) {
        const auto info = jobs.status(req.matches[1]);
        if (!info) return send_error(res, 404, "unknown job id");
        const auto path = jobs.result_file(info->id);
        if (!path) return send_error(res, 409, "job has no result (status " + to_string(info->status) + ")");
        const auto bytes = sarb::read_file(*path);
        const bool json = path->extension() == ".json";
        res.set_content(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                        json ? "application/json" : "application/octet-stream");
    });

    server.Get(R"(/api/v1/jobs/([^/]+)/image)", [&jobs](const httplib::Request& req, httplib::Response& res) {
        const auto info = jobs.status(req.matches[1]);
        if (!info) return send_error(res, 404, "unknown job id");
        const auto path = jobs.result_file(info->id);
        if (!path || path->extension() != ".sarb") return send_error(res, 409, "job has no image");
        sarb::Reader reader(*path);
        if (!reader.contains("image")) return send_error(res, 409, "job result holds no image");
        std::vector<sarb::Array> arrays{reader.load("image"), reader.load("grid")};
        if (reader.contains("grid_plane_x")) arrays.push_back(reader.load("grid_plane_x"));
        const ImageVolume image = image_from_arrays(arrays);

        RenderOptions ro;
        const auto q = params_of(req);
        if (q.count("mode")) {
            if (q.at("mode") == "slice") ro.mode = RenderMode::slice;
            else if (q.at("mode") == "mip") ro.mode = RenderMode::mip;
            else throw ValidationError("must be slice or mip", "mode");
        }
        auto integer = [&](const char* key) -> long {
            char* end = nullptr;
            const long v = std::strtol(q.at(key).c_str(), &end, 10);
            if (end == q.at(key).c_str() || *end != '\0') throw ValidationError("must be an integer", key);
            return v;
        };
        if (q.count("axis")) ro.axis = static_cast<int>(integer("axis"));
        if (q.count("index")) {
            ro.index = integer("index");
            if (ro.index < 0) throw ValidationError("must be >= 0", "index");
        }
        if (q.count("dr")) ro.dynamic_range_db = query_number(q, "dr");
        const auto png = render_png(image, ro);
        res.set_content(std::string(reinterpret_cast<const char*>(png.data()), png.size()), "image/png");
    });

    server.Get("/api/v1/presets", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, presets()); });

    server.Get("/api/v1/metrics/resolution", [](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, resolution_query(params_of(req)));
    });

    if (!opt.static_dir.empty()) server.set_mount_point("/", opt.static_dir.string());
}

int serve(const ServerOptions& opt) {
    JobManager jobs(opt.data_dir, opt.workers);
    httplib::Server server;
    install_routes(server, jobs, opt);
    std::cerr << "sarlab: listening on http://" << opt.host << ":" << opt.port << "/api/v1 (data "
              << opt.data_dir.string() << ", " << jobs.workers() << " workers)\n";
    if (!server.listen(opt.host, opt.port)) {
        std::cerr << "sarlab: cannot listen on " << opt.host << ":" << opt.port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace sarlab::service
