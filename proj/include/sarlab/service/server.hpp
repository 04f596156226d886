#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "sarlab/config.hpp"
#include "sarlab/service/jobs.hpp"

namespace httplib {
class Server;
}

namespace sarlab::service {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "sarlab-data";
    unsigned workers = 0;  // 0: hardware concurrency
    std::string cors_origin = "*";
    std::filesystem::path static_dir;  // optional UI bundle served at /
};

/// Reads SARLAB_DATA_DIR and SARLAB_WORKERS over the given defaults.
ServerOptions options_from_env(ServerOptions base = {});

/// Resolution metrics from query parameters. `kind` is planar (default),
/// linear, cylindrical or circular. Planar/linear need B and accept fc, Zref,
/// Dx, Dy; cylindrical/circular need fmin and fmax and accept R0, Dy.
Json resolution_query(const std::map<std::string, std::string>& params);

/// Installs the /api/v1 routes on `server`.
void install_routes(httplib::Server& server, JobManager& jobs, const ServerOptions& opt);

/// Runs the HTTP service until the process is stopped.
int serve(const ServerOptions& opt);

}  // namespace sarlab::service
