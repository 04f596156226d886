#include "sarlab/service/jobs.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sarlab/dataset.hpp"
#include "sarlab/digest.hpp"
#include "sarlab/error.hpp"

namespace sarlab::service {

namespace {

namespace fs = std::filesystem;

void write_atomically(const fs::path& path, const std::vector<std::byte>& bytes) {
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    sarb::write_file(tmp, bytes);
    fs::rename(tmp, path);
}

std::vector<std::byte> text_bytes(const std::string& s) {
    const auto* p = reinterpret_cast<const std::byte*>(s.data());
    return {p, p + s.size()};
}

Json strip_echo(Json config) {
    config.erase("echo_job");
    config.erase("echo_path");
    return config;
}

}  // namespace

std::string to_string(JobStatus s) {
    switch (s) {
        case JobStatus::queued: return "queued";
        case JobStatus::running: return "running";
        case JobStatus::done: return "done";
        case JobStatus::failed: return "failed";
    }
    return "?";
}

Json JobInfo::to_json() const {
    Json j = {{"id", id},           {"type", sarlab::to_string(type)},
              {"status", to_string(status)}, {"progress", progress},
              {"config_hash", config_hash},  {"cached", cached}};
    if (!result.empty()) j["result"] = result;
    if (!error.empty()) j["error"] = error;
    if (!summary.is_null()) j["summary"] = summary;
    return j;
}

JobManager::JobManager(fs::path data_dir, unsigned workers) : data_dir_(std::move(data_dir)) {
    std::error_code ec;
    fs::create_directories(data_dir_ / "results", ec);
    if (ec) throw IoError("cannot create data directory '" + data_dir_.string() + "': " + ec.message());
    salt_ = std::random_device{}();
    salt_ = (salt_ << 32) ^ std::random_device{}();
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    worker_count_ = workers;
    for (unsigned i = 0; i < workers; ++i) threads_.emplace_back([this] { worker_loop(); });
}

JobManager::~JobManager() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    queue_cv_.notify_all();
    for (auto& t : threads_) t.join();
}

fs::path JobManager::resolve_echo(const Json& config) const {
    if (config.contains("echo_job")) {
        if (!config["echo_job"].is_string()) throw ValidationError("must be a string", "echo_job");
        const auto path = result_file(config["echo_job"].get<std::string>());
        if (!path) throw ValidationError("no finished job with this id", "echo_job");
        return *path;
    }
    if (config.contains("echo_path")) {
        if (!config["echo_path"].is_string()) throw ValidationError("must be a string", "echo_path");
        const fs::path p = data_dir_ / config["echo_path"].get<std::string>();
        if (!fs::is_regular_file(p)) throw ValidationError("file not found under the data directory", "echo_path");
        return p;
    }
    throw ValidationError("is required (or echo_path)", "echo_job");
}

std::string JobManager::submit(const std::string& type, const Json& config) {
    const JobType t = job_type_from_string(type);
    if (!config.is_object()) throw ValidationError("must be an object", "config");
    std::string hash;
    switch (t) {
        case JobType::simulate:
        case JobType::pipeline:
        case JobType::psf:
            parse_pipeline(config, data_dir_);
            hash = run_hash(t, config);
            break;
        case JobType::reconstruct:
            resolve_echo(config);
            if (!config.contains("grid")) throw ValidationError("is required", "grid");
            parse_grid_spec(config["grid"]).validate();
            if (config.contains("reconstruction")) parse_rma(config["reconstruction"]);
            break;
        case JobType::dataset:
            parse_dataset_spec(config, data_dir_);
            hash = run_hash(t, config);
            break;
    }

    auto job = std::make_shared<Job>();
    job->config = config;
    job->info.type = t;
    job->info.config_hash = hash;
    {
        std::lock_guard lock(mutex_);
        ++counter_;
        char id[40];
        std::snprintf(id, sizeof id, "job-%06llx-%08llx", static_cast<unsigned long long>(counter_),
                      static_cast<unsigned long long>((salt_ ^ (counter_ * 0x9e3779b97f4a7c15ULL)) & 0xffffffffULL));
        job->info.id = id;
        jobs_[job->info.id] = job;
        queue_.push_back(job);
    }
    queue_cv_.notify_one();
    changed_.notify_all();
    return job->info.id;
}

std::optional<JobInfo> JobManager::status(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    JobInfo info = it->second->info;
    info.progress = it->second->progress.load();
    return info;
}

std::optional<JobInfo> JobManager::wait(const std::string& id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    const auto job = it->second;
    changed_.wait_for(lock, timeout, [&] {
        return job->info.status == JobStatus::done || job->info.status == JobStatus::failed;
    });
    JobInfo info = job->info;
    info.progress = job->progress.load();
    return info;
}

std::optional<fs::path> JobManager::result_file(const std::string& id) const {
    const auto info = status(id);
    if (!info || info->status != JobStatus::done || info->result.empty()) return std::nullopt;
    return data_dir_ / info->result;
}

void JobManager::bump_progress(Job& job, double p) {
    double cur = job.progress.load();
    while (p > cur && !job.progress.compare_exchange_weak(cur, p)) {
    }
}

void JobManager::worker_loop() {
#ifdef _OPENMP
    if (worker_count_ > 1)
        omp_set_num_threads(static_cast<int>(std::max(1u, std::thread::hardware_concurrency() / worker_count_)));
#endif
    for (;;) {
        std::shared_ptr<Job> job;
        {
            std::unique_lock lock(mutex_);
            queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            job = queue_.front();
            queue_.pop_front();
            job->info.status = JobStatus::running;
        }
        changed_.notify_all();
        execute(*job);
        changed_.notify_all();
    }
}

void JobManager::execute(Job& job) {
    const ProgressFn progress = [this, &job](double p) { bump_progress(job, std::min(p, 1.0)); };
    try {
        const JobType t = job.info.type;
        Json config = job.config;
        std::vector<sarb::Array> echo;
        std::string hash = job.info.config_hash;
        if (t == JobType::reconstruct) {
            echo = sarb::read_sarb(resolve_echo(config));
            config = strip_echo(std::move(config));
            Json keyed = config;
            keyed["echo_sha256"] = sha256_hex(sarb::encode(echo));
            hash = run_hash(t, keyed);
        }
        const fs::path dir_rel = fs::path(t == JobType::dataset ? "datasets" : "results") / hash;
        const fs::path dir = data_dir_ / dir_rel;
        const fs::path result_rel = dir_rel / (t == JobType::dataset ? "dataset.json" : "result.sarb");
        const fs::path summary_path = dir / "summary.json";

        bool cached = fs::is_regular_file(data_dir_ / result_rel) && fs::is_regular_file(summary_path);
        Json summary;
        if (cached) {
            summary = load_json_file(summary_path);
        } else {
            fs::create_directories(dir);
            if (t == JobType::dataset) {
                const DatasetSpec spec = parse_dataset_spec(config, data_dir_);
                const Manifest m = generate_dataset(spec, dir, 1, [&](Index d, Index n) {
                    progress(static_cast<double>(d) / static_cast<double>(std::max<Index>(n, 1)));
                });
                if (!m.failed.empty()) {
                    fs::remove(dir / "dataset.json");
                    throw std::runtime_error(std::to_string(m.failed.size()) + " samples failed, first: " + m.errors.front());
                }
                summary = {{"counts", {{"train", m.n_train}, {"test", m.n_test}}}, {"spec_hash", m.spec_hash}};
            } else {
                RunResult r;
                if (t == JobType::simulate) r = run_simulate(config, data_dir_, progress);
                else if (t == JobType::pipeline) r = run_pipeline(config, data_dir_, progress);
                else if (t == JobType::psf) r = run_psf(config, data_dir_, progress);
                else r = run_reconstruct(config, echo, progress);
                write_atomically(data_dir_ / result_rel, sarb::encode(r.arrays));
                summary = r.summary;
            }
            write_atomically(summary_path, text_bytes(summary.dump(2)));
        }
        bump_progress(job, 1.0);
        std::lock_guard lock(mutex_);
        job.info.config_hash = hash;
        job.info.result = result_rel.generic_string();
        job.info.summary = std::move(summary);
        job.info.cached = cached;
        job.info.status = JobStatus::done;
    } catch (const std::exception& e) {
        std::lock_guard lock(mutex_);
        job.info.error = e.what();
        job.info.status = JobStatus::failed;
    }
}

}  // namespace sarlab::service
