#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sarlab/config.hpp"
#include "sarlab/engine.hpp"

namespace sarlab::service {

enum class JobStatus { queued, running, done, failed };

std::string to_string(JobStatus s);

/// Snapshot of a job.
struct JobInfo {
    std::string id;
    JobType type = JobType::pipeline;
    JobStatus status = JobStatus::queued;
    double progress = 0.0;
    std::string config_hash;
    std::string result;  // result locator, relative to the data directory
    std::string error;
    bool cached = false;
    Json summary;

    Json to_json() const;
};

/// Bounded worker pool over the engine. Results live under
/// <data_dir>/results/<hash>/ (result.sarb, summary.json); a job whose result
/// already exists finishes without recomputation and is flagged `cached`.
class JobManager {
public:
    JobManager(std::filesystem::path data_dir, unsigned workers = 0);
    ~JobManager();

    JobManager(const JobManager&) = delete;
    JobManager& operator=(const JobManager&) = delete;

    /// Validates `config` for `type` and queues a job. Throws ValidationError.
    std::string submit(const std::string& type, const Json& config);

    std::optional<JobInfo> status(const std::string& id) const;
    /// Blocks until the job is done or failed, or the timeout passes.
    std::optional<JobInfo> wait(const std::string& id, std::chrono::milliseconds timeout) const;
    /// Absolute path of a finished job's result file.
    std::optional<std::filesystem::path> result_file(const std::string& id) const;

    const std::filesystem::path& data_dir() const { return data_dir_; }
    unsigned workers() const { return worker_count_; }

private:
    struct Job {
        JobInfo info;
        Json config;
        std::atomic<double> progress{0.0};
    };

    void worker_loop();
    void execute(Job& job);
    void bump_progress(Job& job, double p);
    std::filesystem::path resolve_echo(const Json& config) const;

    std::filesystem::path data_dir_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::condition_variable queue_cv_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::deque<std::shared_ptr<Job>> queue_;
    std::vector<std::thread> threads_;
    unsigned worker_count_ = 1;
    std::uint64_t counter_ = 0;
    std::uint64_t salt_ = 0;
    bool stopping_ = false;
};

}  // namespace sarlab::service
