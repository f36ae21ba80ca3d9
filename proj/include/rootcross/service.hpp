#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rootcross/documents.hpp"

namespace rootcross {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    int max_degree = 64;
    int max_samples = 100000;
    int max_concurrent_solves = 4;
    int solve_threads = 0;  ///< per-solve track workers, 0 = hardware concurrency
    TrackerOptions tracker;

    void validate() const;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Request handlers for the /v1 endpoints, independent of the HTTP layer.
///
/// Handlers are pure functions of the request body apart from the
/// concurrent-solve counter, which only decides whether a solve is admitted.
class RootService {
public:
    explicit RootService(ServiceConfig config);

    Response health() const;
    Response curve(const std::string& body) const;
    Response solve(const std::string& body);

    /// Trajectory records (one JSON document per entry, event last), or a
    /// single error response when the request is rejected.
    struct TrackStream {
        Response error;
        std::vector<std::string> records;
        bool ok() const { return error.status == 200; }
    };
    TrackStream track(const std::string& body) const;

    /// Holds one unit of the concurrent-solve budget until destroyed.
    class SolveSlot {
    public:
        explicit SolveSlot(std::atomic<int>& counter) : counter_(&counter) {}
        SolveSlot(SolveSlot&& other) noexcept : counter_(std::exchange(other.counter_, nullptr)) {}
        SolveSlot(const SolveSlot&) = delete;
        SolveSlot& operator=(const SolveSlot&) = delete;
        SolveSlot& operator=(SolveSlot&&) = delete;
        ~SolveSlot()
        {
            if (counter_)
                counter_->fetch_sub(1);
        }

    private:
        std::atomic<int>* counter_;
    };

    /// A slot when fewer than max_concurrent_solves are running, else nullopt.
    std::optional<SolveSlot> admit_solve();

    const ServiceConfig& config() const { return config_; }

private:
    ServiceConfig config_;
    std::atomic<int> active_solves_{0};
};

/// HTTP front end serving RootService on config.host:config.port.
class ServiceHost {
public:
    explicit ServiceHost(ServiceConfig config);
    ~ServiceHost();
    ServiceHost(const ServiceHost&) = delete;
    ServiceHost& operator=(const ServiceHost&) = delete;

    /// Bind the listening socket; port 0 picks a free port. Returns the port.
    int bind();
    /// Serve until stop(); requires bind().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rootcross
