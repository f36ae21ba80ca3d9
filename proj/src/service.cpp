#include "rootcross/service.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "httplib.h"

namespace rootcross {

namespace {

struct RequestError {
    int status;
    std::string code;
    std::string message;
};

Response error_response(int status, const std::string& code, const std::string& message)
{
    json j{{"error", {{"code", code}, {"message", message}}}};
    return Response{status, j.dump()};
}

json parse_body(const std::string& body)
{
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw RequestError{400, "malformed", std::string("request body is not JSON: ") + e.what()};
    }
}

Polynomial request_polynomial(const json& j, const ServiceConfig& cfg)
{
    if (!j.is_object() || !j.contains("poly"))
        throw RequestError{400, "malformed", "missing field 'poly'"};
    const Polynomial p = parse_polynomial_document(j["poly"]).polynomial();
    if (p.degree() < 1)
        throw RequestError{400, "malformed", "degree must be >= 1"};
    if (p.degree() > cfg.max_degree)
        throw RequestError{422, "limit", "degree " + std::to_string(p.degree()) + " exceeds the limit of "
                                             + std::to_string(cfg.max_degree)};
    return p;
}

double positive_number(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number())
        throw RequestError{400, "malformed", std::string("field '") + key + "' must be a number"};
    const double v = j[key].get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
        throw RequestError{400, "malformed", std::string("field '") + key + "' must be positive"};
    return v;
}

TrackerOptions request_options(const json& j, const ServiceConfig& cfg)
{
    TrackerOptions opts = tracker_options_from_json(j.contains("options") ? j["options"] : json(), cfg.tracker);
    opts.validate();
    return opts;
}

template <class F>
Response guarded(F&& handler)
{
    try {
        return handler();
    } catch (const RequestError& e) {
        return error_response(e.status, e.code, e.message);
    } catch (const DocumentError& e) {
        return error_response(400, "malformed", e.what());
    } catch (const json::exception& e) {
        return error_response(400, "malformed", e.what());
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::InvalidInput:
        case ErrorCode::DegreeZero:
        case ErrorCode::NotOnAxis:
            return error_response(400, to_string(e.code()), e.what());
        default:
            return error_response(500, to_string(e.code()), e.what());
        }
    }
}

}  // namespace

void ServiceConfig::validate() const
{
    if (port < 0 || port > 65535)
        throw Error(ErrorCode::InvalidInput, "port out of range");
    if (max_degree < 1 || max_samples < 1 || max_concurrent_solves < 1 || solve_threads < 0)
        throw Error(ErrorCode::InvalidInput, "service limits must be positive");
    tracker.validate();
}

RootService::RootService(ServiceConfig config) : config_(std::move(config))
{
    config_.validate();
}

Response RootService::health() const
{
    return Response{200, json{{"status", "ok"}}.dump()};
}

Response RootService::curve(const std::string& body) const
{
    return guarded([&] {
        const json j = parse_body(body);
        const Polynomial p = request_polynomial(j, config_);
        const double r = positive_number(j, "r");
        int samples = 256;
        if (j.contains("samples")) {
            if (!j["samples"].is_number_integer() || j["samples"].get<long long>() < 1)
                throw RequestError{400, "malformed", "field 'samples' must be a positive integer"};
            const long long s = j["samples"].get<long long>();
            if (s > config_.max_samples)
                throw RequestError{422, "limit", "samples exceed the limit of " + std::to_string(config_.max_samples)};
            samples = static_cast<int>(s);
        }
        return Response{200, curve_document(p, r, samples).dump()};
    });
}

std::optional<RootService::SolveSlot> RootService::admit_solve()
{
    if (active_solves_.fetch_add(1) >= config_.max_concurrent_solves) {
        active_solves_.fetch_sub(1);
        return std::nullopt;
    }
    return SolveSlot(active_solves_);
}

Response RootService::solve(const std::string& body)
{
    const auto slot = admit_solve();
    if (!slot)
        return error_response(409, "busy", "concurrent solve budget exhausted");

    return guarded([&] {
        const json j = parse_body(body);
        const Polynomial p = request_polynomial(j, config_);
        const std::string mode = j.value("mode", std::string("parallel"));
        SolverOptions opts;
        opts.tracker = request_options(j, config_);
        opts.threads = config_.solve_threads;
        if (mode == "parallel")
            return Response{200, to_json(solve_parallel(p, opts)).dump()};
        if (mode == "deflation")
            return Response{200, to_json(solve_deflation(p, opts)).dump()};
        if (mode == "single")
            return Response{200, to_json(locate_single_root(p, opts.tracker)).dump()};
        throw RequestError{400, "malformed", "mode must be parallel, deflation or single"};
    });
}

RootService::TrackStream RootService::track(const std::string& body) const
{
    TrackStream out;
    out.error = guarded([&] {
        const json j = parse_body(body);
        const Polynomial p = request_polynomial(j, config_);
        if (!j.contains("start") || !j["start"].is_object())
            throw RequestError{400, "malformed", "missing field 'start'"};
        const double r = positive_number(j["start"], "r");
        if (!j["start"].contains("theta") || !j["start"]["theta"].is_number())
            throw RequestError{400, "malformed", "field 'theta' must be a number"};
        const double theta = wrap_angle(j["start"]["theta"].get<double>());

        const std::string mode = j.value("mode", std::string("rightward"));
        if (mode != "rightward" && mode != "leftward")
            throw RequestError{400, "malformed", "mode must be rightward or leftward"};
        const Heading heading = mode == "rightward" ? Heading::Rightward : Heading::Leftward;
        const TrackerOptions opts = request_options(j, config_);

        // the start must be one of the census crossings at r
        const Crossing* start = nullptr;
        const auto census = find_crossings(p, r);
        double best = 1e-6;
        for (const Crossing& c : census) {
            const double d = std::abs(std::remainder(c.theta - theta, 2.0 * M_PI));
            if (d <= best) {
                best = d;
                start = &c;
            }
        }
        if (!start)
            throw RequestError{400, "malformed", "start is not a real-axis crossing at this radius"};
        if (start->kind == CrossingKind::Tangent)
            throw RequestError{400, "malformed", "cannot track from a tangency"};

        const Trajectory t = rootcross::track(p, *start, heading, opts);
        for (std::size_t i = 0; i < t.states.size(); ++i)
            out.records.push_back(state_record(p, t.states[i], i).dump());
        out.records.push_back(event_record(t.event).dump());
        return Response{200, {}, "application/x-ndjson"};
    });
    if (!out.ok())
        out.records.clear();
    return out;
}

struct ServiceHost::Impl {
    explicit Impl(ServiceConfig cfg) : service(std::move(cfg)) {}
    RootService service;
    httplib::Server server;
    bool bound = false;
};

ServiceHost::ServiceHost(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config)))
{
    auto& svc = impl_->service;
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    impl_->server.Get("/v1/health", [&svc, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, svc.health());
    });
    impl_->server.Post("/v1/curve", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.curve(req.body));
    });
    impl_->server.Post("/v1/solve", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.solve(req.body));
    });
    impl_->server.Post("/v1/track", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
        auto stream = std::make_shared<RootService::TrackStream>(svc.track(req.body));
        if (!stream->ok()) {
            reply(res, stream->error);
            return;
        }
        res.status = 200;
        res.set_chunked_content_provider("application/x-ndjson", [stream](std::size_t, httplib::DataSink& sink) {
            for (const std::string& rec : stream->records) {
                const std::string line = rec + "\n";
                if (!sink.write(line.data(), line.size()))
                    return false;
            }
            sink.done();
            return true;
        });
    });
}

ServiceHost::~ServiceHost()
{
    stop();
}

int ServiceHost::bind()
{
    const auto& cfg = impl_->service.config();
    int port = cfg.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(cfg.host);
        if (port < 0)
            throw std::runtime_error("could not bind " + cfg.host);
    } else if (!impl_->server.bind_to_port(cfg.host, port)) {
        throw std::runtime_error("could not bind " + cfg.host + ":" + std::to_string(port));
    }
    impl_->bound = true;
    return port;
}

void ServiceHost::run()
{
    if (!impl_->bound)
        throw std::logic_error("ServiceHost::run before bind");
    impl_->server.listen_after_bind();
}

void ServiceHost::stop()
{
    if (impl_)
        impl_->server.stop();
}

}  // namespace rootcross
