#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "rootcross/service.hpp"
#include "support/figure_cases.hpp"
#include "support/oracles.hpp"

using namespace rootcross;

namespace {

std::string poly_json(const Polynomial& p)
{
    return to_json(PolynomialDocument{p.coeffs(), {}}).dump();
}

const std::string kSquare = R"({"coeffs": [[-1, 0], [0, 0], [1, 0]]})";

json body(const Response& r)
{
    return json::parse(r.body);
}

std::string error_code(const Response& r)
{
    return body(r)["error"]["code"].get<std::string>();
}

std::vector<Complex> roots_of(const json& report)
{
    std::vector<Complex> out;
    for (const json& e : report["roots"])
        for (int k = 0; k < e["multiplicity"].get<int>(); ++k)
            out.push_back(complex_from_json(e["root"]));
    return out;
}

std::vector<json> ndjson(const std::string& text)
{
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(json::parse(line));
    return out;
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("health")
{
    RootService svc({});
    const Response r = svc.health();
    CHECK(r.status == 200);
    CHECK(body(r)["status"] == "ok");
}

TEST_CASE("curve endpoint")
{
    RootService svc({});
    const Response r = svc.curve(R"({"poly": )" + kSquare + R"(, "r": 2, "samples": 4})");
    REQUIRE(r.status == 200);
    const json d = body(r);
    CHECK(d["points"].size() == 4);
    REQUIRE(d["crossings"].size() == 4);
    const char* kinds[] = {"up", "down", "up", "down"};
    const double xs[] = {3.0, -5.0, 3.0, -5.0};
    for (int k = 0; k < 4; ++k) {
        CHECK(d["crossings"][k]["kind"] == kinds[k]);
        CHECK(d["crossings"][k]["x"].get<double>() == doctest::Approx(xs[k]));
    }
}

TEST_CASE("malformed and out-of-limit requests")
{
    ServiceConfig cfg;
    cfg.max_degree = 4;
    cfg.max_samples = 100;
    RootService svc(cfg);

    CHECK(svc.curve("not json").status == 400);
    CHECK(svc.curve(R"({"r": 1})").status == 400);
    CHECK(svc.curve(R"({"poly": )" + kSquare + R"(, "r": -1})").status == 400);
    CHECK(svc.curve(R"({"poly": )" + kSquare + R"(, "r": "x"})").status == 400);
    CHECK(svc.curve(R"({"poly": )" + kSquare + R"(, "r": 1, "samples": 0})").status == 400);
    CHECK(svc.curve(R"({"poly": {"coeffs": [[-1, 0]]}, "r": 1})").status == 400);
    CHECK(svc.curve(R"({"poly": {"coeffs": [[1, 0], [1e400, 0]]}, "r": 1})").status == 400);

    const Response many = svc.curve(R"({"poly": )" + kSquare + R"(, "r": 1, "samples": 101})");
    CHECK(many.status == 422);
    CHECK(error_code(many) == "limit");
    const std::string big = poly_json(Polynomial(oracle::expand_roots({1.0, 2.0, 3.0, 4.0, 5.0})));
    CHECK(svc.solve(R"({"poly": )" + big + "}").status == 422);

    CHECK(svc.solve(R"({"poly": )" + kSquare + R"(, "mode": "magic"})").status == 400);
    CHECK(svc.solve(R"({"poly": )" + kSquare + R"(, "options": {"c": 2}})").status == 400);
    CHECK(svc.solve(R"({"poly": )" + kSquare + R"(, "options": {"max_steps": "many"}})").status == 400);

    const Response constant = svc.solve(R"({"poly": {"coeffs": [[-1, 0]]}})");
    CHECK(constant.status == 400);
    CHECK(body(constant)["error"]["message"] == "degree must be >= 1");
}

TEST_CASE("solve endpoint")
{
    RootService svc({});
    const std::string fig1 = poly_json(cases::fig1());
    for (const char* mode : {"parallel", "deflation"}) {
        const Response r = svc.solve(R"({"poly": )" + fig1 + R"(, "mode": ")" + mode + R"("})");
        REQUIRE(r.status == 200);
        const json rep = body(r);
        CHECK(rep["mode"] == mode);
        CHECK(rep["complete"] == true);
        CHECK(oracle::match_error(cases::kFig1Roots, roots_of(rep)) < 1e-8);
        CHECK(report_from_json(rep).roots.size() == 3);
    }
    const Response single = svc.solve(R"({"poly": )" + fig1 + R"(, "mode": "single"})");
    REQUIRE(single.status == 200);
    CHECK(body(single)["residual"].get<double>() < 1e-10);
}

TEST_CASE("responses depend only on the request")
{
    RootService svc({});
    const std::string req = R"({"poly": )" + poly_json(cases::fig2()) + "}";
    const std::string first = svc.solve(req).body;
    svc.curve(R"({"poly": )" + kSquare + R"(, "r": 3})");
    CHECK(svc.solve(req).body == first);
}

TEST_CASE("solve budget")
{
    ServiceConfig cfg;
    cfg.max_concurrent_solves = 1;
    RootService svc(cfg);
    {
        auto held = svc.admit_solve();
        REQUIRE(held.has_value());
        CHECK_FALSE(svc.admit_solve().has_value());
        const Response busy = svc.solve(R"({"poly": )" + kSquare + "}");
        CHECK(busy.status == 409);
        CHECK(error_code(busy) == "busy");
    }
    CHECK(svc.solve(R"({"poly": )" + kSquare + "}").status == 200);
}

TEST_CASE("track endpoint")
{
    RootService svc({});
    const auto ok = svc.track(R"({"poly": )" + kSquare + R"(, "start": {"r": 0.5, "theta": 0}, "mode": "rightward"})");
    REQUIRE(ok.ok());
    REQUIRE(ok.records.size() > 2);
    for (std::size_t i = 0; i + 1 < ok.records.size(); ++i) {
        const json s = json::parse(ok.records[i]);
        CHECK(s["type"] == "state");
        CHECK(s["index"] == i);
    }
    const json ev = json::parse(ok.records.back());
    CHECK(ev["type"] == "event");
    CHECK(ev["kind"] == "RootFound");
    CHECK(std::abs(complex_from_json(ev["root"]) - 1.0) < 1e-12);

    CHECK(svc.track(R"({"poly": )" + kSquare + R"(, "start": {"r": 0.5, "theta": 0.3}})").error.status == 400);
    CHECK(svc.track(R"({"poly": )" + kSquare + R"(, "start": {"r": 0.5}})").error.status == 400);
    CHECK(svc.track(R"({"poly": )" + kSquare + R"(, "start": {"r": 0.5, "theta": 0}, "mode": "up"})").error.status
          == 400);
    const std::string tangent = R"({"coeffs": [[-1, 0], [0, 1], [0, -1]]})";
    const auto t = svc.track(R"({"poly": )" + tangent + R"(, "start": {"r": 1, "theta": 0}})");
    CHECK(t.error.status == 400);
    CHECK(t.records.empty());
}

TEST_CASE("http round trip")
{
    ServiceConfig cfg;
    cfg.port = 0;
    ServiceHost host(cfg);
    const int port = host.bind();
    REQUIRE(port > 0);
    std::thread server([&] { host.run(); });

    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(30, 0);

    auto health = cli.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["status"] == "ok");

    auto curve = cli.Post("/v1/curve", R"({"poly": )" + kSquare + R"(, "r": 2, "samples": 4})", "application/json");
    REQUIRE(curve);
    CHECK(curve->status == 200);
    CHECK(json::parse(curve->body)["crossings"].size() == 4);

    auto solve = cli.Post("/v1/solve", R"({"poly": )" + poly_json(cases::fig1()) + "}", "application/json");
    REQUIRE(solve);
    CHECK(solve->status == 200);
    CHECK(oracle::match_error(cases::kFig1Roots, roots_of(json::parse(solve->body))) < 1e-8);

    auto bad = cli.Post("/v1/solve", "{", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"]["code"] == "malformed");

    auto track = cli.Post("/v1/track", R"({"poly": )" + kSquare + R"(, "start": {"r": 0.5, "theta": 0}})",
                          "application/json");
    REQUIRE(track);
    CHECK(track->status == 200);
    CHECK(track->get_header_value("Content-Type") == "application/x-ndjson");
    const auto recs = ndjson(track->body);
    REQUIRE(recs.size() > 2);
    int events = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i]["type"] == "event") {
            ++events;
            CHECK(i + 1 == recs.size());
        } else {
            CHECK(recs[i]["index"] == i);
        }
    }
    CHECK(events == 1);

    auto rejected = cli.Post("/v1/track", R"({"poly": )" + kSquare + R"(, "start": {"r": 0.5, "theta": 1}})",
                             "application/json");
    REQUIRE(rejected);
    CHECK(rejected->status == 400);

    host.stop();
    server.join();
}

}
