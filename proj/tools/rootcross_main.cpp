#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rootcross/documents.hpp"
#include "rootcross/service.hpp"

namespace {

using namespace rootcross;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIncomplete = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputFlags {
    std::string path;
    std::string coeffs;
    std::string output;
};

struct SolveFlags {
    std::string mode = "parallel";
    std::optional<double> c;
    std::optional<double> tol_residual;
    std::optional<double> tol_root;
    std::optional<int> max_steps;
    std::string dump_path;
    int threads = 0;
};

struct CurveFlags {
    double r = 1.0;
    int samples = 256;
};

void add_input_options(CLI::App& cmd, InputFlags& in)
{
    cmd.add_option("input", in.path, "Polynomial document (JSON); '-' reads stdin");
    cmd.add_option("--coeffs", in.coeffs, "Inline coefficient list, e.g. [[-1,0],[0,0],[1,0]]");
    cmd.add_option("-o,--output", in.output, "Write the result here instead of stdout");
}

Polynomial load_polynomial(const InputFlags& in)
{
    std::string text;
    if (!in.coeffs.empty()) {
        if (!in.path.empty())
            throw InputError("give either an input file or --coeffs, not both");
        text = in.coeffs;
    } else if (in.path.empty() || in.path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream f(in.path);
        if (!f)
            throw InputError("cannot open " + in.path);
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }

    Polynomial p;
    try {
        p = parse_polynomial_document(json::parse(text)).polynomial();
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    } catch (const DocumentError& e) {
        throw InputError(e.what());
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    if (p.degree() < 1)
        throw InputError("degree must be ≥ 1");
    return p;
}

void emit(const InputFlags& in, const json& doc)
{
    if (in.output.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream f(in.output);
    if (!f)
        throw InputError("cannot write " + in.output);
    f << doc.dump(2) << '\n';
}

TrackerOptions tracker_from(const SolveFlags& s)
{
    TrackerOptions t;
    if (s.c) t.c = *s.c;
    if (s.tol_residual) t.residual_tol = *s.tol_residual;
    if (s.tol_root) t.root_tol = *s.tol_root;
    if (s.max_steps) t.max_steps = *s.max_steps;
    t.validate();
    return t;
}

std::ofstream open_dump(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot write " + path);
    return f;
}

int run_solve(const InputFlags& in, const SolveFlags& s)
{
    const Polynomial p = load_polynomial(in);
    SolverOptions opts;
    try {
        opts.tracker = tracker_from(s);
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    opts.threads = s.threads;

    if (s.mode == "single") {
        SingleRoot root;
        try {
            root = locate_single_root(p, opts.tracker);
        } catch (const Error& e) {
            std::cerr << "rootcross: incomplete: " << e.what() << '\n';
            return kExitIncomplete;
        }
        if (!s.dump_path.empty()) {
            auto f = open_dump(s.dump_path);
            write_trajectory_records(f, p, root.trajectory);
        }
        emit(in, to_json(root));
        return kExitOk;
    }

    SolverReport rep;
    try {
        if (s.mode == "parallel") {
            std::vector<Trajectory> tracks;
            rep = solve_parallel(p, opts, s.dump_path.empty() ? nullptr : &tracks);
            if (!s.dump_path.empty()) {
                auto f = open_dump(s.dump_path);
                for (std::size_t i = 0; i < tracks.size(); ++i)
                    write_trajectory_records(f, p, tracks[i], static_cast<int>(i));
            }
        } else {
            if (!s.dump_path.empty())
                std::cerr << "rootcross: deflation mode records no trajectories; ignoring --dump-trajectories\n";
            rep = solve_deflation(p, opts);
        }
    } catch (const Error& e) {
        std::cerr << "rootcross: incomplete: " << e.what() << '\n';
        return kExitIncomplete;
    }
    emit(in, to_json(rep));
    if (!rep.complete) {
        int found = 0;
        for (const RootEntry& e : rep.roots)
            found += e.multiplicity;
        std::cerr << "rootcross: incomplete, found " << found << " of " << rep.degree << " roots\n";
        return kExitIncomplete;
    }
    return kExitOk;
}

int run_curve(const InputFlags& in, const CurveFlags& c)
{
    const Polynomial p = load_polynomial(in);
    if (!(c.r > 0.0))
        throw InputError("--r must be positive");
    if (c.samples < 1)
        throw InputError("--samples must be positive");
    emit(in, curve_document(p, c.r, c.samples));
    return kExitOk;
}

int run_serve(ServiceConfig cfg)
{
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    ServiceHost host(cfg);
    const int port = host.bind();
    std::cerr << "rootcross: serving /v1 on http://" << cfg.host << ':' << port << '\n';
    host.run();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Polynomial roots by tracking real-axis crossings of f(re^{i theta})"};
    app.require_subcommand(0, 1);

    bool serve_flag = false;
    ServiceConfig cfg;
    app.add_flag("--serve", serve_flag, "Start the HTTP service (same as the serve subcommand)")->envname("ROOTCROSS_SERVE");
    app.add_option("--port", cfg.port, "Service port; 0 picks a free port")->envname("ROOTCROSS_PORT");

    InputFlags solve_in;
    SolveFlags solve;
    auto* solve_cmd = app.add_subcommand("solve", "Find all roots and print a report document");
    add_input_options(*solve_cmd, solve_in);
    solve_cmd->add_option("--mode", solve.mode, "parallel | deflation | single")
        ->check(CLI::IsMember({"parallel", "deflation", "single"}))
        ->envname("ROOTCROSS_MODE");
    solve_cmd->add_option("--c", solve.c, "Parameterization switch ratio")->envname("ROOTCROSS_C");
    solve_cmd->add_option("--tol-residual", solve.tol_residual, "Relative residual a polished root must reach")
        ->envname("ROOTCROSS_TOL_RESIDUAL");
    solve_cmd->add_option("--tol-root", solve.tol_root, "Relative |x| that ends a track at a root")
        ->envname("ROOTCROSS_TOL_ROOT");
    solve_cmd->add_option("--max-steps", solve.max_steps, "Step budget per track")->envname("ROOTCROSS_MAX_STEPS");
    solve_cmd->add_option("--dump-trajectories", solve.dump_path, "Write per-step track records (NDJSON) to PATH")
        ->envname("ROOTCROSS_DUMP_TRAJECTORIES");
    solve_cmd->add_option("--threads", solve.threads, "Track workers; 0 uses all cores")->envname("ROOTCROSS_THREADS");

    InputFlags curve_in;
    CurveFlags curve;
    auto* curve_cmd = app.add_subcommand("curve", "Sample f on |z| = r and list its real-axis crossings");
    add_input_options(*curve_cmd, curve_in);
    curve_cmd->add_option("--r", curve.r, "Circle radius")->envname("ROOTCROSS_R");
    curve_cmd->add_option("--samples", curve.samples, "Number of curve samples")->envname("ROOTCROSS_SAMPLES");

    auto* serve_cmd = app.add_subcommand("serve", "Serve the /v1 HTTP endpoints");
    serve_cmd->add_option("--host", cfg.host, "Bind address")->envname("ROOTCROSS_HOST");
    serve_cmd->add_option("--port", cfg.port, "Service port; 0 picks a free port")->envname("ROOTCROSS_PORT");
    serve_cmd->add_option("--max-degree", cfg.max_degree, "Largest accepted degree")->envname("ROOTCROSS_MAX_DEGREE");
    serve_cmd->add_option("--max-samples", cfg.max_samples, "Largest accepted curve sample count")
        ->envname("ROOTCROSS_MAX_SAMPLES");
    serve_cmd->add_option("--max-concurrent-solves", cfg.max_concurrent_solves, "Solve requests admitted at once")
        ->envname("ROOTCROSS_MAX_CONCURRENT_SOLVES");
    serve_cmd->add_option("--solve-threads", cfg.solve_threads, "Track workers per solve; 0 uses all cores")
        ->envname("ROOTCROSS_SOLVE_THREADS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (serve_flag || *serve_cmd)
            return run_serve(cfg);
        if (*solve_cmd)
            return run_solve(solve_in, solve);
        if (*curve_cmd)
            return run_curve(curve_in, curve);
        std::cerr << app.help();
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "rootcross: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "rootcross: " << e.what() << '\n';
        return 1;
    }
}
