// Command-line front end: exact solves, cut separation, robust counterparts,
// instance generation, the experiment grid and worst-case evaluation.
//
// Exit codes: 0 success, 1 usage or malformed input, 2 solver failure, 3 I/O.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "persp/persp.hpp"

namespace {

using persp::io::json;

constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

void print(const json& j) { std::cout << j.dump() << '\n'; }

json relaxation_json(const persp::RelaxationSolution& r) {
    std::vector<int> rz(r.rounded_z.begin(), r.rounded_z.end());
    return {{"z_bar", r.z_bar},         {"value", r.value},
            {"rounded_z", rz},          {"rounded_value", r.rounded_value},
            {"fractional_count", r.fractional_count}, {"gap", r.gap}};
}

int run_solve(const std::string& path, const std::string& method, bool relax) {
    const auto inst = persp::io::problem_instance_from_json(persp::io::read_json_file(path));
    if (relax) {
        print(relaxation_json(persp::solve_relaxation(inst)));
        return 0;
    }
    const bool sortable = inst.zfam.kind() == persp::ZKind::CardinalityEQ &&
                          std::all_of(inst.c.begin(), inst.c.end(), [](double v) { return v == 0.0; });
    if (method == "sort" || (method == "auto" && sortable)) {
        if (!sortable) throw persp::DomainError("--method sort needs c = 0 and a card_eq family");
        print(persp::io::to_json(persp::solve_discrete_sort(inst.a, inst.zfam.k())));
    } else {
        print(persp::io::to_json(persp::solve_discrete_bruteforce(inst)));
    }
    return 0;
}

int run_cuts(const std::string& path, std::vector<double> alpha, const std::string& mode) {
    const auto doc = persp::io::read_json_file(path);
    const auto point = persp::io::mixed_point_from_json(doc);
    if (alpha.empty()) {
        if (!doc.contains("alpha")) throw persp::DomainError("no alpha given (use --alpha or an \"alpha\" field)");
        alpha = persp::io::vector_from_json(doc.at("alpha"), "alpha");
    }
    const persp::CutVector cv(std::move(alpha));
    const auto sep = mode == "exact" ? persp::SeparationMode::Exact : persp::SeparationMode::Heuristic;
    json out = json::array();
    for (const auto& c : persp::violated_submodular_cuts(point, cv, sep)) out.push_back(persp::io::to_json(c));
    print(out);
    return 0;
}

int run_robust(const std::string& path, const std::string& method_name, double tol, std::size_t max_iter) {
    const auto inst = persp::io::robust_instance_from_json(persp::io::read_json_file(path));
    const auto method = persp::parse_method(method_name);
    if (!method) throw persp::DomainError("unknown method '" + method_name + "'");
    persp::SolveOptions opts;
    opts.tol.solver_rel = tol;
    opts.max_iter = max_iter;
    print(persp::io::to_json(persp::solve_counterpart(*method, inst, opts), inst));
    return 0;
}

int run_gen(std::size_t n, std::size_t k, double b, std::uint64_t seed, const std::string& out) {
    const auto inst = persp::generate_instance(n, k, b, seed);
    auto j = persp::io::to_json(inst);
    j["seed"] = seed;
    j["rng"] = persp::Xoshiro256::kName;
    if (out.empty()) print(j);
    else persp::write_text_file(out, j.dump(2) + "\n");
    return 0;
}

int run_experiment(const std::string& config_path, const std::string& out_dir, bool timing) {
    persp::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = persp::io::experiment_config_from_json(persp::io::read_json_file(config_path));
    const auto records = persp::run_experiment(cfg);
    persp::ReportOptions ro;
    ro.include_timing = timing;
    persp::emit_report(records, persp::ReportFormat::Csv, out_dir, ro);
    persp::emit_report(records, persp::ReportFormat::SvgScatter, out_dir, ro);
    json meta = persp::io::to_json(cfg);
    meta["rng"] = persp::Xoshiro256::kName;
    meta["d_floor"] = persp::kMinScaling;
    meta["seed_derivation"] = "splitmix64(seed ^ (k_index << 48) ^ (b_index << 32) ^ instance)";
    persp::write_text_file(std::filesystem::path(out_dir) / "metadata.json", meta.dump(2) + "\n");
    std::size_t failures = 0;
    for (const auto& r : records) failures += r.error ? 1 : 0;
    print({{"records", records.size()}, {"failures", failures}, {"out", out_dir}});
    return failures == 0 ? 0 : kExitSolver;
}

int run_eval(const std::string& path, const std::vector<double>& y) {
    const auto inst = persp::io::robust_instance_from_json(persp::io::read_json_file(path));
    const persp::PortfolioPoint point(y, 1e-6);
    print({{"worst_case", persp::worst_case(point, inst)},
           {"nominal_value", persp::nominal_value(point.y(), inst)},
           {"perspective", persp::perspective_value(point, inst)},
           {"budgeted", persp::budgeted_value(point, inst)},
           {"ellipsoidal", persp::ellipsoidal_value(point, inst)}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-integer sets with indicators: exact solves, cuts and robust counterparts"};
    app.require_subcommand(1);

    std::string instance, method = "auto", point, mode = "heuristic", out, config;
    std::vector<double> alpha, y;
    bool relax = false, no_timing = false;
    double tol = 1e-6, b = 5.0;
    std::size_t max_iter = 200000, n = 200, k = 5;
    std::uint64_t seed = 1;

    auto* solve = app.add_subcommand("solve", "exact solve of min a'x + c'z over X");
    solve->add_option("--instance", instance, "problem instance JSON")->required();
    solve->add_option("--method", method, "auto, bruteforce or sort")
        ->check(CLI::IsMember({"auto", "bruteforce", "sort"}));
    solve->add_flag("--relaxation", relax, "solve the natural convex relaxation instead");

    auto* cuts = app.add_subcommand("cuts", "separate submodular cuts at a point");
    cuts->add_option("--point", point, "point JSON {\"x\": [...], \"z\": [...]}")->required();
    cuts->add_option("--alpha", alpha, "cut direction, comma separated")->delimiter(',');
    cuts->add_option("--mode", mode, "heuristic or exact")->check(CLI::IsMember({"heuristic", "exact"}));

    std::string robust_method;
    auto* robust = app.add_subcommand("robust", "solve a robust counterpart over the simplex");
    robust->add_option("--method", robust_method, "nominal, budgeted, ellipsoidal or perspective")
        ->required()
        ->check(CLI::IsMember({"nominal", "budgeted", "ellipsoidal", "perspective"}));
    robust->add_option("--instance", instance, "robust instance JSON")->required();
    robust->add_option("--tol", tol, "relative optimality tolerance")->check(CLI::PositiveNumber);
    robust->add_option("--max-iter", max_iter, "iteration cap");

    auto* gen = app.add_subcommand("gen", "generate a random robust instance");
    gen->add_option("--n", n)->check(CLI::PositiveNumber);
    gen->add_option("--k", k)->check(CLI::PositiveNumber);
    gen->add_option("--b", b)->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", seed);
    gen->add_option("--out", out, "output file (stdout when omitted)");

    auto* experiment = app.add_subcommand("experiment", "run the (k, b) experiment grid");
    experiment->add_option("--config", config, "experiment config JSON (defaults when omitted)");
    experiment->add_option("--out", out, "output directory")->required();
    experiment->add_flag("--no-timing", no_timing, "leave the time_s column empty");

    auto* eval = app.add_subcommand("eval", "evaluate the worst case of a portfolio");
    eval->add_option("--instance", instance, "robust instance JSON")->required();
    eval->add_option("--y", y, "portfolio weights, comma separated")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve) return run_solve(instance, method, relax);
        if (*cuts) return run_cuts(point, alpha, mode);
        if (*robust) return run_robust(instance, robust_method, tol, max_iter);
        if (*gen) return run_gen(n, k, b, seed, out);
        if (*experiment) return run_experiment(config, out, !no_timing);
        if (*eval) return run_eval(instance, y);
    } catch (const persp::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const persp::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const persp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
