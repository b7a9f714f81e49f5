// uavloc: plan, evaluate and benchmark UAV measurement configurations for
// RSS localization of a ground emitter.
//
// Exit codes: 0 success, 1 infeasible or unsupported input, 2 parse error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "uavloc/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kParseFailure = 2;

struct Options {
    std::string config;
    std::string out;
    std::string plan;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<double> resolution_deg;
    std::string format = "csv";
};

uavloc::ExperimentConfig resolve(const Options& opt, uavloc::ExperimentKind kind) {
    uavloc::ExperimentConfig cfg;
    if (!opt.config.empty()) cfg = uavloc::load_config(opt.config);
    cfg.kind = kind;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.trials) cfg.trials = *opt.trials;
    if (opt.resolution_deg) cfg.resolution_deg = *opt.resolution_deg;
    if (!opt.out.empty()) cfg.output = opt.out;
    if (!opt.plan.empty()) cfg.plan_file = opt.plan;
    cfg.validate();
    return cfg;
}

// Writes to the configured output path, or stdout when none is set.
template <typename Writer>
void emit(const std::string& path, Writer write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw uavloc::InvalidArgument("cannot write " + path);
    write(out);
}

int run(uavloc::ExperimentKind kind, const Options& opt) {
    using namespace uavloc;
    const auto cfg = resolve(opt, kind);
    switch (kind) {
        case ExperimentKind::Plan: {
            const auto run = run_plan(cfg);
            if (cfg.output.empty()) {
                write_plan_file(std::cout, run.file);
            } else {
                emit(cfg.output, [&](std::ostream& o) { write_plan_file(o, run.file); });
                std::cout << plan_summary(run.result);
            }
            return kOk;
        }
        case ExperimentKind::Eval: {
            if (cfg.plan_file.empty()) throw ParseError("eval", 0, "plan_file", "no plan file given");
            const auto report = run_eval(load_plan_file(cfg.plan_file));
            emit(cfg.output, [&](std::ostream& o) {
                if (opt.format == "csv") {
                    o << "det,sqrt_tr_crlb,feasible,violations\n"
                      << format_double(report.fim.det) << ','
                      << (report.sqrt_tr_crlb ? format_double(*report.sqrt_tr_crlb) : "inf") << ','
                      << (report.validation.feasible() ? 1 : 0) << ','
                      << report.validation.violations.size() << '\n';
                } else {
                    o << eval_summary(report);
                }
            });
            if (!cfg.output.empty() || opt.format == "csv") std::cerr << eval_summary(report);
            return report.validation.feasible() ? kOk : kInfeasible;
        }
        case ExperimentKind::Grid: {
            const auto result = run_grid(cfg);
            emit(cfg.output, [&](std::ostream& o) { write_grid_csv(o, result); });
            std::cerr << "max det " << format_double(result.max_det) << " at";
            for (const auto& [b2, b3] : result.argmax)
                std::cerr << " [" << format_double(b2) << ", " << format_double(b3) << "]";
            std::cerr << '\n';
            return kOk;
        }
        case ExperimentKind::Sweep: {
            const auto result = run_sweep(cfg);
            emit(cfg.output, [&](std::ostream& o) { write_sweep_csv(o, result); });
            std::cerr << "det max at r = " << format_double(result.argmax_det_r)
                      << " m, sqrt(tr CRLB) min at r = " << format_double(result.argmin_crlb_r)
                      << " m\n";
            return kOk;
        }
        case ExperimentKind::MonteCarlo: {
            const auto result = run_montecarlo(cfg);
            emit(cfg.output, [&](std::ostream& o) { write_montecarlo_csv(o, result); });
            return kOk;
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    using uavloc::ExperimentKind;
    CLI::App app{"Optimal RSS measurement plans for UAV swarms"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Experiment config file");
        sub->add_option("--out", opt.out, "Output path (default stdout)");
        sub->add_option("--seed", opt.seed, "Random seed");
        sub->add_option("--trials", opt.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
        sub->add_option("--resolution-deg", opt.resolution_deg, "Angle grid resolution (degrees)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "text"}));
    };

    std::optional<ExperimentKind> chosen;
    auto add = [&](const char* name, const char* help, ExperimentKind kind) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        sub->callback([&chosen, kind] { chosen = kind; });
        return sub;
    };
    add("plan", "Synthesize an optimal plan (JSON)", ExperimentKind::Plan);
    add("eval", "Evaluate a plan file", ExperimentKind::Eval)
        ->add_option("--plan", opt.plan, "Plan file to evaluate");
    add("grid", "det(F) over the (beta2, beta3) grid for three hovering UAVs", ExperimentKind::Grid);
    add("sweep", "det(F) and sqrt(tr CRLB) versus horizontal distance", ExperimentKind::Sweep);
    add("montecarlo", "ML localization error versus prior error", ExperimentKind::MonteCarlo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseFailure;
    }

    try {
        return run(*chosen, opt);
    } catch (const uavloc::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParseFailure;
    } catch (const uavloc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfeasible;
    }
}
