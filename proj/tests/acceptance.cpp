// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "uavloc/harness.hpp"

using namespace uavloc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s  %s (%s) [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ExperimentConfig named_case(std::vector<double> variances) {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::uniform(0.0, 3.0, variances, 16);
    cfg.constraints = {60.0, 100.0, 10.0, 5.0};
    return cfg;
}

using PairSet = std::set<std::pair<double, double>>;

PairSet argmax_set(const GridResult& g) { return PairSet(g.argmax.begin(), g.argmax.end()); }

// Random scenario; measurement counts drawn from [m_lo, m_hi].
Scenario random_scenario(std::mt19937_64& rng, int m_lo, int m_hi, bool equal_m) {
    std::uniform_int_distribution<int> n(2, 10), m(m_lo, m_hi);
    std::uniform_real_distribution<double> var(1.0, 40.0), gamma(2.0, 4.5), p0(-40.0, 10.0);
    const int count = n(rng);
    const int common = m(rng);
    std::vector<UavSpec> uavs;
    for (int i = 0; i < count; ++i) uavs.push_back({var(rng), equal_m ? common : m(rng)});
    return Scenario(p0(rng), gamma(rng), uavs);
}

ConstraintSet random_region(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r0(0.0, 250.0), h0(5.0, 250.0), t0(0.2, 10.0);
    return {r0(rng), h0(rng), 0.0, t0(rng)};
}

int min_measurements(const Scenario& s) {
    int m = s.uav(0).measurements;
    for (const auto& u : s.uavs()) m = std::min(m, u.measurements);
    return m;
}

int max_measurements(const Scenario& s) {
    int m = s.uav(0).measurements;
    for (const auto& u : s.uavs()) m = std::max(m, u.measurements);
    return m;
}

// ---- criteria ----------------------------------------------------------------

Outcome grid_case_a() {
    const auto t0 = Clock::now();
    const auto g = run_grid(named_case({16, 16, 16}));
    const double dt = seconds_since(t0);
    const PairSet expect{{60, 120}, {60, 300}, {120, 60}, {120, 240},
                         {240, 120}, {240, 300}, {300, 60}, {300, 240}};
    const bool ok = argmax_set(g) == expect && dt < 10.0;
    return {ok, std::to_string(g.argmax.size()) + " argmax points, " + (argmax_set(g) == expect ? "set matches" : "set differs") +
                    fmt(", grid %.2f s", dt)};
}

Outcome grid_cases_bcd() {
    const PairSet expect{{90, 90}, {90, 270}, {270, 90}, {270, 270}};
    std::string detail;
    bool ok = true;
    for (auto [name, var] : {std::pair{"c", std::vector<double>{2, 8, 16}}, {"d", {2, 16, 16}}}) {
        const auto t0 = Clock::now();
        const auto g = run_grid(named_case(var));
        const double dt = seconds_since(t0);
        const bool match = argmax_set(g) == expect;
        ok = ok && match && dt < 10.0;
        detail += std::string("case ") + name + (match ? " set matches" : " set differs") + fmt(" %.2f s; ", dt);
    }
    const auto t0 = Clock::now();
    const auto g = run_grid(named_case({8, 12, 16}));
    const double dt = seconds_since(t0);
    double best = 1e9;
    for (const auto& [b2, b3] : g.argmax) best = std::min(best, std::max(std::abs(b2 - 103), std::abs(b3 - 72)));
    ok = ok && best <= 2.0 && dt < 10.0;
    detail += fmt("case b nearest argmax %.0f deg from [103, 72]", best) + fmt(" %.2f s", dt);
    return {ok, detail};
}

Outcome closed_form_equality() {
    std::mt19937_64 rng(2024);
    const int per_regime = 200;
    double worst[4] = {0, 0, 0, 0};
    double worst_flip = 0;
    int wrong_state = 0;

    for (int n = 0; n < per_regime; ++n) {
        // hovering, mixed measurement counts, regular or irregular
        const auto s = random_scenario(rng, 1, 20, false);
        auto c = random_region(rng);
        const auto rs = radial_optimum(c);
        const auto cls = classify(aggregated_weights(s, rs.r_star, rs.h_star));
        const auto p = plan_hovering(s, c);
        worst[0] = std::max(worst[0], rel(fim(p.plan, s).det, cls.hovering_bound()));
    }
    int drawn = 0;
    while (drawn < per_regime) {
        // below half circle: the closed form holds for regular sets with equal M
        const auto s = random_scenario(rng, 1, 20, true);
        auto c = random_region(rng);
        const auto rs = radial_optimum(c);
        const auto ws = aggregated_weights(s, rs.r_star, rs.h_star);
        if (!is_regular(ws.weights)) continue;
        const int m = s.uav(0).measurements;
        c.max_speed = std::uniform_real_distribution<double>(0.01, 0.99)(rng) * kPi * rs.r_star / (c.interval * m);
        if (flight_state(c, m, rs.r_star).kind != FlightStateKind::BelowHalfCircle) ++wrong_state;
        const auto p = plan_below_half(s, c);
        worst[1] = std::max(worst[1], rel(fim(p.plan, s).det, max_det_regular(ws)));
        ++drawn;
    }
    for (int n = 0; n < per_regime; ++n) {
        // beyond half circle, every UAV in that state
        std::uniform_int_distribution<int> lo(3, 16);
        const int m_lo = lo(rng);
        const int m_hi = std::max(m_lo, static_cast<int>(1.4 * m_lo));
        const auto s = random_scenario(rng, m_lo, m_hi, false);
        auto c = random_region(rng);
        const auto rs = radial_optimum(c);
        const double u_hi = 2.0 * min_measurements(s) / max_measurements(s);
        const double u = std::uniform_real_distribution<double>(1.0, u_hi)(rng);
        c.max_speed = std::nextafter(u * kPi * rs.r_star / (c.interval * min_measurements(s)), 1e300);
        const auto a = plan_auto(s, c);
        if (a.state.kind != FlightStateKind::BeyondHalfCircle) ++wrong_state;
        worst[2] = std::max(worst[2], rel(a.achieved_det, max_det_regular(aggregated_weights(s, rs.r_star, rs.h_star))));
        // literal flipped array against the uniform one, speed unconstrained
        ConstraintSet fast = c;
        fast.max_speed = 1e9;
        const double flip = fim(plan_beyond_half(s, fast).plan, s).det;
        const double uaa = fim(plan_full_circle(s, fast).plan, s).det;
        worst_flip = std::max(worst_flip, rel(flip, uaa));
    }
    for (int n = 0; n < per_regime; ++n) {
        const auto s = random_scenario(rng, 2, 20, false);
        auto c = random_region(rng);
        const auto rs = radial_optimum(c);
        const double u = std::uniform_real_distribution<double>(1.0, 3.0)(rng);
        c.max_speed = std::nextafter(u * 2.0 * kPi * rs.r_star / (c.interval * min_measurements(s)), 1e300);
        const auto p = plan_full_circle(s, c);
        if (flight_state(c, min_measurements(s), rs.r_star).kind != FlightStateKind::FullCircle) ++wrong_state;
        worst[3] = std::max(worst[3], rel(fim(p.plan, s).det, max_det_regular(aggregated_weights(s, rs.r_star, rs.h_star))));
    }
    const bool ok = *std::max_element(worst, worst + 4) <= 1e-9 && worst_flip <= 1e-12 && wrong_state == 0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "max rel err hover %.1e, below %.1e, beyond %.1e, full %.1e; flipped vs uniform %.1e; %d off-regime",
                  worst[0], worst[1], worst[2], worst[3], worst_flip, wrong_state);
    return {ok, buf};
}

Outcome fd_oracle() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> pos(-500.0, 500.0), frac(0.0, 2.5);
    double worst = 0;
    int plans = 0;
    while (plans < 100) {
        const auto s = random_scenario(rng, 1, 20, plans % 2 == 0);
        auto c = random_region(rng);
        c.max_speed = plans % 4 == 0 ? 0.0 : frac(rng) * kPi * radial_optimum(c).r_star / (c.interval * min_measurements(s));
        const auto a = plan_auto(s, c);
        if (!validate_plan(a.plan, c, {}).feasible()) return {false, "synthesized plan infeasible"};
        const TargetPosition t{pos(rng), pos(rng)};
        const Eigen::Matrix2d f = fim(a.plan, t, s).matrix;
        const Eigen::Matrix2d o = fim_fd_oracle(a.plan, t, s);
        worst = std::max(worst, (f - o).norm() / f.norm());
        ++plans;
    }
    return {worst <= 1e-6, fmt("max relative Frobenius error %.2e over 100 plans", worst)};
}

Outcome distance_sweep() {
    auto cfg = named_case({8, 12, 16});
    cfg.r_max = 300;
    cfg.r_step = 1;
    std::string detail;
    bool ok = true;
    const auto t0 = Clock::now();
    for (auto mode : {SweepMode::AllUavs, SweepMode::SingleUav}) {
        cfg.sweep_mode = mode;
        const auto r = run_sweep(cfg);
        ok = ok && r.argmax_det_r == 100.0 && r.argmin_crlb_r == 100.0;
        detail += std::string(mode == SweepMode::AllUavs ? "all" : "single") + fmt(": det max r=%.0f", r.argmax_det_r) +
                  fmt(", crlb min r=%.0f; ", r.argmin_crlb_r);
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 5.0;
    return {ok, detail + fmt("%.3f s", dt)};
}

Outcome closure_residuals() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> n(2, 50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&] {
        std::vector<double> w(n(rng));
        const int shape = static_cast<int>(u(rng) * 3);
        for (auto& x : w) x = shape == 0 ? u(rng) : shape == 1 ? std::pow(u(rng), 4) : std::exp(4 * u(rng));
        return w;
    };
    double worst = 0;
    int regular = 0;
    while (regular < 1000) {
        const auto w = draw();
        if (!is_regular(w)) continue;
        double sum = 0;
        for (double x : w) sum += x;
        worst = std::max(worst, closure_residual(w, regular_angles(w)) / sum);
        ++regular;
    }
    int thrown = 0;
    const int irregular = 1000;
    for (int k = 0; k < irregular; ++k) {
        // one weight pushed past the sum of the others, at a random slot
        auto w = draw();
        double rest = 0;
        for (double x : w) rest += x;
        const std::size_t slot = static_cast<std::size_t>(u(rng) * static_cast<double>(w.size()));
        rest -= w[slot];
        w[slot] = rest * (1.0 + u(rng)) * (1.0 + 1e-12);
        try {
            regular_angles(w);
        } catch (const InfeasibleClosure&) {
            ++thrown;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max residual %.1e of sum w over %d regular sets; %d/%d irregular sets rejected",
                  worst, regular, thrown, irregular);
    return {worst <= 1e-9 && thrown == irregular, buf};
}

// Standard error of rmse_b - rmse_a from paired per-trial squared errors.
double gap_se(const MonteCarloCell& a, const MonteCarloCell& b) {
    const std::size_t n = a.squared_errors.size();
    std::vector<double> d(n);
    double mean = 0;
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = b.squared_errors[t] / (2 * b.rmse) - a.squared_errors[t] / (2 * a.rmse);
        mean += d[t];
    }
    mean /= static_cast<double>(n);
    double var = 0;
    for (double x : d) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n));
}

Outcome robustness_ordering() {
    std::vector<double> var(10, 12.0);
    var.insert(var.end(), 5, 16.0);
    ExperimentConfig cfg = named_case(var);
    cfg.trials = 500;
    cfg.prior_std = {0, 10, 20, 40};
    const auto t0 = Clock::now();
    const auto r = run_montecarlo(cfg);
    const double dt = seconds_since(t0);
    const double v = cfg.prior_std.back();
    const Configuration order[] = {Configuration::FullCircle, Configuration::BeyondHalf, Configuration::BelowHalf,
                                   Configuration::Hovering};
    bool ok = dt < 300.0;
    std::string detail = "rmse at std 40:";
    for (auto c : order) detail += std::string(" ") + to_string(c) + fmt("=%.3f", r.cell(c, v).rmse);
    detail += "; gaps/se:";
    for (int i = 0; i < 3; ++i) {
        const auto& a = r.cell(order[i], v);
        const auto& b = r.cell(order[i + 1], v);
        const double gap = b.rmse - a.rmse;
        const double se = gap_se(a, b);
        ok = ok && gap >= -se;
        detail += fmt(" %+.2f", gap / se);
    }
    return {ok, detail + fmt("; %.1f s", dt)};
}

Outcome estimator_sanity() {
    // noiseless recovery
    const auto quiet = Scenario::uniform(0.0, 3.0, {1e-24, 1e-24, 1e-24}, 16);
    const ConstraintSet c{60, 100, 10, 5};
    const TargetPosition truth{7.25, -18.5};
    const auto plan = plan_full_circle(quiet, c).plan;
    auto rng = trial_stream(3, 0);
    const auto clean = simulate(plan_positions(plan, truth), truth, quiet, rng);
    const auto e0 = ml_estimate(clean, quiet, SearchRegion::around({0, 0}, 100.0, 41));
    const double err0 = std::hypot(e0.estimate.x - truth.x, e0.estimate.y - truth.y);

    // Monte Carlo against the bound
    const auto s = Scenario::uniform(0.0, 3.0, {16, 16, 16}, 16);
    const auto full = plan_full_circle(s, c).plan;
    const double bound = crlb_rmse_bound(full, truth, s);
    const int trials = 1000;
    double sum = 0;
    for (int t = 0; t < trials; ++t) {
        const auto rec = simulate(full, truth, s, 1000 + static_cast<std::uint64_t>(t));
        const auto e = ml_estimate(rec, s, SearchRegion::around(truth, 100.0, 41));
        sum += std::pow(e.estimate.x - truth.x, 2) + std::pow(e.estimate.y - truth.y, 2);
    }
    const double rmse = std::sqrt(sum / trials);
    char buf[160];
    std::snprintf(buf, sizeof buf, "noiseless error %.1e m; rmse %.3f vs sqrt(tr crlb) %.3f, ratio %.3f", err0, rmse,
                  bound, rmse / bound);
    return {err0 <= 1e-6 && rmse >= 0.97 * bound, buf};
}

Outcome constraint_compliance() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0, violations = 0, errors = 0;
    std::string first;
    auto check = [&](const MeasurementPlan& p, const ConstraintSet& c, const char* who) {
        ++checked;
        if (!validate_plan(p, c, {}).feasible()) {
            ++violations;
            if (first.empty()) first = who;
        }
    };
    for (int n = 0; n < 10000; ++n) {
        const auto s = random_scenario(rng, 1, 24, u(rng) < 0.5);
        auto c = random_region(rng);
        const double r_star = radial_optimum(c).r_star;
        // speeds spread over every regime, including exact thresholds
        const double pick = u(rng);
        if (pick < 0.1) c.max_speed = 0.0;
        else if (pick < 0.2) c.max_speed = kPi * r_star / (c.interval * min_measurements(s));
        else if (pick < 0.3) c.max_speed = 2.0 * kPi * r_star / (c.interval * min_measurements(s));
        else c.max_speed = 3.0 * u(rng) * kPi * r_star / (c.interval * min_measurements(s));
        try {
            check(plan_auto(s, c).plan, c, "plan_auto");
        } catch (const std::exception& e) {
            ++errors;
            if (first.empty()) first = e.what();
        }
        // the individual planners either refuse or return a feasible plan
        auto attempt = [&](const char* who, auto planner) {
            try {
                check(planner().plan, c, who);
            } catch (const InfeasibleSpeed&) {
            } catch (const InvalidArgument&) {
            }
        };
        attempt("plan_hovering", [&] { return plan_hovering(s, c); });
        attempt("plan_below_half", [&] { return plan_below_half(s, c, u(rng)); });
        attempt("plan_full_circle", [&] { return plan_full_circle(s, c); });
        attempt("plan_beyond_half", [&] { return plan_beyond_half(s, c); });
        attempt("plan_half_sweep", [&] { return plan_half_sweep(s, c); });
    }
    std::string detail = std::to_string(checked) + " plans from 10000 constraint sets, " + std::to_string(violations) +
                         " infeasible, " + std::to_string(errors) + " plan_auto errors";
    if (!first.empty()) detail += "; first: " + first;
    return {violations == 0 && errors == 0, detail};
}

}  // namespace

int main() {
    report(1, "case (a) grid argmax is the eight known optima", grid_case_a);
    report(2, "cases (c)/(d) grid argmax, case (b) near [103, 72]", grid_cases_bcd);
    report(3, "synthesized det equals the closed-form optimum", closed_form_equality);
    report(4, "fim agrees with the finite-difference reconstruction", fd_oracle);
    report(5, "distance sweep optimum at r = h0 = 100 m", distance_sweep);
    report(6, "regular_angles closes; irregular sets rejected", closure_residuals);
    report(7, "rmse ordering full <= beyond <= below <= hovering at the largest prior error", robustness_ordering);
    report(8, "ml estimator: noiseless recovery and rmse vs crlb", estimator_sanity);
    report(9, "synthesized plans satisfy the region and speed constraints", constraint_compliance);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
