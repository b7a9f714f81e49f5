#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "uavloc/harness.hpp"

namespace uavloc {

ParseError::ParseError(const std::string& source, int line, const std::string& field,
                       const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
            (field.empty() ? std::string() : " [" + field + "]") + ": " + message),
      line_(line),
      field_(field) {}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Plan: return "plan";
        case ExperimentKind::Eval: return "eval";
        case ExperimentKind::Grid: return "grid";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::MonteCarlo: return "montecarlo";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    constraints.validate();
    if (!(resolution_deg > 0.0)) throw InvalidArgument("resolution_deg must be > 0");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (!(r_step > 0.0)) throw InvalidArgument("r_step must be > 0");
    if (grid_points < 2) throw InvalidArgument("grid_points must be >= 2");
    for (double v : prior_std)
        if (!(v >= 0.0)) throw InvalidArgument("prior_std entries must be >= 0");
    if (!(below_half_arc > 0.0 && below_half_arc < 1.0))
        throw InvalidArgument("below_half_arc must lie in (0, 1)");
    if (!(beyond_half_arc >= 1.0 && beyond_half_arc < 2.0))
        throw InvalidArgument("beyond_half_arc must lie in [1, 2)");
    if (!(full_circle_arc >= 2.0)) throw InvalidArgument("full_circle_arc must be >= 2");
}

namespace {

struct Entry {
    std::string value;
    int line;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class IniReader {
public:
    IniReader(std::istream& in, std::string source) : source_(std::move(source)) {
        std::string raw;
        std::string section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto comment = raw.find_first_of("#;");
            const std::string text = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
            if (text.empty()) continue;
            if (text.front() == '[') {
                if (text.back() != ']') throw ParseError(source_, line, "", "unterminated section header");
                section = trim(text.substr(1, text.size() - 2));
                if (!known_section(section))
                    throw ParseError(source_, line, section, "unknown section");
                sections_[section];
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) throw ParseError(source_, line, "", "expected key = value");
            if (section.empty()) throw ParseError(source_, line, "", "key outside of a section");
            const std::string key = trim(text.substr(0, eq));
            const std::string field = section + "." + key;
            if (key.empty()) throw ParseError(source_, line, "", "empty key");
            if (sections_[section].count(key)) throw ParseError(source_, line, field, "duplicate key");
            sections_[section][key] = {trim(text.substr(eq + 1)), line};
        }
    }

    const std::string& source() const { return source_; }

    const Entry* find(const std::string& section, const std::string& key) {
        auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        auto e = s->second.find(key);
        if (e == s->second.end()) return nullptr;
        consumed_.insert({section, key});
        return &e->second;
    }

    void reject_unknown_keys() const {
        for (const auto& [name, section] : sections_)
            for (const auto& [key, entry] : section)
                if (!consumed_.count({name, key}))
                    throw ParseError(source_, entry.line, name + "." + key, "unknown key");
    }

private:
    static bool known_section(const std::string& s) {
        return s == "scenario" || s == "constraints" || s == "target" || s == "experiment";
    }

    std::string source_;
    std::map<std::string, Section> sections_;
    std::set<std::pair<std::string, std::string>> consumed_;
};

double to_number(IniReader& ini, const Entry& entry, const std::string& field,
                 const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError(ini.source(), entry.line, field, "expected a number, got '" + text + "'");
    return value;
}

std::vector<double> to_list(IniReader& ini, const Entry& entry, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(entry.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(ini, entry, field, trim(item)));
    if (out.empty()) throw ParseError(ini.source(), entry.line, field, "expected a list of numbers");
    return out;
}

int to_int(IniReader& ini, const Entry& entry, const std::string& field, double value) {
    if (value != std::floor(value) || std::abs(value) > 1e9)
        throw ParseError(ini.source(), entry.line, field, "expected an integer");
    return static_cast<int>(value);
}

template <typename Apply>
void read_number(IniReader& ini, const std::string& section, const std::string& key, Apply apply) {
    if (const Entry* e = ini.find(section, key)) {
        const std::string field = section + "." + key;
        apply(to_number(ini, *e, field, e->value), *e, field);
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    IniReader ini(in, source);
    ExperimentConfig cfg;

    // [scenario]
    double p0 = cfg.scenario.p0();
    double gamma = cfg.scenario.gamma();
    std::vector<double> variances;
    for (const auto& u : cfg.scenario.uavs()) variances.push_back(u.noise_variance);
    std::vector<int> counts;
    for (const auto& u : cfg.scenario.uavs()) counts.push_back(u.measurements);
    int scenario_line = 0;

    read_number(ini, "scenario", "p0", [&](double v, const Entry&, const std::string&) { p0 = v; });
    read_number(ini, "scenario", "gamma", [&](double v, const Entry& e, const std::string& f) {
        if (!(v > 0.0)) throw ParseError(source, e.line, f, "gamma must be > 0");
        gamma = v;
    });
    const Entry* var_entry = ini.find("scenario", "noise_variances");
    if (var_entry) {
        variances = to_list(ini, *var_entry, "scenario.noise_variances");
        scenario_line = var_entry->line;
        for (double v : variances)
            if (!(v > 0.0))
                throw ParseError(source, var_entry->line, "scenario.noise_variances",
                                 "variances must be > 0");
    }
    if (const Entry* e = ini.find("scenario", "measurements")) {
        const auto list = to_list(ini, *e, "scenario.measurements");
        counts.clear();
        for (double v : list) {
            const int m = to_int(ini, *e, "scenario.measurements", v);
            if (m < 1) throw ParseError(source, e->line, "scenario.measurements", "must be >= 1");
            counts.push_back(m);
        }
        if (counts.size() == 1) counts.assign(variances.size(), counts.front());
        if (counts.size() != variances.size())
            throw ParseError(source, e->line, "scenario.measurements",
                             "needs one value or one per noise variance");
        scenario_line = e->line;
    } else if (counts.size() != variances.size()) {
        counts.assign(variances.size(), counts.empty() ? 16 : counts.front());
    }
    {
        std::vector<UavSpec> uavs;
        for (std::size_t i = 0; i < variances.size(); ++i) uavs.push_back({variances[i], counts[i]});
        try {
            cfg.scenario = Scenario(p0, gamma, std::move(uavs));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, scenario_line, "scenario", e.what());
        }
    }

    // [constraints]
    auto constraint = [&](const char* key, double& slot, bool strictly_positive) {
        read_number(ini, "constraints", key, [&](double v, const Entry& e, const std::string& f) {
            if (strictly_positive ? !(v > 0.0) : !(v >= 0.0))
                throw ParseError(source, e.line, f, strictly_positive ? "must be > 0" : "must be >= 0");
            slot = v;
        });
    };
    constraint("min_horizontal", cfg.constraints.min_horizontal, false);
    constraint("min_height", cfg.constraints.min_height, true);
    constraint("max_speed", cfg.constraints.max_speed, false);
    constraint("interval", cfg.constraints.interval, true);

    // [target]
    read_number(ini, "target", "x", [&](double v, const Entry&, const std::string&) { cfg.target.x = v; });
    read_number(ini, "target", "y", [&](double v, const Entry&, const std::string&) { cfg.target.y = v; });
    cfg.prior = cfg.target;
    read_number(ini, "target", "prior_x", [&](double v, const Entry&, const std::string&) { cfg.prior.x = v; });
    read_number(ini, "target", "prior_y", [&](double v, const Entry&, const std::string&) { cfg.prior.y = v; });

    // [experiment]
    if (const Entry* e = ini.find("experiment", "kind")) {
        const std::string& k = e->value;
        if (k == "plan") cfg.kind = ExperimentKind::Plan;
        else if (k == "eval") cfg.kind = ExperimentKind::Eval;
        else if (k == "grid") cfg.kind = ExperimentKind::Grid;
        else if (k == "sweep") cfg.kind = ExperimentKind::Sweep;
        else if (k == "montecarlo") cfg.kind = ExperimentKind::MonteCarlo;
        else throw ParseError(source, e->line, "experiment.kind", "unknown experiment '" + k + "'");
    }
    read_number(ini, "experiment", "resolution_deg", [&](double v, const Entry& e, const std::string& f) {
        if (!(v > 0.0)) throw ParseError(source, e.line, f, "must be > 0");
        cfg.resolution_deg = v;
    });
    read_number(ini, "experiment", "trials", [&](double v, const Entry& e, const std::string& f) {
        cfg.trials = to_int(ini, e, f, v);
        if (cfg.trials < 1) throw ParseError(source, e.line, f, "must be >= 1");
    });
    read_number(ini, "experiment", "seed", [&](double v, const Entry& e, const std::string& f) {
        if (v < 0.0 || v != std::floor(v) || v > 9007199254740992.0)
            throw ParseError(source, e.line, f, "expected a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(v);
    });
    if (const Entry* e = ini.find("experiment", "output")) cfg.output = e->value;
    if (const Entry* e = ini.find("experiment", "plan_file")) cfg.plan_file = e->value;
    if (const Entry* e = ini.find("experiment", "sweep")) {
        if (e->value == "all") cfg.sweep_mode = SweepMode::AllUavs;
        else if (e->value == "single") cfg.sweep_mode = SweepMode::SingleUav;
        else throw ParseError(source, e->line, "experiment.sweep", "expected 'all' or 'single'");
    }
    read_number(ini, "experiment", "sweep_uav", [&](double v, const Entry& e, const std::string& f) {
        const int idx = to_int(ini, e, f, v);
        if (idx < 0 || static_cast<std::size_t>(idx) >= cfg.scenario.size())
            throw ParseError(source, e.line, f, "UAV index out of range");
        cfg.sweep_uav = static_cast<std::size_t>(idx);
    });
    read_number(ini, "experiment", "r_max", [&](double v, const Entry&, const std::string&) { cfg.r_max = v; });
    read_number(ini, "experiment", "r_step", [&](double v, const Entry& e, const std::string& f) {
        if (!(v > 0.0)) throw ParseError(source, e.line, f, "must be > 0");
        cfg.r_step = v;
    });
    if (const Entry* e = ini.find("experiment", "prior_std")) {
        cfg.prior_std = to_list(ini, *e, "experiment.prior_std");
        for (double v : cfg.prior_std)
            if (v < 0.0) throw ParseError(source, e->line, "experiment.prior_std", "must be >= 0");
    }
    read_number(ini, "experiment", "grid_points", [&](double v, const Entry& e, const std::string& f) {
        cfg.grid_points = to_int(ini, e, f, v);
        if (cfg.grid_points < 2) throw ParseError(source, e.line, f, "must be >= 2");
    });
    read_number(ini, "experiment", "below_half_arc", [&](double v, const Entry&, const std::string&) { cfg.below_half_arc = v; });
    read_number(ini, "experiment", "beyond_half_arc", [&](double v, const Entry&, const std::string&) { cfg.beyond_half_arc = v; });
    read_number(ini, "experiment", "full_circle_arc", [&](double v, const Entry&, const std::string&) { cfg.full_circle_arc = v; });

    ini.reject_unknown_keys();
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(source, 0, "", e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    return parse_config(in, path);
}

}  // namespace uavloc
