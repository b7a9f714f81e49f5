#include <algorithm>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "uavloc/harness.hpp"

namespace uavloc {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "uavloc-plan";
constexpr int kFormatVersion = 1;

json classification_json(const CaseClassification& c) {
    return {{"verdict", to_string(c.verdict)},
            {"dominant", c.dominant},
            {"dominant_weight", c.dominant_weight},
            {"rest_weight", c.rest_weight},
            {"psi_regular", c.psi_regular},
            {"psi_irregular", c.psi_irregular}};
}

int line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

// Field access with path diagnostics.
class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& message) const {
        throw ParseError(source_, 0, field, message);
    }

    const json& member(const json& obj, const std::string& key, const std::string& path) const {
        if (!obj.is_object()) fail(path, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(path + "." + key, "missing field");
        return *it;
    }

    double number(const json& obj, const std::string& key, const std::string& path) const {
        const json& v = member(obj, key, path);
        if (!v.is_number()) fail(path + "." + key, "expected a number");
        return v.get<double>();
    }

    int integer(const json& obj, const std::string& key, const std::string& path) const {
        const json& v = member(obj, key, path);
        if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
        return v.get<int>();
    }

    const json& array(const json& obj, const std::string& key, const std::string& path) const {
        const json& v = member(obj, key, path);
        if (!v.is_array()) fail(path + "." + key, "expected an array");
        return v;
    }

private:
    std::string source_;
};

}  // namespace

void write_plan_file(std::ostream& out, const PlanFile& file) {
    json doc;
    doc["format"] = kFormatTag;
    doc["version"] = kFormatVersion;

    json uav_specs = json::array();
    for (const auto& u : file.scenario.uavs())
        uav_specs.push_back({{"noise_variance", u.noise_variance}, {"measurements", u.measurements}});
    doc["scenario"] = {{"p0", file.scenario.p0()}, {"gamma", file.scenario.gamma()}, {"uavs", uav_specs}};
    doc["constraints"] = {{"min_horizontal", file.constraints.min_horizontal},
                          {"min_height", file.constraints.min_height},
                          {"max_speed", file.constraints.max_speed},
                          {"interval", file.constraints.interval}};
    doc["target"] = {{"x", file.target.x}, {"y", file.target.y}};

    if (file.synthesis) {
        const auto& s = *file.synthesis;
        json states = json::array();
        for (const auto& st : s.uav_states)
            states.push_back({{"state", to_string(st.kind)}, {"flip_after", st.flip_after}});
        doc["synthesis"] = {{"flight_state", to_string(s.state.kind)},
                            {"uav_states", states},
                            {"classification", classification_json(s.classification)},
                            {"r_star", s.radial.r_star},
                            {"h_star", s.radial.h_star},
                            {"achieved_det", s.achieved_det},
                            {"bound", s.bound},
                            {"suboptimal", s.suboptimal}};
    }

    json uavs = json::array();
    for (const auto& list : file.plan.poses()) {
        json poses = json::array();
        for (const auto& p : list)
            poses.push_back({{"r", p.r()},
                             {"h", p.h()},
                             {"beta_rad", p.beta()},
                             {"beta_deg", p.beta() * kRadToDeg}});
        uavs.push_back({{"poses", poses}});
    }
    doc["plan"] = uavs;
    out << doc.dump(2) << '\n';
}

PlanFile read_plan_file(std::istream& in, const std::string& source) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, line_of(text, e.byte), "", "malformed JSON");
    }
    const Reader rd(source);
    if (!doc.is_object()) rd.fail("", "expected a JSON object");
    if (auto it = doc.find("format"); it != doc.end() && *it != kFormatTag)
        rd.fail("format", "not a uavloc plan file");

    PlanFile file;
    const json& sc = rd.member(doc, "scenario", "");
    std::vector<UavSpec> specs;
    const json& uav_specs = rd.array(sc, "uavs", "scenario");
    for (std::size_t i = 0; i < uav_specs.size(); ++i) {
        const std::string path = "scenario.uavs[" + std::to_string(i) + "]";
        specs.push_back({rd.number(uav_specs[i], "noise_variance", path),
                         rd.integer(uav_specs[i], "measurements", path)});
    }
    try {
        file.scenario = Scenario(rd.number(sc, "p0", "scenario"), rd.number(sc, "gamma", "scenario"),
                                 std::move(specs));
    } catch (const InvalidArgument& e) {
        rd.fail("scenario", e.what());
    }

    const json& cs = rd.member(doc, "constraints", "");
    file.constraints = {rd.number(cs, "min_horizontal", "constraints"),
                        rd.number(cs, "min_height", "constraints"),
                        rd.number(cs, "max_speed", "constraints"),
                        rd.number(cs, "interval", "constraints")};
    try {
        file.constraints.validate();
    } catch (const InvalidArgument& e) {
        rd.fail("constraints", e.what());
    }

    const json& tg = rd.member(doc, "target", "");
    file.target = {rd.number(tg, "x", "target"), rd.number(tg, "y", "target")};

    const json& uavs = rd.member(doc, "plan", "");
    if (!uavs.is_array()) rd.fail("plan", "expected an array");
    std::vector<std::vector<MeasurementPose>> poses(uavs.size());
    for (std::size_t i = 0; i < uavs.size(); ++i) {
        const std::string upath = "plan[" + std::to_string(i) + "]";
        const json& list = rd.array(uavs[i], "poses", upath);
        for (std::size_t j = 0; j < list.size(); ++j) {
            const std::string path = upath + ".poses[" + std::to_string(j) + "]";
            const json& p = list[j];
            double beta = 0.0;
            if (p.is_object() && p.contains("beta_rad")) beta = rd.number(p, "beta_rad", path);
            else beta = rd.number(p, "beta_deg", path) * kDegToRad;
            try {
                poses[i].emplace_back(rd.number(p, "r", path), rd.number(p, "h", path), beta);
            } catch (const InvalidArgument& e) {
                rd.fail(path, e.what());
            }
        }
    }
    file.plan = MeasurementPlan(std::move(poses));
    if (!file.plan.matches(file.scenario))
        rd.fail("plan", "pose counts do not match the scenario's UAVs / measurements");
    return file;
}

PlanFile load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    return read_plan_file(in, path);
}

}  // namespace uavloc
