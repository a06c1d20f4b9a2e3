#include "cmcglue/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "cmcglue/clifford.hpp"
#include "cmcglue/error.hpp"

namespace cmcglue {

namespace {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(std::string("config field '") + key + "' has the wrong type");
    }
}

} // namespace

GeneratorSpec generator_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind"))
        throw config_error(path + ": generator must be an object with a 'kind'");
    GeneratorSpec g;
    g.kind = j.at("kind").get<std::string>();
    if (g.kind == "rotation") {
        if (!j.contains("factor") || !j.contains("plane") || !j.contains("angle_num")
            || !j.contains("angle_den"))
            throw config_error(path + ": rotation needs factor, plane, angle_num, angle_den");
        g.factor = j.at("factor").get<std::string>();
        const auto plane = j.at("plane");
        if (!plane.is_array() || plane.size() != 2)
            throw config_error(path + ".plane: expected [a, b]");
        g.plane_a = plane[0].get<int>();
        g.plane_b = plane[1].get<int>();
        g.angle_num = j.at("angle_num").get<long>();
        g.angle_den = j.at("angle_den").get<long>();
    } else if (g.kind == "signs") {
        if (!j.contains("x_signs") || !j.contains("y_signs"))
            throw config_error(path + ": signs needs x_signs and y_signs");
        g.x_signs = j.at("x_signs").get<std::vector<int>>();
        g.y_signs = j.at("y_signs").get<std::vector<int>>();
    } else if (g.kind == "matrix") {
        const auto read = [&](const char* key) {
            const auto& rows = j.at(key);
            Eigen::MatrixXd m(rows.size(), rows.size());
            for (size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows.size())
                    throw config_error(path + "." + key + ": matrix must be square");
                for (size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c].get<double>();
            }
            return m;
        };
        if (!j.contains("x") || !j.contains("y"))
            throw config_error(path + ": matrix needs x and y entries");
        g.x_matrix = read("x");
        g.y_matrix = read("y");
    } else if (g.kind != "rho") {
        throw config_error(path + ".kind: unknown generator kind '" + g.kind + "'");
    }
    return g;
}

nlohmann::json generator_to_json(const GeneratorSpec& g) {
    nlohmann::json j;
    j["kind"] = g.kind;
    if (g.kind == "rotation") {
        j["factor"] = g.factor;
        j["plane"] = {g.plane_a, g.plane_b};
        j["angle_num"] = g.angle_num;
        j["angle_den"] = g.angle_den;
    } else if (g.kind == "signs") {
        j["x_signs"] = g.x_signs;
        j["y_signs"] = g.y_signs;
    } else if (g.kind == "matrix") {
        const auto write = [](const Eigen::MatrixXd& m) {
            nlohmann::json rows = nlohmann::json::array();
            for (int r = 0; r < m.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
                rows.push_back(row);
            }
            return rows;
        };
        j["x"] = write(g.x_matrix);
        j["y"] = write(g.y_matrix);
    }
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("config: top level must be an object");
    ExperimentConfig c;
    c.version = get_or<int>(j, "version", 1);
    if (c.version != 1) throw config_error("config.version: only version 1 is supported");
    c.p = get_or<int>(j, "p", 1);
    c.q = get_or<int>(j, "q", 2);
    if (c.p < 1 || c.q < 1 || c.p + c.q < 3)
        throw config_error("config.p/q: need p, q >= 1 and p + q >= 3");

    c.gamma = get_or<double>(j, "gamma", -0.5);
    c.c_eval = get_or<double>(j, "c_eval", 6.0);
    c.weight_radius = get_or<double>(j, "weight_radius", 0.3);
    c.t_window = get_or<double>(j, "t_window", 0.05);
    c.dedupe_tol = get_or<double>(j, "dedupe_tol", 1e-9);
    c.order_cap = get_or<int>(j, "order_cap", 20000);
    c.seed = get_or<unsigned>(j, "seed", 12345u);
    c.out_dir = get_or<std::string>(j, "out_dir", "out");
    c.strict = get_or<bool>(j, "strict", false);
    c.catenoid_dims = get_or<std::vector<int>>(j, "catenoid_dims", {3, 4, 5});

    const double ts = minimal_angle(c.p, c.q);
    const int n = c.p + c.q;
    if (!(c.gamma > 2.0 - n && c.gamma < 0.0))
        throw config_error("config.gamma: must lie strictly in (2-n, 0)");

    if (j.contains("t_schedule")) {
        const auto& sched = j.at("t_schedule");
        if (sched.is_array()) {
            for (const auto& v : sched) c.t_schedule.push_back(v.get<double>());
        } else if (sched.is_object()) {
            const int count = get_or<int>(sched, "count", 4);
            const double first = get_or<double>(sched, "first_offset", 0.04);
            const double ratio = get_or<double>(sched, "ratio", 0.5);
            if (count < 1 || first <= 0 || ratio <= 0 || ratio >= 1)
                throw config_error("config.t_schedule: need count >= 1, first_offset > 0, "
                                   "0 < ratio < 1");
            for (int k = 0; k < count; ++k)
                c.t_schedule.push_back(ts + first * std::pow(ratio, k));
        } else {
            throw config_error("config.t_schedule: expected an array of angles or "
                               "{count, first_offset, ratio}");
        }
    } else {
        for (int k = 0; k < 4; ++k) c.t_schedule.push_back(ts + 0.04 * std::pow(0.5, k));
    }
    for (double t : c.t_schedule)
        if (!(t > ts && t - ts <= c.t_window))
            throw config_error("config.t_schedule: angle " + std::to_string(t)
                               + " outside (t*, t* + window]");

    if (j.contains("caps")) {
        const auto& caps = j.at("caps");
        c.I_max = get_or<int>(caps, "I_max", 40);
        c.J_max = get_or<int>(caps, "J_max", 40);
        c.auto_caps = get_or<bool>(caps, "auto", true);
        c.max_caps = get_or<int>(caps, "max", 2200);
        if (c.I_max < 8 || c.J_max < 8) throw config_error("config.caps: caps must be >= 8");
    }

    if (j.contains("resolution")) {
        const auto& r = j.at("resolution");
        c.resolution.cap_density = get_or<int>(r, "cap_density", 8);
        c.resolution.ring_radii = get_or<int>(r, "ring_radii", 6);
        c.resolution.ring_dir_density = get_or<int>(r, "ring_dir_density", 4);
        c.resolution.neck_s_samples = get_or<int>(r, "neck_s_samples", 25);
        c.resolution.neck_dir_density = get_or<int>(r, "neck_dir_density", 4);
        c.resolution.trans_radii = get_or<int>(r, "trans_radii", 7);
        c.resolution.trans_dir_density = get_or<int>(r, "trans_dir_density", 4);
    }

    if (j.contains("group")) {
        const auto& grp = j.at("group");
        if (!grp.contains("generators") || !grp.at("generators").is_array())
            throw config_error("config.group.generators: expected an array");
        int k = 0;
        for (const auto& gj : grp.at("generators"))
            c.generators.push_back(
                generator_from_json(gj, "config.group.generators[" + std::to_string(k++) + "]"));
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config: JSON parse error in '" + path + "': " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["p"] = p;
    j["q"] = q;
    j["t_schedule"] = t_schedule;
    j["gamma"] = gamma;
    j["c_eval"] = c_eval;
    j["weight_radius"] = weight_radius;
    j["t_window"] = t_window;
    j["dedupe_tol"] = dedupe_tol;
    j["order_cap"] = order_cap;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["strict"] = strict;
    j["catenoid_dims"] = catenoid_dims;
    j["caps"] = {{"I_max", I_max}, {"J_max", J_max}, {"auto", auto_caps}, {"max", max_caps}};
    j["resolution"] = {{"cap_density", resolution.cap_density},
                       {"ring_radii", resolution.ring_radii},
                       {"ring_dir_density", resolution.ring_dir_density},
                       {"neck_s_samples", resolution.neck_s_samples},
                       {"neck_dir_density", resolution.neck_dir_density},
                       {"trans_radii", resolution.trans_radii},
                       {"trans_dir_density", resolution.trans_dir_density}};
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : generators) gens.push_back(generator_to_json(g));
    j["group"] = {{"generators", gens}};
    return j;
}

double ExperimentConfig::t_star() const { return minimal_angle(p, q); }

SymmetryGroup ExperimentConfig::build_group() const {
    std::vector<OrthogonalPair> gens;
    for (const auto& g : generators) gens.push_back(compile_generator(p, q, g));
    SymmetryGroup grp = close_group(p, q, gens, order_cap);
    grp.generator_spec = generators;
    return grp;
}

GluingSet ExperimentConfig::build_orbit(const SymmetryGroup& group) const {
    return orbit(group, base_point(p, q), dedupe_tol);
}

int ExperimentConfig::atlas_caps(double r_t) const {
    if (!auto_caps) return std::max(I_max, J_max);
    // the jet filter needs sigma*d ~ 10 down to d ~ 0.55 r without hitting the
    // truncation cap: caps = 3.5 * max-factor-scale * 10 / (0.55 r)
    const int want = static_cast<int>(std::ceil(52.0 / r_t));
    return std::clamp(want, std::max(I_max, J_max), max_caps);
}

} // namespace cmcglue
