#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "cmcglue/assembler.hpp"
#include "cmcglue/symmetry.hpp"

namespace cmcglue {

/// One JSON document drives every experiment; all tolerances are defaulted
/// and overridable. Schema violations raise config_error with the field path.
struct ExperimentConfig {
    int version = 1;
    int p = 1, q = 2;
    std::vector<double> t_schedule;       // absolute angles, all in (t*, t* + window)
    std::vector<GeneratorSpec> generators;
    int I_max = 40, J_max = 40;           // Green's caps for diagnostics
    bool auto_caps = true;                // scale caps with the splice radius for atlas work
    int max_caps = 2200;
    AtlasResolution resolution;
    double gamma = -0.5;
    double c_eval = 6.0;
    double weight_radius = 0.3;
    double t_window = 0.05;
    double dedupe_tol = 1e-9;
    int order_cap = 20000;
    unsigned seed = 12345;
    std::vector<int> catenoid_dims{3, 4, 5};
    std::string out_dir = "out";
    bool strict = false;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    nlohmann::json to_json() const;

    double t_star() const;
    SymmetryGroup build_group() const;
    GluingSet build_orbit(const SymmetryGroup& group) const;
    int atlas_caps(double r_t) const; // auto caps: ~24/r_t clamped to [I_max, max_caps]
};

/// Generator-spec JSON (de)serialization used by the config schema.
GeneratorSpec generator_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json generator_to_json(const GeneratorSpec& g);

} // namespace cmcglue
