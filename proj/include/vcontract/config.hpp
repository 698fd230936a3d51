#pragma once

#include <string>
#include <vector>

#include "vcontract/model.hpp"

namespace vcontract {

struct ScalarVolParams {
    double gamma_a = 1.0;
    double gamma_p = 1.0;
    double h = 1.0;
    double horizon = 1.0;
    double x0 = 0.0;
    double reservation = -1.0;
    double u_min = 1e-3;
};

struct DemandResponseParams {
    std::vector<double> sigmas{1.0, 1.0};
    std::vector<double> lambdas{1.0, 4.0};
    std::vector<double> mus{1.0, 1.0};
    double kappa = 0.0;
    double theta = 0.0;
    double h = 0.0;
    double gamma_a = 1.0;
    double gamma_p = 1.0;
    double horizon = 1.0;
    double x0 = 0.0;
    double reservation = -1.0;
    double a_max = 2.0;
    // one [lo, hi] per component, or a single interval shared by all
    std::vector<Interval> b_box{{0.0, 2.0}};
};

struct QuarticParams {
    double horizon = 1.0;
    double x0 = 0.0;
    double reservation = 0.0;
};

ModelSpec make_scalar_vol(const ScalarVolParams& p);
ModelSpec make_demand_response(const DemandResponseParams& p);
ModelSpec make_quartic(const QuarticParams& p);

// JSON document with a top-level "example" or "custom" key.
ModelSpec build_model(const std::string& json_text);
ModelSpec build_model_file(const std::string& path);

} // namespace vcontract
