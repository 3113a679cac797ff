#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ascollab {

/// A point in the unit hypercube of research approaches.
struct Approach {
    std::vector<double> coords;

    int dim() const { return static_cast<int>(coords.size()); }
};

/// Throws ValidationError when coordinates leave [0,1] or dims disagree.
void validate_approach(const Approach& x, int expected_dim);

double squared_distance(const Approach& a, const Approach& b);

struct Peak {
    Approach center;
    double height = 1.0;
    double width = 0.1;
};

/// Ground-truth significance surface: a Gaussian mixture over [0,1]^dim.
struct Landscape {
    int dim = 1;
    std::vector<Peak> peaks;
    double noise_floor = 0.0;
};

/// Shape of the history-dependent discount applied to published regions.
struct PerceptionParams {
    double decay_alpha = 0.5;      // in [0,1]
    double kernel_bandwidth = 0.1; // > 0
};

void validate_perception_params(const PerceptionParams& p);

Landscape generate_landscape(int dim, int n_peaks, std::uint64_t seed);

double true_significance(const Landscape& ls, const Approach& x);

/// Significance after discounting regions already covered by accepted outputs.
double perceived_significance(const Landscape& ls, const Approach& x,
                              const std::vector<Approach>& accepted_history,
                              const PerceptionParams& params);

/// 1 minus the strongest kernel overlap with any published approach.
double novelty_of(const Approach& x, const std::vector<Approach>& accepted_history,
                  const PerceptionParams& params);

nlohmann::json landscape_to_json(const Landscape& ls);
Landscape landscape_from_json(const nlohmann::json& doc);

}  // namespace ascollab
