#include "ascollab/landscape.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

void validate_approach(const Approach& x, int expected_dim) {
    if (expected_dim >= 1 && x.dim() != expected_dim) {
        throw ValidationError("approach dimension " + std::to_string(x.dim()) +
                              " != expected " + std::to_string(expected_dim));
    }
    if (x.dim() < 1) throw ValidationError("approach must have at least one coordinate");
    for (double c : x.coords) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw ValidationError("approach coordinate out of [0,1]: " + std::to_string(c));
        }
    }
}

double squared_distance(const Approach& a, const Approach& b) {
    if (a.dim() != b.dim()) throw ValidationError("dimension mismatch in distance");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        double d = a.coords[i] - b.coords[i];
        s += d * d;
    }
    return s;
}

void validate_perception_params(const PerceptionParams& p) {
    if (!(p.decay_alpha >= 0.0 && p.decay_alpha <= 1.0)) {
        throw ValidationError("decay_alpha must lie in [0,1]");
    }
    if (!(p.kernel_bandwidth > 0.0)) throw ValidationError("kernel_bandwidth must be > 0");
}

Landscape generate_landscape(int dim, int n_peaks, std::uint64_t seed) {
    if (dim < 1) throw ValidationError("landscape dim must be >= 1");
    if (n_peaks < 1) throw ValidationError("landscape must have at least one peak");
    auto rng = make_rng(derive_seed(seed, "landscape"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> height(0.2, 1.0);
    std::uniform_real_distribution<double> width(0.05, 0.3);
    Landscape ls;
    ls.dim = dim;
    ls.peaks.reserve(static_cast<std::size_t>(n_peaks));
    for (int p = 0; p < n_peaks; ++p) {
        Peak pk;
        pk.center.coords.resize(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) pk.center.coords[static_cast<std::size_t>(i)] = unit(rng);
        pk.height = height(rng);
        pk.width = width(rng);
        ls.peaks.push_back(std::move(pk));
    }
    return ls;
}

double true_significance(const Landscape& ls, const Approach& x) {
    if (x.dim() != ls.dim) throw ValidationError("approach/landscape dimension mismatch");
    double v = ls.noise_floor;
    for (const Peak& p : ls.peaks) {
        double d2 = squared_distance(x, p.center);
        v += p.height * std::exp(-d2 / (2.0 * p.width * p.width));
    }
    return v;
}

double perceived_significance(const Landscape& ls, const Approach& x,
                              const std::vector<Approach>& accepted_history,
                              const PerceptionParams& params) {
    validate_perception_params(params);
    double base = true_significance(ls, x);
    const double h2 = 2.0 * params.kernel_bandwidth * params.kernel_bandwidth;
    double discount = 1.0;
    for (const Approach& xo : accepted_history) {
        if (xo.dim() != x.dim()) throw ValidationError("history dimension mismatch");
        discount *= 1.0 - params.decay_alpha * std::exp(-squared_distance(x, xo) / h2);
    }
    return base * discount;
}

double novelty_of(const Approach& x, const std::vector<Approach>& accepted_history,
                  const PerceptionParams& params) {
    validate_perception_params(params);
    const double h2 = 2.0 * params.kernel_bandwidth * params.kernel_bandwidth;
    double max_overlap = 0.0;
    for (const Approach& xo : accepted_history) {
        if (xo.dim() != x.dim()) throw ValidationError("history dimension mismatch");
        max_overlap = std::max(max_overlap, std::exp(-squared_distance(x, xo) / h2));
    }
    return 1.0 - max_overlap;
}

nlohmann::json landscape_to_json(const Landscape& ls) {
    nlohmann::json peaks = nlohmann::json::array();
    for (const Peak& p : ls.peaks) {
        peaks.push_back({{"center", p.center.coords}, {"height", p.height}, {"width", p.width}});
    }
    return {{"schema", "landscape/v1"},
            {"dim", ls.dim},
            {"peaks", peaks},
            {"noise_floor", ls.noise_floor}};
}

Landscape landscape_from_json(const nlohmann::json& doc) {
    if (doc.value("schema", "") != "landscape/v1") {
        throw ValidationError("expected landscape/v1 document");
    }
    Landscape ls;
    ls.dim = doc.at("dim").get<int>();
    ls.noise_floor = doc.at("noise_floor").get<double>();
    for (const auto& pj : doc.at("peaks")) {
        Peak p;
        p.center.coords = pj.at("center").get<std::vector<double>>();
        p.height = pj.at("height").get<double>();
        p.width = pj.at("width").get<double>();
        ls.peaks.push_back(std::move(p));
    }
    if (ls.dim < 1 || ls.peaks.empty()) throw ValidationError("invalid landscape document");
    return ls;
}

}  // namespace ascollab
