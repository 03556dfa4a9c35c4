#pragma once

#include <cmath>
#include <map>
#include <string>

#include "projsde/core/errors.hpp"
#include "projsde/models/kubo.hpp"
#include "projsde/models/lotka_volterra.hpp"
#include "projsde/models/pendulum.hpp"

namespace projsde {

inline const char* model_names() { return "kubo, pendulum, lotka"; }

/**
 * @brief Build a bundled model by name with optional parameter overrides.
 *
 * kubo: a (default 1, must be nonzero), sigma (default 1)
 * pendulum: c1 (default 1), c2 (default 0.5)
 * lotka: c (default 0.5)
 */
inline SdeModel build_model(const std::string& name,
                            const std::map<std::string, double>& params = {}) {
    auto get = [&](const char* key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    auto reject_unknown = [&](std::initializer_list<const char*> known) {
        for (const auto& [key, value] : params) {
            bool ok = false;
            for (const char* k : known)
                if (key == k) ok = true;
            if (!ok)
                throw ConfigError("unknown parameter '" + key + "' for model '" + name + "'");
        }
    };

    if (name == "kubo") {
        reject_unknown({"a", "sigma"});
        const double a = get("a", 1.0);
        const double sigma = get("sigma", 1.0);
        if (a == 0.0) throw ConfigError("kubo: parameter a must be nonzero");
        return make_kubo(a, sigma);
    }
    if (name == "pendulum") {
        reject_unknown({"c1", "c2"});
        return make_pendulum(get("c1", 1.0), get("c2", 0.5));
    }
    if (name == "lotka") {
        reject_unknown({"c"});
        return make_lotka_volterra(get("c", 0.5));
    }
    throw ConfigError("unknown model '" + name + "' (valid models: " + model_names() + ")");
}

struct EffectiveNoise {
    std::size_t count = 1;
    double c_eff = 0.0;
};

/// Aggregate noise intensity sqrt(sum c_r^2) of a special-class model;
/// diagnostic only -- the schemes always combine per-channel increments.
inline EffectiveNoise effective_noise(const SdeModel& model) {
    if (!model.special_class)
        throw UnsupportedModelError("effective_noise: model is not in the special class");
    double s = 0.0;
    for (double c : model.special_class->c) s += c * c;
    return {1, std::sqrt(s)};
}

} // namespace projsde
