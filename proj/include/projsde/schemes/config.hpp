#pragma once

#include <string>

#include "projsde/core/errors.hpp"
#include "projsde/noise/truncation.hpp"

namespace projsde {

enum class Method { euler, milstein, midpoint, t32, t2, discrete_gradient };

struct SchemeConfig {
    Method method = Method::euler;
    double implicit_tol = 1e-14;
    int implicit_max_iter = 50;
    TruncationConfig truncation;
};

inline std::string method_name(Method m) {
    switch (m) {
        case Method::euler: return "euler";
        case Method::milstein: return "milstein";
        case Method::midpoint: return "mid";
        case Method::t32: return "t32";
        case Method::t2: return "t2";
        case Method::discrete_gradient: return "dg";
    }
    return "?";
}

inline Method parse_method(const std::string& name) {
    if (name == "euler") return Method::euler;
    if (name == "milstein") return Method::milstein;
    if (name == "mid") return Method::midpoint;
    if (name == "t32") return Method::t32;
    if (name == "t2") return Method::t2;
    if (name == "dg") return Method::discrete_gradient;
    throw ConfigError("unknown method '" + name +
                      "' (expected euler|milstein|mid|t32|t2|dg, optional P suffix)");
}

/// Method plus the projection flag, as written on the CLI ("eulerP", "t2", ...).
struct MethodSpec {
    Method method = Method::euler;
    bool projected = false;

    std::string display() const { return method_name(method) + (projected ? "P" : ""); }
};

inline MethodSpec parse_method_spec(const std::string& token) {
    MethodSpec spec;
    std::string base = token;
    if (!base.empty() && base.back() == 'P') {
        spec.projected = true;
        base.pop_back();
    }
    spec.method = parse_method(base);
    return spec;
}

} // namespace projsde
