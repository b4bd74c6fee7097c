#include "scs/kernel.hpp"

#include "scs/fmt.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scs {

KernelSpec constant_kernel(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("constant kernel value must be positive and finite");
    }
    KernelSpec spec;
    spec.kind = KernelKind::Constant;
    spec.constant_value = c;
    spec.psi_min = c;
    spec.psi_max = c;
    return spec;
}

KernelSpec algebraic_quarter_kernel(double certified_radius) {
    if (!(certified_radius > 0.0)) {
        throw std::invalid_argument("certification radius must be positive");
    }
    KernelSpec spec;
    spec.kind = KernelKind::AlgebraicQuarter;
    spec.certified_radius = certified_radius;
    spec.psi_max = 1.0;
    spec.psi_min = std::isfinite(certified_radius)
                       ? std::pow(1.0 + certified_radius * certified_radius, -0.25)
                       : 0.0;
    return spec;
}

KernelSpec custom_kernel(std::vector<std::pair<double, double>> table) {
    if (table.empty()) {
        throw std::invalid_argument("custom kernel table is empty");
    }
    double lo = table.front().second;
    double hi = table.front().second;
    double prev_r = -1.0;
    for (const auto& [r, psi] : table) {
        if (!(r >= 0.0) || r <= prev_r) {
            throw std::invalid_argument("custom kernel radii must be nonnegative and strictly increasing");
        }
        if (!(psi > 0.0) || !std::isfinite(psi)) {
            throw std::invalid_argument("custom kernel values must be positive and finite");
        }
        lo = std::min(lo, psi);
        hi = std::max(hi, psi);
        prev_r = r;
    }
    KernelSpec spec;
    spec.kind = KernelKind::Custom;
    spec.table = std::move(table);
    spec.psi_min = lo;
    spec.psi_max = hi;
    return spec;
}

void validate(const KernelSpec& spec) {
    if (!(spec.psi_max >= spec.psi_min) || spec.psi_min < 0.0) {
        throw std::invalid_argument("kernel bounds require 0 <= psi_min <= psi_max");
    }
    switch (spec.kind) {
        case KernelKind::Constant:
            if (!(spec.constant_value > 0.0)) {
                throw std::invalid_argument("constant kernel value must be positive");
            }
            break;
        case KernelKind::AlgebraicQuarter:
            if (!(spec.certified_radius > 0.0)) {
                throw std::invalid_argument("certification radius must be positive");
            }
            break;
        case KernelKind::Custom:
            if (spec.table.empty()) {
                throw std::invalid_argument("custom kernel table is empty");
            }
            break;
    }
}

double kernel_eval_sq(const KernelSpec& spec, double r_squared) {
    switch (spec.kind) {
        case KernelKind::Constant:
            return spec.constant_value;
        case KernelKind::AlgebraicQuarter:
            return 1.0 / std::sqrt(std::sqrt(1.0 + r_squared));
        case KernelKind::Custom:
            return kernel_eval(spec, std::sqrt(r_squared));
    }
    throw std::logic_error("unreachable kernel kind");
}

double kernel_eval(const KernelSpec& spec, double r) {
    if (r < 0.0 || std::isnan(r)) {
        throw std::domain_error("kernel argument must be a nonnegative distance");
    }
    switch (spec.kind) {
        case KernelKind::Constant:
            return spec.constant_value;
        case KernelKind::AlgebraicQuarter:
            return kernel_eval_sq(spec, r * r);
        case KernelKind::Custom: {
            const auto& t = spec.table;
            if (r <= t.front().first) return t.front().second;
            if (r >= t.back().first) return t.back().second;
            std::size_t hi = 1;
            while (t[hi].first < r) ++hi;
            const auto& [r0, p0] = t[hi - 1];
            const auto& [r1, p1] = t[hi];
            const double w = (r - r0) / (r1 - r0);
            return p0 + w * (p1 - p0);
        }
    }
    throw std::logic_error("unreachable kernel kind");
}

std::string kernel_to_string(const KernelSpec& spec) {
    std::ostringstream out;
    switch (spec.kind) {
        case KernelKind::Constant:
            out << "constant:" << format_double(spec.constant_value);
            break;
        case KernelKind::AlgebraicQuarter:
            out << "algebraic-quarter";
            if (std::isfinite(spec.certified_radius)) {
                out << ":" << format_double(spec.certified_radius);
            }
            break;
        case KernelKind::Custom: {
            out << "table";
            for (const auto& [r, psi] : spec.table) {
                out << ":" << format_double(r) << "," << format_double(psi);
            }
            break;
        }
    }
    return out.str();
}

KernelSpec kernel_from_string(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto to_double = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("kernel spec: bad number '" + s + "' in '" + text + "'");
        }
    };
    if (head == "constant") {
        return constant_kernel(rest.empty() ? 1.0 : to_double(rest));
    }
    if (head == "algebraic-quarter") {
        if (rest.empty()) return algebraic_quarter_kernel();
        return algebraic_quarter_kernel(to_double(rest));
    }
    if (head == "table") {
        std::vector<std::pair<double, double>> table;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ':')) {
            const auto comma = item.find(',');
            if (comma == std::string::npos) {
                throw std::invalid_argument("kernel spec: table entries are r,psi pairs");
            }
            table.emplace_back(to_double(item.substr(0, comma)), to_double(item.substr(comma + 1)));
        }
        return custom_kernel(std::move(table));
    }
    throw std::invalid_argument("kernel spec: unknown kind '" + head +
                                "' (use constant:<c>, algebraic-quarter[:R], table:r,psi:...)");
}

}  // namespace scs
