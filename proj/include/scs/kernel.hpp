#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace scs {

enum class KernelKind { Constant, AlgebraicQuarter, Custom };

// Communication weight psi(r) with certified bounds psi_min <= psi <= psi_max
// on the declared domain. For the algebraic kernel (1+r^2)^(-1/4) the infimum
// over all radii is 0, so psi_min is certified only inside a declared radius
// ball; runs that exceed it get flagged by the engine.
struct KernelSpec {
    KernelKind kind = KernelKind::Constant;
    double constant_value = 1.0;                // Constant
    double certified_radius = std::numeric_limits<double>::infinity();  // AlgebraicQuarter
    std::vector<std::pair<double, double>> table;  // Custom: (r, psi), r strictly increasing
    double psi_min = 1.0;
    double psi_max = 1.0;
};

KernelSpec constant_kernel(double c);
// radius < inf certifies psi_min = (1+R^2)^(-1/4); infinite radius leaves psi_min = 0.
KernelSpec algebraic_quarter_kernel(double certified_radius = std::numeric_limits<double>::infinity());
// piecewise-linear table, clamped beyond the endpoints
KernelSpec custom_kernel(std::vector<std::pair<double, double>> table);

void validate(const KernelSpec& spec);

double kernel_eval(const KernelSpec& spec, double r);

// Same weight from the squared distance; saves the sqrt for the algebraic
// kernel in pairwise loops.
double kernel_eval_sq(const KernelSpec& spec, double r_squared);

std::string kernel_to_string(const KernelSpec& spec);
KernelSpec kernel_from_string(const std::string& text);

}  // namespace scs
