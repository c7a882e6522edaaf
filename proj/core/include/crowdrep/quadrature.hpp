#ifndef CROWDREP_QUADRATURE_HPP
#define CROWDREP_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace crowdrep {

// Gauss-Legendre rule mapped onto [a, b].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    GaussLegendre(std::size_t n, double a, double b);
};

}  // namespace crowdrep

#endif  // CROWDREP_QUADRATURE_HPP
