#pragma once

#include <span>
#include <vector>

namespace vmci {

/// Order and dimension of a Legendre product kernel.
///
/// The order is odd: phi_m(0) vanishes for odd m, so K_{2l} == K_{2l+1} and an
/// even order would silently carry one more vanishing moment than declared.
class KernelSpec {
public:
    /// Throws std::invalid_argument unless order >= 1 is odd and dim >= 1.
    KernelSpec(int order, int dim);

    int order() const { return order_; }
    int dim() const { return dim_; }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
    int order_;
    int dim_;
};

/// Orthonormal Legendre polynomial on [-1, 1]: sqrt((2m+1)/2) * P_m(x),
/// evaluated by the three-term recurrence.
double legendre_phi(int m, double x);

/// One-dimensional Legendre kernel sum_{m<=order} phi_m(0) phi_m(x) on
/// [-1, 1], zero outside.
double kernel_1d(const KernelSpec& spec, double x);

/// Product of kernel_1d over the coordinates of `point`.
double kernel_product(const KernelSpec& spec, std::span<const double> point);

/// Integral of x^s K(x) over [-1, 1] by Gauss-Legendre quadrature.
double kernel_moment(const KernelSpec& spec, int s, int quadrature_points);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Legendre kernel in monomial form for the density hot loop. The kernel is an
/// even polynomial, so it is stored as coefficients of x^0, x^2, x^4, ...
class LegendreKernel {
public:
    explicit LegendreKernel(int order);

    int order() const { return order_; }

    /// Kernel value for |x| <= 1 (no support check).
    double eval_inside(double x) const {
        const double x2 = x * x;
        double acc = 0.0;
        for (auto it = even_coeffs_.rbegin(); it != even_coeffs_.rend(); ++it) acc = acc * x2 + *it;
        return acc;
    }

    double operator()(double x) const { return (x < -1.0 || x > 1.0) ? 0.0 : eval_inside(x); }

    const std::vector<double>& even_coefficients() const { return even_coeffs_; }

private:
    int order_;
    std::vector<double> even_coeffs_;
};

}  // namespace vmci
