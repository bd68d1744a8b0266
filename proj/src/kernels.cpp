#include "vmci/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vmci {

KernelSpec::KernelSpec(int order, int dim) : order_(order), dim_(dim) {
    if (order < 1 || order % 2 == 0)
        throw std::invalid_argument("kernel order must be a positive odd integer, got " +
                                    std::to_string(order));
    if (dim < 1) throw std::invalid_argument("kernel dimension must be positive");
}

namespace {

// P_m(x) by (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
double legendre_p(int m, double x) {
    if (m == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < m; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double normalizer(int m) { return std::sqrt((2.0 * m + 1.0) / 2.0); }

}  // namespace

double legendre_phi(int m, double x) {
    if (m < 0) throw std::invalid_argument("legendre_phi: degree must be nonnegative");
    return normalizer(m) * legendre_p(m, x);
}

double kernel_1d(const KernelSpec& spec, double x) {
    if (x < -1.0 || x > 1.0) return 0.0;
    double acc = 0.0;
    // odd m contribute phi_m(0) == 0
    for (int m = 0; m <= spec.order(); m += 2) acc += legendre_phi(m, 0.0) * legendre_phi(m, x);
    return acc;
}

double kernel_product(const KernelSpec& spec, std::span<const double> point) {
    if (point.size() != static_cast<std::size_t>(spec.dim()))
        throw std::invalid_argument("kernel_product: point has " + std::to_string(point.size()) +
                                    " coordinates, kernel dimension is " + std::to_string(spec.dim()));
    double acc = 1.0;
    for (double v : point) {
        acc *= kernel_1d(spec, v);
        if (acc == 0.0) break;
    }
    return acc;
}

namespace {

struct LegendreWithDerivative {
    double value;
    double derivative;
};

// P_n(x) and P_n'(x) for |x| < 1.
LegendreWithDerivative legendre_with_derivative(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration from the Tricomi initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto pd = legendre_with_derivative(n, x);
            const double dx = pd.value / pd.derivative;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double dp = legendre_with_derivative(n, x).derivative;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

double kernel_moment(const KernelSpec& spec, int s, int quadrature_points) {
    if (s < 0) throw std::invalid_argument("kernel_moment: moment order must be nonnegative");
    const auto rule = gauss_legendre(quadrature_points);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        acc += rule.weights[i] * std::pow(x, s) * kernel_1d(spec, x);
    }
    return acc;
}

LegendreKernel::LegendreKernel(int order) : order_(order) {
    KernelSpec{order, 1};  // validates

    // Monomial coefficients of P_m built with the same recurrence as legendre_p.
    const int top = order;
    std::vector<std::vector<double>> p(top + 1, std::vector<double>(top + 1, 0.0));
    p[0][0] = 1.0;
    if (top >= 1) p[1][1] = 1.0;
    for (int k = 1; k < top; ++k) {
        for (int j = 0; j <= top; ++j) {
            double v = -k * p[k - 1][j];
            if (j > 0) v += (2.0 * k + 1.0) * p[k][j - 1];
            p[k + 1][j] = v / (k + 1.0);
        }
    }
    std::vector<double> full(top + 1, 0.0);
    for (int m = 0; m <= top; m += 2) {
        const double c = normalizer(m) * normalizer(m) * p[m][0];  // phi_m(0) * sqrt((2m+1)/2)
        for (int j = 0; j <= top; ++j) full[j] += c * p[m][j];
    }
    for (int j = 0; j <= top; j += 2) even_coeffs_.push_back(full[j]);
}

}  // namespace vmci
