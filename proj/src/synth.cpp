#include "vmci/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "vmci/rng.hpp"

namespace vmci {

double power_law_transform(double u, int beta) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("power_law_transform: u must lie in [0, 1]");
    if (beta < 1) throw std::invalid_argument("power_law_transform: beta must be positive");
    return std::pow(u, 1.0 / (beta + 1.15));
}

double power_law_entropy(int beta) {
    const double a = beta + 1.15;
    return -std::log(a) + (a - 1.0) / a;
}

SampleMatrix sample_power_law(std::size_t n, int beta, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_power_law: n must be positive");
    SampleMatrix out({"X"}, n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_key(seed, i));
        out(i, 0) = power_law_transform(rng.uniform(), beta);
    }
    return out;
}

void MixtureSpec::validate() const {
    if (beta < 1) throw std::invalid_argument("mixture beta must be positive");
    if (!(t1 >= 0.0 && t2 >= 0.0 && t_xy >= 0.0))
        throw std::invalid_argument("mixture weights must be nonnegative");
    if (!(t1 + t2 + t_xy < 1.0)) throw std::invalid_argument("mixture weights must satisfy t1 + t2 + t_xy < 1");
}

SampleMatrix sample_mixture(std::size_t n, const MixtureSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("sample_mixture: n must be positive");
    SampleMatrix out({"X", "Y", "Z1", "Z2"}, n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_key(seed, i));
        const double uz1 = rng.uniform();
        const double uz2 = rng.uniform();
        const double pick_x = rng.uniform();
        const double fresh_x = rng.uniform();
        const double pick_y = rng.uniform();
        const double fresh_y = rng.uniform();

        double ux = fresh_x;
        if (pick_x < spec.t1) ux = uz1;
        else if (pick_x < spec.t1 + spec.t2) ux = uz2;

        double uy = fresh_y;
        if (pick_y < spec.t1) uy = uz1;
        else if (pick_y < spec.t1 + spec.t2) uy = uz2;
        else if (pick_y < spec.t1 + spec.t2 + spec.t_xy) uy = ux;

        out(i, 0) = power_law_transform(ux, spec.beta);
        out(i, 1) = power_law_transform(uy, spec.beta);
        out(i, 2) = power_law_transform(uz1, spec.beta);
        out(i, 3) = power_law_transform(uz2, spec.beta);
    }
    return out;
}

std::array<double, 6> sem_equations(const std::array<double, 6>& u) {
    std::array<double, 6> x{};
    x[0] = u[0];
    x[1] = u[1];
    x[2] = x[0] * x[0] + x[1] + u[2];
    x[3] = u[3];
    x[4] = 0.5 * x[0] * x[0] - 0.5 * x[3] * x[3] + u[4];
    x[5] = x[3] * x[3] * x[3] - x[4] + u[5];
    return x;
}

SampleMatrix sample_sem(std::size_t n, const SemSpec& spec, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_sem: n must be positive");
    if (spec.beta < 1) throw std::invalid_argument("sample_sem: beta must be positive");
    SampleMatrix out({"X1", "X2", "X3", "X4", "X5", "X6"}, n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_key(seed, i));
        std::array<double, 6> noise{};
        for (auto& u : noise) u = power_law_transform(rng.uniform(), spec.beta);
        const auto x = sem_equations(noise);
        for (std::size_t j = 0; j < 6; ++j) out(i, j) = x[j];
    }
    return out;
}

Dag sem_dag() {
    return Dag({"X1", "X2", "X3", "X4", "X5", "X6"},
               {{"X1", "X3"}, {"X2", "X3"}, {"X1", "X5"}, {"X4", "X5"}, {"X4", "X6"}, {"X5", "X6"}});
}

}  // namespace vmci
