#pragma once

#include <array>
#include <cstdint>

#include "vmci/graph.hpp"
#include "vmci/sample_matrix.hpp"

namespace vmci {

/// u^(1 / (beta + 1.15)); maps U[0,1] to the density (beta+1.15) x^(beta+0.15) on [0,1].
/// Throws std::invalid_argument for u outside [0, 1].
double power_law_transform(double u, int beta);

/// Closed-form differential entropy of the power-law marginal, in nats.
double power_law_entropy(int beta);

/// One column "X" of i.i.d. power-law draws; row i uses stream derive_key(seed, i).
SampleMatrix sample_power_law(std::size_t n, int beta, std::uint64_t seed);

/// Mixture weights for the conditional-independence benchmark. U_X copies
/// U_Z1 w.p. t1, U_Z2 w.p. t2; U_Y additionally copies U_X w.p. t_xy.
struct MixtureSpec {
    int beta = 3;
    double t1 = 0.2;
    double t2 = 0.2;
    double t_xy = 0.0;

    /// Throws std::invalid_argument unless weights are nonnegative with t1 + t2 + t_xy < 1.
    void validate() const;
};

/// Columns X, Y, Z1, Z2. Row i draws from its own stream keyed by
/// derive_key(seed, i), in the fixed order U_Z1, U_Z2, pick_X, fresh_X,
/// pick_Y, fresh_Y; each pick partitions [0,1) as (t1, t2, t_xy, rest).
SampleMatrix sample_mixture(std::size_t n, const MixtureSpec& spec, std::uint64_t seed);

struct SemSpec {
    int beta = 3;
};

/// X1 = U1, X2 = U2, X3 = X1^2 + X2 + U3, X4 = U4,
/// X5 = 0.5 X1^2 - 0.5 X4^2 + U5, X6 = X4^3 - X5 + U6.
std::array<double, 6> sem_equations(const std::array<double, 6>& noise);

/// Columns X1..X6 with i.i.d. power-law noise; row i uses stream derive_key(seed, i).
SampleMatrix sample_sem(std::size_t n, const SemSpec& spec, std::uint64_t seed);

/// Causal graph of the SEM: X1->X3<-X2, X1->X5<-X4, X4->X6<-X5.
Dag sem_dag();

}  // namespace vmci
