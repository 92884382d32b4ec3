#pragma once

#include <cstdint>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/philox.hpp"
#include "qwalk/stats.hpp"

namespace qwalk {

// Joint particle/coin pure state after t steps. Amplitudes a_R(x), a_L(x) are
// stored densely for |x| <= capacity >= t; they vanish for |x| > t and for
// x + t odd.
class PureWalkState {
public:
    explicit PureWalkState(const CoinState& coin);

    int steps() const { return t_; }
    cdouble right(int x) const;
    cdouble left(int x) const;
    double probability(int x) const;
    double norm_squared() const;
    PositionDistribution distribution() const;
    // Reduced coin density sum_x psi(x) psi(x)^dagger.
    CoinOperator coin_density() const;

    // Coin flip I (x) H followed by the conditional shift.
    void unitary_step();
    // psi(x) -> op psi(x) at every site (the coin factor of I (x) op).
    void apply_coin(const CoinOperator& op);
    // Apply `coin_op` on the coin, then the flip and shift, in one pass.
    void fused_step(const CoinOperator& coin_op);

private:
    std::size_t index(int x) const { return static_cast<std::size_t>(x + capacity_); }
    void ensure_capacity(int t);

    int t_ = 0;
    int capacity_ = 0;
    std::vector<cdouble> right_;
    std::vector<cdouble> left_;
};

PureWalkState initial_state(const CoinState& coin);
PureWalkState unitary_step(PureWalkState state);
PureWalkState evolve_unitary(const CoinState& coin, int steps);

// Probabilities ||(I (x) A_n) psi||^2 / ||psi||^2 of each Kraus branch.
std::vector<double> branch_probabilities(const PureWalkState& state, const KrausChannel& channel);

// Inverse-CDF pick on `probabilities` with uniform u in [0, 1): the first n
// with u < cumulative(n); the last branch absorbs any rounding residual.
std::size_t select_branch(const std::vector<double>& probabilities, double u);

struct TrajectoryRecord {
    PureWalkState final_state;
    std::vector<std::uint32_t> branches;  // Kraus index chosen at each step
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// One quantum trajectory: per step choose a Kraus branch with its Born
// probability, apply and renormalize, then flip and shift.
TrajectoryRecord sample_trajectory(const CoinState& coin, const KrausChannel& channel, int steps, StreamRng& rng);

struct EnsembleOptions {
    // 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
    // Number of contiguous run groups kept for jackknife error estimates.
    unsigned groups = 20;
};

struct EnsembleResult {
    std::uint64_t runs = 0;
    std::uint64_t master_seed = 0;
    int steps = 0;
    PositionDistribution mean_distribution;
    // Standard error of each mean_distribution entry across runs.
    std::vector<double> distribution_stderr;
    MomentSeries moments;  // t = 0..steps, with standard errors
    RawMomentSums sums;
    std::vector<RawMomentSums> groups;
};

// Trajectory i uses substream i of master_seed. The result is bit-identical
// for any worker count: work is split into fixed chunks whose partial sums
// are folded in index order.
EnsembleResult run_ensemble(const CoinState& coin, const KrausChannel& channel, int steps, std::uint64_t runs,
                            std::uint64_t master_seed, const EnsembleOptions& options = {});

}  // namespace qwalk
