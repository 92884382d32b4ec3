#include "qwalk/walk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "qwalk/errors.hpp"

namespace qwalk {

PureWalkState::PureWalkState(const CoinState& coin) {
    const CoinState c = CoinState::make(coin.alpha, coin.beta);
    ensure_capacity(8);
    right_[index(0)] = c.alpha;
    left_[index(0)] = c.beta;
}

void PureWalkState::ensure_capacity(int t) {
    if (t <= capacity_) return;
    const int cap = std::max({t, 2 * capacity_, 8});
    std::vector<cdouble> r(2 * static_cast<std::size_t>(cap) + 1);
    std::vector<cdouble> l(r.size());
    for (int x = -capacity_; x <= capacity_ && capacity_ > 0; ++x) {
        r[static_cast<std::size_t>(x + cap)] = right_[index(x)];
        l[static_cast<std::size_t>(x + cap)] = left_[index(x)];
    }
    right_ = std::move(r);
    left_ = std::move(l);
    capacity_ = cap;
}

cdouble PureWalkState::right(int x) const { return std::abs(x) > t_ ? cdouble{} : right_[index(x)]; }
cdouble PureWalkState::left(int x) const { return std::abs(x) > t_ ? cdouble{} : left_[index(x)]; }
double PureWalkState::probability(int x) const { return std::norm(right(x)) + std::norm(left(x)); }

double PureWalkState::norm_squared() const {
    double s = 0.0;
    for (int x = -t_; x <= t_; x += 2) s += probability(x);
    return s;
}

PositionDistribution PureWalkState::distribution() const {
    PositionDistribution d{-t_, std::vector<double>(2 * static_cast<std::size_t>(t_) + 1, 0.0)};
    for (int x = -t_; x <= t_; x += 2) d.probabilities[static_cast<std::size_t>(x + t_)] = probability(x);
    return d;
}

CoinOperator PureWalkState::coin_density() const {
    CoinOperator rho = CoinOperator::Zero();
    for (int x = -t_; x <= t_; x += 2) {
        const cdouble r = right_[index(x)];
        const cdouble l = left_[index(x)];
        rho(0, 0) += std::norm(r);
        rho(1, 1) += std::norm(l);
        rho(0, 1) += r * std::conj(l);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

void PureWalkState::apply_coin(const CoinOperator& op) {
    for (int x = -t_; x <= t_; x += 2) {
        const cdouble r = right_[index(x)];
        const cdouble l = left_[index(x)];
        right_[index(x)] = op(0, 0) * r + op(0, 1) * l;
        left_[index(x)] = op(1, 0) * r + op(1, 1) * l;
    }
}

void PureWalkState::fused_step(const CoinOperator& coin_op) {
    ensure_capacity(t_ + 1);
    const CoinOperator f = hadamard_coin() * coin_op;
    const cdouble f00 = f(0, 0), f01 = f(0, 1), f10 = f(1, 0), f11 = f(1, 1);
    cdouble* r = right_.data() + capacity_;
    cdouble* l = left_.data() + capacity_;
    for (int x = -t_; x <= t_; x += 2) {
        const cdouble a = r[x];
        const cdouble b = l[x];
        r[x] = f00 * a + f01 * b;
        l[x] = f10 * a + f11 * b;
    }
    // R moves x -> x+1, L moves x -> x-1.
    std::copy_backward(r - t_, r + t_ + 1, r + t_ + 2);
    r[-t_] = cdouble{};
    std::copy(l - t_, l + t_ + 1, l - t_ - 1);
    l[t_] = cdouble{};
    ++t_;
}

void PureWalkState::unitary_step() { fused_step(CoinOperator::Identity()); }

PureWalkState initial_state(const CoinState& coin) { return PureWalkState(coin); }

PureWalkState unitary_step(PureWalkState state) {
    state.unitary_step();
    return state;
}

PureWalkState evolve_unitary(const CoinState& coin, int steps) {
    if (steps < 0) throw DomainError("step count must be non-negative");
    PureWalkState s(coin);
    for (int i = 0; i < steps; ++i) s.unitary_step();
    return s;
}

namespace {

std::vector<double> branch_weights(const CoinOperator& coin_rho, const KrausChannel& channel) {
    std::vector<double> w;
    w.reserve(channel.operators().size());
    double total = 0.0;
    for (const auto& a : channel.operators()) {
        const double v = std::max(0.0, (a * coin_rho * a.adjoint()).trace().real());
        w.push_back(v);
        total += v;
    }
    if (!(total > 0.0)) throw InvariantError("all Kraus branches have zero weight");
    for (auto& v : w) v /= total;
    return w;
}

struct Scan {
    double weight = 0.0;
    double first = 0.0;
    double second = 0.0;
};

// Per-step trajectory driver shared by sample_trajectory and run_ensemble.
template <typename OnStep>
void drive_trajectory(PureWalkState& state, const KrausChannel& channel, int steps, StreamRng& rng,
                      std::vector<std::uint32_t>* branches, OnStep&& on_step) {
    for (int s = 0; s < steps; ++s) {
        const CoinOperator rho = state.coin_density();
        const std::vector<double> probs = branch_weights(rho, channel);
        const std::size_t n = select_branch(probs, rng.uniform());
        const CoinOperator& a = channel.operators()[n];
        const double w = (a * rho * a.adjoint()).trace().real();
        if (!(w > 0.0)) throw InvariantError("selected Kraus branch has zero norm");
        if (branches) branches->push_back(static_cast<std::uint32_t>(n));
        state.fused_step(a / std::sqrt(w));
        on_step(state);
    }
}

Scan scan_moments(const PureWalkState& state) {
    Scan sc;
    const int t = state.steps();
    for (int x = -t; x <= t; x += 2) {
        const double p = state.probability(x);
        sc.weight += p;
        sc.first += x * p;
        sc.second += static_cast<double>(x) * x * p;
    }
    sc.first /= sc.weight;
    sc.second /= sc.weight;
    return sc;
}

}  // namespace

std::vector<double> branch_probabilities(const PureWalkState& state, const KrausChannel& channel) {
    return branch_weights(state.coin_density(), channel);
}

std::size_t select_branch(const std::vector<double>& probabilities, double u) {
    if (probabilities.empty()) throw InvariantError("no branches to select from");
    std::size_t last = probabilities.size() - 1;
    while (last > 0 && !(probabilities[last] > 0.0)) --last;
    double cumulative = 0.0;
    for (std::size_t n = 0; n < last; ++n) {
        cumulative += probabilities[n];
        if (u < cumulative) return n;
    }
    return last;
}

TrajectoryRecord sample_trajectory(const CoinState& coin, const KrausChannel& channel, int steps, StreamRng& rng) {
    if (steps < 0) throw DomainError("step count must be non-negative");
    TrajectoryRecord rec{PureWalkState(coin), {}, rng.seed(), rng.stream()};
    rec.branches.reserve(static_cast<std::size_t>(steps));
    drive_trajectory(rec.final_state, channel, steps, rng, &rec.branches, [](const PureWalkState&) {});
    return rec;
}

namespace {

constexpr std::uint64_t kChunkRuns = 32;

struct Chunk {
    std::size_t group = 0;
    std::uint64_t first_run = 0;
    std::uint64_t end_run = 0;
};

struct ChunkResult {
    std::vector<double> dist_sum;
    std::vector<double> dist_sq;
    RawMomentSums sums;
};

ChunkResult run_chunk(const Chunk& chunk, const CoinState& coin, const KrausChannel& channel, int steps,
                      std::uint64_t seed) {
    const std::size_t width = 2 * static_cast<std::size_t>(steps) + 1;
    ChunkResult out{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0), {}};
    out.sums.resize(static_cast<std::size_t>(steps) + 1);
    for (std::uint64_t run = chunk.first_run; run < chunk.end_run; ++run) {
        StreamRng rng(seed, run);
        PureWalkState state(coin);
        int t = 0;
        drive_trajectory(state, channel, steps, rng, nullptr, [&](const PureWalkState& s) {
            ++t;
            const Scan sc = scan_moments(s);
            out.sums.m1[t] += sc.first;
            out.sums.m2[t] += sc.second;
            out.sums.m1_sq[t] += sc.first * sc.first;
            out.sums.m2_sq[t] += sc.second * sc.second;
            out.sums.m1_m2[t] += sc.first * sc.second;
        });
        for (int x = -steps; x <= steps; x += 2) {
            const double p = state.probability(x);
            out.dist_sum[static_cast<std::size_t>(x + steps)] += p;
            out.dist_sq[static_cast<std::size_t>(x + steps)] += p * p;
        }
        ++out.sums.runs;
    }
    return out;
}

}  // namespace

EnsembleResult run_ensemble(const CoinState& coin, const KrausChannel& channel, int steps, std::uint64_t runs,
                            std::uint64_t master_seed, const EnsembleOptions& options) {
    if (steps < 0) throw DomainError("step count must be non-negative");
    if (runs < 1) throw DomainError("runs must be >= 1");
    const CoinState c = CoinState::make(coin.alpha, coin.beta);

    const std::uint64_t n_groups = std::clamp<std::uint64_t>(options.groups, 1, runs);
    std::vector<Chunk> chunks;
    for (std::uint64_t g = 0; g < n_groups; ++g) {
        const std::uint64_t lo = g * runs / n_groups;
        const std::uint64_t hi = (g + 1) * runs / n_groups;
        for (std::uint64_t s = lo; s < hi; s += kChunkRuns) chunks.push_back({g, s, std::min(hi, s + kChunkRuns)});
    }

    const std::size_t width = 2 * static_cast<std::size_t>(steps) + 1;
    EnsembleResult result;
    result.runs = runs;
    result.master_seed = master_seed;
    result.steps = steps;
    result.groups.resize(n_groups);
    for (auto& g : result.groups) g.resize(static_cast<std::size_t>(steps) + 1);
    std::vector<double> dist_sum(width, 0.0), dist_sq(width, 0.0);

    // Partial results are folded strictly in chunk order, so the floating-point
    // sums do not depend on scheduling.
    std::mutex fold_mutex;
    std::map<std::size_t, ChunkResult> pending;
    std::size_t next_fold = 0;
    auto fold_ready = [&] {
        for (auto it = pending.find(next_fold); it != pending.end(); it = pending.find(next_fold)) {
            const ChunkResult& r = it->second;
            for (std::size_t i = 0; i < width; ++i) {
                dist_sum[i] += r.dist_sum[i];
                dist_sq[i] += r.dist_sq[i];
            }
            result.groups[chunks[next_fold].group].add(r.sums);
            pending.erase(it);
            ++next_fold;
        }
    };

    std::atomic<std::size_t> next_chunk{0};
    std::exception_ptr failure;
    auto worker = [&] {
        try {
            for (std::size_t i = next_chunk++; i < chunks.size(); i = next_chunk++) {
                ChunkResult r = run_chunk(chunks[i], c, channel, steps, master_seed);
                std::lock_guard lock(fold_mutex);
                pending.emplace(i, std::move(r));
                fold_ready();
            }
        } catch (...) {
            std::lock_guard lock(fold_mutex);
            if (!failure) failure = std::current_exception();
            next_chunk = chunks.size();
        }
    };

    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& g : result.groups) result.sums.add(g);
    result.moments = result.sums.to_series();

    const double n = static_cast<double>(runs);
    result.mean_distribution = {-steps, std::vector<double>(width, 0.0)};
    result.distribution_stderr.assign(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
        const double mean = dist_sum[i] / n;
        result.mean_distribution.probabilities[i] = mean;
        if (runs >= 2) {
            const double var = std::max(0.0, (dist_sq[i] - n * mean * mean) / (n - 1.0));
            result.distribution_stderr[i] = std::sqrt(var / n);
        }
    }
    return result;
}

}  // namespace qwalk
