#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cwc/matcher.hpp"
#include "cwc/model.hpp"
#include "cwc/monitor.hpp"

namespace cwc {

/// One (rule, site) pair with its mass-action propensity rate * count.
struct Channel {
    std::size_t rule = 0;
    SitePath site;
    std::uint64_t count = 0;
    double propensity = 0.0;
};

/// Ordered by rule index, then site path in pre-order.
[[nodiscard]] std::vector<Channel> build_channels(const Term& system, std::span<const RewriteRule> rules);

[[nodiscard]] double total_propensity(const std::vector<Channel>& channels);

struct Selection {
    double tau = 0.0;
    std::size_t channel = 0;
};

/// Direct-method choice for u1 in (0,1] and u2 in [0,1). nullopt when the
/// total propensity is zero.
[[nodiscard]] std::optional<Selection> select_reaction(const std::vector<Channel>& channels, double u1, double u2);

/// 64-bit Mersenne Twister with the few draws the simulator needs.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on (0,1].
    double open_closed();
    /// Uniform on [0,1).
    double closed_open();
    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

struct SimulationState {
    Term term;
    double time = 0.0;
    RandomStream rng;
};

struct Event {
    double tau = 0.0;
    std::size_t channel = 0;
    std::uint64_t match_index = 0;
};

/// Draws u1, u2 and the match index from state.rng, in that order. Does not
/// modify the term or the clock. nullopt when quiescent (no draws made).
[[nodiscard]] std::optional<Event> step(SimulationState& state, const std::vector<Channel>& channels);

/// Applies `e` and advances the clock by its tau.
void fire(SimulationState& state, std::span<const RewriteRule> rules, const std::vector<Channel>& channels, const Event& e);

/// 0, interval, 2*interval, ... up to the horizon; the horizon itself is
/// appended when it is not on the grid.
[[nodiscard]] std::vector<double> sample_times(double horizon, double interval);

[[nodiscard]] Trajectory simulate_run(const CompiledModel& model, double horizon, double interval, std::uint64_t seed);

/// Seed of run `index` in an ensemble with base seed `base`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Runs in index order regardless of `threads` (0 = hardware concurrency).
[[nodiscard]] std::vector<Trajectory> run_trajectories(const CompiledModel& model, std::size_t runs, double horizon,
                                                       double interval, std::uint64_t base_seed, unsigned threads = 0);

[[nodiscard]] EnsembleSeries run_ensemble(const CompiledModel& model, std::size_t runs, double horizon, double interval,
                                          std::uint64_t base_seed, unsigned threads = 0);

} // namespace cwc
