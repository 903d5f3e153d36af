#include "cwc/gillespie.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace cwc {

std::vector<Channel> build_channels(const Term& system, std::span<const RewriteRule> rules)
{
    std::vector<Channel> out;
    for (auto& s : collect_sites(rules, system)) {
        const double a = rules[s.rule].rate * static_cast<double>(s.count);
        out.push_back(Channel{s.rule, std::move(s.path), s.count, a});
    }
    return out;
}

double total_propensity(const std::vector<Channel>& channels)
{
    double a0 = 0.0;
    for (const auto& c : channels) a0 += c.propensity;
    return a0;
}

std::optional<Selection> select_reaction(const std::vector<Channel>& channels, double u1, double u2)
{
    const double a0 = total_propensity(channels);
    if (!(a0 > 0.0)) return std::nullopt;
    Selection s;
    s.tau = std::log(1.0 / u1) / a0;
    const double target = u2 * a0;
    double cum = 0.0;
    std::optional<std::size_t> last;
    for (std::size_t j = 0; j < channels.size(); ++j) {
        if (channels[j].propensity > 0.0) last = j;
        cum += channels[j].propensity;
        if (cum > target) {
            s.channel = j;
            return s;
        }
    }
    // rounding left target at or above the final sum
    s.channel = *last;
    return s;
}

double RandomStream::open_closed()
{
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::closed_open()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t n)
{
    if (n == 0) throw std::invalid_argument("RandomStream::below(0)");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = next();
        if (x >= threshold) return x % n;
    }
}

std::optional<Event> step(SimulationState& state, const std::vector<Channel>& channels)
{
    if (!(total_propensity(channels) > 0.0)) return std::nullopt;
    const double u1 = state.rng.open_closed();
    const double u2 = state.rng.closed_open();
    const auto sel = select_reaction(channels, u1, u2);
    Event e;
    e.tau = sel->tau;
    e.channel = sel->channel;
    e.match_index = state.rng.below(channels[e.channel].count);
    return e;
}

void fire(SimulationState& state, std::span<const RewriteRule> rules, const std::vector<Channel>& channels, const Event& e)
{
    const Channel& ch = channels.at(e.channel);
    const RewriteRule& rule = rules[ch.rule];
    const Match m = detail::match_at(rule.pattern, content_at(state.term, ch.site), e.match_index);
    apply_rewrite_in_place(state.term, rule, ch.site, m);
    state.time += e.tau;
}

std::vector<double> sample_times(double horizon, double interval)
{
    if (!(horizon > 0.0) || !(interval > 0.0) || !std::isfinite(horizon) || !std::isfinite(interval)) {
        throw std::invalid_argument("horizon and interval must be positive and finite");
    }
    std::vector<double> out;
    for (std::uint64_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * interval;
        // tolerate the last grid point landing a hair past the horizon
        if (t > horizon * (1.0 + 1e-12)) break;
        out.push_back(std::min(t, horizon));
    }
    if (out.back() < horizon) out.push_back(horizon);
    return out;
}

Trajectory simulate_run(const CompiledModel& model, double horizon, double interval, std::uint64_t seed)
{
    Trajectory traj;
    traj.times = sample_times(horizon, interval);
    for (const auto& m : model.monitors) traj.monitors.push_back(m.name);
    traj.values.reserve(traj.times.size());

    SimulationState state{model.initial, 0.0, RandomStream(seed)};
    auto record = [&] {
        std::vector<double> row;
        row.reserve(model.monitors.size());
        for (const auto& m : model.monitors) row.push_back(evaluate_monitor(m, state.term));
        traj.values.push_back(std::move(row));
    };

    std::size_t k = 0;
    while (k < traj.times.size()) {
        const auto channels = build_channels(state.term, model.rules);
        const auto ev = step(state, channels);
        const double next = ev ? state.time + ev->tau : std::numeric_limits<double>::infinity();
        while (k < traj.times.size() && traj.times[k] < next) {
            record();
            ++k;
        }
        if (!ev || k == traj.times.size()) break;
        fire(state, model.rules, channels, *ev);
    }
    return traj;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    // splitmix64 output number `index` of the stream started at `base`
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<Trajectory> run_trajectories(const CompiledModel& model, std::size_t runs, double horizon, double interval,
                                         std::uint64_t base_seed, unsigned threads)
{
    if (runs == 0) throw std::invalid_argument("an ensemble needs at least one run");
    (void)sample_times(horizon, interval);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));

    std::vector<Trajectory> out(runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= runs) return;
            try {
                out[i] = simulate_run(model, horizon, interval, derive_seed(base_seed, i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = runs;
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

EnsembleSeries run_ensemble(const CompiledModel& model, std::size_t runs, double horizon, double interval,
                            std::uint64_t base_seed, unsigned threads)
{
    return aggregate(run_trajectories(model, runs, horizon, interval, base_seed, threads));
}

} // namespace cwc
