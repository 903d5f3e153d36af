#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cwc/pattern.hpp"

namespace cwc {

/// An expanded monitor: the match count of `pattern` in the content of one
/// spatial compartment, or the mean of that count over every spatial
/// compartment passing the label filter.
struct Monitor {
    std::string name;
    std::optional<Coordinate> cell;   ///< nullopt: whole-grid average
    std::optional<Label> label;       ///< nullopt: any spatial label
    Pattern pattern;
};

/// `system` is the content of the root compartment. Never mutates it.
[[nodiscard]] double evaluate_monitor(const Monitor& m, const Term& system);

/// Monitor values sampled at fixed times during one run.
struct Trajectory {
    std::vector<std::string> monitors;
    std::vector<double> times;
    std::vector<std::vector<double>> values;   ///< values[sample][monitor]
};

/// Per-monitor, per-sample mean and sample standard deviation over runs.
struct EnsembleSeries {
    std::vector<std::string> monitors;
    std::vector<double> times;
    std::vector<std::vector<double>> mean;     ///< mean[monitor][sample]
    std::vector<std::vector<double>> stddev;   ///< stddev[monitor][sample]
    std::size_t runs = 0;
};

/// Folds trajectories in the given order. All must share times and monitors.
[[nodiscard]] EnsembleSeries aggregate(const std::vector<Trajectory>& runs);

/// CSV text: header `time,<m1>,...` (run) or `time,<m1>_mean,<m1>_std,...`
/// (ensemble); numbers in shortest round-trip form; LF line endings. Fields
/// containing commas or quotes are quoted.
[[nodiscard]] std::string format_run_csv(const Trajectory& t);
[[nodiscard]] std::string format_ensemble_csv(const EnsembleSeries& s);

/// Throw std::runtime_error naming the path on I/O failure.
void write_run_csv(const Trajectory& t, const std::filesystem::path& path);
void write_ensemble_csv(const EnsembleSeries& s, const std::filesystem::path& path);
void write_text_file(const std::string& text, const std::filesystem::path& path);

} // namespace cwc
