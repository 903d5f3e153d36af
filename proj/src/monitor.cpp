#include "cwc/monitor.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cwc/matcher.hpp"

namespace cwc {

namespace {

double cell_value(const Monitor& m, const Compartment& cell)
{
    if (m.label && cell.label != *m.label) return 0.0;
    return static_cast<double>(detail::count_matches(m.pattern, cell.content));
}

} // namespace

double evaluate_monitor(const Monitor& m, const Term& system)
{
    if (m.cell) {
        const Compartment* cell = find_cell(system, *m.cell);
        return cell ? cell_value(m, *cell) : 0.0;
    }
    double sum = 0.0;
    std::uint64_t cells = 0;
    for (const auto& e : system.compartments) {
        const Compartment& c = e.value;
        if (!c.wrap.coord) continue;
        if (m.label && c.label != *m.label) continue;
        sum += static_cast<double>(e.count) * cell_value(m, c);
        cells += e.count;
    }
    return cells == 0 ? 0.0 : sum / static_cast<double>(cells);
}

EnsembleSeries aggregate(const std::vector<Trajectory>& runs)
{
    EnsembleSeries s;
    if (runs.empty()) return s;
    s.monitors = runs.front().monitors;
    s.times = runs.front().times;
    s.runs = runs.size();
    const std::size_t nm = s.monitors.size();
    const std::size_t ns = s.times.size();
    for (const auto& r : runs) {
        if (r.times != s.times || r.monitors != s.monitors || r.values.size() != ns) {
            throw std::invalid_argument("aggregate: trajectories differ in sampling or monitors");
        }
    }
    s.mean.assign(nm, std::vector<double>(ns, 0.0));
    s.stddev.assign(nm, std::vector<double>(ns, 0.0));
    const double n = static_cast<double>(runs.size());
    for (std::size_t m = 0; m < nm; ++m) {
        for (std::size_t k = 0; k < ns; ++k) {
            double sum = 0.0;
            for (const auto& r : runs) sum += r.values[k][m];
            const double mean = sum / n;
            double sq = 0.0;
            for (const auto& r : runs) {
                const double d = r.values[k][m] - mean;
                sq += d * d;
            }
            s.mean[m][k] = mean;
            s.stddev[m][k] = runs.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
        }
    }
    return s;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string format_run_csv(const Trajectory& t)
{
    std::string out = "time";
    for (const auto& m : t.monitors) out += "," + csv_field(m);
    out += "\n";
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        out += format_real(t.times[k]);
        for (double v : t.values[k]) out += "," + format_real(v);
        out += "\n";
    }
    return out;
}

std::string format_ensemble_csv(const EnsembleSeries& s)
{
    std::string out = "time";
    for (const auto& m : s.monitors) out += "," + csv_field(m + "_mean") + "," + csv_field(m + "_std");
    out += "\n";
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        out += format_real(s.times[k]);
        for (std::size_t m = 0; m < s.monitors.size(); ++m) {
            out += "," + format_real(s.mean[m][k]) + "," + format_real(s.stddev[m][k]);
        }
        out += "\n";
    }
    return out;
}

void write_text_file(const std::string& text, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_run_csv(const Trajectory& t, const std::filesystem::path& path)
{
    write_text_file(format_run_csv(t), path);
}

void write_ensemble_csv(const EnsembleSeries& s, const std::filesystem::path& path)
{
    write_text_file(format_ensemble_csv(s), path);
}

} // namespace cwc
