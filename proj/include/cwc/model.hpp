#pragma once

#include <string>
#include <vector>

#include "cwc/monitor.hpp"
#include "cwc/pattern.hpp"

namespace cwc {

struct GridDims {
    int rows = 0;
    int cols = 0;

    [[nodiscard]] bool contains(const Coordinate& c) const
    {
        return c.row >= 1 && c.row <= rows && c.col >= 1 && c.col <= cols;
    }

    friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// A ground CWC model ready for simulation. `initial` is the content of the
/// root compartment (label `top`, empty wrap).
struct CompiledModel {
    std::string name;
    GridDims dims;
    Term initial;
    std::vector<RewriteRule> rules;
    std::vector<Monitor> monitors;
};

} // namespace cwc
