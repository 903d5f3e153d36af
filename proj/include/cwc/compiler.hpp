#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwc/model.hpp"
#include "cwc/surface.hpp"

namespace cwc {

/// Thrown by compile() when the model does not validate.
class CompileError : public std::runtime_error {
public:
    explicit CompileError(std::vector<Diagnostic> diags);
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

/// Explicit, deduplicated, row-major coordinate set. Throws std::out_of_range
/// if an item reaches outside the grid or a rect is inverted.
[[nodiscard]] std::vector<Coordinate> eval_coords(const CoordSetExpr& e, GridDims dims);

/// Neighbour of `c` in direction `d`; nullopt if it falls off the grid.
[[nodiscard]] std::optional<Coordinate> shift(Coordinate c, Direction d, GridDims dims);

/// Spatial labels in order of first appearance (rules, then cells).
[[nodiscard]] std::vector<Label> spatial_labels(const SurfaceModel& m);

/// Errors and warnings; compile() succeeds iff there are no errors.
[[nodiscard]] std::vector<Diagnostic> validate(const SurfaceModel& m);

[[nodiscard]] CompiledModel compile(const SurfaceModel& m);

/// Deterministic text form of a compiled model (`cwc-ground v1`).
[[nodiscard]] std::string emit_ground_model(const CompiledModel& m);

/// Reserved variable names introduced by the compiler for the first and
/// second spatial compartment of an expanded rule. They cannot be written in
/// model files because identifiers must start with a letter.
inline constexpr const char* kCellWrapVar[2] = {"_x", "_y"};
inline constexpr const char* kCellContentVar[2] = {"_X", "_Y"};

} // namespace cwc
