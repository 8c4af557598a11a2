#pragma once

// OBJ export of a reflector surface {rho(x) x} over a grid.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lumen/envelope.hpp"
#include "lumen/sphere_grid.hpp"

namespace lumen::cli {

struct Mesh
{
    std::vector<Vec3> vertices;
    std::vector<std::size_t> atoms; // winning atom per vertex
    std::vector<std::array<std::uint32_t, 3>> faces; // zero-based
};

/// One vertex per grid node at rho(x) x followed by a `#@atom <i>` comment,
/// then the grid triangles. Coordinates use 17 significant digits.
void write_obj(const Reflector& r, const SphericalGrid& grid, const std::filesystem::path& path);

/// Reads files produced by write_obj. Throws io-error on read failure or malformed lines.
Mesh read_obj(const std::filesystem::path& path);

} // namespace lumen::cli
