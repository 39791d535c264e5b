#pragma once

#include "steklov/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace steklov {

/// Malformed input file. The message starts with "line N:" when the problem
/// can be attributed to a line.
class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Text mesh format:
//
//   steklov-mesh v1
//   V <count>         followed by <count> lines "x y [z]"
//   F <count>         followed by <count> lines "a b c" (0-based)
//   B <count>         followed by one line of vertex indices per loop
//   L <count>         optional; per-triangle edge lengths "l01 l12 l20"
//
// The L section is written only for meshes with an intrinsic metric.

void write_mesh(std::ostream& out, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(std::istream& in);

void save_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh);
SurfaceMesh load_mesh(const std::filesystem::path& path);

}  // namespace steklov
