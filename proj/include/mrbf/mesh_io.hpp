#pragma once

#include "mrbf/mesh.hpp"

#include <filesystem>
#include <iosfwd>

namespace mrbf {

// Line-oriented mesh text format:
//
//   meshfmt 1
//   side master|slave              (optional)
//   nodes <count> <dim>
//   <x> [<y> [<z>]]                (one row per node, %.17g)
//   elements <count> <kind-tag>
//   <i0> <i1> ...                  (0-based node ids)
//   tags <count>                   (optional)
//   edge <a> <b> <tag> | element <e> <tag>
//
// Blank lines and lines starting with '#' are ignored. Errors throw
// format-error with the offending line number.

[[nodiscard]] Mesh read_mesh(std::istream& in);
void write_mesh(const Mesh& mesh, std::ostream& out);

[[nodiscard]] Mesh load_mesh(const std::filesystem::path& path);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace mrbf
