#pragma once

#include <filesystem>
#include <iosfwd>

#include "qmod/field.hpp"

namespace qmod {

// Text layout (whitespace separated, '#' starts a comment line):
//
//   qmod-grid 1
//   dim <n>
//   axis <lo> <hi> <count>        one line per axis
//   <values>                      row-major, last axis fastest
//
// Binary layout (little-endian):
//
//   "QMODGRID" | u32 version=1 | u32 n | n x (f64 lo, f64 hi, u64 count) | f64 values
//
// Both forms carry only the lattice; an `outside` default is a scenario-level
// setting.

GridField parse_grid_text(std::istream& in);
GridField parse_grid_binary(std::istream& in);
void write_grid_text(std::ostream& out, const GridField& g);
void write_grid_binary(std::ostream& out, const GridField& g);

/// Reads either form, detected from the leading magic.
GridField read_grid_file(const std::filesystem::path& path);

}  // namespace qmod
