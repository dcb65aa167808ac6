#pragma once

#include <filesystem>

#include "cch/fields.hpp"

namespace cch {

/// Binary snapshot of a physical field at one instant.
///
/// Layout (all integers and floats little-endian):
///   bytes  0..7   magic "CCHFLD\0\0"
///   bytes  8..11  format version (u32, currently 1)
///   bytes 12..15  reserved, zero
///   bytes 16..19  dimension (u32)
///   bytes 20..23  points_per_axis (u32)
///   bytes 24..31  time (f64)
///   bytes 32..    grid values (f64, row-major, points_per_axis^dimension)
struct Snapshot {
    PhysicalField field;
    double time = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const PhysicalField& field, double time);
Snapshot load_snapshot(const std::filesystem::path& path);

/// Plain-text export: one sample per line in 1D ("x value"), one row of
/// values per grid line in 2D. "csv" uses commas, "txt" whitespace.
void export_snapshot_text(const Snapshot& snap, const std::filesystem::path& out_path,
                          const std::string& format);

} // namespace cch
