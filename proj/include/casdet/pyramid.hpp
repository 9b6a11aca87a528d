#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace casdet {

/// Geometry of a multiresolution chunk grid. Level 0 is the finest; every
/// level up halves the chunk count along each axis, so each level-(k+1)
/// chunk covers exactly 2^dim level-k chunks.
struct pyramid_spec {
    int dim = 0;
    int levels = 0;
    std::vector<std::int64_t> l0_chunks_per_axis;

    pyramid_spec() = default;
    /// Validates dim >= 1, levels >= 1, and that every axis count is a
    /// positive multiple of 2^(levels-1) so each level holds a whole number
    /// of chunks. Throws std::invalid_argument otherwise.
    pyramid_spec(int dim, int levels, std::vector<std::int64_t> l0_chunks_per_axis);
};

/// Address of one chunk: pyramid level plus per-axis grid coordinates.
struct chunk_index {
    int level = 0;
    std::vector<std::int64_t> coords;

    bool operator==(const chunk_index&) const = default;
};

/// Chunk counts along each axis at the given level.
std::vector<std::int64_t> axis_chunks(const pyramid_spec& spec, int level);

/// Total number of chunks at the given level (n / 2^(dim*level)).
std::int64_t chunk_count(const pyramid_spec& spec, int level);

/// Throws std::out_of_range / std::invalid_argument when idx does not
/// address a chunk of spec.
void validate_index(const pyramid_spec& spec, const chunk_index& idx);

/// The 2^dim chunks one level down that tile idx. Requires idx.level >= 1.
/// Returned in ascending linear order.
std::vector<chunk_index> children(const pyramid_spec& spec, const chunk_index& idx);

/// The unique chunk one level up containing idx. Requires
/// idx.level < spec.levels - 1.
chunk_index parent(const pyramid_spec& spec, const chunk_index& idx);

/// Row-major linearization at idx's level. Stable across runs; used as the
/// dense storage order for labels and predictions.
std::int64_t linear_index(const pyramid_spec& spec, const chunk_index& idx);

/// Inverse of linear_index.
chunk_index index_from_linear(const pyramid_spec& spec, int level, std::int64_t linear);

/// "level 1 chunk [0,2,3]", for error messages and logs.
std::string to_string(const chunk_index& idx);

}  // namespace casdet
