#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "casdet/nd_array.hpp"
#include "casdet/pyramid.hpp"

namespace casdet {

/// Raised when chunk data cannot be read; the message names the chunk index.
class chunk_io_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Chunked array access keyed by chunk_index. Chunks have the same pixel
/// extent at every level (image extent and chunk count both halve per level).
class chunk_source {
public:
    virtual ~chunk_source() = default;
    virtual const pyramid_spec& spec() const = 0;
    virtual std::int64_t pixels_per_chunk_axis() const = 0;
    virtual nd_array<float> read_chunk(const chunk_index& idx) const = 0;
};

/// In-memory backing: one dense image per level.
class memory_chunk_source final : public chunk_source {
public:
    memory_chunk_source(pyramid_spec spec, std::int64_t pixels_per_chunk_axis,
                        std::vector<nd_array<float>> level_images);

    const pyramid_spec& spec() const override { return spec_; }
    std::int64_t pixels_per_chunk_axis() const override { return pixels_per_chunk_; }
    nd_array<float> read_chunk(const chunk_index& idx) const override;

private:
    pyramid_spec spec_;
    std::int64_t pixels_per_chunk_;
    std::vector<nd_array<float>> images_;
};

/// Directory backing: one little-endian raw binary file per chunk under
/// level<k>/chunk_<c0>_..._<cd-1>.raw plus a manifest.txt sidecar declaring
/// geometry and dtype (float32 or float64).
class directory_chunk_source final : public chunk_source {
public:
    explicit directory_chunk_source(const std::filesystem::path& root);

    const pyramid_spec& spec() const override { return spec_; }
    std::int64_t pixels_per_chunk_axis() const override { return pixels_per_chunk_; }
    nd_array<float> read_chunk(const chunk_index& idx) const override;

private:
    std::filesystem::path root_;
    pyramid_spec spec_;
    std::int64_t pixels_per_chunk_ = 0;
    int dtype_bytes_ = 4;
};

/// Relative path of one chunk file inside a chunk directory.
std::filesystem::path chunk_file_name(const chunk_index& idx);

/// Writes a full pyramid of level images as a chunk directory (manifest +
/// float32 chunk files), the layout directory_chunk_source reads.
void write_chunk_directory(const std::filesystem::path& root, const pyramid_spec& spec,
                           std::int64_t pixels_per_chunk_axis,
                           const std::vector<nd_array<float>>& level_images);

/// Copies the chunk at idx out of a full level image.
nd_array<float> slice_chunk(const nd_array<float>& level_image, const pyramid_spec& spec,
                            std::int64_t pixels_per_chunk_axis, const chunk_index& idx);

}  // namespace casdet
