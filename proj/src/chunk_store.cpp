#include "casdet/chunk_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "casdet/kv_config.hpp"

namespace casdet {

static std::vector<std::int64_t> level_image_shape(const pyramid_spec& spec, std::int64_t ppc, int level) {
    auto shape = axis_chunks(spec, level);
    for (auto& s : shape) {
        s *= ppc;
    }
    return shape;
}

nd_array<float> slice_chunk(const nd_array<float>& level_image, const pyramid_spec& spec,
                            std::int64_t ppc, const chunk_index& idx) {
    validate_index(spec, idx);
    const int d = spec.dim;
    std::vector<std::int64_t> chunk_shape(static_cast<std::size_t>(d), ppc);
    nd_array<float> out(chunk_shape);
    // copy contiguous last-axis runs
    const std::int64_t rows = out.size() / ppc;
    std::vector<std::int64_t> local(static_cast<std::size_t>(d), 0);
    std::vector<std::int64_t> global(static_cast<std::size_t>(d), 0);
    for (std::int64_t row = 0; row < rows; ++row) {
        std::int64_t rest = row;
        for (int i = d - 2; i >= 0; --i) {
            local[static_cast<std::size_t>(i)] = rest % ppc;
            rest /= ppc;
        }
        local[static_cast<std::size_t>(d - 1)] = 0;
        for (int i = 0; i < d; ++i) {
            global[static_cast<std::size_t>(i)] = idx.coords[static_cast<std::size_t>(i)] * ppc +
                                                  local[static_cast<std::size_t>(i)];
        }
        std::memcpy(&out.data[static_cast<std::size_t>(row * ppc)],
                    &level_image.data[static_cast<std::size_t>(level_image.offset(global))],
                    static_cast<std::size_t>(ppc) * sizeof(float));
    }
    return out;
}

memory_chunk_source::memory_chunk_source(pyramid_spec spec, std::int64_t ppc,
                                         std::vector<nd_array<float>> level_images)
    : spec_(std::move(spec)), pixels_per_chunk_(ppc), images_(std::move(level_images)) {
    if (static_cast<int>(images_.size()) != spec_.levels) {
        throw std::invalid_argument("memory_chunk_source: need one image per level");
    }
    for (int k = 0; k < spec_.levels; ++k) {
        if (images_[k].shape != level_image_shape(spec_, ppc, k)) {
            throw std::invalid_argument("memory_chunk_source: level " + std::to_string(k) +
                                        " image shape does not match the pyramid geometry");
        }
    }
}

nd_array<float> memory_chunk_source::read_chunk(const chunk_index& idx) const {
    validate_index(spec_, idx);
    return slice_chunk(images_[idx.level], spec_, pixels_per_chunk_, idx);
}

std::filesystem::path chunk_file_name(const chunk_index& idx) {
    std::string name = "chunk";
    for (std::int64_t c : idx.coords) {
        name += "_" + std::to_string(c);
    }
    name += ".raw";
    return std::filesystem::path("level" + std::to_string(idx.level)) / name;
}

static void write_f32_le(std::ofstream& out, const std::vector<float>& values) {
    std::vector<unsigned char> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(values[i]);
        bytes[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
        bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
        bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
        bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_chunk_directory(const std::filesystem::path& root, const pyramid_spec& spec,
                           std::int64_t ppc, const std::vector<nd_array<float>>& level_images) {
    if (static_cast<int>(level_images.size()) != spec.levels) {
        throw std::invalid_argument("write_chunk_directory: need one image per level");
    }
    std::filesystem::create_directories(root);
    {
        std::ofstream manifest(root / "manifest.txt");
        manifest << "format = casdet-chunks/1\n";
        manifest << "dim = " << spec.dim << "\n";
        manifest << "levels = " << spec.levels << "\n";
        manifest << "l0_chunks_per_axis = ";
        for (int i = 0; i < spec.dim; ++i) {
            manifest << (i ? ", " : "") << spec.l0_chunks_per_axis[static_cast<std::size_t>(i)];
        }
        manifest << "\n";
        manifest << "pixels_per_chunk_axis = " << ppc << "\n";
        manifest << "dtype = float32\n";
        manifest << "byte_order = little\n";
    }
    for (int k = 0; k < spec.levels; ++k) {
        std::filesystem::create_directories(root / ("level" + std::to_string(k)));
        const std::int64_t n = chunk_count(spec, k);
        for (std::int64_t c = 0; c < n; ++c) {
            const chunk_index idx = index_from_linear(spec, k, c);
            const nd_array<float> chunk = slice_chunk(level_images[static_cast<std::size_t>(k)], spec, ppc, idx);
            std::ofstream out(root / chunk_file_name(idx), std::ios::binary);
            if (!out) {
                throw chunk_io_error("cannot write chunk file for " + to_string(idx));
            }
            write_f32_le(out, chunk.data);
        }
    }
}

directory_chunk_source::directory_chunk_source(const std::filesystem::path& root) : root_(root) {
    const auto manifest_path = root / "manifest.txt";
    if (!std::filesystem::exists(manifest_path)) {
        throw chunk_io_error("missing manifest: " + manifest_path.string());
    }
    kv_file manifest = kv_file::parse_file(manifest_path);
    const std::string format = manifest.get_string("format");
    if (format != "casdet-chunks/1") {
        throw chunk_io_error("unsupported chunk directory format: " + format);
    }
    const int dim = static_cast<int>(manifest.get_int("dim"));
    const int levels = static_cast<int>(manifest.get_int("levels"));
    spec_ = pyramid_spec(dim, levels, manifest.get_int_list("l0_chunks_per_axis"));
    pixels_per_chunk_ = manifest.get_int("pixels_per_chunk_axis");
    if (pixels_per_chunk_ < 1) {
        throw chunk_io_error("pixels_per_chunk_axis must be positive");
    }
    const std::string dtype = manifest.get_string("dtype");
    if (dtype == "float32") {
        dtype_bytes_ = 4;
    } else if (dtype == "float64") {
        dtype_bytes_ = 8;
    } else {
        throw chunk_io_error("unsupported dtype: " + dtype);
    }
    if (manifest.get_string("byte_order", "little") != "little") {
        throw chunk_io_error("unsupported byte_order: " + manifest.get_string("byte_order"));
    }
}

nd_array<float> directory_chunk_source::read_chunk(const chunk_index& idx) const {
    validate_index(spec_, idx);
    const auto path = root_ / chunk_file_name(idx);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw chunk_io_error("missing chunk data for " + to_string(idx) + " (" + path.string() + ")");
    }
    std::int64_t count = 1;
    for (int i = 0; i < spec_.dim; ++i) {
        count *= pixels_per_chunk_;
    }
    std::vector<unsigned char> bytes(static_cast<std::size_t>(count * dtype_bytes_));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw chunk_io_error("short read for " + to_string(idx) + " (" + path.string() + ")");
    }
    nd_array<float> out(std::vector<std::int64_t>(static_cast<std::size_t>(spec_.dim), pixels_per_chunk_));
    for (std::int64_t i = 0; i < count; ++i) {
        const std::size_t off = static_cast<std::size_t>(i * dtype_bytes_);
        if (dtype_bytes_ == 4) {
            std::uint32_t u = static_cast<std::uint32_t>(bytes[off]) |
                              (static_cast<std::uint32_t>(bytes[off + 1]) << 8) |
                              (static_cast<std::uint32_t>(bytes[off + 2]) << 16) |
                              (static_cast<std::uint32_t>(bytes[off + 3]) << 24);
            out.data[static_cast<std::size_t>(i)] = std::bit_cast<float>(u);
        } else {
            std::uint64_t u = 0;
            for (int b = 7; b >= 0; --b) {
                u = (u << 8) | bytes[off + static_cast<std::size_t>(b)];
            }
            out.data[static_cast<std::size_t>(i)] = static_cast<float>(std::bit_cast<double>(u));
        }
    }
    return out;
}

}  // namespace casdet
