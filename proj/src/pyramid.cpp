#include "casdet/pyramid.hpp"

#include <stdexcept>
#include <string>

namespace casdet {

pyramid_spec::pyramid_spec(int dim_, int levels_, std::vector<std::int64_t> axes)
    : dim(dim_), levels(levels_), l0_chunks_per_axis(std::move(axes)) {
    if (dim < 1) {
        throw std::invalid_argument("pyramid_spec: dim must be >= 1, got " + std::to_string(dim));
    }
    if (levels < 1) {
        throw std::invalid_argument("pyramid_spec: levels must be >= 1, got " + std::to_string(levels));
    }
    if (static_cast<int>(l0_chunks_per_axis.size()) != dim) {
        throw std::invalid_argument("pyramid_spec: l0_chunks_per_axis must have dim entries");
    }
    const std::int64_t divisor = std::int64_t{1} << (levels - 1);
    for (int i = 0; i < dim; ++i) {
        const std::int64_t a = l0_chunks_per_axis[i];
        if (a < 1) {
            throw std::invalid_argument("pyramid_spec: l0_chunks_per_axis[" + std::to_string(i) +
                                        "] must be positive");
        }
        if (a % divisor != 0) {
            // no padding semantics: a grid that does not split evenly at every
            // level is rejected at construction
            throw std::invalid_argument("pyramid_spec: l0_chunks_per_axis[" + std::to_string(i) +
                                        "] = " + std::to_string(a) + " is not divisible by 2^(levels-1) = " +
                                        std::to_string(divisor));
        }
    }
}

static void check_level(const pyramid_spec& spec, int level) {
    if (level < 0 || level >= spec.levels) {
        throw std::out_of_range("level " + std::to_string(level) + " out of range [0, " +
                                std::to_string(spec.levels) + ")");
    }
}

std::vector<std::int64_t> axis_chunks(const pyramid_spec& spec, int level) {
    check_level(spec, level);
    std::vector<std::int64_t> out(spec.l0_chunks_per_axis);
    for (auto& a : out) {
        a >>= level;
    }
    return out;
}

std::int64_t chunk_count(const pyramid_spec& spec, int level) {
    check_level(spec, level);
    std::int64_t n = 1;
    for (std::int64_t a : spec.l0_chunks_per_axis) {
        n *= a >> level;
    }
    return n;
}

void validate_index(const pyramid_spec& spec, const chunk_index& idx) {
    check_level(spec, idx.level);
    if (static_cast<int>(idx.coords.size()) != spec.dim) {
        throw std::invalid_argument("chunk_index has " + std::to_string(idx.coords.size()) +
                                    " coords, spec has dim " + std::to_string(spec.dim));
    }
    const auto axes = axis_chunks(spec, idx.level);
    for (int i = 0; i < spec.dim; ++i) {
        if (idx.coords[i] < 0 || idx.coords[i] >= axes[i]) {
            throw std::out_of_range("chunk coord[" + std::to_string(i) + "] = " +
                                    std::to_string(idx.coords[i]) + " outside [0, " +
                                    std::to_string(axes[i]) + ") at level " + std::to_string(idx.level));
        }
    }
}

std::vector<chunk_index> children(const pyramid_spec& spec, const chunk_index& idx) {
    validate_index(spec, idx);
    if (idx.level < 1) {
        throw std::out_of_range("children: level-0 chunks have no children");
    }
    const int d = spec.dim;
    std::vector<chunk_index> out;
    out.reserve(std::size_t{1} << d);
    // enumerate the 2^d offsets with the last axis fastest, matching
    // row-major linear order of the children
    for (std::int64_t bits = 0; bits < (std::int64_t{1} << d); ++bits) {
        chunk_index c;
        c.level = idx.level - 1;
        c.coords.resize(d);
        for (int i = 0; i < d; ++i) {
            const std::int64_t offset = (bits >> (d - 1 - i)) & 1;
            c.coords[i] = idx.coords[i] * 2 + offset;
        }
        out.push_back(std::move(c));
    }
    return out;
}

chunk_index parent(const pyramid_spec& spec, const chunk_index& idx) {
    validate_index(spec, idx);
    if (idx.level >= spec.levels - 1) {
        throw std::out_of_range("parent: level " + std::to_string(idx.level) +
                                " is the top of a " + std::to_string(spec.levels) + "-level pyramid");
    }
    chunk_index p;
    p.level = idx.level + 1;
    p.coords.resize(spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
        p.coords[i] = idx.coords[i] / 2;
    }
    return p;
}

std::int64_t linear_index(const pyramid_spec& spec, const chunk_index& idx) {
    validate_index(spec, idx);
    const auto axes = axis_chunks(spec, idx.level);
    std::int64_t lin = 0;
    for (int i = 0; i < spec.dim; ++i) {
        lin = lin * axes[i] + idx.coords[i];
    }
    return lin;
}

std::string to_string(const chunk_index& idx) {
    std::string s = "level " + std::to_string(idx.level) + " chunk [";
    for (std::size_t i = 0; i < idx.coords.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += std::to_string(idx.coords[i]);
    }
    return s + "]";
}

chunk_index index_from_linear(const pyramid_spec& spec, int level, std::int64_t linear) {
    check_level(spec, level);
    if (linear < 0 || linear >= chunk_count(spec, level)) {
        throw std::out_of_range("linear index " + std::to_string(linear) + " out of range at level " +
                                std::to_string(level));
    }
    const auto axes = axis_chunks(spec, level);
    chunk_index idx;
    idx.level = level;
    idx.coords.resize(spec.dim);
    for (int i = spec.dim - 1; i >= 0; --i) {
        idx.coords[i] = linear % axes[i];
        linear /= axes[i];
    }
    return idx;
}

}  // namespace casdet
