#pragma once

#include <cstdint>
#include <vector>

namespace casdet {

/// Minimal dense row-major n-dimensional array (last axis fastest).
template <typename T>
struct nd_array {
    std::vector<std::int64_t> shape;
    std::vector<T> data;

    nd_array() = default;
    nd_array(std::vector<std::int64_t> shape_, T fill = T{}) : shape(std::move(shape_)) {
        std::int64_t n = 1;
        for (std::int64_t s : shape) {
            n *= s;
        }
        data.assign(static_cast<std::size_t>(n), fill);
    }

    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }

    std::int64_t offset(const std::vector<std::int64_t>& coords) const {
        std::int64_t off = 0;
        for (std::size_t i = 0; i < shape.size(); ++i) {
            off = off * shape[i] + coords[i];
        }
        return off;
    }

    T& at(const std::vector<std::int64_t>& coords) { return data[static_cast<std::size_t>(offset(coords))]; }
    const T& at(const std::vector<std::int64_t>& coords) const {
        return data[static_cast<std::size_t>(offset(coords))];
    }
};

/// Decodes a row-major linear offset back to coordinates.
inline std::vector<std::int64_t> coords_from_offset(const std::vector<std::int64_t>& shape,
                                                    std::int64_t offset) {
    std::vector<std::int64_t> coords(shape.size());
    for (std::size_t i = shape.size(); i-- > 0;) {
        coords[i] = offset % shape[i];
        offset /= shape[i];
    }
    return coords;
}

}  // namespace casdet
